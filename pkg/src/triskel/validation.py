"""Input coercion and validation helpers used at API boundaries."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .errors import DataError, EmptyInput


def as_xy(point) -> tuple[float, float]:
    """Coerce a Point2D, 2-tuple, or length-2 array to a finite (x, y) pair."""
    if hasattr(point, "x") and hasattr(point, "y"):
        x, y = float(point.x), float(point.y)
    else:
        seq = tuple(point)
        if len(seq) != 2:
            raise DataError(f"expected a 2D point, got {point!r}")
        x, y = float(seq[0]), float(seq[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DataError(f"point coordinates must be finite, got ({x}, {y})")
    return x, y


def as_xy_list(points: Iterable) -> list[tuple[float, float]]:
    """Coerce an iterable of point-likes to a list of finite (x, y) pairs."""
    out = [as_xy(p) for p in points]
    if not out:
        raise EmptyInput("need at least one point")
    return out


def as_bool_grid(pixels, width: int | None = None, height: int | None = None) -> np.ndarray:
    """Coerce pixel data to a 2D boolean array of shape (height, width)."""
    arr = np.asarray(pixels)
    if arr.ndim == 1:
        if width is None or height is None:
            raise DataError("flat pixel data requires explicit width and height")
        if arr.size != width * height:
            raise DataError(
                f"pixel count {arr.size} does not match {width}x{height}"
            )
        arr = arr.reshape(height, width)
    elif arr.ndim != 2:
        raise DataError(f"expected 1D or 2D pixel data, got shape {arr.shape}")
    if width is not None and arr.shape[1] != width:
        raise DataError(f"width mismatch: {arr.shape[1]} != {width}")
    if height is not None and arr.shape[0] != height:
        raise DataError(f"height mismatch: {arr.shape[0]} != {height}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DataError("raster dimensions must be positive")
    return arr.astype(bool)


def check_positive(name: str, value) -> None:
    if not value > 0:
        raise DataError(f"{name} must be positive, got {value}")


def check_fraction(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise DataError(f"{name} must lie strictly between 0 and 1, got {value}")


def require(condition: bool, exc_type, message: str) -> None:
    if not condition:
        raise exc_type(message)


def crisp_rows(feature_matrix) -> np.ndarray:
    """Return an (m, 6) float array of a-b-c-A-B-C rows from a FeatureMatrix
    or any array-like already in that layout."""
    rows = getattr(feature_matrix, "rows", None)
    if rows is not None:
        data = [(r.lengths + r.angles) for r in rows]
        return np.asarray(data, dtype=float)
    arr = np.asarray(feature_matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 6:
        raise DataError(f"expected an (m, 6) feature array, got shape {arr.shape}")
    return arr

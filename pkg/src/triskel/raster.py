"""Binary raster container and mask file I/O (PGM P2/P5, grayscale PNG)."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DataError
from .validation import as_bool_grid

DEFAULT_THRESHOLD = 127


@dataclass(frozen=True)
class BinaryRaster:
    """Immutable boolean pixel grid; shape (height, width), row-major."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = as_bool_grid(self.pixels)
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def foreground_count(self) -> int:
        return int(self.pixels.sum())

    def __eq__(self, other):
        if not isinstance(other, BinaryRaster):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            (self.pixels == other.pixels).all()
        )

    def foreground_xy(self) -> np.ndarray:
        """(n, 2) array of foreground pixel coordinates as (x, y)."""
        rows, cols = np.nonzero(self.pixels)
        return np.column_stack([cols, rows])


def _parse_pgm(data: bytes, threshold: int) -> BinaryRaster:
    # Tokenizer skipping whitespace and # comments, per the netpbm grammar.
    pos = 0

    def next_token():
        nonlocal pos
        while pos < len(data):
            ch = data[pos : pos + 1]
            if ch == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            elif ch.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DataError("truncated PGM header")
        return data[start:pos]

    magic = next_token()
    if magic not in (b"P2", b"P5"):
        raise DataError(f"not a PGM file (magic {magic!r})")
    width = int(next_token())
    height = int(next_token())
    maxval = int(next_token())
    if width < 1 or height < 1:
        raise DataError(f"bad PGM dimensions {width}x{height}")
    if not 0 < maxval < 256:
        raise DataError(f"unsupported PGM maxval {maxval} (need 1..255)")

    if magic == b"P5":
        pos += 1  # single whitespace after maxval
        raw = data[pos : pos + width * height]
        if len(raw) != width * height:
            raise DataError("truncated PGM pixel data")
        values = np.frombuffer(raw, dtype=np.uint8)
    else:
        tokens = data[pos:].split()
        if len(tokens) < width * height:
            raise DataError("truncated PGM pixel data")
        values = np.array([int(t) for t in tokens[: width * height]], dtype=np.int64)
    grid = values.reshape(height, width) > threshold
    return BinaryRaster(grid)


def read_mask(path, threshold: int = DEFAULT_THRESHOLD) -> BinaryRaster:
    """Read a PGM (P2/P5) or grayscale-converted PNG mask.

    Pixels strictly above `threshold` are foreground.
    """
    path = Path(path)
    data = path.read_bytes()
    if data[:2] in (b"P2", b"P5"):
        return _parse_pgm(data, threshold)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        with Image.open(path) as img:
            gray = np.asarray(img.convert("L"))
        return BinaryRaster(gray > threshold)
    raise DataError(f"{path}: unrecognized mask format (need PGM or PNG)")


def write_pgm(raster: BinaryRaster, path) -> None:
    """Write a binary raster as an 8-bit P5 PGM (foreground 255)."""
    path = Path(path)
    header = f"P5\n{raster.width} {raster.height}\n255\n".encode("ascii")
    body = np.where(raster.pixels, 255, 0).astype(np.uint8).tobytes()
    path.write_bytes(header + body)

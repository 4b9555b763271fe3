"""Mask-to-features pipeline and its configuration.

One sample flows: thin -> boundary polygon -> DCE simplify -> prune branches
-> detect endpoints/junctions -> Delaunay -> per-triangle features.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
import json

from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DataError, StageError, TooFewPoints, UnusableSample
from .features import FeatureMatrix, sample_features
from .geometry import EPS_AREA, EPS_DUP, EPS_INCIRCLE, Triangulation, delaunay
from .raster import DEFAULT_THRESHOLD, BinaryRaster, read_mask, write_pgm
from .skeleton import (
    SkeletonPoints,
    boundary_polygon,
    dce_simplify,
    detect_points,
    largest_component,
    prune_skeleton,
    thin,
)


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable knob of the pipeline, with the defaults used throughout."""

    dce_target_vertices: int = 12
    dce_min_relevance: float | None = None
    prune_radius: float = 5.0
    threshold: int = DEFAULT_THRESHOLD
    eps_area: float = EPS_AREA
    eps_incircle: float = EPS_INCIRCLE
    eps_dup: float = EPS_DUP
    normalize_by_refs: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.dce_target_vertices < 3:
            raise DataError(
                f"dce_target_vertices must be >= 3, got {self.dce_target_vertices}"
            )
        for name in ("prune_radius", "eps_area", "eps_incircle", "eps_dup"):
            if not getattr(self, name) > 0:
                raise DataError(f"{name} must be positive")
        if not 0 <= self.threshold <= 254:
            raise DataError(f"threshold must be in [0, 254], got {self.threshold}")

    def fingerprint(self) -> dict:
        out = {}
        for f in fields(self):
            out[f.name] = getattr(self, f.name)
        return out

    def to_file(self, path) -> None:
        lines = [f"{k} = {v}" for k, v in self.fingerprint().items()]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        """Parse a `key = value` config file; # starts a comment."""
        values = {}
        valid = {f.name: f for f in fields(cls)}
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in valid:
                raise DataError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _parse_config_value(key, value)
        return cls(**values)


def _parse_config_value(key: str, value: str):
    if value in ("None", "none", ""):
        return None
    if value in ("True", "true"):
        return True
    if value in ("False", "false"):
        return False
    if key in ("dce_target_vertices", "threshold", "seed"):
        return int(value)
    return float(value)


@dataclass(frozen=True)
class PipelineArtifacts:
    """Intermediate products of one sample's run, for debugging dumps."""

    skeleton: BinaryRaster
    pruned: BinaryRaster
    boundary_vertices: int
    simplified_xy: list
    points: SkeletonPoints
    triangulation: Triangulation
    features: FeatureMatrix


def run_pipeline_mask(
    mask: BinaryRaster,
    config: PipelineConfig = PipelineConfig(),
    source: str = "<mask>",
) -> PipelineArtifacts:
    """Run all stages over an in-memory mask, raising StageError with the
    failing stage's name. Samples with fewer than 3 skeleton points raise
    UnusableSample."""

    def stage(name, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except UnusableSample:
            raise
        except Exception as exc:
            raise StageError(name, source, exc) from exc

    mask = stage("largest_component", largest_component, mask)
    skeleton = stage("thin", thin, mask)
    boundary = stage("boundary_polygon", boundary_polygon, mask)
    simplified = stage(
        "dce_simplify",
        dce_simplify,
        boundary,
        config.dce_target_vertices,
        config.dce_min_relevance,
    )
    pruned = stage("prune_skeleton", prune_skeleton, skeleton, simplified, config.prune_radius)
    points = stage("detect_points", detect_points, pruned)
    all_points = points.all_points()
    if len(all_points) < 3:
        raise UnusableSample(
            f"{source}: only {len(all_points)} skeleton points (need >= 3)"
        )
    try:
        tri = stage(
            "delaunay",
            delaunay,
            all_points,
            config.eps_dup,
            config.eps_incircle,
            config.eps_area,
        )
    except StageError as err:
        if isinstance(err.cause, TooFewPoints):
            raise UnusableSample(f"{source}: {err.cause}") from err
        raise
    fm = stage("sample_features", sample_features, tri, config.eps_area)
    return PipelineArtifacts(
        skeleton=skeleton,
        pruned=pruned,
        boundary_vertices=len(boundary),
        simplified_xy=[[v.x, v.y] for v in simplified.vertices],
        points=points,
        triangulation=tri,
        features=fm,
    )


def run_pipeline(
    mask_path,
    config: PipelineConfig = PipelineConfig(),
    dump_dir=None,
) -> FeatureMatrix:
    """File-level pipeline entry: read a mask, extract its FeatureMatrix.

    With dump_dir set, intermediate artifacts are written there for
    inspection (skeleton and pruned-skeleton PGMs, triangulation and points
    JSON).
    """
    mask_path = Path(mask_path)
    try:
        mask = read_mask(mask_path, config.threshold)
    except OSError as exc:
        raise StageError("read_mask", str(mask_path), exc) from exc
    except DataError as exc:
        raise StageError("read_mask", str(mask_path), exc) from exc
    art = run_pipeline_mask(mask, config, source=str(mask_path))
    if dump_dir is not None:
        dump_dir = Path(dump_dir)
        dump_dir.mkdir(parents=True, exist_ok=True)
        stem = mask_path.stem
        write_pgm(art.skeleton, dump_dir / f"{stem}.skeleton.pgm")
        write_pgm(art.pruned, dump_dir / f"{stem}.pruned.pgm")
        (dump_dir / f"{stem}.triangulation.json").write_text(
            json.dumps(art.triangulation.to_json_dict(), sort_keys=True, indent=2)
            + "\n",
            encoding="utf-8",
        )
        meta = {
            "boundary_vertices": art.boundary_vertices,
            "simplified_polygon": art.simplified_xy,
            "endpoints": [[p.x, p.y] for p in art.points.endpoints],
            "junctions": [[p.x, p.y] for p in art.points.junctions],
            "dropped_triangles": art.features.dropped,
        }
        (dump_dir / f"{stem}.points.json").write_text(
            json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    return art.features


class MaskFeaturizer(TransformerMixin, BaseEstimator):
    """Transformer from masks to FeatureMatrix objects.

    Accepts BinaryRaster instances, 2D boolean arrays, or mask file paths.
    Stateless: fit only validates parameters. Unusable samples (fewer than
    3 skeleton points) raise unless skip_unusable is set, in which case they
    yield None.
    """

    def __init__(
        self,
        dce_target_vertices: int = 12,
        dce_min_relevance: float | None = None,
        prune_radius: float = 5.0,
        threshold: int = DEFAULT_THRESHOLD,
        skip_unusable: bool = False,
    ):
        self.dce_target_vertices = dce_target_vertices
        self.dce_min_relevance = dce_min_relevance
        self.prune_radius = prune_radius
        self.threshold = threshold
        self.skip_unusable = skip_unusable

    def _config(self) -> PipelineConfig:
        return PipelineConfig(
            dce_target_vertices=self.dce_target_vertices,
            dce_min_relevance=self.dce_min_relevance,
            prune_radius=self.prune_radius,
            threshold=self.threshold,
        )

    def fit(self, X=None, y=None):
        self._config()
        return self

    def transform(self, X):
        config = self._config()
        out = []
        for item in X:
            try:
                if isinstance(item, (str, Path)):
                    out.append(run_pipeline(item, config))
                else:
                    mask = item if isinstance(item, BinaryRaster) else BinaryRaster(item)
                    out.append(run_pipeline_mask(mask, config).features)
            except UnusableSample:
                if not self.skip_unusable:
                    raise
                out.append(None)
        return out

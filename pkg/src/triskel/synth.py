"""Synthetic mask corpus: seeded families of star, rosette, cross, and
spoked-ellipse shapes with per-sample rotation, scale jitter, and boundary
noise. Regenerating with the same arguments reproduces byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
import re

import numpy as np

from .corpus import Corpus, ingest
from .errors import BadSpec
from .raster import BinaryRaster, write_pgm

_FAMILY_RE = re.compile(r"^(star|rosette|cross|spokes)(\d*)$")

_DEFAULT_LOBES = {"star": 5, "rosette": 6, "cross": 4, "spokes": 6}


def parse_family(name: str) -> tuple[str, int]:
    """'star5' -> ('star', 5); a bare family name uses its default count."""
    m = _FAMILY_RE.match(name.strip().lower())
    if not m:
        raise BadSpec(
            f"unknown shape family {name!r} "
            "(expected star<k>, rosette<k>, cross, or spokes<k>)"
        )
    family = m.group(1)
    count = int(m.group(2)) if m.group(2) else _DEFAULT_LOBES[family]
    if family == "cross":
        count = 4
    if not 3 <= count <= 12:
        raise BadSpec(f"{name!r}: lobe count must be in [3, 12]")
    return family, count


def _noise_wave(rng, noise: float):
    """Smooth periodic multiplier 1 + noise * unit-amplitude wobble."""
    amps = rng.normal(0.0, 1.0, size=4)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=4)
    norm = np.sum(np.abs(amps) / np.arange(1, 5))
    if norm == 0.0:
        norm = 1.0

    def wave(theta):
        out = np.zeros_like(theta, dtype=float)
        for j, (a, ph) in enumerate(zip(amps, phases), start=1):
            out += (a / j) * np.cos(j * theta + ph)
        return 1.0 + noise * out / norm

    return wave


def _hub_and_limbs(
    size,
    k,
    rng,
    noise,
    hub_rx,
    hub_ry,
    limb_len,
    limb_half_width,
    taper_frac,
    through: bool = False,
):
    """Shared generator: an elliptical hub with k radial limbs that taper to
    a point. Limb widths are kept narrow so thinning leaves the skeleton tip
    within the default pruning radius of the boundary corner.

    With `through`, limbs run through the center (k must be even), giving
    bar shapes like a cross.
    """
    rotation = rng.uniform(0.0, 2.0 * np.pi)
    scale = rng.uniform(0.8, 1.2)
    wave = _noise_wave(rng, noise)

    c = (size - 1) / 2.0
    yy, xx = np.mgrid[0:size, 0:size]
    dx = xx - c
    dy = yy - c
    theta = np.arctan2(dy, dx)
    w = wave(theta) * scale
    dxn = dx / w
    dyn = dy / w

    ct, st = np.cos(rotation), np.sin(rotation)
    hx = (ct * dxn + st * dyn) / (hub_rx * size)
    hy = (-st * dxn + ct * dyn) / (hub_ry * size)
    out = hx * hx + hy * hy <= 1.0

    length = limb_len * size
    half_w = limb_half_width * size
    taper_start = (1.0 - taper_frac) * length
    limbs = k // 2 if through else k
    span = np.pi if through else 2.0 * np.pi
    for s in range(limbs):
        ang = rotation + span * s / max(limbs, 1)
        ca, sa = np.cos(ang), np.sin(ang)
        u = ca * dxn + sa * dyn
        v = -sa * dxn + ca * dyn
        ua = np.abs(u) if through else u
        inside_len = (ua >= 0) & (ua <= length) if not through else (ua <= length)
        hw = np.where(
            ua <= taper_start,
            half_w,
            half_w * np.maximum(length - ua, 0.0) / max(length - taper_start, 1e-9),
        )
        out |= inside_len & (np.abs(v) <= hw)
    return out


def _star(size, k, rng, noise):
    return _hub_and_limbs(
        size, k, rng, noise,
        hub_rx=0.06, hub_ry=0.06,
        limb_len=0.42, limb_half_width=0.040, taper_frac=0.45,
    )


def _rosette(size, k, rng, noise):
    return _hub_and_limbs(
        size, k, rng, noise,
        hub_rx=0.07, hub_ry=0.07,
        limb_len=0.34, limb_half_width=0.055, taper_frac=0.75,
    )


def _cross(size, _k, rng, noise):
    return _hub_and_limbs(
        size, 4, rng, noise,
        hub_rx=0.07, hub_ry=0.07,
        limb_len=0.44, limb_half_width=0.050, taper_frac=0.35,
        through=True,
    )


def _spokes(size, k, rng, noise):
    return _hub_and_limbs(
        size, k, rng, noise,
        hub_rx=0.17, hub_ry=0.11,
        limb_len=0.44, limb_half_width=0.028, taper_frac=0.40,
    )


_GENERATORS = {"star": _star, "rosette": _rosette, "cross": _cross, "spokes": _spokes}


def make_shape(family_spec: str, rng, size: int = 160, noise: float = 0.05) -> BinaryRaster:
    """One random sample of the given family, e.g. 'star5'."""
    family, k = parse_family(family_spec)
    return BinaryRaster(_GENERATORS[family](size, k, rng, noise))


def synth_corpus(
    class_specs,
    out_dir,
    per_class: int = 30,
    noise: float = 0.05,
    seed: int = 42,
    size: int = 160,
) -> Corpus:
    """Generate a mask corpus on disk and ingest it back.

    class_specs is a sequence of family strings ('star5', 'cross', ...);
    each becomes one class directory named after its spec. Needs at least 2
    distinct families and at least 4 samples per class.
    """
    specs = list(class_specs)
    if len(specs) < 2:
        raise BadSpec("need at least 2 shape classes")
    if len(set(specs)) != len(specs):
        raise BadSpec(f"duplicate class specs: {specs}")
    for spec in specs:
        parse_family(spec)
    if per_class < 4:
        raise BadSpec(f"per-class count must be >= 4, got {per_class}")
    if noise < 0:
        raise BadSpec(f"noise level must be >= 0, got {noise}")

    out_dir = Path(out_dir)
    rng = np.random.default_rng(seed)
    for spec in specs:
        class_dir = out_dir / spec
        class_dir.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            mask = make_shape(spec, rng, size=size, noise=noise)
            write_pgm(mask, class_dir / f"{spec}_{i:03d}.pgm")
    return ingest(out_dir)


# The corpus used by the quantitative regression checks: three families with
# different lobe counts so the skeleton topologies differ.
STANDARD_CLASSES = ("cross", "rosette6", "star5")
STANDARD_PER_CLASS = 30
STANDARD_SEED = 42


def standard_corpus(out_dir, noise: float = 0.05) -> Corpus:
    return synth_corpus(
        STANDARD_CLASSES,
        out_dir,
        per_class=STANDARD_PER_CLASS,
        noise=noise,
        seed=STANDARD_SEED,
    )

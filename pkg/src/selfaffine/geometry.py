"""Attractor rasters, chaos-game sampling, measure and box-dimension estimates.

Raster occupancy comes from exact cylinder anchors ``T_{j1}...T_{jn}(0)``,
snapped to cells with exact integer floor division.  Only the chaos game uses
floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InsufficientScales
from .intlinalg import inverse_power_tail, mat_vec
from .system import AffineSystem, digit_sums

VIEWPORT_TERMS = 8
PADDING = 2
_GRID = 2**16


def attractor_radius(sys: AffineSystem) -> Fraction:
    """Every attractor point has max-norm at most this."""
    biggest = max(max(abs(x) for x in v) for v in sys.digit_values())
    return biggest * (1 + inverse_power_tail(sys.matrix, 1))


@dataclass(frozen=True)
class Viewport:
    """Cells ``origin + cell * [i, i+1)`` per axis, ``resolution`` per axis."""

    origin: tuple[Fraction, ...]
    cell: Fraction
    resolution: int

    @property
    def dim(self) -> int:
        return len(self.origin)

    def contains(self, x: Sequence[Fraction]) -> bool:
        return all(
            o <= c < o + self.cell * self.resolution for o, c in zip(self.origin, x)
        )


def bounding_box(sys: AffineSystem, terms: int = VIEWPORT_TERMS):
    """Coordinate bounds from the first ``terms`` series terms plus the tail."""
    m = sys.matrix
    vals = sys.digit_values()
    slack = max(max(abs(x) for x in v) for v in vals) * inverse_power_tail(m, terms)
    lo = [-slack] * sys.dim
    hi = [slack] * sys.dim
    for r in range(terms):
        moved = [mat_vec(m.inv_power(r), v) for v in vals]
        for i in range(sys.dim):
            lo[i] += min(v[i] for v in moved)
            hi[i] += max(v[i] for v in moved)
    return lo, hi


def viewport(sys: AffineSystem, resolution: int) -> Viewport:
    """Square viewport with ``PADDING`` empty cells around the bounding box."""
    if resolution <= 2 * PADDING:
        raise ValueError(f"resolution must exceed {2 * PADDING}")
    lo, hi = bounding_box(sys)
    lo = [Fraction(math.floor(x * _GRID), _GRID) for x in lo]
    hi = [Fraction(math.ceil(x * _GRID), _GRID) for x in hi]
    side = max(b - a for a, b in zip(lo, hi)) or Fraction(1)
    cell = side / (resolution - 2 * PADDING)
    origin = tuple((a + b) / 2 - cell * resolution / 2 for a, b in zip(lo, hi))
    return Viewport(origin, cell, resolution)


def anchor_points(sys: AffineSystem, n: int, budget: int = 10**7):
    """Distinct anchors as ``(integer numerators, common denominator)``.

    Anchors are ``A^{-(n-1)} D_n``; requires a normalized system.
    """
    ds = digit_sums(sys, n, budget)
    pts = ds.sums[ds.first_index]
    m = sys.matrix
    adj = np.array(m.adj_power(n - 1), dtype=object)
    num = pts.astype(object) @ adj.T
    return num, m.det ** (n - 1)


def cell_indices(sys: AffineSystem, n: int, view: Viewport, budget: int = 10**7) -> np.ndarray:
    """Exact cell index of every distinct depth-``n`` anchor."""
    num, den = anchor_points(sys, n, budget)
    lo_den = math.lcm(*(o.denominator for o in view.origin))
    lo_num = np.array([o.numerator * (lo_den // o.denominator) for o in view.origin], dtype=object)
    # (num/den - lo_num/lo_den) / (c_n/c_d)
    c_n, c_d = view.cell.numerator, view.cell.denominator
    top = (num * lo_den - lo_num[None, :] * den) * c_d
    bottom = den * lo_den * c_n
    if bottom < 0:
        top, bottom = -top, -bottom
    return (top // bottom).astype(np.int64)


@dataclass
class Raster:
    view: Viewport
    depth: int
    occupancy: np.ndarray

    @property
    def occupied(self) -> int:
        return int(self.occupancy.sum())

    def cell_measure(self) -> float:
        return float(self.view.cell) ** self.view.dim


def rasterize_attractor(
    sys: AffineSystem, n: int, resolution: int, budget: int = 10**7
) -> Raster:
    view = viewport(sys, resolution)
    idx = cell_indices(sys, n, view, budget)
    if (idx < 0).any() or (idx >= resolution).any():
        raise AssertionError("anchor outside the computed viewport")
    occ = np.zeros((resolution,) * sys.dim, dtype=bool)
    occ[tuple(idx.T)] = True
    return Raster(view, n, occ)


def measure_estimate(sys: AffineSystem, n: int, resolution: int, budget: int = 10**7) -> float:
    """Occupied cells times cell volume.

    This is an upper-type estimate at a given depth and resolution.  It
    settles as both grow in the tile branch and drifts to zero otherwise.
    """
    r = rasterize_attractor(sys, n, resolution, budget)
    return r.occupied * r.cell_measure()


def matched_resolutions(sys: AffineSystem, depths: Sequence[int], oversample: float = 1.0) -> list[int]:
    """Resolutions whose cell side tracks the depth-``n`` anchor spacing ``N^{-(n-1)/d}``."""
    view = viewport(sys, 2 * PADDING + 1)
    side = float(view.cell)
    n_maps, d = sys.n_maps, sys.dim
    return [
        math.ceil(side * oversample * n_maps ** ((n - 1) / d)) + 2 * PADDING for n in depths
    ]


@dataclass(frozen=True)
class BoxDimension:
    slope: float
    ci: tuple[float, float]
    log_inv_cell: tuple[float, ...]
    log_count: tuple[float, ...]


def box_dimension_estimate(
    sys: AffineSystem, depths: Sequence[int], resolutions: Sequence[int]
) -> BoxDimension:
    """Least-squares slope of log(occupied cells) against log(1/cell size)."""
    if len(depths) != len(resolutions):
        raise ValueError("depths and resolutions must pair up")
    if len(depths) < 3:
        raise InsufficientScales("need at least 3 scales")
    xs, ys = [], []
    for n, res in zip(depths, resolutions):
        r = rasterize_attractor(sys, n, res)
        xs.append(-math.log(float(r.view.cell)))
        ys.append(math.log(r.occupied))
    x, y = np.array(xs), np.array(ys)
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    sxx = float(((x - x.mean()) ** 2).sum())
    se = math.sqrt(float((resid**2).sum()) / (len(x) - 2) / sxx) if sxx > 0 else math.inf
    return BoxDimension(float(slope), (slope - 2 * se, slope + 2 * se), tuple(xs), tuple(ys))


def sample_measure(sys: AffineSystem, samples: int, seed: int = 0, burn_in: int = 100) -> np.ndarray:
    """Independent points of ``nu``: each is ``burn_in`` random maps applied to 0."""
    rng = np.random.default_rng(seed)
    inv_t = np.array([[float(x) for x in row] for row in sys.matrix.inv]).T
    digits = np.array([[float(x) for x in v] for v in sys.digit_values()])
    x = np.zeros((samples, sys.dim))
    for _ in range(burn_in):
        x = x @ inv_t + digits[rng.integers(0, sys.n_maps, size=samples)]
    return x


def push_forward(sys: AffineSystem, pts: np.ndarray, seed: int = 1) -> np.ndarray:
    """Apply one uniformly chosen map to each point."""
    rng = np.random.default_rng(seed)
    inv_t = np.array([[float(x) for x in row] for row in sys.matrix.inv]).T
    digits = np.array([[float(x) for x in v] for v in sys.digit_values()])
    return pts @ inv_t + digits[rng.integers(0, sys.n_maps, size=len(pts))]


@dataclass
class Histogram:
    view: Viewport
    counts: np.ndarray
    samples: int
    seed: int


def histogram_points(pts: np.ndarray, view: Viewport) -> np.ndarray:
    origin = np.array([float(o) for o in view.origin])
    idx = np.floor((pts - origin) / float(view.cell)).astype(np.int64)
    idx = np.clip(idx, 0, view.resolution - 1)
    counts = np.zeros((view.resolution,) * view.dim, dtype=np.int64)
    np.add.at(counts, tuple(idx.T), 1)
    return counts


def chaos_game_histogram(
    sys: AffineSystem,
    samples: int,
    resolution: int,
    seed: int = 0,
    view: Viewport | None = None,
) -> Histogram:
    if samples < 10**4:
        raise ValueError("need at least 10^4 samples")
    view = view or viewport(sys, resolution)
    counts = histogram_points(sample_measure(sys, samples, seed), view)
    return Histogram(view, counts, samples, seed)


def _as_image(grid: np.ndarray) -> np.ndarray:
    """2-d array with y increasing upwards; 1-d grids become a strip."""
    if grid.ndim == 1:
        return np.repeat(grid[None, :], max(1, len(grid) // 16), axis=0)
    return grid.T[::-1]


def occupancy_image(r: Raster) -> np.ndarray:
    return np.where(_as_image(r.occupancy), 0, 255).astype(np.uint8)


def histogram_image(h: Histogram) -> np.ndarray:
    c = _as_image(h.counts).astype(float)
    top = math.log1p(c.max()) or 1.0
    return (255 - np.round(255 * np.log1p(c) / top)).astype(np.uint8)


def write_pgm(path: str | Path, img: np.ndarray) -> None:
    """Binary PGM, maxval 255."""
    img = np.ascontiguousarray(img, dtype=np.uint8)
    h, w = img.shape
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (w, h) + img.tobytes())


def read_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    magic, w, h, maxval, body = data.split(maxsplit=4)
    if magic != b"P5" or maxval != b"255":
        raise ValueError("not a binary 8-bit PGM")
    return np.frombuffer(body, dtype=np.uint8).reshape(int(h), int(w))


def write_png(path: str | Path, img: np.ndarray) -> None:
    from PIL import Image

    Image.fromarray(img, mode="L").save(path, format="PNG")

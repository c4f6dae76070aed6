"""Elastic and linear distance measures between time series.

Implements linear time warping (interpolate-then-compare) and three
dynamic-time-warping variants over a shared cost-matrix core:

- vanilla: unconstrained symmetric step pattern, distance = final cell
- normalized: vanilla distance divided by the backtracked path length
- timesync: horizontal steps forbidden (every step advances the row index)

All variants z-normalize both inputs before comparing. Paths use 0-based
``(i, j)`` cell indices from ``(0, 0)`` to ``(n-1, m-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is optional
    njit = None

from .errors import DimensionMismatch, EmptySeriesError


class WarpVariant(str, Enum):
    LTW = "ltw"
    VANILLA_DTW = "dtw"
    NORMALIZED_DTW = "ndtw"
    TIMESYNC_DTW = "tsdtw"


class LocalDistance(str, Enum):
    MANHATTAN = "manhattan"
    EUCLIDEAN = "euclidean"
    SQUARED = "squared"


@dataclass(frozen=True)
class Series:
    """A sequence of frames; shape (n, d) with n >= 1 and fixed dim d >= 1."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise EmptySeriesError(f"series must be (n>=1, d>=1), got shape {pts.shape}")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class WarpResult:
    """Distance plus alignment metadata from one comparison.

    ``path`` is None for LTW. For timesync the pair is oriented internally so
    the row series is the longer one (``swapped`` reports if the inputs were
    exchanged); ``cost_matrix_dims`` always refers to the oriented matrix.
    """

    distance: float
    path: tuple[tuple[int, int], ...] | None
    cost_matrix_dims: tuple[int, int]
    variant: WarpVariant
    swapped: bool = field(default=False)


def znormalize(s: Series) -> Series:
    """Scale each dimension to zero mean, unit population variance.

    A constant dimension has no scale to recover and maps to all zeros.
    """
    pts = s.points
    mean = pts.mean(axis=0)
    std = pts.std(axis=0)
    out = np.where(std > 0.0, (pts - mean) / np.where(std > 0.0, std, 1.0), 0.0)
    return Series(out)


def linear_interpolate(s: Series, target_len: int) -> Series:
    """Resample to ``target_len`` frames by per-dimension linear interpolation.

    Endpoints are preserved; interior points are read off the straight line
    between neighbours at uniformly spaced parameter positions.
    """
    if target_len < 1:
        raise ValueError("target_len must be >= 1")
    n = len(s)
    if target_len == n:
        return Series(s.points.copy())
    if n == 1:
        return Series(np.repeat(s.points, target_len, axis=0))
    xs = np.linspace(0.0, n - 1.0, target_len)
    base = np.arange(n, dtype=np.float64)
    out = np.column_stack([np.interp(xs, base, s.points[:, d]) for d in range(s.dim)])
    return Series(out)


def ltw_distance(a: Series, b: Series) -> WarpResult:
    """Linear time warping: z-normalize, stretch both to the longer length,
    and take the Euclidean norm of the pointwise difference."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"frame dims differ: {a.dim} vs {b.dim}")
    target = max(len(a), len(b))
    ai = linear_interpolate(znormalize(a), target)
    bi = linear_interpolate(znormalize(b), target)
    dist = float(np.linalg.norm(ai.points - bi.points))
    return WarpResult(dist, None, (target, target), WarpVariant.LTW)


def _local_cost(a: np.ndarray, b: np.ndarray, local: LocalDistance) -> np.ndarray:
    if a.shape[1] == 1:
        diff = a[:, 0][:, None] - b[:, 0][None, :]
        if local is LocalDistance.SQUARED:
            return diff * diff
        return np.abs(diff)  # euclidean == manhattan in one dimension
    diff = a[:, None, :] - b[None, :, :]
    if local is LocalDistance.MANHATTAN:
        return np.abs(diff).sum(axis=2)
    sq = (diff * diff).sum(axis=2)
    if local is LocalDistance.SQUARED:
        return sq
    return np.sqrt(sq)


def _accumulate_numpy(cost: np.ndarray, timesync: bool) -> np.ndarray:
    """Fill the bordered (n+1, m+1) accumulated-cost matrix.

    Border cells are +inf with D[0,0] = 0, so out-of-range predecessors drop
    out of the min. Vanilla runs over anti-diagonals to keep the inner work
    in numpy despite the same-row dependency.
    """
    n, m = cost.shape
    D = np.full((n + 1, m + 1), np.inf)
    D[0, 0] = 0.0
    if timesync:
        for i in range(1, n + 1):
            prev = D[i - 1]
            D[i, 1:] = cost[i - 1] + np.minimum(prev[:-1], prev[1:])
        return D
    for s in range(2, n + m + 1):
        i = np.arange(max(1, s - m), min(n, s - 1) + 1)
        j = s - i
        D[i, j] = cost[i - 1, j - 1] + np.minimum(
            np.minimum(D[i - 1, j], D[i, j - 1]), D[i - 1, j - 1]
        )
    return D


if njit is not None:

    @njit(cache=True)
    def _accumulate_jit(cost, timesync):  # pragma: no cover - exercised via wrapper
        n, m = cost.shape
        D = np.full((n + 1, m + 1), np.inf)
        D[0, 0] = 0.0
        for i in range(1, n + 1):
            for j in range(1, m + 1):
                best = D[i - 1, j - 1]
                if D[i - 1, j] < best:
                    best = D[i - 1, j]
                if not timesync and D[i, j - 1] < best:
                    best = D[i, j - 1]
                D[i, j] = cost[i - 1, j - 1] + best
        return D

    @njit(cache=True)
    def _accumulate_jit_1d(av, bv, timesync, squared):  # pragma: no cover
        # fused local cost + accumulation for 1-d frames, no cost matrix
        n, m = len(av), len(bv)
        D = np.full((n + 1, m + 1), np.inf)
        D[0, 0] = 0.0
        for i in range(1, n + 1):
            x = av[i - 1]
            for j in range(1, m + 1):
                best = D[i - 1, j - 1]
                if D[i - 1, j] < best:
                    best = D[i - 1, j]
                if not timesync and D[i, j - 1] < best:
                    best = D[i, j - 1]
                d = x - bv[j - 1]
                if squared:
                    d = d * d
                elif d < 0.0:
                    d = -d
                D[i, j] = d + best
        return D


def _accumulate(cost: np.ndarray, timesync: bool) -> np.ndarray:
    if njit is not None:
        return _accumulate_jit(np.ascontiguousarray(cost), timesync)
    return _accumulate_numpy(cost, timesync)


def _backtrack(D: np.ndarray, timesync: bool) -> tuple[tuple[int, int], ...]:
    """Recover the warping path from (n-1, m-1) back to (0, 0).

    Ties prefer the diagonal, then the vertical (row-advancing) predecessor,
    then horizontal, which makes normalized distances reproducible.
    """
    i, j = D.shape[0] - 1, D.shape[1] - 1
    path = [(i - 1, j - 1)]
    while i > 1 or j > 1:
        diag = D[i - 1, j - 1]
        up = D[i - 1, j]
        left = D[i, j - 1] if not timesync else np.inf
        if diag <= up and diag <= left:
            i, j = i - 1, j - 1
        elif up <= left:
            i = i - 1
        else:
            j = j - 1
        path.append((i - 1, j - 1))
    path.reverse()
    return tuple(path)


def dtw_distance(
    a: Series,
    b: Series,
    variant: WarpVariant = WarpVariant.VANILLA_DTW,
    local: LocalDistance = LocalDistance.EUCLIDEAN,
    normalize_inputs: bool = True,
) -> WarpResult:
    """Dynamic-time-warping distance with path backtracking.

    ``normalize_inputs=False`` is a test hook that skips z-normalization.
    For the timesync variant no warping path exists when the first series is
    shorter than the second, so the pair is oriented longer-first internally
    and ``swapped`` records the exchange.
    """
    if variant is WarpVariant.LTW:
        return ltw_distance(a, b)
    if a.dim != b.dim:
        raise DimensionMismatch(f"frame dims differ: {a.dim} vs {b.dim}")
    if normalize_inputs:
        a, b = znormalize(a), znormalize(b)

    timesync = variant is WarpVariant.TIMESYNC_DTW
    swapped = False
    if timesync and len(a) < len(b):
        a, b = b, a
        swapped = True

    dims = (len(a), len(b))
    if njit is not None and a.dim == 1:
        D = _accumulate_jit_1d(
            np.ascontiguousarray(a.points[:, 0]),
            np.ascontiguousarray(b.points[:, 0]),
            timesync,
            local is LocalDistance.SQUARED,
        )
    else:
        D = _accumulate(_local_cost(a.points, b.points, local), timesync)
    path = _backtrack(D, timesync)
    dist = float(D[-1, -1])
    if variant is WarpVariant.NORMALIZED_DTW:
        dist /= len(path)
    return WarpResult(dist, path, dims, variant, swapped)


def validate_path(
    path,
    n: int,
    m: int,
    variant: WarpVariant = WarpVariant.VANILLA_DTW,
) -> bool:
    """Check boundary, continuity, and monotonicity of a warping path.

    Cells are 0-based: a valid path starts at (0, 0), ends at (n-1, m-1),
    and each step is (+1, 0), (0, +1), or (+1, +1) — with (0, +1) forbidden
    for the timesync variant.
    """
    if path is None or len(path) == 0:
        return False
    if tuple(path[0]) != (0, 0) or tuple(path[-1]) != (n - 1, m - 1):
        return False
    for (i0, j0), (i1, j1) in zip(path, path[1:]):
        di, dj = i1 - i0, j1 - j0
        if (di, dj) not in ((1, 0), (0, 1), (1, 1)):
            return False
        if variant is WarpVariant.TIMESYNC_DTW and (di, dj) == (0, 1):
            return False
    return True

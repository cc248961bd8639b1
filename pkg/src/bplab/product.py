"""Threshold dynamics on finite windows of lattice x Hamming-square/clique.

A vertex is (x, y, u, v) for the Hamming-square fiber or (x, y, u) for the
clique fiber.  Its neighbors are the fiber neighbors (same row or column in
the square, everyone else in the clique) plus the same fiber coordinate in
the four lattice-adjacent planes, subject to the window's boundary rule.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import Boundary, BoxGeometry
from .hamming import _check_density


class Fiber(Enum):
    HAMMING_SQUARE = "hamming-square"
    CLIQUE = "clique"


@dataclass
class ProductConfig:
    geometry: BoxGeometry
    fiber: Fiber
    n: int
    theta: int
    occ: np.ndarray  # (W, H, n, n) bool for squares, (W, H, n) for cliques

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("fiber size must be positive")
        if self.theta < 1:
            raise ValueError("threshold must be >= 1")
        want = ((self.geometry.width, self.geometry.height, self.n, self.n)
                if self.fiber is Fiber.HAMMING_SQUARE
                else (self.geometry.width, self.geometry.height, self.n))
        self.occ = np.asarray(self.occ, dtype=bool)
        if self.occ.shape != want:
            raise ValueError(f"occupancy shape {self.occ.shape} != {want}")

    @property
    def fiber_size(self) -> int:
        return self.n * self.n if self.fiber is Fiber.HAMMING_SQUARE else self.n

    def plane(self, x: int, y: int) -> np.ndarray:
        return self.occ[x, y]

    def copy(self) -> "ProductConfig":
        return ProductConfig(self.geometry, self.fiber, self.n, self.theta,
                             self.occ.copy())


@dataclass
class OccupationSummary:
    per_plane_occupied: np.ndarray  # (W, H) int
    fully_occupied_mask: np.ndarray  # (W, H) bool
    origin_point_occupied: bool


def sample_product(geom: BoxGeometry, fiber: Fiber, n: int, p: float,
                   theta: int, rng: np.random.Generator) -> ProductConfig:
    """i.i.d. occupancy across every fiber cell of every plane."""
    _check_density(p)
    shape = ((geom.width, geom.height, n, n) if fiber is Fiber.HAMMING_SQUARE
             else (geom.width, geom.height, n))
    return ProductConfig(geom, fiber, n, theta, rng.random(shape) < p)


def _shifted(occ: np.ndarray, axis: int, step: int,
             boundary: Boundary) -> np.ndarray:
    """Occupancy of the lattice neighbor one step along +-axis.

    Off-window planes read as empty (EMPTY_WALL) or full (OCCUPIED_WALL).
    """
    if boundary is Boundary.TORUS:
        return np.roll(occ, step, axis=axis)
    fill = boundary is Boundary.OCCUPIED_WALL
    out = np.full_like(occ, fill)
    src = [slice(None)] * occ.ndim
    dst = [slice(None)] * occ.ndim
    if step == 1:
        src[axis] = slice(0, -1)
        dst[axis] = slice(1, None)
    else:
        src[axis] = slice(1, None)
        dst[axis] = slice(0, -1)
    out[tuple(dst)] = occ[tuple(src)]
    return out


def lattice_neighbor_sum(occ: np.ndarray, boundary: Boundary) -> np.ndarray:
    """Per-vertex count of occupied lattice neighbors (0..4)."""
    total = np.zeros(occ.shape, dtype=np.int64)
    for axis in (0, 1):
        for step in (1, -1):
            total += _shifted(occ, axis, step, boundary)
    return total


def neighbor_counts(cfg: ProductConfig) -> np.ndarray:
    """Exact occupied-neighbor count of every vertex (any occupancy state)."""
    occ = cfg.occ
    if cfg.fiber is Fiber.HAMMING_SQUARE:
        rc = occ.sum(axis=3)
        cc = occ.sum(axis=2)
        cnt = rc[:, :, :, None] + cc[:, :, None, :] - 2 * occ
    else:
        tot = occ.sum(axis=2)
        cnt = tot[:, :, None] - occ
    return cnt + lattice_neighbor_sum(occ, cfg.geometry.boundary)


def product_fixpoint(cfg: ProductConfig) -> ProductConfig:
    """Fixpoint of the threshold dynamics on the product graph.

    Event-driven engine: a work queue of newly occupied vertices, with the
    per-vertex neighbor count maintained incrementally.  A vertex is enqueued
    exactly when its count first crosses the threshold.
    """
    theta = cfg.theta
    occ = cfg.occ.copy()
    cnt = neighbor_counts(cfg)
    geom = cfg.geometry
    hamming = cfg.fiber is Fiber.HAMMING_SQUARE

    queue: deque[tuple] = deque(map(tuple, np.argwhere(~occ & (cnt >= theta))))
    while queue:
        site = queue.popleft()
        if occ[site]:
            continue
        occ[site] = True
        if hamming:
            x, y, u, v = site
            cnt[x, y, u, :] += 1
            cnt[x, y, :, v] += 1
            cnt[x, y, u, v] -= 2  # a vertex is not its own neighbor
            row = cnt[x, y, u, :]
            for v2 in np.flatnonzero(~occ[x, y, u, :] & (row == theta)):
                queue.append((x, y, u, int(v2)))
            col = cnt[x, y, :, v]
            for u2 in np.flatnonzero(~occ[x, y, :, v] & (col == theta)):
                queue.append((x, y, int(u2), v))
            for x2, y2 in geom.neighbors_inside(x, y):
                cnt[x2, y2, u, v] += 1
                if not occ[x2, y2, u, v] and cnt[x2, y2, u, v] == theta:
                    queue.append((x2, y2, u, v))
        else:
            x, y, u = site
            cnt[x, y, :] += 1
            cnt[x, y, u] -= 1
            fib = cnt[x, y, :]
            for u2 in np.flatnonzero(~occ[x, y, :] & (fib == theta)):
                queue.append((x, y, int(u2)))
            for x2, y2 in geom.neighbors_inside(x, y):
                cnt[x2, y2, u] += 1
                if not occ[x2, y2, u] and cnt[x2, y2, u] == theta:
                    queue.append((x2, y2, u))

    return ProductConfig(cfg.geometry, cfg.fiber, cfg.n, cfg.theta, occ)


def is_inert(cfg: ProductConfig, site: tuple[int, int], r: int,
             counts: np.ndarray | None = None) -> bool:
    """True iff no vertex of plane ``site`` flips in one unrestricted
    threshold-r step (the four lattice-neighbor planes participate)."""
    if r < 0:
        raise ValueError("threshold must be nonnegative")
    x, y = site
    if not cfg.geometry.contains(x, y):
        raise ValueError("site outside window")
    if counts is None:
        counts = neighbor_counts(cfg)
    if r == 0:
        return bool(cfg.occ[x, y].all())
    vacant = ~cfg.occ[x, y]
    return not bool((vacant & (counts[x, y] >= r)).any())


def summarize(cfg: ProductConfig) -> OccupationSummary:
    axes = (2, 3) if cfg.fiber is Fiber.HAMMING_SQUARE else (2,)
    per_plane = cfg.occ.sum(axis=axes)
    origin = cfg.occ[(0,) * cfg.occ.ndim]
    return OccupationSummary(
        per_plane_occupied=per_plane,
        fully_occupied_mask=per_plane == cfg.fiber_size,
        origin_point_occupied=bool(origin),
    )

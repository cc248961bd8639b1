"""Single Hamming-square and clique fibers.

A Hamming square on n^2 points connects two cells iff they share a row or a
column, so the occupied-neighbor count of a vacant cell (u, v) is simply
``row_count[u] + col_count[v]``.  Everything in this module exploits that:
the bucketed cascade engine, the vectorized synchronous sweep, and the sparse
spanning classifier that never materializes the n x n array.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np


@dataclass
class PlaneConfig:
    """Occupancy of one Hamming square with cached row/column counts."""

    n: int
    occ: np.ndarray  # (n, n) bool
    row_count: np.ndarray = field(default=None)  # type: ignore[assignment]
    col_count: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("plane side must be positive")
        self.occ = np.asarray(self.occ, dtype=bool)
        if self.occ.shape != (self.n, self.n):
            raise ValueError("occupancy shape mismatch")
        if self.row_count is None:
            self.row_count = self.occ.sum(axis=1).astype(np.int64)
        if self.col_count is None:
            self.col_count = self.occ.sum(axis=0).astype(np.int64)

    @classmethod
    def empty(cls, n: int) -> "PlaneConfig":
        return cls(n, np.zeros((n, n), dtype=bool))

    @classmethod
    def full(cls, n: int) -> "PlaneConfig":
        return cls(n, np.ones((n, n), dtype=bool))

    @classmethod
    def from_cells(cls, n: int, cells) -> "PlaneConfig":
        occ = np.zeros((n, n), dtype=bool)
        for u, v in cells:
            occ[u, v] = True
        return cls(n, occ)

    def copy(self) -> "PlaneConfig":
        return PlaneConfig(self.n, self.occ.copy(),
                           self.row_count.copy(), self.col_count.copy())

    def counts_consistent(self) -> bool:
        return (np.array_equal(self.row_count, self.occ.sum(axis=1)) and
                np.array_equal(self.col_count, self.occ.sum(axis=0)))

    @property
    def occupied_total(self) -> int:
        return int(self.row_count.sum())

    @property
    def is_full(self) -> bool:
        return self.occupied_total == self.n * self.n


@dataclass
class CliqueConfig:
    """Occupancy of one clique fiber."""

    n: int
    occ: np.ndarray  # (n,) bool
    count: int = -1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("clique size must be positive")
        self.occ = np.asarray(self.occ, dtype=bool)
        if self.occ.shape != (self.n,):
            raise ValueError("occupancy shape mismatch")
        if self.count < 0:
            self.count = int(self.occ.sum())


@dataclass(frozen=True)
class PlaneFlags:
    """Internal classification of one plane at a fixed threshold."""

    threshold: int
    spanned: bool         # restricted dynamics fill the plane ("IS")
    internally_inert: bool  # the first restricted step changes nothing ("II")


def _check_density(p: float):
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"density must lie in [0, 1], got {p}")


def sample_plane(n: int, p: float, rng: np.random.Generator) -> PlaneConfig:
    """i.i.d. occupancy with density p on an n x n Hamming square."""
    if n < 1:
        raise ValueError("plane side must be positive")
    _check_density(p)
    return PlaneConfig(n, rng.random((n, n)) < p)


def sample_clique(n: int, p: float, rng: np.random.Generator) -> CliqueConfig:
    if n < 1:
        raise ValueError("clique size must be positive")
    _check_density(p)
    return CliqueConfig(n, rng.random(n) < p)


def sample_plane_cells(n: int, p: float, rng: np.random.Generator
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Sparse plane sample: returns (rows, cols) of the occupied cells.

    Equivalent in law to ``sample_plane`` but O(occupied) instead of O(n^2):
    draw the Binomial(n^2, p) cell count, then that many distinct positions.
    """
    if n < 1:
        raise ValueError("plane side must be positive")
    _check_density(p)
    total = n * n
    m = int(rng.binomial(total, p))
    if m == 0:
        z = np.empty(0, dtype=np.int64)
        return z, z
    if m > total // 2:
        # dense regime: rejection sampling would thrash
        occ = rng.permutation(total)[:m]
    else:
        picks: set[int] = set()
        while len(picks) < m:
            draw = rng.integers(0, total, size=m - len(picks))
            picks.update(int(i) for i in draw)
        occ = np.fromiter(picks, dtype=np.int64, count=m)
        occ.sort()
    return occ // n, occ % n


# ---------------------------------------------------------------------------
# engines


def plane_step(cfg: PlaneConfig, r: int) -> PlaneConfig:
    """One synchronous step of the restricted threshold-r dynamics."""
    if r < 0:
        raise ValueError("threshold must be nonnegative")
    if r == 0:
        return PlaneConfig.full(cfg.n)
    newly = ~cfg.occ & (cfg.row_count[:, None] + cfg.col_count[None, :] >= r)
    if not newly.any():
        return cfg.copy()
    return PlaneConfig(cfg.n, cfg.occ | newly)


def plane_fixpoint_sweep(cfg: PlaneConfig, r: int) -> PlaneConfig:
    """Fixpoint by repeated vectorized synchronous sweeps."""
    if r < 0:
        raise ValueError("threshold must be nonnegative")
    if r == 0:
        return PlaneConfig.full(cfg.n)
    occ = cfg.occ.copy()
    rc = cfg.row_count.copy()
    cc = cfg.col_count.copy()
    while True:
        newly = ~occ & (rc[:, None] + cc[None, :] >= r)
        if not newly.any():
            return PlaneConfig(cfg.n, occ, rc, cc)
        occ |= newly
        rc += newly.sum(axis=1)
        cc += newly.sum(axis=0)


def plane_fixpoint(cfg: PlaneConfig, r: int) -> PlaneConfig:
    """Fixpoint of the restricted threshold-r dynamics (cascade engine).

    Keeps rows and columns bucketed by their occupied count, so each count
    increment locates the newly eligible cells without rescanning the plane.
    """
    if r < 0:
        raise ValueError("threshold must be nonnegative")
    n = cfg.n
    if r == 0:
        return PlaneConfig.full(n)
    occ = cfg.occ.copy()
    rc = cfg.row_count.copy()
    cc = cfg.col_count.copy()

    rows_by_count: list[set[int]] = [set() for _ in range(n + 1)]
    cols_by_count: list[set[int]] = [set() for _ in range(n + 1)]
    for u in range(n):
        rows_by_count[rc[u]].add(u)
    for v in range(n):
        cols_by_count[cc[v]].add(v)

    queue: deque[tuple[int, int]] = deque(
        map(tuple, np.argwhere(~occ & (rc[:, None] + cc[None, :] >= r))))

    while queue:
        u, v = queue.popleft()
        if occ[u, v]:
            continue
        occ[u, v] = True

        rows_by_count[rc[u]].discard(u)
        rc[u] += 1
        rows_by_count[rc[u]].add(u)
        cols_by_count[cc[v]].discard(v)
        cc[v] += 1
        cols_by_count[cc[v]].add(v)

        # the row-count increment can enable cells only in columns whose
        # count is exactly the remaining deficit (larger counts were already
        # eligible and enqueued earlier)
        need = r - rc[u]
        if need <= 0:
            if rc[u] == r:  # row saturated: every vacant cell flips
                row = occ[u]
                for v2 in np.flatnonzero(~row):
                    queue.append((u, int(v2)))
        elif need <= n:
            for v2 in cols_by_count[need]:
                if not occ[u, v2]:
                    queue.append((u, v2))

        need = r - cc[v]
        if need <= 0:
            if cc[v] == r:
                col = occ[:, v]
                for u2 in np.flatnonzero(~col):
                    queue.append((int(u2), v))
        elif need <= n:
            for u2 in rows_by_count[need]:
                if not occ[u2, v]:
                    queue.append((u2, v))

    return PlaneConfig(n, occ, rc, cc)


def plane_spanned_sparse(n: int, rows: np.ndarray, cols: np.ndarray,
                         r: int) -> bool:
    """Exact spanning test from a sparse cell list, without an n x n array.

    Works on the submatrix spanned by the initially occupied rows/columns:
    outside it, cells can only flip via fully occupied rows/columns, whose
    tally (nR + nC) is tracked explicitly.  Requires at least one untouched
    row and column; callers fall back to the dense engine otherwise.
    """
    if r < 0:
        raise ValueError("threshold must be nonnegative")
    if r == 0:
        return True
    urows, ri = np.unique(rows, return_inverse=True)
    ucols, ci = np.unique(cols, return_inverse=True)
    k1, k2 = len(urows), len(ucols)
    if k1 >= n or k2 >= n:
        raise ValueError("occupancy touches every row or column; use the "
                         "dense engine")
    if k1 == 0:
        return False  # empty plane, r >= 1

    sub = np.zeros((k1, k2), dtype=bool)
    sub[ri, ci] = True
    row_full = np.zeros(k1, dtype=bool)
    col_full = np.zeros(k2, dtype=bool)
    n_rf = 0  # fully occupied rows (tracked ones only; see invariant above)
    n_cf = 0

    while True:
        if n_rf + n_cf >= r:
            # every remaining vacant cell sees >= r occupied neighbors
            return True
        erc = sub.sum(axis=1)
        ecc = sub.sum(axis=0)
        # a tracked row fills completely as soon as its count nC + erc,
        # plus the nR contribution every cell's column carries, reaches r
        new_rf = ~row_full & (n_cf + erc + n_rf >= r)
        new_cf = ~col_full & (n_rf + ecc + n_cf >= r)
        flips = (~sub & ~row_full[:, None] & ~col_full[None, :] &
                 ((n_cf + erc)[:, None] + (n_rf + ecc)[None, :] >= r))
        if not (new_rf.any() or new_cf.any() or flips.any()):
            return False
        sub |= flips
        if new_rf.any():
            row_full |= new_rf
            n_rf += int(new_rf.sum())
            sub[new_rf, :] = False  # their cells are accounted for via n_rf
        if new_cf.any():
            col_full |= new_cf
            n_cf += int(new_cf.sum())
            sub[:, new_cf] = False


def plane_spanned(cfg: PlaneConfig, r: int) -> bool:
    """Spanning test on a dense config, via the sparse engine when possible."""
    rows, cols = np.nonzero(cfg.occ)
    try:
        return plane_spanned_sparse(cfg.n, rows, cols, r)
    except ValueError:
        return plane_fixpoint_sweep(cfg, r).is_full


def plane_flags(cfg: PlaneConfig, r: int) -> PlaneFlags:
    """IS/II classification at threshold r.

    A fully occupied plane is reported both spanned and internally inert
    (the dynamics vacuously change nothing).
    """
    if r < 0:
        raise ValueError("threshold must be nonnegative")
    if r == 0:
        return PlaneFlags(0, True, cfg.is_full)
    eligible = ~cfg.occ & (cfg.row_count[:, None] + cfg.col_count[None, :] >= r)
    return PlaneFlags(r, plane_spanned(cfg, r), not bool(eligible.any()))

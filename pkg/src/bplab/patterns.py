"""Deterministic pattern certificates for the automata.

Three families:

* blocking rectangles -- obstruction witnesses (states 3/4 arranged along the
  sides of a rectangle around a designated origin) certifying the origin can
  never reach state 0;
* protected rectangles -- regions whose interior survives even with the whole
  exterior clamped to 0;
* green / red site masks -- local patterns whose connectivity decides whether
  the origin flips (green path to a 0) or provably never does (red circuit in
  the lattice augmented with one diagonal).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import Boundary, Rect
from .hetero import HeteroGrid, _wall_state


def window_origin(g: HeteroGrid) -> tuple[int, int]:
    """Default designated origin: the center site of the window."""
    return (g.geometry.width // 2, g.geometry.height // 2)


# ---------------------------------------------------------------------------
# blocking rectangles


class BlockVariant(Enum):
    EVEN = "even"
    FOUR = "four"


def _clip(region: Rect, width: int, height: int) -> Rect:
    return Rect(max(region.a1, 0), min(region.a2, width - 1),
                max(region.b1, 0), min(region.b2, height - 1))


def detect_blocking(g0: HeteroGrid, region: Rect, variant: BlockVariant,
                    origin: tuple[int, int] | None = None) -> Rect | None:
    """Smallest blocking rectangle through ``origin``, or None.

    EVEN: nondegenerate rectangle, each of whose four sides carries two
    state-3 sites or a state-4 site inside ``region``.  FOUR: obstacle
    (state 3 or 4) counts by rectangle size class: both sides >= 3 needs two
    obstacles in each two-layer edge band, one short side needs 4 total,
    both short needs 2.  Candidates stay inside ``region``; the witnesses
    the certificates construct live in the region's span, so nothing is
    missed.  Ties: smallest area, then lexicographic (a1, b1, a2, b2).
    """
    ox, oy = origin if origin is not None else window_origin(g0)
    if not region.contains(ox, oy):
        raise ValueError("origin outside the search region")
    region = _clip(region, *g0.geometry.shape)
    s = g0.states[region.a1:region.a2 + 1, region.b1:region.b2 + 1]
    rx, ry = ox - region.a1, oy - region.b1
    nx, ny = s.shape

    # candidate side pairs must straddle the origin
    a_pairs = [(a1, a2) for a1 in range(rx + 1) for a2 in range(rx, nx)]
    b_pairs = [(b1, b2) for b1 in range(ry + 1) for b2 in range(ry, ny)]
    if variant is BlockVariant.EVEN:
        a_pairs = [(a1, a2) for a1, a2 in a_pairs if a1 < a2]
        b_pairs = [(b1, b2) for b1, b2 in b_pairs if b1 < b2]
    if not a_pairs or not b_pairs:
        return None
    a1s, a2s = np.array(a_pairs).T.reshape(2, -1)
    b1s, b2s = np.array(b_pairs).T.reshape(2, -1)

    if variant is BlockVariant.EVEN:
        c3 = np.zeros((nx, ny + 1), dtype=np.int64)
        c4 = np.zeros((nx, ny + 1), dtype=np.int64)
        np.cumsum(s == 3, axis=1, out=c3[:, 1:])
        np.cumsum(s == 4, axis=1, out=c4[:, 1:])
        # vert[x, j]: side {x} x [b1_j, b2_j] blocks
        vert = ((c3[:, b2s + 1] - c3[:, b1s] >= 2) |
                (c4[:, b2s + 1] - c4[:, b1s] >= 1))
        r3 = np.zeros((nx + 1, ny), dtype=np.int64)
        r4 = np.zeros((nx + 1, ny), dtype=np.int64)
        np.cumsum(s == 3, axis=0, out=r3[1:])
        np.cumsum(s == 4, axis=0, out=r4[1:])
        horiz = ((r3[a2s + 1] - r3[a1s] >= 2) |
                 (r4[a2s + 1] - r4[a1s] >= 1))  # [i, y]
        ok = (vert[a1s] & vert[a2s] &
              horiz[:, b1s] & horiz[:, b2s])
    else:
        obst = ((s == 3) | (s == 4)).astype(np.int64)
        pre = np.zeros((nx + 1, ny + 1), dtype=np.int64)
        np.cumsum(np.cumsum(obst, axis=0), axis=1, out=pre[1:, 1:])

        def band(x1, x2, y1, y2):
            return (pre[x2 + 1][:, y2 + 1] - pre[x1][:, y2 + 1]
                    - pre[x2 + 1][:, y1] + pre[x1][:, y1])

        total = band(a1s, a2s, b1s, b2s)
        wide_a = (a2s - a1s >= 3)[:, None]
        wide_b = (b2s - b1s >= 3)[None, :]
        # clip the band edges so narrow rectangles (masked out below) do not
        # index past the prefix array
        a1b = np.minimum(a1s + 1, nx - 1)
        a2b = np.maximum(a2s - 1, 0)
        b1b = np.minimum(b1s + 1, ny - 1)
        b2b = np.maximum(b2s - 1, 0)
        bands = ((band(a1s, a1b, b1s, b2s) >= 2) &
                 (band(a2b, a2s, b1s, b2s) >= 2) &
                 (band(a1s, a2s, b1s, b1b) >= 2) &
                 (band(a1s, a2s, b2b, b2s) >= 2))
        ok = np.where(
            wide_a & wide_b, bands,
            np.where(wide_a | wide_b, total >= 4, total >= 2))

    hits = np.argwhere(ok)
    if hits.size == 0:
        return None
    cand = [Rect(int(a1s[i]) + region.a1, int(a2s[i]) + region.a1,
                 int(b1s[j]) + region.b1, int(b2s[j]) + region.b1)
            for i, j in hits]
    return min(cand, key=lambda r: (r.area, r.a1, r.b1, r.a2, r.b2))


# ---------------------------------------------------------------------------
# protected rectangles


def is_protected_rect(g0: HeteroGrid, r: Rect) -> bool:
    """After promoting 4s and 5s in R to 3: corners are 3, R holds no 0,
    and the border of R holds no 1.  Such a rectangle keeps every interior
    site unchanged even with the entire exterior clamped to 0."""
    if not r.nondegenerate:
        raise ValueError("protected rectangle must be nondegenerate")
    w, h = g0.geometry.shape
    if not (0 <= r.a1 and r.a2 < w and 0 <= r.b1 and r.b2 < h):
        raise ValueError("rectangle outside window")
    s = g0.states[r.a1:r.a2 + 1, r.b1:r.b2 + 1]
    s = np.where(s >= 4, 3, s)
    if (s == 0).any():
        return False
    for cx, cy in ((0, 0), (0, -1), (-1, 0), (-1, -1)):
        if s[cx, cy] != 3:
            return False
    border = np.zeros(s.shape, dtype=bool)
    border[0, :] = border[-1, :] = border[:, 0] = border[:, -1] = True
    return not bool((border & (s == 1)).any())


# ---------------------------------------------------------------------------
# green / red masks and their connectivity events

# 8-neighborhood offsets; the two "forgiving" diagonal pairs
_DIAG_MAIN = ((1, 1), (-1, -1))   # the diagonal the augmented lattice adds
_DIAG_ANTI = ((1, -1), (-1, 1))
_ALL8 = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)
         if (dx, dy) != (0, 0)]


def _pattern_pad(g: HeteroGrid, wall_value: int) -> np.ndarray:
    if g.geometry.boundary is Boundary.TORUS:
        return np.pad(g.states, 1, mode="wrap")
    if g.geometry.boundary is Boundary.OCCUPIED_WALL:
        wall_value = 0
    return np.pad(g.states, 1, mode="constant", constant_values=wall_value)


def _shift(p: np.ndarray, dx: int, dy: int) -> np.ndarray:
    # p is padded by 1; returns the neighbor value seen from each interior site
    return p[1 + dx:p.shape[0] - 1 + dx, 1 + dy:p.shape[1] - 1 + dy]


def green_red_masks(g0: HeteroGrid) -> tuple[np.ndarray, np.ndarray]:
    """Green: state <= 1, or a 2 whose eight neighbors are all <= 1 except
    possibly one diagonally opposite pair (either diagonal).  Red: state 3,
    or a 2 whose eight neighbors are all 3 except possibly the pair on the
    augmented diagonal.  Off-window neighbors count as obstacles for green
    and as 3s for red (as 0s under OCCUPIED_WALL)."""
    s = g0.states
    pg = _pattern_pad(g0, _wall_state(g0.rule))
    pr = _pattern_pad(g0, 3)

    def all_small(skip: tuple) -> np.ndarray:
        out = np.ones(s.shape, dtype=bool)
        for d in _ALL8:
            if d in skip:
                continue
            out &= _shift(pg, *d) <= 1
        return out

    green = (s <= 1) | ((s == 2) &
                        (all_small(_DIAG_MAIN) | all_small(_DIAG_ANTI)))

    red2 = np.ones(s.shape, dtype=bool)
    for d in _ALL8:
        if d in _DIAG_MAIN:
            continue
        red2 &= _shift(pr, *d) == 3
    red = (s == 3) | ((s == 2) & red2)
    return green, red


class CircuitMode(Enum):
    GREEN_CONNECTION = "green-connection"
    RED_T_CIRCUIT = "red-t-circuit"


_T_STEPS = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)]


def circuit_or_connection(g0: HeteroGrid, mode: CircuitMode, box: Rect,
                          origin: tuple[int, int] | None = None,
                          masks: tuple[np.ndarray, np.ndarray] | None = None
                          ) -> bool:
    """GREEN_CONNECTION: the origin is green and a 4-connected green path
    reaches an initial 0.  RED_T_CIRCUIT: a circuit of red sites in the
    diagonal-augmented lattice surrounds the origin inside ``box``; decided
    by duality, as failure of the origin to reach the box border through
    non-red sites."""
    ox, oy = origin if origin is not None else window_origin(g0)
    if not box.contains(ox, oy):
        raise ValueError("origin outside box")
    box = _clip(box, *g0.geometry.shape)
    green, red = masks if masks is not None else green_red_masks(g0)

    if mode is CircuitMode.GREEN_CONNECTION:
        zeros = g0.states == 0
        if not green[ox, oy]:
            return False
        seen = np.zeros(green.shape, dtype=bool)
        seen[ox, oy] = True
        queue = deque([(ox, oy)])
        while queue:
            x, y = queue.popleft()
            if zeros[x, y]:
                return True
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                p, q = x + dx, y + dy
                if box.contains(p, q) and green[p, q] and not seen[p, q]:
                    seen[p, q] = True
                    queue.append((p, q))
        return False

    # origin on a red site is surrounded by convention (degenerate circuit)
    if red[ox, oy]:
        return True
    seen = np.zeros(red.shape, dtype=bool)
    seen[ox, oy] = True
    queue = deque([(ox, oy)])
    while queue:
        x, y = queue.popleft()
        if x in (box.a1, box.a2) or y in (box.b1, box.b2):
            return False  # escaped to the border: nothing surrounds origin
        for dx, dy in _T_STEPS:
            p, q = x + dx, y + dy
            if box.contains(p, q) and not red[p, q] and not seen[p, q]:
                seen[p, q] = True
                queue.append((p, q))
    return True


# ---------------------------------------------------------------------------
# good boxes


class BoxLabel(Enum):
    NEITHER = 0
    GOOD = 1
    VERY_GOOD = 2


@dataclass
class GoodBoxReport:
    labels: np.ndarray  # (W // N, H // N) of BoxLabel values (ints)
    box_size: int
    excluded: tuple[int, int]  # leftover strip widths along each axis


def good_boxes(labels: np.ndarray, box_size: int) -> GoodBoxReport:
    """Tile the label grid with ``box_size`` squares and classify each.

    GOOD: every label <= 2 and every row and column of the tile has a
    label <= 1.  VERY_GOOD: every label <= 1 and some label is 0.  Partial
    tiles at the far edges are excluded and reported.
    """
    if box_size < 1:
        raise ValueError("box size must be positive")
    arr = np.asarray(labels)
    if arr.ndim != 2:
        raise ValueError("label grid must be two-dimensional")
    kx, ky = arr.shape[0] // box_size, arr.shape[1] // box_size
    out = np.full((kx, ky), BoxLabel.NEITHER.value, dtype=np.int8)
    for i in range(kx):
        for j in range(ky):
            tile = arr[i * box_size:(i + 1) * box_size,
                       j * box_size:(j + 1) * box_size]
            if (tile <= 1).all():
                out[i, j] = (BoxLabel.VERY_GOOD.value if (tile == 0).any()
                             else BoxLabel.GOOD.value)
            elif (tile <= 2).all() and \
                    (tile <= 1).any(axis=1).all() and \
                    (tile <= 1).any(axis=0).all():
                out[i, j] = BoxLabel.GOOD.value
    return GoodBoxReport(out, box_size,
                         (arr.shape[0] - kx * box_size,
                          arr.shape[1] - ky * box_size))

"""Heterogeneous bootstrap automata on lattice windows.

States are per-site thresholds: a site flips to 0 (permanently) once enough
of its four neighbors are 0.  Three rule variants:

* ``PLAIN``   -- flip when the zero-neighbor count Z reaches the state;
              states 0..5 (5 can never flip: Z <= 4).
* ``HELPED3`` -- PLAIN on states 0..3, plus: a 3 flips with Z = 2 and at
              least one "live" neighbor (state strictly between 0 and 3).
* ``HELPED``  -- flip when Z plus the live-neighbor indicator reaches the
              state; states 0..5 plus the idle sentinel (serialized 'T'),
              which behaves as the numeric threshold ``theta`` but never
              counts as live.

Off-window neighbors: EMPTY_WALL clamps them to the rule's top obstacle
symbol (they contribute nothing), OCCUPIED_WALL clamps them to 0.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .geometry import Boundary, BoxGeometry

VOID = 9  # idle sentinel of the HELPED rule ("empty, nothing to contribute")


class Rule(Enum):
    PLAIN = "plain"
    HELPED3 = "helped3"
    HELPED = "helped"


_TOP = {Rule.PLAIN: 5, Rule.HELPED3: 3}


@dataclass
class HeteroGrid:
    geometry: BoxGeometry
    states: np.ndarray  # (W, H) small ints
    rule: Rule
    theta: int | None = None
    frozen: np.ndarray | None = None  # sites exempt from updates

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=np.int16)
        if self.states.shape != self.geometry.shape:
            raise ValueError("state array does not match the window")
        vals = np.unique(self.states)
        if self.rule is Rule.HELPED:
            if self.theta is None or self.theta < 1:
                raise ValueError("HELPED rule needs theta >= 1")
            ok = set(range(6)) | {VOID}
        elif self.rule is Rule.HELPED3:
            ok = set(range(4))
        else:
            ok = set(range(6))
        bad = set(int(v) for v in vals) - ok
        if bad:
            raise ValueError(f"states {sorted(bad)} invalid for rule {self.rule}")
        if self.frozen is not None:
            self.frozen = np.asarray(self.frozen, dtype=bool)
            if self.frozen.shape != self.geometry.shape:
                raise ValueError("frozen mask does not match the window")

    @property
    def top_state(self) -> int:
        return VOID if self.rule is Rule.HELPED else _TOP[self.rule]

    def effective(self) -> np.ndarray:
        """Numeric flip thresholds (idle sentinel read as theta)."""
        if self.rule is Rule.HELPED:
            return np.where(self.states == VOID, self.theta, self.states)
        return self.states.astype(np.int64)

    def with_states(self, states: np.ndarray) -> "HeteroGrid":
        return HeteroGrid(self.geometry, states, self.rule, self.theta,
                          self.frozen)

    def zero_mask(self) -> np.ndarray:
        return self.states == 0


def _wall_state(rule: Rule) -> int:
    return VOID if rule is Rule.HELPED else _TOP[rule]


def _padded(g: HeteroGrid) -> np.ndarray:
    """States with a one-site border implementing the boundary rule."""
    s = g.states
    b = g.geometry.boundary
    if b is Boundary.TORUS:
        return np.pad(s, 1, mode="wrap")
    fill = 0 if b is Boundary.OCCUPIED_WALL else _wall_state(g.rule)
    return np.pad(s, 1, mode="constant", constant_values=fill)


def _is_live(states: np.ndarray, g: HeteroGrid) -> np.ndarray:
    """Helper indicator source: nonzero, below the rule's top threshold."""
    if g.rule is Rule.PLAIN:
        return np.zeros_like(states, dtype=bool)
    if g.rule is Rule.HELPED3:
        return (states > 0) & (states < 3)
    return (states > 0) & (states != VOID) & (states < g.theta)


def neighbor_fields(g: HeteroGrid) -> tuple[np.ndarray, np.ndarray]:
    """(Z, Wc): per-site counts of zero neighbors and of live neighbors."""
    p = _padded(g)
    zero = (p == 0).astype(np.int64)
    live = _is_live(p, g).astype(np.int64)
    z = (zero[:-2, 1:-1] + zero[2:, 1:-1] + zero[1:-1, :-2] + zero[1:-1, 2:])
    w = (live[:-2, 1:-1] + live[2:, 1:-1] + live[1:-1, :-2] + live[1:-1, 2:])
    return z, w


def _flip_mask(g: HeteroGrid, z: np.ndarray, wc: np.ndarray) -> np.ndarray:
    s = g.states
    if g.rule is Rule.PLAIN:
        flip = (s > 0) & (z >= s)
    elif g.rule is Rule.HELPED3:
        flip = (s > 0) & ((z >= s) | ((s == 3) & (z == 2) & (wc > 0)))
    else:
        eff = g.effective()
        # wc enters as the 0/1 helper indicator, not as a count
        flip = (s != 0) & (z + (wc > 0) >= eff)
    if g.frozen is not None:
        flip &= ~g.frozen
    return flip


def hetero_step(g: HeteroGrid) -> HeteroGrid:
    """One synchronous update."""
    z, wc = neighbor_fields(g)
    flip = _flip_mask(g, z, wc)
    if not flip.any():
        return g.with_states(g.states.copy())
    return g.with_states(np.where(flip, 0, g.states))


@lru_cache(maxsize=32)
def _neighbor_table(width: int, height: int, boundary: Boundary) -> np.ndarray:
    """(W*H, 4) flat neighbor indices, -1 where the window ends."""
    geom = BoxGeometry(width, height, boundary)
    table = np.full((width * height, 4), -1, dtype=np.int64)
    for x in range(width):
        for y in range(height):
            for k, (nx, ny) in enumerate(geom.neighbors_inside(x, y)):
                table[x * height + y, k] = nx * height + ny
    return table


def hetero_fixpoint(g: HeteroGrid) -> HeteroGrid:
    """Stabilized configuration, by an event-driven queue.

    Sound because triggers are absorbing: Z is nondecreasing, and a live
    neighbor can stop being live only by flipping to 0, which raises Z by
    the same amount it can lower the helper count.
    """
    geom = g.geometry
    h = geom.height
    s = g.states.ravel().copy()
    z0, w0 = neighbor_fields(g)
    z = z0.ravel()
    wc = w0.ravel()
    frozen = (g.frozen.ravel() if g.frozen is not None
              else np.zeros(s.shape, dtype=bool))
    table = _neighbor_table(geom.width, geom.height, geom.boundary)
    rule = g.rule
    theta = g.theta

    def eligible(i: int) -> bool:
        si = s[i]
        if si == 0 or frozen[i]:
            return False
        if rule is Rule.PLAIN:
            return z[i] >= si
        if rule is Rule.HELPED3:
            return z[i] >= si or (si == 3 and z[i] == 2 and wc[i] > 0)
        eff = theta if si == VOID else si
        return z[i] + (1 if wc[i] > 0 else 0) >= eff

    if rule is Rule.HELPED3:
        def live(si: int) -> bool:
            return 0 < si < 3
    elif rule is Rule.HELPED:
        def live(si: int) -> bool:
            return si != VOID and 0 < si < theta
    else:
        def live(si: int) -> bool:
            return False

    flip0 = _flip_mask(g, z0, w0).ravel()
    queue: deque[int] = deque(np.flatnonzero(flip0).tolist())
    while queue:
        i = queue.popleft()
        if s[i] == 0:
            continue
        was_live = live(int(s[i]))
        s[i] = 0
        for j in table[i]:
            if j < 0:
                continue
            z[j] += 1
            if was_live:
                wc[j] -= 1
            if eligible(j):
                queue.append(int(j))

    return g.with_states(s.reshape(g.geometry.shape))


def restricted_fixpoint(g: HeteroGrid, region: np.ndarray,
                        clamp: int) -> HeteroGrid:
    """Fixpoint with all sites outside ``region`` started at ``clamp``.

    With the top obstacle symbol this is the dynamics on the induced
    subgraph; outside sites are initialized, not frozen, so they may still
    evolve for intermediate clamp states.
    """
    region = np.asarray(region, dtype=bool)
    if region.shape != g.geometry.shape:
        raise ValueError("region mask does not match the window")
    states = np.where(region, g.states, np.int16(clamp))
    return hetero_fixpoint(g.with_states(states))


@dataclass
class ClusterStats:
    """Connected components of state-0 sites (plain 4-adjacency)."""

    clusters: list[tuple[int, int]] = field(default_factory=list)  # (size, linf diameter)
    max_diameter: int = 0


def zero_clusters(g: HeteroGrid) -> ClusterStats:
    zero = g.zero_mask()
    w, h = zero.shape
    seen = np.zeros_like(zero)
    stats = ClusterStats()
    for x0, y0 in np.argwhere(zero & ~seen):
        if seen[x0, y0]:
            continue
        stack = [(int(x0), int(y0))]
        seen[x0, y0] = True
        xmin = xmax = int(x0)
        ymin = ymax = int(y0)
        size = 0
        while stack:
            x, y = stack.pop()
            size += 1
            xmin, xmax = min(xmin, x), max(xmax, x)
            ymin, ymax = min(ymin, y), max(ymax, y)
            for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if 0 <= nx < w and 0 <= ny < h and zero[nx, ny] \
                        and not seen[nx, ny]:
                    seen[nx, ny] = True
                    stack.append((nx, ny))
        diam = max(xmax - xmin, ymax - ymin)
        stats.clusters.append((size, diam))
        stats.max_diameter = max(stats.max_diameter, diam)
    return stats


def remap_states(g: HeteroGrid, mapping: dict[int, int]) -> HeteroGrid:
    """Pointwise relabel; the mapping must cover every occurring state."""
    out = g.states.copy()
    present = set(int(v) for v in np.unique(g.states))
    missing = present - set(mapping)
    if missing:
        raise ValueError(f"mapping does not cover states {sorted(missing)}")
    for old, new in mapping.items():
        out[g.states == old] = new
    return g.with_states(out)  # construction re-validates for the rule


_TO_CHAR = {i: str(i) for i in range(6)} | {VOID: "T"}
_FROM_CHAR = {v: k for k, v in _TO_CHAR.items()}


def grid_to_text(g: HeteroGrid) -> str:
    """Plain-text snapshot, one character per state, rows are y-lines."""
    lines = []
    for y in range(g.geometry.height):
        lines.append("".join(_TO_CHAR[int(v)] for v in g.states[:, y]))
    return "\n".join(lines) + "\n"


def grid_from_text(text: str, rule: Rule, theta: int | None = None,
                   boundary: Boundary = Boundary.EMPTY_WALL) -> HeteroGrid:
    lines = [ln for ln in text.strip().splitlines() if ln]
    height = len(lines)
    width = len(lines[0])
    if any(len(ln) != width for ln in lines):
        raise ValueError("ragged snapshot")
    states = np.zeros((width, height), dtype=np.int16)
    for y, ln in enumerate(lines):
        for x, ch in enumerate(ln):
            try:
                states[x, y] = _FROM_CHAR[ch]
            except KeyError:
                raise ValueError(f"unknown state character {ch!r}") from None
    return HeteroGrid(BoxGeometry(width, height, boundary), states, rule, theta)

"""Window geometry shared by the lattice-indexed configurations.

All simulations run on finite L1 x L2 windows of the square lattice.  The
boundary rule decides what a site on the window edge sees in place of its
missing neighbors:

* ``TORUS``         -- wrap around (translation-invariant density estimates);
* ``EMPTY_WALL``    -- off-window neighbors behave like empty planes (they
                       never help anything grow);
* ``OCCUPIED_WALL`` -- off-window neighbors behave like fully occupied planes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Boundary(Enum):
    TORUS = "torus"
    EMPTY_WALL = "empty-wall"
    OCCUPIED_WALL = "occupied-wall"


@dataclass(frozen=True)
class BoxGeometry:
    """Finite window: ``width`` columns (first axis) by ``height`` rows."""

    width: int
    height: int
    boundary: Boundary = Boundary.EMPTY_WALL

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("window sides must be positive")
        if self.boundary is Boundary.TORUS and (self.width < 2 or self.height < 2):
            # a 1-wide torus would make a site its own neighbor
            raise ValueError("TORUS requires both sides >= 2")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.width, self.height)

    def contains(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def neighbors_inside(self, x: int, y: int) -> list[tuple[int, int]]:
        """In-window lattice neighbors of (x, y); wraps on a torus."""
        out = []
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if self.boundary is Boundary.TORUS:
                out.append((nx % self.width, ny % self.height))
            elif self.contains(nx, ny):
                out.append((nx, ny))
        return out

    def missing_neighbor_count(self, x: int, y: int) -> int:
        """Number of the 4 lattice neighbors that fall outside the window."""
        if self.boundary is Boundary.TORUS:
            return 0
        return 4 - len(self.neighbors_inside(x, y))


@dataclass(frozen=True)
class Rect:
    """Closed lattice rectangle [a1, a2] x [b1, b2]."""

    a1: int
    a2: int
    b1: int
    b2: int

    def __post_init__(self):
        if self.a1 > self.a2 or self.b1 > self.b2:
            raise ValueError("rectangle corners out of order")

    @property
    def nondegenerate(self) -> bool:
        return self.a1 < self.a2 and self.b1 < self.b2

    @property
    def area(self) -> int:
        return (self.a2 - self.a1 + 1) * (self.b2 - self.b1 + 1)

    def contains(self, x: int, y: int) -> bool:
        return self.a1 <= x <= self.a2 and self.b1 <= y <= self.b2

    def sites(self):
        for x in range(self.a1, self.a2 + 1):
            for y in range(self.b1, self.b2 + 1):
                yield (x, y)

    def boundary_sites(self):
        for x in range(self.a1, self.a2 + 1):
            for y in range(self.b1, self.b2 + 1):
                if x in (self.a1, self.a2) or y in (self.b1, self.b2):
                    yield (x, y)

"""Finite lattice models of the group Z^d and its order structure.

The group is modelled by a finite rectangular window in Z^d carrying the
counting measure (one weight per cell).  Two kinds of distinguished point
sets live on a window:

* ``PSPACE`` sets are upward invariant: adding a semigroup generator to a
  member stays inside the set whenever it stays inside the window.  These
  are the classifying data of canonical weak Weyl pairs.
* ``YSET`` sets are downward invariant: subtracting a generator stays
  inside the set whenever it stays inside the window.  Joint-spectrum
  patterns of commuting range projections land in this class.

Separation of two sets is witnessed by pairing finitely supported test
functions against indicator functions, which on a finite window is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, EmptySetError, InvarianceViolation, WindowMismatch

#: Enumeration guard: enumerations longer than this raise BudgetExceeded.
ENUMERATION_BUDGET = 2 ** 24


class SetKind(Enum):
    PSPACE = "pspace"
    YSET = "yset"


Point = tuple[int, ...]


def _as_point(x: Sequence[int]) -> Point:
    return tuple(int(c) for c in x)


@dataclass(frozen=True)
class LatticeWindow:
    """Rectangular sampling box ``lo <= x <= hi`` in Z^d with a cell weight."""

    lo: Point
    hi: Point
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lo", _as_point(self.lo))
        object.__setattr__(self, "hi", _as_point(self.hi))
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ValueError("lo and hi must be nonempty vectors of equal length")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise ValueError("window requires lo <= hi componentwise")
        if not self.weight > 0:
            raise ValueError("cell weight must be positive")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def sides(self) -> Point:
        return tuple(h - l + 1 for l, h in zip(self.lo, self.hi))

    @property
    def cardinality(self) -> int:
        n = 1
        for s in self.sides:
            n *= s
        return n

    def __contains__(self, x: Sequence[int]) -> bool:
        p = _as_point(x)
        return len(p) == self.dim and all(
            l <= c <= h for l, c, h in zip(self.lo, p, self.hi)
        )

    def points(self) -> Iterator[Point]:
        """Lexicographic sweep of all window points."""
        ranges = [range(l, h + 1) for l, h in zip(self.lo, self.hi)]
        return iter(itertools.product(*ranges))

    def index(self, x: Sequence[int]) -> int:
        """Lexicographic linear index of a window point."""
        p = _as_point(x)
        if p not in self:
            raise ValueError(f"point {p} outside window")
        idx = 0
        for l, c, s in zip(self.lo, p, self.sides):
            idx = idx * s + (c - l)
        return idx

    def generators(self) -> list[Point]:
        """Unit vectors e_1 .. e_d of the positive semigroup."""
        d = self.dim
        return [tuple(1 if j == i else 0 for j in range(d)) for i in range(d)]


def _add(x: Point, y: Sequence[int]) -> Point:
    return tuple(a + b for a, b in zip(x, y))


def _sub(x: Point, y: Sequence[int]) -> Point:
    return tuple(a - b for a, b in zip(x, y))


def _leq(x: Sequence[int], y: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(x, y))


@dataclass(frozen=True)
class PSet:
    """Validated invariant point set inside a window.

    ``PSPACE`` members are closed under adding generators inside the window,
    ``YSET`` members under subtracting them.  Points are kept sorted and
    duplicate free, so equality and serialization are canonical.
    """

    window: LatticeWindow
    points: tuple[Point, ...]
    kind: SetKind

    def __post_init__(self):
        pts = tuple(sorted({_as_point(p) for p in self.points}))
        object.__setattr__(self, "points", pts)
        if not pts:
            raise EmptySetError("point set must be nonempty")
        for p in pts:
            if p not in self.window:
                raise InvarianceViolation(f"point {p} outside window", point=p)
        self._check_invariance()

    def _check_invariance(self):
        members = set(self.points)
        sign = 1 if self.kind is SetKind.PSPACE else -1
        for p in self.points:
            for e in self.window.generators():
                q = _add(p, tuple(sign * c for c in e))
                if q in self.window and q not in members:
                    raise InvarianceViolation(
                        f"{self.kind.value} invariance fails at {p} in direction "
                        f"{tuple(sign * c for c in e)}",
                        point=p,
                        direction=tuple(sign * c for c in e),
                    )

    def __contains__(self, x: Sequence[int]) -> bool:
        return _as_point(x) in set(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def contains_origin(self) -> bool:
        """Membership predicate for the compact slice of downward sets."""
        return tuple(0 for _ in range(self.window.dim)) in self


def validate_pset(points: Iterable[Sequence[int]], window: LatticeWindow,
                  kind: SetKind) -> PSet:
    """Validate a point set against the kind-specific invariance.

    Raises InvarianceViolation naming the first offending (point, direction)
    pair, or EmptySetError for an empty input.
    """
    return PSet(window, tuple(_as_point(p) for p in points), kind)


def enumerate_pspaces(window: LatticeWindow) -> list[PSet]:
    """All nonempty upward-invariant subsets of the window.

    Enumerates order filters directly (never the powerset): points are
    visited in an order where both neighbours above a point precede it, so a
    point may join only when its in-window successors are already in.  The
    result is sorted canonically and deterministic.
    """
    pts = sorted(window.points(), key=lambda p: (-sum(p), p))
    pos = {p: i for i, p in enumerate(pts)}
    gens = window.generators()
    covers = [
        [pos[_add(p, e)] for e in gens if _add(p, e) in window]
        for p in pts
    ]
    results: list[tuple[Point, ...]] = []

    def visit(i: int, chosen: set[int]):
        if i == len(pts):
            if chosen:
                results.append(tuple(sorted(pts[j] for j in chosen)))
                if len(results) > ENUMERATION_BUDGET:
                    raise BudgetExceeded(
                        f"more than {ENUMERATION_BUDGET} upward-invariant sets"
                    )
            return
        visit(i + 1, chosen)
        if all(c in chosen for c in covers[i]):
            chosen.add(i)
            visit(i + 1, chosen)
            chosen.remove(i)

    visit(0, set())
    results.sort()
    return [PSet(window, pts_, SetKind.PSPACE) for pts_ in results]


def _extremal_points(ps: PSet) -> list[Point]:
    """Minimal elements of a PSPACE set / maximal elements of a YSET set."""
    members = set(ps.points)
    sign = -1 if ps.kind is SetKind.PSPACE else 1
    out = []
    for p in ps.points:
        if not any(_add(p, tuple(sign * c for c in e)) in members
                   for e in ps.window.generators()):
            out.append(p)
    return out


def translate_pset(ps: PSet, x: Sequence[int]) -> tuple[PSet, int]:
    """Shift a set by a group element, re-truncating to the window.

    The set is treated as the window truncation of its invariant extension
    to Z^d, so the result is again a valid set of the same kind: shifted
    extremal points are dominated inside the window.  The second return
    value counts original points whose shift fell outside the window.
    """
    shift = _as_point(x)
    if len(shift) != ps.window.dim:
        raise WindowMismatch("shift dimension does not match window")
    clip = sum(1 for p in ps.points if _add(p, shift) not in ps.window)
    anchors = [_add(p, shift) for p in _extremal_points(ps)]
    if ps.kind is SetKind.PSPACE:
        keep = [q for q in ps.window.points() if any(_leq(a, q) for a in anchors)]
    else:
        keep = [q for q in ps.window.points() if any(_leq(q, a) for a in anchors)]
    if not keep:
        raise EmptySetError("translated set leaves the window entirely")
    return PSet(ps.window, tuple(keep), ps.kind), clip


def reflect_pset(ps: PSet) -> PSet:
    """Reflect about the window centre, x -> lo + hi - x.

    Sends upward-invariant sets to downward-invariant ones and back; this
    is the negation duality between the two classes, realised inside the
    fixed window.
    """
    w = ps.window
    mirrored = tuple(
        tuple(l + h - c for l, h, c in zip(w.lo, w.hi, p)) for p in ps.points
    )
    kind = SetKind.YSET if ps.kind is SetKind.PSPACE else SetKind.PSPACE
    return PSet(w, mirrored, kind)


def complement_pset(ps: PSet) -> PSet:
    """Complement within the window; swaps the invariance kind as well."""
    members = set(ps.points)
    rest = tuple(p for p in ps.window.points() if p not in members)
    kind = SetKind.YSET if ps.kind is SetKind.PSPACE else SetKind.PSPACE
    return PSet(ps.window, rest, kind)


@dataclass(frozen=True)
class TestFunction:
    """Finitely supported complex function on a declared window."""

    __test__ = False  # not a pytest item despite the name

    window: LatticeWindow
    support: tuple[tuple[Point, complex], ...]

    def __post_init__(self):
        cleaned = []
        for p, v in self.support:
            q = _as_point(p)
            if q not in self.window:
                raise InvarianceViolation(f"support point {q} outside window", point=q)
            cleaned.append((q, complex(v)))
        cleaned.sort(key=lambda t: t[0])
        object.__setattr__(self, "support", tuple(cleaned))

    @classmethod
    def delta(cls, window: LatticeWindow, point: Sequence[int],
              value: complex = 1.0) -> "TestFunction":
        return cls(window, ((_as_point(point), value),))

    @classmethod
    def uniform(cls, window: LatticeWindow, points: Iterable[Sequence[int]],
                value: complex) -> "TestFunction":
        return cls(window, tuple((_as_point(p), value) for p in points))

    def __add__(self, other: "TestFunction") -> "TestFunction":
        if other.window != self.window:
            raise WindowMismatch("test functions live on different windows")
        acc: dict[Point, complex] = {}
        for p, v in self.support + other.support:
            acc[p] = acc.get(p, 0.0) + v
        return TestFunction(self.window, tuple(acc.items()))


def indicator_integral(f: TestFunction, ps: PSet) -> complex:
    """Pair a test function against the indicator of a set.

    Returns ``weight * sum_{x in set} f(x)``; linear in ``f`` and, for
    nonnegative ``f``, monotone in the set.  Delta functions separate any
    two distinct sets on a finite window, which is the working form of the
    indicator embedding being injective.
    """
    members = set(ps.points)
    return ps.window.weight * sum(v for p, v in f.support if p in members)

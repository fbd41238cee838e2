"""Represented weak Weyl pairs on finite windows.

A pair consists of a position grading (one fiber block per window point)
together with one generator matrix per axis.  The character unitaries are
derived from the grading: the unitary for angle vector theta multiplies the
block of y by exp(i theta.y).  Generator matrices must map the block of y
into the block of y + e_i, which is exactly what the commutation relation

    U_theta V_a = exp(i theta.a) V_a U_theta

forces at the matrix level.  Truncation at the window boundary is
controlled by safe margins: isometry and commutation claims are asserted on
the span of blocks that stay inside the window under all shifts up to the
margin, and nowhere else.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    MarginTooSmall,
    NonCommutingGenerators,
    PairInvariantViolation,
    WindowMismatch,
)
from .lattice import LatticeWindow, PSet, Point, SetKind, _add

GRADING_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SafeRegion:
    """Margin r: blocks of y with y + [0, r]^d inside the window are safe."""

    margin: int

    def __post_init__(self):
        if self.margin < 0:
            raise MarginTooSmall("margin must be nonnegative")


class WeylPair:
    """Position-graded pair: fiber dimensions plus one matrix per axis.

    ``fibers`` maps window points to positive fiber dimensions; points not
    listed carry the zero fiber.  Blocks are laid out in lexicographic point
    order, so the grading data determines the matrix layout uniquely.
    """

    def __init__(self, window: LatticeWindow, fibers, gens, label: str = "",
                 validate: bool = True):
        self.window = window
        items = sorted((tuple(int(c) for c in p), int(k))
                       for p, k in dict(fibers).items() if int(k) > 0)
        if not items:
            raise PairInvariantViolation("pair needs at least one nonzero fiber")
        for p, _ in items:
            if p not in window:
                raise PairInvariantViolation(f"fiber point {p} outside window")
        self.fibers: tuple[tuple[Point, int], ...] = tuple(items)
        self.offsets: dict[Point, tuple[int, int]] = {}
        off = 0
        for p, k in self.fibers:
            self.offsets[p] = (off, k)
            off += k
        self.dim = off
        gens = tuple(np.asarray(g, dtype=complex) for g in gens)
        if len(gens) != window.dim:
            raise PairInvariantViolation("one generator matrix per axis required")
        for g in gens:
            if g.shape != (self.dim, self.dim):
                raise PairInvariantViolation(
                    f"generator shape {g.shape} does not match dim {self.dim}")
        self.gens = gens
        self.label = label
        if validate:
            self._check_grading()

    def _check_grading(self):
        for axis, g in enumerate(self.gens):
            e = self.window.generators()[axis]
            allowed = np.zeros((self.dim, self.dim), dtype=bool)
            for p, (off, k) in self.offsets.items():
                q = _add(p, e)
                if q in self.offsets:
                    qoff, qk = self.offsets[q]
                    allowed[qoff:qoff + qk, off:off + k] = True
            stray = np.abs(np.where(allowed, 0.0, g)).max() if self.dim else 0.0
            if stray > GRADING_TOL:
                raise PairInvariantViolation(
                    f"generator {axis} leaks outside the graded blocks "
                    f"(max stray entry {stray:.3e})")

    @property
    def points(self) -> tuple[Point, ...]:
        return tuple(p for p, _ in self.fibers)

    def block_slice(self, p: Point) -> slice:
        off, k = self.offsets[p]
        return slice(off, off + k)

    def position_projection(self, p) -> np.ndarray:
        """Coordinate projection onto the fiber block of a point."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        p = tuple(int(c) for c in p)
        if p in self.offsets:
            s = self.block_slice(p)
            out[s, s] = np.eye(s.stop - s.start)
        return out

    def position_phases(self, theta) -> np.ndarray:
        th = np.asarray(theta, dtype=float)
        out = np.empty(self.dim, dtype=complex)
        for p, (off, k) in self.offsets.items():
            out[off:off + k] = np.exp(1j * float(th @ np.asarray(p)))
        return out

    def position_observable(self) -> np.ndarray:
        """Hermitian position marker: window index of y on the block of y.

        Its spectral projections are exactly the position projections, so
        commuting with it is the same as commuting with every character
        unitary of the pair.
        """
        diag = np.empty(self.dim)
        for p, (off, k) in self.offsets.items():
            diag[off:off + k] = self.window.index(p)
        return np.diag(diag).astype(complex)

    def safe_indices(self, safe: SafeRegion) -> np.ndarray:
        """Coordinate indices of blocks with y + margin*1 inside the window."""
        if safe.margin > min(self.window.sides):
            raise MarginTooSmall("margin exceeds window side length")
        keep = []
        for p, (off, k) in self.offsets.items():
            if all(c + safe.margin <= h for c, h in zip(p, self.window.hi)):
                keep.extend(range(off, off + k))
        return np.array(keep, dtype=int)


def build_pspace_pair(pspace: PSet, k: int, label: str = "") -> WeylPair:
    """Canonical pair of an upward-invariant set with fiber multiplicity k.

    The generator for axis i is the block shift sending the block of y
    identically onto the block of y + e_i whenever both lie in the set, and
    to zero otherwise; on a chain this is a truncated unilateral shift.
    """
    if pspace.kind is not SetKind.PSPACE:
        raise PairInvariantViolation("canonical pairs require a PSPACE set")
    if k < 1:
        raise PairInvariantViolation("fiber multiplicity must be positive")
    window = pspace.window
    fibers = {p: k for p in pspace.points}
    dim = k * len(pspace)
    offset = {p: i * k for i, p in enumerate(pspace.points)}
    members = set(pspace.points)
    gens = []
    for e in window.generators():
        g = np.zeros((dim, dim), dtype=complex)
        for p in pspace.points:
            q = _add(p, e)
            if q in members:
                g[offset[q]:offset[q] + k, offset[p]:offset[p] + k] = np.eye(k)
        gens.append(g)
    return WeylPair(window, fibers, gens,
                    label=label or f"canonical{pspace.points[0]}x{k}")


def unitary_u(pair: WeylPair, theta) -> np.ndarray:
    """Character unitary: block of y scaled by exp(i theta.y)."""
    return np.diag(pair.position_phases(theta))


def isometry_v(pair: WeylPair, a) -> np.ndarray:
    """Semigroup element V_a as the ordered product of generator powers.

    The two extreme evaluation orders are compared; a discrepancy above
    1e-10 means the generator matrices do not commute and the pair is
    corrupted.
    """
    avec = tuple(int(c) for c in a)
    if len(avec) != pair.window.dim or any(c < 0 for c in avec):
        raise ValueError("semigroup exponent must be a nonnegative vector")
    fwd = np.eye(pair.dim, dtype=complex)
    for axis, power in enumerate(avec):
        if power:
            fwd = np.linalg.matrix_power(pair.gens[axis], power) @ fwd
    if pair.window.dim > 1:
        bwd = np.eye(pair.dim, dtype=complex)
        for axis in reversed(range(pair.window.dim)):
            if avec[axis]:
                bwd = np.linalg.matrix_power(pair.gens[axis], avec[axis]) @ bwd
        if np.linalg.norm(fwd - bwd, 2) > 1e-10:
            raise NonCommutingGenerators(
                f"generator products differ for exponent {avec}")
    return fwd


def weyl_defect(pair: WeylPair, theta, a, safe: SafeRegion) -> float:
    """Norm of U V_a - exp(i theta.a) V_a U compressed to the safe blocks."""
    avec = tuple(int(c) for c in a)
    if any(c > safe.margin for c in avec):
        raise MarginTooSmall(f"shift {avec} exceeds safe margin {safe.margin}")
    th = np.asarray(theta, dtype=float)
    u = pair.position_phases(th)
    v = isometry_v(pair, avec)
    phase = np.exp(1j * float(th @ np.asarray(avec)))
    diff = u[:, None] * v - phase * (v * u[None, :])
    idx = pair.safe_indices(safe)
    if idx.size == 0:
        return 0.0
    return float(np.linalg.norm(diff[np.ix_(idx, idx)], 2))


def isometry_defect(pair: WeylPair, a, safe: SafeRegion) -> float:
    """Norm of (V_a* V_a - 1) compressed to the safe blocks."""
    avec = tuple(int(c) for c in a)
    if any(c > safe.margin for c in avec):
        raise MarginTooSmall(f"shift {avec} exceeds safe margin {safe.margin}")
    v = isometry_v(pair, avec)
    m = v.conj().T @ v - np.eye(pair.dim)
    idx = pair.safe_indices(safe)
    if idx.size == 0:
        return 0.0
    return float(np.linalg.norm(m[np.ix_(idx, idx)], 2))


def range_projection(pair: WeylPair, a) -> np.ndarray:
    """Range projection V_a V_a* of the semigroup element."""
    v = isometry_v(pair, a)
    e = v @ v.conj().T
    return 0.5 * (e + e.conj().T)


def default_probe(dim: int, reach: int = 2) -> list[Point]:
    """All nonzero semigroup exponents up to ``reach`` in each axis."""
    return [a for a in itertools.product(range(reach + 1), repeat=dim)
            if any(a)]


def check_commuting_ranges(pair: WeylPair, probe=None) -> float:
    """Largest commutator norm among range projections over the probe set."""
    if probe is None:
        probe = default_probe(pair.window.dim)
    projs = [range_projection(pair, a) for a in probe]
    worst = 0.0
    for i in range(len(projs)):
        for j in range(i + 1, len(projs)):
            comm = projs[i] @ projs[j] - projs[j] @ projs[i]
            worst = max(worst, float(np.linalg.norm(comm, 2)))
    return worst


def direct_sum(pairs: list[WeylPair], label: str = "") -> WeylPair:
    """Blockwise direct sum on a common window; fibers add pointwise."""
    if not pairs:
        raise ValueError("direct_sum of an empty list")
    window = pairs[0].window
    for p in pairs[1:]:
        if p.window != window:
            raise WindowMismatch("direct summands live on different windows")
    fibers: dict[Point, int] = {}
    for p in pairs:
        for pt, k in p.fibers:
            fibers[pt] = fibers.get(pt, 0) + k
    order = sorted(fibers)
    offsets = {}
    off = 0
    for pt in order:
        offsets[pt] = off
        off += fibers[pt]
    total = off
    injections = []
    for p in pairs:
        inj = np.empty(p.dim, dtype=int)
        cursor = dict(offsets)
        for pt, k in p.fibers:
            s = p.block_slice(pt)
            inj[s] = np.arange(cursor[pt], cursor[pt] + k)
            cursor[pt] += k
        injections.append(inj)
        for pt, k in p.fibers:
            offsets[pt] += k
    gens = []
    for axis in range(window.dim):
        g = np.zeros((total, total), dtype=complex)
        for p, inj in zip(pairs, injections):
            g[np.ix_(inj, inj)] = p.gens[axis]
        gens.append(g)
    return WeylPair(window, fibers, gens,
                    label=label or "+".join(p.label for p in pairs))


def dual_grid(window: LatticeWindow) -> list[np.ndarray]:
    """Finite dual grid: theta_i = 2 pi j / N_i with N_i the window sides."""
    axes = [np.arange(n) * (2.0 * np.pi / n) for n in window.sides]
    return [np.array(t) for t in itertools.product(*axes)]


def recover_position_projections(window: LatticeWindow, samples) -> dict:
    """Invert character samples into position projections.

    ``samples`` pairs each dual-grid angle vector with the corresponding
    unitary.  When the unitaries are graded by window points the finite
    Fourier inversion  P_y = (1/|grid|) sum_theta exp(-i theta.y) U_theta
    is exact.
    """
    samples = list(samples)
    total = len(samples)
    out = {}
    for y in window.points():
        acc = None
        yv = np.asarray(y, dtype=float)
        for theta, u in samples:
            term = np.exp(-1j * float(np.asarray(theta) @ yv)) * np.asarray(u)
            acc = term if acc is None else acc + term
        out[y] = acc / total
    return out


def canonical_defect_sweep(pspace: PSet, k: int, margin: int) -> float:
    """Exhaustive commutation-defect maximum for a canonical pair.

    Sweeps every dual-grid angle and every semigroup shift up to the margin,
    evaluating the same compressed defect as :func:`weyl_defect` through the
    graded sparsity of the canonical generators (the defect matrix has one
    scalar phase per occupied block, so its spectral norm is the largest
    phase deviation).  The fiber multiplicity scales blocks by the identity
    and leaves the norm unchanged.
    """
    window = pspace.window
    pts = list(pspace.points)
    row = {p: i for i, p in enumerate(pts)}
    coords = np.array(pts, dtype=float)
    thetas = np.array(dual_grid(window))
    phases = np.exp(1j * thetas @ coords.T)
    hi = np.array(window.hi)
    coords_int = np.array(pts, dtype=int)
    safe_mask = np.all(coords_int + margin <= hi, axis=1)
    worst = 0.0
    for a in itertools.product(range(margin + 1), repeat=window.dim):
        av = np.array(a, dtype=int)
        mask = safe_mask & np.all(coords_int + av + margin <= hi, axis=1)
        if not mask.any():
            continue
        src = np.nonzero(mask)[0]
        dst = np.array([row[tuple(coords_int[i] + av)] for i in src])
        aphase = np.exp(1j * thetas @ av.astype(float))
        dev = np.abs(phases[:, dst] - aphase[:, None] * phases[:, src])
        worst = max(worst, float(dev.max()))
    return worst

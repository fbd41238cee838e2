"""Minimal unitary dilation with a depth budget, and classification.

A pair with commuting range projections splits into canonical components
(one upward-invariant set with a constant fiber multiplicity per minimal
central projection of the generated algebra).  Its minimal unitary dilation
is realised concretely: the window is extended downward by the depth, each
component support grows to every point from which a budget shift re-enters
the component, and the dilated generators are the block shifts of the
enlarged supports.  Inside the declared budget every dilation identity
holds exactly; outside it nothing is claimed.

The module also carries the covariant projection family E_x (projections
onto shifted copies of the embedded base space), integration of test
functions against it, the joint spectrum of the commuting family, and the
extension of the base character unitaries to the dilation space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .commutant import RepGens, commutant_basis, unitarily_equivalent
from .errors import (
    BudgetExceeded,
    DepthZeroDegenerate,
    EmptySetError,
    FiberMismatch,
    InvarianceViolation,
    NonCommutingRanges,
    PatternNotYSet,
    WellDefinednessViolation,
)
from .lattice import LatticeWindow, PSet, Point, SetKind, _add, _leq, _sub, translate_pset
from .pairs import WeylPair, check_commuting_ranges, unitary_u

RANGE_TOL = 1e-10


# ---------------------------------------------------------------------------
# graded sums with explicit layout bookkeeping


def _graded_sum(window: LatticeWindow, comps):
    """Direct sum of canonical pairs with a recorded block layout.

    ``comps`` is a list of (point tuple set, multiplicity).  Returns the
    summed pair and an index map (component, point) -> first coordinate of
    that component's fiber inside the block of the point.
    """
    fibers: dict[Point, int] = {}
    for pts, k in comps:
        for p in pts:
            fibers[p] = fibers.get(p, 0) + k
    order = sorted(fibers)
    start = {}
    off = 0
    for p in order:
        start[p] = off
        off += fibers[p]
    total = off
    idx: dict[tuple[int, Point], int] = {}
    cursor = dict(start)
    for ci, (pts, k) in enumerate(comps):
        for p in sorted(pts):
            idx[(ci, p)] = cursor[p]
            cursor[p] += k
    gens = []
    for e in window.generators():
        g = np.zeros((total, total), dtype=complex)
        for ci, (pts, k) in enumerate(comps):
            members = set(pts)
            for p in members:
                q = _add(p, e)
                if q in members:
                    r0, c0 = idx[(ci, q)], idx[(ci, p)]
                    g[r0:r0 + k, c0:c0 + k] = np.eye(k)
        gens.append(g)
    pair = WeylPair(window, fibers, gens, label="gradedsum")
    return pair, idx


# ---------------------------------------------------------------------------
# classification of commuting-range pairs


@dataclass(eq=False)
class ComponentResult:
    """One factor block: canonical set, orbit translation, multiplicity."""

    pspace: PSet
    translation: Point
    multiplicity: int
    raw: PSet

    def to_json(self) -> dict:
        from .serialize import pset_to_json

        return {
            "pspace": pset_to_json(self.pspace),
            "translation": list(self.translation),
            "multiplicity": self.multiplicity,
        }


@dataclass(eq=False)
class Decomposition:
    components: list[ComponentResult]
    witness: np.ndarray = field(repr=False)
    reassembled: WeylPair = field(repr=False)
    reassembled_index: dict = field(repr=False, default_factory=dict)


def _orbit_support(start, ops, dim):
    """Smallest subspace containing ``start`` and invariant under ``ops``."""
    basis = start
    for _ in range(2 * dim):
        grown = np.hstack([basis] + [op @ basis for op in ops])
        u, sv, _ = np.linalg.svd(grown, full_matrices=False)
        keep = u[:, sv > 1e-8 * sv[0]]
        if keep.shape[1] == basis.shape[1]:
            return keep
        basis = keep
    raise FiberMismatch("invariant-subspace closure did not stabilise")


def _minimal_central_projections(gens, cbasis, dim, seed=20240501):
    """Minimal central projections of the algebra generated by ``gens``.

    A generic Hermitian element of the commutant separates the factor
    blocks: growing each of its eigenclusters into an invariant subspace of
    both the algebra and the commutant yields the central support of the
    cluster, and the distinct supports are the minimal central projections.
    """
    if len(cbasis) == 1:
        return [np.eye(dim, dtype=complex)]
    rng = np.random.default_rng(seed)

    def generic_commutant_element():
        z = np.zeros((dim, dim), dtype=complex)
        for m in cbasis:
            z += rng.standard_normal() * 0.5 * (m + m.conj().T)
            z += rng.standard_normal() * (m - m.conj().T) / 2j
        return z

    verify_ops = []
    for m in list(gens) + list(cbasis):
        verify_ops.append(m)
        verify_ops.append(m.conj().T)
    for _ in range(20):
        # a handful of generic commutant elements replaces the full basis in
        # the closure; the verification below catches unlucky draws
        ops = []
        for m in list(gens) + [generic_commutant_element() for _ in range(2)]:
            ops.append(m)
            ops.append(m.conj().T)
        z = generic_commutant_element()
        vals, vecs = np.linalg.eigh(z)
        spread = max(vals[-1] - vals[0], 1.0)
        groups = []
        cur = [0]
        for i in range(1, len(vals)):
            if vals[i] - vals[i - 1] > 1e-6 * spread:
                groups.append(cur)
                cur = []
            cur.append(i)
        groups.append(cur)
        projs = []
        for g in groups:
            span = _orbit_support(vecs[:, g], ops, dim)
            p = span @ span.conj().T
            if not any(np.linalg.norm(p - q, 2) < 1e-8 for q in projs):
                projs.append(p)
        total = sum(projs)
        ok = np.linalg.norm(total - np.eye(dim), 2) <= RANGE_TOL
        for p in projs:
            if not ok:
                break
            ok = np.linalg.norm(p @ p - p, 2) <= RANGE_TOL and all(
                np.linalg.norm(p @ x - x @ p, 2) <= 1e-8 for x in verify_ops)
        if ok:
            return projs
    raise FiberMismatch("could not isolate minimal central projections")


def decompose_full(pair: WeylPair, tol: float = 1e-8, guard: int = 256,
                   probe=None) -> Decomposition:
    """Split a commuting-range position-graded pair into canonical parts.

    Steps: verify commuting ranges, compute the commutant and centre of the
    generated algebra, split along minimal central projections, read each
    factor block as (upward-invariant set, constant multiplicity), and
    verify that the direct sum of the canonical models is unitarily
    equivalent to the input.
    """
    worst = check_commuting_ranges(pair, probe)
    if worst > RANGE_TOL:
        raise NonCommutingRanges(
            f"range projections fail to commute (max commutator {worst:.3e})")
    rep = RepGens.from_pair(pair)
    cbasis = commutant_basis(rep, tol, guard)
    projs = _minimal_central_projections(rep.gens, cbasis, pair.dim)

    comps = []
    for p in projs:
        support = []
        mult = None
        bases = {}
        for pt, k in pair.fibers:
            s = pair.block_slice(pt)
            block = p[s, s]
            vals, vecs = np.linalg.eigh(block)
            ones = vals > 0.5
            if np.abs(vals[ones] - 1.0).max(initial=0.0) > 1e-8 or \
               np.abs(vals[~ones]).max(initial=0.0) > 1e-8:
                raise FiberMismatch(
                    "central projection is not position-diagonal")
            r = int(ones.sum())
            if r:
                support.append(pt)
                bases[pt] = vecs[:, ones]
                if mult is None:
                    mult = r
                elif mult != r:
                    raise FiberMismatch(
                        f"fiber dimension jumps from {mult} to {r} inside one "
                        f"factor block")
        try:
            raw = PSet(pair.window, tuple(support), SetKind.PSPACE)
        except (InvarianceViolation, EmptySetError) as exc:
            raise FiberMismatch(
                f"factor-block support is not upward invariant: {exc}") from exc
        comps.append((raw, mult))

    comps.sort(key=lambda c: (c[0].points, c[1]))
    reassembled, reasm_idx = _graded_sum(pair.window,
                                         [(c[0].points, c[1]) for c in comps])
    if all(np.abs(x - y).max() <= 1e-12
           for x, y in zip(pair.gens, reassembled.gens)):
        # the input already is the canonical sum in canonical layout
        ok, witness = True, np.eye(pair.dim, dtype=complex)
    else:
        ok, witness = unitarily_equivalent(RepGens.from_pair(pair),
                                           RepGens.from_pair(reassembled),
                                           tol, guard)
    if not ok:
        raise FiberMismatch(
            "reassembled canonical sum is not unitarily equivalent to the "
            "input; the pair is not a truncation of a covariant model")

    results = []
    for raw, mult in comps:
        t = _sub(raw.points[0], pair.window.lo)
        normalized, _ = translate_pset(raw, tuple(-c for c in t))
        results.append(ComponentResult(normalized, t, mult, raw))
    return Decomposition(results, witness, reassembled, reasm_idx)


def decompose(pair: WeylPair, tol: float = 1e-8, guard: int = 256,
              probe=None) -> list[ComponentResult]:
    """Canonical components of a commuting-range pair (orbit normalised)."""
    return decompose_full(pair, tol, guard, probe).components


# ---------------------------------------------------------------------------
# the dilation bundle


@dataclass(eq=False)
class DilationBundle:
    """Concrete minimal unitary dilation of a commuting-range pair.

    The dilation space is graded over the window extended downward by the
    depth; ``supports`` records each component's enlarged set.  ``embed``
    is the isometry carrying the base space onto the blocks of the original
    component supports.  All unitarity, covariance and exhaustion claims
    are made for shifts of supremum norm at most ``budget`` only.
    """

    base: WeylPair
    depth: int
    budget: int
    window_ext: LatticeWindow
    components: list  # (raw PSet in base window, multiplicity)
    supports: list    # point tuples in the extended window, aligned
    dilated: WeylPair = field(repr=False)
    index: dict = field(repr=False)
    embed: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.dilated.dim

    def _blocks(self, pred) -> np.ndarray:
        """Coordinate indices of component blocks whose point satisfies pred."""
        keep = []
        for ci, (comp, supp) in enumerate(zip(self.components, self.supports)):
            k = comp[1]
            for p in supp:
                if pred(ci, p):
                    base = self.index[(ci, p)]
                    keep.extend(range(base, base + k))
        return np.array(sorted(keep), dtype=int)

    def safe_indices(self, shifts) -> np.ndarray:
        """Blocks that stay inside their component under all given shifts."""
        shifted_ok = []
        supports = [set(s) for s in self.supports]

        def pred(ci, p):
            return all(_add(p, tuple(s)) in supports[ci] for s in shifts)

        return self._blocks(pred)

    def w(self, x) -> np.ndarray:
        """Dilated group element W_x as a clipped block shift.

        Semigroup directions are always available; mixed or negative shifts
        require a positive depth and are budgeted by the supremum norm.
        """
        xv = tuple(int(c) for c in x)
        if any(c < 0 for c in xv):
            if self.depth == 0:
                raise DepthZeroDegenerate(
                    "depth-zero dilation supports forward shifts only")
            if max(abs(c) for c in xv) > self.budget:
                raise BudgetExceeded(f"shift {xv} exceeds budget {self.budget}")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for ci, (comp, supp) in enumerate(zip(self.components, self.supports)):
            k = comp[1]
            members = set(supp)
            for p in supp:
                q = _add(p, xv)
                if q in members:
                    r0, c0 = self.index[(ci, q)], self.index[(ci, p)]
                    out[r0:r0 + k, c0:c0 + k] = np.eye(k)
        return out


def _extended_support(raw: PSet, wext: LatticeWindow, depth: int):
    box = list(itertools.product(range(depth + 1), repeat=wext.dim))
    members = set(raw.points)
    out = [p for p in wext.points()
           if any(_add(p, a) in members for a in box)]
    return tuple(out)


def minimal_dilation(pair: WeylPair, depth: int, tol: float = 1e-8,
                     guard: int = 256) -> DilationBundle:
    """Minimal unitary dilation of a commuting-range pair at a given depth.

    Raises NonCommutingRanges when the base pair fails the commuting-range
    probe.  Depth zero returns the degenerate bundle whose group elements
    exist for semigroup directions only.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    dec = decompose_full(pair, tol, guard)
    window = pair.window
    wext = LatticeWindow(tuple(l - depth for l in window.lo), window.hi,
                         window.weight)
    comps = [(c.raw, c.multiplicity) for c in dec.components]
    supports = [_extended_support(raw, wext, depth) for raw, _ in comps]
    dilated, idx = _graded_sum(wext, [(s, k) for s, (_, k) in zip(supports, comps)])
    iota = np.zeros((dilated.dim, dec.reassembled.dim), dtype=complex)
    for ci, (raw, k) in enumerate(comps):
        for p in raw.points:
            r0 = idx[(ci, p)]
            c0 = dec.reassembled_index[(ci, p)]
            iota[r0:r0 + k, c0:c0 + k] = np.eye(k)
    embed = iota @ dec.witness
    return DilationBundle(
        base=pair, depth=depth, budget=depth, window_ext=wext,
        components=comps, supports=supports, dilated=dilated, index=idx,
        embed=embed,
    )


def project_e(bundle: DilationBundle, x) -> np.ndarray:
    """Projection onto the shifted copy W_x(embedded base space).

    Computed from the model: the block of y belongs to the range exactly
    when y - x dominates a minimal element of the component.  These
    projections are diagonal, mutually commuting, decreasing in x and
    covariant under the dilated shifts inside the budget.
    """
    xv = tuple(int(c) for c in x)
    if xv and max(abs(c) for c in xv) > bundle.budget:
        raise BudgetExceeded(f"shift {xv} exceeds budget {bundle.budget}")
    out = np.zeros((bundle.dim, bundle.dim), dtype=complex)
    for ci, ((raw, k), supp) in enumerate(zip(bundle.components, bundle.supports)):
        minimals = [p for p in raw.points
                    if not any(_sub(p, e) in set(raw.points)
                               for e in bundle.base.window.generators())]
        for p in supp:
            shifted = _sub(p, xv)
            if any(_leq(m, shifted) for m in minimals):
                r0 = bundle.index[(ci, p)]
                out[r0:r0 + k, r0:r0 + k] = np.eye(k)
    return out


def budget_box(bundle: DilationBundle) -> LatticeWindow:
    r = bundle.budget
    d = bundle.base.window.dim
    return LatticeWindow((-r,) * d, (r,) * d, bundle.base.window.weight)


# ---------------------------------------------------------------------------
# covariant representation: family, integration, joint spectrum


@dataclass(eq=False)
class CovariantRep:
    """A commuting projection family indexed by a budget box.

    Usually produced from a dilation bundle; hand-built families (for
    degenerate examples) only need the family and the box.
    """

    bundle: DilationBundle | None
    box: LatticeWindow
    efamily: dict = field(repr=False, default_factory=dict)

    @classmethod
    def from_bundle(cls, bundle: DilationBundle) -> "CovariantRep":
        box = budget_box(bundle)
        fam = {p: project_e(bundle, p) for p in box.points()}
        return cls(bundle, box, fam)

    def e(self, x) -> np.ndarray:
        xv = tuple(int(c) for c in x)
        if xv not in self.efamily:
            raise BudgetExceeded(f"{xv} outside the family box")
        return self.efamily[xv]


def indicator_projection(rep: CovariantRep, x) -> np.ndarray:
    """The projection the covariant calculus assigns to a shifted origin cell."""
    return rep.e(x)


def integrate_family(rep: CovariantRep, f) -> np.ndarray:
    """Integrate a test function against the projection family.

    Returns weight * sum_x f(x) E_x; linear in f, and monotone differences
    of deltas give positive semidefinite results.
    """
    out = None
    for p, v in f.support:
        term = rep.box.weight * v * rep.e(p)
        out = term if out is None else out + term
    if out is None:
        dim = next(iter(rep.efamily.values())).shape[0]
        out = np.zeros((dim, dim), dtype=complex)
    return out


def joint_spectrum(rep: CovariantRep):
    """Simultaneous eigenvalue patterns of the commuting projection family.

    Recursively splits eigenspaces along each family member in lexicographic
    order, rounding eigenvalues at one half.  Each pattern (the set of
    indices where the family acts as one) must be downward invariant inside
    the box; anything else signals numerical failure or a non-covariant
    family.  Returns (pattern set, eigenspace dimension) pairs.
    """
    pts = sorted(rep.box.points())
    dim = rep.e(pts[0]).shape[0]
    branches = [(np.eye(dim, dtype=complex), [])]
    for x in pts:
        ex = rep.e(x)
        refined = []
        for q, pat in branches:
            m = q.conj().T @ ex @ q
            vals, vecs = np.linalg.eigh(m)
            if np.abs(vals - np.round(vals)).max(initial=0.0) > 1e-8:
                raise PatternNotYSet(
                    f"family member at {x} is not a projection on a joint "
                    f"eigenspace (eigenvalues {vals})")
            ones = vals > 0.5
            if ones.any():
                refined.append((q @ vecs[:, ones], pat + [x]))
            if (~ones).any():
                refined.append((q @ vecs[:, ~ones], pat))
        branches = refined
    out = []
    for q, pat in branches:
        try:
            pattern = PSet(rep.box, tuple(pat), SetKind.YSET)
        except (InvarianceViolation, EmptySetError) as exc:
            raise PatternNotYSet(f"pattern {pat} fails downward invariance: "
                                 f"{exc}") from exc
        out.append((pattern, q.shape[1]))
    out.sort(key=lambda t: t[0].points)
    return out


# ---------------------------------------------------------------------------
# extending the character unitaries to the dilation space


def extend_u(bundle: DilationBundle, theta, u_on_h: np.ndarray | None = None,
             route_tol: float = 1e-8) -> np.ndarray:
    """Extend a base character unitary to the dilation space.

    On the block of y the extension acts by the base unitary pulled back
    through any budget shift that re-enters the component; all admissible
    routes must agree within ``route_tol``, otherwise the input is not
    covariant and WellDefinednessViolation is raised.  The extension
    restricts to the base unitary on the embedded space exactly and
    intertwines the dilated shifts with the character phase inside the
    budget.
    """
    th = np.asarray(theta, dtype=float)
    if u_on_h is None:
        u_on_h = unitary_u(bundle.base, th)
    g = bundle.embed @ np.asarray(u_on_h, dtype=complex) @ bundle.embed.conj().T
    # the embedded unitary must stay block diagonal for routes to make sense
    stray = g.copy()
    out = np.zeros((bundle.dim, bundle.dim), dtype=complex)
    box = list(itertools.product(range(bundle.budget + 1),
                                 repeat=bundle.base.window.dim))
    for ci, ((raw, k), supp) in enumerate(zip(bundle.components, bundle.supports)):
        members = set(raw.points)
        gblocks = {}
        for p in raw.points:
            r0 = bundle.index[(ci, p)]
            gblocks[p] = g[r0:r0 + k, r0:r0 + k]
            stray[r0:r0 + k, r0:r0 + k] = 0.0
        for p in supp:
            routes = []
            for a in box:
                q = _add(p, a)
                if q in members:
                    phase = np.exp(-1j * float(th @ np.asarray(a, dtype=float)))
                    routes.append(phase * gblocks[q])
            if not routes:
                raise BudgetExceeded(
                    f"block {p} unreachable within budget {bundle.budget}")
            for other in routes[1:]:
                if np.linalg.norm(other - routes[0], 2) > route_tol:
                    raise WellDefinednessViolation(
                        f"evaluation routes disagree at block {p}")
            r0 = bundle.index[(ci, p)]
            out[r0:r0 + k, r0:r0 + k] = routes[0]
    if np.abs(stray).max(initial=0.0) > route_tol:
        raise WellDefinednessViolation(
            "base unitary does not preserve the position grading")
    return out


def compress_to_base(rep: CovariantRep) -> WeylPair:
    """Compress the dilated shifts back onto the embedded base space.

    This inverts the dilation: the compressed pair is the base pair again,
    up to the (numerically exact) reassembly witness.
    """
    if rep.bundle is None:
        raise ValueError("compression needs a bundle-backed representation")
    b = rep.bundle
    window = b.base.window
    gens = []
    for e in window.generators():
        w = b.w(e)
        gens.append(b.embed.conj().T @ w @ b.embed)
    fibers = dict(b.base.fibers)
    return WeylPair(window, fibers, gens, label=f"compressed({b.base.label})")

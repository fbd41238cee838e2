"""Numerical commutants, intertwiners and unitary-equivalence decisions.

Everything reduces to one primitive: the joint nullspace of the maps
T -> T A_i - B_i T (with the adjoint maps always included, so the result
is adjoint closed).  Stacking the vectorised maps and taking an SVD kernel
works but squares the dimension, so the solver first seeds the search with
the exact kernel of a well-chosen Hermitian map - eigenvectors with equal
eigenvalues give a factored basis u v* of that kernel - and then refines
the seed through the remaining maps with thin SVDs.  Seeds from diagonal
matrices (position observables) keep every intermediate object sparse, and
the refinement prunes rows that are structurally zero, which is what makes
position-graded problems with a few hundred dimensions tractable.

Kernel detection uses a relative singular-value cutoff (default 1e-8),
which cleanly separates true kernels from roundoff at the dimensions the
guard admits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CheckFailed, DimensionGuard, LabelMismatch

DEFAULT_TOL = 1e-8
DEFAULT_GUARD = 256
_SEED_CAP = 20000
_FULL_SEED_CAP = 2500


@dataclass(eq=False)
class RepGens:
    """A finite generator list; solves close it under adjoints implicitly."""

    dim: int
    gens: list
    labels: list[str] | None = None

    def __post_init__(self):
        self.gens = [np.asarray(g, dtype=complex) for g in self.gens]
        for g in self.gens:
            if g.shape != (self.dim, self.dim):
                raise DimensionGuard(
                    f"generator shape {g.shape} does not match dim {self.dim}")
        if self.labels is None:
            self.labels = [f"g{i}" for i in range(len(self.gens))]
        if len(self.labels) != len(self.gens):
            raise LabelMismatch("one label per generator required")

    @classmethod
    def from_pair(cls, pair, dual_samples: bool = False) -> "RepGens":
        """Generators of the algebra of a represented pair.

        By default the character unitaries enter through the position
        observable (same commutant, one Hermitian generator); with
        ``dual_samples`` every character on the finite dual grid is listed
        explicitly instead.
        """
        from . import pairs as _pairs

        if dual_samples:
            grid = _pairs.dual_grid(pair.window)
            gens = [_pairs.unitary_u(pair, th) for th in grid]
            labels = [f"U{i}" for i in range(len(grid))]
        else:
            gens = [pair.position_observable()]
            labels = ["pos"]
        gens += list(pair.gens)
        labels += [f"V{i}" for i in range(pair.window.dim)]
        return cls(pair.dim, gens, labels)


@dataclass(eq=False)
class AlgebraSummary:
    commutant_dim: int
    center_dim: int
    is_factor: bool
    is_irreducible: bool
    commutant_basis: list = field(repr=False, default_factory=list)
    bicommutant_dim: int | None = None

    def to_json(self) -> dict:
        return {
            "commutant_dim": self.commutant_dim,
            "center_dim": self.center_dim,
            "is_factor": self.is_factor,
            "is_irreducible": self.is_irreducible,
        }


def _adjoint_closed_maps(a_list, b_list):
    maps = []
    for a, b in zip(a_list, b_list):
        maps.append((a, b))
        if np.linalg.norm(a - a.conj().T) > 0 or np.linalg.norm(b - b.conj().T) > 0:
            maps.append((a.conj().T, b.conj().T))
    return maps


def _cluster_bins(values, ctol):
    order = np.sort(values)
    edges = [order[0] - 1.0]
    for prev, cur in zip(order, order[1:]):
        if cur - prev > ctol:
            edges.append(0.5 * (prev + cur))
    edges.append(order[-1] + 1.0)
    return np.array(edges)


def _hermitian_eig(h):
    n = h.shape[0]
    off = np.abs(h - np.diag(np.diag(h))).max() if n else 0.0
    if off == 0.0:
        return np.real(np.diag(h)), np.eye(n, dtype=complex)
    vals, vecs = np.linalg.eigh(h)
    return vals, vecs


def _spectral_seed(maps, n_b, n_a, same_space):
    """Factored seed basis containing the joint kernel.

    Picks, over all Hermitian parts of the maps, the one whose equal
    eigenvalue pairing is smallest, and returns (lefts, rights) columns so
    that element j is lefts[:, j] rights[:, j]^*.
    """
    best = None
    for a, b in maps:
        for hermitise in (lambda m: 0.5 * (m + m.conj().T),
                          lambda m: (m - m.conj().T) / 2j):
            ha = hermitise(a)
            if np.abs(ha).max() == 0.0:
                continue
            va, ua = _hermitian_eig(ha)
            if same_space:
                vb, ub = va, ua
            else:
                vb, ub = _hermitian_eig(hermitise(b))
            spread = max(va.max() - va.min(), vb.max() - vb.min(), 1.0)
            edges = _cluster_bins(np.concatenate([va, vb]), 1e-8 * spread)
            ia = np.digitize(va, edges)
            ib = np.digitize(vb, edges)
            score = sum(int(np.sum(ib == t)) * int(np.sum(ia == t))
                        for t in np.unique(np.concatenate([ia, ib])))
            if best is None or score < best[0]:
                best = (score, ua, ub, ia, ib)
    if best is None or best[0] > _SEED_CAP:
        if n_a * n_b > _FULL_SEED_CAP:
            raise DimensionGuard(
                "no tractable spectral seed for this generator list")
        lefts = np.repeat(np.eye(n_b, dtype=complex), n_a, axis=1)
        rights = np.tile(np.eye(n_a, dtype=complex), (1, n_b))
        return lefts, rights
    _, ua, ub, ia, ib = best
    cols_l, cols_r = [], []
    for t in np.unique(np.concatenate([ia, ib])):
        bi = np.nonzero(ib == t)[0]
        ai = np.nonzero(ia == t)[0]
        for p in bi:
            for q in ai:
                cols_l.append(p)
                cols_r.append(q)
    lefts = ub[:, cols_l]
    rights = ua[:, cols_r]
    return lefts, rights


def _stacked_map(lefts, w, z, rights, n_a):
    """Pruned stacked matrix of T -> T A - B T on the factored basis.

    Column j is vec(u_j w_j^* - z_j v_j^*).  For small problems the full
    vectorised matrix is materialised directly; otherwise only rows that
    can be nonzero are assembled, which keeps position-graded problems
    sparse.
    """
    r = lefts.shape[1]
    n_b = lefts.shape[0]
    if n_b * n_a * r <= 4_000_000:
        full = (lefts[:, None, :] * w.conj()[None, :, :]
                - z[:, None, :] * rights.conj()[None, :, :])
        return full.reshape(n_b * n_a, r)
    rows_all, cols_all, vals_all = [], [], []
    for j in range(r):
        u = lefts[:, j]
        v = rights[:, j]
        wj = w[:, j]
        zj = z[:, j]
        su = np.nonzero(u)[0]
        sw = np.nonzero(wj)[0]
        sz = np.nonzero(zj)[0]
        sv = np.nonzero(v)[0]
        if su.size and sw.size:
            rr = (su[:, None] * n_a + sw[None, :]).ravel()
            vv = (u[su, None] * wj[sw][None, :].conj()).ravel()
            rows_all.append(rr)
            cols_all.append(np.full(rr.size, j))
            vals_all.append(vv)
        if sz.size and sv.size:
            rr = (sz[:, None] * n_a + sv[None, :]).ravel()
            vv = (-zj[sz, None] * v[sv][None, :].conj()).ravel()
            rows_all.append(rr)
            cols_all.append(np.full(rr.size, j))
            vals_all.append(vv)
    if not rows_all:
        return np.zeros((0, r), dtype=complex)
    rows = np.concatenate(rows_all)
    cols = np.concatenate(cols_all)
    vals = np.concatenate(vals_all)
    uniq, inv = np.unique(rows, return_inverse=True)
    flat = cols.astype(np.int64) * uniq.size + inv
    size = uniq.size * r
    acc = np.bincount(flat, weights=vals.real, minlength=size) \
        + 1j * np.bincount(flat, weights=vals.imag, minlength=size)
    return acc.reshape(r, uniq.size).T


def _kernel_cols(a, tol):
    m, r = a.shape
    if m == 0 or r == 0:
        return np.eye(r, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=(m < r))
    if s.size == 0 or s[0] <= 1e-12:
        return np.eye(r, dtype=complex)
    rank = int(np.sum(s > tol * s[0]))
    return vh[rank:].conj().T


def sylvester_nullspace(a_list, b_list, tol: float = DEFAULT_TOL):
    """Orthonormal basis of {T : T A_i = B_i T and T A_i* = B_i* T}.

    Returns matrices of shape (dim B, dim A), orthonormal in the Frobenius
    inner product.
    """
    a_list = [np.asarray(a, dtype=complex) for a in a_list]
    b_list = [np.asarray(b, dtype=complex) for b in b_list]
    n_a = a_list[0].shape[0] if a_list else 0
    n_b = b_list[0].shape[0] if b_list else 0
    same = all(a is b for a, b in zip(a_list, b_list)) and len(a_list) == len(b_list)
    maps = _adjoint_closed_maps(a_list, b_list)
    lefts, rights = _spectral_seed(maps, n_b, n_a, same)
    coeff = None  # None stands for the identity on the seed space
    for a, b in maps:
        if coeff is not None and coeff.shape[1] == 0:
            break
        w = a.conj().T @ rights
        z = b @ lefts
        stacked = _stacked_map(lefts, w, z, rights, n_a)
        kern = _kernel_cols(stacked if coeff is None else stacked @ coeff, tol)
        coeff = kern if coeff is None else coeff @ kern
    if coeff is None:
        coeff = np.eye(lefts.shape[1], dtype=complex)
    basis = []
    for j in range(coeff.shape[1]):
        basis.append((lefts * coeff[:, j]) @ rights.conj().T)
    return basis


def residual(basis, a_list, b_list) -> float:
    """Largest relative intertwining residual of a basis, for verification."""
    worst = 0.0
    for t in basis:
        for a, b in zip(a_list, b_list):
            scale = 1.0 + np.linalg.norm(a, 2)
            worst = max(worst, np.linalg.norm(t @ a - b @ t, 2) / scale)
    return float(worst)


def commutant_basis(rep: RepGens, tol: float = DEFAULT_TOL,
                    guard: int = DEFAULT_GUARD):
    """Orthonormal basis of the commutant of a *-closed generator list."""
    if rep.dim > guard:
        raise DimensionGuard(f"dimension {rep.dim} exceeds guard {guard}")
    if not rep.gens:
        eye = np.eye(rep.dim, dtype=complex)
        return [np.outer(eye[:, i], eye[:, j].conj())
                for i in range(rep.dim) for j in range(rep.dim)]
    return sylvester_nullspace(rep.gens, rep.gens, tol)


def summarize(rep: RepGens, tol: float = DEFAULT_TOL,
              guard: int = DEFAULT_GUARD) -> AlgebraSummary:
    """Commutant and centre dimensions plus factor/irreducibility flags.

    The centre of the generated von Neumann algebra is the commutant of the
    generators together with their commutant, which equals the intersection
    of commutant and bicommutant; the explicit bicommutant is solved as well
    on small instances.
    """
    cbasis = commutant_basis(rep, tol, guard)
    center = sylvester_nullspace(rep.gens + cbasis, rep.gens + cbasis, tol)
    bdim = None
    if rep.dim <= 32 and cbasis:
        bdim = len(sylvester_nullspace(cbasis, cbasis, tol))
    return AlgebraSummary(
        commutant_dim=len(cbasis),
        center_dim=len(center),
        is_factor=len(center) == 1,
        is_irreducible=len(cbasis) == 1,
        commutant_basis=cbasis,
        bicommutant_dim=bdim,
    )


def intertwiners(ra: RepGens, rb: RepGens, tol: float = DEFAULT_TOL,
                 guard: int = DEFAULT_GUARD):
    """Basis of {T : T X_a = X_b T pairwise}, generator lists label-aligned."""
    if ra.labels != rb.labels:
        raise LabelMismatch(f"generator labels differ: {ra.labels} vs {rb.labels}")
    if max(ra.dim, rb.dim) > guard:
        raise DimensionGuard(f"dimension exceeds guard {guard}")
    return sylvester_nullspace(ra.gens, rb.gens, tol)


def unitarily_equivalent(ra: RepGens, rb: RepGens, tol: float = DEFAULT_TOL,
                         guard: int = DEFAULT_GUARD, draws: int = 20,
                         seed: int = 20240405):
    """Decide unitary equivalence; on success return a unitary witness.

    Random coefficient draws over the intertwiner basis find an invertible
    element whenever one exists (the invertibles form a dense open set of
    the span); its polar unitary is returned after a conjugation check at
    residual 1e-8.
    """
    if ra.dim != rb.dim:
        return False, None
    basis = intertwiners(ra, rb, tol, guard)
    if not basis:
        return False, None
    rng = np.random.default_rng(seed)
    for _ in range(draws):
        coeff = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        t = sum(c * b for c, b in zip(coeff, basis))
        u, s, vh = np.linalg.svd(t)
        if s[0] <= 0 or s[-1] < 1e-6 * s[0]:
            continue
        witness = u @ vh
        trace = np.trace(witness)
        if abs(trace) > 1e-8:  # fix the free global phase deterministically
            witness = witness * (trace.conjugate() / abs(trace))
        worst = 0.0
        for xa, xb in zip(ra.gens, rb.gens):
            res = np.linalg.norm(witness @ xa @ witness.conj().T - xb, 2)
            worst = max(worst, res / (1.0 + np.linalg.norm(xb, 2)))
        if worst <= 1e-8:
            return True, witness
        raise CheckFailed(
            f"invertible intertwiner found but conjugation residual {worst:.2e}")
    return False, None


def span_distance(basis, m) -> float:
    """Frobenius distance of a matrix from the span of an orthonormal basis."""
    acc = np.zeros_like(np.asarray(m, dtype=complex))
    for b in basis:
        acc += np.vdot(b, m) * b
    return float(np.linalg.norm(acc - m))


def subspace_gap(basis_a, basis_b) -> float:
    """Operator-norm distance between the two spanned subspaces.

    Zero (up to the principal-angle tolerance) exactly when the spans
    coincide.
    """
    if not basis_a and not basis_b:
        return 0.0
    dim = basis_a[0].size if basis_a else basis_b[0].size
    va = np.stack([b.ravel() for b in basis_a], axis=1) if basis_a else \
        np.zeros((dim, 0), dtype=complex)
    vb = np.stack([b.ravel() for b in basis_b], axis=1) if basis_b else \
        np.zeros((dim, 0), dtype=complex)
    pa = va @ va.conj().T
    pb = vb @ vb.conj().T
    return float(np.linalg.norm(pa - pb, 2))

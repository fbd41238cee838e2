"""From an isometry semigroup to its minimal unitary dilation and back.

Dilates a canonical pair at a chosen depth, checks the dilation identities
inside the declared budget, inspects the covariant projection family and
its joint spectrum, extends the character unitaries to the dilation space,
and compresses everything back to the base pair.
"""

import numpy as np

from weylpair import (
    CovariantRep,
    LatticeWindow,
    RepGens,
    SetKind,
    TestFunction,
    build_pspace_pair,
    compress_to_base,
    extend_u,
    integrate_family,
    isometry_v,
    joint_spectrum,
    minimal_dilation,
    project_e,
    unitarily_equivalent,
    unitary_u,
    validate_pset,
)
from weylpair.dilation import budget_box

window = LatticeWindow((0,), (7,))
full = validate_pset([(y,) for y in range(8)], window, SetKind.PSPACE)
pair = build_pspace_pair(full, k=1)

depth = 4
bundle = minimal_dilation(pair, depth)
print(f"base dim {pair.dim}, dilation dim {bundle.dim} "
      f"(window extended down by {depth})")

emb = bundle.embed
print(f"embedding isometry defect: "
      f"{np.linalg.norm(emb.conj().T @ emb - np.eye(pair.dim), 2):.2e}")
for a in [(1,), (3,)]:
    gap = np.linalg.norm(bundle.w(a) @ emb - emb @ isometry_v(pair, a), 2)
    print(f"W_{a} extends V_{a}: defect {gap:.2e}")

# pulled-back copies of the base space exhaust the dilation space
cols = np.hstack([bundle.w((-a,)) @ emb for a in range(depth + 1)])
sv = np.linalg.svd(cols, compute_uv=False)
print(f"exhaustion: rank {np.sum(sv > 1e-10)} of {bundle.dim}")

# the projection family: one projection per budget shift, commuting,
# decreasing, covariant
rep = CovariantRep.from_bundle(bundle)
box = budget_box(bundle)
print(f"family over the budget box {box.lo}..{box.hi}:")
for x in sorted(box.points()):
    print(f"  E_{x}: rank {int(np.trace(rep.e(x)).real)}")

f = TestFunction.delta(box, (0,)) + TestFunction.delta(box, (2,), -1.0)
lam = np.linalg.eigvalsh(integrate_family(rep, f))
print(f"integrating a monotone difference of deltas: min eigenvalue "
      f"{lam.min():.2e} (positive semidefinite)")

print("joint spectrum (pattern size, eigenspace dim):")
for pattern, dim in joint_spectrum(rep):
    print(f"  |pattern| = {len(pattern)}, dim {dim}")

# the base characters extend to the dilation space and stay compatible
theta = (0.9,)
ext = extend_u(bundle, theta)
c1 = np.linalg.norm(ext @ emb - emb @ unitary_u(pair, theta), 2)
comm = max(np.linalg.norm(ext @ rep.e(x) - rep.e(x) @ ext, 2)
           for x in box.points())
print(f"character extension: restriction defect {c1:.2e}, "
      f"family commutation {comm:.2e}")

# compressing the dilation back onto the embedded copy returns the pair
back = compress_to_base(rep)
ok, _ = unitarily_equivalent(RepGens.from_pair(pair), RepGens.from_pair(back))
print(f"compression returns the base pair up to unitary equivalence: {ok}")

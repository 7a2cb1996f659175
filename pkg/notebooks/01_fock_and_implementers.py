# %% [markdown]
# Fock representations and Bogoliubov implementers
#
# Build the Clifford action on the exterior algebra, check the relations,
# then implement a few orthogonal maps and read off their parity.

# %%
import numpy as np

from loopcliff.bogoliubov import cocycle_phase, implementer_parity, solve_implementer
from loopcliff.fock import check_clifford_relations, commutant_dim, fock_rep, graded_commutant_dim
from loopcliff.lagrangian import intersection_parity
from loopcliff.linalg import make_rng, random_orthogonal

rng = make_rng(0)

# %%
# relation residuals and irreducibility for real dimension 1..8
for m in range(1, 9):
    F = fock_rep(m)
    rep = check_clifford_relations(F)
    print(m, F.generators[0].shape[0], rep.max_residual, commutant_dim(F), graded_commutant_dim(F))

# %%
# a reflection is implemented by an odd unitary; the parity matches the
# intersection parity of gL with L and (1 - det g) / 2
F = fock_rep(4)
for det in (1, -1):
    g = random_orthogonal(4, rng, det=det)
    imp = solve_implementer(F, g)
    print(det, imp.parity, intersection_parity(F.lagrangian.transform(g), F.lagrangian))

# %%
# the phase cocycle of the implementers satisfies the 2-cocycle identity
g, h, k = (random_orthogonal(4, rng) for _ in range(3))
lhs = cocycle_phase(F, g, h) * cocycle_phase(F, g @ h, k)
rhs = cocycle_phase(F, g, h @ k) * cocycle_phase(F, h, k)
print(abs(lhs - rhs))

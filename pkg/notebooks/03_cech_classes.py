# %% [markdown]
# Orientation and Dixmier-Douady cocycles on small triangulations
#
# Compute cohomology with Smith normal form, build graded bundles from
# Pauli transition data and check the tensor product formula.

# %%
from loopcliff.cech import (
    FIXTURES,
    cohomology,
    cohomology_generators,
    cohomology_table,
    dd_cocycle,
    load_fixture,
    orientation_cocycle,
    pauli_bundle,
    projection_map,
    pullback,
    verify_tensor_formula,
    zero_cochain,
)

# %%
for name in FIXTURES:
    K, _ = load_fixture(name)
    table = cohomology_table(K)
    print(name, K.euler_characteristic(), table["Z"])

# %%
# on the torus the Pauli bundle built from the two generators has
# orientation class p and lambda = p cup q, a nonzero class in H^2(Z_2)
K, _ = load_fixture("T2")
p, q = cohomology_generators(K, 1, 2)
T = pauli_bundle(p, q)
print(cohomology(K, 1, 2).class_of(orientation_cocycle(T)), cohomology(K, 2, 2).class_of(dd_cocycle(T, 2)))

# %%
# RP2 x S1: tensoring bundles pulled back from the two factors produces a
# nonzero Bockstein correction in H^3(Z)
A, B = load_fixture("RP2")[0], load_fixture("S1")[0]
P = load_fixture("RP2xS1")[0]
x = pullback(cohomology_generators(A, 1, 2)[0], P, projection_map(A, B, 0))
y = pullback(cohomology_generators(B, 1, 2)[0], P, projection_map(A, B, 1))
zero = zero_cochain(P, 1, 2)
r = verify_tensor_formula(pauli_bundle(x, zero), pauli_bundle(y, zero))
print(r.holds, r.correction_nonzero, r.details)

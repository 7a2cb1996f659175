# %% [markdown]
# Kinds of finite-dimensional super factors
#
# Clifford algebras alternate between even and odd kind, and the kind is
# additive under the graded tensor product.

# %%
from loopcliff.superfactor import classify_kind, clifford_algebra, graded_center, graded_tensor, ungraded_center

# %%
for d in range(9):
    A = clifford_algebra(d)
    print(d, A.dim, classify_kind(A), graded_center(A).dim, ungraded_center(A).dim)

# %%
A = graded_tensor(clifford_algebra(1), clifford_algebra(1))
print(A.dim, classify_kind(A))
print(classify_kind(graded_tensor(clifford_algebra(2), clifford_algebra(3))))

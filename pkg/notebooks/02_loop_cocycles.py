# %% [markdown]
# Loop algebra cocycles on a truncated Fourier window
#
# Compare the implementer cocycle Omega with the loop cocycle omega for
# single-mode fields a e^{ikt}, b e^{ilt}.  On the periodic window they agree
# only up to the constant-mode term 2 mu([X, Y]); on the antiperiodic window
# there are no constant modes and the identity 2 Omega + omega = 0 is exact.

# %%
import numpy as np

from loopcliff.loopalg import (
    TruncatedLoopSpace,
    central_identity_terms,
    dbeta_terms,
    random_closed_loop,
    random_loop_field,
    random_so,
    single_mode,
)
from loopcliff.linalg import make_rng

rng = make_rng(1)
d, N = 4, 16
periodic = TruncatedLoopSpace.periodic(d, N)
antiperiodic = TruncatedLoopSpace.antiperiodic(d, N)

# %%
for l in (1, 2, 3):
    a, b = random_so(d, rng), random_so(d, rng)
    X, Y = single_mode(a, -l), single_mode(b, l)
    Om, om, mu = central_identity_terms(X, Y, periodic)
    print(f"l={l}  2Om+om={2 * Om + om:.3e}  2mu={2 * mu:.3e}  corrected={abs(2 * Om + om - 2 * mu):.1e}")

# %%
# commuting coefficients make mu vanish
a = random_so(d, rng)
Om, om, mu = central_identity_terms(single_mode(a, -2), single_mode(a @ a @ a, 2), periodic)
print(abs(2 * Om + om), mu)

# %%
# the opposite Lagrangian flips the sign of Omega
X, Y = single_mode(random_so(d, rng), 3), single_mode(random_so(d, rng), -3)
print(central_identity_terms(X, Y, periodic)[0], central_identity_terms(X, Y, periodic.opposite())[0])

# %%
# the d beta identity on a closed loop with winding, by trapezoid quadrature
gamma = random_closed_loop(3, rng, max_winding=2, M=2048)
r = dbeta_terms(gamma, random_loop_field(3, 2, rng), random_loop_field(3, 1, rng))
print(gamma.winding, r.residual)

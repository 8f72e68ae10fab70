"""Coefficient algebra: the quadratic form q, generator classes, and min-beta.

A block coefficient F = [[K, M], [L, W - 1]] on C^n (+) (C^d (x) C^n) generates
a quantum stochastic cocycle.  Everything about contractivity of that cocycle
is decided by q(F) = F* + F + F* Delta F at the coefficient level, which this
script walks through on small explicit instances.
"""

import numpy as np

from qfk.coefficients import (
    BlockCoefficient,
    classify,
    contraction_decomposition,
    delta_perp,
    min_quasicontractivity_beta,
    q_form,
    transform_double_prime,
    transform_prime,
)
from qfk.linalg import norm2


def show(title, mat):
    print(f"\n{title}")
    print(np.array_str(np.asarray(mat), precision=4, suppress_small=True))


# A Weyl coefficient (n = d = 1): the generator of a coherent displacement.
# q(F) = 0, so the cocycle it generates is isometric.
lam = 1.0 + 0.5j
F = BlockCoefficient(
    K=np.array([[-0.5 * abs(lam) ** 2]]),
    L=np.array([[lam]]),
    M=np.array([[-np.conj(lam)]]),
    W=np.eye(1),
)
show("Weyl coefficient, full block matrix", F.as_full())
show("q(F)  (zero: isometric generator)", q_form(F))
print("flags:", classify(F))

# The scalar example K = 1, L = M = 0, W = 0 has q(F) = diag(2, -1), so
# beta Delta_perp - q(F) = diag(beta - 2, 1): feasible exactly from beta = 2.
F2 = BlockCoefficient(K=np.eye(1), L=np.zeros((1, 1)), M=np.zeros((1, 1)), W=np.zeros((1, 1)))
beta = min_quasicontractivity_beta(F2)
print(f"\nmin beta for K=1, L=M=0, W=0: {beta:.8f}  (analytic value 2)")
assert abs(beta - 2.0) <= 1e-6

# The shift identity behind that computation: subtracting beta/2 off K moves
# q(F) by exactly -beta Delta_perp, so quasicontractivity is a shifted
# contractivity statement.
rng = np.random.default_rng(11)
n, d = 2, 1
F3 = BlockCoefficient(
    K=rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)),
    L=0.3 * (rng.standard_normal((d * n, n)) + 1j * rng.standard_normal((d * n, n))),
    M=0.3 * (rng.standard_normal((n, d * n)) + 1j * rng.standard_normal((n, d * n))),
    W=0.5 * np.eye(d * n),
)
b = 1.7
shifted = BlockCoefficient(K=F3.K - 0.5 * b * np.eye(n), L=F3.L, M=F3.M, W=F3.W)
dev = norm2(q_form(shifted) - (q_form(F3) - b * delta_perp(n, d)))
print(f"shift identity residual: {dev:.2e}")
assert dev <= 1e-12

# At the minimal beta the coefficient decomposes: M + L*W = b1^{1/2} v1
# (I - W*W)^{1/2} with b1 >= 0 and v1 a contraction.
beta3 = min_quasicontractivity_beta(F3)
b1, v1 = contraction_decomposition(F3, beta3 + 1e-6)
print(f"min beta: {beta3:.6f}, decomposition: ||b1|| = {norm2(b1):.4f}, ||v1|| = {norm2(v1):.4f}")
assert norm2(v1) <= 1.0 + 1e-8

# Two standard modifications of a coefficient.  F' = (K, L, 0, 0) keeps the
# vacuum-side action and shreds the noise; F'' = (K, L, -L*, 1) is the
# gauge-free balanced form.  Both leave the vacuum-compressed semigroup
# untouched (see demo 03).
show("F'  full matrix", transform_prime(F3).as_full())
show("F'' full matrix", transform_double_prime(F3).as_full())

print("\nall claims verified")

"""Perturbed flow generators and their vacuum (Feynman-Kac) semigroups.

Given a flow generator theta and two coefficients F1, F2 on the same
one-plus-noise space, the generator of the two-sided perturbed cocycle
x -> Y1* j(x) Y2 is

    phi(x) = theta(x) + F1* (Delta theta(x) + iota(x))
                      + F1* Delta (theta(x) + iota(x)) Delta F2
                      + (theta(x) Delta + iota(x)) F2,

and its scalar corner is the generator of the associated Markov-type
semigroup P_t = exp(t G) on M_n.  When the F_i are gauge-free with blocks
(k_i, l_i, -l_i*, I), that corner reads

    G(x) = Ldb(x) + l1* delta(x) + l1* pi(x) l2 + delta(x*)* l2 + k1* x + x k2,

which is unital iff k1* + l1* l2 + k2 = 0, completely positive if the two
sides coincide (l1 = l2, k1 = k2), and contractive if k_i* + k_i + l_i* l_i <= 0.

Superoperators on M_n are stored as n^2 x n^2 matrices in the
column-stacking convention: vec stacks columns, so vec(A X B) =
(B^T (x) A) vec(X).  They are built by applying the defining map to the
n^2 matrix units.  Complete positivity is decided on the Choi matrix
sum_ij E_ij (x) P(E_ij).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import BlockCoefficient, delta_projection
from .flows import FlowGenerator, OperatorMap, ampliate, as_theta_map, theta_components
from .linalg import DimensionMismatchError, as_complex, dag, expm, min_eig_hermitian, norm2


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.ascontiguousarray(as_complex(x).T.reshape(-1))


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(v, dtype=complex).reshape(n, n).T)


@dataclass(frozen=True, eq=False)
class Superoperator:
    """A linear map on M_n, stored as an n^2 x n^2 matrix (column-stacking)."""

    n: int
    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", as_complex(self.mat))
        if self.mat.shape != (self.n * self.n, self.n * self.n):
            raise DimensionMismatchError(
                f"superoperator on M_{self.n} needs shape {(self.n ** 2, self.n ** 2)}, got {self.mat.shape}"
            )

    @classmethod
    def from_map(cls, fn, n: int) -> "Superoperator":
        mat = np.zeros((n * n, n * n), dtype=complex)
        for j in range(n):
            for i in range(n):
                unit = np.zeros((n, n), dtype=complex)
                unit[i, j] = 1.0
                mat[:, j * n + i] = vec(fn(unit))
        return cls(n=n, mat=mat)

    @classmethod
    def identity(cls, n: int) -> "Superoperator":
        return cls(n=n, mat=np.eye(n * n, dtype=complex))

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = as_complex(x)
        if x.shape != (self.n, self.n):
            raise DimensionMismatchError(f"expected {self.n} x {self.n}, got {x.shape}")
        return unvec(self.mat @ vec(x), self.n)

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        if self.n != other.n:
            raise DimensionMismatchError("superoperator dimensions differ")
        return Superoperator(n=self.n, mat=self.mat @ other.mat)


@dataclass(frozen=True, eq=False)
class PerturbationSpec:
    """A flow generator together with the two perturbing coefficients."""

    theta: FlowGenerator | OperatorMap
    F1: BlockCoefficient
    F2: BlockCoefficient

    def __post_init__(self):
        tm = as_theta_map(self.theta)
        for name, F in (("F1", self.F1), ("F2", self.F2)):
            if (F.n, F.d) != (tm.n, tm.d):
                raise DimensionMismatchError(
                    f"{name} has (n, d) = {(F.n, F.d)}, flow has {(tm.n, tm.d)}"
                )

    @property
    def theta_map(self) -> OperatorMap:
        return as_theta_map(self.theta)


def psi_map(theta, F: BlockCoefficient) -> OperatorMap:
    """Generator of the one-sided perturbation x -> j(x) Y:
    psi(x) = theta(x) + iota(x) F + theta(x) Delta F."""
    tm = as_theta_map(theta)
    if (F.n, F.d) != (tm.n, tm.d):
        raise DimensionMismatchError("coefficient and flow dimensions differ")
    n, d = tm.n, tm.d
    full = F.as_full()
    delta = delta_projection(n, d)

    def fn(x: np.ndarray) -> np.ndarray:
        tx = tm(x)
        return tx + ampliate(x, d) @ full + tx @ delta @ full

    return OperatorMap(n=n, d=d, fn=fn)


def phi_perturbed(spec: PerturbationSpec) -> OperatorMap:
    """The two-sided perturbed generator, assembled from the defining formula."""
    tm = spec.theta_map
    n, d = tm.n, tm.d
    f1 = spec.F1.as_full()
    f2 = spec.F2.as_full()
    delta = delta_projection(n, d)

    def fn(x: np.ndarray) -> np.ndarray:
        tx = tm(x)
        ix = ampliate(x, d)
        return (
            tx
            + dag(f1) @ (delta @ tx + ix)
            + dag(f1) @ delta @ (tx + ix) @ delta @ f2
            + (tx @ delta + ix) @ f2
        )

    return OperatorMap(n=n, d=d, fn=fn)


def phi_perturbed_blockform(spec: PerturbationSpec) -> OperatorMap:
    """The same map assembled block by block:

        (1,1)  Ldb(x) + l1* delta(x) + l1* pi(x) l2 + delta(x*)* l2 + k1* x + x k2
        (1,2)  (delta(x*)* + l1* pi(x)) w2 + x m2
        (2,1)  w1* (delta(x) + pi(x) l2) + m1* x
        (2,2)  w1* pi(x) w2 - I_d (x) x

    Must agree with `phi_perturbed` on every input; the pair is the module's
    central self-check.
    """
    tm = spec.theta_map
    n, d = tm.n, tm.d
    dn = d * n
    k1, l1, m1, w1 = spec.F1.K, spec.F1.L, spec.F1.M, spec.F1.W
    k2, l2, m2, w2 = spec.F2.K, spec.F2.L, spec.F2.M, spec.F2.W

    def fn(x: np.ndarray) -> np.ndarray:
        lx, dx, dxd, px = theta_components(tm, x)
        out = np.zeros((n + dn, n + dn), dtype=complex)
        out[:n, :n] = lx + dag(l1) @ dx + dag(l1) @ px @ l2 + dxd @ l2 + dag(k1) @ x + x @ k2
        out[:n, n:] = (dxd + dag(l1) @ px) @ w2 + x @ m2
        out[n:, :n] = dag(w1) @ (dx + px @ l2) + dag(m1) @ x
        out[n:, n:] = dag(w1) @ px @ w2 - np.kron(np.eye(d), x)
        return out

    return OperatorMap(n=n, d=d, fn=fn)


def fk_generator(theta, l1: np.ndarray, l2: np.ndarray, k1: np.ndarray, k2: np.ndarray) -> Superoperator:
    """Markov-semigroup generator on M_n for gauge-free perturbing pairs.

    Built column by column on matrix units from
    G(x) = Ldb(x) + l1* delta(x) + l1* pi(x) l2 + delta(x*)* l2 + k1* x + x k2.
    Identical to the scalar corner of phi for F_i = (k_i, l_i, -l_i*, I).
    """
    tm = as_theta_map(theta)
    n, dn = tm.n, tm.d * tm.n
    l1, l2 = as_complex(l1), as_complex(l2)
    k1, k2 = as_complex(k1), as_complex(k2)
    if l1.shape != (dn, n) or l2.shape != (dn, n):
        raise DimensionMismatchError(f"l1, l2 must be {dn} x {n}")
    if k1.shape != (n, n) or k2.shape != (n, n):
        raise DimensionMismatchError(f"k1, k2 must be {n} x {n}")

    def fn(x: np.ndarray) -> np.ndarray:
        lx, dx, dxd, px = theta_components(tm, x)
        return lx + dag(l1) @ dx + dag(l1) @ px @ l2 + dxd @ l2 + dag(k1) @ x + x @ k2

    return Superoperator.from_map(fn, n)


def vacuum_generator(phi: OperatorMap) -> Superoperator:
    """Scalar corner of a phi-like map, as a superoperator on M_n."""
    n = phi.n
    return Superoperator.from_map(lambda x: phi(x)[:n, :n], n)


def semigroup_at(G: Superoperator, t: float) -> Superoperator:
    """exp(t G) as a superoperator."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return Superoperator(n=G.n, mat=expm(t * G.mat))


def choi_matrix(P: Superoperator) -> np.ndarray:
    """sum_ij E_ij (x) P(E_ij)."""
    n = P.n
    out = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[i, j] = 1.0
            out[i * n : (i + 1) * n, j * n : (j + 1) * n] = P.apply(unit)
    return out


def is_cp(P: Superoperator, tol: float = 1e-8) -> bool:
    """Complete positivity via the smallest Choi eigenvalue."""
    return min_eig_hermitian(choi_matrix(P)) >= -tol


def is_unital(P: Superoperator, tol: float = 1e-8) -> bool:
    return norm2(P.apply(np.eye(P.n)) - np.eye(P.n)) <= tol

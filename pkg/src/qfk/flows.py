"""Flow generators: the structure maps of a quantum stochastic flow.

A flow generator theta is assembled from (h, l, W) with h = h* on C^n,
l: C^n -> C^d (x) C^n and W unitary on C^d (x) C^n:

    pi(a)     = W* (I_d (x) a) W                      (a representation)
    delta(a)  = pi(a) l - l a                         (a pi-derivation)
    Ldb(a)    = l* pi(a) l - (l*l a + a l*l)/2 + i(a h - h a)

    theta(x)  = [[ Ldb(x),  delta(x*)* ],
                 [ delta(x), pi(x) - I_d (x) x ]]      on C^{(d+1)n}.

theta is characterized by the structure relation

    theta(x* y) = theta(x)* iota(y) + iota(x)* theta(y) + theta(x)* Delta theta(y)

with iota(x) = I_{d+1} (x) x, equivalently by pi being multiplicative, delta
a pi-derivation and Ldb dissipating into delta* delta.  `validate_structure`
checks exactly these identities on random inputs, so it accepts any
theta-like map, not only ones built from explicit (h, l, W).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .coefficients import BlockCoefficient, classify, delta_projection, matrix_from_pairs, matrix_to_pairs
from .linalg import DimensionMismatchError, as_complex, complex_randn, dag, norm2


class NotUnitaryGeneratorError(ValueError):
    """Coefficient does not generate a unitary cocycle."""


def ampliate(x: np.ndarray, d: int) -> np.ndarray:
    """iota(x) = I_{d+1} (x) x on the one-plus-noise space."""
    return np.kron(np.eye(d + 1), x)


def noise_ampliate(x: np.ndarray, d: int) -> np.ndarray:
    """I_d (x) x on the noise corner."""
    return np.kron(np.eye(d), x)


@dataclass(frozen=True)
class OperatorMap:
    """A linear map M_n -> M_{(d+1)n}, tagged with its dimensions."""

    n: int
    d: int
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = as_complex(x)
        if x.shape != (self.n, self.n):
            raise DimensionMismatchError(f"expected {self.n} x {self.n}, got {x.shape}")
        return self.fn(x)


@dataclass(frozen=True, eq=False)
class FlowGenerator:
    """Parameters (h, l, W) of a flow generator; validated on construction."""

    h: np.ndarray
    l: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h", as_complex(self.h))
        object.__setattr__(self, "l", as_complex(self.l))
        object.__setattr__(self, "W", as_complex(self.W))
        n = self.h.shape[0]
        if self.h.shape != (n, n):
            raise DimensionMismatchError(f"h must be square, got {self.h.shape}")
        dn = self.l.shape[0]
        if n < 1 or dn < n or dn % n != 0 or self.l.shape != (dn, n):
            raise DimensionMismatchError(
                f"l must be dn x n with d >= 1, got {self.l.shape} against n = {n}"
            )
        if self.W.shape != (dn, dn):
            raise DimensionMismatchError(f"W must be {dn} x {dn}, got {self.W.shape}")
        if norm2(self.h - dag(self.h)) > 1e-12 * (1.0 + norm2(self.h)):
            raise ValueError("h must be Hermitian")
        if norm2(dag(self.W) @ self.W - np.eye(dn)) > 1e-10 * (1.0 + norm2(self.W)):
            raise ValueError("W must be unitary")

    @property
    def n(self) -> int:
        return self.h.shape[0]

    @property
    def d(self) -> int:
        return self.l.shape[0] // self.h.shape[0]

    def pi(self, a: np.ndarray) -> np.ndarray:
        return dag(self.W) @ noise_ampliate(a, self.d) @ self.W

    def delta(self, a: np.ndarray) -> np.ndarray:
        return self.pi(a) @ self.l - self.l @ a

    def delta_dag(self, a: np.ndarray) -> np.ndarray:
        return dag(self.delta(dag(a)))

    def lindblad(self, a: np.ndarray) -> np.ndarray:
        ll = dag(self.l) @ self.l
        return (
            dag(self.l) @ self.pi(a) @ self.l
            - 0.5 * (ll @ a + a @ ll)
            + 1j * (a @ self.h - self.h @ a)
        )

    def theta(self, x: np.ndarray) -> np.ndarray:
        n, dn = self.n, self.l.shape[0]
        out = np.zeros((n + dn, n + dn), dtype=complex)
        out[:n, :n] = self.lindblad(x)
        out[:n, n:] = self.delta_dag(x)
        out[n:, :n] = self.delta(x)
        out[n:, n:] = self.pi(x) - noise_ampliate(x, self.d)
        return out

    def as_map(self) -> OperatorMap:
        return OperatorMap(n=self.n, d=self.d, fn=self.theta)


def as_theta_map(theta) -> OperatorMap:
    if isinstance(theta, FlowGenerator):
        return theta.as_map()
    if isinstance(theta, OperatorMap):
        return theta
    raise TypeError(f"expected FlowGenerator or OperatorMap, got {type(theta)!r}")


def trivial_flow(n: int, d: int) -> FlowGenerator:
    """The flow with theta = 0 (h = 0, l = 0, W = I)."""
    return FlowGenerator(
        h=np.zeros((n, n), dtype=complex),
        l=np.zeros((d * n, n), dtype=complex),
        W=np.eye(d * n, dtype=complex),
    )


def theta_components(theta: OperatorMap, x: np.ndarray):
    """(Ldb(x), delta(x), delta_dag(x), pi(x)) read off the blocks of theta(x)."""
    n, d = theta.n, theta.d
    tx = theta(x)
    return (
        tx[:n, :n],
        tx[n:, :n],
        tx[:n, n:],
        tx[n:, n:] + noise_ampliate(x, d),
    )


def from_hp_coefficient(G: BlockCoefficient, tol: float = 1e-8) -> OperatorMap:
    """Flow generator of the inner flow x -> U*(x (x) I)U driven by G.

    G must generate a unitary cocycle: q(G) = 0 and q(G*) = 0.  The returned
    map is x -> iota(x) G + G* iota(x) + G* Delta iota(x) Delta G; its
    parameters are deliberately not exposed (they are gauge-dependent).
    """
    flags = classify(G, tol=tol)
    if not (flags.isometric_gen and flags.coisometric_nec):
        raise NotUnitaryGeneratorError(
            "coefficient must satisfy q(G) = 0 and q(G*) = 0 to drive a unitary cocycle"
        )
    n, d = G.n, G.d
    full = G.as_full()
    delta = delta_projection(n, d)

    def fn(x: np.ndarray) -> np.ndarray:
        ix = ampliate(x, d)
        return ix @ full + dag(full) @ ix + dag(full) @ delta @ ix @ delta @ full

    return OperatorMap(n=n, d=d, fn=fn)


def hp_coefficient_for_flow(fg: FlowGenerator) -> BlockCoefficient:
    """A unitary-type coefficient whose induced inner flow has generator fg.theta.

    Right inverse of `from_hp_coefficient` modulo the l -> W*l gauge:
    K = i h - 1/2 l*l, L = W l, M = -l*, gauge part W.
    """
    return BlockCoefficient(
        K=1j * fg.h - 0.5 * dag(fg.l) @ fg.l,
        L=fg.W @ fg.l,
        M=-dag(fg.l),
        W=fg.W,
    )


@dataclass(frozen=True)
class StructureReport:
    residuals: dict = field(default_factory=dict)
    tol: float = 1e-11
    trials: int = 20
    seed: int = 0

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def validate_structure(theta, trials: int = 20, tol: float = 1e-11, seed: int = 0) -> StructureReport:
    """Check the structure relations of a theta-like map on random inputs.

    Residuals reported (max over trials, spectral norm):
      pi_multiplicative:  pi(x*y) - pi(x)* pi(y)
      delta_derivation:   delta(x*y) - delta(x*) y - pi(x)* delta(y)
      lindblad_dissipation: Ldb(x*y) - Ldb(x)* y - x* Ldb(y) - delta(x)* delta(y)
      theta_structure:    theta(x*y) - theta(x)* iota(y) - iota(x)* theta(y)
                                     - theta(x)* Delta theta(y)
      unital:             theta(I)
      real:               theta(x*) - theta(x)*
    """
    theta = as_theta_map(theta)
    n, d = theta.n, theta.d
    rng = np.random.default_rng(seed)
    delta_proj = delta_projection(n, d)
    keys = (
        "pi_multiplicative",
        "delta_derivation",
        "lindblad_dissipation",
        "theta_structure",
        "unital",
        "real",
    )
    resid = {k: 0.0 for k in keys}
    resid["unital"] = norm2(theta(np.eye(n)))
    for _ in range(trials):
        x = complex_randn(rng, n, n)
        y = complex_randn(rng, n, n)
        lx, dx, dxd, px = theta_components(theta, x)
        ly, dy, dyd, py = theta_components(theta, y)
        lxy, dxy, dxyd, pxy = theta_components(theta, dag(x) @ y)
        _, dxs, _, _ = theta_components(theta, dag(x))
        resid["pi_multiplicative"] = max(
            resid["pi_multiplicative"], norm2(pxy - dag(px) @ py)
        )
        resid["delta_derivation"] = max(
            resid["delta_derivation"], norm2(dxy - dxs @ y - dag(px) @ dy)
        )
        resid["lindblad_dissipation"] = max(
            resid["lindblad_dissipation"],
            norm2(lxy - dag(lx) @ y - dag(x) @ ly - dag(dx) @ dy),
        )
        txy = theta(dag(x) @ y)
        tx, ty = theta(x), theta(y)
        resid["theta_structure"] = max(
            resid["theta_structure"],
            norm2(
                txy
                - dag(tx) @ ampliate(y, d)
                - dag(ampliate(x, d)) @ ty
                - dag(tx) @ delta_proj @ ty
            ),
        )
        resid["real"] = max(resid["real"], norm2(theta(dag(x)) - dag(theta(x))))
    return StructureReport(residuals=resid, tol=tol, trials=trials, seed=seed)


# --- JSON wire format -------------------------------------------------------

def flow_to_json(fg: FlowGenerator) -> dict:
    return {
        "n": fg.n,
        "d": fg.d,
        "h": matrix_to_pairs(fg.h),
        "l": matrix_to_pairs(fg.l),
        "W": matrix_to_pairs(fg.W),
    }


def flow_from_json(obj: dict) -> FlowGenerator:
    n, d = int(obj["n"]), int(obj["d"])
    if n < 1 or d < 1:
        raise DimensionMismatchError(f"need n >= 1 and d >= 1, got n = {n}, d = {d}")
    dn = d * n
    return FlowGenerator(
        h=matrix_from_pairs(obj["h"], n, n),
        l=matrix_from_pairs(obj["l"], dn, n),
        W=matrix_from_pairs(obj["W"], dn, dn),
    )

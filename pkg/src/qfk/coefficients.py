"""Block coefficient algebra for quantum stochastic generators.

A coefficient acts on C^{(d+1)n}, the one-plus-noise space C (+) C^d tensored
with the initial space C^n, scalar slot first.  Its block form is

    F = [[ K,  M ],
         [ L,  W - I ]],    K: n x n,  L: dn x n,  M: n x dn,  W: dn x dn,

and W itself is stored (not W - I) so isometry and contraction questions read
directly off the stored block.  The noise corner dn is ordered noise-first:
C^d (x) C^n.

The central object is the quadratic form

    q(F) = F* + F + F* Delta F,

where Delta is the projection onto the noise corner.  A generator is
quasicontractive iff q(F) <= beta Delta_perp for some real beta, isometric
iff q(F) = 0, contractive iff q(F) <= 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DimensionMismatchError,
    as_complex,
    close,
    dag,
    min_eig_hermitian,
    norm2,
    pinv_abs,
    sqrtm_psd,
)


def delta_projection(n: int, d: int) -> np.ndarray:
    """Projection onto the noise corner of C^{(d+1)n}."""
    out = np.zeros(((d + 1) * n, (d + 1) * n), dtype=complex)
    out[n:, n:] = np.eye(d * n)
    return out


def delta_perp(n: int, d: int) -> np.ndarray:
    """Projection onto the scalar corner of C^{(d+1)n}."""
    out = np.zeros(((d + 1) * n, (d + 1) * n), dtype=complex)
    out[:n, :n] = np.eye(n)
    return out


@dataclass(frozen=True, eq=False)
class BlockCoefficient:
    """QSDE coefficient in block form (K, L, M, W)."""

    K: np.ndarray
    L: np.ndarray
    M: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "K", as_complex(self.K))
        object.__setattr__(self, "L", as_complex(self.L))
        object.__setattr__(self, "M", as_complex(self.M))
        object.__setattr__(self, "W", as_complex(self.W))
        n = self.K.shape[0]
        if self.K.shape != (n, n):
            raise DimensionMismatchError(f"K must be square, got {self.K.shape}")
        dn = self.L.shape[0]
        if n < 1 or dn < n or dn % n != 0:
            raise DimensionMismatchError(
                f"L must be dn x n with d >= 1, got {self.L.shape} against n = {n}"
            )
        if self.L.shape != (dn, n):
            raise DimensionMismatchError(f"L must be {dn} x {n}, got {self.L.shape}")
        if self.M.shape != (n, dn):
            raise DimensionMismatchError(f"M must be {n} x {dn}, got {self.M.shape}")
        if self.W.shape != (dn, dn):
            raise DimensionMismatchError(f"W must be {dn} x {dn}, got {self.W.shape}")

    @property
    def n(self) -> int:
        return self.K.shape[0]

    @property
    def d(self) -> int:
        return self.L.shape[0] // self.K.shape[0]

    def as_full(self) -> np.ndarray:
        """The (d+1)n x (d+1)n matrix [[K, M], [L, W - I]]."""
        n, dn = self.K.shape[0], self.L.shape[0]
        out = np.zeros((n + dn, n + dn), dtype=complex)
        out[:n, :n] = self.K
        out[:n, n:] = self.M
        out[n:, :n] = self.L
        out[n:, n:] = self.W - np.eye(dn)
        return out

    @classmethod
    def from_full(cls, full: np.ndarray, n: int) -> "BlockCoefficient":
        full = as_complex(full)
        if full.shape[0] != full.shape[1] or full.shape[0] <= n or full.shape[0] % n != 0:
            raise DimensionMismatchError(
                f"full matrix of shape {full.shape} does not split over n = {n}"
            )
        dn = full.shape[0] - n
        return cls(
            K=full[:n, :n],
            L=full[n:, :n],
            M=full[:n, n:],
            W=full[n:, n:] + np.eye(dn),
        )

    def adjoint(self) -> "BlockCoefficient":
        """F*, again in block form: (K*, M*, L*, W*)."""
        return BlockCoefficient(K=dag(self.K), L=dag(self.M), M=dag(self.L), W=dag(self.W))

    def norm(self) -> float:
        return norm2(self.as_full())


def q_form(F: BlockCoefficient) -> np.ndarray:
    """q(F) = F* + F + F* Delta F, assembled blockwise.

    Blocks: [[K* + K + L*L, L*W + M], [M* + W*L, W*W - I]].
    """
    n, dn = F.n, F.L.shape[0]
    out = np.zeros((n + dn, n + dn), dtype=complex)
    out[:n, :n] = dag(F.K) + F.K + dag(F.L) @ F.L
    out[:n, n:] = dag(F.L) @ F.W + F.M
    out[n:, :n] = dag(F.M) + dag(F.W) @ F.L
    out[n:, n:] = dag(F.W) @ F.W - np.eye(dn)
    return out


def q_form_adjoint(F: BlockCoefficient) -> np.ndarray:
    """q(F*): blocks [[K* + K + M M*, M W* + L*], [L + W M*, W W* - I]]."""
    return q_form(F.adjoint())


@dataclass(frozen=True)
class CoefficientFlags:
    isometric_gen: bool
    coisometric_nec: bool
    contractive_gen: bool
    quasicontractive: bool


def _psd_shift_min_eig(F: BlockCoefficient, beta: float) -> float:
    """Smallest eigenvalue of beta Delta_perp - q(F)."""
    return min_eig_hermitian(beta * delta_perp(F.n, F.d) - q_form(F))


def min_quasicontractivity_beta(F: BlockCoefficient, tol: float = 1e-8) -> float | None:
    """Smallest real beta with q(F) <= beta Delta_perp, or None if infeasible.

    Feasibility requires W to be a contraction and M + L*W to lie in the
    range of right-multiplication by (I - W*W)^{1/2}; the latter is tested by
    least-squares residual rather than exact range computation.
    """
    dn = F.L.shape[0]
    if norm2(F.W) > 1.0 + tol:
        return None
    gram_root = sqrtm_psd(np.eye(dn) - dag(F.W) @ F.W, clip_tol=max(tol, 1e-12))
    rhs = F.M + dag(F.L) @ F.W
    resid = norm2(rhs @ pinv_abs(gram_root) @ gram_root - rhs)
    if resid > tol * (1.0 + norm2(F.M)):
        return None

    fnorm = F.norm()
    lower = -2.0 * fnorm - 1.0
    upper = 2.0 * fnorm * (2.0 + fnorm) + 1.0
    # The crude upper bracket can fail when ||W|| is close to 1; a finite
    # beta exists once the range test passed, so expand geometrically.
    expansions = 0
    while _psd_shift_min_eig(F, upper) < -tol:
        upper = 4.0 * upper + 1.0
        expansions += 1
        if expansions > 60:
            return None
    while upper - lower > tol:
        mid = 0.5 * (lower + upper)
        if _psd_shift_min_eig(F, mid) >= -tol:
            upper = mid
        else:
            lower = mid
    return float(upper)


def classify(F: BlockCoefficient, tol: float = 1e-8) -> CoefficientFlags:
    """The four generator classes, decided at tolerance tol.

    isometric_gen:   q(F) = 0        (cocycle is isometric)
    coisometric_nec: q(F*) = 0       (necessary side of coisometry)
    contractive_gen: q(F) <= 0
    quasicontractive: q(F) <= beta Delta_perp for some finite beta
    """
    scale = 1.0 + F.norm()
    return CoefficientFlags(
        isometric_gen=norm2(q_form(F)) <= tol * scale,
        coisometric_nec=norm2(q_form_adjoint(F)) <= tol * scale,
        contractive_gen=min_eig_hermitian(-q_form(F)) >= -tol * scale,
        quasicontractive=min_quasicontractivity_beta(F, tol=tol) is not None,
    )


def contraction_decomposition(
    F: BlockCoefficient, beta: float, tol: float = 1e-8
) -> tuple[np.ndarray, np.ndarray] | None:
    """Solve M + L*W = b1^{1/2} v1 (I - W*W)^{1/2} with v1 a contraction.

    Requires q(F) <= beta Delta_perp.  Returns (b1, v1) with
    b1 = beta I - (K* + K + L*L) PSD.  Returns None when the least-squares
    v1 fails to be a contraction (||v1|| > 1 + 1e-8) or fails to reproduce
    M + L*W -- a tolerance inconsistency, not a mathematical failure, so it
    is reported rather than clipped.
    """
    n, dn = F.n, F.L.shape[0]
    scale = 1.0 + norm2(q_form(F))
    if _psd_shift_min_eig(F, beta) < -tol * scale:
        raise ValueError("q(F) <= beta Delta_perp does not hold at this beta")
    b1 = beta * np.eye(n) - (dag(F.K) + F.K + dag(F.L) @ F.L)
    b1_root = sqrtm_psd(b1, clip_tol=tol * (1.0 + norm2(b1)))
    gram_root = sqrtm_psd(np.eye(dn) - dag(F.W) @ F.W, clip_tol=tol)
    rhs = F.M + dag(F.L) @ F.W
    v1 = pinv_abs(b1_root) @ rhs @ pinv_abs(gram_root)
    if norm2(v1) > 1.0 + 1e-8:
        return None
    if norm2(b1_root @ v1 @ gram_root - rhs) > 1e-8 * (1.0 + norm2(F.M)):
        return None
    return b1, v1


def transform_prime(F: BlockCoefficient) -> BlockCoefficient:
    """F' = (K, L, 0, 0): as a full matrix, F Delta_perp - Delta.

    The cocycle generated by F' agrees with the one generated by F on
    vacuum-side columns; the noise columns are shredded.
    """
    n, dn = F.n, F.L.shape[0]
    return BlockCoefficient(
        K=F.K,
        L=F.L,
        M=np.zeros((n, dn), dtype=complex),
        W=np.zeros((dn, dn), dtype=complex),
    )


def transform_double_prime(F: BlockCoefficient) -> BlockCoefficient:
    """F'' = (K, L, -L*, I): the gauge-free, creation/annihilation-balanced form."""
    dn = F.L.shape[0]
    return BlockCoefficient(K=F.K, L=F.L, M=-dag(F.L), W=np.eye(dn, dtype=complex))


# --- JSON wire format -------------------------------------------------------

def matrix_to_pairs(x: np.ndarray) -> list[list[float]]:
    """Row-major flat list of [re, im] pairs."""
    flat = np.asarray(x, dtype=complex).reshape(-1)
    return [[float(v.real), float(v.imag)] for v in flat]


def matrix_from_pairs(pairs, rows: int, cols: int) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.shape != (rows * cols, 2):
        raise DimensionMismatchError(
            f"expected {rows * cols} [re, im] pairs, got shape {arr.shape}"
        )
    return np.ascontiguousarray((arr[:, 0] + 1j * arr[:, 1]).reshape(rows, cols))


def coefficient_to_json(F: BlockCoefficient) -> dict:
    return {
        "n": F.n,
        "d": F.d,
        "K": matrix_to_pairs(F.K),
        "L": matrix_to_pairs(F.L),
        "M": matrix_to_pairs(F.M),
        "W": matrix_to_pairs(F.W),
    }


def coefficient_from_json(obj: dict) -> BlockCoefficient:
    n, d = int(obj["n"]), int(obj["d"])
    if n < 1 or d < 1:
        raise DimensionMismatchError(f"need n >= 1 and d >= 1, got n = {n}, d = {d}")
    dn = d * n
    return BlockCoefficient(
        K=matrix_from_pairs(obj["K"], n, n),
        L=matrix_from_pairs(obj["L"], dn, n),
        M=matrix_from_pairs(obj["M"], n, dn),
        W=matrix_from_pairs(obj["W"], dn, dn),
    )

"""Core Schatten-class machinery on dense complex matrices.

All matrices are plain ``numpy.ndarray`` objects with ``complex128`` entries;
real inputs are promoted on the way in.  The trace is the non-normalized
matrix trace, so ``schatten_norm(I_k, p) == k**(1/p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FactorizationHypothesisError, InvalidInputError

#: Relative eigenvalue threshold below which directions count as kernel.
DEFAULT_RANK_TOL = 1e-10

#: Hermitian inputs may deviate from their adjoint by this much (relative);
#: anything beyond is an error, anything below is silently symmetrized.
HERMITIAN_ATOL = 1e-8


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-D complex matrix and validate its entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise InvalidInputError(f"expected a matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise InvalidInputError("matrix entries must be finite")
    return m


def check_exponent(p: float, allow_inf: bool = False) -> float:
    """Validate a norm exponent ``p > 1`` (``inf`` optional)."""
    p = float(p)
    if math.isinf(p):
        if allow_inf:
            return p
        raise InvalidInputError("exponent p = inf not allowed here")
    if math.isnan(p) or p <= 1.0:
        raise InvalidInputError(f"exponent must satisfy p > 1, got {p}")
    return p


def conjugate(p: float) -> float:
    """Conjugate exponent p/(p-1); restricted to p in (1, inf)."""
    p = check_exponent(p, allow_inf=False)
    return p / (p - 1.0)


def eigh_psd(a: np.ndarray, label: str = "matrix"):
    """Eigendecomposition of a (nearly) Hermitian matrix.

    Symmetrizes ``(a + a^*)/2`` first; asymmetry beyond ``HERMITIAN_ATOL``
    relative to the matrix scale is an error.  Returns ``(eigvals, eigvecs)``
    in ascending order.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"{label} must be square, got {a.shape}")
    scale = max(1.0, float(np.linalg.norm(a)))
    asym = float(np.linalg.norm(a - a.conj().T))
    if asym > HERMITIAN_ATOL * scale:
        raise InvalidInputError(
            f"{label} is not Hermitian (asymmetry {asym:.3e} of scale {scale:.3e})"
        )
    h = 0.5 * (a + a.conj().T)
    vals, vecs = np.linalg.eigh(h)
    return vals, vecs


def schatten_norm(a, p: float) -> float:
    """Schatten p-norm: the l^p norm of the singular values.

    ``p = inf`` gives the operator (largest-singular-value) norm.  Any
    ``p >= 1`` is accepted since the norm itself needs no duality.
    """
    m = as_matrix(a)
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvalidInputError(f"schatten_norm needs p >= 1, got {p}")
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size == 0:
        return 0.0
    if math.isinf(p):
        return float(sv[0])
    top = float(sv[0])
    if top == 0.0:
        return 0.0
    # scale out the largest singular value to keep powers well conditioned
    return top * float(np.sum((sv / top) ** p)) ** (1.0 / p)


def trace_pairing(a, c) -> complex:
    """Trace pairing tr(a c) for a (k x m) against c (m x k)."""
    a = as_matrix(a)
    c = as_matrix(c)
    if a.shape[1] != c.shape[0] or a.shape[0] != c.shape[1]:
        raise InvalidInputError(f"shape mismatch in pairing: {a.shape} vs {c.shape}")
    return complex(np.einsum("ij,ji->", a, c))


@dataclass
class PolarParts:
    """Polar factors ``a = W |a|`` with W a partial isometry, |a| PSD."""

    partial_isometry: np.ndarray
    modulus: np.ndarray


def polar_decompose(a, rank_tol: float = DEFAULT_RANK_TOL) -> PolarParts:
    """Polar decomposition via SVD.

    ``W`` is supported exactly on the range of ``|a| = (a^* a)^{1/2}``:
    singular directions below ``rank_tol`` times the largest singular value
    are dropped from the isometric factor, so ``W^* W`` equals the support
    projection of the modulus.
    """
    m = as_matrix(a)
    u, sv, vh = np.linalg.svd(m)
    modulus = (vh.conj().T * sv) @ vh
    top = sv[0] if sv.size else 0.0
    r = int(np.sum(sv >= rank_tol * top)) if top > 0 else 0
    w = u[:, :r] @ vh[:r, :]
    return PolarParts(partial_isometry=w, modulus=modulus)


def support_projection(b, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthogonal projection onto the range of a PSD matrix.

    Eigenvalues ``>= rank_tol * lambda_max`` are kept (ties round toward the
    larger projection).  A genuinely negative eigenvalue, beyond floating
    noise at the matrix scale, raises ``InvalidInputError``.
    """
    vals, vecs = eigh_psd(b, "support_projection input")
    lam_max = float(vals[-1]) if vals.size else 0.0
    neg_tol = rank_tol * max(lam_max, 0.0) + 64 * np.finfo(float).eps * max(
        1.0, float(np.abs(vals).max()) if vals.size else 0.0
    )
    if vals.size and float(vals[0]) < -neg_tol:
        raise InvalidInputError(f"matrix is not PSD (min eigenvalue {vals[0]:.3e})")
    if lam_max <= 0.0:
        return np.zeros_like(as_matrix(b))
    keep = vals >= rank_tol * lam_max
    v = vecs[:, keep]
    return v @ v.conj().T


def support_basis(b, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis (k x r) of the range of a PSD matrix."""
    vals, vecs = eigh_psd(b, "support_basis input")
    lam_max = float(vals[-1]) if vals.size else 0.0
    if lam_max <= 0.0:
        return np.zeros((vecs.shape[0], 0), dtype=np.complex128)
    keep = vals >= rank_tol * lam_max
    return np.ascontiguousarray(vecs[:, keep])


def psd_power(b, power: float, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Spectral power of a PSD matrix, restricted to its support.

    Negative powers invert only eigenvalues above the relative threshold,
    which makes ``psd_power(b, -1.0)`` the pseudo-inverse.
    """
    vals, vecs = eigh_psd(b, "psd_power input")
    lam_max = float(vals[-1]) if vals.size else 0.0
    out = np.zeros(vals.shape)
    if lam_max > 0.0:
        keep = vals >= rank_tol * lam_max
        out[keep] = np.clip(vals[keep], 0.0, None) ** power
    return (vecs * out) @ vecs.conj().T


@dataclass
class FactorThroughResult:
    """Middle factor recovered from ``y = a w b`` with PSD outer factors."""

    w: np.ndarray
    is_contraction: bool
    residual: float


def factor_through(y, a, b, rtol: float = 1e-8,
                   rank_tol: float = DEFAULT_RANK_TOL) -> FactorThroughResult:
    """Recover the contraction ``w`` with ``y = a w b`` and ``w = Q_a w Q_b``.

    ``a`` and ``b`` must be Hermitian PSD; the caller asserts that such a
    factorization exists.  ``w = a^+ y b^+`` (pseudo-inverses are already
    support-compressed).  If the reconstruction ``a w b`` misses ``y`` by more
    than ``rtol`` relative, the assumed bound fails for this triple and a
    ``FactorizationHypothesisError`` is raised.
    """
    y = as_matrix(y)
    a_pinv = psd_power(a, -1.0, rank_tol)
    b_pinv = psd_power(b, -1.0, rank_tol)
    if a_pinv.shape[1] != y.shape[0] or y.shape[1] != b_pinv.shape[0]:
        raise InvalidInputError("incompatible shapes in factor_through")
    w = a_pinv @ y @ b_pinv
    recon = as_matrix(a) @ w @ as_matrix(b)
    ynorm = float(np.linalg.norm(y))
    residual = float(np.linalg.norm(recon - y))
    if residual > rtol * max(ynorm, 1e-300):
        raise FactorizationHypothesisError(
            f"reconstruction residual {residual:.3e} exceeds rtol*|y| "
            f"({rtol:.1e} * {ynorm:.3e}); no factorization through these factors"
        )
    wnorm = schatten_norm(w, math.inf)
    return FactorThroughResult(w=w, is_contraction=wnorm <= 1.0 + rtol,
                               residual=residual)


def dual_witness(a, p: float, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Norm-attaining dual element: tr(a c) / ||c||_{p'} == ||a||_p.

    Built from the SVD ``a = U S V^*`` as ``c = V S^{p-1} U^*`` (top singular
    pair only when ``p = inf``).
    """
    m = as_matrix(a)
    p = float(p)
    u, sv, vh = np.linalg.svd(m)
    if sv.size == 0 or sv[0] == 0.0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=np.complex128)
    if math.isinf(p):
        return np.outer(vh[0].conj(), u[:, 0].conj())
    scaled = np.where(sv >= rank_tol * sv[0], (sv / sv[0]) ** (p - 1.0), 0.0)
    return (vh.conj().T * scaled) @ u.conj().T

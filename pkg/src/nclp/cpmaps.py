"""Linear maps on the k x k Schatten class in two-sided coefficient form.

A :class:`KrausMap` acts as ``x -> sum_i a_i^* x b_i``.  When ``b_i = a_i``
for all i the map is completely positive; complete positivity in general is
checked through the block matrix of the map's action on matrix units, whose
positivity is equivalent to complete positivity in finite dimension.

The module also builds the concrete family of maps behind the dilation
counterexample: the scaled shift ``u1``, its pairing adjoint ``u2``, the
diagonal projection ``u3``, the corner-to-identity rank-one map ``u4``, and
their completely positive average ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .schatten import as_matrix, check_exponent, schatten_norm
from .vecnorm import VecElem


@dataclass
class KrausMap:
    """x -> sum_i a_i^* x b_i with coefficient stacks of shape (m, k, k)."""

    k: int
    a: np.ndarray
    b: np.ndarray

    @classmethod
    def from_terms(cls, terms) -> "KrausMap":
        mats_a = []
        mats_b = []
        for a_i, b_i in terms:
            mats_a.append(as_matrix(a_i))
            mats_b.append(as_matrix(b_i))
        if not mats_a:
            raise InvalidInputError("a KrausMap needs at least one term")
        k = mats_a[0].shape[0]
        for m in mats_a + mats_b:
            if m.shape != (k, k):
                raise InvalidInputError("all coefficients must be k x k")
        return cls(k=k, a=np.stack(mats_a), b=np.stack(mats_b))

    @classmethod
    def identity(cls, k: int) -> "KrausMap":
        eye = np.eye(k, dtype=np.complex128)
        return cls(k=k, a=eye[None, :, :], b=eye[None, :, :])

    def terms(self):
        return list(zip(self.a, self.b))

    def __len__(self) -> int:
        return self.a.shape[0]


def apply(m: KrausMap, x) -> np.ndarray:
    x = as_matrix(x)
    if x.shape != (m.k, m.k):
        raise InvalidInputError(f"expected a {m.k} x {m.k} argument, got {x.shape}")
    return np.einsum("tji,jl,tlk->ik", m.a.conj(), x, m.b)


def choi(m: KrausMap) -> np.ndarray:
    """Block matrix C = sum_{ij} E_ij (x) u(E_ij), assembled as sum of outers.

    With terms (a, b) the blocks collapse to C = sum_t conj(vec a_t) vec(b_t)^T
    in row-major vectorization, so C is Hermitian iff the map is *-preserving.
    """
    va = m.a.reshape(len(m), -1).conj()
    vb = m.b.reshape(len(m), -1)
    return np.einsum("ti,tj->ij", va, vb)


def is_completely_positive(m: KrausMap, tol: float | None = None) -> bool:
    """Choi-positivity test; tol defaults to 1e-10 times the Choi scale."""
    c = choi(m)
    scale = float(np.abs(np.linalg.eigvals(c)).max()) if c.size else 0.0
    if tol is None:
        tol = 1e-10 * max(scale, 1.0)
    if float(np.linalg.norm(c - c.conj().T)) > tol * max(scale, 1.0):
        return False  # not even *-preserving
    lam = np.linalg.eigvalsh(0.5 * (c + c.conj().T))
    return bool(lam[0] >= -tol)


def choi_min_eigenvalue(m: KrausMap) -> float:
    c = choi(m)
    return float(np.linalg.eigvalsh(0.5 * (c + c.conj().T))[0])


def adjoint_map(m: KrausMap) -> KrausMap:
    """Adjoint under the trace pairing: tr(m(x) y) = tr(x m'(y)).

    Per term, x -> a^* x b pairs to y -> b y a^*, i.e. the term (a, b) maps
    to (b^*, a^*).
    """
    return KrausMap(k=m.k, a=np.transpose(m.b, (0, 2, 1)).conj(),
                    b=np.transpose(m.a, (0, 2, 1)).conj())


def compose(outer: KrausMap, inner: KrausMap) -> KrausMap:
    """(outer . inner)(x) with the term products expanded."""
    if outer.k != inner.k:
        raise InvalidInputError("composition needs equal sizes")
    a = np.einsum("sij,tjk->stik", inner.a, outer.a).reshape(-1, outer.k, outer.k)
    b = np.einsum("sij,tjk->stik", inner.b, outer.b).reshape(-1, outer.k, outer.k)
    return KrausMap(k=outer.k, a=a, b=b)


def scale_map(m: KrausMap, t: float) -> KrausMap:
    root = math.sqrt(abs(t))
    sign = 1.0 if t >= 0 else -1.0
    return KrausMap(k=m.k, a=m.a * root, b=m.b * (sign * root))


def build_counterexample_maps(k: int, p: float):
    """The four corner maps and their completely positive average.

    Coefficients: ``a_i = E_ii`` and ``b_i = k^{-1/(2p)} E_1i``.  Returns
    ``(u1, u2, u3, u4, u)`` where

    * ``u1(x) = sum a_i^* x b_i`` (scaled first-column-to-diagonal shift),
    * ``u2(x) = sum b_i^* x a_i`` (its pairing adjoint),
    * ``u3(x) = sum a_i^* x a_i`` (diagonal projection),
    * ``u4(x) = sum b_i^* x b_i`` (x -> k^{-1/p} x_11 I),
    * ``u = (u1 + u2 + u3 + u4)/4 = (1/4) sum (a_i+b_i)^* x (a_i+b_i)``.
    """
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    check_exponent(p)
    coef = float(k) ** (-1.0 / (2.0 * p))
    a = np.zeros((k, k, k), dtype=np.complex128)
    b = np.zeros((k, k, k), dtype=np.complex128)
    for i in range(k):
        a[i, i, i] = 1.0
        b[i, 0, i] = coef
    u1 = KrausMap(k=k, a=a, b=b)
    u2 = KrausMap(k=k, a=b, b=a)
    u3 = KrausMap(k=k, a=a, b=a)
    u4 = KrausMap(k=k, a=b, b=b)
    avg = 0.5 * (a + b)
    u = KrausMap(k=k, a=avg, b=avg)
    return u1, u2, u3, u4, u


def amplify_apply(m: KrausMap, y: VecElem) -> VecElem:
    """Coordinatewise action of ``m (x) I`` on a vector-valued element."""
    if y.k != m.k:
        raise InvalidInputError(f"size mismatch: map is {m.k}, element is {y.k}")
    out = np.einsum("tji,njl,tlk->nik", m.a.conj(), y.coords, m.b)
    return VecElem(out)


def sampled_contraction_ratio(m: KrausMap, p: float, trials: int,
                              seed: int = 0, probes=()) -> float:
    """Lower bound on the p -> p operator norm by random (plus given) probes."""
    check_exponent(p, allow_inf=True)
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    mats = [as_matrix(x) for x in probes]
    for _ in range(trials):
        mats.append(rng.standard_normal((m.k, m.k))
                    + 1j * rng.standard_normal((m.k, m.k)))
    best = 0.0
    for x in mats:
        denom = schatten_norm(x, p)
        if denom > 0.0:
            best = max(best, schatten_norm(apply(m, x), p) / denom)
    return best

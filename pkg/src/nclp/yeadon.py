"""Isometries between matrix p-classes in structured form T(a) = W B J(a).

``J`` is a finite block-diagonal direct sum of copies of the identity
representation (``a``) and the transpose anti-representation (``a^T``), the
general shape of a one-to-one normal Jordan homomorphism between matrix
algebras up to unitary equivalence.  ``B`` is the positive block-diagonal
weight matrix, ``W`` a unitary on the target.  With trace compatibility
``sum s_r^p + sum t_r^p = 1`` the map is a p-norm isometry.

``jordan_split`` separates the representation and anti-representation parts
``T = T1 + T2`` (right multiplication by the central block masks), and the
report helpers verify the tensor-contraction behavior of the two parts and
the factor-4 bound satisfied by any composition of adjoint isometry pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cpmaps import KrausMap
from .errors import InvalidInputError, InvalidSpecError
from .schatten import as_matrix, check_exponent, conjugate
from .vecnorm import (CertifyOptions, DEFAULT_OPTS, Side, VecElem,
                      alpha_certify, alpha_upper, beta_certify, random_element)

WEIGHT_SUM_TOL = 1e-12


@dataclass
class YeadonSpec:
    """Block data for T(a) = W B J(a) on an n x n source algebra.

    ``rep_weights`` and ``antirep_weights`` are the positive block weights for
    identity-representation and transpose-anti-representation blocks; the
    target size is n times the number of blocks.  ``w`` is an optional
    unitary on the target (the support of B is everything, so a partial
    isometry with full initial support is unitary); None means identity.
    """

    n: int
    rep_weights: tuple = ()
    antirep_weights: tuple = ()
    w: np.ndarray | None = None

    @property
    def num_blocks(self) -> int:
        return len(self.rep_weights) + len(self.antirep_weights)

    @property
    def target_size(self) -> int:
        return self.n * self.num_blocks

    def block_types(self):
        return ["rep"] * len(self.rep_weights) + ["antirep"] * len(self.antirep_weights)

    def weights(self):
        return [float(x) for x in self.rep_weights] + \
            [float(x) for x in self.antirep_weights]


def validate_spec(spec: YeadonSpec, p: float) -> None:
    check_exponent(p)
    if spec.n < 1:
        raise InvalidSpecError("source size must be >= 1")
    if spec.num_blocks == 0:
        raise InvalidSpecError("at least one block is required")
    ws = spec.weights()
    if any(w <= 0.0 for w in ws):
        raise InvalidSpecError("block weights must be strictly positive")
    total = sum(w ** p for w in ws)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise InvalidSpecError(
            f"weight normalization sum w^p = {total!r} differs from 1 "
            f"beyond {WEIGHT_SUM_TOL}; specs are rejected, not renormalized")
    if spec.w is not None:
        w = as_matrix(spec.w)
        m = spec.target_size
        if w.shape != (m, m):
            raise InvalidSpecError(f"W must be {m} x {m}, got {w.shape}")
        if float(np.linalg.norm(w.conj().T @ w - np.eye(m))) > 1e-10 * m:
            raise InvalidSpecError("W^*W must equal the support of B (identity here)")


def random_valid_weights(n_rep: int, n_anti: int, p: float,
                         rng: np.random.Generator):
    """Strictly positive weights with sum of p-th powers exactly 1."""
    raw = rng.uniform(0.2, 1.0, size=n_rep + n_anti)
    norm = float(np.sum(raw ** p)) ** (1.0 / p)
    w = raw / norm
    # repair the residual rounding so validation at 1e-12 passes
    total = float(np.sum(w ** p))
    w = w * total ** (-1.0 / p)
    return tuple(w[:n_rep]), tuple(w[n_rep:])


@dataclass
class BlockIsometry:
    """Callable form of T(a) = W B J(a), optionally masked to one block type."""

    spec: YeadonSpec
    p: float
    mask: str | None = None  # None, "rep", "antirep"
    _w: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        validate_spec(self.spec, self.p)
        if self.spec.w is not None:
            self._w = as_matrix(self.spec.w)

    @property
    def source_size(self) -> int:
        return self.spec.n

    @property
    def target_size(self) -> int:
        return self.spec.target_size

    def _blocks(self, a: np.ndarray):
        for btype, weight in zip(self.spec.block_types(), self.spec.weights()):
            live = self.mask is None or self.mask == btype
            if not live:
                yield np.zeros_like(a)
            elif btype == "rep":
                yield weight * a
            else:
                yield weight * a.T

    def __call__(self, a) -> np.ndarray:
        a = as_matrix(a)
        n = self.spec.n
        if a.shape != (n, n):
            raise InvalidInputError(f"expected {n} x {n} argument, got {a.shape}")
        m = self.target_size
        out = np.zeros((m, m), dtype=np.complex128)
        for idx, blk in enumerate(self._blocks(a)):
            out[idx * n:(idx + 1) * n, idx * n:(idx + 1) * n] = blk
        if self._w is not None:
            out = self._w @ out
        return out

    def adjoint_apply(self, c) -> np.ndarray:
        """T^*(c) under the trace pairing tr(T(a) c) = tr(a T^*(c))."""
        c = as_matrix(c)
        m = self.target_size
        if c.shape != (m, m):
            raise InvalidInputError(f"expected {m} x {m} argument, got {c.shape}")
        n = self.spec.n
        cw = c if self._w is None else c @ self._w
        out = np.zeros((n, n), dtype=np.complex128)
        for idx, (btype, weight) in enumerate(zip(self.spec.block_types(),
                                                  self.spec.weights())):
            if self.mask is not None and self.mask != btype:
                continue
            blk = cw[idx * n:(idx + 1) * n, idx * n:(idx + 1) * n]
            out += weight * (blk if btype == "rep" else blk.T)
        return out

    def amplify(self, y: VecElem) -> VecElem:
        return VecElem(np.stack([self(coord) for coord in y.coords]))

    def block_mask_matrix(self, which: str) -> np.ndarray:
        n, m = self.spec.n, self.target_size
        mask = np.zeros((m, m), dtype=np.complex128)
        for idx, btype in enumerate(self.spec.block_types()):
            if btype == which:
                mask[idx * n:(idx + 1) * n, idx * n:(idx + 1) * n] = np.eye(n)
        return mask

    def weight_matrix(self) -> np.ndarray:
        """B = blockdiag(w_b I_n): the positive part of T(a) = W B J(a)."""
        n = self.spec.n
        diag = np.concatenate([np.full(n, w) for w in self.spec.weights()])
        return np.diag(diag.astype(np.complex128))

    def jordan_apply(self, a) -> np.ndarray:
        """J(a) = blockdiag(a, ..., a^T, ...), without weights or W."""
        a = as_matrix(a)
        n, m = self.spec.n, self.target_size
        out = np.zeros((m, m), dtype=np.complex128)
        for idx, btype in enumerate(self.spec.block_types()):
            blk = a if btype == "rep" else a.T
            out[idx * n:(idx + 1) * n, idx * n:(idx + 1) * n] = blk
        return out


def build_isometry(spec: YeadonSpec, p: float) -> BlockIsometry:
    """Validated isometry T with ||T(a)||_p = ||a||_p."""
    return BlockIsometry(spec=spec, p=p)


def jordan_split(spec: YeadonSpec, p: float):
    """(T1, T2): representation and anti-representation parts, T = T1 + T2."""
    t1 = BlockIsometry(spec=spec, p=p, mask="rep")
    t2 = BlockIsometry(spec=spec, p=p, mask="antirep")
    return t1, t2


@dataclass
class ReportRow:
    sample: int
    image_lower: float
    input_upper: float
    slack: float
    ok: bool


@dataclass
class ContractionReport:
    which: str
    p: float
    n_hilbert: int
    rows: list
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations


def tensor_contraction_report(t_part: BlockIsometry, which: str, p: float,
                              samples: int, seed: int = 0, n_hilbert: int = 3,
                              tol: float = 1e-9,
                              opts: CertifyOptions = DEFAULT_OPTS) -> ContractionReport:
    """Check image/input certificate ordering for one split part.

    The representation part is contractive from row-valued to row-valued
    elements, the anti-representation part lands in the column-valued norm;
    each sampled element must satisfy
    ``lower(image, image_side) <= upper(input, ELL_ROW) + tol``.
    """
    if which not in ("rep", "antirep"):
        raise InvalidInputError("which must be 'rep' or 'antirep'")
    image_side = Side.ELL_ROW if which == "rep" else Side.R_COL
    rng = np.random.default_rng(seed)
    rows = []
    violations = []
    for idx in range(samples):
        y = random_element(t_part.source_size, n_hilbert, rng)
        upper_in, _ = alpha_upper(y, p, Side.ELL_ROW, opts)
        cert_img = alpha_certify(t_part.amplify(y), p, image_side, opts)
        slack = upper_in + tol - cert_img.lower
        ok = slack >= 0.0
        rows.append(ReportRow(idx, cert_img.lower, upper_in, slack, ok))
        if not ok:
            violations.append(idx)
    return ContractionReport(which=which, p=p, n_hilbert=n_hilbert,
                             rows=rows, violations=violations)


def _superop_matrices(t_iso: BlockIsometry, s_iso: BlockIsometry):
    """Composite S^* T split into two-sided and transpose-type parts.

    Returns (kraus_terms, transpose_norm): the (a_i, b_i) pairs of the
    two-sided part and the Frobenius norm of the transpose-type remainder.
    tr(u(x) c) = tr(T(x) S(c)) expands over block pairs (i, j) into
    H x G / H x^T G style terms with G = V_i^* W_S V_j and H = V_j^* W_T V_i.
    """
    n = t_iso.source_size
    types_t = t_iso.spec.block_types()
    types_s = s_iso.spec.block_types()
    weights_t = t_iso.spec.weights()
    weights_s = s_iso.spec.weights()
    m = t_iso.target_size
    wt = t_iso._w if t_iso._w is not None else np.eye(m, dtype=np.complex128)
    ws = s_iso._w if s_iso._w is not None else np.eye(m, dtype=np.complex128)

    terms = []
    transpose_ops = []
    for i in range(len(types_t)):
        for j in range(len(types_s)):
            g = ws[i * n:(i + 1) * n, j * n:(j + 1) * n]
            h = wt[j * n:(j + 1) * n, i * n:(i + 1) * n]
            coef = weights_t[i] * weights_s[j]
            if float(np.linalg.norm(g)) * float(np.linalg.norm(h)) == 0.0:
                continue
            ti, sj = types_t[i], types_s[j]
            if ti == "rep" and sj == "rep":
                # x -> coef * H x G
                terms.append((coef * h.conj().T, g))
            elif ti == "antirep" and sj == "antirep":
                # x -> coef * G^T x H^T
                terms.append((coef * g.conj(), h.T))
            elif ti == "antirep" and sj == "rep":
                # x -> coef * H x^T G : transpose-type
                transpose_ops.append((coef, h, g, False))
            else:
                # x -> coef * G^T x^T H^T : transpose-type
                transpose_ops.append((coef, g.T.copy(), h.T.copy(), True))
    tnorm = 0.0
    for coef, left, right, _ in transpose_ops:
        tnorm += abs(coef) * float(np.linalg.norm(left)) * float(np.linalg.norm(right))
    return terms, tnorm


def rigid_compose(t_spec: YeadonSpec, s_spec: YeadonSpec, p: float) -> KrausMap:
    """Composite u = S^* T of an isometry pair (T at p, S at p').

    Requires equal source and target sizes.  Cross terms between
    representation and anti-representation blocks act by transposition and
    cannot be written in two-sided coefficient form; such combinations are
    rejected.
    """
    p = check_exponent(p)
    t_iso = build_isometry(t_spec, p)
    s_iso = build_isometry(s_spec, conjugate(p))
    if t_iso.source_size != s_iso.source_size:
        raise InvalidInputError("source sizes differ")
    if t_iso.target_size != s_iso.target_size:
        raise InvalidInputError("target sizes differ")
    terms, tnorm = _superop_matrices(t_iso, s_iso)
    if tnorm > 1e-12:
        raise InvalidInputError(
            "composite has transpose-type components (mixed block types); "
            "it is not expressible as x -> sum a_i^* x b_i")
    if not terms:
        raise InvalidInputError("composite is zero; no usable terms")
    return KrausMap.from_terms(terms)


@dataclass
class RigidBoundReport:
    p: float
    bound: float
    n_hilbert: int
    rows: list
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations


def rigid_bound_report(u: KrausMap, p: float, samples: int, seed: int = 0,
                       n_hilbert: int = 3, bound: float = 4.0,
                       tol: float = 1e-9, extra_elements=(),
                       opts: CertifyOptions = DEFAULT_OPTS) -> RigidBoundReport:
    """Necessary condition for a rigid factorization: the factor-4 bound.

    For each element (``extra_elements`` first, then ``samples`` random ones)
    the certified p-sum lower bound of ``(u (x) I) y`` must stay below
    ``bound`` times the certified row upper bound of y; a violation
    certifies that no rigid factorization of u exists.
    """
    from .cpmaps import amplify_apply

    rng = np.random.default_rng(seed)
    elements = list(extra_elements)
    for _ in range(samples):
        elements.append(random_element(u.k, n_hilbert, rng))
    rows = []
    violations = []
    for idx, y in enumerate(elements):
        upper_in, _ = alpha_upper(y, p, Side.ELL_ROW, opts)
        cert_img = beta_certify(amplify_apply(u, y), p, opts)
        slack = bound * upper_in + tol - cert_img.lower
        ok = slack >= 0.0
        rows.append(ReportRow(idx, cert_img.lower, upper_in, slack, ok))
        if not ok:
            violations.append(idx)
    return RigidBoundReport(p=p, bound=bound, n_hilbert=n_hilbert,
                            rows=rows, violations=violations)

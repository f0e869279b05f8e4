"""Construction and verification of 1-distillability certificates.

A certificate is a Schmidt-rank-at-most-2 vector whose quadratic form
against the partial transpose of a state (or of its n-fold tensor power)
is strictly negative.  Three constructive routes are implemented besides
the generic multistart minimizer:

* ``submatrix2x2``   -- a principal 2x2 minor of the partial transpose
  with negative determinant pins an NPT 2xN cut; its bottom eigenvector
  is a witness.
* ``twoNonpositive`` -- two nonpositive eigenvalues of the partial
  transpose of a two-qutrit state combine into a witness with a singular
  3x3 matricization.
* ``kernelProduct``  -- a product vector in the kernel reduces, after a
  local rotation, to one of the two routes above.

Failure to find a witness is data, never an error: all routes return
``None`` when their hypothesis is not met.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .qcore import (
    DEFAULT_TOL,
    BipartiteState,
    DimensionMismatchError,
    Dims,
    NumericalFailureError,
    PureState,
    ToleranceConfig,
    hermitian_eig,
    is_ppt,
    partial_transpose,
    rank_kernel_range,
    regroup_tensor_power,
    schmidt_decompose,
    schmidt_rank,
)
from .rng import SplitMix64, derive_seed, random_isometry

ROUTE_SUBMATRIX = "submatrix2x2"
ROUTE_TWO_NONPOSITIVE = "twoNonpositive"
ROUTE_KERNEL_PRODUCT = "kernelProduct"
ROUTE_OPTIMIZER = "optimizer"

# determinants more negative than this qualify in the 2x2 scan; far above
# float noise on exactly-PSD inputs, far below any usable violation
_DET_TOL = 1e-16


@dataclass(frozen=True)
class Rank2Ansatz:
    """A Schmidt-rank-<=2 vector as local 2-frames plus 2x2 coefficients."""

    frame_a: np.ndarray
    frame_b: np.ndarray
    coeff: np.ndarray

    def __post_init__(self) -> None:
        fa = np.asarray(self.frame_a, dtype=complex)
        fb = np.asarray(self.frame_b, dtype=complex)
        c = np.asarray(self.coeff, dtype=complex)
        if fa.ndim != 2 or fa.shape[1] != 2 or fb.ndim != 2 or fb.shape[1] != 2:
            raise DimensionMismatchError("frames must have two columns")
        if c.shape != (2, 2):
            raise DimensionMismatchError("coeff must be 2x2")
        for name, f in (("frame_a", fa), ("frame_b", fb)):
            err = float(np.abs(f.conj().T @ f - np.eye(2)).max())
            if err > 1e-10:
                raise ValueError(f"{name} is not an isometry (deviation {err:.3e})")
        if abs(np.linalg.norm(c) - 1.0) > 1e-10:
            raise ValueError("coeff must have unit Frobenius norm")
        object.__setattr__(self, "frame_a", fa)
        object.__setattr__(self, "frame_b", fb)
        object.__setattr__(self, "coeff", c)

    def vector(self) -> np.ndarray:
        """The represented unit vector sum_ij coeff[i,j] a_i (x) b_j."""
        return np.kron(self.frame_a, self.frame_b) @ self.coeff.reshape(-1)


@dataclass(frozen=True)
class WitnessCertificate:
    """A verified Schmidt-rank-<=2 witness and the route that produced it."""

    psi: PureState
    value: float
    copies: int
    route: str
    schmidt_rank: int
    seed: int
    restarts: int
    delta: Optional[float] = None


@dataclass(frozen=True)
class ScanHit:
    """Result of the 2x2 principal-minor scan."""

    blocks: tuple[int, int]
    indices: tuple[int, int]
    determinant: float
    certificate: WitnessCertificate


def pt_quadratic_form(
    psi: np.ndarray, state: BipartiteState, copies: int = 1
) -> float:
    """Value of the witness form <psi| (state^(x n))^Gamma |psi>."""
    if copies == 1:
        mat, dims = state.mat, state.dims
    else:
        mat, dims = regroup_tensor_power(state.mat, state.dims, copies)
    pt = partial_transpose(mat, dims)
    v = np.asarray(psi, dtype=complex).reshape(-1)
    if v.size != pt.shape[0]:
        raise DimensionMismatchError(
            f"witness length {v.size} does not match {copies}-copy dimension {pt.shape[0]}"
        )
    return float(np.real(v.conj() @ pt @ v))


def _frames_from_vector(vec: np.ndarray, dims: Dims) -> tuple[np.ndarray, np.ndarray]:
    """Local 2-frames spanning the two leading Schmidt directions of ``vec``."""
    _, left, right = schmidt_decompose(vec, dims)
    return left[:, :2], right[:, :2]


def _complete_to_frame(gen: SplitMix64, a: np.ndarray) -> np.ndarray:
    """Extend a unit vector to a 2-column isometry with a seeded second column."""
    d = a.size
    while True:
        extra = gen.complex_vector(d)
        extra -= a * (a.conj() @ extra)
        nrm = float(np.linalg.norm(extra))
        if nrm > 1e-8:
            return np.column_stack([a, extra / nrm])


def _product_descent(
    x4: np.ndarray, dims: Dims, a: np.ndarray, b: np.ndarray, iters: int, tol: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """Alternating bottom-eigenvector descent over product vectors a (x) b."""
    val_prev = np.inf
    val = np.inf
    for _ in range(iters):
        mb = np.einsum("injm,n,m->ij", x4, b.conj(), b)
        mb = (mb + mb.conj().T) / 2
        _, vecs = np.linalg.eigh(mb)
        a = vecs[:, 0]
        ma = np.einsum("injm,i,j->nm", x4, a.conj(), a)
        ma = (ma + ma.conj().T) / 2
        w, vecs = np.linalg.eigh(ma)
        b = vecs[:, 0]
        val = float(w[0])
        if val_prev - val <= tol:
            break
        val_prev = val
    return val, a, b


def min_rank2_expectation(
    x: np.ndarray, dims: Dims, cfg: ToleranceConfig = DEFAULT_TOL
) -> tuple[float, Rank2Ansatz]:
    """Minimize <psi|X|psi> over unit vectors of Schmidt rank at most two.

    Multistart alternating minimization: with the local frames fixed the
    optimal coefficients are the bottom eigenvector of the compressed 4x4
    form; with the vector fixed the frames update to its two leading
    Schmidt directions.  Both half-steps are closed-form eigenproblems, so
    each restart descends monotonically until the improvement drops below
    ``opt_step_tol``.  Starts are seeded deterministically from
    ``cfg.seed``: the Schmidt-truncated bottom eigenvector, Haar-random
    frames, random draws from the bottom eigenspace, and product vectors
    polished by a rank-1 descent.  The result never undercuts the true
    minimum over all unit vectors, and no global-optimality claim is made.
    """
    m = np.asarray(x, dtype=complex)
    ma, mb = dims
    if m.shape != (dims.total, dims.total):
        raise DimensionMismatchError(
            f"matrix of shape {m.shape} does not match dims {tuple(dims)}"
        )
    if min(ma, mb) < 2:
        raise DimensionMismatchError("rank-2 ansatz needs both local dimensions >= 2")
    spec = hermitian_eig(m, cfg)
    evals, evecs = spec.eigenvalues, spec.eigenvectors
    scale = max(float(np.abs(evals).max()), 1e-300)
    span = int(np.sum(evals <= evals[0] + 1e-10 * scale))
    span = min(max(span, 2), dims.total)
    x4 = m.reshape(ma, mb, ma, mb)

    def run(frame_a: np.ndarray, frame_b: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        val_prev = np.inf
        coeff = None
        for _ in range(cfg.opt_max_iters):
            w_op = np.kron(frame_a, frame_b)
            comp = w_op.conj().T @ m @ w_op
            comp = (comp + comp.conj().T) / 2
            w4, v4 = np.linalg.eigh(comp)
            val = float(w4[0])
            coeff = v4[:, 0]
            psi = w_op @ coeff
            if val_prev - val <= cfg.opt_step_tol:
                break
            val_prev = val
            frame_a, frame_b = _frames_from_vector(psi, dims)
        return val, frame_a, frame_b

    starts: list[tuple[np.ndarray, np.ndarray]] = [_frames_from_vector(evecs[:, 0], dims)]
    for r in range(cfg.opt_restarts):
        gen = SplitMix64(derive_seed(cfg.seed, r))
        kind = r % 3
        if kind == 0:
            starts.append((random_isometry(gen, ma, 2), random_isometry(gen, mb, 2)))
        elif kind == 1:
            c = gen.unit_vector(span)
            starts.append(_frames_from_vector(evecs[:, :span] @ c, dims))
        else:
            a0 = gen.unit_vector(ma)
            b0 = gen.unit_vector(mb)
            _, a1, b1 = _product_descent(x4, dims, a0, b0, cfg.opt_max_iters, cfg.opt_step_tol)
            starts.append((_complete_to_frame(gen, a1), _complete_to_frame(gen, b1)))

    best_val = np.inf
    best_frames: Optional[tuple[np.ndarray, np.ndarray]] = None
    for frame_a, frame_b in starts:
        val, fa, fb = run(frame_a, frame_b)
        if val < best_val:
            best_val = val
            best_frames = (fa, fb)
    assert best_frames is not None
    fa, fb = best_frames
    w_op = np.kron(fa, fb)
    comp = w_op.conj().T @ m @ w_op
    comp = (comp + comp.conj().T) / 2
    w4, v4 = np.linalg.eigh(comp)
    ansatz = Rank2Ansatz(fa, fb, v4[:, 0].reshape(2, 2))
    psi = ansatz.vector()
    value = float(np.real(psi.conj() @ m @ psi))
    return value, ansatz


def _make_certificate(
    psi: np.ndarray,
    state: BipartiteState,
    route: str,
    cfg: ToleranceConfig,
    copies: int = 1,
    delta: Optional[float] = None,
) -> WitnessCertificate:
    v = np.asarray(psi, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    value = pt_quadratic_form(v, state, copies)
    if copies == 1:
        dims = state.dims
    else:
        dims = Dims(state.dims.dim_a**copies, state.dims.dim_b**copies)
    rank = schmidt_rank(v, dims, cfg)
    return WitnessCertificate(
        psi=PureState(v, dims),
        value=value,
        copies=copies,
        route=route,
        schmidt_rank=rank,
        seed=cfg.seed,
        restarts=cfg.opt_restarts,
        delta=delta,
    )


def submatrix_2x2_scan(
    state: BipartiteState, cfg: ToleranceConfig = DEFAULT_TOL
) -> Optional[ScanHit]:
    """Scan the partial transpose for a negative-determinant 2x2 principal minor.

    Only minors whose diagonal entries sit in different A-blocks can be
    negative (the diagonal blocks are PSD).  The deepest violation wins;
    the witness is the bottom eigenvector of the corresponding 2xN
    principal cut, which has Schmidt rank at most 2 by construction.
    Returns ``None`` when no qualifying minor exists (e.g. PPT input).
    """
    ma, mb = state.dims
    pt = partial_transpose(state.mat, state.dims)
    diag = pt.diagonal().real
    scale = max(float(np.abs(pt).max()), 1.0)
    best_det = -_DET_TOL * scale * scale
    best: Optional[tuple[int, int]] = None
    for r in range(state.dims.total):
        kr = r // mb
        for s in range(r + 1, state.dims.total):
            if s // mb == kr:
                continue
            det = diag[r] * diag[s] - abs(pt[r, s]) ** 2
            if det < best_det:
                best_det = det
                best = (r, s)
    if best is None:
        return None
    r, s = best
    k, l = r // mb, s // mb
    rows = list(range(k * mb, (k + 1) * mb)) + list(range(l * mb, (l + 1) * mb))
    block = pt[np.ix_(rows, rows)]
    block = (block + block.conj().T) / 2
    w, v = np.linalg.eigh(block)
    psi = np.zeros(state.dims.total, dtype=complex)
    psi[rows] = v[:, 0]
    cert = _make_certificate(psi, state, ROUTE_SUBMATRIX, cfg)
    return ScanHit(blocks=(k, l), indices=(r, s), determinant=float(best_det), certificate=cert)


def two_nonpositive_witness(
    state: BipartiteState, cfg: ToleranceConfig = DEFAULT_TOL
) -> Optional[WitnessCertificate]:
    """Witness from two nonpositive eigenvalues of a two-qutrit partial transpose.

    Requires the smallest eigenvalue below ``-psd_tol`` and the second
    smallest at most ``psd_tol``; returns ``None`` otherwise.  If the
    bottom eigenvector has a singular 3x3 matricization it is itself a
    witness; otherwise a combination ``alpha + t*beta`` with singular
    matricization is built from a nonzero eigenvalue of ``A^-1 B``.  When
    that matrix is nilpotent, the bottom eigenvector is perturbed with
    shrinking magnitudes until the construction goes through.
    """
    if tuple(state.dims) != (3, 3):
        raise DimensionMismatchError("two-nonpositive route applies to 3x3 systems")
    pt = partial_transpose(state.mat, state.dims)
    spec = hermitian_eig(pt, cfg)
    lam, mu = float(spec.eigenvalues[0]), float(spec.eigenvalues[1])
    if lam >= -cfg.psd_tol or mu > cfg.psd_tol:
        return None
    alpha = spec.eigenvectors[:, 0]
    beta = spec.eigenvectors[:, 1]
    mat_a = alpha.reshape(3, 3)
    mat_b = beta.reshape(3, 3)
    if rank_kernel_range(mat_a, cfg)[0] <= 2:
        return _make_certificate(alpha, state, ROUTE_TWO_NONPOSITIVE, cfg)
    if mu < -cfg.psd_tol and rank_kernel_range(mat_b, cfg)[0] <= 2:
        return _make_certificate(beta, state, ROUTE_TWO_NONPOSITIVE, cfg)

    def combine(vec: np.ndarray, mat_v: np.ndarray) -> Optional[tuple[float, np.ndarray]]:
        """Best usable witness alpha' + t*beta with det(A' + tB) = 0, if any."""
        n_mat = np.linalg.solve(mat_v, mat_b)
        eigs = np.linalg.eigvals(n_mat)
        n_norm = float(np.linalg.norm(n_mat, 2))
        usable = [s for s in eigs if abs(s) > cfg.rank_rel_tol * max(n_norm, 1e-300)]
        best: Optional[tuple[float, np.ndarray]] = None
        for s in sorted(usable, key=abs, reverse=True):
            t = -1.0 / s
            phi = vec + t * beta
            phi = phi / np.linalg.norm(phi)
            val = float(np.real(phi.conj() @ pt @ phi))
            if val >= -cfg.psd_tol or schmidt_rank(phi, state.dims, cfg) > 2:
                continue
            if best is None or val < best[0]:
                best = (val, phi)
        return best

    cand = combine(alpha, mat_a)
    if cand is not None:
        return _make_certificate(cand[1], state, ROUTE_TWO_NONPOSITIVE, cfg)

    # nilpotent (or numerically unusable) A^-1 B: nudge the bottom eigenvector
    for attempt in range(cfg.opt_restarts):
        delta = 10.0 ** (-2 - (attempt % 5))
        gen = SplitMix64(derive_seed(cfg.seed, 1_000_000 + attempt))
        eta = gen.unit_vector(9)
        alpha_p = alpha + delta * eta
        alpha_p = alpha_p / np.linalg.norm(alpha_p)
        if float(np.real(alpha_p.conj() @ pt @ alpha_p)) >= -cfg.psd_tol:
            continue
        mat_ap = alpha_p.reshape(3, 3)
        if rank_kernel_range(mat_ap, cfg)[0] <= 2:
            return _make_certificate(
                alpha_p, state, ROUTE_TWO_NONPOSITIVE, cfg, delta=delta
            )
        cand = combine(alpha_p, mat_ap)
        if cand is not None:
            return _make_certificate(
                cand[1], state, ROUTE_TWO_NONPOSITIVE, cfg, delta=delta
            )
    raise NumericalFailureError(
        "perturbation schedule exhausted without breaking nilpotency"
    )


def product_vector_in_subspace(
    basis: np.ndarray, dims: Dims, cfg: ToleranceConfig = DEFAULT_TOL
) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """Search a subspace (orthonormal basis columns) for a product vector.

    Minimizes the violation of the orthogonal-complement constraints over
    local unit vectors by alternating closed-form singular-vector steps;
    a solution must drive the smallest singular value of the constraint
    matrix below 1e-8.  ``None`` after restart exhaustion is a legitimate
    "no product vector found" outcome, except for subspaces of dimension
    at least 5 in a 3x3 system, where a product vector provably exists
    and emptiness is flagged as an optimizer failure.
    """
    ma, mb = dims
    if max(ma, mb) > 4:
        raise DimensionMismatchError("product-vector search supports local dims <= 4")
    b_mat = np.asarray(basis, dtype=complex)
    if b_mat.ndim != 2 or b_mat.shape[0] != dims.total:
        raise DimensionMismatchError("basis must have one column per spanning vector")
    k = b_mat.shape[1]
    if k == 0:
        return None
    if k == dims.total:
        a = np.zeros(ma, dtype=complex)
        a[0] = 1.0
        b = np.zeros(mb, dtype=complex)
        b[0] = 1.0
        return a, b
    u_full, _, _ = np.linalg.svd(b_mat)
    comp = u_full[:, k:]
    # constraint tensor: <k_i | a (x) b> = a^T conj(K_i) b
    ck = comp.conj().T.reshape(comp.shape[1], ma, mb)

    for r in range(cfg.opt_restarts):
        gen = SplitMix64(derive_seed(cfg.seed, 2_000_000 + r))
        a = gen.unit_vector(ma)
        b = gen.unit_vector(mb)
        smin_prev = np.inf
        for _ in range(cfg.opt_max_iters):
            c_of_a = np.einsum("dmn,m->dn", ck, a)
            _, s, vh = np.linalg.svd(c_of_a)
            b = vh[-1, :].conj()
            d_of_b = np.einsum("dmn,n->dm", ck, b)
            _, s, vh = np.linalg.svd(d_of_b)
            a = vh[-1, :].conj()
            smin = float(s[-1])
            if smin < 1e-9 or smin_prev - smin <= cfg.opt_step_tol:
                break
            smin_prev = smin
        c_of_a = np.einsum("dmn,m->dn", ck, a)
        residual = float(np.linalg.norm(c_of_a @ b))
        if residual < 1e-7 and float(np.linalg.svd(c_of_a, compute_uv=False)[-1]) < 1e-8:
            return a, b
    if (ma, mb) == (3, 3) and k >= (ma - 1) * (mb - 1) + 1:
        warnings.warn(
            "no product vector found in a subspace where one provably exists; "
            "optimizer failure",
            RuntimeWarning,
            stacklevel=2,
        )
    return None


def _rotate_to_first(vec: np.ndarray) -> np.ndarray:
    """Unitary sending ``vec`` to the first basis vector."""
    d = vec.size
    cols = [vec / np.linalg.norm(vec)]
    for i in range(d):
        e = np.zeros(d, dtype=complex)
        e[i] = 1.0
        for c in cols:
            e = e - c * (c.conj() @ e)
        nrm = float(np.linalg.norm(e))
        if nrm > 1e-10:
            cols.append(e / nrm)
        if len(cols) == d:
            break
    q = np.column_stack(cols)
    return q.conj().T


def kernel_product_witness(
    state: BipartiteState, cfg: ToleranceConfig = DEFAULT_TOL
) -> Optional[WitnessCertificate]:
    """Witness for a two-qutrit NPT state whose kernel contains a product vector.

    Local unitaries move the product vector to |0,0>, after which either
    the 2x2-minor scan fires on the first column of the rotated partial
    transpose, or |0,0> also lies in its kernel and the two-nonpositive
    route applies.  The certificate is mapped back to the original basis.
    """
    if tuple(state.dims) != (3, 3):
        raise DimensionMismatchError("kernel-product route applies to 3x3 systems")
    if is_ppt(state, cfg):
        return None
    rank, kernel, _ = rank_kernel_range(state.mat, cfg)
    if kernel.shape[1] == 0:
        return None
    found = product_vector_in_subspace(kernel, state.dims, cfg)
    if found is None:
        return None
    a, b = found
    u = _rotate_to_first(a)
    v = _rotate_to_first(b)
    uv = np.kron(u, v)
    rotated = BipartiteState(uv @ state.mat @ uv.conj().T, state.dims, cfg)
    pullback = np.kron(u.T, v.conj().T)

    hit = submatrix_2x2_scan(rotated, cfg)
    cert_rotated: Optional[WitnessCertificate] = None
    if hit is not None and _usable(hit.certificate, cfg):
        cert_rotated = hit.certificate
    if cert_rotated is None:
        cert_rotated = two_nonpositive_witness(rotated, cfg)
    if cert_rotated is None:
        return None
    psi = pullback @ cert_rotated.psi.vec
    cert = _make_certificate(psi, state, ROUTE_KERNEL_PRODUCT, cfg)
    if not _usable(cert, cfg):
        return None
    return cert


def _usable(cert: Optional[WitnessCertificate], cfg: ToleranceConfig) -> bool:
    return cert is not None and cert.schmidt_rank <= 2 and cert.value < -cfg.psd_tol


def certify_1_distillable(
    state: BipartiteState, cfg: ToleranceConfig = DEFAULT_TOL
) -> Optional[WitnessCertificate]:
    """Try every constructive route, then the generic minimizer.

    Returns the first verifiable certificate, or ``None`` when no witness
    with value below ``-psd_tol`` was found.  ``None`` on its own is not a
    proof of undistillability.
    """
    if is_ppt(state, cfg):
        return None
    ma, mb = state.dims
    if min(ma, mb) == 2:
        pt = partial_transpose(state.mat, state.dims)
        spec = hermitian_eig(pt, cfg)
        return _make_certificate(spec.eigenvectors[:, 0], state, ROUTE_OPTIMIZER, cfg)
    hit = submatrix_2x2_scan(state, cfg)
    if hit is not None and _usable(hit.certificate, cfg):
        return hit.certificate
    if (ma, mb) == (3, 3):
        cert = two_nonpositive_witness(state, cfg)
        if _usable(cert, cfg):
            return cert
        cert = kernel_product_witness(state, cfg)
        if _usable(cert, cfg):
            return cert
    _, cert = best_rank2_witness(state, 1, cfg)
    return cert


def best_rank2_witness(
    state: BipartiteState, copies: int = 1, cfg: ToleranceConfig = DEFAULT_TOL
) -> tuple[float, Optional[WitnessCertificate]]:
    """Best rank-2 value of the n-copy partial transpose, plus a certificate.

    The certificate is present exactly when the best value found drops
    below ``-psd_tol``; the value itself is always reported (a positive
    best value over many restarts is evidence, not proof, of
    undistillability).
    """
    if copies == 1:
        mat, dims = state.mat, state.dims
    else:
        mat, dims = regroup_tensor_power(state.mat, state.dims, copies)
    pt = partial_transpose(mat, dims)
    value, ansatz = min_rank2_expectation(pt, dims, cfg)
    if value < -cfg.psd_tol:
        cert = _make_certificate(
            ansatz.vector(), state, ROUTE_OPTIMIZER, cfg, copies=copies
        )
        if _usable(cert, cfg):
            return value, cert
    return value, None


def verify_certificate(
    cert: WitnessCertificate,
    state: BipartiteState,
    copies: Optional[int] = None,
    cfg: ToleranceConfig = DEFAULT_TOL,
) -> bool:
    """Recompute a certificate from raw data and check it end to end.

    True iff the witness has Schmidt rank at most 2 across the n-copy
    bipartition, its recomputed value is below ``-psd_tol``, and the
    stored value matches the recomputation to 1e-10.
    """
    n = cert.copies if copies is None else copies
    psi = cert.psi.vec
    dims = Dims(state.dims.dim_a**n, state.dims.dim_b**n)
    if psi.size != dims.total:
        raise DimensionMismatchError("certificate dimension does not match state/copies")
    rank = schmidt_rank(psi, dims, cfg)
    value = pt_quadratic_form(psi, state, n)
    return bool(rank <= 2 and value < -cfg.psd_tol and abs(value - cert.value) <= 1e-10)

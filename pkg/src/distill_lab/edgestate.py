"""The two-parameter family of two-qutrit PPT edge states and its NPT offspring.

``edge_state(b, theta)`` is entangled, PPT, trace one, of rank 5, and its
partial transpose has rank 8 with kernel spanned by the maximally
entangled state.  Subtracting a small multiple of the product vector
sitting in its range produces an NPT state of rank 5 that provably admits
no 1-copy witness: the best rank-2 value of its partial transpose is at
least ``gap/3 - eps``, where ``gap`` is the smallest positive eigenvalue
of the edge state's partial transpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .qcore import (
    DEFAULT_TOL,
    BipartiteState,
    Dims,
    InvariantViolationError,
    NumericalFailureError,
    PureState,
    ToleranceConfig,
    is_ppt,
    partial_transpose,
    rank_kernel_range,
)
from .rng import SplitMix64, derive_seed
from .witness import certify_1_distillable, min_rank2_expectation

QUTRIT_PAIR = Dims(3, 3)

#: representative interior points of the admissible (b, theta) region
DEFAULT_GRID: tuple[tuple[float, float], ...] = tuple(
    (b, th)
    for b in (0.5, 1.0, 2.0)
    for th in (math.pi / 6, -math.pi / 6, math.pi / 4, -math.pi / 4)
)


@dataclass(frozen=True)
class EdgeParams:
    """Family parameters: scale ``b > 0``, phase ``0 < |theta| < pi/3``, noise ``eps``."""

    b: float
    theta: float
    eps: float = 0.0

    def __post_init__(self) -> None:
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")
        if not 0.0 < abs(self.theta) < math.pi / 3:
            raise ValueError(
                f"theta must satisfy 0 < |theta| < pi/3, got {self.theta}"
            )
        if self.eps < 0:
            raise ValueError(f"eps must be nonnegative, got {self.eps}")


@dataclass(frozen=True)
class EdgeBundle:
    """An edge state together with everything derived from it."""

    params: EdgeParams
    edge: BipartiteState
    edge_pt: np.ndarray
    p1: float
    mes: PureState
    factor_a: np.ndarray
    factor_b: np.ndarray
    eps: float
    npt_state: BipartiteState
    margin: float


def maximally_entangled_qutrits() -> PureState:
    """(|00> + |11> + |22>) / sqrt(3)."""
    v = np.zeros(9, dtype=complex)
    v[0] = v[4] = v[8] = 1.0 / math.sqrt(3.0)
    return PureState(v, QUTRIT_PAIR)


def edge_state(params: EdgeParams, cfg: ToleranceConfig = DEFAULT_TOL) -> BipartiteState:
    """The 9x9 edge-family density matrix; Hermitian, PSD, trace 1, rank 5."""
    b, th = params.b, params.theta
    c = math.cos(th)
    ep = complex(math.cos(th), math.sin(th))
    em = ep.conjugate()
    s = np.zeros((9, 9), dtype=complex)
    s[0, 0] = 2 * c
    s[0, 4] = s[0, 8] = -c
    s[1, 1] = 1 / b
    s[1, 3] = -em
    s[2, 2] = b
    s[2, 6] = -ep
    s[3, 1] = -ep
    s[3, 3] = b
    s[4, 0] = -c
    s[4, 4] = 2 * c
    s[4, 8] = -c
    s[5, 5] = 1 / b
    s[5, 7] = -em
    s[6, 2] = -em
    s[6, 6] = 1 / b
    s[7, 5] = -ep
    s[7, 7] = b
    s[8, 0] = s[8, 4] = -c
    s[8, 8] = 2 * c
    s /= 3 * (2 * c + b + 1 / b)
    return BipartiteState(s, QUTRIT_PAIR, cfg)


def edge_state_pt(params: EdgeParams) -> np.ndarray:
    """Closed form of the edge state's partial transpose.

    Entrywise identical (exactly, both being assembled from the same
    scalars) to ``partial_transpose(edge_state(params))``.
    """
    b, th = params.b, params.theta
    c = math.cos(th)
    ep = complex(math.cos(th), math.sin(th))
    em = ep.conjugate()
    g = np.zeros((9, 9), dtype=complex)
    g[0, 0] = 2 * c
    g[0, 4] = -ep
    g[0, 8] = -em
    g[1, 1] = 1 / b
    g[1, 3] = -c
    g[2, 2] = b
    g[2, 6] = -c
    g[3, 1] = -c
    g[3, 3] = b
    g[4, 0] = -em
    g[4, 4] = 2 * c
    g[4, 8] = -ep
    g[5, 5] = 1 / b
    g[5, 7] = -c
    g[6, 2] = -c
    g[6, 6] = 1 / b
    g[7, 5] = -c
    g[7, 7] = b
    g[8, 0] = -ep
    g[8, 4] = -em
    g[8, 8] = 2 * c
    g /= 3 * (2 * c + b + 1 / b)
    return g


def min_positive_pt_eigenvalue(params: EdgeParams) -> float:
    """Smallest positive eigenvalue of the edge state's partial transpose.

    Closed form; cross-checked against the eigendecomposition in the test
    suite.  Symmetric under theta -> -theta.
    """
    b, th = params.b, params.theta
    c = math.cos(th)
    first = 3 * c - math.sqrt(3.0) * abs(math.sin(th))
    second = (1 + b * b - math.sqrt(1 + b**4 + 2 * b * b * math.cos(2 * th))) / (2 * b)
    return min(first, second) / (6 * c + 3 * b + 3 / b)


def range_product_vector(
    params: EdgeParams, cfg: ToleranceConfig = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """The product vector in the edge state's range, phase convention fixed.

    Returns local factors ``(f, g)`` with the joint normalization
    ``1/(sqrt(b) + 1/sqrt(b))`` folded into ``f``, so ``kron(f, g)`` is the
    unit vector
    ``(|0> + sqrt(b) e^{i theta/2} |1>)(|0> - e^{-i theta/2}/sqrt(b) |1>)``
    up to that prefactor.  Verifies membership in the range and that the
    conjugated version leaves the range of the partial transpose.
    """
    b, th = params.b, params.theta
    rb = math.sqrt(b)
    phase = complex(math.cos(th / 2), math.sin(th / 2))
    f = np.array([1.0, rb * phase, 0.0], dtype=complex) / (rb + 1 / rb)
    g = np.array([1.0, -phase.conjugate() / rb, 0.0], dtype=complex)

    fg = np.kron(f, g)
    sigma = edge_state(params, cfg)
    _, kernel, _ = rank_kernel_range(sigma.mat, cfg)
    residual = float(np.linalg.norm(kernel.conj().T @ fg))
    if residual > 1e-10:
        raise NumericalFailureError(
            f"product vector failed range membership (residual {residual:.3e})"
        )
    mes = maximally_entangled_qutrits().vec
    overlap = abs(complex(mes.conj() @ np.kron(f.conj(), g)))
    if overlap <= 1e-6:
        raise NumericalFailureError(
            f"conjugated product vector unexpectedly orthogonal to the"
            f" PT kernel (overlap {overlap:.3e})"
        )
    return f, g


def build_edge_bundle(
    params: EdgeParams, cfg: ToleranceConfig = DEFAULT_TOL
) -> EdgeBundle:
    """Assemble the edge state, its NPT rank-5 perturbation, and the margin.

    ``eps`` defaults to 0.9 * gap/3 when the parameters carry none.  If the
    perturbed matrix fails the PSD check at the requested ``eps``, the
    noise is halved until it passes (the actually used value is recorded);
    shrinking below 1e-12 raises a numerical failure.
    """
    sigma = edge_state(params, cfg)
    gap = min_positive_pt_eigenvalue(params)
    eps = params.eps if params.eps > 0 else 0.9 * gap / 3
    if eps > gap / 3 + 1e-15:
        raise ValueError(f"eps={eps} exceeds the undistillability budget {gap / 3}")
    f, g = range_product_vector(params, cfg)
    proj = np.outer(np.kron(f, g), np.kron(f, g).conj())

    while True:
        candidate = sigma.mat - eps * proj
        if float(np.linalg.eigvalsh(candidate)[0]) >= -cfg.psd_tol:
            break
        eps /= 2
        if eps < 1e-12:
            raise NumericalFailureError("eps shrank below 1e-12 without reaching PSD")
    npt_state = BipartiteState(candidate, QUTRIT_PAIR, cfg)

    rank = rank_kernel_range(npt_state.mat, cfg)[0]
    if rank != 5:
        raise InvariantViolationError(f"perturbed edge state has rank {rank}, not 5")
    pt_evals = np.linalg.eigvalsh(partial_transpose(npt_state.mat, QUTRIT_PAIR))
    if pt_evals[0] >= -cfg.psd_tol:
        raise InvariantViolationError("perturbed edge state is not NPT")

    return EdgeBundle(
        params=params,
        edge=sigma,
        edge_pt=edge_state_pt(params),
        p1=gap,
        mes=maximally_entangled_qutrits(),
        factor_a=f,
        factor_b=g,
        eps=eps,
        npt_state=npt_state,
        margin=gap / 3 - eps,
    )


def undistillability_margin(
    bundle: EdgeBundle, cfg: ToleranceConfig = DEFAULT_TOL
) -> float:
    """Proven lower bound gap/3 - eps on the best rank-2 value of the PT.

    Also runs the numeric minimizer and demands it never undercut the
    bound; a violation would indicate a bookkeeping bug, not new physics.
    """
    bound = bundle.p1 / 3 - bundle.eps
    pt = partial_transpose(bundle.npt_state.mat, bundle.npt_state.dims)
    value, _ = min_rank2_expectation(pt, bundle.npt_state.dims, cfg)
    if value < bound - 1e-8:
        raise InvariantViolationError(
            f"rank-2 minimum {value} violates the proven bound {bound}"
        )
    return bound


def distillable_of_rank(
    base: BipartiteState,
    rank_target: int,
    eps: float,
    cfg: ToleranceConfig = DEFAULT_TOL,
) -> BipartiteState:
    """Raise a rank-4 NPT two-qutrit state to a 1-distillable state of rank 5..9.

    Adds ``eps`` times projectors onto randomly drawn product vectors that
    extend the base range to the full space; the noise is halved until the
    result stays NPT and certifiably 1-distillable.
    """
    if tuple(base.dims) != (3, 3):
        raise ValueError("rank-raising construction is defined for 3x3 states")
    if not 5 <= rank_target <= 9:
        raise ValueError("target rank must lie in 5..9")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    base_rank, _, range_basis = rank_kernel_range(base.mat, cfg)
    if base_rank != 4:
        raise ValueError(f"base state must have rank 4, got {base_rank}")
    if is_ppt(base, cfg):
        raise ValueError("base state must be NPT")
    if eps == 0:
        return base

    products: Optional[list[np.ndarray]] = None
    for attempt in range(cfg.opt_restarts):
        gen = SplitMix64(derive_seed(cfg.seed, 3_000_000 + attempt))
        cand = [np.kron(gen.unit_vector(3), gen.unit_vector(3)) for _ in range(5)]
        stacked = np.column_stack([range_basis] + cand)
        if rank_kernel_range(stacked, cfg)[0] == 9:
            products = cand
            break
    if products is None:
        raise NumericalFailureError("could not extend the base range to full space")

    extra = rank_target - 4
    bump = sum(np.outer(p, p.conj()) for p in products[:extra])
    for _ in range(60):
        candidate = BipartiteState(base.mat + eps * bump, base.dims, cfg)
        ok_rank = rank_kernel_range(candidate.mat, cfg)[0] == rank_target
        if not ok_rank:
            raise NumericalFailureError(
                f"eps={eps} too small to realize rank {rank_target} numerically"
            )
        if not is_ppt(candidate, cfg) and certify_1_distillable(candidate, cfg) is not None:
            return candidate
        eps /= 2
    raise NumericalFailureError("noise halving exhausted without an NPT distillable state")

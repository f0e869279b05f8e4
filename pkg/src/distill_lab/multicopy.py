"""Many-copy bounds: the separable Werner projector and copy-count thresholds.

The projector onto the complement of the maximally entangled two-qutrit
state (normalized to trace one) is separable, so its tensor powers admit
no witness; the extremal rank-2 values of those powers are pinned to
``1/8^n`` from above and ``1/24^n`` from below.  The open question whether
the true minimum equals ``(1/2) * 12^-n`` is probed numerically and
reported, never asserted.  Combining the lower bound with an operator-norm
expansion yields an explicit noise threshold ``eps(n)`` below which the
rank-5 NPT edge perturbation stays n-undistillable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .edgestate import (
    EdgeBundle,
    EdgeParams,
    build_edge_bundle,
    edge_state_pt,
    maximally_entangled_qutrits,
    min_positive_pt_eigenvalue,
)
from .qcore import (
    DEFAULT_TOL,
    BipartiteState,
    Dims,
    InvariantViolationError,
    PureState,
    ToleranceConfig,
    partial_transpose,
    regroup_tensor_power,
)
from .witness import min_rank2_expectation

QUTRIT_PAIR = Dims(3, 3)


@dataclass(frozen=True)
class MulticopyReport:
    """Extremal rank-2 values of an n-copy operator plus the relevant bounds.

    ``bound_lower`` is proven; ``conjecture_value`` (Werner target only) is
    the open conjecture ``(1/2) * 12^-n``, reported for distance only.
    ``eps_threshold`` (edge target only) is the engineering bound on the
    noise that keeps the state n-undistillable; it implies, but is
    stronger than, the bare existence claim.
    """

    n: int
    target: str
    max_value: float
    max_witness: PureState
    min_value: float
    min_witness: PureState
    bound_lower: float
    conjecture_value: Optional[float]
    margin_estimate: float
    eps_threshold: Optional[float]
    product_maximizer_value: Optional[float] = None
    eps_used: Optional[float] = None
    npt_min_pt_eigenvalue: Optional[float] = None
    engineering_bound: bool = False


def werner_projector(cfg: ToleranceConfig = DEFAULT_TOL) -> BipartiteState:
    """(identity - MES projector) / 8: separable, trace one, rank eight, PPT."""
    mes = maximally_entangled_qutrits().vec
    mat = (np.eye(9, dtype=complex) - np.outer(mes, mes.conj())) / 8
    return BipartiteState(mat, QUTRIT_PAIR, cfg)


def max_rank2_overlap_with_mes(cfg: ToleranceConfig = DEFAULT_TOL) -> float:
    """Largest squared overlap of a Schmidt-rank-<=2 unit vector with the MES.

    Computed by minimizing the expectation of minus the MES projector;
    the exact answer is 2/3.
    """
    mes = maximally_entangled_qutrits().vec
    value, _ = min_rank2_expectation(-np.outer(mes, mes.conj()), QUTRIT_PAIR, cfg)
    return -value


def _copy_dims(n: int) -> Dims:
    return Dims(3**n, 3**n)


def _product_zeros_ones(n: int) -> np.ndarray:
    """|0...0> on the A factors tensor |1...1> on the B factors."""
    dims = _copy_dims(n)
    vec = np.zeros(dims.total, dtype=complex)
    ones_index = sum(3**k for k in range(n))  # |1...1> in base 3
    vec[0 * dims.dim_b + ones_index] = 1.0
    return vec


def extremal_rank2_tensor_power(
    n: int, cfg: ToleranceConfig = DEFAULT_TOL
) -> MulticopyReport:
    """Extremal rank-2 expectations of the n-fold Werner-projector power.

    The bipartition groups all A factors against all B factors, exactly
    the cut across which witness Schmidt ranks are counted.  Enforces the
    proven bracket [1/24^n, 1/8^n]; reports the distance of the found
    minimum to the conjectured (1/2) * 12^-n.
    """
    if n not in (1, 2):
        raise ValueError(f"copy count capped at 2, got {n}")
    rho_s = werner_projector(cfg)
    mat, dims = regroup_tensor_power(rho_s.mat, rho_s.dims, n)

    min_value, min_ansatz = min_rank2_expectation(mat, dims, cfg)
    neg_max, max_ansatz = min_rank2_expectation(-mat, dims, cfg)
    max_value = -neg_max

    product = _product_zeros_ones(n)
    product_value = float(np.real(product.conj() @ mat @ product))

    bound_lower = 1.0 / 24.0**n
    bound_upper = 1.0 / 8.0**n
    if min_value < bound_lower - 1e-8:
        raise InvariantViolationError(
            f"rank-2 minimum {min_value} undercuts the proven bound {bound_lower};"
            " Schmidt-rank bookkeeping is broken"
        )
    if max_value > bound_upper + 1e-10:
        raise InvariantViolationError(
            f"rank-2 maximum {max_value} exceeds the projector ceiling {bound_upper}"
        )
    return MulticopyReport(
        n=n,
        target="werner",
        max_value=max_value,
        max_witness=PureState(max_ansatz.vector(), dims),
        min_value=min_value,
        min_witness=PureState(min_ansatz.vector(), dims),
        bound_lower=bound_lower,
        conjecture_value=0.5 / 12.0**n,
        margin_estimate=min_value - bound_lower,
        eps_threshold=None,
        product_maximizer_value=product_value,
    )


def undistillability_bound(params: EdgeParams, n: int, eps: float) -> float:
    """Closed-form lower bound on the n-copy rank-2 value at noise ``eps``.

    The leading term is (gap/3)^n; every cross term with k noise factors
    is controlled by operator norms, C(n,k) eps^k ||edge_pt||^(n-k).
    """
    gap = min_positive_pt_eigenvalue(params)
    pt_norm = float(np.linalg.eigvalsh(edge_state_pt(params))[-1])
    bound = (gap / 3.0) ** n
    for k in range(1, n + 1):
        bound -= math.comb(n, k) * eps**k * pt_norm ** (n - k)
    return bound


def eps_threshold_for_copies(
    params: EdgeParams, n: int, bisection_steps: int = 60
) -> float:
    """Largest dyadic noise (within the budget gap/3) keeping the bound positive.

    Monotone bisection over [0, gap/3]; nonincreasing in the copy count.
    """
    if n < 1:
        raise ValueError("copy count must be positive")
    gap = min_positive_pt_eigenvalue(params)
    hi = gap / 3.0
    if undistillability_bound(params, n, hi) > 0.0:
        return hi
    lo = 0.0
    for _ in range(bisection_steps):
        mid = (lo + hi) / 2.0
        if undistillability_bound(params, n, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def verify_n_undistillable(
    params: EdgeParams, n: int, cfg: ToleranceConfig = DEFAULT_TOL
) -> MulticopyReport:
    """Numerically confirm n-copy undistillability of the edge perturbation.

    Builds the NPT rank-5 state at noise ``min(requested-or-default,
    eps_threshold/2)``, minimizes the rank-2 form of the n-copy partial
    transpose, and checks the numeric minimum stays positive and above the
    analytic bound.  A violation raises; it would mean a bug, not a
    distillation protocol.
    """
    if n not in (1, 2):
        raise ValueError(f"copy count capped at 2, got {n}")
    gap = min_positive_pt_eigenvalue(params)
    threshold = eps_threshold_for_copies(params, n)
    requested = params.eps if params.eps > 0 else 0.9 * gap / 3
    eps_used = min(requested, threshold / 2)
    bundle: EdgeBundle = build_edge_bundle(
        EdgeParams(params.b, params.theta, eps_used), cfg
    )

    pt = partial_transpose(bundle.npt_state.mat, bundle.npt_state.dims)
    mat, dims = regroup_tensor_power(pt, bundle.npt_state.dims, n)
    min_value, min_ansatz = min_rank2_expectation(mat, dims, cfg)
    neg_max, max_ansatz = min_rank2_expectation(-mat, dims, cfg)

    bound = undistillability_bound(bundle.params, n, bundle.eps)
    if min_value <= 0.0 or min_value < bound - 1e-8:
        raise InvariantViolationError(
            f"n={n} rank-2 minimum {min_value} fell below the analytic bound {bound}"
        )
    npt_min = float(np.linalg.eigvalsh(pt)[0])
    return MulticopyReport(
        n=n,
        target="rho",
        max_value=-neg_max,
        max_witness=PureState(max_ansatz.vector(), dims),
        min_value=min_value,
        min_witness=PureState(min_ansatz.vector(), dims),
        bound_lower=bound,
        conjecture_value=None,
        margin_estimate=min_value - bound,
        eps_threshold=threshold,
        eps_used=bundle.eps,
        npt_min_pt_eigenvalue=npt_min,
        engineering_bound=True,
    )

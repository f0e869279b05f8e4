"""Reproducible random-state ensembles and the claim-verification suites.

States are Ginibre-style ``G G*`` draws with ``G`` filled from the
portable SplitMix64/Box-Muller stream, so a (seed, trial) pair pins every
sample bit-for-bit.  Suites never abort on a failed trial: failures are
serialized counterexamples in the report, because a tolerance miss is
diagnostic data.  Only a stalled rejection filter (10000 consecutive
rejections) raises.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .edgestate import (
    DEFAULT_GRID,
    EdgeParams,
    build_edge_bundle,
    edge_state,
    edge_state_pt,
    maximally_entangled_qutrits,
    min_positive_pt_eigenvalue,
    range_product_vector,
)
from .multicopy import (
    extremal_rank2_tensor_power,
    verify_n_undistillable,
    werner_projector,
)
from .qcore import (
    DEFAULT_TOL,
    BipartiteState,
    Dims,
    NumericalFailureError,
    ToleranceConfig,
    partial_transpose,
    rank_kernel_range,
    regroup_tensor_power,
)
from .rng import SplitMix64, derive_seed
from .serialize import matrix_document
from .witness import (
    certify_1_distillable,
    product_vector_in_subspace,
    submatrix_2x2_scan,
    two_nonpositive_witness,
    verify_certificate,
)

SUITE_NAMES = (
    "theorem-rank4",
    "theorem-two-eigs",
    "lemma-2x2",
    "edge-family",
    "multicopy",
)

FILTERS = ("any", "NPT", "PPT", "kernelHasProduct", "twoNonpositivePT")

_MAX_CONSECUTIVE_REJECTS = 10_000


@dataclass(frozen=True)
class EnsembleSpec:
    """What to sample: dimensions, rank, how many, an acceptance filter, a seed."""

    dims: Dims = Dims(3, 3)
    rank: int = 4
    count: int = 100
    filter: str = "any"
    seed: int = 2024

    def __post_init__(self) -> None:
        if self.rank < 1 or self.rank > self.dims.total:
            raise ValueError(f"rank must lie in 1..{self.dims.total}")
        if self.count < 1:
            raise ValueError("count must be positive")
        if self.filter not in FILTERS:
            raise ValueError(f"unknown filter {self.filter!r}; choose from {FILTERS}")


@dataclass
class SuiteReport:
    """Outcome of one verification suite; failures carry counterexamples."""

    suite: str
    trials: int
    passes: int
    failures: list[dict] = field(default_factory=list)
    skipped: int = 0
    wall_time_s: float = 0.0
    config: dict = field(default_factory=dict)
    rejection_rate: Optional[float] = None
    sub_reports: list["SuiteReport"] = field(default_factory=list)

    def to_document(self) -> dict:
        doc = {
            "suite": self.suite,
            "trials": self.trials,
            "passes": self.passes,
            "failures": self.failures,
            "skipped": self.skipped,
            "wall_time_s": self.wall_time_s,
            "config": self.config,
        }
        if self.rejection_rate is not None:
            doc["rejection_rate"] = self.rejection_rate
        if self.sub_reports:
            doc["sub_reports"] = [r.to_document() for r in self.sub_reports]
        return doc


def random_state(
    dims: Dims, rank: int, seed: int, cfg: ToleranceConfig = DEFAULT_TOL
) -> BipartiteState:
    """Trace-normalized ``G G*`` with G a (dims.total x rank) complex Gaussian."""
    if not 1 <= rank <= dims.total:
        raise ValueError(f"rank must lie in 1..{dims.total}, got {rank}")
    gen = SplitMix64(seed)
    g = gen.complex_matrix(dims.total, rank)
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    state = BipartiteState(mat, dims, cfg)
    got = rank_kernel_range(mat, cfg)[0]
    if got != rank:
        raise NumericalFailureError(
            f"sampled state has numeric rank {got}, expected {rank}"
        )
    return state


def _pt_eigenvalues(state: BipartiteState) -> np.ndarray:
    return np.linalg.eigvalsh(partial_transpose(state.mat, state.dims))


def _passes_filter(state: BipartiteState, name: str, cfg: ToleranceConfig) -> bool:
    if name == "any":
        return True
    evals = _pt_eigenvalues(state)
    if name == "NPT":
        return bool(evals[0] < -cfg.psd_tol)
    if name == "PPT":
        return bool(evals[0] >= -cfg.psd_tol)
    if name == "twoNonpositivePT":
        return bool(evals[0] < -cfg.psd_tol and evals[1] <= cfg.psd_tol)
    if name == "kernelHasProduct":
        kernel = rank_kernel_range(state.mat, cfg)[1]
        if kernel.shape[1] == 0:
            return False
        return product_vector_in_subspace(kernel, state.dims, cfg) is not None
    raise ValueError(f"unknown filter {name!r}")


def sample_ensemble(
    spec: EnsembleSpec, cfg: ToleranceConfig = DEFAULT_TOL
) -> tuple[list[BipartiteState], float]:
    """Rejection-sample the ensemble; returns (states, acceptance rate).

    Aborts with a numerical-failure signal after 10000 consecutive
    rejections, which indicates an unsatisfiable filter.
    """
    states: list[BipartiteState] = []
    attempt = 0
    consecutive = 0
    while len(states) < spec.count:
        state = random_state(spec.dims, spec.rank, derive_seed(spec.seed, attempt), cfg)
        attempt += 1
        if _passes_filter(state, spec.filter, cfg):
            states.append(state)
            consecutive = 0
        else:
            consecutive += 1
            if consecutive >= _MAX_CONSECUTIVE_REJECTS:
                raise NumericalFailureError(
                    f"filter {spec.filter!r} rejected {consecutive} consecutive samples"
                )
    return states, len(states) / attempt


def thread_cap() -> int:
    """Concurrency cap from DISTILL_LAB_THREADS; 1 when unset or invalid."""
    raw = os.environ.get("DISTILL_LAB_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _run_trials(bodies: list[Callable[[], Optional[dict]]]) -> list[Optional[dict]]:
    """Evaluate trial bodies, optionally threaded; order-stable reduction."""
    cap = thread_cap()
    if cap <= 1 or len(bodies) <= 1:
        return [body() for body in bodies]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        futures = [pool.submit(body) for body in bodies]
        return [f.result() for f in futures]


def _counterexample(trial: int, state: BipartiteState, reason: str, **extra) -> dict:
    doc = {
        "trial": trial,
        "reason": reason,
        "state": matrix_document(state.mat, state.dims),
    }
    doc.update(extra)
    return doc


def _config_echo(spec: EnsembleSpec, cfg: ToleranceConfig) -> dict:
    return {
        "dims": [spec.dims.dim_a, spec.dims.dim_b],
        "rank": spec.rank,
        "count": spec.count,
        "filter": spec.filter,
        "seed": spec.seed,
        "psd_tol": cfg.psd_tol,
        "rank_rel_tol": cfg.rank_rel_tol,
        "opt_restarts": cfg.opt_restarts,
    }


def _suite_rank4(spec: EnsembleSpec, cfg: ToleranceConfig) -> SuiteReport:
    spec = replace(spec, rank=4, filter="NPT")
    states, rate = sample_ensemble(spec, cfg)

    def body(idx: int, state: BipartiteState) -> Optional[dict]:
        cert = certify_1_distillable(state, cfg)
        if cert is None:
            return _counterexample(idx, state, "no certificate found")
        if not verify_certificate(cert, state, cfg=cfg):
            return _counterexample(
                idx, state, "certificate failed verification", value=cert.value
            )
        return None

    outcomes = _run_trials([lambda i=i, s=s: body(i, s) for i, s in enumerate(states)])
    failures = [o for o in outcomes if o is not None]
    return SuiteReport(
        suite="theorem-rank4",
        trials=len(states),
        passes=len(states) - len(failures),
        failures=failures,
        config=_config_echo(spec, cfg),
        rejection_rate=rate,
    )


def _suite_two_eigs(spec: EnsembleSpec, cfg: ToleranceConfig) -> SuiteReport:
    spec = replace(spec, filter="twoNonpositivePT")
    states, rate = sample_ensemble(spec, cfg)

    def body(idx: int, state: BipartiteState) -> Optional[dict]:
        cert = two_nonpositive_witness(state, cfg)
        if cert is None:
            return _counterexample(idx, state, "two-nonpositive route returned empty")
        if not verify_certificate(cert, state, cfg=cfg):
            return _counterexample(
                idx, state, "certificate failed verification", value=cert.value
            )
        return None

    outcomes = _run_trials([lambda i=i, s=s: body(i, s) for i, s in enumerate(states)])
    failures = [o for o in outcomes if o is not None]
    return SuiteReport(
        suite="theorem-two-eigs",
        trials=len(states),
        passes=len(states) - len(failures),
        failures=failures,
        config=_config_echo(spec, cfg),
        rejection_rate=rate,
    )


def _suite_lemma_2x2(spec: EnsembleSpec, cfg: ToleranceConfig) -> SuiteReport:
    states, rate = sample_ensemble(spec, cfg)
    failures: list[dict] = []
    skipped = 0
    qualifying = 0
    for idx, state in enumerate(states):
        hit = submatrix_2x2_scan(state, cfg)
        if hit is None:
            skipped += 1
            continue
        qualifying += 1
        if not verify_certificate(hit.certificate, state, cfg=cfg):
            failures.append(
                _counterexample(
                    idx,
                    state,
                    "negative minor did not yield a verified certificate",
                    determinant=hit.determinant,
                    value=hit.certificate.value,
                )
            )
    return SuiteReport(
        suite="lemma-2x2",
        trials=qualifying,
        passes=qualifying - len(failures),
        failures=failures,
        skipped=skipped,
        config=_config_echo(spec, cfg),
        rejection_rate=rate,
    )


def _edge_point_checks(b: float, theta: float, cfg: ToleranceConfig) -> list[str]:
    problems: list[str] = []
    params = EdgeParams(b, theta)
    sigma = edge_state(params, cfg)
    closed = edge_state_pt(params)
    pt = partial_transpose(sigma.mat, sigma.dims)
    mes = maximally_entangled_qutrits().vec

    if abs(sigma.trace - 1.0) > 1e-12:
        problems.append(f"trace {sigma.trace} != 1")
    if rank_kernel_range(sigma.mat, cfg)[0] != 5:
        problems.append("edge state rank != 5")
    if rank_kernel_range(pt, cfg)[0] != 8:
        problems.append("edge-state PT rank != 8")
    if float(np.abs(pt - closed).max()) > 1e-15:
        problems.append("closed-form PT disagrees with the permutation PT")
    if float(np.abs(pt @ mes).max()) > 1e-12:
        problems.append("MES not in the PT kernel")

    gap = min_positive_pt_eigenvalue(params)
    evals = np.linalg.eigvalsh(pt)
    positive = evals[evals > cfg.rank_rel_tol * evals[-1]]
    if abs(gap - float(positive[0])) > 1e-10:
        problems.append("closed-form gap disagrees with eigendecomposition")
    bound_op = pt - gap * (np.eye(9) - np.outer(mes, mes.conj()))
    if float(np.linalg.eigvalsh(bound_op)[0]) < -cfg.psd_tol:
        problems.append("operator lower bound violated at n=1")

    try:
        f, g = range_product_vector(params, cfg)
        if abs(np.linalg.norm(np.kron(f, g)) - 1.0) > 1e-12:
            problems.append("range product vector is not normalized")
    except NumericalFailureError as exc:
        problems.append(f"range product vector failed: {exc}")

    try:
        bundle = build_edge_bundle(params, cfg)
        pt_evals = np.linalg.eigvalsh(
            partial_transpose(bundle.npt_state.mat, bundle.npt_state.dims)
        )
        if int(np.sum(pt_evals < -cfg.psd_tol)) != 1:
            problems.append("perturbed state does not have exactly one negative PT eigenvalue")
        if int(np.sum(pt_evals > cfg.psd_tol)) != 8:
            problems.append("perturbed state does not have eight positive PT eigenvalues")
        if not bundle.margin > 0:
            problems.append("margin is not positive at the default noise")
    except (NumericalFailureError, ValueError) as exc:
        problems.append(f"bundle construction failed: {exc}")
    return problems


def _suite_edge_family(spec: EnsembleSpec, cfg: ToleranceConfig) -> SuiteReport:
    failures: list[dict] = []
    for b, theta in DEFAULT_GRID:
        problems = _edge_point_checks(b, theta, cfg)
        if problems:
            failures.append({"b": b, "theta": theta, "problems": problems})
    return SuiteReport(
        suite="edge-family",
        trials=len(DEFAULT_GRID),
        passes=len(DEFAULT_GRID) - len(failures),
        failures=failures,
        config={"grid": [[b, th] for b, th in DEFAULT_GRID], "seed": spec.seed},
    )


def _suite_multicopy(spec: EnsembleSpec, cfg: ToleranceConfig) -> SuiteReport:
    params = EdgeParams(1.0, math.pi / 6)
    checks: list[tuple[str, Callable[[], None]]] = []

    def check_extremal(n: int) -> None:
        report = extremal_rank2_tensor_power(n, cfg)
        if abs(report.max_value - 1.0 / 8.0**n) > 1e-6:
            raise AssertionError(f"n={n} max {report.max_value} misses 1/8^n")
        if n == 1 and abs(report.min_value - 1.0 / 24.0) > 1e-6:
            raise AssertionError(f"n=1 min {report.min_value} misses 1/24")

    def check_operator_bound() -> None:
        pt = edge_state_pt(params)
        gap = min_positive_pt_eigenvalue(params)
        ws = werner_projector(cfg)
        for n in (1, 2):
            lhs, dims = regroup_tensor_power(pt, Dims(3, 3), n)
            rhs, _ = regroup_tensor_power(ws.mat, Dims(3, 3), n)
            diff = lhs - (8 * gap) ** n * rhs
            if float(np.linalg.eigvalsh(diff)[0]) < -1e-9:
                raise AssertionError(f"operator bound fails at n={n}")

    def check_undistillable(n: int) -> None:
        report = verify_n_undistillable(params, n, cfg)
        if not report.min_value > 0:
            raise AssertionError(f"n={n} minimum is not positive")

    checks.append(("extremal n=1", lambda: check_extremal(1)))
    checks.append(("extremal n=2", lambda: check_extremal(2)))
    checks.append(("operator bound n=1,2", check_operator_bound))
    checks.append(("undistillable n=1", lambda: check_undistillable(1)))
    checks.append(("undistillable n=2", lambda: check_undistillable(2)))

    failures: list[dict] = []
    for name, check in checks:
        try:
            check()
        except Exception as exc:  # failures are data
            failures.append({"check": name, "reason": str(exc)})
    return SuiteReport(
        suite="multicopy",
        trials=len(checks),
        passes=len(checks) - len(failures),
        failures=failures,
        config={"b": params.b, "theta": params.theta, "seed": spec.seed},
    )


_SUITE_BODIES = {
    "theorem-rank4": _suite_rank4,
    "theorem-two-eigs": _suite_two_eigs,
    "lemma-2x2": _suite_lemma_2x2,
    "edge-family": _suite_edge_family,
    "multicopy": _suite_multicopy,
}

_SUITE_DEFAULTS = {
    "theorem-rank4": EnsembleSpec(rank=4, filter="NPT"),
    "theorem-two-eigs": EnsembleSpec(rank=5, filter="twoNonpositivePT"),
    "lemma-2x2": EnsembleSpec(rank=4, filter="any"),
    "edge-family": EnsembleSpec(count=1),
    "multicopy": EnsembleSpec(count=1),
}


def run_suite(
    name: str,
    spec: Optional[EnsembleSpec] = None,
    cfg: ToleranceConfig = DEFAULT_TOL,
) -> SuiteReport:
    """Run one named verification suite (or ``"all"``) and report."""
    if name == "all":
        start = time.perf_counter()
        subs = [run_suite(s, spec, cfg) for s in SUITE_NAMES]
        report = SuiteReport(
            suite="all",
            trials=sum(r.trials for r in subs),
            passes=sum(r.passes for r in subs),
            failures=[f for r in subs for f in r.failures],
            skipped=sum(r.skipped for r in subs),
            config={"suites": list(SUITE_NAMES)},
            sub_reports=subs,
        )
        report.wall_time_s = time.perf_counter() - start
        return report
    if name not in _SUITE_BODIES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITE_NAMES + ('all',)}")
    base = _SUITE_DEFAULTS[name]
    if spec is not None:
        base = replace(base, count=spec.count, seed=spec.seed)
    start = time.perf_counter()
    report = _SUITE_BODIES[name](base, cfg)
    report.wall_time_s = time.perf_counter() - start
    return report

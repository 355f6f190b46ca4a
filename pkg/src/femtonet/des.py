"""Discrete-event simulation oracle for the analytic chains.

The hot event loop lives in the compiled _deskernel extension when it has
been built; a pure-Python twin with the identical random stream is selected
at import time otherwise.  Set FEMTONET_PURE=1 to force the fallback.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _despy
from .queueing import (
    Ch6QueueParams,
    Ch7QueueParams,
    ChainSolution,
    TwoTierParams,
    _scheme_classes,
    chain_dimensions,
    channel_release_rates,
    solve_two_tier,
    state_release_rates,
)

if os.environ.get("FEMTONET_PURE"):
    _kernel = _despy
    BACKEND = "pure-python"
else:
    try:
        from . import _deskernel as _kernel

        BACKEND = "compiled"
    except ImportError:
        _kernel = _despy
        BACKEND = "pure-python"


def kernel_backends() -> dict[str, object]:
    """Available kernels by name (for benchmarks and equivalence tests)."""
    out = {"pure-python": _despy}
    try:
        from . import _deskernel

        out["compiled"] = _deskernel
    except ImportError:
        pass
    return out


@dataclass(frozen=True)
class LossChainSpec:
    """A loss cell fed by independent Poisson arrival streams.

    srv_rates[i] is the total departure rate in state i; stream k is
    admitted while the state is below stream_limits[k].  By convention the
    last stream is the handover stream when hand_stream is unset.
    """

    stream_rates: tuple[float, ...]
    stream_limits: tuple[int, ...]
    srv_rates: tuple[float, ...]
    start_state: int = 0
    min_state: int = 0
    new_streams: tuple[int, ...] = (0,)
    hand_stream: int | None = None

    def __post_init__(self):
        if len(self.stream_rates) != len(self.stream_limits):
            raise ValueError("stream rates/limits length mismatch")


@dataclass
class DesResult:
    p_block: float
    p_drop: float
    block_ci: tuple[float, float]
    drop_ci: tuple[float, float]
    state_time: np.ndarray
    per_stream: list[dict]
    elapsed: float
    replications: int

    def contains(self, p_block: float, p_drop: float) -> bool:
        return (self.block_ci[0] <= p_block <= self.block_ci[1]
                and self.drop_ci[0] <= p_drop <= self.drop_ci[1])


# two-sided 95% Student-t quantiles by degrees of freedom
_T95 = {1: 12.706, 2: 4.303, 3: 3.182, 4: 2.776, 5: 2.571, 6: 2.447,
        7: 2.365, 8: 2.306, 9: 2.262, 10: 2.228, 11: 2.201, 12: 2.179,
        13: 2.160, 14: 2.145, 15: 2.131, 16: 2.120, 17: 2.110, 18: 2.101,
        19: 2.093, 20: 2.086, 24: 2.064, 29: 2.045, 39: 2.023, 59: 2.001}


def _t95(df: int) -> float:
    if df <= 0:
        return float("inf")
    for key in sorted(_T95):
        if df <= key:
            return _T95[key]
    return 1.96


def _mean_ci(samples: np.ndarray, successes: int = 0,
             trials: int = 0) -> tuple[float, float]:
    """95% CI of the mean from independent replications (Student t).

    Degenerate replication sets (every replication saw no event, or only
    events) fall back to exact binomial bounds on the pooled counts, so a
    tiny true probability is still covered."""
    b = len(samples)
    if b < 2:
        return (0.0, 1.0)
    std = float(samples.std(ddof=1))
    if std == 0.0 and trials > 0:
        if successes == 0:
            return (0.0, 1.0 - 0.025 ** (1.0 / trials))
        if successes == trials:
            return (0.025 ** (1.0 / trials), 1.0)
        p = successes / trials
        slop = 3.7 / trials
        return (max(0.0, p - slop), min(1.0, p + slop))
    mean = float(samples.mean())
    half = _t95(b - 1) * std / math.sqrt(b)
    return (max(0.0, mean - half), min(1.0, mean + half))


def simulate_des(spec: LossChainSpec, total_calls: int = 1_000_000,
                 seed: int = 0, replications: int = 20,
                 warmup: float = 0.05) -> DesResult:
    """Simulate the chain with `total_calls` arrivals split over independent
    replications.

    Blocking/dropping fractions of consecutive arrivals are autocorrelated,
    so confidence intervals come from the replication means (Student t),
    not from a binomial fit.  Each replication discards a warmup fraction
    before counting.
    """
    if total_calls < 1:
        raise ValueError("total_calls must be >= 1")
    replications = max(2, min(replications, total_calls))
    per_rep = max(1, total_calls // replications)
    warm_calls = int(warmup * per_rep)
    rep_seeds = np.random.SeedSequence(seed).generate_state(replications, dtype=np.uint64)

    n_streams = len(spec.stream_rates)
    hand = spec.hand_stream if spec.hand_stream is not None else n_streams - 1
    rates, limits = list(spec.stream_rates), list(spec.stream_limits)
    srv = list(spec.srv_rates)

    seen_tot = np.zeros(n_streams, dtype=np.int64)
    rej_tot = np.zeros(n_streams, dtype=np.int64)
    tis_tot = np.zeros(len(srv))
    elapsed_tot = 0.0
    p_block_reps, p_drop_reps = [], []
    stream_reps = [[] for _ in range(n_streams)]

    for r in range(replications):
        rng_state = int(rep_seeds[r])
        chain_state = spec.start_state
        if warm_calls > 0:
            *_, chain_state, rng_state = _kernel.run_loss_chain(
                rng_state, warm_calls, rates, limits, srv,
                chain_state, spec.min_state)
        seen, rejected, tis, elapsed, *_ = _kernel.run_loss_chain(
            rng_state, per_rep, rates, limits, srv, chain_state, spec.min_state)

        seen = np.asarray(seen, dtype=np.int64)
        rejected = np.asarray(rejected, dtype=np.int64)
        seen_tot += seen
        rej_tot += rejected
        tis_tot += np.asarray(tis)
        elapsed_tot += elapsed

        new_seen = int(seen[list(spec.new_streams)].sum())
        new_rej = int(rejected[list(spec.new_streams)].sum())
        if new_seen:
            p_block_reps.append(new_rej / new_seen)
        if seen[hand]:
            p_drop_reps.append(rejected[hand] / seen[hand])
        for k in range(n_streams):
            if seen[k]:
                stream_reps[k].append(rejected[k] / seen[k])

    new_seen_all = int(seen_tot[list(spec.new_streams)].sum())
    new_rej_all = int(rej_tot[list(spec.new_streams)].sum())
    per_stream = [
        {"seen": int(seen_tot[k]), "rejected": int(rej_tot[k]),
         "p_reject": float(rej_tot[k] / seen_tot[k]) if seen_tot[k] else 0.0,
         "ci": _mean_ci(np.asarray(stream_reps[k]), int(rej_tot[k]), int(seen_tot[k]))
               if stream_reps[k] else (0.0, 1.0)}
        for k in range(n_streams)
    ]
    return DesResult(
        p_block=new_rej_all / new_seen_all if new_seen_all else 0.0,
        p_drop=float(rej_tot[hand] / seen_tot[hand]) if seen_tot[hand] else 0.0,
        block_ci=_mean_ci(np.asarray(p_block_reps), new_rej_all, new_seen_all)
                 if p_block_reps else (0.0, 1.0),
        drop_ci=_mean_ci(np.asarray(p_drop_reps), int(rej_tot[hand]), int(seen_tot[hand]))
                if p_drop_reps else (0.0, 1.0),
        state_time=tis_tot / elapsed_tot if elapsed_tot > 0 else tis_tot,
        per_stream=per_stream,
        elapsed=elapsed_tot,
        replications=replications,
    )


def empirical_solution(result: DesResult) -> ChainSolution:
    return ChainSolution(result.state_time, result.p_block, result.p_drop)


# -- model-specific chain specs ----------------------------------------------


def spec_for_erlang(lam: float, mu: float, servers: int) -> LossChainSpec:
    return LossChainSpec(
        stream_rates=(lam,), stream_limits=(servers,),
        srv_rates=tuple(i * mu for i in range(servers + 1)),
        new_streams=(0,), hand_stream=0)


def spec_for_ch6(params: Ch6QueueParams, lam_hand: float,
                 scheme: str = "proposed") -> LossChainSpec:
    """Chain matching solve_ch6's converged model; the handover stream is
    exogenous Poisson at the converged rate."""
    classes = _scheme_classes(params.classes, scheme)
    n, s, ell = chain_dimensions(classes, params.capacity)
    mu_rates = state_release_rates(classes, params.capacity, params.eta, n, s)
    if scheme in ("hard-qos", "guard"):
        guard = params.guard_channels if scheme == "guard" else 0
        srv = tuple(i * mu_rates[0] for i in range(n + 1))
        return LossChainSpec((params.lam_new, lam_hand), (n - guard, n), srv,
                             new_streams=(0,), hand_stream=1)
    srv = tuple(i * mu_rates[i - 1] if i else 0.0 for i in range(n + s + 1))
    return LossChainSpec((params.lam_new, lam_hand), (n + ell, n + s), srv,
                         new_streams=(0,), hand_stream=1)


def spec_for_ch7(params: Ch7QueueParams) -> LossChainSpec:
    """MBS cell: background blocked from N, voice/unicast from N+L, handover
    dropped only at N+S; service starts above the M always-on sessions."""
    m, n, s, ell = (params.sessions, params.n_states, params.s_states,
                    params.l_states)
    srv = tuple(max(i - m, 0) * params.mu for i in range(n + s + 1))
    return LossChainSpec(
        stream_rates=(params.lam_new_background,
                      params.lam_new_voice + params.lam_new_unicast,
                      params.lam_hand),
        stream_limits=(n, n + ell, n + s),
        srv_rates=srv,
        start_state=m, min_state=m,
        new_streams=(0, 1), hand_stream=2)


def spec_for_two_tier_macro(params: TwoTierParams,
                            solution=None) -> LossChainSpec:
    solution = solution or solve_two_tier(params)
    mu_m, _ = channel_release_rates(params)
    n, s = params.macro_base_states, params.macro_adaptive_states
    srv = tuple(i * mu_m for i in range(n + s + 1))
    return LossChainSpec((params.lambda_o_m, solution.rates["lambda_h_m"]),
                         (n, n + s), srv, new_streams=(0,), hand_stream=1)


def spec_for_two_tier_femto(params: TwoTierParams,
                            solution=None) -> LossChainSpec:
    """One femtocell of the layer: K servers, no handover priority."""
    solution = solution or solve_two_tier(params)
    _, mu_f = channel_release_rates(params)
    k = params.femto_capacity
    lam = solution.rates["lambda_T_f"] / max(params.n, 1)
    srv = tuple(i * mu_f for i in range(k + 1))
    return LossChainSpec((lam,), (k,), srv, new_streams=(0,), hand_stream=0)

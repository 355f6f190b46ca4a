"""Scalable-video bandwidth allocation.

Two sides: the MBS/non-MBS budget split with its two layer-degradation
techniques (equal two-level reduction vs strict priority multi-level), and
the popularity-proportional allocator with per-user satisfaction analytics.
Layer counts are integers; a receiver cannot take a fraction of a layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

BW_TOL = 1e-9


class InfeasibleAllocationError(ValueError):
    """Budget below the guaranteed-minimum floor."""


@dataclass
class MbsSession:
    id: int
    base_bw: float  # base layer
    layer_bw: float  # per enhanced layer (uniform within a session)
    max_layers: int
    min_layers: int = 0
    popularity: int = 0  # viewer count; rank 1 = most viewers
    current_layers: int | None = None

    def __post_init__(self):
        if not 0 <= self.min_layers <= self.max_layers:
            raise ValueError("need 0 <= min_layers <= max_layers")
        if self.base_bw <= 0 or self.layer_bw < 0:
            raise ValueError("bad session bandwidths")
        if self.current_layers is None:
            self.current_layers = self.max_layers

    def bw_at(self, layers: int) -> float:
        return self.base_bw + self.layer_bw * layers

    @property
    def min_bw(self) -> float:
        return self.bw_at(self.min_layers)

    @property
    def max_bw(self) -> float:
        return self.bw_at(self.max_layers)


def rank_sessions(sessions) -> list[MbsSession]:
    """Priority order: descending popularity, ties broken by ascending id."""
    return sorted(sessions, key=lambda s: (-s.popularity, s.id))


def total_min_bw(sessions) -> float:
    return sum(s.min_bw for s in sessions)


def total_max_bw(sessions) -> float:
    return sum(s.max_bw for s in sessions)


def allocate_mbs_budget(capacity: float, non_mbs_bw: float, sessions):
    """Split the cell capacity between MBS sessions and non-MBS traffic.

    Returns (regime, mbs_budget): in the lower-traffic regime the full
    demand fits and every session runs at maximum quality; under congestion
    the sessions receive what the non-MBS traffic leaves, never below the
    guaranteed floor.
    """
    if not sessions:
        raise ValueError("no MBS sessions")
    if capacity < non_mbs_bw:
        raise ValueError("non-MBS load exceeds capacity")
    remaining = capacity - non_mbs_bw
    if remaining >= total_max_bw(sessions) - BW_TOL:
        return "lower-traffic", total_max_bw(sessions)
    if remaining < total_min_bw(sessions) - BW_TOL:
        raise InfeasibleAllocationError(
            f"budget {remaining} below the MBS floor {total_min_bw(sessions)}")
    return "congested", remaining


@dataclass
class LayerAllocation:
    layers: list[int]
    per_session_bw: list[float]
    total_bw: float
    reduced_layers: int | None = None  # P (two-level)
    split_index: int | None = None  # M_I or M_2
    extra: dict = field(default_factory=dict)


def _check_budget(budget: float, sessions) -> None:
    if budget < total_min_bw(sessions) - BW_TOL:
        raise InfeasibleAllocationError(
            f"budget {budget} below minimum demand {total_min_bw(sessions)}")


def technique_two_level(budget: float, sessions) -> LayerAllocation:
    """Equal degradation: remove P layers from the top M_I sessions and P+1
    from the rest, so no two sessions differ by more than one layer.

    Sessions must already be in priority order (rank 1 first).  At exact
    budget boundaries the larger allocation is chosen.
    """
    _check_budget(budget, sessions)

    def level_total(p: int) -> float:
        return sum(s.bw_at(max(s.max_layers - p, s.min_layers)) for s in sessions)

    full = level_total(0)
    if budget >= full - BW_TOL:
        layers = [s.max_layers for s in sessions]
        return LayerAllocation(layers, [s.max_bw for s in sessions], full,
                               reduced_layers=0, split_index=len(sessions))

    max_p = max(s.max_layers - s.min_layers for s in sessions)
    p_star = next(q for q in range(max_p + 1) if level_total(q) <= budget + BW_TOL)

    if level_total(p_star) >= budget - BW_TOL:
        # budget divides exactly: everyone holds N_max - P (the larger choice)
        p, m_i = p_star, len(sessions)
        layers = [max(s.max_layers - p, s.min_layers) for s in sessions]
        spent = level_total(p)
    else:
        p = p_star - 1
        layers = [max(s.max_layers - p - 1, s.min_layers) for s in sessions]
        spent = sum(s.bw_at(l) for s, l in zip(sessions, layers))
        m_i = 0
        for idx, s in enumerate(sessions):
            hi = max(s.max_layers - p, s.min_layers)
            step = s.bw_at(hi) - s.bw_at(layers[idx])
            if spent + step <= budget + BW_TOL:
                layers[idx] = hi
                spent += step
                m_i = idx + 1
            else:
                break

    return LayerAllocation(
        layers=layers,
        per_session_bw=[s.bw_at(l) for s, l in zip(sessions, layers)],
        total_bw=spent,
        reduced_layers=p,
        split_index=m_i,
    )


def technique_multi_level(budget: float, sessions) -> LayerAllocation:
    """Strict priority: the top M_2 sessions keep full quality, the rest drop
    to minimum; the first session past the split absorbs whatever layer
    budget remains so both techniques consume the same total."""
    _check_budget(budget, sessions)

    base = total_min_bw(sessions)
    layers = [s.min_layers for s in sessions]
    spent = base
    m2 = 0
    for idx, s in enumerate(sessions):
        step = s.max_bw - s.min_bw
        if spent + step <= budget + BW_TOL:
            layers[idx] = s.max_layers
            spent += step
            m2 = idx + 1
        else:
            break

    if m2 < len(sessions):
        s = sessions[m2]
        if s.layer_bw > 0:
            extra = int((budget - spent + BW_TOL) / s.layer_bw)
            extra = min(extra, s.max_layers - s.min_layers)
            layers[m2] = s.min_layers + extra
            spent += extra * s.layer_bw

    return LayerAllocation(
        layers=layers,
        per_session_bw=[s.bw_at(l) for s, l in zip(sessions, layers)],
        total_bw=spent,
        split_index=m2,
    )


# ---------------------------------------------------------------------------
# popularity-based allocation


@dataclass
class PopularityAllocation:
    bandwidths: list[float]
    viewers: list[int]
    capacity: float
    beta_max: float
    beta_min: float
    congested: bool
    overflow: list[float] = field(default_factory=list)  # X_m carries
    scale: float = 0.0  # a
    layers: list[int] | None = None

    @property
    def total(self) -> float:
        return sum(self.bandwidths)


def allocate_popularity(capacity: float, beta_max: float, beta_min: float,
                        viewers, layer_bw: float | None = None,
                        base_bw: float = 0.0) -> PopularityAllocation:
    """Popularity-proportional bandwidth for M always-on video sessions.

    viewers must be sorted non-increasing (rank order).  Uncongested
    (M*beta_max <= C) every session gets beta_max.  Congested, each session
    m is provisionally offered beta_min + a*K_m plus the overflow carried
    from higher ranks; whatever exceeds beta_max is spread over the
    remaining sessions.  The congested allocation conserves C exactly.
    """
    viewers = list(viewers)
    m_total = len(viewers)
    if m_total == 0:
        raise ValueError("no sessions")
    if any(k < 0 for k in viewers):
        raise ValueError("viewer counts must be >= 0")
    if any(a < b for a, b in zip(viewers, viewers[1:])):
        raise ValueError("viewer counts must be sorted non-increasing")
    if not beta_max >= beta_min > 0:
        raise ValueError("need beta_max >= beta_min > 0")
    if m_total * beta_min > capacity + BW_TOL:
        raise InfeasibleAllocationError(
            f"{m_total} sessions need {m_total * beta_min} > capacity {capacity}")

    def quantize(bws):
        if layer_bw is None:
            return None
        return [int((b - base_bw + BW_TOL) / layer_bw) for b in bws]

    if m_total * beta_max <= capacity + BW_TOL:
        bws = [beta_max] * m_total
        return PopularityAllocation(bws, viewers, capacity, beta_max, beta_min,
                                    congested=False, layers=quantize(bws))

    k_total = sum(viewers)
    scale = (m_total / k_total) * (capacity / m_total - beta_min) if k_total else 0.0
    beta_diff = beta_max - beta_min

    bws = []
    overflow = []
    carry = 0.0
    for rank, k_m in enumerate(viewers):
        provisional = scale * k_m + carry
        left = m_total - (rank + 1)
        if provisional > beta_diff + BW_TOL:
            assert left > 0, "top-rank overflow cannot land on the last session"
            x_m = (provisional - beta_diff) / left
            bws.append(beta_max)
        else:
            x_m = 0.0
            bws.append(beta_min + provisional)
        overflow.append(x_m)
        carry += x_m

    return PopularityAllocation(bws, viewers, capacity, beta_max, beta_min,
                                congested=True, overflow=overflow, scale=scale,
                                layers=quantize(bws))


@dataclass
class SatisfactionReport:
    per_rank: list[float]
    average: float  # viewer-weighted, proposed scheme
    baseline: float  # equally-shared scheme


def satisfaction(alloc: PopularityAllocation) -> SatisfactionReport:
    """User satisfaction = allocated / maximum bandwidth, per rank and
    averaged over viewers, against the equal-share baseline."""
    if not alloc.congested:
        m = len(alloc.bandwidths)
        return SatisfactionReport([1.0] * m, 1.0, 1.0)
    per_rank = [b / alloc.beta_max for b in alloc.bandwidths]
    k_total = sum(alloc.viewers)
    average = (sum(s * k for s, k in zip(per_rank, alloc.viewers)) / k_total
               if k_total else per_rank[0])
    baseline = alloc.capacity / (alloc.beta_max * len(alloc.bandwidths))
    return SatisfactionReport(per_rank, average, baseline)


def counts_hq_lq(capacity: float, beta_max: float, beta_min: float) -> tuple[int, int]:
    """(sessions servable at full quality, sessions servable at minimum)."""
    if not beta_max >= beta_min > 0:
        raise ValueError("need beta_max >= beta_min > 0")
    return int(capacity / beta_max), int(capacity / beta_min)


def allocation_rows(alloc: PopularityAllocation):
    """Per-session export rows: (session rank, viewers, bandwidth, layers,
    satisfaction)."""
    rep = satisfaction(alloc)
    layers = alloc.layers or [None] * len(alloc.bandwidths)
    return [
        (rank + 1, alloc.viewers[rank], alloc.bandwidths[rank],
         layers[rank], rep.per_rank[rank])
        for rank in range(len(alloc.bandwidths))
    ]

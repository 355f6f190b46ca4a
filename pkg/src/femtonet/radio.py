"""Propagation, fading, SIR, outage probability, and Shannon throughput.

Link model: P_R = P_T * P0 * d^-eta * xi * Z, attenuated a further
wall_loss_db per wall.  xi is log-normal shadowing (disabled on the serving
femto link, where slow fading is negligible indoors), Z is exponential
Rayleigh-power fast fading.  The macro-interference constants are anchored to
a 900 MHz urban Hata evaluation at the 200 m reference range; the femto
constants to free-space at 1 m.  All of them are scenario-overridable --
experiment checks assert scheme orderings, not absolute levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import spectrum as spec_mod
from . import topology as topo_mod
from .spectrum import SpectrumPlan, bands_overlap
from .topology import CellTopology, DegenerateGeometryError


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


# Hata (900 MHz, 50 m BS, 2 m UE, small/medium city) gives 98.5 dB at 200 m;
# the steeper default interferer exponent keeps that anchor while decaying
# faster with range, standing in for the unpublished macro model.
_MACRO_ANCHOR_PL_DB = 98.5
_MACRO_ANCHOR_M = 200.0
_DEFAULT_ETA_MACRO = 5.0
# free-space loss at 1 m, 900 MHz
_FEMTO_INTERCEPT_DB = 31.5


@dataclass(frozen=True)
class PropagationParams:
    carrier_hz: float = 900e6
    p0_macro: float = db_to_linear(-(_MACRO_ANCHOR_PL_DB - 10.0 * _DEFAULT_ETA_MACRO * math.log10(_MACRO_ANCHOR_M)))
    p0_femto: float = db_to_linear(-_FEMTO_INTERCEPT_DB)
    path_loss_exp_serving: float = 2.0      # inside the serving home
    path_loss_exp_femto_interf: float = 3.0  # between homes
    path_loss_exp_macro_interf: float = _DEFAULT_ETA_MACRO
    shadow_sigma_db_macro: float = 8.0
    shadow_sigma_db_femto: float = 4.0
    wall_loss_db: float = 20.0
    tx_power_macro_w: float = 1500.0
    tx_power_femto_w: float = 0.01
    serving_shadowing: bool = False
    sir_cap_db: float = 30.0

    def __post_init__(self):
        if min(self.path_loss_exp_serving, self.path_loss_exp_femto_interf,
               self.path_loss_exp_macro_interf) < 2.0:
            raise ValueError("path loss exponents must be >= 2")
        if min(self.shadow_sigma_db_macro, self.shadow_sigma_db_femto) < 0:
            raise ValueError("shadow sigmas must be >= 0")
        if self.wall_loss_db < 0:
            raise ValueError("wall loss must be >= 0")


@dataclass(frozen=True)
class LinkBudget:
    tx_power_w: float
    distance_m: float
    walls: int = 0
    shadowing: float = 1.0  # linear xi sample
    fast_fade: float = 1.0  # linear Z sample

    def __post_init__(self):
        if self.tx_power_w <= 0:
            raise ValueError("tx power must be positive")
        if self.distance_m < 0 or self.fast_fade < 0 or self.shadowing <= 0:
            raise ValueError("bad link budget")


@dataclass(frozen=True)
class SirReport:
    signal_w: float
    femto_interf_w: float
    macro_interf_w: float
    per_source: tuple[tuple[str, float], ...]
    interference_free: bool

    @property
    def total_interference_w(self) -> float:
        return self.femto_interf_w + self.macro_interf_w

    @property
    def sir_linear(self) -> float:
        """Signal over total interference; +inf when interference-free."""
        if self.interference_free:
            return math.inf
        return self.signal_w / self.total_interference_w

    def capped_sir(self, params: PropagationParams) -> float:
        """SIR against the configured ceiling, composed harmonically.

        The cap acts as a noise floor of mean_signal/cap, so the result is
        exactly cap when interference-free and strictly decreasing in any
        added interference (1/SINR = 1/SIR + 1/cap)."""
        cap = db_to_linear(params.sir_cap_db)
        if self.interference_free:
            return cap
        return 1.0 / (1.0 / self.sir_linear + 1.0 / cap)


def received_power(
    params: PropagationParams,
    link: LinkBudget,
    tier: str,
    serving: bool = False,
) -> float:
    """P_T * P0 * d^-eta * xi * Z with wall attenuation, in watts."""
    if link.distance_m == 0:
        raise DegenerateGeometryError("zero-length link")
    if tier == "macro":
        p0, eta = params.p0_macro, params.path_loss_exp_macro_interf
    elif tier == "femto":
        p0 = params.p0_femto
        eta = params.path_loss_exp_serving if serving else params.path_loss_exp_femto_interf
    else:
        raise ValueError(f"unknown tier {tier!r}")
    wall_att = db_to_linear(-params.wall_loss_db * link.walls)
    return (
        link.tx_power_w
        * p0
        * link.distance_m ** (-eta)
        * link.shadowing
        * link.fast_fade
        * wall_att
    )


def _shadow_sample(rng, sigma_db: float) -> float:
    if rng is None or sigma_db == 0.0:
        return 1.0
    return db_to_linear(rng.normal(0.0, sigma_db))


def _fade_sample(rng) -> float:
    return 1.0 if rng is None else rng.exponential(1.0)


def sir(
    topo: CellTopology,
    plan: SpectrumPlan,
    ue_xy,
    serving: int,
    params: PropagationParams | None = None,
    rng: np.random.Generator | None = None,
    macro_tiers: str = "all",
) -> SirReport:
    """SIR report for a femtocell user.

    Interference is summed over the serving FAP's neighbor femtocells and
    over the macro BSs, counting a source only when its band toward the UE
    overlaps the band serving the UE there.  macro_tiers="all" includes the
    first-tier ring; "reference" keeps only the overlaid macro BS (used by
    the mid-cell measurement protocol, where the ring sits several cell
    radii away and its contribution is negligible next to any in-band
    source).  With rng=None all fading terms are 1 (deterministic
    mean-path report).
    """
    params = params or PropagationParams()
    topo.site(serving)
    serving_band = plan.band_for_link(serving, ue_xy, topo)
    macro_sites = (topo.macro_sites if macro_tiers == "all"
                   else topo.macro_sites[:1])

    d0 = topo_mod.distance(topo, serving, tuple(ue_xy))
    z0 = _fade_sample(rng)
    xi0 = _shadow_sample(rng, params.shadow_sigma_db_femto) if params.serving_shadowing else 1.0
    signal = received_power(
        params,
        LinkBudget(params.tx_power_femto_w, d0, walls=0, shadowing=xi0, fast_fade=z0),
        "femto",
        serving=True,
    )

    per_source = []
    i_f = 0.0
    for nid in sorted(topo_mod.neighbors_of(topo, serving)):
        if nid not in plan.femto_assignment:
            continue
        if not bands_overlap(serving_band, plan.interferer_band(nid)):
            continue
        d = topo_mod.distance(topo, nid, tuple(ue_xy))
        p = received_power(
            params,
            LinkBudget(
                params.tx_power_femto_w,
                d,
                walls=topo.walls_between(serving, nid),
                shadowing=_shadow_sample(rng, params.shadow_sigma_db_femto),
                fast_fade=_fade_sample(rng),
            ),
            "femto",
        )
        i_f += p
        per_source.append((f"femto:{nid}", p))

    i_m = 0.0
    for j, site in enumerate(macro_sites):
        if not bands_overlap(serving_band, plan.macro_band(j)):
            continue
        d = topo_mod.distance(topo, site, tuple(ue_xy))
        p = received_power(
            params,
            LinkBudget(
                params.tx_power_macro_w,
                d,
                walls=topo.macro_ue_walls,
                shadowing=_shadow_sample(rng, params.shadow_sigma_db_macro),
                fast_fade=_fade_sample(rng),
            ),
            "macro",
        )
        i_m += p
        per_source.append((f"macro:{j}", p))

    return SirReport(
        signal_w=signal,
        femto_interf_w=i_f,
        macro_interf_w=i_m,
        per_source=tuple(per_source),
        interference_free=(i_f + i_m) == 0.0,
    )


def outage_probability_closed_form(
    mean_signal: float, gamma_linear: float, interference: float
) -> float:
    """P(S_bar * Z < gamma * I) for exponential unit-mean fast fading:
    1 - exp(-gamma * I / S_bar)."""
    if mean_signal <= 0 or gamma_linear <= 0:
        raise ValueError("mean signal and threshold must be positive")
    if interference < 0:
        raise ValueError("interference must be >= 0")
    return -math.expm1(-gamma_linear * interference / mean_signal)


def outage_probability_mc(
    topo: CellTopology,
    plan: SpectrumPlan,
    ue_xy,
    serving: int,
    gamma_linear: float,
    trials: int,
    seed: int,
    params: PropagationParams | None = None,
    resample_interference: bool = False,
) -> tuple[float, float]:
    """Monte-Carlo outage estimate with binomial standard error.

    By default interference is held at its mean-path value and only the
    serving link's fast fade is drawn, matching the closed form's
    conditioning; resample_interference=True redraws all fading per trial.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    params = params or PropagationParams()
    rng = np.random.default_rng(np.random.SeedSequence(seed))

    if not resample_interference:
        base = sir(topo, plan, ue_xy, serving, params, rng=None)
        if base.interference_free:
            return 0.0, 0.0
        z = rng.exponential(1.0, size=trials)
        outages = int(np.sum(base.signal_w * z < gamma_linear * base.total_interference_w))
    else:
        outages = 0
        for _ in range(trials):
            rep = sir(topo, plan, ue_xy, serving, params, rng=rng)
            if not rep.interference_free and rep.sir_linear < gamma_linear:
                outages += 1

    p = outages / trials
    return p, math.sqrt(max(p * (1.0 - p), 1e-12) / trials)


def shannon_throughput(bandwidth_hz: float, sir_linear: float) -> float:
    """W * log2(1 + SIR) in bit/s; zero bandwidth gives zero."""
    if bandwidth_hz < 0 or sir_linear < 0:
        raise ValueError("bandwidth and SIR must be >= 0")
    if bandwidth_hz == 0.0:
        return 0.0
    return bandwidth_hz * math.log2(1.0 + sir_linear)


def throughput_report(
    topo, plan, ue_xy, serving, params: PropagationParams | None = None
) -> float:
    """Mean-path throughput at the UE: plan band width x capped spectral
    efficiency."""
    params = params or PropagationParams()
    rep = sir(topo, plan, ue_xy, serving, params, rng=None)
    band = plan.band_for_link(serving, ue_xy, topo)
    return shannon_throughput(band.width, rep.capped_sir(params))


def params_with(params: PropagationParams, **overrides) -> PropagationParams:
    return replace(params, **overrides)

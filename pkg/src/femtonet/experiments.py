"""Experiment drivers reproducing the dissertation-style figure families.

Each driver sweeps one axis, compares the schemes its chapter compares, and
returns long-form rows (scenario, scheme, x, metric, value, stderr, seed).
Everything is deterministic for a fixed (scenario, seed): per-sweep-point
RNG streams are split off the master seed by counter, so results do not
depend on execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import des as des_mod
from . import neighborlist as nl_mod
from . import queueing as q_mod
from .presets import TABLE_7_1, TABLE_8_1, table61_classes, table71_mbs_sessions
from .radio import db_to_linear, outage_probability_closed_form, shannon_throughput, sir
from .scenario import Scenario, scenario_from_preset
from .spectrum import build_plan
from .topology import MacroGeometry, place_femtocells
from .videoalloc import (
    allocate_mbs_budget,
    allocate_popularity,
    satisfaction,
    technique_multi_level,
    technique_two_level,
    total_min_bw,
)

RADIO_SCHEMES = ("dedicated", "shared", "static-reuse", "dynamic-reuse")
CAC_SCHEMES = ("proposed", "non-prioritized", "aqos", "hard-qos", "guard")

CSV_COLUMNS = ("scenario", "scheme", "x", "metric", "value", "stderr", "seed")


@dataclass
class ExperimentResult:
    experiment: str
    scenario: str
    seed: int
    rows: list[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, scheme: str, x: float, metric: str, value: float,
            stderr: float = 0.0) -> None:
        self.rows.append((self.scenario, scheme, float(x), metric,
                          float(value), float(stderr), self.seed))

    def values(self, scheme: str, metric: str) -> list[tuple[float, float]]:
        return [(r[2], r[4]) for r in self.rows
                if r[1] == scheme and r[3] == metric]


def _spawn_rng(seed: int, *key) -> np.random.Generator:
    import hashlib

    parts = [seed]
    for k in key:
        if isinstance(k, str):
            digest = hashlib.blake2s(k.encode()).digest()[:8]
            parts.append(int.from_bytes(digest, "little"))
        else:
            parts.append(int(k))
    return np.random.default_rng(np.random.SeedSequence(parts))


# ---------------------------------------------------------------------------
# Ch. 4: throughput / outage across frequency schemes


def _radio_sweep(scenario: Scenario, counts, trials: int):
    """Per (count, scheme): mean throughput and outage of the measurement
    user held at the fixed range from the reference FAP, averaged over
    random surrounding deployments (the femtocell count is the x axis)."""
    params = scenario.propagation()
    gamma = db_to_linear(scenario["radio.sir_threshold_db"])
    ue_range = scenario["radio.ue_fap_distance_m"]
    macro = scenario.macro_geometry()

    out = {}
    for count in counts:
        sums = {s: [0.0, 0.0, 0] for s in RADIO_SCHEMES}  # thr, outage, n
        for trial in range(trials):
            topo = place_femtocells(scenario.seed + 1009 * trial, count, macro=macro)
            rng = _spawn_rng(scenario.seed, count, trial)
            ref = 0  # reference FAP, pinned at the Table 4.3 range from the BS
            fx, fy = topo.site(ref).position
            ang = 2.0 * math.pi * rng.random()
            ue = (fx + ue_range * math.cos(ang), fy + ue_range * math.sin(ang))
            for scheme in RADIO_SCHEMES:
                plan = build_plan(scheme, topo,
                                  total_hz=scenario["spectrum.total_hz"],
                                  femto_fraction=scenario["spectrum.femto_fraction"],
                                  seed=scenario.seed,
                                  edge_fraction=scenario["spectrum.edge_fraction"])
                rep = sir(topo, plan, ue, ref, params, macro_tiers="reference")
                band = plan.band_for_link(ref, ue, topo)
                thr = shannon_throughput(band.width, rep.capped_sir(params))
                if rep.interference_free:
                    outage = 0.0
                else:
                    outage = outage_probability_closed_form(
                        rep.signal_w, gamma, rep.total_interference_w)
                acc = sums[scheme]
                acc[0] += thr
                acc[1] += outage
                acc[2] += 1
        out[count] = {s: (v[0] / v[2], v[1] / v[2]) for s, v in sums.items()}
    return out


DEFAULT_FIG4_COUNTS = (60, 100, 300, 600, 1000)


def run_fig4_throughput(scenario: Scenario) -> ExperimentResult:
    counts = [int(c) for c in scenario["sweep.femto_counts"]] or list(DEFAULT_FIG4_COUNTS)
    res = ExperimentResult("fig4-throughput", scenario.name, scenario.seed)
    sweep = _radio_sweep(scenario, counts, scenario["trials"])
    for count, per_scheme in sweep.items():
        for scheme, (thr, _) in per_scheme.items():
            res.add(scheme, count, "mean_throughput_bps", thr)
    return res


def run_fig4_outage(scenario: Scenario) -> ExperimentResult:
    counts = [int(c) for c in scenario["sweep.femto_counts"]] or list(DEFAULT_FIG4_COUNTS)
    res = ExperimentResult("fig4-outage", scenario.name, scenario.seed)
    sweep = _radio_sweep(scenario, counts, scenario["trials"])
    for count, per_scheme in sweep.items():
        for scheme, (_, outage) in per_scheme.items():
            res.add(scheme, count, "mean_outage", outage)
    return res


# ---------------------------------------------------------------------------
# Ch. 5: two-tier mobility and the neighbor list


def run_fig5_mobility(scenario: Scenario) -> ExperimentResult:
    """Macro-layer blocking/forced termination and handover rates as the
    femtocell count grows, against the macro-only baseline."""
    res = ExperimentResult("fig5-mobility", scenario.name, scenario.seed)
    counts = [int(c) for c in scenario["sweep.femto_counts"]] or [0, 200, 400, 600, 800, 1000]
    lam = scenario["traffic.total_arrival_per_s"]

    baseline = q_mod.solve_two_tier(scenario.two_tier_params(n=0, lam_total=lam))
    for n in counts:
        sol = q_mod.solve_two_tier(scenario.two_tier_params(n=n, lam_total=lam))
        probs = sol.probabilities
        p_ft = q_mod.forced_termination_probability(probs.mm, sol.macro.p_drop)
        res.add("integrated", n, "macro_new_call_blocking", sol.macro.p_block)
        res.add("integrated", n, "macro_forced_termination", p_ft)
        res.add("integrated", n, "macro_channel_release_rate", sol.rates["mu_m"])
        res.add("integrated", n, "handover_rate_femto_involved",
                sol.rates["lambda_h_mf"] + sol.rates["lambda_h_ff"]
                + sol.rates["lambda_h_fm"])
        res.add("integrated", n, "p_h_mf", probs.mf)
        res.add("integrated", n, "p_h_ff", probs.ff)
        res.add("integrated", n, "p_h_fm", probs.fm)
        res.add("macro-only", n, "macro_new_call_blocking", baseline.macro.p_block)
        res.add("macro-only", n, "macro_forced_termination",
                q_mod.forced_termination_probability(
                    baseline.probabilities.mm, baseline.macro.p_drop))
    res.metadata["iterations"] = baseline.iterations
    return res


def run_fig5_neighborlist(scenario: Scenario) -> ExperimentResult:
    res = ExperimentResult("fig5-neighborlist", scenario.name, scenario.seed)
    counts = [int(c) for c in scenario["sweep.femto_counts"]] or [100, 200, 400, 700, 1000]
    trials = scenario["trials"]
    macro = scenario.macro_geometry()
    for count in counts:
        miss = nl_mod.p_target_missing(
            count=count, trials=trials, seed=scenario.seed,
            obstruction_prob=scenario["neighborlist.obstruction_prob"],
            d_max_m=scenario["neighborlist.d_max_m"], macro=macro)
        res.add("proposed", count, "p_target_missing", miss["proposed"])
        res.add("rssi-only", count, "p_target_missing", miss["rssi-only"])

        # list-size comparison at this density
        rng = _spawn_rng(scenario.seed, "listsize", count)
        topo = place_femtocells(scenario.seed + 31 * count, count, macro=macro)
        plan = build_plan("dynamic-reuse", topo)
        sizes_prop, sizes_rssi = [], []
        for _ in range(min(trials, 20)):
            serving = int(rng.integers(count))
            ue = topo.site(serving).position
            scan = nl_mod.scan_from_geometry(
                topo, ue, serving,
                s_t0_dbm=scenario["neighborlist.s_t0_dbm"],
                s_t1_dbm=scenario["neighborlist.s_t1_dbm"])
            built = nl_mod.build_list_from_femto(
                scan, plan, topo, serving,
                d_max_m=scenario["neighborlist.d_max_m"], ue_xy=ue)
            sizes_prop.append(built.n_f)
            sizes_rssi.append(len([v for f, v in scan.levels_dbm.items()
                                   if f != serving and v >= scan.s_t0_dbm]))
        res.add("proposed", count, "mean_list_size", float(np.mean(sizes_prop)))
        res.add("rssi-only", count, "mean_list_size", float(np.mean(sizes_rssi)))
    return res


# ---------------------------------------------------------------------------
# Ch. 6: adaptive CAC comparison


def run_fig6_cac(scenario: Scenario) -> ExperimentResult:
    res = ExperimentResult("fig6-cac", scenario.name, scenario.seed)
    grid = list(scenario["traffic.arrival_grid"]) or [0.4, 0.7, 1.0, 1.3, 1.6, 2.0]
    for lam in grid:
        params = scenario.ch6_params(lam_new=lam)
        for scheme in CAC_SCHEMES:
            sol = q_mod.solve_ch6(params, scheme)
            label = "guard5" if scheme == "guard" else scheme
            res.add(label, lam, "p_block", sol.p_block)
            res.add(label, lam, "p_drop", sol.p_drop)
            res.add(label, lam, "utilization", sol.utilization)
            res.add(label, lam, "handover_rate", sol.handover_rate)
            res.add(label, lam, "forced_termination",
                    q_mod.forced_termination_probability(
                        sol.extra["P_h"], sol.p_drop))
    res.metadata["guard_channels"] = scenario.ch6_params(1.0).guard_channels
    return res


# ---------------------------------------------------------------------------
# Ch. 7: MBS bandwidth adaptation


def _ch7_dimensions():
    """Non-MBS admission region of the Table 7.1 cell.

    The non-MBS traffic can claim at most C - C_min_B; class mix voice,
    unicast (degradable to the base layer for handovers only), background
    (two-level degradable)."""
    from .admission import TrafficClass
    from .queueing import chain_dimensions

    t = TABLE_7_1
    ratios = np.array([t["arrival_ratio_voice"], t["arrival_ratio_unicast"],
                       t["arrival_ratio_background"]])
    shares = ratios / ratios.sum()
    uni_max = t["unicast_max_mbps"] * 1e3
    uni_min = uni_max - t["unicast_max_layers"] * t["unicast_layer_kbps"]
    classes = (
        TrafficClass(1, "rt", t["voice_bw_kbps"], arrival_share=float(shares[0]),
                     duration_s=t["mean_call_duration_s"]),
        TrafficClass(2, "nrt", uni_max, degrade_new=0.0,
                     degrade_hand=1.0 - uni_min / uni_max,
                     arrival_share=float(shares[1]),
                     duration_s=t["mean_call_duration_s"]),
        TrafficClass(3, "nrt", t["background_max_kbps"],
                     degrade_new=t["background_degrade_new"],
                     degrade_hand=t["background_degrade_hand"],
                     arrival_share=float(shares[2]),
                     duration_s=t["mean_call_duration_s"]),
    )
    sessions = table71_mbs_sessions()
    c_nb_max = t["capacity_mbps"] * 1e3 - total_min_bw(sessions) / 1e3
    n_extra, s, ell = chain_dimensions(classes, c_nb_max)
    return classes, shares, c_nb_max, n_extra, s, ell


def run_fig7_mbs(scenario: Scenario) -> ExperimentResult:
    res = ExperimentResult("fig7-mbs", scenario.name, scenario.seed)
    t = TABLE_7_1
    grid = list(scenario["traffic.arrival_grid"]) or [0.2, 0.5, 0.8, 1.1, 1.4, 1.7]
    classes, shares, c_nb_max, n_extra, s, ell = _ch7_dimensions()
    sessions = table71_mbs_sessions()
    capacity = t["capacity_mbps"] * 1e6
    mu = 1.0 / t["mean_call_duration_s"]
    eta = 1.0 / t["cell_dwell_s"]
    p_h = eta / (eta + mu)
    m = t["mbs_sessions"]

    for lam in grid:
        # offered non-MBS bandwidth demand at this arrival rate
        per_class = [lam * float(sh) for sh in shares]
        offered_bw = sum(rate / mu * c.requested_bw * 1e3
                         for rate, c in zip(per_class, classes))
        non_mbs = min(offered_bw, c_nb_max * 1e3)
        regime, mbs_budget = allocate_mbs_budget(capacity, non_mbs, sessions)

        two = technique_two_level(mbs_budget, sessions)
        multi = technique_multi_level(mbs_budget, sessions)
        res.add("proposed", lam, "mbs_bandwidth_bps", mbs_budget)
        res.add("proposed", lam, "non_mbs_bandwidth_bps", non_mbs)
        res.add("proposed", lam, "two_level_min_layers", min(two.layers))
        res.add("proposed", lam, "two_level_max_layers", max(two.layers))
        res.add("proposed", lam, "multi_level_full_sessions", multi.split_index)

        # unicast quality degrades only after voice + background floors fill
        uni_rate = per_class[1]
        uni_budget = non_mbs - per_class[0] / mu * classes[0].requested_bw * 1e3 \
            - per_class[2] / mu * classes[2].floor_hand * 1e3
        if uni_rate > 0:
            per_uni = uni_budget / (uni_rate / mu) / 1e3
            uni_layers = (per_uni - (t["unicast_max_mbps"] * 1e3
                                     - t["unicast_max_layers"] * t["unicast_layer_kbps"])) \
                / t["unicast_layer_kbps"]
            uni_layers = float(np.clip(uni_layers, 0, t["unicast_max_layers"]))
        else:
            uni_layers = t["unicast_max_layers"]
        res.add("proposed", lam, "unicast_layers", uni_layers)

        lam_h = p_h * lam
        chain = q_mod.solve_ch7(q_mod.Ch7QueueParams(
            sessions=m, n_states=m + n_extra, s_states=s, l_states=ell,
            lam_new_voice=per_class[0], lam_new_unicast=per_class[1],
            lam_new_background=per_class[2], lam_hand=lam_h, mu=mu))
        res.add("proposed", lam, "p_drop", chain.p_drop)
        res.add("proposed", lam, "p_block_voice", chain.extra["P_B_voice"])
        res.add("proposed", lam, "p_block_background", chain.extra["P_B_background"])

        # fixed-max (#2) and fixed-min (#5) reservation baselines
        for label, reserve in (("fixed-max", 12e6), ("fixed-min", 6e6)):
            fixed_non_mbs = min(offered_bw, capacity - reserve)
            res.add(label, lam, "mbs_bandwidth_bps", reserve)
            res.add(label, lam, "non_mbs_bandwidth_bps", fixed_non_mbs)
    return res


# ---------------------------------------------------------------------------
# Ch. 8: popularity-based allocation


def run_fig8_popularity(scenario: Scenario) -> ExperimentResult:
    res = ExperimentResult("fig8-popularity", scenario.name, scenario.seed)
    t = TABLE_8_1
    counts = [int(c) for c in scenario["sweep.session_counts"]] or \
        [5, 10, 15, 20, 25, 30, 35, 40, 45, 50]
    capacity = t["capacity_mbps"]
    viewers_total = t["total_viewers"]

    for label, concentrated in (("scenario-1", False), ("scenario-2", True)):
        for m in counts:
            rng = _spawn_rng(scenario.seed, label, m)
            reps_prop, reps_base = [], []
            for _ in range(scenario["trials"]):
                if concentrated:
                    head = viewers_total // 2
                    rest = rng.multinomial(viewers_total - head, [1.0 / m] * m)
                    viewers = sorted((int(v) for v in rest), reverse=True)
                    viewers[0] += head
                    viewers.sort(reverse=True)
                else:
                    draw = rng.multinomial(viewers_total, [1.0 / m] * m)
                    viewers = sorted((int(v) for v in draw), reverse=True)
                alloc = allocate_popularity(capacity, t["beta_max_mbps"],
                                            t["beta_min_mbps"], viewers)
                rep = satisfaction(alloc)
                reps_prop.append(rep.average)
                reps_base.append(rep.baseline)
            res.add("proposed", m, "satisfaction_avg", float(np.mean(reps_prop)),
                    float(np.std(reps_prop) / max(len(reps_prop), 1) ** 0.5))
            res.add("equal-share", m, "satisfaction_avg", float(np.mean(reps_base)))

    # per-session allocation profile at the largest session count (one draw)
    from .videoalloc import allocation_rows

    m = max(counts)
    rng = _spawn_rng(scenario.seed, "profile", m)
    viewers = sorted((int(v) for v in rng.multinomial(viewers_total, [1.0 / m] * m)),
                     reverse=True)
    alloc = allocate_popularity(capacity, t["beta_max_mbps"],
                                t["beta_min_mbps"], viewers)
    for rank, k_m, bw, _, s_l in allocation_rows(alloc):
        res.add("proposed", rank, "session_bandwidth_mbps", bw)
        res.add("proposed", rank, "session_viewers", k_m)
        res.add("proposed", rank, "session_satisfaction", s_l)
        res.add("equal-share", rank, "session_bandwidth_mbps",
                min(t["beta_max_mbps"], capacity / m))
    return res


EXPERIMENTS = {
    "fig4-throughput": run_fig4_throughput,
    "fig4-outage": run_fig4_outage,
    "fig5-mobility": run_fig5_mobility,
    "fig5-neighborlist": run_fig5_neighborlist,
    "fig6-cac": run_fig6_cac,
    "fig7-mbs": run_fig7_mbs,
    "fig8-popularity": run_fig8_popularity,
}

DEFAULT_PRESET = {
    "fig4-throughput": "table-4.3",
    "fig4-outage": "table-4.3",
    "fig5-mobility": "table-5.1",
    "fig5-neighborlist": "table-5.1",
    "fig6-cac": "table-6.1",
    "fig7-mbs": "table-7.1",
    "fig8-popularity": "table-8.1",
}


def run_experiment(name: str, scenario: Scenario | None = None,
                   seed: int | None = None) -> ExperimentResult:
    """Run a named experiment; unknown names raise KeyError."""
    if name not in EXPERIMENTS:
        raise KeyError(f"unknown experiment {name!r} "
                       f"(known: {', '.join(sorted(EXPERIMENTS))})")
    if scenario is None:
        scenario = scenario_from_preset(DEFAULT_PRESET[name])
    if seed is not None:
        scenario = Scenario({**scenario.values, "seed": seed})
    if scenario["trials"] == 0:
        return ExperimentResult(name, scenario.name, scenario.seed,
                                metadata={"note": "zero trials"})
    return EXPERIMENTS[name](scenario)


# ---------------------------------------------------------------------------
# emission


def result_to_csv(result: ExperimentResult) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in result.rows:
        scenario, scheme, x, metric, value, stderr, seed = row
        lines.append(f"{scenario},{scheme},{x!r},{metric},{value!r},{stderr!r},{seed}")
    return "\n".join(lines) + "\n"


def csv_to_rows(text: str) -> list[tuple]:
    lines = [l for l in text.strip().splitlines() if l]
    header = lines[0].split(",")
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    rows = []
    for line in lines[1:]:
        scenario, scheme, x, metric, value, stderr, seed = line.split(",")
        rows.append((scenario, scheme, float(x), metric, float(value),
                     float(stderr), int(seed)))
    return rows


def result_to_plot_script(result: ExperimentResult) -> str:
    """One gnuplot block per metric, reading the result CSV."""
    metrics = sorted({r[3] for r in result.rows})
    schemes = sorted({r[1] for r in result.rows})
    lines = [
        "# gnuplot script generated by femtonet",
        "set datafile separator ','",
        "set key outside",
        "set xlabel 'x'",
    ]
    for metric in metrics:
        lines.append(f"\nset title '{result.experiment}: {metric}'")
        lines.append(f"set output '{result.experiment}_{metric}.png'")
        lines.append("set terminal pngcairo size 800,500")
        plots = []
        for scheme in schemes:
            cond = f"(stringcolumn(2) eq '{scheme}' && stringcolumn(4) eq '{metric}')"
            plots.append(f"'{result.experiment}.csv' using 3:({cond} ? $5 : 1/0) "
                         f"with linespoints title '{scheme}'")
        lines.append("plot \\\n  " + ", \\\n  ".join(plots))
    return "\n".join(lines) + "\n"


def emit(result: ExperimentResult, fmt: str, out_dir) -> list[str]:
    """Write the result as CSV or a plot script; returns written paths."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    written = []
    if fmt == "csv":
        path = os.path.join(out_dir, f"{result.experiment}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(result_to_csv(result))
        written.append(path)
    elif fmt == "plot-script":
        path = os.path.join(out_dir, f"{result.experiment}.gnuplot")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(result_to_plot_script(result))
        written.append(path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return written

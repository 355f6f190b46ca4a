"""Optimal neighbor-femtocell list construction for handover.

Candidates are filtered at two RSSI thresholds, strong entries sharing the
serving FAP's frequency are pruned (apart cells reuse bands, overlapping
ones never do), and hidden FAPs -- close to the user but obstructed -- are
re-added through location information coordinated over the FAP/macro SON
links.  The final list satisfies  N_f = N1 - N2 + M_hidden  by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import topology as topo_mod
from .radio import PropagationParams, linear_to_db, received_power, LinkBudget
from .spectrum import SpectrumPlan, bands_overlap
from .topology import CellTopology, UnknownSiteError

DEFAULT_S_T0_DBM = -90.0
DEFAULT_S_T1_DBM = -75.0
DEFAULT_D_MAX_M = 40.0
# SON coordination survives up to this many walls between two FAPs
COORDINATION_WALL_LIMIT = 1
# an obstructed scan link carries this many extra walls
OBSTRUCTION_WALLS = 2


@dataclass(frozen=True)
class RssiScan:
    """Received levels per FAP at one UE position, in dBm."""

    levels_dbm: dict[int, float]
    serving: int | str  # femto id, or "macro"
    s_t0_dbm: float = DEFAULT_S_T0_DBM
    s_t1_dbm: float = DEFAULT_S_T1_DBM

    def __post_init__(self):
        if not self.s_t1_dbm > self.s_t0_dbm:
            raise ValueError("need S_T1 > S_T0")

    def detected(self) -> dict[int, float]:
        return {i: v for i, v in self.levels_dbm.items() if v >= self.s_t0_dbm}


@dataclass
class NeighborList:
    entries: list[int]  # ordered femto ids
    provenance: dict[int, str]  # "strong-signal" | "hidden-by-location"
    include_macro: bool
    n_detected: int  # N  (>= S_T0)
    n_strong: int  # N1 (>= S_T1)
    n_same_freq: int  # N2 (pruned from the strong set)
    m_hidden: int  # M
    serving: int | str

    @property
    def n_f(self) -> int:
        return len(self.entries)

    def check_count_identity(self) -> None:
        assert self.n_f == self.n_strong - self.n_same_freq + self.m_hidden


def shares_frequency(plan: SpectrumPlan, fap: int, serving: int) -> bool:
    """True when the candidate's band lies inside the serving FAP's band.

    Under dynamic reuse the distinguishing allocation is the edge band;
    static reuse compares the chosen band; the single-band schemes always
    share."""
    a = plan.femto_assignment[fap]
    s = plan.femto_assignment[serving]
    if plan.scheme == "dynamic-reuse":
        ba, bs = plan.band(a.edge_label), plan.band(s.edge_label)
        return ba.lo >= bs.lo - 1e-9 and ba.hi <= bs.hi + 1e-9
    if plan.scheme == "static-reuse":
        return a.center_label == s.center_label
    return True


def _coordinated(topo: CellTopology, via: int, candidate: int) -> bool:
    if candidate == via:
        return False
    if candidate not in topo_mod.neighbors_of(topo, via):
        return False
    return topo.walls_between(via, candidate) <= COORDINATION_WALL_LIMIT


def _order_entries(strong, hidden, scan: RssiScan) -> list[int]:
    def key(fap):
        level = scan.levels_dbm.get(fap, -math.inf)
        is_hidden = 1 if fap in hidden else 0
        return (-level, is_hidden, fap)

    return sorted(set(strong) | set(hidden), key=key)


def build_list_from_femto(
    scan: RssiScan,
    plan: SpectrumPlan,
    topo: CellTopology,
    serving: int,
    d_max_m: float = DEFAULT_D_MAX_M,
    access: dict[int, bool] | None = None,
    ue_xy=None,
) -> NeighborList:
    """Neighbor list while connected to a FAP.

    Strong entries are the accessible FAPs at or above S_T1 minus those on
    the serving frequency; hidden entries are accessible FAPs within d_max
    of the user that are weak or frequency-pruned, known via a coordination
    hop from the serving FAP or a strong member.
    """
    serving_site = topo.site(serving)
    if d_max_m <= 0:
        raise ValueError("d_max must be positive")
    ue = tuple(ue_xy) if ue_xy is not None else serving_site.position
    access = access or {}

    def accessible(fap: int) -> bool:
        if topo.site(fap).access_mode == "open":
            return True
        return access.get(fap, False)

    detected = {i: v for i, v in scan.detected().items()
                if i != serving and accessible(i)}
    strong = {i for i, v in detected.items() if v >= scan.s_t1_dbm}
    same_freq = {i for i in strong if shares_frequency(plan, i, serving)}
    kept_strong = strong - same_freq

    coordinators = {serving, *kept_strong}
    hidden = set()
    for fap in topo.femto_ids:
        if fap == serving or fap in kept_strong or not accessible(fap):
            continue
        weak = scan.levels_dbm.get(fap, -math.inf) < scan.s_t1_dbm
        if not (weak or shares_frequency(plan, fap, serving)):
            continue
        if topo_mod.distance(topo, fap, ue) > d_max_m:
            continue
        if any(_coordinated(topo, via, fap) for via in coordinators):
            hidden.add(fap)

    entries = _order_entries(kept_strong, hidden, scan)
    prov = {f: "strong-signal" for f in kept_strong}
    prov.update({f: "hidden-by-location" for f in hidden})
    out = NeighborList(
        entries=entries, provenance=prov, include_macro=True,
        n_detected=len(detected), n_strong=len(strong),
        n_same_freq=len(same_freq), m_hidden=len(hidden), serving=serving)
    out.check_count_identity()
    return out


def build_list_from_macro(
    scan: RssiScan,
    plan: SpectrumPlan,
    topo: CellTopology,
    d_max_m: float = DEFAULT_D_MAX_M,
    access: dict[int, bool] | None = None,
    ue_xy=None,
) -> NeighborList:
    """Neighbor list while connected to the overlaid macrocell.

    No serving frequency to prune against; the macro BS knows every
    registered FAP's location, so any accessible FAP within d_max joins the
    hidden set when its signal is weak.  The macrocell itself stays in the
    candidate set as the fallback target.
    """
    if d_max_m <= 0:
        raise ValueError("d_max must be positive")
    if ue_xy is None:
        raise ValueError("the macro flow needs the UE position")
    access = access or {}
    ue = tuple(ue_xy)

    def accessible(fap: int) -> bool:
        if topo.site(fap).access_mode == "open":
            return True
        return access.get(fap, False)

    detected = {i: v for i, v in scan.detected().items() if accessible(i)}
    strong = {i for i, v in detected.items() if v >= scan.s_t1_dbm}

    hidden = set()
    for fap in topo.femto_ids:
        if fap in strong or not accessible(fap):
            continue
        if scan.levels_dbm.get(fap, -math.inf) >= scan.s_t1_dbm:
            continue
        if topo_mod.distance(topo, fap, ue) <= d_max_m:
            hidden.add(fap)

    entries = _order_entries(strong, hidden, scan)
    prov = {f: "strong-signal" for f in strong}
    prov.update({f: "hidden-by-location" for f in hidden})
    out = NeighborList(
        entries=entries, provenance=prov, include_macro=True,
        n_detected=len(detected), n_strong=len(strong),
        n_same_freq=0, m_hidden=len(hidden), serving="macro")
    out.check_count_identity()
    return out


# ---------------------------------------------------------------------------
# geometry-driven scans


def scan_from_geometry(
    topo: CellTopology,
    ue_xy,
    serving: int | str,
    params: PropagationParams | None = None,
    obstructed: set[int] | None = None,
    s_t0_dbm: float = DEFAULT_S_T0_DBM,
    s_t1_dbm: float = DEFAULT_S_T1_DBM,
) -> RssiScan:
    """Deterministic scan: free-space-style femto links (no inter-home wall
    for a user in the open femto zone); obstructed links carry extra walls."""
    params = params or PropagationParams()
    obstructed = obstructed or set()
    levels = {}
    for fap in topo.femto_ids:
        d = max(topo_mod.distance(topo, fap, tuple(ue_xy)), 0.1)
        walls = OBSTRUCTION_WALLS if fap in obstructed else 0
        p = received_power(params, LinkBudget(params.tx_power_femto_w, d, walls=walls),
                           "femto", serving=False)
        levels[fap] = linear_to_db(p) + 30.0  # W -> dBm
    return RssiScan(levels, serving, s_t0_dbm, s_t1_dbm)


def p_target_missing(
    count: int,
    trials: int,
    seed: int,
    plan_builder=None,
    obstruction_prob: float = 0.3,
    d_max_m: float = DEFAULT_D_MAX_M,
    macro=None,
    trials_per_topology: int = 50,
) -> dict[str, float]:
    """Monte-Carlo probability that the best handover target is absent.

    Per trial the geometric best target is the strongest unobstructed
    non-serving FAP at or above S_T1 (trials with no valid target are
    skipped).  The RSSI-only baseline lists FAPs whose observed level
    clears S_T1; the proposed scheme adds coordinated hidden FAPs.
    Topologies are redrawn every `trials_per_topology` trials; the serving
    cell, user position, and obstructions are redrawn every trial.
    """
    from .spectrum import build_plan

    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0x5CA)))
    miss_base = miss_prop = valid = 0

    topo = plan = None
    for trial in range(trials):
        if count < 2:
            continue
        if topo is None or trial % trials_per_topology == 0:
            topo = topo_mod.place_femtocells(seed + 7919 * trial, count, macro=macro)
            plan = (plan_builder(topo) if plan_builder
                    else build_plan("dynamic-reuse", topo))
        serving = int(rng.integers(count))
        s_pos = topo.site(serving).position
        ang = 2 * math.pi * rng.random()
        ue = (s_pos[0] + topo.femto_radius_m * math.cos(ang),
              s_pos[1] + topo.femto_radius_m * math.sin(ang))

        clear = scan_from_geometry(topo, ue, serving)
        candidates = {f: v for f, v in clear.levels_dbm.items() if f != serving}
        best, best_level = max(candidates.items(), key=lambda kv: (kv[1], -kv[0]))
        if best_level < clear.s_t1_dbm:
            continue  # no valid handover target in this topology
        if (shares_frequency(plan, best, serving)
                and topo_mod.distance(topo, best, ue) > d_max_m):
            # a far-off band twin is not a listable target by design: the
            # scheme prunes reuse twins and re-adds them only within d_max
            continue
        valid += 1

        obstructed = {f for f in topo.femto_ids
                      if f != serving and rng.random() < obstruction_prob}
        observed = scan_from_geometry(topo, ue, serving, obstructed=obstructed)

        baseline = {f for f, v in observed.levels_dbm.items()
                    if f != serving and v >= observed.s_t1_dbm}
        proposed = build_list_from_femto(observed, plan, topo, serving,
                                         d_max_m=d_max_m, ue_xy=ue)
        if best not in baseline:
            miss_base += 1
        if best not in proposed.entries:
            miss_prop += 1

    if valid == 0:
        return {"rssi-only": 0.0, "proposed": 0.0, "trials": 0}
    return {"rssi-only": miss_base / valid, "proposed": miss_prop / valid,
            "trials": valid}


# ---------------------------------------------------------------------------
# the dense-deployment scenario of the worked neighbor-list example


def hidden_fap_fixture():
    """Nine-FAP fixture: user at position A near the serving FAP; FAP 1 is
    walled off from both the user and the serving FAP but coordinated via
    FAP 2; FAP 8's link to the user is obstructed.  The optimal list must
    come out as exactly {1, 2, 3, 8}."""
    from .spectrum import build_plan
    from .topology import CellTopology, FemtoSite

    positions = {
        0: (0.0, 0.0),     # serving
        1: (10.0, 0.0),    # hidden behind a wall, known to FAP 2
        2: (0.0, 12.0),    # strong, clear
        3: (9.0, 9.0),     # strong, clear
        4: (50.0, 50.0),   # beyond the strong horizon and outside d_max
        5: (0.0, -65.0),   # weak, outside d_max
        6: (-80.0, 30.0),  # far
        7: (60.0, -60.0),  # far
        8: (20.0, 5.0),    # obstructed toward the user, clear to the serving FAP
    }
    femtos = [FemtoSite(i, p) for i, p in sorted(positions.items())]
    # double wall between the serving FAP and FAP 1 blocks their coordination
    femtos[0].walls_to[1] = 2
    femtos[1].walls_to[0] = 2
    # FAP 2 and FAP 1 share a clear coordination link
    femtos[1].walls_to[2] = 0
    femtos[2].walls_to[1] = 0
    topo = CellTopology(
        macro_radius_m=1000.0, femto_radius_m=10.0,
        macro_sites=[(0.0, 0.0)], femtocells=femtos)
    plan = build_plan("dynamic-reuse", topo)
    ue = (3.0, 0.0)
    obstructed = {1, 8}
    scan = scan_from_geometry(topo, ue, 0, obstructed=obstructed)
    return topo, plan, scan, ue

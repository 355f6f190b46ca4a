"""Scenario configuration: structured-text files, presets, and overrides.

A scenario file is line-oriented `key = value` text with dotted keys for
nesting and `#` comments.  `preset = table-5.1` pulls a named table in
first; later lines override it.  Unknown keys and ill-typed values are
rejected with the offending line and column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .presets import PRESETS


class ScenarioError(ValueError):
    def __init__(self, message, line=None, column=None, path=None):
        loc = ""
        if path:
            loc += f"{path}:"
        if line is not None:
            loc += f"{line}"
            if column is not None:
                loc += f":{column}"
        super().__init__(f"{loc + ': ' if loc else ''}{message}")
        self.line = line
        self.column = column


def _parse_bool(text: str) -> bool:
    if text in ("true", "yes", "on"):
        return True
    if text in ("false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


# key -> (type constructor, default)
SCENARIO_KEYS: dict[str, tuple] = {
    "name": (str, "ad-hoc"),
    "preset": (str, ""),
    "seed": (int, 7),
    "trials": (int, 20),
    "experiment": (str, ""),
    # topology
    "topology.count": (int, 1000),
    "topology.macro_radius_m": (float, 1000.0),
    "topology.femto_radius_m": (float, 10.0),
    "topology.neighbor_threshold_m": (float, 60.0),
    "topology.min_separation_m": (float, 2.0),
    "topology.macro_ue_walls": (int, 1),
    "topology.inter_femto_walls": (int, 1),
    "topology.closed_access_fraction": (float, 0.0),
    # spectrum
    "spectrum.scheme": (str, "dynamic-reuse"),
    "spectrum.total_hz": (float, 18e6),
    "spectrum.femto_fraction": (float, 1.0 / 3.0),
    "spectrum.edge_fraction": (float, 0.6),
    # radio
    "radio.sir_threshold_db": (float, 9.0),
    "radio.sir_cap_db": (float, 30.0),
    "radio.tx_power_macro_w": (float, 1500.0),
    "radio.tx_power_femto_w": (float, 0.01),
    "radio.ue_fap_distance_m": (float, 5.0),
    # traffic (two-tier and single-cell)
    "traffic.total_arrival_per_s": (float, 6.0),
    "traffic.arrival_grid": (_parse_float_list, ()),
    "traffic.mean_call_duration_s": (float, 120.0),
    "traffic.femto_dwell_s": (float, 360.0),
    "traffic.macro_dwell_s": (float, 240.0),
    "traffic.arrival_density_ratio": (float, 20.0),
    "traffic.alpha": (float, 0.8),
    "traffic.beta": (float, 0.2),
    "traffic.femto_capacity_calls": (int, 4),
    "traffic.capacity_kbps": (float, 6000.0),
    "traffic.guard_fraction": (float, 0.05),
    "traffic.macro_base_states": (int, 100),
    "traffic.macro_adaptive_states": (int, 30),
    # neighbor list
    "neighborlist.s_t0_dbm": (float, -90.0),
    "neighborlist.s_t1_dbm": (float, -75.0),
    "neighborlist.d_max_m": (float, 40.0),
    "neighborlist.obstruction_prob": (float, 0.3),
    # sweeps
    "sweep.femto_counts": (_parse_float_list, ()),
    "sweep.session_counts": (_parse_float_list, ()),
    "mc.trials": (int, 100_000),
    "des.calls": (int, 1_000_000),
}

# preset key -> scenario key translation (only keys that map directly)
_PRESET_BINDINGS = {
    "macro_radius_m": "topology.macro_radius_m",
    "femto_radius_m": "topology.femto_radius_m",
    "macro_ue_walls": "topology.macro_ue_walls",
    "inter_femto_walls": "topology.inter_femto_walls",
    "tx_power_macro_w": "radio.tx_power_macro_w",
    "tx_power_femto_w": "radio.tx_power_femto_w",
    "sir_threshold_db": "radio.sir_threshold_db",
    "ue_fap_distance_m": "radio.ue_fap_distance_m",
    "dense_femtocells": "topology.count",
    "femtocells": "topology.count",
    "s_t0_dbm": "neighborlist.s_t0_dbm",
    "s_t1_dbm": "neighborlist.s_t1_dbm",
    "mean_call_duration_s": "traffic.mean_call_duration_s",
    "femto_dwell_s": "traffic.femto_dwell_s",
    "macro_dwell_s": "traffic.macro_dwell_s",
    "arrival_density_ratio": "traffic.arrival_density_ratio",
    "femto_capacity_calls": "traffic.femto_capacity_calls",
    "capacity_kbps": "traffic.capacity_kbps",
    "guard_fraction": "traffic.guard_fraction",
    "macro_base_states": "traffic.macro_base_states",
    "macro_adaptive_states": "traffic.macro_adaptive_states",
}


@dataclass
class Scenario:
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        merged = {k: default for k, (_, default) in SCENARIO_KEYS.items()}
        merged.update(self.values)
        self.values = merged

    def __getitem__(self, key: str):
        return self.values[key]

    @property
    def name(self) -> str:
        return self.values["name"]

    @property
    def seed(self) -> int:
        return self.values["seed"]

    def macro_geometry(self):
        from .topology import MacroGeometry

        return MacroGeometry(
            macro_radius_m=self["topology.macro_radius_m"],
            femto_radius_m=self["topology.femto_radius_m"],
            neighbor_threshold_m=self["topology.neighbor_threshold_m"],
            min_separation_m=self["topology.min_separation_m"],
            macro_ue_walls=self["topology.macro_ue_walls"],
            inter_femto_walls=self["topology.inter_femto_walls"],
        )

    def propagation(self):
        from .radio import PropagationParams

        return PropagationParams(
            tx_power_macro_w=self["radio.tx_power_macro_w"],
            tx_power_femto_w=self["radio.tx_power_femto_w"],
            sir_cap_db=self["radio.sir_cap_db"],
        )

    def two_tier_params(self, n: int | None = None,
                        lam_total: float | None = None):
        from .queueing import TwoTierParams

        n = int(self["topology.count"]) if n is None else n
        lam = (self["traffic.total_arrival_per_s"]
               if lam_total is None else lam_total)
        frac = n * (self["topology.femto_radius_m"]
                    / self["topology.macro_radius_m"]) ** 2
        density = self["traffic.arrival_density_ratio"]
        weight_f = density * frac
        weight_m = max(1.0 - frac, 0.0)
        lam_f = lam * weight_f / (weight_f + weight_m) if n else 0.0
        return TwoTierParams(
            lambda_o_f=lam_f,
            lambda_o_m=lam - lam_f,
            mu=1.0 / self["traffic.mean_call_duration_s"],
            eta_f=1.0 / self["traffic.femto_dwell_s"],
            eta_m=1.0 / self["traffic.macro_dwell_s"],
            n=n,
            r_f=self["topology.femto_radius_m"],
            r_m=self["topology.macro_radius_m"],
            femto_capacity=self["traffic.femto_capacity_calls"],
            macro_base_states=self["traffic.macro_base_states"],
            macro_adaptive_states=self["traffic.macro_adaptive_states"],
            alpha=self["traffic.alpha"],
            beta_prob=self["traffic.beta"],
        )

    def ch6_params(self, lam_new: float):
        from .presets import TABLE_6_1, table61_classes
        from .queueing import Ch6QueueParams, chain_dimensions

        classes = table61_classes()
        capacity = self["traffic.capacity_kbps"]
        n, _, _ = chain_dimensions(classes, capacity)
        guard = max(1, int(self["traffic.guard_fraction"] * n))
        return Ch6QueueParams(
            lam_new=lam_new, capacity=capacity, classes=classes,
            eta=1.0 / self["traffic.macro_dwell_s"], guard_channels=guard)


def _apply_preset(values: dict, preset_name: str, line: int, path) -> None:
    if preset_name not in PRESETS:
        raise ScenarioError(f"unknown preset {preset_name!r} "
                            f"(known: {', '.join(sorted(PRESETS))})",
                            line, None, path)
    preset = PRESETS[preset_name]
    for key, value in preset.items():
        bound = _PRESET_BINDINGS.get(key)
        if bound is not None:
            values[bound] = SCENARIO_KEYS[bound][0](value) \
                if not isinstance(value, (tuple, list)) else value
    values["preset"] = preset_name
    # keys without a dotted binding stay reachable through the raw preset
    values.setdefault("_preset_raw", dict(preset))


def parse_assignment(text: str, line_no: int = 0, path=None) -> tuple[str, object]:
    """Parse one `key = value` line against the key registry."""
    if "=" not in text:
        raise ScenarioError("expected 'key = value'", line_no,
                            len(text.rstrip()) + 1, path)
    key, _, raw = text.partition("=")
    key = key.strip()
    raw = raw.strip()
    if key == "preset":
        return key, raw
    if key not in SCENARIO_KEYS:
        raise ScenarioError(f"unknown key {key!r}", line_no,
                            text.index(key) + 1, path)
    ctor = SCENARIO_KEYS[key][0]
    try:
        if ctor is bool:
            return key, _parse_bool(raw)
        return key, ctor(raw)
    except ValueError as exc:
        raise ScenarioError(f"bad value for {key}: {exc}", line_no,
                            text.index("=") + 2, path) from None


def load_scenario(path) -> Scenario:
    """Load and validate a structured-text scenario file."""
    values: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ScenarioError(str(exc)) from None

    for line_no, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        key, value = parse_assignment(text, line_no, path)
        if key == "preset":
            _apply_preset(values, value, line_no, path)
        else:
            values[key] = value
    if "name" not in values:
        raise ScenarioError("missing required field 'name'", path=path)
    return Scenario(values)


def scenario_from_preset(preset_name: str, **overrides) -> Scenario:
    values: dict = {}
    if preset_name:
        _apply_preset(values, preset_name, 0, None)
    for key, value in overrides.items():
        if key not in SCENARIO_KEYS:
            raise ScenarioError(f"unknown key {key!r}")
        values[key] = value
    return Scenario(values)


def apply_overrides(scenario: Scenario, assignments: list[str]) -> Scenario:
    """Apply --set key=value pairs on top of a scenario."""
    values = dict(scenario.values)
    for text in assignments:
        key, value = parse_assignment(text)
        if key == "preset":
            _apply_preset(values, value, 0, None)
        else:
            values[key] = value
    return Scenario(values)

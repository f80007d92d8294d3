"""Scenario and mission files: strict JSON schemas with aggregated errors.

Both loaders reject unknown keys and report every problem found in one
ScenarioError (with field paths) instead of failing fast, so a bad config
surfaces completely at load time rather than mid-run.  Omitted scenario
sections fall back to the REMUS-like defaults.
"""

import copy
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .actuation import FinSpec, ThrusterSpec
from .autopilot import AutopilotGains, Setpoint
from .defaults import DEFAULT_SCENARIO
from .errors import ParameterError, ScenarioError
from .hydrodynamics import Environment, HydroParams, prolate_spheroid_added_mass
from .sensors import SENSOR_KINDS, SensorConfig, TerrainField

NS_PER_SECOND = 1_000_000_000

_SIGMA_CHANNELS = {
    "depth": ("depth",),
    "imu": ("attitude", "rate"),
    "mag": ("heading",),
    "dvl": ("altitude", "velocity"),
}

_TERRAIN_KEYS = {
    "flat": {"kind", "depth"},
    "bumps": {"kind", "base_depth", "amplitude", "wavelength"},
    "heightmap": {"kind", "path"},
}


@dataclass
class InitialState:
    position: np.ndarray
    euler: np.ndarray
    nu: np.ndarray
    shaft_speed: float = 0.0


@dataclass
class ScenarioConfig:
    """Fully validated simulation configuration."""

    dt: float
    dt_ns: int
    physics_rate: int
    seed: int
    control_rate: float
    environment: Environment
    hydro: HydroParams
    fins: list
    thruster: ThrusterSpec
    gains: AutopilotGains
    sensor_configs: dict
    terrain: TerrainField
    initial: InitialState
    raw: dict = field(repr=False, default_factory=dict)


@dataclass
class Mission:
    """Timed setpoint schedule; times are strictly increasing from t = 0."""

    end_time: float
    events: list  # [(t, Setpoint), ...]


def _merge(base, override):
    """Deep-merge override onto base; lists and scalars replace wholesale."""
    if isinstance(base, dict) and isinstance(override, dict):
        out = dict(base)
        for key, value in override.items():
            out[key] = _merge(base.get(key), value) if key in base else value
        return out
    return copy.deepcopy(override)


class _Checker:
    """Collects problems as 'path: message' strings."""

    def __init__(self):
        self.problems = []

    def error(self, path, message):
        self.problems.append(f"{path}: {message}")

    def keys(self, data, allowed, path):
        if not isinstance(data, dict):
            self.error(path, f"expected an object (got {type(data).__name__})")
            return False
        for key in sorted(set(data) - set(allowed)):
            self.error(f"{path}.{key}", "unknown key")
        return True

    def number(self, data, key, path, minimum=None, above=None, max_inclusive=None):
        value = data.get(key)
        where = f"{path}.{key}"
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            self.error(where, f"expected a number (got {value!r})")
            return None
        value = float(value)
        if not math.isfinite(value):
            self.error(where, "must be finite")
            return None
        if minimum is not None and value < minimum:
            self.error(where, f"must be >= {minimum} (got {value})")
            return None
        if above is not None and value <= above:
            self.error(where, f"must be > {above} (got {value})")
            return None
        if max_inclusive is not None and value > max_inclusive:
            self.error(where, f"must be <= {max_inclusive} (got {value})")
            return None
        return value

    def vector(self, data, key, path, length, minimum=None):
        value = data.get(key)
        where = f"{path}.{key}"
        if not isinstance(value, (list, tuple)) or len(value) != length:
            self.error(where, f"expected a list of {length} numbers")
            return None
        out = []
        for i, entry in enumerate(value):
            if not isinstance(entry, (int, float)) or isinstance(entry, bool):
                self.error(f"{where}[{i}]", f"expected a number (got {entry!r})")
                return None
            if not math.isfinite(float(entry)):
                self.error(f"{where}[{i}]", "must be finite")
                return None
            if minimum is not None and entry < minimum:
                self.error(f"{where}[{i}]", f"must be >= {minimum} (got {entry})")
                return None
            out.append(float(entry))
        return np.array(out)


def _check_timing(chk, data):
    dt = chk.number(data, "dt", "scenario", above=0.0)
    dt_ns = physics_rate = None
    if dt is not None:
        rate = 1.0 / dt
        if abs(rate - round(rate)) > 1e-6:
            chk.error("scenario.dt", f"1/dt must be a whole number of Hz (got {rate})")
        else:
            physics_rate = int(round(rate))
            dt_ns = NS_PER_SECOND // physics_rate
            if dt_ns * physics_rate != NS_PER_SECOND:
                chk.error("scenario.dt", "tick must be an exact number of nanoseconds")
    return dt, dt_ns, physics_rate


def _check_vehicle(chk, veh, env_rho, dt):
    path = "vehicle"
    chk.keys(
        veh,
        {
            "mass", "length", "diameter", "inertia", "added_mass",
            "linear_damping", "quadratic_damping", "weight", "buoyancy",
            "cb_offset", "fins", "thruster",
        },
        path,
    )
    mass = chk.number(veh, "mass", path, above=0.0)
    length = chk.number(veh, "length", path, above=0.0)
    diameter = chk.number(veh, "diameter", path, above=0.0)

    inertia = veh.get("inertia")
    if isinstance(inertia, (list, tuple)) and len(inertia) == 3 and all(
        isinstance(v, (int, float)) for v in inertia
    ):
        inertia = np.diag([float(v) for v in inertia])
    else:
        try:
            inertia = np.asarray(inertia, float)
            if inertia.shape != (3, 3):
                raise ValueError
        except (ValueError, TypeError):
            chk.error(f"{path}.inertia", "expected 3 diagonal entries or a 3x3 matrix")
            inertia = None

    added = veh.get("added_mass")
    if added == "auto":
        if length and diameter and length > diameter:
            added = prolate_spheroid_added_mass(length, diameter, env_rho)
        else:
            added = None
            if length and diameter:
                chk.error(f"{path}.added_mass", "auto derivation needs length > diameter")
    else:
        added = chk.vector(veh, "added_mass", path, 6, minimum=0.0)

    lin = chk.vector(veh, "linear_damping", path, 6, minimum=0.0)
    quad = chk.vector(veh, "quadratic_damping", path, 6, minimum=0.0)

    weight = veh.get("weight")
    if weight is not None:
        weight = chk.number(veh, "weight", path, above=0.0)
    buoyancy = veh.get("buoyancy")
    if buoyancy is not None:
        buoyancy = chk.number(veh, "buoyancy", path, above=0.0)
    cb = chk.vector(veh, "cb_offset", path, 3)

    fins_raw = veh.get("fins")
    fins = []
    if not isinstance(fins_raw, list) or not 1 <= len(fins_raw) <= 16:
        chk.error(f"{path}.fins", "expected a list of 1..16 fin objects")
    else:
        for i, fin in enumerate(fins_raw):
            fpath = f"{path}.fins[{i}]"
            if not chk.keys(
                fin,
                {"x_off", "r", "theta", "area", "lift_coeff", "delta_max", "time_constant"},
                fpath,
            ):
                continue
            x_off = chk.number(fin, "x_off", fpath)
            r = chk.number(fin, "r", fpath, minimum=0.0)
            theta = chk.number(fin, "theta", fpath)
            area = chk.number(fin, "area", fpath, above=0.0)
            cl = chk.number(fin, "lift_coeff", fpath)
            dmax = chk.number(fin, "delta_max", fpath, above=0.0)
            tau = chk.number(fin, "time_constant", fpath, above=0.0)
            if None not in (x_off, r, theta, area, cl, dmax, tau):
                if dt is not None and tau <= dt:
                    chk.error(f"{fpath}.time_constant", f"must exceed the physics dt ({dt})")
                else:
                    fins.append(FinSpec(x_off, r, theta, area, cl, dmax, tau))

    thr = veh.get("thruster", {})
    tpath = f"{path}.thruster"
    thruster = None
    if chk.keys(thr, {"k_thrust", "time_constant", "n_max", "k_roll_reaction"}, tpath):
        kt = chk.number(thr, "k_thrust", tpath, minimum=0.0)
        tau_n = chk.number(thr, "time_constant", tpath, above=0.0)
        n_max = chk.number(thr, "n_max", tpath, above=0.0)
        kroll = chk.number(thr, "k_roll_reaction", tpath, minimum=0.0)
        if None not in (kt, tau_n, n_max, kroll):
            if dt is not None and tau_n <= dt:
                chk.error(f"{tpath}.time_constant", f"must exceed the physics dt ({dt})")
            else:
                thruster = ThrusterSpec(kt, tau_n, n_max, kroll)

    if chk.problems:
        return None, fins, thruster, weight, buoyancy
    return (
        {
            "mass": mass,
            "length": length,
            "diameter": diameter,
            "inertia": inertia,
            "added_mass": added,
            "linear_damping": lin,
            "quadratic_damping": quad,
            "cb_offset": cb,
        },
        fins,
        thruster,
        weight,
        buoyancy,
    )


def _check_sensors(chk, sensors, physics_rate):
    configs = {}
    chk.keys(sensors, set(SENSOR_KINDS), "sensors")
    for kind in SENSOR_KINDS:
        cfg = sensors.get(kind)
        if cfg is None:
            configs[kind] = None
            continue
        path = f"sensors.{kind}"
        if not chk.keys(cfg, {"rate", "sigma", "dropout", "seed"}, path):
            continue
        rate = chk.number(cfg, "rate", path, above=0.0)
        dropout = chk.number(cfg, "dropout", path, minimum=0.0, max_inclusive=1.0)
        seed = cfg.get("seed")
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            chk.error(f"{path}.seed", f"expected a non-negative integer (got {seed!r})")
            seed = None
        sigma = cfg.get("sigma")
        if isinstance(sigma, dict):
            allowed = set(_SIGMA_CHANNELS[kind])
            chk.keys(sigma, allowed, f"{path}.sigma")
            sigma = {
                key: chk.number(sigma, key, f"{path}.sigma", minimum=0.0)
                for key in sigma
                if key in allowed
            }
        elif isinstance(sigma, (int, float)) and not isinstance(sigma, bool):
            sigma = chk.number(cfg, "sigma", path, minimum=0.0)
        else:
            chk.error(f"{path}.sigma", f"expected a number or an object (got {sigma!r})")
            sigma = None
        if rate is not None and physics_rate is not None:
            period = physics_rate / rate
            if abs(period - round(period)) > 1e-9 or round(period) < 1:
                chk.error(
                    f"{path}.rate",
                    f"{rate} Hz does not divide the physics rate ({physics_rate} Hz)",
                )
        if None not in (rate, dropout, seed) and sigma is not None:
            configs[kind] = SensorConfig(rate, sigma, dropout, seed)
    return configs


def _check_terrain(chk, terrain):
    kind = terrain.get("kind")
    if kind not in _TERRAIN_KEYS:
        chk.error("terrain.kind", f"expected one of {sorted(_TERRAIN_KEYS)} (got {kind!r})")
        return None
    chk.keys(terrain, _TERRAIN_KEYS[kind], "terrain")
    if kind == "flat":
        depth = chk.number(terrain, "depth", "terrain", above=0.0)
        return TerrainField.flat(depth) if depth is not None else None
    if kind == "bumps":
        base = chk.number(terrain, "base_depth", "terrain", above=0.0)
        amp = chk.number(terrain, "amplitude", "terrain", minimum=0.0)
        wave = chk.number(terrain, "wavelength", "terrain", above=0.0)
        if None in (base, amp, wave):
            return None
        if amp >= base:
            chk.error("terrain.amplitude", "bumps must stay below the surface")
            return None
        return TerrainField.bumps(base, amp, wave)
    path = terrain.get("path")
    if not isinstance(path, str):
        chk.error("terrain.path", f"expected a file path (got {path!r})")
        return None
    try:
        return TerrainField.from_csv(path)
    except (OSError, ScenarioError) as exc:
        chk.error("terrain.path", str(exc))
        return None


def scenario_from_dict(data):
    """Validate a scenario dict (merged over defaults) into a ScenarioConfig."""
    if not isinstance(data, dict):
        raise ScenarioError(["scenario: expected a JSON object"])
    merged = _merge(DEFAULT_SCENARIO, data)
    # "bumps"/"heightmap" terrains replace the default "flat" wholesale
    if isinstance(data.get("terrain"), dict) and data["terrain"].get("kind") != "flat":
        merged["terrain"] = copy.deepcopy(data["terrain"])

    chk = _Checker()
    chk.keys(
        merged,
        {"dt", "seed", "control_rate", "environment", "vehicle", "autopilot",
         "sensors", "terrain", "initial"},
        "scenario",
    )

    dt, dt_ns, physics_rate = _check_timing(chk, merged)

    seed = merged.get("seed")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        chk.error("scenario.seed", f"expected a non-negative integer (got {seed!r})")

    env = merged.get("environment", {})
    chk.keys(env, {"rho", "gravity", "current"}, "environment")
    rho = chk.number(env, "rho", "environment", above=0.0)
    gravity = chk.number(env, "gravity", "environment", above=0.0)
    current = chk.vector(env, "current", "environment", 3)

    control_rate = chk.number(merged, "control_rate", "scenario", above=0.0)
    if control_rate is not None and physics_rate is not None:
        period = physics_rate / control_rate
        if abs(period - round(period)) > 1e-9 or round(period) < 1:
            chk.error(
                "scenario.control_rate",
                f"{control_rate} Hz does not divide the physics rate ({physics_rate} Hz)",
            )

    hydro_fields, fins, thruster, weight, buoyancy = _check_vehicle(
        chk, merged.get("vehicle", {}), rho if rho else 1025.0, dt
    )

    ap = merged.get("autopilot", {})
    gains = None
    if chk.keys(ap, set(DEFAULT_SCENARIO["autopilot"]), "autopilot"):
        vals = {key: chk.number(ap, key, "autopilot") for key in DEFAULT_SCENARIO["autopilot"]}
        if all(v is not None for v in vals.values()):
            try:
                gains = AutopilotGains(**vals)
            except ParameterError as exc:
                chk.error("autopilot", str(exc))

    sensor_configs = _check_sensors(chk, merged.get("sensors", {}), physics_rate)
    terrain = _check_terrain(chk, merged.get("terrain", {}))

    init = merged.get("initial", {})
    initial = None
    if chk.keys(init, {"position", "euler", "nu", "shaft_speed"}, "initial"):
        pos = chk.vector(init, "position", "initial", 3)
        euler = chk.vector(init, "euler", "initial", 3)
        nu = chk.vector(init, "nu", "initial", 6)
        n0 = chk.number(init, "shaft_speed", "initial")
        if pos is not None and euler is not None and nu is not None and n0 is not None:
            initial = InitialState(pos, euler, nu, n0)

    if chk.problems:
        raise ScenarioError(chk.problems)

    # resolve hydrostatics: weight defaults to m*g, buoyancy to the weight
    if weight is None:
        weight = hydro_fields["mass"] * gravity
    if buoyancy is None:
        buoyancy = weight
    try:
        hydro = HydroParams(
            mass=hydro_fields["mass"],
            inertia=hydro_fields["inertia"],
            length=hydro_fields["length"],
            diameter=hydro_fields["diameter"],
            added_mass=hydro_fields["added_mass"],
            linear_damping=hydro_fields["linear_damping"],
            quadratic_damping=hydro_fields["quadratic_damping"],
            weight=weight,
            buoyancy=buoyancy,
            r_b=hydro_fields["cb_offset"],
        )
        environment = Environment(rho, gravity, current)
    except ParameterError as exc:
        raise ScenarioError([f"vehicle: {exc}"]) from exc

    if initial.shaft_speed is not None and abs(initial.shaft_speed) > thruster.n_max:
        raise ScenarioError(["initial.shaft_speed: exceeds the thruster n_max limit"])

    return ScenarioConfig(
        dt=dt,
        dt_ns=dt_ns,
        physics_rate=physics_rate,
        seed=seed,
        control_rate=control_rate,
        environment=environment,
        hydro=hydro,
        fins=fins,
        thruster=thruster,
        gains=gains,
        sensor_configs=sensor_configs,
        terrain=terrain,
        initial=initial,
        raw=merged,
    )


def load_scenario(text):
    """Parse and validate scenario JSON text."""
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"scenario: invalid JSON ({exc})"]) from exc
    return scenario_from_dict(data)


def load_scenario_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read())


def mission_from_dict(data):
    if not isinstance(data, dict):
        raise ScenarioError(["mission: expected a JSON object"])
    chk = _Checker()
    chk.keys(data, {"end_time", "events"}, "mission")
    end_time = chk.number(data, "end_time", "mission", above=0.0)
    events_raw = data.get("events")
    events = []
    if not isinstance(events_raw, list) or not events_raw:
        chk.error("mission.events", "expected a non-empty list of events")
    else:
        prev_t = None
        for i, ev in enumerate(events_raw):
            path = f"mission.events[{i}]"
            if not chk.keys(ev, {"t", "mode", "value", "heading", "speed"}, path):
                continue
            t = chk.number(ev, "t", path, minimum=0.0)
            mode = ev.get("mode")
            if mode not in ("depth", "altitude"):
                chk.error(f"{path}.mode", f"expected 'depth' or 'altitude' (got {mode!r})")
                mode = None
            value = chk.number(ev, "value", path, minimum=0.0)
            heading = chk.number(ev, "heading", path)
            speed = chk.number(ev, "speed", path, minimum=0.0)
            if None in (t, mode, value, heading, speed):
                continue
            if i == 0 and t != 0.0:
                chk.error(f"{path}.t", "first event must be at t = 0")
            if prev_t is not None and t <= prev_t:
                chk.error(f"{path}.t", "event times must be strictly increasing")
            prev_t = t
            events.append((t, Setpoint(mode, value, heading, speed)))
    if end_time is not None and events and events[-1][0] >= end_time:
        chk.error("mission.end_time", "must lie beyond the last event time")
    if chk.problems:
        raise ScenarioError(chk.problems)
    return Mission(end_time, events)


def load_mission(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"mission: invalid JSON ({exc})"]) from exc
    return mission_from_dict(data)


def load_mission_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return load_mission(fh.read())

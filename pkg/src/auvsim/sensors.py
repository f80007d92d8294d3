"""Simulated sensor suite: pressure depth, IMU, magnetometer and DVL.

Each sensor runs at its own rate (which must divide the physics rate), adds
Gaussian noise from its own seeded RNG stream, and can drop samples with a
configured probability.  The DVL measures altitude above a terrain field
(flat, sinusoidal bumps, or a CSV heightmap queried bilinearly).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import quaternions as quat
from .errors import ParameterError, ScenarioError

SENSOR_KINDS = ("depth", "imu", "mag", "dvl")


@dataclass
class SensorConfig:
    """Rate, per-channel noise, dropout probability and RNG sub-seed.

    sigma may be a single float (applied to every channel) or a mapping of
    channel-group names: depth uses "depth"; imu uses "attitude" and "rate";
    mag uses "heading"; dvl uses "altitude" and "velocity".
    """

    rate: float = 10.0
    sigma: object = 0.0
    dropout_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.rate <= 0:
            raise ParameterError(f"sensor rate must be > 0 (got {self.rate})")
        if not 0.0 <= self.dropout_prob <= 1.0:
            raise ParameterError(f"dropout_prob must be in [0, 1] (got {self.dropout_prob})")

    def sigma_for(self, channel):
        if isinstance(self.sigma, dict):
            return float(self.sigma.get(channel, 0.0))
        return float(self.sigma)


@dataclass
class Measurement:
    """One timestamped sensor sample; valid=False marks a dropout."""

    stamp: float                     # simulation time (s), exact tick multiple
    kind: str
    values: dict
    valid: bool = True
    stamp_ns: int = 0                # same instant in integer nanoseconds


class TerrainField:
    """Seafloor depth (m, positive down) as a function of world (x, y).

    Backed either by an analytic generator (flat / sinusoidal ridges) or by
    a uniform grid sampled with bilinear interpolation, clamped at the
    edges and exact at the nodes.
    """

    def __init__(self, fn=None, grid=None, origin=(0.0, 0.0), cell_size=1.0):
        self._fn = fn
        self._grid = None
        if grid is not None:
            self._grid = np.asarray(grid, float)
            if self._grid.ndim != 2 or self._grid.shape[0] < 2 or self._grid.shape[1] < 2:
                raise ParameterError("terrain grid must be 2-D with at least 2x2 nodes")
            if not np.all(np.isfinite(self._grid)):
                raise ParameterError("terrain grid contains non-finite depths")
            if cell_size <= 0:
                raise ParameterError(f"terrain cell size must be > 0 (got {cell_size})")
            self._ox, self._oy = float(origin[0]), float(origin[1])
            self._cell = float(cell_size)

    @classmethod
    def flat(cls, depth):
        return cls(fn=lambda x, y: depth)

    @classmethod
    def bumps(cls, base_depth=30.0, amplitude=2.25, wavelength=20.0):
        """Sinusoidal ridges across x: peak-to-trough height is 2*amplitude."""
        k = 2.0 * math.pi / wavelength
        return cls(fn=lambda x, y: base_depth + amplitude * math.sin(k * x))

    @classmethod
    def from_csv(cls, path):
        """Load a heightmap CSV.

        Line 1 is the literal header "origin_x,origin_y,cell_size", line 2
        its values, and each following line one row of depths (row i lies at
        y = origin_y + i*cell_size, column j at x = origin_x + j*cell_size).
        """
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        if len(lines) < 3 or lines[0].replace(" ", "") != "origin_x,origin_y,cell_size":
            raise ScenarioError([f"{path}: expected header 'origin_x,origin_y,cell_size'"])
        try:
            ox, oy, cell = (float(tok) for tok in lines[1].split(","))
            rows = [[float(tok) for tok in ln.split(",")] for ln in lines[2:]]
        except ValueError as exc:
            raise ScenarioError([f"{path}: {exc}"]) from exc
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise ScenarioError([f"{path}: ragged rows in heightmap grid"])
        return cls(grid=np.array(rows), origin=(ox, oy), cell_size=cell)

    def depth_at(self, x, y):
        if self._grid is None:
            return float(self._fn(x, y))
        ny, nx = self._grid.shape
        gx = (x - self._ox) / self._cell
        gy = (y - self._oy) / self._cell
        gx = min(max(gx, 0.0), nx - 1.0)
        gy = min(max(gy, 0.0), ny - 1.0)
        j0 = min(int(gx), nx - 2)
        i0 = min(int(gy), ny - 2)
        fx = gx - j0
        fy = gy - i0
        g = self._grid
        top = g[i0, j0] * (1.0 - fx) + g[i0, j0 + 1] * fx
        bot = g[i0 + 1, j0] * (1.0 - fx) + g[i0 + 1, j0 + 1] * fx
        return float(top * (1.0 - fy) + bot * fy)


def terrain_depth(terrain, x, y):
    """Seafloor depth below (x, y); grid queries clamp at the edges."""
    return terrain.depth_at(x, y)


def make_stream(master_seed, sub_seed):
    """Independent, reproducible RNG stream for one sensor."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, sub_seed)))


def sample_depth(state, cfg, rng, stamp=0.0, stamp_ns=0):
    """Pressure depth: z (positive down) plus Gaussian noise."""
    value = state.position[2] + rng.normal(0.0, cfg.sigma_for("depth"))
    return Measurement(stamp, "depth", {"depth": float(value)}, True, stamp_ns)


def sample_imu(state, cfg, rng, stamp=0.0, stamp_ns=0):
    """Euler attitude and body rates, each channel with independent noise."""
    s_att = cfg.sigma_for("attitude")
    s_rate = cfg.sigma_for("rate")
    phi, theta, psi = quat.to_euler(state.attitude)
    values = {
        "roll": phi + rng.normal(0.0, s_att),
        "pitch": theta + rng.normal(0.0, s_att),
        "yaw": psi + rng.normal(0.0, s_att),
        "p": state.nu[3] + rng.normal(0.0, s_rate),
        "q": state.nu[4] + rng.normal(0.0, s_rate),
        "r": state.nu[5] + rng.normal(0.0, s_rate),
    }
    return Measurement(stamp, "imu", {k: float(v) for k, v in values.items()}, True, stamp_ns)


def sample_mag(state, cfg, rng, stamp=0.0, stamp_ns=0):
    """Heading from the magnetometer, wrapped into (-pi, pi]."""
    psi = quat.to_euler(state.attitude)[2]
    heading = quat.wrap_angle(psi + rng.normal(0.0, cfg.sigma_for("heading")))
    return Measurement(stamp, "mag", {"heading": float(heading)}, True, stamp_ns)


def sample_dvl(state, terrain, cfg, rng, stamp=0.0, stamp_ns=0):
    """Altitude above the seafloor plus body velocity, or a dropout.

    The dropout draw happens first so the noise stream stays aligned across
    configurations.  Altitude <= 0 means bottom contact; the measurement is
    still produced and the harness raises the collision flag.
    """
    if rng.uniform() < cfg.dropout_prob:
        nan = float("nan")
        values = {"altitude": nan, "vx": nan, "vy": nan, "vz": nan}
        return Measurement(stamp, "dvl", values, False, stamp_ns)
    s_alt = cfg.sigma_for("altitude")
    s_vel = cfg.sigma_for("velocity")
    altitude = terrain.depth_at(state.position[0], state.position[1]) - state.position[2]
    values = {
        "altitude": float(altitude + rng.normal(0.0, s_alt)),
        "vx": float(state.nu[0] + rng.normal(0.0, s_vel)),
        "vy": float(state.nu[1] + rng.normal(0.0, s_vel)),
        "vz": float(state.nu[2] + rng.normal(0.0, s_vel)),
    }
    return Measurement(stamp, "dvl", values, True, stamp_ns)


class SensorSuite:
    """Schedules the configured sensors against the physics tick clock.

    Sampling happens on exact tick multiples (physics_rate / sensor_rate
    must be an integer), so stamps form jitter-free arithmetic sequences.
    Each sensor owns an RNG stream derived from (master_seed, sensor seed).
    """

    def __init__(self, configs, terrain, physics_rate, dt_ns, master_seed):
        self.terrain = terrain
        self.dt_ns = int(dt_ns)
        self.configs = {}
        self.periods = {}
        self.streams = {}
        self.latest = {}
        for kind in SENSOR_KINDS:
            cfg = configs.get(kind)
            if cfg is None:
                continue
            period = physics_rate / cfg.rate
            if abs(period - round(period)) > 1e-9 or round(period) < 1:
                raise ScenarioError(
                    [f"sensors.{kind}.rate: {cfg.rate} Hz does not divide the physics rate"
                     f" ({physics_rate} Hz)"]
                )
            self.configs[kind] = cfg
            self.periods[kind] = int(round(period))
            self.streams[kind] = make_stream(master_seed, cfg.seed)

    def due(self, kind, tick):
        return kind in self.periods and tick % self.periods[kind] == 0

    def any_due(self, tick):
        for period in self.periods.values():
            if tick % period == 0:
                return True
        return False

    def sample_tick(self, tick, state):
        """Sample every sensor due at this tick, in fixed kind order."""
        out = []
        stamp_ns = tick * self.dt_ns
        stamp = stamp_ns * 1e-9
        for kind in SENSOR_KINDS:
            if not self.due(kind, tick):
                continue
            cfg = self.configs[kind]
            rng = self.streams[kind]
            if kind == "depth":
                meas = sample_depth(state, cfg, rng, stamp, stamp_ns)
            elif kind == "imu":
                meas = sample_imu(state, cfg, rng, stamp, stamp_ns)
            elif kind == "mag":
                meas = sample_mag(state, cfg, rng, stamp, stamp_ns)
            else:
                meas = sample_dvl(state, self.terrain, cfg, rng, stamp, stamp_ns)
            self.latest[kind] = meas
            out.append(meas)
        return out

"""Onboard control loops.

Depth is held by a nested loop: an outer PID maps depth error to a desired
pitch (clamped, with a clamped and conditionally-frozen integrator), and an
inner PD maps pitch error and pitch rate to a stern-plane command.  Heading
uses a first-order sliding-mode law with a tanh boundary layer; speed is a
PI on measured surge; altitude-from-bottom reuses the depth loop by
retargeting the depth setpoint from DVL altitude.

All controllers are stepped at the (fixed) control rate from the latest
sensor measurements, never per physics tick.
"""

import math
from dataclasses import dataclass

from .errors import ParameterError
from .quaternions import wrap_angle


@dataclass(frozen=True)
class AutopilotGains:
    """Gains for the depth, heading and speed loops."""

    # depth error (m) -> desired pitch (rad)
    depth_kp: float = 0.35
    depth_ki: float = 0.02
    depth_kd: float = 0.3
    theta_max: float = 0.3        # desired-pitch clamp (rad)
    depth_int_limit: float = 0.15  # clamp on the integral term (rad)
    # pitch error (rad) and pitch rate -> stern-plane command (rad)
    pitch_kp: float = 3.0
    pitch_kd: float = 1.0
    # heading sliding-mode: s = r + lam * wrap(psi - psi_d)
    heading_lambda: float = 0.5   # sliding-surface gain (1/s)
    heading_k_s: float = 0.3      # switching gain (rad)
    heading_phi_b: float = 0.1    # boundary-layer width (rad)
    heading_k_r: float = 0.4      # yaw-rate damping (rad per rad/s)
    # speed error (m/s) -> shaft-speed command (rev/s)
    speed_kp: float = 12.0
    speed_ki: float = 4.0

    def __post_init__(self):
        for name in (
            "depth_kp", "depth_ki", "depth_kd", "depth_int_limit", "pitch_kp",
            "pitch_kd", "heading_lambda", "heading_k_s", "heading_k_r",
            "speed_kp", "speed_ki",
        ):
            if getattr(self, name) < 0:
                raise ParameterError(f"autopilot gain {name} must be >= 0")
        if not 0.0 < self.theta_max < math.pi / 2:
            raise ParameterError(f"theta_max must be in (0, pi/2) (got {self.theta_max})")
        if self.heading_phi_b <= 0:
            raise ParameterError(f"heading_phi_b must be > 0 (got {self.heading_phi_b})")


@dataclass
class Setpoint:
    """Commanded depth-or-altitude (m), heading (rad) and speed (m/s)."""

    mode: str = "depth"            # "depth" or "altitude"
    value: float = 0.0
    heading: float = 0.0
    speed: float = 0.0

    def __post_init__(self):
        if self.mode not in ("depth", "altitude"):
            raise ParameterError(f"setpoint mode must be depth or altitude (got {self.mode!r})")
        for name in ("value", "heading", "speed"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"setpoint {name} must be finite")
        self.heading = wrap_angle(self.heading)


def _clamp(x, limit):
    return max(-limit, min(limit, x))


class DepthController:
    """Nested pitch-depth loop: depth error -> desired pitch -> stern command.

    Depth error is setpoint - depth with z positive down, so a positive
    error (target deeper) demands a negative (nose-down) pitch.  The outer
    integrator is frozen while the desired pitch is saturated and its
    contribution is clamped (anti-windup by construction).
    """

    def __init__(self, gains, dt, stern_limit=math.inf):
        self.gains = gains
        self.dt = dt
        self.stern_limit = stern_limit
        self.reset()

    def reset(self):
        self._i_term = 0.0
        self._prev_err = None
        self.theta_d = 0.0

    def step(self, depth_meas, pitch, q, depth_target):
        g = self.gains
        e = depth_target - depth_meas
        e_dot = 0.0 if self._prev_err is None else (e - self._prev_err) / self.dt
        self._prev_err = e

        raw = -(g.depth_kp * e + self._i_term + g.depth_kd * e_dot)
        self.theta_d = _clamp(raw, g.theta_max)
        if raw == self.theta_d:  # integrate only while unsaturated
            self._i_term = _clamp(self._i_term + g.depth_ki * e * self.dt, g.depth_int_limit)

        stern = g.pitch_kp * (self.theta_d - pitch) - g.pitch_kd * q
        return _clamp(stern, self.stern_limit)


def heading_step(psi, r, psi_d, gains, limit=math.inf):
    """Sliding-mode rudder command; odd in (heading error, yaw rate).

    s = r + lambda * wrap(psi - psi_d); the tanh boundary layer bounds the
    switching term, so |command| <= k_s + k_r * |r| before the final clamp.
    """
    e = wrap_angle(psi - psi_d)
    s = r + gains.heading_lambda * e
    rudder = -(gains.heading_k_s * math.tanh(s / gains.heading_phi_b) + gains.heading_k_r * r)
    return _clamp(rudder, limit)


class SpeedController:
    """PI shaft-speed command with conditional integration anti-windup."""

    def __init__(self, gains, dt, n_max):
        self.gains = gains
        self.dt = dt
        self.n_max = n_max
        self.reset()

    def reset(self):
        self._i_term = 0.0

    def step(self, u_meas, u_target):
        e = u_target - u_meas
        raw = self.gains.speed_kp * e + self._i_term
        cmd = _clamp(raw, self.n_max)
        if raw == cmd:  # freeze the integrator while the command saturates
            self._i_term = _clamp(self._i_term + self.gains.speed_ki * e * self.dt, self.n_max)
        return cmd


def retarget_depth(depth_meas, altitude_meas, altitude_target):
    """Depth setpoint that closes the altitude error: descend when too high."""
    return depth_meas + (altitude_meas - altitude_target)


class Autopilot:
    """Drives the three loops from the latest measurements at the control rate.

    Measurement sources: depth sensor for the depth loop, IMU for pitch /
    pitch rate / yaw rate, magnetometer for heading, DVL for surge speed and
    (in altitude mode) altitude.  On DVL dropout the previous depth setpoint
    and speed measurement are held.  Switching setpoint mode resets the
    depth-loop integrator to avoid transient kicks.
    """

    def __init__(self, gains, dt, fins, thruster):
        limit = min((f.delta_max for f in fins), default=math.inf)
        self.gains = gains
        self.depth_loop = DepthController(gains, dt, stern_limit=limit)
        self.speed_loop = SpeedController(gains, dt, n_max=thruster.n_max)
        self.rudder_limit = limit
        self.setpoint = None
        self._depth_target = None
        self._u_meas = 0.0

    def set_setpoint(self, sp):
        if self.setpoint is None or sp.mode != self.setpoint.mode:
            self.depth_loop.reset()
            self._depth_target = None
        self.setpoint = sp

    def step(self, latest):
        """latest: dict of kind -> Measurement.  Returns (stern, rudder, n_cmd)."""
        sp = self.setpoint
        depth = latest["depth"].values["depth"]
        imu = latest["imu"].values
        psi = latest["mag"].values["heading"]
        dvl = latest.get("dvl")
        dvl_ok = dvl is not None and dvl.valid

        if dvl_ok:
            self._u_meas = dvl.values["vx"]
        if sp.mode == "altitude":
            if dvl_ok:
                self._depth_target = retarget_depth(depth, dvl.values["altitude"], sp.value)
            elif self._depth_target is None:
                self._depth_target = depth  # hold until the first valid altitude
        else:
            self._depth_target = sp.value

        stern = self.depth_loop.step(depth, imu["pitch"], imu["q"], self._depth_target)
        rudder = heading_step(psi, imu["r"], sp.heading, self.gains, self.rudder_limit)
        n_cmd = self.speed_loop.step(self._u_meas, sp.speed)
        return stern, rudder, n_cmd

"""Fin and thruster force model.

Each fin is located by its center of pressure: longitudinal offset x_off
along the body x axis, radial distance r from that axis, and angular
position theta measured counter-clockwise from +y_b in the y_b-z_b plane
(z down), so the COP sits at (x_off, r cos(theta), r sin(theta)).  A
deflection delta produces a lift-like force tangential to the fin ring,
f = 0.5 * rho * v_r^2 * A * C_L * delta, where v_r is the component of the
flow in the plane of the fin.  Fin drag along x_b is neglected.

The thruster is a sign-preserving quadratic shaft-speed law
T = k_thrust * |n| * n with an optional propeller roll-reaction torque;
both fins and shaft follow first-order lags toward their commands.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .hydrodynamics import Wrench


@dataclass(frozen=True)
class FinSpec:
    """Geometry and effectiveness of one control fin."""

    x_off: float                 # COP offset along body x from the COM (m)
    r: float                     # radial COP distance from the x axis (m)
    theta: float                 # angular COP position, CCW from +y_b (rad)
    area: float = 0.0064         # planform area (m^2)
    lift_coeff: float = 3.0      # lift-slope coefficient per rad of deflection
    delta_max: float = 0.30      # symmetric deflection limit (rad)
    tau_actuator: float = 0.1    # first-order servo time constant (s)

    def __post_init__(self):
        if self.area <= 0:
            raise ParameterError(f"fin area must be > 0 (got {self.area})")
        if self.delta_max <= 0:
            raise ParameterError(f"fin delta_max must be > 0 (got {self.delta_max})")
        if self.tau_actuator <= 0:
            raise ParameterError(f"fin time constant must be > 0 (got {self.tau_actuator})")
        if self.r < 0:
            raise ParameterError(f"fin radial distance must be >= 0 (got {self.r})")


@dataclass(frozen=True)
class ThrusterSpec:
    """Propeller thrust/lag model: T = k_thrust * |n| * n, n in rev/s."""

    k_thrust: float = 0.025      # N s^2 / rev^2
    tau_motor: float = 0.3       # shaft-speed time constant (s)
    n_max: float = 26.0          # rev/s limit
    k_roll_reaction: float = 0.0  # N m s^2 / rev^2, reaction torque about x

    def __post_init__(self):
        if self.k_thrust < 0:
            raise ParameterError(f"k_thrust must be >= 0 (got {self.k_thrust})")
        if self.tau_motor <= 0:
            raise ParameterError(f"motor time constant must be > 0 (got {self.tau_motor})")
        if self.n_max <= 0:
            raise ParameterError(f"n_max must be > 0 (got {self.n_max})")


@dataclass
class ActuatorState:
    """Current and commanded fin deflections (rad) and shaft speed (rev/s)."""

    deltas: np.ndarray
    delta_cmds: np.ndarray
    n: float = 0.0
    n_cmd: float = 0.0

    def __post_init__(self):
        self.deltas = np.asarray(self.deltas, float).copy()
        self.delta_cmds = np.asarray(self.delta_cmds, float).copy()

    @classmethod
    def rest(cls, n_fins):
        return cls(np.zeros(n_fins), np.zeros(n_fins))

    def copy(self):
        return ActuatorState(self.deltas.copy(), self.delta_cmds.copy(), self.n, self.n_cmd)


def fin_relative_speed(nu_r_linear, theta):
    """Effective flow speed in the plane of a fin at angular position theta."""
    vx, vy, vz = nu_r_linear[0], nu_r_linear[1], nu_r_linear[2]
    return math.sqrt(vx * vx + (vy * math.sin(theta)) ** 2 + (vz * math.cos(theta)) ** 2)


def fin_force_magnitude(rho, v_r, area, lift_coeff, delta):
    """Signed lift force for deflection delta: linear in delta, quadratic in v_r."""
    return 0.5 * rho * v_r * v_r * area * lift_coeff * delta


def fin_wrench(fin, delta, nu_r, rho):
    """Force and moment one fin applies to the body.

    The force is tangential to the fin ring, [0, f sin(theta), -f cos(theta)],
    and the moment is the cross product of the COP position with it.  The
    surge component is zero by construction.
    """
    v_r = fin_relative_speed(np.asarray(nu_r, float)[:3], fin.theta)
    f = fin_force_magnitude(rho, v_r, fin.area, fin.lift_coeff, delta)
    sin_t, cos_t = math.sin(fin.theta), math.cos(fin.theta)
    force = np.array([0.0, f * sin_t, -f * cos_t])
    cop = np.array([fin.x_off, fin.r * cos_t, fin.r * sin_t])
    return Wrench(force, np.cross(cop, force))


def thrust_wrench(spec, n):
    """Propeller wrench at shaft speed n (rev/s), sign-preserving quadratic."""
    t = spec.k_thrust * abs(n) * n
    k = -spec.k_roll_reaction * abs(n) * n
    return Wrench(np.array([t, 0.0, 0.0]), np.array([k, 0.0, 0.0]))


def total_actuation(fins, act, spec, nu_r, rho):
    """Sum of all fin wrenches plus the thruster wrench."""
    if len(act.deltas) != len(fins):
        raise ParameterError(
            f"actuator state carries {len(act.deltas)} deflections for {len(fins)} fins"
        )
    total = thrust_wrench(spec, act.n)
    for fin, delta in zip(fins, act.deltas):
        total = total + fin_wrench(fin, delta, nu_r, rho)
    return total


def actuator_step(act, fins, spec, dt):
    """Advance deflections and shaft speed one first-order-lag step, then clamp.

    delta' = delta + (dt / tau) * (cmd - delta), a contraction toward the
    command whenever dt <= tau.
    """
    deltas = np.empty_like(act.deltas)
    for i, fin in enumerate(fins):
        d = act.deltas[i] + (dt / fin.tau_actuator) * (act.delta_cmds[i] - act.deltas[i])
        deltas[i] = max(-fin.delta_max, min(fin.delta_max, d))
    n = act.n + (dt / spec.tau_motor) * (act.n_cmd - act.n)
    n = max(-spec.n_max, min(spec.n_max, n))
    return ActuatorState(deltas, act.delta_cmds.copy(), n, act.n_cmd)


def allocate_fins(fins, stern, rudder):
    """Map stern-plane and rudder commands onto individual fin deflections.

    delta_i = -cos(theta_i) * stern - sin(theta_i) * rudder, clamped to each
    fin's limit.  For tail-mounted fins (x_off < 0) a positive stern command
    pitches the nose up and a positive rudder command yaws it to starboard;
    diametrically opposed fins receive opposite deflections, so their net
    roll moment cancels while forces and steering moments add.
    """
    cmds = np.empty(len(fins))
    for i, fin in enumerate(fins):
        d = -math.cos(fin.theta) * stern - math.sin(fin.theta) * rudder
        cmds[i] = max(-fin.delta_max, min(fin.delta_max, d))
    return cmds

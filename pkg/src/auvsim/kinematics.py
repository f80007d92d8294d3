"""Pose propagation: body-to-world velocity transform and a fixed-step RK4
integrator over the combined (pose, velocity, actuator) ODE.

The attitude is integrated as a quaternion and renormalized once per step;
Euler angles exist only at I/O boundaries.
"""

from dataclasses import dataclass, field

import numpy as np

from . import quaternions as quat
from .errors import SimulationFault
from .hydrodynamics import VehicleState
from .actuation import ActuatorState


@dataclass
class StateDerivative:
    """Time derivative of the combined simulation state."""

    position_dot: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude_dot: np.ndarray = field(default_factory=lambda: np.zeros(4))
    nu_dot: np.ndarray = field(default_factory=lambda: np.zeros(6))
    fin_rates: np.ndarray = field(default_factory=lambda: np.zeros(0))
    shaft_rate: float = 0.0


def body_to_world(attitude, nu):
    """Kinematic part of the state derivative for body velocity nu.

    position_dot = R(attitude) @ (u, v, w); attitude_dot = 0.5 * q ⊗ (0, p, q, r).
    """
    nu = np.asarray(nu, float)
    return StateDerivative(
        position_dot=quat.rotate(attitude, nu[:3]),
        attitude_dot=quat.rate(attitude, nu[3:]),
    )


def _pack(state, act):
    return np.concatenate([state.position, state.attitude, state.nu, act.deltas, [act.n]])


def _unpack(y, act):
    n_fins = len(act.deltas)
    state = VehicleState.__new__(VehicleState)
    state.position = y[0:3]
    state.attitude = y[3:7]
    state.nu = y[7:13]
    new_act = ActuatorState.__new__(ActuatorState)
    new_act.deltas = y[13 : 13 + n_fins]
    new_act.delta_cmds = act.delta_cmds
    new_act.n = float(y[13 + n_fins])
    new_act.n_cmd = act.n_cmd
    return state, new_act


def integrate_step(state, actuators, derivative_fn, dt):
    """Advance one classical RK4 step of the combined state ODE.

    derivative_fn(state, actuators) -> StateDerivative supplies position,
    attitude, velocity and actuator rates; the quaternion is renormalized
    after the step.  Deterministic: identical inputs give identical outputs.
    """
    y0 = _pack(state, actuators)

    def f(y):
        s, a = _unpack(y, actuators)
        d = derivative_fn(s, a)
        fin_rates = d.fin_rates if len(d.fin_rates) else np.zeros(len(actuators.deltas))
        return np.concatenate(
            [d.position_dot, d.attitude_dot, d.nu_dot, fin_rates, [d.shaft_rate]]
        )

    k1 = f(y0)
    k2 = f(y0 + 0.5 * dt * k1)
    k3 = f(y0 + 0.5 * dt * k2)
    k4 = f(y0 + dt * k3)
    y1 = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(y1)):
        raise SimulationFault("non-finite state derivative during integration")
    y1[3:7] = quat.normalize(y1[3:7])

    n_fins = len(actuators.deltas)
    new_state = VehicleState(y1[0:3], y1[3:7], y1[7:13])
    new_act = ActuatorState(
        y1[13 : 13 + n_fins], actuators.delta_cmds.copy(), float(y1[13 + n_fins]), actuators.n_cmd
    )
    return new_state, new_act

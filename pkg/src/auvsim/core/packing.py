"""Flat, kernel-friendly packing of the vehicle model and simulation state.

The integration kernels (pure-Python and compiled) work on a plain list of
floats and a CoreModel of precomputed constants so the per-tick inner loop
touches no dataclasses, no numpy dispatch and no matrix solves.  The state
vector layout is:

    y[0:3]    position x, y, z          (world NED, m)
    y[3:7]    attitude quaternion       (w, x, y, z, body -> world)
    y[7:13]   nu = u, v, w, p, q, r     (body frame, m/s and rad/s)
    y[13:13+N] fin deflections          (rad)
    y[13+N]   shaft speed               (rev/s)
"""

import numpy as np

from ..actuation import ActuatorState
from ..errors import ParameterError
from ..hydrodynamics import VehicleState, build_system_inertia

# Command modes understood by the kernels.
MODE_ACTUATION = 0   # fins + thruster produce the wrench
MODE_WRENCH = 1      # an externally commanded wrench replaces actuation

MAX_FINS = 16


class CoreModel:
    """Precomputed constants for the tick kernels.

    Exposes the same numbers twice: as Python tuples (fast scalar access for
    the pure kernel) and as contiguous float64 arrays (memoryview access for
    the compiled kernel).  Both backends therefore consume bit-identical
    parameter values.
    """

    def __init__(self, hydro, env, fins, thruster):
        if len(fins) > MAX_FINS:
            raise ParameterError(f"at most {MAX_FINS} fins supported (got {len(fins)})")
        m = build_system_inertia(hydro)  # validates positive definiteness
        m11 = np.diag(m[:3, :3]).copy()
        m22 = m[3:, 3:].copy()
        minv22 = np.linalg.inv(m22)

        self.n_fins = len(fins)
        self.mass = float(hydro.mass)
        self.m11 = tuple(m11)
        self.minv11 = tuple(1.0 / m11)
        self.m22 = tuple(m22.reshape(-1))
        self.minv22 = tuple(minv22.reshape(-1))
        self.dl = tuple(hydro.linear_damping)
        self.dq = tuple(hydro.quadratic_damping)
        self.wmb = float(hydro.weight - hydro.buoyancy)
        self.buoy = float(hydro.buoyancy)
        self.rb = tuple(hydro.r_b)
        self.current = tuple(env.current)
        self.kt = float(thruster.k_thrust)
        self.kroll = float(thruster.k_roll_reaction)
        self.inv_tau_n = 1.0 / float(thruster.tau_motor)
        self.nmax = float(thruster.n_max)
        # per fin: x_off, r, sin(theta), cos(theta), 0.5*rho*A*CL, 1/tau, delta_max
        self.fins = tuple(
            (
                float(f.x_off),
                float(f.r),
                float(np.sin(f.theta)),
                float(np.cos(f.theta)),
                0.5 * env.rho * f.area * f.lift_coeff,
                1.0 / f.tau_actuator,
                float(f.delta_max),
            )
            for f in fins
        )

        # Array mirrors for the compiled kernel.
        self.arr_m11 = np.ascontiguousarray(m11)
        self.arr_minv11 = np.ascontiguousarray(1.0 / m11)
        self.arr_m22 = np.ascontiguousarray(m22.reshape(-1))
        self.arr_minv22 = np.ascontiguousarray(minv22.reshape(-1))
        self.arr_dl = np.ascontiguousarray(hydro.linear_damping)
        self.arr_dq = np.ascontiguousarray(hydro.quadratic_damping)
        self.arr_scalars = np.array(
            [
                self.wmb,
                self.buoy,
                *self.rb,
                *self.current,
                self.kt,
                self.kroll,
                self.inv_tau_n,
                self.nmax,
            ]
        )
        self.arr_fins = (
            np.array([list(f) for f in self.fins])
            if self.fins
            else np.zeros((0, 7))
        )

    @property
    def state_size(self):
        return 14 + self.n_fins


def pack_state(state, act):
    """VehicleState + ActuatorState -> kernel state list."""
    y = [0.0] * (14 + len(act.deltas))
    y[0:3] = [float(x) for x in state.position]
    y[3:7] = [float(x) for x in state.attitude]
    y[7:13] = [float(x) for x in state.nu]
    for i, d in enumerate(act.deltas):
        y[13 + i] = float(d)
    y[13 + len(act.deltas)] = float(act.n)
    return y


def unpack_state(y, n_fins, delta_cmds=None, n_cmd=0.0):
    """Kernel state list -> (VehicleState, ActuatorState)."""
    state = VehicleState(
        np.array(y[0:3]), np.array(y[3:7]), np.array(y[7:13])
    )
    deltas = np.array(y[13 : 13 + n_fins])
    cmds = np.array(delta_cmds) if delta_cmds is not None else deltas.copy()
    act = ActuatorState(deltas, cmds, float(y[13 + n_fins]), float(n_cmd))
    return state, act

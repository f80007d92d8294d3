"""Mission runner: the per-tick simulation loop.

Tick k advances the state from t_k to t_{k+1}:

    drain bridge/replay commands (take effect this tick; one-tick latency
    from their arrival during tick k-1) -> mission events -> control loops
    on the latest measurements (at the control rate) -> RK4 step of the
    combined pose/velocity/actuator ODE -> seafloor / surface contact
    clamping -> sensors due at t_{k+1} -> publish -> log row k+1.

Everything is deterministic for a fixed (scenario, mission, seed, command
replay); real-time pacing only sleeps and never changes numerics.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from . import core
from .actuation import allocate_fins, total_actuation
from .autopilot import Autopilot
from .bridge.framing import clock_frame, encode_frame, measurement_frame
from .bridge.latch import MODE_AUTOPILOT, MODE_FINS, MODE_WRENCH, CommandLatch
from .bridge.replay import CommandRecorder, load_replay
from .errors import ScenarioError, SimulationFault
from .hydrodynamics import (
    Wrench,
    build_system_inertia,
    coriolis,
    damping_wrench,
    relative_velocity,
    restoring_wrench,
)
from .kinematics import StateDerivative, body_to_world
from .sensors import SensorSuite
from .trajectory import TrajectoryLog


@dataclass
class RunOptions:
    realtime: bool = False          # pace ticks to wall time (HIL); default free-run
    open_loop: bool = False         # no autopilot; actuator commands stay as initialized
    residual_check: bool = False    # track the equations-of-motion defect per tick
    bridge: object = None           # BridgeServer, or None for headless
    record_path: str = None         # write applied commands as a replay file
    replay_path: str = None         # inject commands from a replay file (no bridge)


def _euler(y):
    w, x, yy, z = y[3], y[4], y[5], y[6]
    r11 = 1.0 - 2.0 * (yy * yy + z * z)
    r21 = 2.0 * (x * yy + w * z)
    r31 = 2.0 * (x * z - w * yy)
    r32 = 2.0 * (yy * z + w * x)
    r33 = 1.0 - 2.0 * (x * x + yy * yy)
    return (
        math.atan2(r32, r33),
        -math.asin(max(-1.0, min(1.0, r31))),
        math.atan2(r21, r11),
    )


def _world_down_row(y):
    """Third row of R(q): the world down axis expressed in body coordinates."""
    w, x, yy, z = y[3], y[4], y[5], y[6]
    s = 2.0 / (w * w + x * x + yy * yy + z * z)
    return (
        s * (x * z - w * yy),
        s * (yy * z + w * x),
        1.0 - s * (x * x + yy * yy),
    )


def reference_derivative(config, delta_cmds, n_cmd):
    """Module-level derivative of the combined ODE (the kernels' reference)."""

    def fn(state, act):
        nu_r = relative_velocity(state, config.environment)
        tau = total_actuation(config.fins, act, config.thruster, nu_r, config.environment.rho)
        d = body_to_world(state.attitude, state.nu)
        nu_dot = _solve_acceleration(config, state, tau)
        fin_rates = np.array(
            [
                (delta_cmds[i] - act.deltas[i]) / fin.tau_actuator
                for i, fin in enumerate(config.fins)
            ]
        )
        shaft_rate = (n_cmd - act.n) / config.thruster.tau_motor
        return StateDerivative(d.position_dot, d.attitude_dot, nu_dot, fin_rates, shaft_rate)

    return fn


def _solve_acceleration(config, state, tau):
    m = build_system_inertia(config.hydro)
    nu_r = relative_velocity(state, config.environment)
    rhs = (
        tau.as_vector()
        - coriolis(m, nu_r) @ nu_r
        - damping_wrench(config.hydro, nu_r)
        - restoring_wrench(config.hydro, state.attitude)
    )
    return np.linalg.solve(m, rhs)


def run_mission(config, mission, options=None):
    """Run the mission and return the TrajectoryLog (one row per tick + t=0)."""
    opt = options or RunOptions()
    if opt.bridge is not None and opt.replay_path is not None:
        raise ScenarioError(["options: bridge and replay are mutually exclusive"])
    if not opt.open_loop:
        missing = [k for k in ("depth", "imu", "mag", "dvl") if config.sensor_configs.get(k) is None]
        if missing:
            raise ScenarioError(
                [f"sensors.{k}: required for autopilot missions (or run open loop)" for k in missing]
            )

    dt = config.dt
    dt_ns = config.dt_ns
    rate = config.physics_rate
    n_fins = len(config.fins)
    n_ticks = int(round(mission.end_time * rate))
    if n_ticks < 1:
        raise ScenarioError(["mission.end_time: shorter than one physics tick"])
    ctrl_period = int(round(rate / config.control_rate))
    events = [(int(round(t * rate)), sp) for t, sp in mission.events]

    model = core.CoreModel(config.hydro, config.environment, config.fins, config.thruster)
    suite = SensorSuite(config.sensor_configs, config.terrain, rate, dt_ns, config.seed)
    latch = CommandLatch(config.fins, config.thruster)
    autopilot = None if opt.open_loop else Autopilot(
        config.gains, 1.0 / config.control_rate, config.fins, config.thruster
    )

    # initial kernel state
    from .hydrodynamics import VehicleState  # local import avoids a cycle at module load

    init = config.initial
    state0 = VehicleState.from_euler(init.position, init.euler, init.nu)
    y = list(core.pack_state(state0, _rest_actuators(n_fins, init.shaft_speed)))
    delta_cmds = [0.0] * n_fins
    n_cmd = float(init.shaft_speed)
    wrench_cmd = (0.0,) * 6

    recorder = CommandRecorder(opt.record_path) if opt.record_path else None
    replay = load_replay(opt.replay_path) if opt.replay_path else None
    bridge = opt.bridge

    residual_m = build_system_inertia(config.hydro) if opt.residual_check else None

    log = TrajectoryLog(n_ticks + 1, n_fins)
    terrain = config.terrain
    rk4_tick = core.rk4_tick
    mode_actuation = core.MODE_ACTUATION
    mode_wrench = core.MODE_WRENCH

    def state_view():
        return VehicleState(np.array(y[0:3]), np.array(y[3:7]), np.array(y[7:13]))

    def log_row(row, tick):
        phi, theta, psi = _euler(y)
        vals = log.values[row]
        vals[0] = (tick * dt_ns) * 1e-9
        vals[1] = y[0]
        vals[2] = y[1]
        vals[3] = y[2]
        vals[4] = phi
        vals[5] = theta
        vals[6] = psi
        vals[7:13] = y[7:13]
        for i in range(n_fins):
            vals[13 + i] = y[13 + i]
        vals[13 + n_fins] = y[13 + n_fins]
        base = 14 + n_fins
        sp = autopilot.setpoint if autopilot is not None else None
        if latch.mode == MODE_AUTOPILOT and sp is not None:
            log.mode[row] = sp.mode
            vals[base] = sp.value
            vals[base + 1] = sp.heading
            vals[base + 2] = sp.speed
        else:
            log.mode[row] = latch.mode if latch.mode != MODE_AUTOPILOT else "none"
        vals[base + 3] = terrain.depth_at(y[0], y[1]) - y[2]
        m = suite.latest.get("depth")
        if m is not None:
            vals[base + 4] = m.values["depth"]
        m = suite.latest.get("mag")
        if m is not None:
            vals[base + 5] = m.values["heading"]
        m = suite.latest.get("dvl")
        if m is not None:
            vals[base + 6] = m.values["altitude"]
            vals[base + 7] = m.values["vx"]

    def publish(tick, measurements, faults):
        if bridge is None:
            return
        frames = [encode_frame(clock_frame(tick, tick * dt_ns))]
        frames += [encode_frame(measurement_frame(m)) for m in measurements]
        frames += [encode_frame(f) for f in faults]
        bridge.publish(frames)

    # t = 0: sample, publish and log the initial state
    measurements = suite.sample_tick(0, state_view())
    event_i = 0
    if autopilot is not None and events and events[0][0] == 0:
        autopilot.set_setpoint(events[0][1])
        event_i = 1
    publish(0, measurements, [])
    log_row(0, 0)

    wall_start = time.perf_counter()
    fault_queue = []
    residual_max = 0.0

    for k in range(n_ticks):
        # 1. commands drained now arrived during the previous tick: they take
        #    effect in this tick's dynamics (one-tick latency contract)
        inbound = replay.get(k, ()) if replay is not None else (
            bridge.drain() if bridge is not None else ()
        )
        for frame in inbound:
            if recorder is not None:
                recorder.add(k, encode_frame(frame))
            fault_queue.extend(latch.apply(frame, k, k * dt_ns))
            if frame.type == "setpoint_command" and latch.setpoint is not None:
                if autopilot is not None:
                    autopilot.set_setpoint(latch.setpoint)

        # 2. mission schedule (applied after bridge commands: same-tick mission
        #    events win; later bridge setpoints override them)
        while event_i < len(events) and events[event_i][0] <= k:
            if autopilot is not None:
                autopilot.set_setpoint(events[event_i][1])
            event_i += 1

        # 3. control loops at the control rate, from the latest measurements
        mode = latch.mode
        if mode == MODE_AUTOPILOT:
            if (
                autopilot is not None
                and autopilot.setpoint is not None
                and k % ctrl_period == 0
            ):
                stern, rudder, n_new = autopilot.step(suite.latest)
                delta_cmds = list(allocate_fins(config.fins, stern, rudder))
                n_cmd = n_new
        elif mode == MODE_FINS:
            delta_cmds = latch.fin_cmds
            n_cmd = latch.n_cmd
        else:
            wrench_cmd = latch.wrench

        if residual_m is not None:
            residual_max = max(residual_max, _tick_residual(
                config, model, y, delta_cmds, n_cmd, wrench_cmd, mode, residual_m, n_fins
            ))

        # 4. integrate the combined ODE
        kernel_mode = mode_wrench if mode == MODE_WRENCH else mode_actuation
        y = rk4_tick(y, model, kernel_mode, delta_cmds, n_cmd, wrench_cmd, dt)

        total = 0.0
        for val in y:
            total += val
        if not math.isfinite(total):
            if recorder is not None:
                recorder.close()
            fault = SimulationFault("simulation state became non-finite", tick=k)
            fault.log = log
            fault.last_valid_row = k
            raise fault

        # 5. terrain and surface contact: clamp-and-flag, never bounce
        floor = terrain.depth_at(y[0], y[1])
        if floor - y[2] <= 0.0:
            y[2] = floor
            _kill_vertical(y, downward=True)
            log.collision[k + 1] = True
        if y[2] <= 0.0:
            y[2] = 0.0
            _kill_vertical(y, downward=False)
            log.broach[k + 1] = True

        # 6. sensors due at t_{k+1}, publish, log
        measurements = suite.sample_tick(k + 1, state_view()) if suite.any_due(k + 1) else []
        publish(k + 1, measurements, fault_queue)
        fault_queue = []
        log_row(k + 1, k + 1)

        if opt.realtime:
            pause = wall_start + (k + 1) * dt - time.perf_counter()
            if pause > 0:
                time.sleep(pause)

    if recorder is not None:
        recorder.close()
    log.max_residual = residual_max
    return log


def _rest_actuators(n_fins, n0):
    from .actuation import ActuatorState

    act = ActuatorState.rest(n_fins)
    act.n = float(n0)
    act.n_cmd = float(n0)
    return act


def _kill_vertical(y, downward):
    """Zero the world-frame vertical velocity component (down if downward)."""
    r20, r21, r22 = _world_down_row(y)
    vz = r20 * y[7] + r21 * y[8] + r22 * y[9]
    if (vz > 0.0) == downward and vz != 0.0:
        y[7] -= vz * r20
        y[8] -= vz * r21
        y[9] -= vz * r22


def _tick_residual(config, model, y, delta_cmds, n_cmd, wrench_cmd, mode, m6, n_fins):
    """Equations-of-motion defect |M nu_dot + C nu_r + D nu_r + g - tau|_inf.

    nu_dot comes from the tick kernel, the other terms from the module-level
    operators, so this cross-validates the two implementations every tick.
    """
    state, act = core.unpack_state(y, n_fins, delta_cmds, n_cmd)
    kernel_mode = core.MODE_WRENCH if mode == MODE_WRENCH else core.MODE_ACTUATION
    dy = core.derivative(y, model, kernel_mode, delta_cmds, n_cmd, wrench_cmd)
    nu_dot = np.array(dy[7:13])
    nu_r = relative_velocity(state, config.environment)
    if mode == MODE_WRENCH:
        tau = Wrench.from_vector(wrench_cmd)
    else:
        tau = total_actuation(config.fins, act, config.thruster, nu_r, config.environment.rho)
    defect = (
        m6 @ nu_dot
        + coriolis(m6, nu_r) @ nu_r
        + damping_wrench(config.hydro, nu_r)
        + restoring_wrench(config.hydro, state.attitude)
        - tau.as_vector()
    )
    return float(np.max(np.abs(defect)))

"""Command latch: latest-wins storage for bridge commands.

Exactly one control mode is active at any tick: "autopilot" (the default;
driven by mission or bridge setpoints), "fins" (raw deflection commands) or
"wrench" (external forces replace actuation).  Commands applied during a
drain take effect at the next tick, never mid-tick.  Out-of-range values
are clamped rather than rejected, with a fault frame reporting the clamp.
"""

from ..autopilot import Setpoint
from ..errors import ParameterError
from .framing import COMMAND_TYPES, fault_frame

MODE_AUTOPILOT = "autopilot"
MODE_FINS = "fins"
MODE_WRENCH = "wrench"


class CommandLatch:
    def __init__(self, fins, thruster):
        self._delta_max = [f.delta_max for f in fins]
        self._n_max = thruster.n_max
        self.mode = MODE_AUTOPILOT
        self.fin_cmds = [0.0] * len(fins)
        self.n_cmd = 0.0
        self.wrench = (0.0,) * 6
        self.setpoint = None          # Setpoint from the bridge, if any
        self.arrival_tick = {}        # mode -> tick the latest command arrived

    def apply(self, frame, tick, stamp_ns=0):
        """Apply one command frame; returns fault frames to broadcast.

        The frame payload has already passed schema validation in decode;
        this enforces simulation-level constraints (fin count, ranges).
        """
        faults = []
        if frame.type not in COMMAND_TYPES:
            return [fault_frame(f"ignoring non-command frame type {frame.type!r}", stamp_ns)]

        if frame.type == "fin_command":
            deltas = frame.data["deltas"]
            if len(deltas) != len(self._delta_max):
                return [
                    fault_frame(
                        f"fin_command carries {len(deltas)} deltas for "
                        f"{len(self._delta_max)} fins; ignored",
                        stamp_ns,
                    )
                ]
            clamped = []
            for i, (d, dmax) in enumerate(zip(deltas, self._delta_max)):
                c = max(-dmax, min(dmax, float(d)))
                if c != d:
                    faults.append(
                        fault_frame(f"fin_command deltas[{i}] clamped to {c}", stamp_ns)
                    )
                clamped.append(c)
            n = max(-self._n_max, min(self._n_max, float(frame.data["thruster"])))
            if n != frame.data["thruster"]:
                faults.append(fault_frame(f"fin_command thruster clamped to {n}", stamp_ns))
            self.fin_cmds = clamped
            self.n_cmd = n
            self.mode = MODE_FINS

        elif frame.type == "wrench_command":
            self.wrench = tuple(float(v) for v in frame.data["force"]) + tuple(
                float(v) for v in frame.data["torque"]
            )
            self.mode = MODE_WRENCH

        else:  # setpoint_command
            value = float(frame.data["value"])
            speed = float(frame.data["speed"])
            if value < 0.0:
                faults.append(fault_frame(f"setpoint value clamped to 0 (was {value})", stamp_ns))
                value = 0.0
            if speed < 0.0:
                faults.append(fault_frame(f"setpoint speed clamped to 0 (was {speed})", stamp_ns))
                speed = 0.0
            try:
                self.setpoint = Setpoint(
                    frame.data["mode"], value, float(frame.data["heading"]), speed
                )
            except ParameterError as exc:
                return [fault_frame(f"setpoint_command rejected: {exc}", stamp_ns)]
            self.mode = MODE_AUTOPILOT

        self.arrival_tick[self.mode] = tick
        return faults

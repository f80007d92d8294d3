"""TCP pub/sub bridge: framing, command latch, server, client, record/replay."""

from .framing import (
    Frame,
    FrameError,
    MAX_PAYLOAD,
    clock_frame,
    decode_frame,
    encode_frame,
    fault_frame,
    measurement_frame,
)
from .latch import MODE_AUTOPILOT, MODE_FINS, MODE_WRENCH, CommandLatch
from .server import DEFAULT_PORT, BridgeServer
from .client import BridgeClient
from .replay import CommandRecorder, load_replay

__all__ = [
    "BridgeClient",
    "BridgeServer",
    "CommandLatch",
    "CommandRecorder",
    "DEFAULT_PORT",
    "Frame",
    "FrameError",
    "MAX_PAYLOAD",
    "MODE_AUTOPILOT",
    "MODE_FINS",
    "MODE_WRENCH",
    "clock_frame",
    "decode_frame",
    "encode_frame",
    "fault_frame",
    "load_replay",
    "measurement_frame",
]

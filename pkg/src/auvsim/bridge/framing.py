"""Wire format for the HIL/SIL bridge.

A frame on the wire is a 4-byte big-endian unsigned length prefix followed
by that many bytes of UTF-8 JSON with exactly the keys topic, stamp_ns,
type and data.  The length counts the JSON bytes only and may not exceed
1 MiB.  Encoding is canonical (sorted keys, no whitespace), so identical
frames always produce identical bytes.

Frame types carry fixed payload schemas; sensor channels may be null (DVL
dropout), command values must be finite numbers.
"""

import json
import math
import struct
from dataclasses import dataclass, field

from ..errors import ProtocolError

MAX_PAYLOAD = 1 << 20  # bytes of JSON per frame

COMMAND_TYPES = ("fin_command", "wrench_command", "setpoint_command")
SENSOR_TYPES = ("depth", "imu", "mag", "dvl")
FRAME_TYPES = SENSOR_TYPES + COMMAND_TYPES + ("clock", "fault")


@dataclass
class Frame:
    """One pub/sub message: topic, integer-nanosecond stamp, type tag, payload."""

    topic: str
    stamp_ns: int
    type: str
    data: dict = field(default_factory=dict)


class FrameError(Exception):
    """Malformed frame payload; the connection survives, the bytes are skipped."""

    def __init__(self, message, consumed):
        self.consumed = consumed
        super().__init__(message)


def _number(value, allow_null=False):
    if value is None and allow_null:
        return True
    return (
        isinstance(value, (int, float))
        and not isinstance(value, bool)
        and math.isfinite(float(value))
    )


def _check_channels(data, channels, allow_null):
    for ch in channels:
        if ch not in data:
            return f"missing key {ch!r}"
        if not _number(data[ch], allow_null=allow_null):
            return f"key {ch!r} must be a {'number or null' if allow_null else 'finite number'}"
    extra = set(data) - set(channels) - {"valid"}
    if extra:
        return f"unexpected keys {sorted(extra)}"
    if "valid" in data and not isinstance(data["valid"], bool):
        return "key 'valid' must be a boolean"
    return None


def _validate_payload(ftype, data):
    """Return an error string, or None if data matches the type's schema."""
    if ftype == "clock":
        if set(data) != {"tick"} or not isinstance(data.get("tick"), int):
            return "clock payload needs an integer 'tick'"
        return None
    if ftype == "depth":
        return _check_channels(data, ("depth",), allow_null=True)
    if ftype == "imu":
        return _check_channels(data, ("roll", "pitch", "yaw", "p", "q", "r"), allow_null=True)
    if ftype == "mag":
        return _check_channels(data, ("heading",), allow_null=True)
    if ftype == "dvl":
        return _check_channels(data, ("altitude", "vx", "vy", "vz"), allow_null=True)
    if ftype == "fin_command":
        if set(data) != {"deltas", "thruster"}:
            return "fin_command payload needs exactly 'deltas' and 'thruster'"
        deltas = data["deltas"]
        if not isinstance(deltas, list) or not all(_number(d) for d in deltas):
            return "'deltas' must be a list of finite numbers"
        if not _number(data["thruster"]):
            return "'thruster' must be a finite number"
        return None
    if ftype == "wrench_command":
        if set(data) != {"force", "torque"}:
            return "wrench_command payload needs exactly 'force' and 'torque'"
        for key in ("force", "torque"):
            v = data[key]
            if not isinstance(v, list) or len(v) != 3 or not all(_number(x) for x in v):
                return f"'{key}' must be a list of 3 finite numbers"
        return None
    if ftype == "setpoint_command":
        if set(data) != {"mode", "value", "heading", "speed"}:
            return "setpoint_command payload needs exactly mode/value/heading/speed"
        if data["mode"] not in ("depth", "altitude"):
            return "'mode' must be 'depth' or 'altitude'"
        for key in ("value", "heading", "speed"):
            if not _number(data[key]):
                return f"'{key}' must be a finite number"
        return None
    if ftype == "fault":
        if "message" not in data or not isinstance(data["message"], str):
            return "fault payload needs a string 'message'"
        return None
    return f"unknown frame type {ftype!r}"


def encode_frame(frame):
    """Frame -> length-prefixed canonical JSON bytes."""
    body = {
        "topic": frame.topic,
        "stamp_ns": frame.stamp_ns,
        "type": frame.type,
        "data": frame.data,
    }
    payload = json.dumps(body, sort_keys=True, separators=(",", ":")).encode("utf-8")
    if len(payload) > MAX_PAYLOAD:
        raise ProtocolError(f"frame payload is {len(payload)} bytes (limit {MAX_PAYLOAD})")
    return struct.pack(">I", len(payload)) + payload


def decode_frame(buffer):
    """Decode one frame from the head of buffer.

    Returns (frame, consumed_bytes), or (None, 0) when more bytes are needed
    (nothing is consumed).  Raises ProtocolError for an oversized declared
    length (fatal; close the connection) and FrameError for malformed
    payloads (skippable; FrameError.consumed bytes should be discarded).
    """
    if len(buffer) < 4:
        return None, 0
    (length,) = struct.unpack(">I", bytes(buffer[:4]))
    if length > MAX_PAYLOAD:
        raise ProtocolError(f"declared frame length {length} exceeds {MAX_PAYLOAD}")
    if len(buffer) < 4 + length:
        return None, 0
    consumed = 4 + length
    try:
        body = json.loads(bytes(buffer[4:consumed]).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FrameError(f"frame payload is not valid JSON: {exc}", consumed) from exc
    if not isinstance(body, dict) or set(body) != {"topic", "stamp_ns", "type", "data"}:
        raise FrameError("frame must have exactly topic/stamp_ns/type/data", consumed)
    topic, stamp_ns, ftype, data = body["topic"], body["stamp_ns"], body["type"], body["data"]
    if not isinstance(topic, str) or not topic:
        raise FrameError("frame topic must be a non-empty string", consumed)
    if not isinstance(stamp_ns, int) or stamp_ns < 0:
        raise FrameError("frame stamp_ns must be a non-negative integer", consumed)
    if ftype not in FRAME_TYPES:
        raise FrameError(f"unknown frame type {ftype!r}", consumed)
    if not isinstance(data, dict):
        raise FrameError("frame data must be an object", consumed)
    problem = _validate_payload(ftype, data)
    if problem:
        raise FrameError(f"{ftype}: {problem}", consumed)
    return Frame(topic, stamp_ns, ftype, data), consumed


def fault_frame(message, stamp_ns=0):
    return Frame("fault", stamp_ns, "fault", {"message": message})


def _clean(value):
    return None if not math.isfinite(value) else value


def measurement_frame(meas):
    """Sensor Measurement -> Frame (non-finite channels become null)."""
    data = {key: _clean(float(v)) for key, v in meas.values.items()}
    data["valid"] = meas.valid
    return Frame(meas.kind, meas.stamp_ns, meas.kind, data)


def clock_frame(tick, stamp_ns):
    return Frame("clock", stamp_ns, "clock", {"tick": tick})

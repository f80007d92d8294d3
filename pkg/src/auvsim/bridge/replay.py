"""Record and replay of bridge commands for deterministic reruns.

The record file is JSON lines: {"tick": <effect tick>, "frame": <hex>} where
the frame bytes are the canonical encoding of the command as applied.
Replaying injects each command at exactly its recorded tick, reproducing
the original trajectory bit for bit without any network.
"""

import json

from ..errors import ScenarioError
from .framing import FrameError, decode_frame


class CommandRecorder:
    def __init__(self, path):
        self._fh = open(path, "w", encoding="utf-8")

    def add(self, tick, raw):
        self._fh.write(json.dumps({"tick": tick, "frame": raw.hex()}) + "\n")

    def close(self):
        self._fh.close()


def load_replay(path):
    """Replay file -> {tick: [Frame, ...]} preserving per-tick order."""
    by_tick = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
                tick = int(entry["tick"])
                raw = bytes.fromhex(entry["frame"])
            except (ValueError, KeyError, TypeError) as exc:
                raise ScenarioError([f"{path}:{lineno}: bad replay record ({exc})"]) from exc
            try:
                frame, consumed = decode_frame(raw)
            except FrameError as exc:
                raise ScenarioError([f"{path}:{lineno}: {exc}"]) from exc
            if frame is None or consumed != len(raw):
                raise ScenarioError([f"{path}:{lineno}: truncated frame bytes"])
            by_tick.setdefault(tick, []).append(frame)
    return by_tick

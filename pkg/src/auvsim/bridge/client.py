"""Minimal blocking client for the bridge, for external stacks and tests."""

import socket

from ..errors import ProtocolError
from .framing import decode_frame, encode_frame


class BridgeClient:
    def __init__(self, host="127.0.0.1", port=9090, timeout=5.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self.sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._buffer = bytearray()

    def send_frame(self, frame):
        self.send_bytes(encode_frame(frame))

    def send_bytes(self, data):
        self.sock.sendall(data)

    def recv_frame(self):
        """Next frame from the server (blocking; FrameError on bad payloads)."""
        while True:
            frame, consumed = decode_frame(self._buffer)
            if frame is not None:
                del self._buffer[:consumed]
                return frame
            chunk = self.sock.recv(65536)
            if not chunk:
                raise ProtocolError("server closed the connection")
            self._buffer.extend(chunk)

    def recv_until(self, predicate, limit=100000):
        """Read frames until predicate(frame) is true; returns that frame."""
        for _ in range(limit):
            frame = self.recv_frame()
            if predicate(frame):
                return frame
        raise ProtocolError("predicate not satisfied within frame limit")

    def close(self):
        try:
            self.sock.close()
        except OSError:
            pass

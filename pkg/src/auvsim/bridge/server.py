"""Threaded TCP pub/sub server for the HIL/SIL boundary.

Network I/O runs on daemon threads; the only surfaces shared with the
simulation loop are an inbound command mailbox (drained once per tick) and
one bounded outbound queue per client.  The loop never blocks on the
network: a client whose queue overflows is disconnected rather than
stalling the simulation.
"""

import queue
import socket
import threading

from ..errors import ProtocolError
from .framing import FrameError, decode_frame, encode_frame, fault_frame

DEFAULT_PORT = 9090


class _Client:
    def __init__(self, sock, client_id, max_queue):
        self.sock = sock
        self.id = client_id
        self.outbound = queue.Queue(maxsize=max_queue)
        self.alive = True


class BridgeServer:
    def __init__(self, port=DEFAULT_PORT, host="127.0.0.1", max_queue=1024):
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen()
        self.host, self.port = self._listener.getsockname()
        self._inbound = queue.Queue()
        self._clients = {}
        self._max_queue = max_queue
        self._lock = threading.Lock()
        self._next_id = 0
        self._running = True
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    # -- simulation-loop side -------------------------------------------------

    def drain(self):
        """All command frames received since the last drain, in arrival order."""
        frames = []
        while True:
            try:
                frames.append(self._inbound.get_nowait())
            except queue.Empty:
                return frames

    def publish(self, encoded_frames):
        """Broadcast pre-encoded frames to every client (identical bytes each)."""
        with self._lock:
            clients = list(self._clients.values())
        for client in clients:
            for data in encoded_frames:
                try:
                    client.outbound.put_nowait(data)
                except queue.Full:
                    self._drop(client)
                    break

    @property
    def client_count(self):
        with self._lock:
            return len(self._clients)

    def stop(self):
        self._running = False
        try:
            self._listener.close()
        except OSError:
            pass
        with self._lock:
            clients = list(self._clients.values())
        for client in clients:
            self._drop(client)

    # -- network side ----------------------------------------------------------

    def _accept_loop(self):
        while self._running:
            try:
                sock, _addr = self._listener.accept()
            except OSError:
                return
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            with self._lock:
                client = _Client(sock, self._next_id, self._max_queue)
                self._next_id += 1
                self._clients[client.id] = client
            threading.Thread(target=self._read_loop, args=(client,), daemon=True).start()
            threading.Thread(target=self._write_loop, args=(client,), daemon=True).start()

    def _read_loop(self, client):
        buffer = bytearray()
        while client.alive:
            try:
                chunk = client.sock.recv(65536)
            except OSError:
                break
            if not chunk:
                break
            buffer.extend(chunk)
            try:
                while True:
                    frame, consumed = decode_frame(buffer)
                    if frame is None:
                        break
                    del buffer[:consumed]
                    self._inbound.put(frame)
            except FrameError as exc:
                # malformed payload: report to the sender, keep the connection
                del buffer[: exc.consumed]
                try:
                    client.outbound.put_nowait(encode_frame(fault_frame(str(exc))))
                except queue.Full:
                    break
            except ProtocolError:
                break
        self._drop(client)

    def _write_loop(self, client):
        while True:
            data = client.outbound.get()
            if data is None:
                return
            try:
                client.sock.sendall(data)
            except OSError:
                self._drop(client)
                return

    def _drop(self, client):
        with self._lock:
            self._clients.pop(client.id, None)
        if client.alive:
            client.alive = False
            try:
                client.sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            try:
                client.sock.close()
            except OSError:
                pass
            try:
                client.outbound.put_nowait(None)  # wake the writer
            except queue.Full:
                # writer will hit the closed socket and exit on its own
                pass

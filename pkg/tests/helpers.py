"""Shared test helpers: frame construction, webhook stub server, brute-force oracles."""

from __future__ import annotations

import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from gesturecall.model import JointSample, SkeletonFrame


def frame(index, left=None, right=None, t_ms=None, mask=None, extra_joints=()):
    """Build a SkeletonFrame from (x, y, z) hand tuples; None means absent."""
    joints = []
    if left is not None:
        joints.append(JointSample("left_hand", *left))
    if right is not None:
        joints.append(JointSample("right_hand", *right))
    joints.extend(extra_joints)
    if t_ms is None:
        t_ms = index * 1000.0 / 30.0
    return SkeletonFrame(frame_index=index, t_ms=t_ms,
                         joints=tuple(joints), mask=mask)


def dwell_reference(cells, threshold, cooldown):
    """Brute-force run scanner over a hover sequence.

    Fires at the index where a run of identical non-None cells reaches the
    threshold, then ignores the next ``cooldown`` entries entirely.
    """
    events = []
    dead = 0
    run_cell = None
    run = 0
    for idx, cell in enumerate(cells):
        if dead > 0:
            dead -= 1
            run_cell, run = None, 0
            continue
        if cell is None:
            run_cell, run = None, 0
            continue
        if cell == run_cell:
            run += 1
        else:
            run_cell, run = cell, 1
        if run >= threshold:
            events.append((idx, cell))
            dead = cooldown
            run = 0
    return events


def hull_solidity_oracle(points):
    """Brute-force hull membership: test every bounding-box lattice point
    against the scipy hull's half-plane equations."""
    import numpy as np
    from scipy.spatial import ConvexHull

    pts = np.array(points, dtype=float)
    hull = ConvexHull(pts)
    normals = hull.equations[:, :-1]
    offsets = hull.equations[:, -1]
    x0, y0 = pts.min(axis=0).astype(int)
    x1, y1 = pts.max(axis=0).astype(int)
    inside = 0
    for x in range(x0, x1 + 1):
        for y in range(y0, y1 + 1):
            if np.all(normals @ (x, y) + offsets <= 1e-9):
                inside += 1
    return len(points) / inside


class WebhookStub:
    """Local HTTP endpoint with scriptable status codes and delays."""

    def __init__(self, responses=None, delay_s=0.0, hold_event=None):
        self.responses = list(responses or [])
        self.delay_s = delay_s
        self.hold_event = hold_event
        self.requests = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = self.rfile.read(length)
                stub.requests.append((self.path, body))
                if stub.hold_event is not None:
                    stub.hold_event.wait(timeout=10)
                if stub.delay_s:
                    time.sleep(stub.delay_s)
                status = stub.responses.pop(0) if stub.responses else 200
                self.send_response(status)
                self.send_header("Content-Length", "0")
                self.end_headers()

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def url(self):
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def close(self):
        self._server.shutdown()
        self._server.server_close()

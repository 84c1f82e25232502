"""Local read-only fixture server standing in for the live data API.

Endpoints (all GET):
    /world/countries                         -> [{"code","name"}...]
    /world/indicators                        -> [{"code","name"}...]
    /world/values?country=CZE&indicator=...  -> [[year, value]...] or 404

Each data access is logged on the server object so tests can assert what
was fetched.
"""

from __future__ import annotations

import json
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .world import WorldSnapshot, world_lookup


class WorldRequestHandler(BaseHTTPRequestHandler):
    server_version = "mml-world/0.1"

    def log_message(self, fmt: str, *args) -> None:  # quiet by default
        pass

    def _send(self, status: int, payload: object) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self) -> None:  # noqa: N802  (stdlib naming)
        url = urlparse(self.path)
        snapshot: WorldSnapshot = self.server.snapshot  # type: ignore[attr-defined]
        if url.path == "/world/countries":
            self._send(200, [{"code": c, "name": n} for c, n in snapshot.countries])
            return
        if url.path == "/world/indicators":
            self._send(200, [{"code": c, "name": n} for c, n in snapshot.indicators])
            return
        if url.path == "/world/values":
            query = parse_qs(url.query)
            country = (query.get("country") or [""])[0]
            indicator = (query.get("indicator") or [""])[0]
            self.server.access_log.append((country, indicator))  # type: ignore[attr-defined]
            if self.server.verbose:  # type: ignore[attr-defined]
                print(f"access ({country}, {indicator})", file=sys.stderr)
            series = world_lookup(snapshot, country, indicator)
            if series is None:
                self._send(404, {"error": "no data", "country": country, "indicator": indicator})
                return
            self._send(200, [[year, value] for year, value in series])
            return
        self._send(404, {"error": "unknown endpoint"})


class WorldServer(ThreadingHTTPServer):
    def __init__(self, snapshot: WorldSnapshot, port: int = 0, host: str = "127.0.0.1",
                 verbose: bool = False):
        super().__init__((host, port), WorldRequestHandler)
        self.snapshot = snapshot
        self.verbose = verbose
        self.access_log: list[tuple[str, str]] = []

    @property
    def port(self) -> int:
        return self.server_address[1]

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


def serve_world(snapshot: WorldSnapshot, port: int, block: bool = True,
                verbose: bool = False) -> WorldServer:
    server = WorldServer(snapshot, port, verbose=verbose)
    if block:
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            server.server_close()
    else:
        server.start_background()
    return server

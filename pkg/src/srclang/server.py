"""Minimal HTTP classification endpoint.

POST /classify with the raw source text as the body returns the ranked
(language, probability) list as JSON; GET /health reports liveness.
The loaded model is immutable, so any number of concurrent requests can
share it without locking.
"""

from __future__ import annotations

import json
import logging
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .pipeline import ClassifyResult, LanguageModel, classify_text

log = logging.getLogger(__name__)


def result_payload(result: ClassifyResult) -> dict:
    return {
        "best": result.best,
        "results": [
            {"language": language, "probability": probability}
            for language, probability in result.ranked
        ],
        "matched_productions": result.matched_productions,
    }


class _Handler(BaseHTTPRequestHandler):
    server: "ClassifierServer"

    def do_GET(self) -> None:  # noqa: N802 (http.server API)
        if self.path != "/health":
            self._send(404, {"error": "not found"})
            return
        self._send(200, {"status": "ok", "languages": list(self.server.model.languages)})

    def do_POST(self) -> None:  # noqa: N802
        if self.path != "/classify":
            self._send(404, {"error": "not found"})
            return
        length_header = self.headers.get("Content-Length")
        if length_header is None:
            self._send(411, {"error": "Content-Length required"})
            return
        try:
            length = int(length_header)
            if length < 0:
                raise ValueError
        except ValueError:
            self._send(400, {"error": "malformed Content-Length"})
            return
        if length > self.server.max_body:
            self._send(
                413,
                {"error": f"request body exceeds {self.server.max_body} bytes"},
            )
            return
        body = self.rfile.read(length)
        result = classify_text(self.server.model, body)
        self._send(200, result_payload(result))

    def _send(self, status: int, payload: dict) -> None:
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, format: str, *args) -> None:
        log.debug("%s - %s", self.address_string(), format % args)


class ClassifierServer(ThreadingHTTPServer):
    daemon_threads = True
    # Deep accept backlog so request bursts do not get connection resets.
    request_queue_size = 128

    def __init__(self, address: tuple[str, int], model: LanguageModel):
        super().__init__(address, _Handler)
        self.model = model
        self.max_body = model.settings.max_bytes


def serve(model: LanguageModel, host: str, port: int) -> None:
    server = ClassifierServer((host, port), model)
    bound = server.server_address
    log.info("serving on http://%s:%s", bound[0], bound[1])
    try:
        server.serve_forever()
    finally:
        server.server_close()

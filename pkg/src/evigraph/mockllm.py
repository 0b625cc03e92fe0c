"""Scripted chat-completions server for tests and offline demos."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class MockLLMServer:
    """Serves POST /chat/completions from a fixed script.

    Script entries, consumed in order (the last entry repeats once the
    script is exhausted):

      {"content": "..."}   chat envelope around the given message content
      {"raw": "..."}       verbatim response body (e.g. not JSON at all)
      {"status": 500}      an HTTP error response

    Request bodies are recorded on `.requests` for assertions.
    """

    def __init__(self, script: list[dict] | None = None):
        self.script = list(script or [{"content": json.dumps({"score": 0.5, "rationale": "mock"})}])
        self.requests: list[dict] = []
        self._cursor = 0
        self._lock = threading.Lock()
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    def _next_entry(self) -> dict:
        with self._lock:
            entry = self.script[min(self._cursor, len(self.script) - 1)]
            self._cursor += 1
            return entry

    @property
    def url(self) -> str:
        assert self._server is not None, "server not started"
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    @property
    def request_count(self) -> int:
        with self._lock:
            return self._cursor

    def start(self) -> "MockLLMServer":
        mock = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):  # noqa: N802 (http.server API)
                length = int(self.headers.get("Content-Length", 0))
                body = self.rfile.read(length)
                try:
                    mock.requests.append(json.loads(body))
                except json.JSONDecodeError:
                    mock.requests.append({"_raw": body.decode("utf-8", "replace")})
                entry = mock._next_entry()
                status = entry.get("status", 200)
                if "raw" in entry:
                    payload = entry["raw"].encode("utf-8")
                elif status != 200:
                    payload = json.dumps({"error": "scripted failure"}).encode("utf-8")
                else:
                    envelope = {
                        "choices": [{"message": {"role": "assistant", "content": entry["content"]}}]
                    }
                    payload = json.dumps(envelope).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None

    def __enter__(self) -> "MockLLMServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

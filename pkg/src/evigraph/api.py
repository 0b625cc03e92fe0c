"""HTTP service exposing the pipeline end-to-end.

Plain-stdlib server: JSON everywhere, UTF-8, an explicit schema_version field
in every response. Read endpoints are side-effect-free; per-subject write
serialization is inherited from the store, and readers are never blocked by
an in-flight commit.
"""

from __future__ import annotations

import hashlib
import json
import logging
import mimetypes
import re
import threading
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .config import fixture_path
from .errors import (
    AnswerGenerationError,
    DuplicateRecordError,
    EvigraphError,
    ScenarioError,
    ScoringUnavailableError,
    UnknownSubjectError,
    ValidationError,
)
from .evaluation import (
    DEFAULT_SWEEP_TAUS,
    PredictionTask,
    PredictorConfig,
    run_sweep,
)
from .export import SCHEMA_VERSION, UnknownEdgeError, edge_rationale, export_graph
from .model import VariantKind
from .pipeline import Engine
from .qa import QAMode, QARequest, answer, compare, retrieve, run_whatif
from .records import SubjectRecord

log = logging.getLogger(__name__)

_ROUTES = [
    ("GET", re.compile(r"^/health$"), "health"),
    ("GET", re.compile(r"^/subjects$"), "list_subjects"),
    ("POST", re.compile(r"^/subjects/(?P<subject_id>[^/]+)/records$"), "ingest"),
    ("GET", re.compile(r"^/subjects/(?P<subject_id>[^/]+)/graph$"), "graph"),
    (
        "GET",
        re.compile(r"^/subjects/(?P<subject_id>[^/]+)/edges/(?P<edge_key>[^/]+)/rationale$"),
        "rationale",
    ),
    ("POST", re.compile(r"^/qa$"), "qa"),
    ("POST", re.compile(r"^/whatif/run$"), "whatif"),
    ("POST", re.compile(r"^/eval/run$"), "eval_run"),
]


class ApiServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, engine: Engine, host: str = "127.0.0.1", port: int = 0,
                 ui_dir: str | Path | None = None):
        self.engine = engine
        self.ui_dir = Path(ui_dir) if ui_dir else None
        super().__init__((host, port), ApiHandler)

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"


class ApiHandler(BaseHTTPRequestHandler):
    server: ApiServer

    # -- plumbing ---------------------------------------------------------

    def log_message(self, fmt, *args):
        log.debug("http %s", fmt % args)

    def _respond(self, status: int, payload: dict) -> None:
        payload.setdefault("schema_version", SCHEMA_VERSION)
        body = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, message: str, **extra) -> None:
        self._respond(status, {"error": message, **extra})

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"request body is not valid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise ValidationError("request body must be a JSON object")
        return obj

    def _authorized(self) -> bool:
        expected = self.server.engine.config.api_key
        if not expected:
            return True
        return self.headers.get("X-API-Key") == expected

    def _dispatch(self, method: str) -> None:
        parsed = urllib.parse.urlsplit(self.path)
        path = parsed.path
        query = urllib.parse.parse_qs(parsed.query)
        if method == "GET" and (path == "/" or path.startswith("/ui")):
            self._serve_static(path)
            return
        if path != "/health" and not self._authorized():
            self._error(401, "missing or invalid X-API-Key header")
            return
        for verb, pattern, name in _ROUTES:
            match = pattern.match(path)
            if match and verb == method:
                try:
                    getattr(self, f"_handle_{name}")(match.groupdict(), query)
                except ValidationError as exc:
                    self._error(422, str(exc))
                except (UnknownSubjectError, UnknownEdgeError) as exc:
                    self._error(404, str(exc))
                except ScoringUnavailableError as exc:
                    self._error(409, str(exc))
                except AnswerGenerationError as exc:
                    self._error(502, str(exc), evidence=[e.to_json() for e in exc.evidence])
                except ScenarioError as exc:
                    self._error(422, str(exc))
                except EvigraphError as exc:
                    self._error(400, str(exc))
                except Exception:  # pragma: no cover - last-resort guard
                    log.exception("unhandled error on %s %s", method, path)
                    self._error(500, "internal server error")
                return
            if match:
                self._error(405, f"method {method} not allowed on {path}")
                return
        self._error(404, f"no route for {path}")

    def do_GET(self):  # noqa: N802
        self._dispatch("GET")

    def do_POST(self):  # noqa: N802
        self._dispatch("POST")

    # -- handlers -----------------------------------------------------------

    def _handle_health(self, params, query) -> None:
        self._respond(200, {"status": "ok"})

    def _handle_list_subjects(self, params, query) -> None:
        subjects = [
            {"subject_id": sid, "visits": visits}
            for sid, visits in self.server.engine.list_subjects()
        ]
        self._respond(200, {"subjects": subjects})

    def _handle_ingest(self, params, query) -> None:
        subject_id = urllib.parse.unquote(params["subject_id"])
        body = self._read_body()
        body.setdefault("subject_id", subject_id)
        if body["subject_id"] != subject_id:
            raise ValidationError("subject_id in body disagrees with the URL")
        record = SubjectRecord.from_json(body)
        try:
            report = self.server.engine.ingest_record(record)
        except DuplicateRecordError as exc:
            self._error(409, str(exc))
            return
        self._respond(200, report.to_json())

    def _parse_tau(self, query) -> float | None:
        values = query.get("tau")
        if not values:
            return None
        try:
            tau = float(values[0])
        except ValueError:
            raise EvigraphError(f"tau {values[0]!r} is not a number") from None
        if not 0.0 <= tau <= 1.0:
            raise EvigraphError(f"tau {tau} outside [0, 1]")
        return tau

    def _handle_graph(self, params, query) -> None:
        subject_id = urllib.parse.unquote(params["subject_id"])
        kind_raw = query.get("variant", ["historical"])[0]
        try:
            kind = VariantKind.parse(kind_raw)
        except ValidationError as exc:
            raise EvigraphError(str(exc)) from None
        tau = self._parse_tau(query)
        if (tau is not None) != (kind is VariantKind.FILTERED):
            raise EvigraphError("tau must be supplied iff variant=filtered")
        variant = self.server.engine.get_variant(subject_id, kind, tau)
        self._respond(200, export_graph(variant, self.server.engine.catalog))

    def _handle_rationale(self, params, query) -> None:
        subject_id = urllib.parse.unquote(params["subject_id"])
        variant = self.server.engine.get_variant(subject_id, VariantKind.CONFIDENCE_AWARE)
        self._respond(200, edge_rationale(variant, params["edge_key"]))

    def _handle_qa(self, params, query) -> None:
        body = self._read_body()
        engine = self.server.engine
        subject_id = body.get("subject_id")
        if not subject_id:
            raise ValidationError("subject_id is required")
        question = body.get("question", "")
        top_k = int(body.get("top_k", 5))
        tau = body.get("tau")
        if body.get("compare"):
            result = compare(engine, subject_id, question, tau=tau, top_k=top_k)
            self._respond(200, result.to_json())
            return
        request = QARequest(
            subject_id=subject_id,
            question=question,
            mode=QAMode.parse(body.get("mode", "baseline")),
            tau=tau,
            top_k=top_k,
            include_scores_in_prompt=body.get("include_scores_in_prompt"),
        )
        evidence = retrieve(request, engine.store, engine.dictionary)
        exchange = answer(request, evidence, engine.answer_generator(), engine.catalog)
        self._respond(200, exchange.to_json())

    def _handle_whatif(self, params, query) -> None:
        body = self._read_body()
        source = body if body.get("scenarios") is not None else fixture_path("scenarios.json")
        results = run_whatif(self.server.engine, source)
        self._respond(200, {"results": [r.to_json() for r in results]})

    def _handle_eval_run(self, params, query) -> None:
        body = self._read_body()
        engine = self.server.engine
        labels = body.get("labels")
        if not labels:
            raise ValidationError("labels map is required")
        labels = {str(k): int(v) for k, v in labels.items()}
        from dataclasses import replace

        rules = engine.config.risk
        if body.get("risk_concepts"):
            rules = replace(rules, concepts=tuple(body["risk_concepts"]))
        task = PredictionTask(
            subject_ids=tuple(sorted(labels)),
            labels=labels,
            predictor=PredictorConfig(generator=body.get("generator", "rule")),
            runs=int(body.get("runs", 1)),
        )
        taus = tuple(body["taus"]) if body.get("taus") else DEFAULT_SWEEP_TAUS
        rows = run_sweep(engine, task, rules, taus)
        payload = {"rows": [row.to_json() for row in rows]}
        digest = hashlib.sha256(
            json.dumps(payload, sort_keys=True).encode("utf-8")
        ).hexdigest()[:12]
        payload["report_id"] = digest
        data_dir = engine.store.data_dir
        if data_dir is not None:
            reports = data_dir / "reports"
            reports.mkdir(parents=True, exist_ok=True)
            with open(reports / f"{digest}.json", "w", encoding="utf-8") as fh:
                json.dump({"schema_version": SCHEMA_VERSION, **payload}, fh, sort_keys=True, indent=2)
        self._respond(200, payload)

    # -- static assets -------------------------------------------------------

    def _serve_static(self, path: str) -> None:
        ui_dir = self.server.ui_dir
        if ui_dir is None or not ui_dir.exists():
            self._error(404, "no UI assets configured (start with --ui-dir)")
            return
        rel = path[3:] if path.startswith("/ui") else path
        rel = rel.lstrip("/") or "index.html"
        target = (ui_dir / rel).resolve()
        if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
            self._error(404, f"no static asset {rel!r}")
            return
        body = target.read_bytes()
        content_type = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def serve(engine: Engine, host: str = "127.0.0.1", port: int = 8080,
          ui_dir: str | Path | None = None) -> ApiServer:
    """Start the API server on a background thread and return it."""
    server = ApiServer(engine, host, port, ui_dir)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    log.info("serving on %s", server.url)
    return server

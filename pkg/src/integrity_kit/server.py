"""Minimal HTTP validation endpoint.

``POST /v1/validate`` with ``{"answers": {question_id: value | [values] | int}}``
returns ``{"verdict", "prob_fake", "logic_score", "reasons"}``, computed by
the same :func:`~integrity_kit.pipeline.judge` call the batch filter uses.
``GET /v1/health`` returns ``{"status": "ok", "model": kind}``.

The model, schema and rule set are loaded once and never mutated, so the
threaded server can answer any number of requests concurrently.  Swapping
models needs a restart.
"""
from __future__ import annotations

import json
import logging
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import jsonfmt
from .pipeline import TrainedModel, judge
from .rules import RuleSet
from .schema import RawResponse, SurveySchema

log = logging.getLogger(__name__)


def encode(payload: dict) -> bytes:
    return jsonfmt.dumps(payload, digits=None).encode("utf-8")


def _valid_value(v) -> bool:
    if v is None or isinstance(v, str):
        return True
    if isinstance(v, int) and not isinstance(v, bool):
        return True
    return isinstance(v, list) and all(isinstance(x, str) for x in v)


class ValidationService:
    def __init__(self, model: TrainedModel, schema: SurveySchema, ruleset: RuleSet, drop_suspicious: bool = False):
        ruleset.check_against(schema)
        self.model = model
        self.schema = schema
        self.ruleset = ruleset
        self.drop_suspicious = drop_suspicious

    def health(self) -> dict:
        return {"status": "ok", "model": self.model.kind}

    def validate(self, body: bytes) -> tuple[int, dict]:
        """HTTP status and JSON payload for one request body."""
        try:
            doc = json.loads(body)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            return 400, {"error": f"malformed JSON: {exc}"}
        if not isinstance(doc, dict) or not isinstance(doc.get("answers"), dict):
            return 400, {"error": 'body must be an object with an "answers" object'}
        answers = doc["answers"]
        unknown = sorted(k for k in answers if k not in self.schema)
        if unknown:
            return 422, {"error": "unknown question ids", "unknown": unknown}
        bad = sorted(k for k, v in answers.items() if not _valid_value(v))
        if bad:
            return 400, {"error": "answers must be text, an integer or a list of text", "fields": bad}
        verdict = judge(self.model, self.schema, self.ruleset, [RawResponse("request", answers)],
                        self.drop_suspicious)[0]
        return 200, verdict.payload()


def make_handler(service: ValidationService) -> type[BaseHTTPRequestHandler]:
    class Handler(BaseHTTPRequestHandler):
        server_version = "integrity-kit"

        def _send(self, status: int, payload: dict) -> None:
            data = encode(payload)
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_GET(self):
            if self.path == "/v1/health":
                self._send(200, service.health())
            else:
                self._send(404, {"error": f"no route {self.path}"})

        def do_POST(self):
            if self.path != "/v1/validate":
                self._send(404, {"error": f"no route {self.path}"})
                return
            length = int(self.headers.get("Content-Length") or 0)
            self._send(*service.validate(self.rfile.read(length)))

        def log_message(self, fmt, *args):
            log.info("%s - %s", self.address_string(), fmt % args)

    return Handler


def make_server(service: ValidationService, host: str = "127.0.0.1", port: int = 8000) -> ThreadingHTTPServer:
    """Bound but not yet serving; call ``serve_forever()`` (port 0 picks a free port)."""
    return ThreadingHTTPServer((host, port), make_handler(service))

"""JSON-over-HTTP front end. Thin by design: every handler parses the
request, calls one AppState method, and serializes the result, so the CLI
and the service cannot drift apart.

Error bodies always look like {"error": {"code": ..., "message": ...}};
unknown resources map to 404, bad input to 400.
"""

from __future__ import annotations

import json
import re
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .state import AppState, DEFAULT_PORT, superconcept_to_dict
from .demo import seed
from ..errors import FacetForgeError, IoFailure, NotFound, PortInUse, StorageUnavailable

_STATUS_BY_CODE = {
    "not_found": 404,
    "port_in_use": 503,
    "storage_unavailable": 503,
}


class _BadRequest(Exception):
    pass


def _facets_from_body(raw) -> list:
    if raw is None:
        return []
    if isinstance(raw, dict):
        return list(raw.items())
    return [(pair[0], pair[1]) for pair in raw]


class Handler(BaseHTTPRequestHandler):
    state: AppState
    quiet: bool = True
    protocol_version = "HTTP/1.1"

    # --- plumbing ---------------------------------------------------------

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        if not self.quiet:
            super().log_message(format, *args)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        try:
            body = json.loads(self.rfile.read(length).decode("utf-8"))
        except (ValueError, UnicodeDecodeError) as exc:
            raise _BadRequest(f"request body is not valid JSON: {exc}")
        if not isinstance(body, dict):
            raise _BadRequest("request body must be a JSON object")
        return body

    def _send(self, status: int, payload: dict) -> None:
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(data)

    def _send_error(self, status: int, code: str, message: str) -> None:
        self._send(status, {"error": {"code": code, "message": message}})

    def _dispatch(self, method: str) -> None:
        parsed = urlparse(self.path)
        try:
            body = self._read_body() if method == "POST" else {}
            result = self._route(method, parsed.path, parse_qs(parsed.query), body)
        except _BadRequest as exc:
            self._send_error(400, "bad_request", str(exc))
        except FacetForgeError as exc:
            self._send_error(_STATUS_BY_CODE.get(exc.code, 400), exc.code, str(exc))
        except (KeyError, TypeError, ValueError) as exc:
            self._send_error(400, "bad_request", str(exc))
        except Exception as exc:  # pragma: no cover - defensive catch-all
            self._send_error(500, "internal", str(exc))
        else:
            self._send(200, result)

    def do_GET(self):  # noqa: N802 - stdlib naming
        self._dispatch("GET")

    def do_POST(self):  # noqa: N802
        self._dispatch("POST")

    def do_OPTIONS(self):  # noqa: N802 - CORS preflight for the browser UI
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Content-Length", "0")
        self.end_headers()

    # --- routing -----------------------------------------------------------

    def _route(self, method: str, path: str, query: dict, body: dict) -> dict:
        s = self.state
        if method == "GET" and path == "/":
            return {
                "service": "facetforge",
                "store": str(s.path),
                "endpoints": [
                    "POST /users", "POST /portlets", "POST /tags",
                    "POST /ontology/load", "POST /match/learn",
                    "POST /match/superconcepts", "GET /views/{user}/{portlet}",
                    "POST /views/{user}/filter", "POST /views/{user}/zoom",
                    "POST /views/{user}/reset", "GET /views/{user}",
                    "GET /users", "GET /navigate", "POST /eval", "POST /seed-demo",
                ],
            }

        if method == "POST" and path == "/users":
            user = s.add_user(
                _require(body, "id"),
                interests=body.get("interests", ()),
                friends=body.get("friends", ()),
            )
            return {"id": user.id, "interests": sorted(user.profile.interests)}

        if method == "GET" and path == "/users":
            users = s.users()
            return {
                "users": [
                    {"id": u.id, "interests": sorted(u.profile.interests)}
                    for u in sorted(users.values())
                ]
            }

        if method == "POST" and path == "/portlets":
            portlet = s.add_portlet(
                _require(body, "id"),
                kind=_require(body, "kind"),
                owner=_require(body, "owner"),
                payload_ref=body.get("payload_ref", ""),
                tags=body.get("tags", ()),
                facets=_facets_from_body(body.get("facets")),
                children=body.get("children", ()),
            )
            return {"id": portlet.id, "kind": portlet.kind}

        if method == "POST" and path == "/tags":
            tag = s.add_tag(
                _require(body, "portlet"), _require(body, "label"), _require(body, "owner")
            )
            return {"portlet": body["portlet"], "label": tag.label, "owner": tag.owner}

        if method == "POST" and path == "/ontology/load":
            if "ntriples" in body:
                text = body["ntriples"]
            elif "path" in body:
                text = _read_text(body["path"])
            else:
                raise _BadRequest("provide 'ntriples' inline or a server-side 'path'")
            return {"added": s.ingest_text(text)}

        if method == "POST" and path == "/match/learn":
            training = body.get("training") or _read_text(_require(body, "training_path"))
            config = body.get("config", "")
            if not config and "config_path" in body:
                config = _read_text(body["config_path"])
            result = s.learn(training, config)
            return {
                "weights": list(result.weights.values),
                "threshold": result.threshold,
                "train_accuracy": result.train_accuracy,
                "heldout_accuracy": result.heldout_accuracy,
                "final_loss": result.final_loss,
            }

        if method == "POST" and path == "/match/superconcepts":
            return {"superconcepts": [superconcept_to_dict(x) for x in s.superconcepts()]}

        if method == "POST" and path == "/seed-demo":
            return seed(s)

        if method == "GET" and path == "/navigate":
            start = _one(query, "start")
            goals = query.get("goal", [])
            if not goals:
                raise _BadRequest("at least one 'goal' parameter required")
            return {"start": start, "goals": sorted(goals), "path": s.navigate(start, goals)}

        if method == "POST" and path == "/eval":
            if "csv" in body:
                return s.evaluate_csv(body["csv"])
            if "path" in body:
                return s.evaluate_csv(_read_text(body["path"]))
            attributes = _require(body, "attributes")
            from .. import evaluation as ev

            matrix = ev.EvaluationMatrix(
                task=body.get("task", ""),
                attributes=tuple(
                    ev.Attribute(a["name"], float(a["score"]), float(a["weight"]))
                    for a in attributes
                ),
            )
            return s.evaluate_matrix(matrix)

        view_route = re.fullmatch(r"/views/([^/]+)", path)
        if view_route and method == "GET":
            return s.view_payload(s.session_view(view_route.group(1)))

        view_action = re.fullmatch(r"/views/([^/]+)/(filter|zoom|reset)", path)
        if view_action and method == "POST":
            user, action = view_action.groups()
            if action == "filter":
                view = s.filter_view(user, _require(body, "facet"), _require(body, "value"))
            elif action == "reset":
                view = s.reset_view(user)
            elif body.get("unzoom"):
                view = s.unzoom_view(user)
            else:
                view = s.zoom_view(user, _require(body, "facet"))
            return s.view_payload(view)

        resolve_route = re.fullmatch(r"/views/([^/]+)/([^/]+)", path)
        if resolve_route and method == "GET":
            viewer, portlet = resolve_route.groups()
            return s.resolve(viewer, portlet, speaker_id=_one(query, "speaker", default=None))

        raise NotFound(f"no route for {method} {path}")


def _require(body: dict, key: str):
    if key not in body:
        raise _BadRequest(f"missing required field {key!r}")
    return body[key]


def _one(query: dict, key: str, **kwargs):
    values = query.get(key, [])
    if not values:
        if "default" in kwargs:
            return kwargs["default"]
        raise _BadRequest(f"missing required query parameter {key!r}")
    return values[0]


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path!r}: {exc}") from exc


def serve(
    port: int = DEFAULT_PORT, data_path: str | None = None, quiet: bool = True
) -> ThreadingHTTPServer:
    """Bind and return the server (caller runs serve_forever)."""
    try:
        state = AppState(data_path) if data_path else AppState()
    except FacetForgeError as exc:
        raise StorageUnavailable(str(exc)) from exc

    handler = type("BoundHandler", (Handler,), {"state": state, "quiet": quiet})
    try:
        return ThreadingHTTPServer(("", port), handler)
    except OSError as exc:
        raise PortInUse(f"cannot bind port {port}: {exc}") from exc

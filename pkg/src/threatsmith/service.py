"""Local HTTP JSON API backing the web UI.

Single-session, local-first: one scope held in memory and persisted to the
scope file, one loaded snapshot, one set of last results. Library updates
run as a background job with polled progress; at most one job runs at a
time, and the refreshed snapshot is swapped in atomically.
"""
from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import scopefile
from .analysis import AnalysisResult, MissingData, MitigationCatalog, analyze_scope, bundled_catalog
from .library import LibrarySnapshot, load_snapshot, save_snapshot, update_library
from .model import BUILTIN_KINDS, DEFAULT_KEYWORDS, Scope, ThreatList, validate_scope
from .report import chart_data, report_document
from .sources import SourceClient, SourceConfig


class SessionState:
    """All mutable server state behind one lock.

    Scope writes, snapshot swaps, and job transitions are atomic; analyze
    reads take a consistent snapshot reference and never mutate anything.
    The update job state machine is idle -> running -> done|failed -> idle
    (the last transition via explicit acknowledgment).
    """

    def __init__(self, scope: Scope, snapshot: LibrarySnapshot,
                 snapshot_path: Optional[Path], scope_path: Optional[Path]):
        self.lock = threading.Lock()
        self.scope = scope
        self.snapshot = snapshot
        self.snapshot_path = snapshot_path
        self.scope_path = scope_path
        self.results: Optional[dict[str, AnalysisResult]] = None
        self.results_scope: Optional[Scope] = None
        self.job_state = "idle"  # idle | running | failed | done
        self.job_progress = (0, 0)  # keywords completed, total
        self.job_reason = ""


def create_app(
    snapshot_path: str | Path | None = None,
    scope_path: str | Path | None = None,
    search_endpoint: Optional[str] = None,
    detail_endpoint: Optional[str] = None,
    catalog: Optional[MitigationCatalog] = None,
    source_client: Optional[SourceClient] = None,
) -> FastAPI:
    """Build the app; snapshot must be loadable at startup."""
    snapshot = load_snapshot(snapshot_path) if snapshot_path else None
    if snapshot is None:
        raise ValueError("snapshot_path is required")
    scope = (
        scopefile.load_scope(scope_path)
        if scope_path and Path(scope_path).exists()
        else scopefile.empty_scope("scope")
    )
    cat = catalog or bundled_catalog()
    state = SessionState(scope, snapshot, Path(snapshot_path), Path(scope_path) if scope_path else None)

    app = FastAPI(title="threatsmith")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.session = state

    def make_client() -> Optional[SourceClient]:
        if source_client is not None:
            return source_client
        if search_endpoint and detail_endpoint:
            return SourceClient(SourceConfig.from_env(search_endpoint, detail_endpoint))
        return None

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/components/kinds")
    def kinds():
        return {
            "kinds": [
                {"name": k, "keywords": list(DEFAULT_KEYWORDS[k])} for k in BUILTIN_KINDS
            ]
        }

    @app.get("/scope")
    def get_scope():
        with state.lock:
            return scopefile.scope_to_document(state.scope)

    @app.put("/scope")
    def put_scope(doc: dict):
        try:
            new_scope = scopefile.scope_from_document(doc)
        except (scopefile.MalformedScopeFile, ValueError) as exc:
            return JSONResponse({"violations": [str(exc)]}, status_code=400)
        violations = [
            v.message for v in validate_scope(new_scope) if "duplicate" in v.message
        ]
        if violations:
            return JSONResponse({"violations": violations}, status_code=400)
        with state.lock:
            state.scope = new_scope
            if state.scope_path:
                scopefile.save_scope(new_scope, state.scope_path)
            return scopefile.scope_to_document(state.scope)

    @app.post("/analyze")
    def analyze():
        with state.lock:
            scope_ref, snapshot_ref = state.scope, state.snapshot
        violations = [v.message for v in validate_scope(scope_ref)]
        if violations:
            return JSONResponse({"violations": violations}, status_code=400)
        results = analyze_scope(scope_ref, snapshot_ref, cat)
        with state.lock:
            state.results = results
            state.results_scope = scope_ref
        return report_document(results, scope_ref)

    @app.get("/results")
    def results(view: str = "top5"):
        if view not in ("all", "top5"):
            return JSONResponse({"violations": [f"unknown view: {view}"]}, status_code=400)
        with state.lock:
            res, scope_ref = state.results, state.results_scope
        if res is None:
            return JSONResponse({"violations": ["no analysis has been run"]}, status_code=400)
        doc = report_document(res, scope_ref)
        if view == "top5":
            for comp in doc["components"]:
                comp.pop("threats", None)
        return doc

    @app.get("/chart/{component_id}")
    def chart(component_id: str):
        with state.lock:
            res, scope_ref = state.results, state.results_scope
        if res is None or component_id not in res:
            return JSONResponse({"error": "unknown component"}, status_code=404)
        result = res[component_id]
        if isinstance(result, MissingData):
            return JSONResponse(
                {"error": "no data", "missing_keywords": list(result.missing_keywords)},
                status_code=404,
            )
        component = next(c for c in scope_ref.components if c.id == component_id)
        data = chart_data(result, component.label)
        return {
            "component_label": data.component_label,
            "slices": [
                {"label": s.label, "count": s.count, "percent": s.percent}
                for s in data.slices
            ],
            "other_count": data.other_count,
        }

    def run_update(keywords: list[str], client: SourceClient) -> None:
        completed = 0
        failures: list[str] = []
        with state.lock:
            snapshot_ref = state.snapshot
        current = snapshot_ref
        for keyword in keywords:
            new_snapshot, rep = update_library(current, [keyword], client)
            current = new_snapshot
            completed += 1
            failures.extend(f"{kw}: {reason}" for kw, reason in rep.failures)
            with state.lock:
                state.job_progress = (completed, len(keywords))
        with state.lock:
            state.snapshot = current
            if state.snapshot_path:
                save_snapshot(current, state.snapshot_path)
            if failures:
                state.job_state = "failed"
                state.job_reason = "; ".join(failures)
            else:
                state.job_state = "done"

    @app.post("/library/update")
    def library_update(body: Optional[dict] = None):
        client = make_client()
        if client is None:
            return JSONResponse(
                {"error": "no vulnerability source endpoints configured"}, status_code=400
            )
        keywords = (body or {}).get("keywords") or [
            kw for kws in DEFAULT_KEYWORDS.values() for kw in kws
        ]
        with state.lock:
            if state.job_state == "running":
                return JSONResponse({"error": "update already running"}, status_code=409)
            state.job_state = "running"
            state.job_progress = (0, len(keywords))
            state.job_reason = ""
        threading.Thread(target=run_update, args=(keywords, client), daemon=True).start()
        return JSONResponse({"state": "running", "total": len(keywords)}, status_code=202)

    @app.get("/library/status")
    def library_status():
        with state.lock:
            completed, total = state.job_progress
            return {
                "state": state.job_state,
                "completed": completed,
                "total": total,
                "reason": state.job_reason,
                "fetched_at": state.snapshot.fetched_at.isoformat(),
            }

    @app.post("/library/ack")
    def library_ack():
        with state.lock:
            if state.job_state in ("done", "failed"):
                state.job_state = "idle"
                state.job_progress = (0, 0)
                state.job_reason = ""
            return {"state": state.job_state}

    return app

"""HTTP query service over one loaded, immutable index bundle.

Endpoints:
    POST /api/query   rank words against a phrase
    GET  /api/meta    index metadata (size, matrices, sparsity, depths)
    GET  /api/health  liveness probe
Optionally serves a directory of static web UI assets at /. The bundle is
selected at startup and never swapped, so concurrent requests share it
without locking.
"""

from __future__ import annotations

import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .graph import MatrixKind
from .similarity import NoContentWordsError, query
from .store import IndexBundle

__all__ = ["create_app", "QueryRequest"]

MAX_LIMIT = 500


class QueryRequest(BaseModel):
    phrase: str = Field(min_length=1, max_length=1000)
    limit: int = Field(default=20, ge=1, le=MAX_LIMIT)
    depth: int | None = Field(default=None, ge=1)
    matrix: str | None = None
    include_inputs: bool = False


def create_app(bundle: IndexBundle, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="revdict", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "MALFORMED_REQUEST", "detail": exc.errors()},
        )

    @app.exception_handler(NoContentWordsError)
    async def _no_content(request: Request, exc: NoContentWordsError):
        return JSONResponse(status_code=422, content={"code": exc.code, "detail": str(exc)})

    lex = bundle.lexicon

    @app.post("/api/query")
    def handle_query(req: QueryRequest):
        if req.matrix is not None and req.matrix not in {k.value for k in bundle.matrices}:
            return JSONResponse(
                status_code=400,
                content={
                    "code": "UNKNOWN_MATRIX",
                    "detail": f"index has no matrix {req.matrix!r}",
                },
            )
        started = time.perf_counter()
        ranked = query(
            req.phrase,
            bundle,
            depth=req.depth,
            limit=req.limit,
            kind=req.matrix,
            include_inputs=req.include_inputs,
        )
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        results = []
        for wid, score_val in zip(ranked.word_ids, ranked.scores):
            dists = ranked.distances_for(int(wid))
            results.append(
                {
                    "word": lex.word_of(int(wid)),
                    "score": float(score_val),
                    "distances": {
                        lex.word_of(pid): (d if d >= 0 else None) for pid, d in dists.items()
                    },
                }
            )
        return {
            "inputs": [
                {"word": lex.word_of(wid), "nu": nu}
                for wid, nu in zip(ranked.input_ids, ranked.input_nus)
            ],
            "unknown_tokens": list(ranked.unknown_tokens),
            "results": results,
            "depth_used": ranked.depth,
            "matrix": (bundle.default_kind() if req.matrix is None else MatrixKind(req.matrix)).value,
            "timing_ms": elapsed_ms,
        }

    @app.get("/api/meta")
    def handle_meta():
        return {
            "n": len(lex),
            "matrices": [k.value for k in bundle.matrices],
            "default_matrix": bundle.default_kind().value,
            "sparsity": bundle.stats.sparsity,
            "max_nonredundant_depth": {k.value: v for k, v in bundle.depth_by_kind.items()},
            "format_version": bundle.format_version,
            "manifest": bundle.manifest,
        }

    @app.get("/api/health")
    def handle_health():
        return {"status": "ok"}

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app

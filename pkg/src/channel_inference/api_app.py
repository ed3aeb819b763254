from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import uvicorn
from fastapi import FastAPI, HTTPException, Request

from channel_inference.config import Settings, load_settings
from channel_inference.errors import MathError, ValidationError
from channel_inference.logging_setup import setup_logging
from channel_inference.queries import QuerySpec, evaluate, query_settings
from channel_inference.rendering import render, to_json

logger = logging.getLogger(__name__)


def _require_auth(request: Request, token: str | None) -> None:
    if not token:
        return
    header = request.headers.get("x-api-token")
    query = request.query_params.get("token")
    if header == token or query == token:
        return
    raise HTTPException(status_code=401, detail="Unauthorized")


def _confine(raw: str | None, root: Path) -> str | None:
    """Resolves a request path under the data directory. Paths that leave it are refused."""
    if raw is None:
        return None
    base = root.resolve()
    target = (base / raw).resolve()
    if not target.is_relative_to(base):
        logger.warning("refused path outside %s: %s", base, raw)
        raise HTTPException(status_code=403, detail=f"Path is outside the data directory: {raw}")
    return str(target)


def _confine_paths(payload: QuerySpec, root: Path) -> QuerySpec:
    updates = {name: _confine(getattr(payload, name), root) for name in ("input", "gaussians", "model")}
    return payload.model_copy(update=updates)


def build_api_app(settings: Settings) -> FastAPI:
    app = FastAPI(title="Channel Inference", version="0.1.0")

    @app.get("/api/health")
    async def health(request: Request) -> dict[str, Any]:
        _require_auth(request, settings.api_token)
        return {"ok": True}

    @app.post("/api/query")
    async def query(request: Request, payload: QuerySpec) -> dict[str, Any]:
        _require_auth(request, settings.api_token)
        payload = _confine_paths(payload, settings.data_dir)
        try:
            value = evaluate(payload, settings)
        except ValidationError as exc:
            logger.info("query %s rejected: %s", payload.subcommand, exc)
            raise HTTPException(status_code=422, detail=str(exc)) from None
        except MathError as exc:
            logger.info("query %s undefined: %s", payload.subcommand, exc)
            raise HTTPException(status_code=409, detail=str(exc)) from None
        precision = query_settings(payload, settings).precision
        logger.info("query %s ok", payload.subcommand)
        return {
            "ok": True,
            "subcommand": payload.subcommand,
            "text": render(value, "ket", precision),
            "result": to_json(value),
        }

    return app


def run_api(settings: Settings | None = None, host: str | None = None, port: int | None = None) -> None:
    settings = settings or load_settings()
    setup_logging(settings.log_level)
    app = build_api_app(settings)
    uvicorn.run(app, host=host or settings.api_host, port=port or settings.api_port)

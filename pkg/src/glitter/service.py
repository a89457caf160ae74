"""Stateless annotation service.

One POST endpoint does the work; everything else is introspection. All
configured backends are loaded before the app accepts traffic, so a broken
model file fails the deployment instead of the first unlucky request.
Responses are canonical JSON bytes, so two deployments given the same text
and model answer with byte-identical bodies. Submitted texts are never
logged.
"""

from __future__ import annotations

from typing import Any, Mapping

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .backends import Backend
from .config import ServiceSettings
from .errors import (
    AlignmentError,
    BackendError,
    BudgetExceededError,
    ConfigError,
    EmptyTextError,
)
from .pipeline import glitter
from .render import to_structured

API_PREFIX = "/api/v1"


class GlitterRequest(BaseModel):
    text: str
    backend: str
    options: dict[str, Any] = Field(default_factory=dict)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def _capabilities_payload(backend: Backend) -> dict[str, Any]:
    caps = backend.capabilities()
    return {
        "max_context_tokens": caps.max_context_tokens,
        "provides_full_distribution": caps.provides_full_distribution,
        "top_k_limit": caps.top_k_limit,
        "has_bos": caps.has_bos,
    }


def create_app(registry: Mapping[str, Backend], settings: ServiceSettings | None = None) -> FastAPI:
    """Build the application around an already-loaded backend registry."""
    settings = settings or ServiceSettings()
    app = FastAPI(title="surprisal annotation service", docs_url=None, redoc_url=None)
    if settings.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(settings.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error(422, "invalid_request", str(exc.errors()[:3]))

    @app.get("/healthz")
    def healthz() -> Response:
        if not registry:
            return _error(503, "no_backends", "no backends are configured")
        return JSONResponse({"status": "ok", "backends": sorted(registry)})

    @app.get(f"{API_PREFIX}/backends")
    def backends() -> Response:
        payload = [
            {
                "id": backend_id,
                "model_id": registry[backend_id].model_id,
                "description": registry[backend_id].description,
                "capabilities": _capabilities_payload(registry[backend_id]),
            }
            for backend_id in sorted(registry)
        ]
        return JSONResponse({"backends": payload})

    @app.post(f"{API_PREFIX}/glitter")
    def annotate(request: GlitterRequest) -> Response:
        if not request.text:
            return _error(400, "empty_text", "text must not be empty")
        if len(request.text) > settings.max_text_chars:
            return _error(
                400,
                "text_too_large",
                f"text has {len(request.text)} characters, limit is {settings.max_text_chars}",
            )
        backend = registry.get(request.backend)
        if backend is None:
            return _error(
                404,
                "backend_not_found",
                f"unknown backend {request.backend!r}; available: {', '.join(sorted(registry))}",
            )
        try:
            config = settings.annotation.with_overrides(request.options)
        except ConfigError as exc:
            return _error(422, "invalid_options", str(exc))
        try:
            document = glitter(
                request.text, backend, config, token_budget=settings.token_budget
            )
        except EmptyTextError as exc:
            return _error(400, "empty_text", str(exc))
        except BudgetExceededError as exc:
            return _error(413, "token_budget_exceeded", str(exc))
        except AlignmentError as exc:
            return _error(422, "alignment_failed", str(exc))
        except BackendError as exc:
            return _error(502, "backend_failure", str(exc))
        return Response(content=to_structured(document), media_type="application/json")

    return app

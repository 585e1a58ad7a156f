"""Read-only HTTP façade over a loaded index bundle.

Every endpoint delegates to the corresponding IndexBundle method, so HTTP
responses are observationally equivalent to in-process library calls. Errors
are structured ``{"code": ..., "message": ...}`` bodies with appropriate
status codes. The bundle is immutable, so concurrent identical requests
always produce identical bodies.
"""

from __future__ import annotations

import socket

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..errors import BindFailure, UnknownFacet, UnknownWorkbook
from .bundle import DEFAULT_PAGE_LIMIT, IndexBundle


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def create_app(bundle: IndexBundle, cors_origin: str = "*") -> FastAPI:
    app = FastAPI(title="vizrec", docs_url=None, redoc_url=None, openapi_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    @app.exception_handler(UnknownWorkbook)
    async def _unknown_workbook(_req: Request, exc: UnknownWorkbook):
        return _error(404, "unknown_workbook", str(exc))

    @app.exception_handler(UnknownFacet)
    async def _unknown_facet(_req: Request, exc: UnknownFacet):
        return _error(400, "unknown_facet", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _invalid(_req: Request, exc: RequestValidationError):
        return _error(422, "invalid_request", str(exc.errors()))

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "workbooks": len(bundle.workbooks)}

    @app.get("/workbooks")
    def workbooks(
        offset: int | None = None,
        limit: int = DEFAULT_PAGE_LIMIT,
        page: int | None = None,
    ):
        if offset is None:
            offset = (max(1, page) - 1) * limit if page is not None else 0
        return bundle.page(offset=offset, limit=limit)

    @app.get("/workbooks/{workbook_id}")
    def workbook_detail(workbook_id: str):
        return bundle.detail(workbook_id)

    @app.get("/workbooks/{workbook_id}/recommendations")
    def recommendations(
        workbook_id: str,
        facet: str,
        limit: int = DEFAULT_PAGE_LIMIT,
        offset: int = 0,
    ):
        return bundle.recommend(workbook_id, facet, limit=limit, offset=offset)

    @app.get("/workbooks/{workbook_id}/group")
    def group(workbook_id: str):
        return {"id": workbook_id, "group": bundle.group_of(workbook_id)}

    @app.get("/search")
    def search(q: str = "", limit: int = DEFAULT_PAGE_LIMIT):
        return {"query": q, "items": bundle.search(q, limit=limit)}

    @app.get("/tags")
    def tags():
        return {"items": bundle.tag_table()}

    @app.get("/tags/{tag}/workbooks")
    def tag_workbooks(tag: str):
        return {"tag": tag, "items": bundle.tag_workbooks(tag)}

    return app


def serve(
    bundle: IndexBundle,
    host: str = "127.0.0.1",
    port: int = 8000,
    cors_origin: str = "*",
    log_level: str = "info",
) -> None:
    """Bind and block serving the bundle; raises BindFailure if the address
    is unavailable."""
    import uvicorn

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise BindFailure(f"cannot bind {host}:{port}: {exc}") from exc
    finally:
        probe.close()

    app = create_app(bundle, cors_origin=cors_origin)
    uvicorn.run(app, host=host, port=port, log_level=log_level)

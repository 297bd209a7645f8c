"""Synchronous client for the calibration service.

Runs against a remote base URL, or embeds the ASGI application
in-process (the default for the CLI) so the pipeline works without a
running server and stays fully deterministic.
"""
from __future__ import annotations

from typing import Optional

import httpx


class ServiceError(RuntimeError):
    """A non-2xx response from the service."""

    def __init__(self, status_code: int, detail: str):
        super().__init__(f"service error {status_code}: {detail}")
        self.status_code = status_code
        self.detail = detail


class ServiceClient:
    """Thin JSON-over-HTTP client used by the CLI."""

    def __init__(self, base_url: Optional[str] = None):
        if base_url:
            self._client: httpx.Client = httpx.Client(base_url=base_url, timeout=300.0)
        else:
            import warnings

            with warnings.catch_warnings():
                # starlette warns about its httpx-based TestClient on import
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .app import create_app

            self._client = TestClient(create_app(), raise_server_exceptions=False)

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _handle(self, response: httpx.Response) -> dict:
        if response.status_code >= 500:
            raise ServiceError(response.status_code, "internal service error")
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            if not isinstance(detail, str):
                detail = _format_validation_errors(detail)
            raise ServiceError(response.status_code, detail)
        return response.json()

    def get(self, path: str) -> dict:
        return self._handle(self._client.get(path))

    def post(self, path: str, payload: dict) -> dict:
        return self._handle(self._client.post(path, json=payload))


def _format_validation_errors(detail) -> str:
    # FastAPI request-validation errors arrive as a list of {loc, msg}.
    try:
        parts = []
        for item in detail:
            loc = ".".join(str(p) for p in item.get("loc", []) if p != "body")
            parts.append(f"{loc}: {item.get('msg', 'invalid')}")
        return "; ".join(parts) if parts else str(detail)
    except (TypeError, AttributeError):
        return str(detail)

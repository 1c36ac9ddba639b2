"""ASGI service exposing the toolkit over HTTP."""

from .app import app, create_app

__all__ = ["app", "create_app"]

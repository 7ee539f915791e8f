"""Synthesis-backend adapter: procedural fallback or wrapped external models."""

from txt2vid_adapter.config import AdapterConfig, resolve_ops
from txt2vid_adapter.server import AdapterServer, serve_stdio, serve_tcp

__all__ = ["AdapterConfig", "resolve_ops", "AdapterServer", "serve_stdio", "serve_tcp"]

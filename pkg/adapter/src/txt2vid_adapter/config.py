"""Adapter configuration: which implementation backs each op."""

from __future__ import annotations

import importlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable


@dataclass
class AdapterConfig:
    tts_impl: str = "procedural"  # "procedural" | "external"
    lipsync_impl: str = "procedural"
    tts_external: str = ""  # "module:attr" resolving to a callable
    lipsync_external: str = ""
    device: str = "cpu"
    watchdog_s: float = 30.0
    speaking_rate: float = 15.0
    base_freq: float = 440.0
    amplitude: int = 8000

    @classmethod
    def from_file(cls, path: str | Path) -> "AdapterConfig":
        return cls(**json.loads(Path(path).read_text("utf-8")))


@dataclass
class ResolvedOps:
    """What this process can actually serve, verified at hello time."""

    tts: Callable | None
    lipsync: Callable | None
    notes: dict[str, str] = field(default_factory=dict)

    @property
    def capabilities(self) -> list[str]:
        ops = []
        if self.tts is not None:
            ops.append("tts")
        if self.lipsync is not None:
            ops.append("lipsync")
            ops.append("register_profile")
        return ops


def load_external(spec: str):
    """Resolve a "module:attr" callable; None when unavailable."""
    if not spec or ":" not in spec:
        return None, "no external spec configured"
    module_name, _, attr = spec.partition(":")
    try:
        module = importlib.import_module(module_name)
        fn = getattr(module, attr)
    except (ImportError, AttributeError) as exc:
        return None, f"external model unavailable: {exc}"
    return fn, "loaded"


def resolve_ops(config: AdapterConfig) -> ResolvedOps:
    from txt2vid_adapter import synth

    notes: dict[str, str] = {}
    if config.tts_impl == "procedural":
        def tts(text: str, voice_id: str):
            return synth.procedural_tts(
                text, config.speaking_rate, config.base_freq, config.amplitude
            )
        notes["tts"] = "procedural"
    else:
        tts, notes["tts"] = load_external(config.tts_external)

    if config.lipsync_impl == "procedural":
        lipsync = synth.procedural_lipsync
        notes["lipsync"] = "procedural"
    else:
        lipsync, notes["lipsync"] = load_external(config.lipsync_external)

    return ResolvedOps(tts=tts, lipsync=lipsync, notes=notes)

"""Gateway configuration."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from txt2vid.pipeline.runner import Mode


def default_backend_cmd() -> list[str]:
    return [sys.executable, "-m", "txt2vid.backend", "--stdio"]


@dataclass
class GatewayConfig:
    host: str = "127.0.0.1"
    protocol_port: int = 7340  # wire protocol over TCP
    ui_port: int = 7341  # UI websocket (+ /wire websocket-binary sender lane)
    playback_port: int = 7342  # HTTP playback
    profile_dir: str | Path = "profiles"
    backend_cmd: list[str] = field(default_factory=default_backend_cmd)
    ui_token: str = "dev-token"
    default_mode: Mode = Mode.LIVE
    jpeg_quality: int = 80
    stats_interval_s: float = 1.0

    def __post_init__(self) -> None:
        ports = [self.protocol_port, self.ui_port, self.playback_port]
        live_ports = [p for p in ports if p != 0]
        if len(set(live_ports)) != len(live_ports):
            raise ValueError("protocol, ui, and playback ports must be distinct")

    @classmethod
    def from_file(cls, path: str | Path) -> "GatewayConfig":
        raw = json.loads(Path(path).read_text("utf-8"))
        if "default_mode" in raw:
            raw["default_mode"] = Mode(raw["default_mode"])
        return cls(**raw)

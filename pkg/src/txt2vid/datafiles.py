"""Access to the bundled sample transcripts.

Three short public-domain passages (~75 words each, nominally 30 s of
conversational speech) used by the demo CLI and the rate-reproduction tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources


@dataclass(frozen=True)
class BundledTranscript:
    name: str
    source: str
    text: str
    nominal_duration_ms: int


def bundled_transcripts() -> list[BundledTranscript]:
    root = resources.files("txt2vid").joinpath("data/transcripts")
    manifest = json.loads(root.joinpath("manifest.json").read_text("utf-8"))
    out = []
    for entry in manifest["transcripts"]:
        text = root.joinpath(entry["file"]).read_text("utf-8").strip()
        out.append(
            BundledTranscript(
                name=entry["file"].rsplit(".", 1)[0],
                source=entry["source"],
                text=text,
                nominal_duration_ms=manifest["nominal_duration_ms"],
            )
        )
    return out

"""Benchmark matrix assembly and serialization.

One row per (content, grid params) with measured rates and, when a text
bitrate is supplied, the codec/text bitrate ratio. An AVERAGE pseudo-content
row per params tuple mirrors the published table's "average combined bitrate
across contents" column. CSV and JSON carry identical values.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from txt2vid.bench.grid import REFERENCE_AVG_KBPS, CodecParams, table1_grid
from txt2vid.bench.transcode import EncodeResult
from txt2vid.textcodec.accounting import compression_ratio

MATRIX_COLUMNS = [
    "content_id",
    "video_codec",
    "crf",
    "ds_video",
    "audio_codec",
    "audio_br_kbps",
    "ds_audio",
    "video_bps",
    "audio_bps",
    "total_bps",
    "file_bytes",
    "duration_ms",
    "skipped",
    "txt2vid_bps",
    "ratio",
]


@dataclass
class BenchmarkMatrix:
    results: list[EncodeResult] = field(default_factory=list)
    txt2vid_bps: float | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def skipped_rows(self) -> int:
        return sum(1 for r in self.results if r.skipped)

    def with_averages(self) -> list[EncodeResult]:
        """Measured rows plus one AVERAGE row per params tuple."""
        rows = list(self.results)
        by_params: dict[str, list[EncodeResult]] = {}
        for r in self.results:
            if not r.skipped:
                by_params.setdefault(r.params.key, []).append(r)
        contents = {r.content_id for r in self.results}
        if len(contents) > 1:
            for key in sorted(by_params):
                group = by_params[key]
                n = len(group)
                rows.append(
                    EncodeResult(
                        params=group[0].params,
                        content_id="AVERAGE",
                        video_bps=sum(g.video_bps for g in group) / n,
                        audio_bps=sum(g.audio_bps for g in group) / n,
                        total_bps=sum(g.total_bps for g in group) / n,
                        file_bytes=sum(g.file_bytes for g in group) // n,
                        duration_ms=group[0].duration_ms,
                    )
                )
        return rows

    def to_rows(self) -> list[dict]:
        out = []
        for r in self.with_averages():
            ratio = ""
            if self.txt2vid_bps and not r.skipped and r.total_bps > 0:
                ratio = compression_ratio(r.total_bps, self.txt2vid_bps)
            out.append(
                {
                    "content_id": r.content_id,
                    "video_codec": r.params.video_codec,
                    "crf": r.params.crf,
                    "ds_video": r.params.ds_video,
                    "audio_codec": r.params.audio_codec,
                    "audio_br_kbps": r.params.audio_br_kbps,
                    "ds_audio": r.params.ds_audio,
                    "video_bps": r.video_bps,
                    "audio_bps": r.audio_bps,
                    "total_bps": r.total_bps,
                    "file_bytes": r.file_bytes,
                    "duration_ms": r.duration_ms,
                    "skipped": r.skipped,
                    "txt2vid_bps": self.txt2vid_bps if self.txt2vid_bps else "",
                    "ratio": ratio,
                }
            )
        return out


def emit_matrix(matrix: BenchmarkMatrix, path: str | Path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or (path.suffix.lstrip(".") or "csv")
    rows = matrix.to_rows()
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=MATRIX_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)
    elif fmt == "json":
        payload = {"metadata": matrix.metadata, "rows": rows}
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")
    return path


def load_matrix_rows(path: str | Path) -> list[dict]:
    path = Path(path)
    if path.suffix == ".json":
        return json.loads(path.read_text("utf-8"))["rows"]
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def ratio_report(rows: list[dict], txt2vid_bps: float) -> list[dict]:
    """Ratios against measured matrix rows (AVERAGE rows and skips excluded)."""
    out = []
    for row in rows:
        if row["content_id"] == "AVERAGE" or str(row.get("skipped")).lower() in ("true", "1"):
            continue
        total = float(row["total_bps"])
        if total <= 0:
            continue
        out.append(
            {
                "content_id": row["content_id"],
                "params": f"{row['video_codec']}-crf{row['crf']}-ds{row['ds_video']}"
                f"-{row['audio_codec']}{row['audio_br_kbps']}k-dsa{row['ds_audio']}",
                "total_bps": total,
                "txt2vid_bps": txt2vid_bps,
                "ratio": compression_ratio(total, txt2vid_bps),
            }
        )
    return out


def reference_ratio_report(txt2vid_bps: float) -> list[dict]:
    """Ratios against the published per-row average bitrates."""
    out = []
    for params in table1_grid():
        kbps = REFERENCE_AVG_KBPS[params.key]
        out.append(
            {
                "content_id": "reference",
                "params": params.key,
                "total_bps": kbps * 1000.0,
                "txt2vid_bps": txt2vid_bps,
                "ratio": compression_ratio(kbps * 1000.0, txt2vid_bps),
            }
        )
    return out

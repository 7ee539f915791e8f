"""Preference-vs-bitrate-ratio curves.

Each pair of (standard-codec encode, text-track reconstruction) yields one
curve point: the share of participants preferring the reconstruction, against
how many times smaller its bitrate was. Confidence intervals are Wilson (the
per-pair n of ~40 makes Wald useless near 0 and 100%), and the 50%-crossing
ratio is interpolated linearly in log-ratio because ratios span orders of
magnitude.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from txt2vid.study.votes import PreferenceRecord

Z_95 = 1.959963984540054


class UnjoinedPair(Exception):
    """A vote's pair_id has no bitrate ratio to join against."""


@dataclass(frozen=True)
class CurvePoint:
    pair_id: str
    content_id: str
    txt2vid_arm: str
    bitrate_ratio: float
    pct_prefer_txt2vid: float
    n_votes: int
    votes_txt2vid: int
    ci_low: float
    ci_high: float


def wilson_interval(successes: int, n: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion, as proportions."""
    if n <= 0:
        raise ValueError("n must be positive")
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def preference_curve(
    records: Iterable[PreferenceRecord],
    ratio_by_pair: Mapping[str, float],
) -> list[CurvePoint]:
    """One point per pair, sorted by ratio. Order of records is irrelevant."""
    tallies: dict[str, dict] = {}
    for rec in records:
        if rec.is_sanity_check:
            continue
        t = tallies.setdefault(
            rec.pair_id,
            {"content": rec.content_id, "arm": rec.txt2vid_arm, "n": 0, "yes": 0},
        )
        t["n"] += 1
        if rec.vote == "txt2vid":
            t["yes"] += 1
    points = []
    for pair_id in sorted(tallies):
        t = tallies[pair_id]
        if pair_id not in ratio_by_pair:
            raise UnjoinedPair(f"no bitrate ratio for pair {pair_id!r}")
        low, high = wilson_interval(t["yes"], t["n"])
        points.append(
            CurvePoint(
                pair_id=pair_id,
                content_id=t["content"],
                txt2vid_arm=t["arm"],
                bitrate_ratio=float(ratio_by_pair[pair_id]),
                pct_prefer_txt2vid=100.0 * t["yes"] / t["n"],
                n_votes=t["n"],
                votes_txt2vid=t["yes"],
                ci_low=100.0 * low,
                ci_high=100.0 * high,
            )
        )
    points.sort(key=lambda p: (p.content_id, p.txt2vid_arm, p.bitrate_ratio))
    return points


def crossing_ratio(points: list[CurvePoint], level: float = 50.0) -> float | None:
    """Ratio at which preference crosses ``level``, log-linear interpolation.

    Points are taken in ratio order; the first straddling interval wins. An
    exact hit returns that point's ratio. None when the curve never crosses.
    """
    pts = sorted(points, key=lambda p: p.bitrate_ratio)
    for a, b in zip(pts, pts[1:]):
        pa, pb = a.pct_prefer_txt2vid, b.pct_prefer_txt2vid
        if pa == level:
            return a.bitrate_ratio
        if (pa - level) * (pb - level) < 0:
            la, lb = math.log(a.bitrate_ratio), math.log(b.bitrate_ratio)
            frac = (level - pa) / (pb - pa)
            return math.exp(la + frac * (lb - la))
    if pts and pts[-1].pct_prefer_txt2vid == level:
        return pts[-1].bitrate_ratio
    return None


def crossings_by_content(
    points: list[CurvePoint], level: float = 50.0
) -> dict[tuple[str, str], float | None]:
    """(content_id, txt2vid_arm) -> crossing ratio."""
    groups: dict[tuple[str, str], list[CurvePoint]] = {}
    for p in points:
        groups.setdefault((p.content_id, p.txt2vid_arm), []).append(p)
    return {key: crossing_ratio(pts, level) for key, pts in sorted(groups.items())}


CURVE_COLUMNS = [
    "pair_id",
    "content_id",
    "txt2vid_arm",
    "bitrate_ratio",
    "pct_prefer_txt2vid",
    "n_votes",
    "votes_txt2vid",
    "ci_low",
    "ci_high",
]


def write_curve_csv(path: str | Path, points: list[CurvePoint]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVE_COLUMNS)
        for p in points:
            writer.writerow([getattr(p, c) for c in CURVE_COLUMNS])


def write_curve_json(path: str | Path, points: list[CurvePoint]) -> None:
    payload = [{c: getattr(p, c) for c in CURVE_COLUMNS} for p in points]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def write_plot_data(path: str | Path, points: list[CurvePoint]) -> None:
    """Whitespace-separated columns, one block per (content, arm): directly
    plottable (gnuplot `plot ... index N`, or vega-lite after a csv parse)."""
    groups: dict[tuple[str, str], list[CurvePoint]] = {}
    for p in points:
        groups.setdefault((p.content_id, p.txt2vid_arm), []).append(p)
    lines = ["# ratio pct ci_low ci_high  (blocks per content/arm)"]
    for (content, arm), pts in sorted(groups.items()):
        lines.append(f"# {content} {arm}")
        for p in sorted(pts, key=lambda q: q.bitrate_ratio):
            lines.append(
                f"{p.bitrate_ratio:.6g} {p.pct_prefer_txt2vid:.4f} {p.ci_low:.4f} {p.ci_high:.4f}"
            )
        lines.append("")
    Path(path).write_text("\n".join(lines), encoding="utf-8")

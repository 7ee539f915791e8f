"""Pairwise preference vote ingestion and participant sanity filtering.

CSV schema v1 (exact header required):

    participant_id,content_id,pair_id,codec_arm,txt2vid_arm,vote,is_sanity_check,sanity_expected

vote and sanity_expected take "txt2vid" or "codec"; txt2vid_arm is
"resemble_audio" or "original_audio"; is_sanity_check is 0/1. One vote per
(participant, pair). sanity_expected may be empty when a sanity pair has no
defined answer on record.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

SCHEMA_V1 = [
    "participant_id",
    "content_id",
    "pair_id",
    "codec_arm",
    "txt2vid_arm",
    "vote",
    "is_sanity_check",
    "sanity_expected",
]

VOTE_VALUES = {"txt2vid", "codec"}
ARM_VALUES = {"resemble_audio", "original_audio"}


class SchemaMismatch(Exception):
    pass


class DuplicateVote(Exception):
    def __init__(self, rows: list[int]):
        self.rows = rows
        super().__init__(f"duplicate (participant, pair) votes at rows {rows}")


class RowErrors(Exception):
    def __init__(self, errors: list[tuple[int, str]]):
        self.errors = errors
        super().__init__("; ".join(f"row {r}: {msg}" for r, msg in errors[:5]))


@dataclass(frozen=True)
class PreferenceRecord:
    participant_id: str
    content_id: str
    pair_id: str
    codec_arm: str
    txt2vid_arm: str
    vote: str
    is_sanity_check: bool
    sanity_expected: str = ""


def load_votes(path: str | Path) -> list[PreferenceRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return []
        if header != SCHEMA_V1:
            raise SchemaMismatch(f"expected header {SCHEMA_V1}, got {header}")
        records: list[PreferenceRecord] = []
        errors: list[tuple[int, str]] = []
        seen: dict[tuple[str, str], int] = {}
        duplicates: list[int] = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(SCHEMA_V1):
                errors.append((row_no, f"{len(row)} columns"))
                continue
            rec = PreferenceRecord(
                participant_id=row[0],
                content_id=row[1],
                pair_id=row[2],
                codec_arm=row[3],
                txt2vid_arm=row[4],
                vote=row[5],
                is_sanity_check=row[6] in ("1", "true", "True"),
                sanity_expected=row[7],
            )
            if rec.vote not in VOTE_VALUES:
                errors.append((row_no, f"bad vote {rec.vote!r}"))
                continue
            if rec.txt2vid_arm not in ARM_VALUES:
                errors.append((row_no, f"bad txt2vid_arm {rec.txt2vid_arm!r}"))
                continue
            key = (rec.participant_id, rec.pair_id)
            if key in seen:
                duplicates.extend([seen[key], row_no])
                continue
            seen[key] = row_no
            records.append(rec)
    if duplicates:
        raise DuplicateVote(sorted(set(duplicates)))
    if errors:
        raise RowErrors(errors)
    return records


@dataclass
class SanityReport:
    kept_participants: list[str]
    excluded_participants: list[str]
    kept_records: list[PreferenceRecord]
    failures: dict[str, int]
    warnings: list[str]


def filter_sanity(
    records: Iterable[PreferenceRecord], max_failures: int = 1
) -> SanityReport:
    """Exclude participants failing more than ``max_failures`` sanity pairs.

    Sanity pairs without a recorded expected answer cannot be scored; if none
    are scorable the filter passes everyone through with a warning.
    """
    records = list(records)
    failures: dict[str, int] = {}
    scorable = 0
    for rec in records:
        if not rec.is_sanity_check:
            continue
        if not rec.sanity_expected:
            continue
        scorable += 1
        if rec.vote != rec.sanity_expected:
            failures[rec.participant_id] = failures.get(rec.participant_id, 0) + 1
    warnings = []
    if scorable == 0 and any(r.is_sanity_check for r in records):
        warnings.append("sanity pairs present but none carry an expected answer; no exclusions")
    participants = sorted({r.participant_id for r in records})
    excluded = sorted(p for p, n in failures.items() if n > max_failures)
    kept = [p for p in participants if p not in excluded]
    kept_records = [r for r in records if r.participant_id not in excluded]
    return SanityReport(kept, excluded, kept_records, failures, warnings)


def write_votes(path: str | Path, records: Iterable[PreferenceRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCHEMA_V1)
        for r in records:
            writer.writerow(
                [
                    r.participant_id,
                    r.content_id,
                    r.pair_id,
                    r.codec_arm,
                    r.txt2vid_arm,
                    r.vote,
                    int(r.is_sanity_check),
                    r.sanity_expected,
                ]
            )

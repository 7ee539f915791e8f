"""Shape-parameterized synthetic vote sets.

The original preference study is not reproducible (its participants and
recordings are gone), so analysis correctness is exercised on synthetic vote
sets with a controlled shape: preference follows a logistic in log-ratio
with a configurable 50% crossing, and each pair gets a deterministic vote
split of round(n * p). Ratios come from the published average bitrates of
the benchmark grid against a nominal text bitrate (85 bps) or, for the
original-audio arm, a nominal 10 kbps audio track.
"""

from __future__ import annotations

import math

from txt2vid.bench.grid import REFERENCE_AVG_KBPS, table1_grid
from txt2vid.study.votes import PreferenceRecord

SHAPES = {
    # shape: (video_codec rows used, txt2vid arm, denominator bps, default r50)
    "h264": ("h264", "resemble_audio", 85.0, 1000.0),
    "av1": ("av1", "resemble_audio", 85.0, 200.0),
    "h264_original_audio": ("h264", "original_audio", 10_000.0, 5.0),
    "av1_original_audio": ("av1", "original_audio", 10_000.0, 1.7),
}


def synthetic_ratio_map(shape: str, content_id: str = "content1") -> dict[str, float]:
    codec, arm, denom_bps, _r50 = SHAPES[shape]
    ratios = {}
    for params in table1_grid():
        if params.video_codec != codec:
            continue
        kbps = REFERENCE_AVG_KBPS[params.key]
        pair_id = f"{content_id}|{params.key}|{arm}"
        ratios[pair_id] = kbps * 1000.0 / denom_bps
    return ratios


def synthetic_votes(
    shape: str,
    n_per_pair: int = 40,
    r50: float | None = None,
    steepness: float = 2.0,
    content_id: str = "content1",
    sanity_failers: tuple[str, ...] = (),
) -> list[PreferenceRecord]:
    """Deterministic votes whose preference curve crosses 50% at ``r50``.

    ``sanity_failers`` lists participant ids that answer every sanity pair
    wrong (for exercising the exclusion filter).
    """
    codec, arm, _denom, default_r50 = SHAPES[shape]
    r50 = default_r50 if r50 is None else r50
    ratios = synthetic_ratio_map(shape, content_id)
    participants = [f"p{i:03d}" for i in range(n_per_pair)]
    records = []
    for pair_id, ratio in sorted(ratios.items()):
        p = 1.0 / (1.0 + math.exp(steepness * (math.log(ratio) - math.log(r50))))
        yes = round(n_per_pair * p)
        for i, participant in enumerate(participants):
            records.append(
                PreferenceRecord(
                    participant_id=participant,
                    content_id=content_id,
                    pair_id=pair_id,
                    codec_arm=pair_id.split("|")[1],
                    txt2vid_arm=arm,
                    vote="txt2vid" if i < yes else "codec",
                    is_sanity_check=False,
                )
            )
    # three sanity pairs per participant, expected answer "codec"
    for k in range(3):
        pair_id = f"{content_id}|sanity{k}|{arm}"
        for participant in participants:
            fails = participant in sanity_failers
            records.append(
                PreferenceRecord(
                    participant_id=participant,
                    content_id=content_id,
                    pair_id=pair_id,
                    codec_arm=f"sanity{k}",
                    txt2vid_arm=arm,
                    vote="txt2vid" if fails else "codec",
                    is_sanity_check=True,
                    sanity_expected="codec",
                )
            )
    return records

"""The benchmark parameter grid and its published reference bitrates.

Seven video settings (four H.264, three AV1), each paired with AAC at 5 and
10 kbps: 14 encodings per content. ``REFERENCE_AVG_KBPS`` carries the
published average combined bitrates for these exact rows, used for ratio
reports when no local measurement exists; locally measured bitrates are
content-dependent and will differ.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CodecParams:
    video_codec: str  # "h264" | "av1"
    crf: int
    ds_video: int  # resolution downsampling factor: 1, 2, 4
    audio_codec: str = "aac"
    audio_br_kbps: int = 5
    ds_audio: int = 1  # sample-rate downsampling factor: 1, 2

    def __post_init__(self) -> None:
        if self.video_codec not in ("h264", "av1"):
            raise ValueError(f"unknown video codec {self.video_codec!r}")
        if self.ds_video not in (1, 2, 4):
            raise ValueError("ds_video must be 1, 2 or 4")
        if self.ds_audio not in (1, 2):
            raise ValueError("ds_audio must be 1 or 2")

    @property
    def key(self) -> str:
        return (
            f"{self.video_codec}-crf{self.crf}-ds{self.ds_video}"
            f"-{self.audio_codec}{self.audio_br_kbps}k-dsa{self.ds_audio}"
        )

    # encode targets (before downsampling): 720p, 25 fps, yuv420p, 16 kHz
    @property
    def width(self) -> int:
        return 1280 // self.ds_video

    @property
    def height(self) -> int:
        return 720 // self.ds_video

    @property
    def sample_rate(self) -> int:
        return 16000 // self.ds_audio


# (video_codec, crf, ds_video) in published row order, with the published
# average combined kbps for the 5 kbps and 10 kbps audio variants.
_TABLE1_VIDEO_ROWS = [
    ("h264", 32, 4, (17.5, 22.5)),
    ("h264", 30, 2, (55.1, 60.1)),
    ("h264", 28, 2, (79.8, 84.8)),
    ("h264", 26, 2, (124.1, 129.1)),
    ("av1", 63, 2, (13.8, 18.8)),
    ("av1", 63, 1, (16.0, 21.0)),
    ("av1", 60, 2, (20.3, 25.3)),
]


def table1_grid() -> list[CodecParams]:
    grid = []
    for codec, crf, ds, _ref in _TABLE1_VIDEO_ROWS:
        for br in (5, 10):
            grid.append(CodecParams(codec, crf, ds, "aac", br, 1))
    return grid


REFERENCE_AVG_KBPS: dict[str, float] = {
    CodecParams(codec, crf, ds, "aac", br, 1).key: ref
    for codec, crf, ds, refs in _TABLE1_VIDEO_ROWS
    for br, ref in zip((5, 10), refs)
}

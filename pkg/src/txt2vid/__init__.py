"""txt2vid: transmit talking-head sessions as compressed text.

Subpackages:
    wire       framing, payload layouts, session state machine
    textcodec  transcript segmentation, compression, bitrate accounting
    pipeline   receiver-side jitter buffering, chunking, pacing, muxing
    backend    synthesis backend protocol plus the procedural mock
    bench      codec benchmark harness (external transcoder sweeps)
    study      pairwise-preference study analysis
    gateway    network service tying the stack together
"""

__version__ = "0.1.0"

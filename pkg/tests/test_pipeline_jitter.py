"""Jitter buffer: ordering, gaps, duplicates — all on explicit timestamps."""

from txt2vid.pipeline.jitter import BufferedSegment, GapMarker, JitterBuffer


def test_in_order_passthrough_bounded_delay():
    buf = JitterBuffer(500)
    out = []
    for seq in range(5):
        arrival = seq * 1000
        buf.push(seq, capture_ts_ms=seq * 1000, payload=f"s{seq}", arrival_ms=arrival)
        out.extend(buf.poll(arrival + 500))
    assert [o.seq for o in out] == list(range(5))
    for o in out:
        assert o.release_ms - o.arrival_ms <= 500


def test_reorder_is_corrected():
    buf = JitterBuffer(1000)
    buf.push(0, 0, "a", arrival_ms=0)
    buf.push(2, 2000, "c", arrival_ms=2000)
    buf.push(1, 1000, "b", arrival_ms=2100)  # late but within horizon
    released = buf.poll(4000)
    assert [r.seq for r in released] == [0, 1, 2]
    assert all(isinstance(r, BufferedSegment) for r in released)


def test_missing_seq_becomes_gap_when_successor_due():
    buf = JitterBuffer(500)
    buf.push(0, 0, "a", arrival_ms=0)
    buf.push(2, 2000, "c", arrival_ms=2000)
    assert [r.seq for r in buf.poll(500)] == [0]
    # nothing due yet at 2000: seq 2 releases at 2500 on the playout timeline
    assert buf.poll(2000) == []
    released = buf.poll(2500)
    assert [type(r).__name__ for r in released] == ["GapMarker", "BufferedSegment"]
    assert released[0].seq == 1
    # straggler arrives after its slot was declared a gap -> dropped
    buf.push(1, 1000, "b", arrival_ms=2600)
    assert buf.poll(9999) == []
    assert buf.late_dropped == 1


def test_duplicates_dropped():
    buf = JitterBuffer(100)
    buf.push(0, 0, "a", arrival_ms=0)
    buf.push(0, 0, "a-again", arrival_ms=10)
    assert [r.seq for r in buf.poll(1000)] == [0]
    buf.push(0, 0, "a-later", arrival_ms=2000)
    assert buf.poll(3000) == []
    assert buf.duplicates_dropped == 1
    assert buf.late_dropped == 1


def test_release_never_before_arrival():
    buf = JitterBuffer(100)
    buf.push(0, 0, "a", arrival_ms=0)
    buf.push(1, 10, "b", arrival_ms=5000)  # captured early, arrived very late
    first = buf.poll(100)
    assert [r.seq for r in first] == [0]
    assert buf.poll(4999) == []
    assert [r.seq for r in buf.poll(5000)] == [1]


def test_flush_fills_holes():
    buf = JitterBuffer(500)
    buf.push(0, 0, "a", arrival_ms=0)
    buf.push(3, 3000, "d", arrival_ms=3000)
    drained = buf.poll(500) + buf.flush(600)
    kinds = [(type(r).__name__, r.seq) for r in drained]
    assert kinds == [
        ("BufferedSegment", 0),
        ("GapMarker", 1),
        ("GapMarker", 2),
        ("BufferedSegment", 3),
    ]
    assert len(buf) == 0


def test_next_due_tracks_head_and_gaps():
    buf = JitterBuffer(500)
    assert buf.next_due_ms() is None
    buf.push(0, 0, "a", arrival_ms=0)
    assert buf.next_due_ms() == 500
    buf.poll(500)
    buf.push(2, 2000, "c", arrival_ms=2000)
    # head (seq 1) missing: due when the held successor comes due
    assert buf.next_due_ms() == 2500

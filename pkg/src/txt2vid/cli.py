"""Command-line interface.

Two entry points: ``txt2vid`` (codec, pipeline, gateway, study tooling) and
``bench`` (the transcoder sweep harness). Rate reports always show both
accounting policies so the wire-cost number is never hidden behind the
payload-only one.
"""

from __future__ import annotations

import asyncio
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from txt2vid.datafiles import bundled_transcripts
from txt2vid.study.synthetic import SHAPES
from txt2vid.media import gradient_frames
from txt2vid.textcodec import (
    CompressorId,
    FixedLengthStrategy,
    SentenceStrategy,
    bitrate_both_policies,
    build_trace,
    segment_transcript,
)
from txt2vid.wire import payloads


@click.group()
def main() -> None:
    """Talking-head sessions as compressed text."""


# -- bitrate ---------------------------------------------------------------


def _load_transcript_text(transcript: str | None, bundled: str | None) -> tuple[str, int]:
    if bundled:
        for t in bundled_transcripts():
            if t.name == bundled:
                return t.text, t.nominal_duration_ms
        raise click.ClickException(
            f"unknown bundled transcript {bundled!r}; have "
            + ", ".join(t.name for t in bundled_transcripts())
        )
    if not transcript:
        raise click.ClickException("need --transcript FILE or --bundled NAME")
    return Path(transcript).read_text("utf-8"), 0


@main.command()
@click.option("--transcript", type=click.Path(exists=True), help="UTF-8 transcript file")
@click.option("--bundled", help="bundled sample name (gettysburg, declaration, alice)")
@click.option("--duration-s", type=float, default=None, help="speech duration in seconds")
@click.option("--compressor", type=int, default=int(CompressorId.BZIP2), show_default=True)
@click.option("--max-chars", type=int, default=None, help="fixed-length segmentation instead of sentences")
@click.option("--timing", type=click.Path(exists=True), help="seq,start_ms,end_ms sidecar CSV")
def bitrate(transcript, bundled, duration_s, compressor, max_chars, timing):
    """Rate a transcript: payload-only and payload+framing bps."""
    text, nominal_ms = _load_transcript_text(transcript, bundled)
    duration_ms = int(duration_s * 1000) if duration_s else nominal_ms
    if not duration_ms:
        raise click.ClickException("no duration: pass --duration-s (or use --bundled)")
    strategy = FixedLengthStrategy(max_chars) if max_chars else SentenceStrategy()
    t = segment_transcript(text, strategy, total_duration_ms=duration_ms)
    if timing:
        from txt2vid.textcodec import apply_timing, read_timing_csv

        t = apply_timing(t, read_timing_csv(timing))
    profile = payloads.SessionProfile(
        user_id=1, voice_profile_ref="default", container_tag=b"RAW0", driving_video=b"\x00"
    )
    ts = 0
    segments = []
    for seg in t.segments:
        ts += seg.speech_duration_ms
        segments.append((ts, seg.text))
    trace = build_trace(1, profile, segments, compressor, end_ts_ms=duration_ms)
    reports = bitrate_both_policies(trace)
    click.echo(
        json.dumps(
            {
                "segments": len(t.segments),
                "payload_only": json.loads(reports["payload_only"].to_json()),
                "payload_plus_framing": json.loads(reports["payload_plus_framing"].to_json()),
            },
            indent=2,
        )
    )


# -- decode (FILE mode) ------------------------------------------------------


@main.command()
@click.option("--transcript", type=click.Path(exists=True), help="UTF-8 transcript file")
@click.option("--bundled", help="bundled sample name")
@click.option("--out", required=True, type=click.Path(), help="output .avi (built-in) or .mp4 (muxer)")
@click.option("--size", default="320x180", show_default=True, help="driving-frame geometry WxH")
@click.option("--fps", type=int, default=25, show_default=True)
@click.option("--profile-frames", type=int, default=8, show_default=True)
@click.option("--backend-cmd", default=None, help="external backend command (default: in-process)")
def decode(transcript, bundled, out, size, fps, profile_frames, backend_cmd):
    """Offline FILE mode: transcript in, playable container out."""
    from txt2vid.pipeline import (
        FileSink,
        Mode,
        MockSessionBackend,
        PipelineConfig,
        RemoteSessionBackend,
        run_pipeline,
        schedule_transcript,
    )

    text, nominal_ms = _load_transcript_text(transcript, bundled)
    t = segment_transcript(text, SentenceStrategy())
    # mock speech rate: durations proportional to length at 15 chars/s
    t = segment_transcript(text, SentenceStrategy(), total_duration_ms=len(t.text) * 1000 // 15)
    width, height = (int(v) for v in size.lower().split("x"))
    profile = gradient_frames(profile_frames, width, height, seed=11)
    if backend_cmd:
        from txt2vid.backend.protocol import spawn_stdio

        client = spawn_stdio(backend_cmd.split())
        backend = RemoteSessionBackend(client, profile)
    else:
        backend = MockSessionBackend(profile)
    events = schedule_transcript(t, int(CompressorId.BZIP2))
    sink = FileSink(out, fps=fps)
    stats = run_pipeline(events, backend, sink, PipelineConfig(mode=Mode.FILE, fps=fps))
    if backend_cmd:
        client.shutdown()
        client.close()
    click.echo(json.dumps({"out": str(out), **stats.summary()}, indent=2))


# -- wire sender ------------------------------------------------------------


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, required=True)
@click.option("--transcript", type=click.Path(exists=True))
@click.option("--bundled", help="bundled sample name")
@click.option("--user-id", type=int, default=1, show_default=True)
@click.option("--session-id", type=int, default=1, show_default=True)
@click.option("--voice", default="default", show_default=True)
@click.option("--size", default="320x180", show_default=True, help="synthetic driving-frame geometry")
@click.option("--realtime/--burst", default=False, help="pace segments on their capture timestamps")
def send(host, port, transcript, bundled, user_id, session_id, voice, size, realtime):
    """Stream a transcript to a gateway over the wire protocol."""
    text, nominal_ms = _load_transcript_text(transcript, bundled)
    t = segment_transcript(text, SentenceStrategy())
    duration_ms = nominal_ms or len(t.text) * 1000 // 15
    t = segment_transcript(text, SentenceStrategy(), total_duration_ms=duration_ms)
    width, height = (int(v) for v in size.lower().split("x"))
    profile = payloads.SessionProfile(
        user_id=user_id,
        voice_profile_ref=voice,
        container_tag=b"RAW0",
        driving_video=gradient_frames(8, width, height, seed=11).encode(),
    )
    asyncio.run(_send_session(host, port, t, profile, session_id, realtime))


async def _send_session(host, port, transcript, profile, session_id, realtime):
    from txt2vid.textcodec.compress import compress_text
    from txt2vid.wire.frames import Deframer, MessageType, encode_frame

    reader, writer = await asyncio.open_connection(host, port)
    deframer = Deframer()

    async def expect(msg_type):
        while True:
            data = await reader.read(65536)
            if not data:
                raise click.ClickException("connection closed by gateway")
            for event in deframer.feed(data):
                if event.error is not None:
                    raise click.ClickException(f"frame error: {event.error!r}")
                if event.frame.msg_type == MessageType.PROTOCOL_ERROR:
                    code, msg = payloads.decode_protocol_error(event.frame.payload)
                    raise click.ClickException(f"gateway rejected: [{code}] {msg}")
                if event.frame.msg_type == msg_type:
                    return event.frame.payload

    writer.write(encode_frame(MessageType.HELLO, payloads.encode_hello(session_id)))
    await writer.drain()
    await expect(MessageType.HELLO_ACK)
    writer.write(encode_frame(MessageType.REGISTER_PROFILE, profile.encode()))
    await writer.drain()
    _, replaced = payloads.decode_profile_ack(await expect(MessageType.PROFILE_ACK))
    click.echo(f"profile {profile.user_id} registered (replaced={replaced})")
    ts = 0
    for seq, seg in enumerate(transcript.segments):
        ts += seg.speech_duration_ms
        if realtime:
            await asyncio.sleep(seg.speech_duration_ms / 1000)
        payload = payloads.TextSegmentPayload(
            session_id=session_id,
            seq=seq,
            capture_ts_ms=ts,
            user_id=profile.user_id,
            compressor_id=int(CompressorId.BZIP2),
            body=compress_text(seg.text, CompressorId.BZIP2),
        )
        writer.write(encode_frame(MessageType.TEXT_SEGMENT, payload.encode()))
        await writer.drain()
        click.echo(f"sent seq {seq} ({len(payload.body)} compressed bytes)")
    writer.write(
        encode_frame(
            MessageType.SESSION_END,
            payloads.encode_session_end(max(ts, transcript.total_duration_ms)),
        )
    )
    await writer.drain()
    writer.close()
    click.echo("session ended")


# -- gateway / backend -------------------------------------------------------


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), help="JSON config file")
@click.option("--protocol-port", type=int, default=None)
@click.option("--ui-port", type=int, default=None)
@click.option("--playback-port", type=int, default=None)
@click.option("--profile-dir", type=click.Path(), default=None)
@click.option("--ui-token", default=None)
@click.option("--ports-file", type=click.Path(), default=None,
              help="write bound ports as JSON (useful with port 0)")
def gateway(config_path, protocol_port, ui_port, playback_port, profile_dir, ui_token, ports_file):
    """Run the network gateway (wire TCP + UI websocket + HTTP playback)."""
    from txt2vid.gateway import GatewayConfig, run_gateway

    if config_path:
        config = GatewayConfig.from_file(config_path)
    else:
        config = GatewayConfig()
    overrides = {
        "protocol_port": protocol_port,
        "ui_port": ui_port,
        "playback_port": playback_port,
        "profile_dir": profile_dir,
        "ui_token": ui_token,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(config, name, value)
    try:
        asyncio.run(run_gateway(config, ports_file=ports_file))
    except KeyboardInterrupt:
        pass


@main.command()
@click.option("--stdio", is_flag=True, default=True, help="serve on stdin/stdout (default)")
@click.option("--tcp-port", type=int, default=None)
def backend(stdio, tcp_port):
    """Run the procedural synthesis backend."""
    from txt2vid.backend.server import serve_stdio, serve_tcp

    if tcp_port:
        serve_tcp("127.0.0.1", tcp_port)
    else:
        serve_stdio()


# -- study -------------------------------------------------------------------


@main.group()
def study() -> None:
    """Preference study analysis."""


@study.command("synth")
@click.option("--shape", type=click.Choice(sorted(SHAPES)), default="h264")
@click.option("--n-per-pair", type=int, default=40, show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--ratios-out", type=click.Path(), help="write the pair->ratio join table")
def study_synth(shape, n_per_pair, out, ratios_out):
    """Generate a shape-parameterized synthetic vote set."""
    from txt2vid.study import synthetic_ratio_map, synthetic_votes, write_votes

    records = synthetic_votes(shape, n_per_pair=n_per_pair)
    write_votes(out, records)
    if ratios_out:
        Path(ratios_out).write_text(json.dumps(synthetic_ratio_map(shape), indent=2))
    click.echo(f"wrote {len(records)} votes to {out}")


@study.command("curve")
@click.option("--votes", required=True, type=click.Path(exists=True))
@click.option("--ratios", type=click.Path(exists=True), help="JSON {pair_id: bitrate_ratio}")
@click.option("--shape", help="use a synthetic shape's ratio table instead of --ratios")
@click.option("--out", type=click.Path(), help="curve CSV/JSON output")
@click.option("--plot-data", type=click.Path(), help="gnuplot-style data file")
@click.option("--max-sanity-failures", type=int, default=1, show_default=True)
def study_curve(votes, ratios, shape, out, plot_data, max_sanity_failures):
    """Preference curve + 50% crossings from a vote CSV."""
    from txt2vid.study import (
        crossings_by_content,
        filter_sanity,
        load_votes,
        preference_curve,
        synthetic_ratio_map,
        write_curve_csv,
        write_curve_json,
        write_plot_data,
    )

    records = load_votes(votes)
    report = filter_sanity(records, max_failures=max_sanity_failures)
    for warning in report.warnings:
        click.echo(f"warning: {warning}", err=True)
    if report.excluded_participants:
        click.echo(f"excluded participants: {', '.join(report.excluded_participants)}", err=True)
    if shape:
        ratio_map = synthetic_ratio_map(shape)
    elif ratios:
        ratio_map = json.loads(Path(ratios).read_text("utf-8"))
    else:
        raise click.ClickException("need --ratios or --shape")
    points = preference_curve(report.kept_records, ratio_map)
    for point in points:
        click.echo(
            f"{point.pair_id}: ratio {point.bitrate_ratio:.1f} -> "
            f"{point.pct_prefer_txt2vid:.1f}% [{point.ci_low:.1f}, {point.ci_high:.1f}] (n={point.n_votes})"
        )
    for (content, arm), crossing in crossings_by_content(points).items():
        shown = f"{crossing:.1f}x" if crossing else "none"
        click.echo(f"50% crossing for {content}/{arm}: {shown}")
    if out:
        writer = write_curve_json if str(out).endswith(".json") else write_curve_csv
        writer(out, points)
    if plot_data:
        write_plot_data(plot_data, points)


# -- bench (also exposed as the standalone `bench` entry point) ----------------


@main.group(name="bench")
def bench() -> None:
    """Codec benchmark harness (external transcoder required for `run`)."""


@bench.command("run")
@click.option("--input", "input_spec", required=True, help="AV file path, or 'synthetic'")
@click.option("--grid", type=click.Choice(["table1"]), default="table1", show_default=True)
@click.option("--out", required=True, type=click.Path(), help="matrix output (.csv or .json)")
@click.option("--transcoder-path", type=click.Path(exists=True), default=None)
@click.option("--jobs", type=int, default=2, show_default=True)
@click.option("--txt2vid-bps", type=float, default=None, help="fill the ratio column")
@click.option("--duration", type=float, default=6.0, show_default=True, help="synthetic clip seconds")
def bench_run(input_spec, grid, out, transcoder_path, jobs, txt2vid_bps, duration):
    """Encode the parameter grid against a clip and emit the matrix."""
    import tempfile

    from txt2vid.bench import (
        BenchmarkMatrix,
        EncodeFailed,
        TranscoderMissing,
        emit_matrix,
        encode_benchmark,
        find_transcoder,
        generate_clip,
        table1_grid,
    )

    try:
        transcoder = find_transcoder(transcoder_path)
    except TranscoderMissing as exc:
        raise click.ClickException(str(exc))
    with tempfile.TemporaryDirectory(prefix="bench-") as workdir:
        if input_spec == "synthetic":
            clip = generate_clip(Path(workdir) / "synthetic.mp4", transcoder, duration_s=duration)
        else:
            clip = Path(input_spec)
            if not clip.exists():
                raise click.ClickException(f"input {clip} not found")
        rows = table1_grid()
        failures = []

        def one(params):
            try:
                return encode_benchmark(clip, params, transcoder, workdir=workdir)
            except EncodeFailed as exc:
                failures.append((params.key, str(exc)))
                return None

        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            results = [r for r in pool.map(one, rows) if r is not None]
        matrix = BenchmarkMatrix(
            results=results,
            txt2vid_bps=txt2vid_bps,
            metadata={"transcoder": transcoder.version, "input": str(clip), "grid": grid},
        )
        emit_matrix(matrix, out)
    for params_key, error in failures:
        click.echo(f"FAILED {params_key}: {error}", err=True)
    skipped = matrix.skipped_rows
    for result in matrix.results:
        state = "skipped" if result.skipped else f"{result.total_bps / 1000:.1f} kbps"
        click.echo(f"{result.content_id} {result.params.key}: {state}")
    click.echo(f"matrix written to {out} ({len(matrix.results)} rows, {skipped} skipped)")
    if failures:
        sys.exit(1)
    if skipped:
        sys.exit(2)


@bench.command("ratios")
@click.option("--matrix", "matrix_path", type=click.Path(exists=True), help="matrix from `bench run`")
@click.option("--table1-reference", is_flag=True, help="use the published per-row averages")
@click.option("--txt2vid-bps", type=float, required=True)
@click.option("--out", type=click.Path(), help="write the ratio table as JSON")
def bench_ratios(matrix_path, table1_reference, txt2vid_bps, out):
    """Codec/text bitrate ratios from a matrix or the published averages."""
    from txt2vid.bench import load_matrix_rows, ratio_report, reference_ratio_report

    if table1_reference:
        report = reference_ratio_report(txt2vid_bps)
    elif matrix_path:
        report = ratio_report(load_matrix_rows(matrix_path), txt2vid_bps)
    else:
        raise click.ClickException("need --matrix or --table1-reference")
    if not report:
        raise click.ClickException("no usable rows in matrix")
    for row in report:
        click.echo(
            f"{row['content_id']} {row['params']}: {row['total_bps'] / 1000:.1f} kbps "
            f"/ {txt2vid_bps:g} bps = {row['ratio']:.1f}x"
        )
    ratios = [row["ratio"] for row in report]
    click.echo(f"range: {min(ratios):.3g}x - {max(ratios):.3g}x over {len(ratios)} rows")
    if out:
        Path(out).write_text(json.dumps(report, indent=2))

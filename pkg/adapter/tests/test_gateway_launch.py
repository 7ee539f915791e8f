"""The gateway's backend launch spec can point at this adapter."""

import asyncio
import sys

from txt2vid.gateway.config import GatewayConfig
from txt2vid.gateway.service import Gateway
from txt2vid.media import gradient_frames
from txt2vid.pipeline.runner import Mode
from txt2vid.textcodec.compress import CompressorId, compress_text
from txt2vid.wire import payloads
from txt2vid.wire.frames import Deframer, MessageType, encode_frame


def test_gateway_runs_on_adapter_backend(tmp_path):
    async def scenario():
        config = GatewayConfig(
            protocol_port=0,
            ui_port=0,
            playback_port=0,
            profile_dir=tmp_path / "profiles",
            backend_cmd=[sys.executable, "-m", "txt2vid_adapter", "--stdio"],
            default_mode=Mode.FILE,
        )
        gateway = Gateway(config)
        await gateway.start()
        try:
            reader, writer = await asyncio.open_connection("127.0.0.1", gateway.protocol_port)
            deframer = Deframer()

            async def expect(msg_type):
                while True:
                    data = await asyncio.wait_for(reader.read(65536), timeout=15)
                    assert data
                    for event in deframer.feed(data):
                        assert event.frame is not None
                        if event.frame.msg_type == msg_type:
                            return event.frame.payload

            writer.write(encode_frame(MessageType.HELLO, payloads.encode_hello(1)))
            await writer.drain()
            await expect(MessageType.HELLO_ACK)
            profile = payloads.SessionProfile(
                user_id=3,
                voice_profile_ref="default",
                container_tag=b"RAW0",
                driving_video=gradient_frames(2, 32, 24, seed=5).encode(),
            )
            writer.write(encode_frame(MessageType.REGISTER_PROFILE, profile.encode()))
            await writer.drain()
            await expect(MessageType.PROFILE_ACK)
            segment = payloads.TextSegmentPayload(
                1, 0, 1000, 3, int(CompressorId.BZIP2),
                compress_text("fifteen chars!!", CompressorId.BZIP2),
            )
            writer.write(encode_frame(MessageType.TEXT_SEGMENT, segment.encode()))
            writer.write(encode_frame(MessageType.SESSION_END, payloads.encode_session_end(1000)))
            await writer.drain()
            session = gateway.sessions[1]
            for _ in range(300):
                if session.pacer.frames_emitted >= 25:
                    break
                await asyncio.sleep(0.05)
            assert session.pacer.frames_emitted == 25
            writer.close()
        finally:
            await gateway.stop()

    asyncio.run(asyncio.wait_for(scenario(), timeout=60))

import { describe, expect, it } from "vitest";

import type { DecodedImage, DrawTarget, FrameDecoder } from "../src/player.js";
import { FramePlayer } from "../src/player.js";

class StubDecoder implements FrameDecoder {
  failOn = new Set<string>();
  decode(jpegB64: string): Promise<DecodedImage> {
    if (this.failOn.has(jpegB64)) return Promise.reject(new Error("bad jpeg"));
    return Promise.resolve({ width: 4, height: 4, source: jpegB64 });
  }
}

class StubTarget implements DrawTarget {
  drawn: number[] = [];
  draw(_image: DecodedImage, ptsMs: number): void {
    this.drawn.push(ptsMs);
  }
}

function player(clock: { now: number }) {
  const target = new StubTarget();
  const decoder = new StubDecoder();
  const p = new FramePlayer(target, decoder, () => clock.now, 25);
  return { p, target, decoder };
}

function frame(pts: number, payload = `jpeg-${pts}`) {
  return { type: "frame" as const, pts_ms: pts, jpeg_b64: payload };
}

describe("FramePlayer", () => {
  it("draws frames no earlier than their pts", async () => {
    const clock = { now: 1000 };
    const { p, target } = player(clock);
    await p.onFrame(frame(0));
    await p.onFrame(frame(40));
    p.tick();
    expect(target.drawn).toEqual([0]); // 40 ms frame is not due yet
    clock.now = 1040;
    p.tick();
    expect(target.drawn).toEqual([0, 40]);
  });

  it("steady 25 fps playback draws everything on an idle clock", async () => {
    const clock = { now: 0 };
    const { p, target } = player(clock);
    for (let i = 0; i < 10; i++) await p.onFrame(frame(i * 40));
    for (let t = 0; t <= 400; t += 40) {
      clock.now = t;
      p.tick();
    }
    expect(target.drawn).toEqual([0, 40, 80, 120, 160, 200, 240, 280, 320, 360]);
    expect(p.dropped).toBe(0);
  });

  it("drops a stale burst instead of spiraling", async () => {
    const clock = { now: 0 };
    const { p, target } = player(clock);
    for (let i = 0; i < 20; i++) await p.onFrame(frame(i * 40));
    clock.now = 800; // the tab stalled for 0.8 s
    p.tick();
    // only the newest in-window frame is drawn; older ones are dropped
    expect(target.drawn).toEqual([760]);
    expect(p.dropped).toBe(19);
    expect(p.queued).toBe(0);
  });

  it("counts decode failures and skips the frame", async () => {
    const clock = { now: 0 };
    const { p, target, decoder } = player(clock);
    decoder.failOn.add("broken");
    await p.onFrame(frame(0, "broken"));
    await p.onFrame(frame(0));
    p.tick();
    expect(p.decodeFailures).toBe(1);
    expect(target.drawn).toEqual([0]);
  });
});

import { describe, expect, it } from "vitest";

import type { StatsMessage } from "../src/messages.js";
import { UiSessionState } from "../src/state.js";

function stats(bps: number): StatsMessage {
  return {
    type: "stats",
    session_id: 1,
    bps_payload: bps,
    bps_wire: bps * 1.2,
    latency_ms: 42,
    duration_ms: 1000,
    segments: 1,
    stalls: 0,
    excluded_bits: 128,
  };
}

describe("UiSessionState", () => {
  it("orders confirmed transcript entries by seq, not arrival", () => {
    const state = new UiSessionState();
    state.applyEcho({ type: "transcript_echo", seq: 2, text: "third" });
    state.applyEcho({ type: "transcript_echo", seq: 0, text: "first" });
    state.applyEcho({ type: "transcript_echo", seq: 1, text: "second" });
    expect(state.transcript().map((e) => e.text)).toEqual(["first", "second", "third"]);
    expect(state.transcript().map((e) => e.seq)).toEqual([0, 1, 2]);
  });

  it("tracks pending entries until the echo confirms them", () => {
    const state = new UiSessionState();
    state.addPending("hello");
    expect(state.transcript()).toEqual([{ seq: null, text: "hello", pending: true }]);
    state.applyEcho({ type: "transcript_echo", seq: 0, text: "hello" });
    expect(state.transcript()).toEqual([{ seq: 0, text: "hello", pending: false }]);
  });

  it("confirms duplicate texts one at a time", () => {
    const state = new UiSessionState();
    state.addPending("again");
    state.addPending("again");
    state.applyEcho({ type: "transcript_echo", seq: 0, text: "again" });
    const rows = state.transcript();
    expect(rows.filter((r) => r.pending)).toHaveLength(1);
    expect(rows.filter((r) => !r.pending)).toHaveLength(1);
  });

  it("drops rejected pending entries", () => {
    const state = new UiSessionState();
    state.addPending("nope");
    state.dropPending("nope");
    expect(state.transcript()).toEqual([]);
  });

  it("keeps stats monotone in received time", () => {
    const state = new UiSessionState();
    expect(state.applyStats(stats(10), 100)).toBe(true);
    expect(state.applyStats(stats(20), 50)).toBe(false); // stale
    expect(state.stats?.bps_payload).toBe(10);
    expect(state.applyStats(stats(30), 200)).toBe(true);
    expect(state.stats?.bps_payload).toBe(30);
  });
});

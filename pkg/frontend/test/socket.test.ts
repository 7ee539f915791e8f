import { describe, expect, it } from "vitest";

import { GatewayClient, type WebSocketLike } from "../src/socket.js";

class FakeSocket implements WebSocketLike {
  readyState = 0;
  sent: string[] = [];
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }
  close(): void {
    this.readyState = 3;
    this.onclose?.();
  }
  open(): void {
    this.readyState = 1;
    this.onopen?.();
  }
  receive(data: string): void {
    this.onmessage?.({ data });
  }
}

function connected() {
  const socket = new FakeSocket();
  const client = new GatewayClient("ws://test", () => socket);
  const ready = client.connect();
  socket.open();
  return { socket, client, ready };
}

describe("GatewayClient", () => {
  it("sends text only while connected", async () => {
    const { socket, client, ready } = connected();
    await ready;
    expect(client.sendText("hello")).toBe("sent");
    expect(JSON.parse(socket.sent[0]!)).toEqual({ type: "text", body: "hello" });
  });

  it("rejects empty strings without sending", async () => {
    const { socket, client, ready } = connected();
    await ready;
    expect(client.sendText("")).toBe("empty");
    expect(socket.sent).toEqual([]);
  });

  it("rejects (not queues) sends while disconnected", async () => {
    const { socket, client, ready } = connected();
    await ready;
    socket.close();
    expect(client.sendText("ghost")).toBe("disconnected");
    socket.open();
    expect(socket.sent).toEqual([]); // nothing replayed after reconnect
  });

  it("dispatches parsed messages by type", async () => {
    const { socket, client, ready } = connected();
    await ready;
    const got: number[] = [];
    client.on("transcript_echo", (msg) => got.push(msg.seq));
    socket.receive(JSON.stringify({ type: "transcript_echo", seq: 4, text: "hi" }));
    expect(got).toEqual([4]);
  });

  it("routes malformed payloads to onMalformed, not handlers", async () => {
    const { socket, client, ready } = connected();
    await ready;
    const bad: string[] = [];
    client.onMalformed = (raw) => bad.push(raw);
    socket.receive("not json");
    socket.receive(JSON.stringify({ type: "wat" }));
    socket.receive(JSON.stringify({ type: "stats", bps_payload: "NaN-ish" }));
    expect(bad).toHaveLength(3);
  });

  it("reports connection changes", async () => {
    const socket = new FakeSocket();
    const client = new GatewayClient("ws://test", () => socket);
    const states: boolean[] = [];
    client.onConnectionChange = (c) => states.push(c);
    const ready = client.connect();
    socket.open();
    await ready;
    socket.close();
    expect(states).toEqual([true, false]);
  });
});

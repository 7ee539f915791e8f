// DOM bootstrap: query-string config, one websocket, three update paths
// (transcript, gauge, frames) that never block each other.

import { Gauge } from "./gauge.js";
import { CanvasTarget, FramePlayer, ImageElementDecoder } from "./player.js";
import { GatewayClient } from "./socket.js";
import { UiSessionState } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const gatewayHost = params.get("gateway") ?? `${window.location.hostname}:7341`;
  const token = params.get("token") ?? "dev-token";
  const url = `ws://${gatewayHost}/ui?token=${encodeURIComponent(token)}`;

  const state = new UiSessionState();
  const gauge = new Gauge({
    payload: el("bps-payload"),
    wire: el("bps-wire"),
    ratio: el("ratio"),
    latency: el("latency"),
  });
  const canvas = el<HTMLCanvasElement>("screen");
  const player = new FramePlayer(new CanvasTarget(canvas), new ImageElementDecoder());
  const client = new GatewayClient(url, (u) => new WebSocket(u));

  const input = el<HTMLInputElement>("say");
  const sendButton = el<HTMLButtonElement>("send");
  const status = el("status");
  const transcriptList = el("transcript");
  const errors = el("errors");

  function renderTranscript(): void {
    transcriptList.replaceChildren(
      ...state.transcript().map((entry) => {
        const li = document.createElement("li");
        li.textContent = entry.pending ? `${entry.text} …` : `[${entry.seq}] ${entry.text}`;
        li.className = entry.pending ? "pending" : "confirmed";
        return li;
      }),
    );
  }

  function showError(message: string): void {
    errors.textContent = message;
  }

  client.onConnectionChange = (connected) => {
    state.connection = connected ? "connected" : "disconnected";
    status.textContent = state.connection;
    input.disabled = !connected || state.selectedUserId === null;
    sendButton.disabled = input.disabled;
  };

  client.on("stats", (msg) => {
    if (state.applyStats(msg, performance.now())) gauge.update(msg);
  });
  client.on("transcript_echo", (msg) => {
    state.applyEcho(msg);
    renderTranscript();
  });
  client.on("frame", (msg) => void player.onFrame(msg));
  client.on("error", (msg) => showError(msg.message));
  client.on("profile_selected", (msg) => {
    state.selectedUserId = msg.user_id;
    input.disabled = false;
    sendButton.disabled = false;
    showError("");
  });
  client.on("mode_set", (msg) => {
    state.mode = msg.value;
    el("mode-now").textContent = msg.value;
  });

  function send(): void {
    const body = input.value.trim();
    const result = client.sendText(body);
    if (result === "sent") {
      state.addPending(body);
      renderTranscript();
      input.value = "";
    } else if (result === "disconnected") {
      showError("disconnected: message not sent");
    }
  }

  sendButton.addEventListener("click", send);
  input.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") send();
  });
  el<HTMLButtonElement>("select-profile").addEventListener("click", () => {
    const id = Number(el<HTMLInputElement>("profile-id").value);
    client.selectProfile(id);
  });
  for (const mode of ["file", "stream", "live"]) {
    el(`mode-${mode}`).addEventListener("click", () => client.setMode(mode));
  }

  function raf(): void {
    player.tick();
    requestAnimationFrame(raf);
  }
  requestAnimationFrame(raf);

  client.connect().catch(() => showError("cannot reach gateway"));
}

boot();

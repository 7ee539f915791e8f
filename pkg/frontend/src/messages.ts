// Gateway UI websocket protocol: JSON text messages both ways.
//
// client -> server: {type:"text", body} | {type:"select_profile", user_id}
//                 | {type:"mode", value}
// server -> client: stats / frame / transcript_echo / profile_selected
//                 | mode_set / error

export type StatsMessage = {
  type: "stats";
  session_id: number;
  bps_payload: number;
  bps_wire: number;
  latency_ms: number;
  duration_ms: number;
  segments: number;
  stalls: number;
  excluded_bits: number;
};

export type FrameMessage = {
  type: "frame";
  pts_ms: number;
  jpeg_b64: string;
};

export type TranscriptEcho = {
  type: "transcript_echo";
  seq: number;
  text: string;
};

export type ProfileSelected = { type: "profile_selected"; user_id: number };
export type ModeSet = { type: "mode_set"; value: string };
export type ErrorMessage = { type: "error"; message: string };

export type ServerMessage =
  | StatsMessage
  | FrameMessage
  | TranscriptEcho
  | ProfileSelected
  | ModeSet
  | ErrorMessage;

const SERVER_TYPES = new Set([
  "stats",
  "frame",
  "transcript_echo",
  "profile_selected",
  "mode_set",
  "error",
]);

/** Parse one incoming message; null for anything malformed (caller logs). */
export function parseServerMessage(raw: string): ServerMessage | null {
  let value: unknown;
  try {
    value = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof value !== "object" || value === null) return null;
  const type = (value as { type?: unknown }).type;
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) return null;
  const msg = value as ServerMessage;
  if (msg.type === "stats" && typeof msg.bps_payload !== "number") return null;
  if (msg.type === "frame" && typeof msg.jpeg_b64 !== "string") return null;
  if (msg.type === "transcript_echo" && typeof msg.seq !== "number") return null;
  return msg;
}

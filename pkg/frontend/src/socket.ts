// Gateway connection. Send-side policy: typing while disconnected is an
// explicit, visible failure — nothing is queued for later, because silently
// replayed ghost messages after a reconnect are worse than a retype.

import { parseServerMessage, type ServerMessage } from "./messages.js";

export type SendResult = "sent" | "empty" | "disconnected";

// the subset of the WebSocket API we rely on; satisfied by browsers and ws
export interface WebSocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

const OPEN = 1;

export class GatewayClient {
  private ws: WebSocketLike | null = null;
  private listeners = new Map<string, ((msg: ServerMessage) => void)[]>();
  onMalformed: ((raw: string) => void) | null = null;
  onConnectionChange: ((connected: boolean) => void) | null = null;

  constructor(
    private readonly url: string,
    private readonly factory: WebSocketFactory,
  ) {}

  connect(): Promise<void> {
    return new Promise((resolve, reject) => {
      const ws = this.factory(this.url);
      this.ws = ws;
      ws.onopen = () => {
        this.onConnectionChange?.(true);
        resolve();
      };
      ws.onerror = (err) => reject(err instanceof Error ? err : new Error("connect failed"));
      ws.onclose = () => this.onConnectionChange?.(false);
      ws.onmessage = (ev) => this.dispatch(String(ev.data));
    });
  }

  get connected(): boolean {
    return this.ws !== null && this.ws.readyState === OPEN;
  }

  on<T extends ServerMessage["type"]>(
    type: T,
    handler: (msg: Extract<ServerMessage, { type: T }>) => void,
  ): void {
    const list = this.listeners.get(type) ?? [];
    list.push(handler as (msg: ServerMessage) => void);
    this.listeners.set(type, list);
  }

  private dispatch(raw: string): void {
    const msg = parseServerMessage(raw);
    if (msg === null) {
      this.onMalformed?.(raw);
      return;
    }
    for (const handler of this.listeners.get(msg.type) ?? []) handler(msg);
  }

  sendText(body: string): SendResult {
    if (!body) return "empty";
    if (!this.connected) return "disconnected";
    this.ws!.send(JSON.stringify({ type: "text", body }));
    return "sent";
  }

  selectProfile(userId: number): SendResult {
    if (!this.connected) return "disconnected";
    this.ws!.send(JSON.stringify({ type: "select_profile", user_id: userId }));
    return "sent";
  }

  setMode(value: string): SendResult {
    if (!this.connected) return "disconnected";
    this.ws!.send(JSON.stringify({ type: "mode", value }));
    return "sent";
  }

  close(): void {
    this.ws?.close();
  }
}

// Session state behind the UI: transcript ordering, pending echoes, stats.
//
// Typed text is only "pending" until the gateway confirms it with a
// transcript_echo carrying the server-assigned seq; confirmed entries
// always display in seq order regardless of arrival order. Stats are
// kept monotone: a message that would move time backwards is dropped.

import type { StatsMessage, TranscriptEcho } from "./messages.js";

export type ConnectionState = "disconnected" | "connecting" | "connected";

export interface TranscriptEntry {
  seq: number | null; // null while pending confirmation
  text: string;
  pending: boolean;
}

export class UiSessionState {
  connection: ConnectionState = "disconnected";
  selectedUserId: number | null = null;
  mode = "live";
  stats: StatsMessage | null = null;
  statsReceivedAt = -1;
  framesReceived = 0;
  framesDropped = 0;

  private confirmed = new Map<number, string>();
  private pending: string[] = [];

  addPending(text: string): void {
    this.pending.push(text);
  }

  /** Server confirmation: resolves the oldest matching pending entry. */
  applyEcho(echo: TranscriptEcho): void {
    const index = this.pending.indexOf(echo.text);
    if (index >= 0) this.pending.splice(index, 1);
    this.confirmed.set(echo.seq, echo.text);
  }

  dropPending(text: string): void {
    const index = this.pending.indexOf(text);
    if (index >= 0) this.pending.splice(index, 1);
  }

  /** Monotone stats: stale deliveries are ignored. */
  applyStats(stats: StatsMessage, receivedAt: number): boolean {
    if (receivedAt < this.statsReceivedAt) return false;
    this.stats = stats;
    this.statsReceivedAt = receivedAt;
    return true;
  }

  transcript(): TranscriptEntry[] {
    const rows: TranscriptEntry[] = [...this.confirmed.entries()]
      .sort((a, b) => a[0] - b[0])
      .map(([seq, text]) => ({ seq, text, pending: false }));
    for (const text of this.pending) rows.push({ seq: null, text, pending: true });
    return rows;
  }
}

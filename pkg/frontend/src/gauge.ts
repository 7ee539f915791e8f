// Live bitrate gauge. The displayed numbers are the last stats message,
// formatted — never recomputed client-side, so the gauge can't drift from
// what the gateway accounted.

import type { StatsMessage } from "./messages.js";

export const DEFAULT_REFERENCE_BPS = 17_500; // a typical low-rate codec setting

export function formatBps(bps: number): string {
  if (bps <= 0) return "—"; // idle shows a dash, never Infinity
  if (bps >= 10_000) return `${(bps / 1000).toFixed(1)} kbps`;
  return `${bps.toFixed(1)} bps`;
}

export function formatRatio(bpsPayload: number, referenceBps = DEFAULT_REFERENCE_BPS): string {
  if (bpsPayload <= 0) return "—";
  return `${Math.round(referenceBps / bpsPayload)}×`;
}

export interface GaugeElements {
  payload: { textContent: string | null };
  wire: { textContent: string | null };
  ratio: { textContent: string | null };
  latency: { textContent: string | null };
}

export class Gauge {
  lastStats: StatsMessage | null = null;

  constructor(
    private readonly els: GaugeElements,
    private readonly referenceBps = DEFAULT_REFERENCE_BPS,
  ) {}

  update(stats: StatsMessage): void {
    this.lastStats = stats;
    this.els.payload.textContent = formatBps(stats.bps_payload);
    this.els.wire.textContent = formatBps(stats.bps_wire);
    this.els.ratio.textContent = formatRatio(stats.bps_payload, this.referenceBps);
    this.els.latency.textContent = `${stats.latency_ms} ms`;
  }
}

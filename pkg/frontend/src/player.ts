// Frame playback scheduling.
//
// Frames arrive as JPEG-b64 messages stamped with presentation timestamps.
// The playout clock starts at the first frame; a frame is never drawn
// before its pts, and once the tab falls behind by more than two frame
// intervals the stale frames are dropped rather than queued, so a burst
// can't start a spiral of lag. Drawing goes through small interfaces so
// tests (and headless environments) can substitute the canvas.

import type { FrameMessage } from "./messages.js";

export interface DecodedImage {
  width: number;
  height: number;
  source: unknown; // CanvasImageSource in the browser
}

export interface FrameDecoder {
  decode(jpegB64: string): Promise<DecodedImage>;
}

export interface DrawTarget {
  draw(image: DecodedImage, ptsMs: number): void;
}

interface QueuedFrame {
  ptsMs: number;
  image: DecodedImage;
}

export class FramePlayer {
  drawn = 0;
  dropped = 0;
  decodeFailures = 0;

  private queue: QueuedFrame[] = [];
  private t0: number | null = null;
  private lastDrawnPts = -1;

  constructor(
    private readonly target: DrawTarget,
    private readonly decoder: FrameDecoder,
    private readonly now: () => number = () => performance.now(),
    private readonly fps = 25,
  ) {}

  get frameIntervalMs(): number {
    return 1000 / this.fps;
  }

  async onFrame(msg: FrameMessage): Promise<void> {
    let image: DecodedImage;
    try {
      image = await this.decoder.decode(msg.jpeg_b64);
    } catch {
      this.decodeFailures += 1;
      return;
    }
    if (this.t0 === null) this.t0 = this.now();
    this.queue.push({ ptsMs: msg.pts_ms, image });
    this.queue.sort((a, b) => a.ptsMs - b.ptsMs);
  }

  /** One scheduler step (animation-frame driven in the browser). */
  tick(): void {
    if (this.t0 === null) return;
    const elapsed = this.now() - this.t0;
    const staleBefore = elapsed - 2 * this.frameIntervalMs;
    let candidate: QueuedFrame | null = null;
    const keep: QueuedFrame[] = [];
    for (const frame of this.queue) {
      if (frame.ptsMs > elapsed) {
        keep.push(frame); // not due yet; never draw early
      } else if (frame.ptsMs < staleBefore) {
        this.dropped += 1; // too old: drop, don't queue
      } else if (candidate === null || frame.ptsMs > candidate.ptsMs) {
        if (candidate !== null) this.dropped += 1; // superseded within window
        candidate = frame;
      } else {
        this.dropped += 1;
      }
    }
    this.queue = keep;
    if (candidate !== null && candidate.ptsMs > this.lastDrawnPts) {
      this.target.draw(candidate.image, candidate.ptsMs);
      this.lastDrawnPts = candidate.ptsMs;
      this.drawn += 1;
    }
  }

  get queued(): number {
    return this.queue.length;
  }
}

/** Browser decoder: JPEG bytes through an HTMLImageElement. */
export class ImageElementDecoder implements FrameDecoder {
  decode(jpegB64: string): Promise<DecodedImage> {
    return new Promise((resolve, reject) => {
      const img = new Image();
      img.onload = () =>
        resolve({ width: img.naturalWidth, height: img.naturalHeight, source: img });
      img.onerror = () => reject(new Error("jpeg decode failed"));
      img.src = `data:image/jpeg;base64,${jpegB64}`;
    });
  }
}

/** Browser target: paint onto a 2D canvas context. */
export class CanvasTarget implements DrawTarget {
  constructor(private readonly canvas: HTMLCanvasElement) {}

  draw(image: DecodedImage): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    this.canvas.width = image.width;
    this.canvas.height = image.height;
    ctx.drawImage(image.source as CanvasImageSource, 0, 0);
  }
}

/**
 * Pointer bookkeeping: every pointer-down on a zone owes the engine exactly
 * one release, whatever path the pointer takes out (up, cancel, window
 * blur, disconnect cleanup). Multi-pointer means concurrent presses.
 */

import { touchFrame } from "./protocol.js";

export interface Zone {
  tube: number;
  area: number;
}

export class PointerTracker {
  private active = new Map<number, Zone>();

  constructor(private readonly now: () => number = () => Date.now()) {}

  /** Pointer landed on a zone; returns the press frame, or null if this
   * pointer already holds a zone (duplicate downs are swallowed). */
  down(pointerId: number, zone: Zone): string | null {
    if (this.active.has(pointerId)) return null;
    this.active.set(pointerId, zone);
    return touchFrame(zone.tube, zone.area, true, this.now());
  }

  /** Pointer lifted or cancelled; returns the matching release frame, or
   * null if there was nothing held (never double-releases). */
  up(pointerId: number): string | null {
    const zone = this.active.get(pointerId);
    if (!zone) return null;
    this.active.delete(pointerId);
    return touchFrame(zone.tube, zone.area, false, this.now());
  }

  /** Release everything (window blur, socket loss). */
  releaseAll(): string[] {
    const frames: string[] = [];
    for (const [id] of this.active) {
      const frame = this.up(id);
      if (frame) frames.push(frame);
    }
    return frames;
  }

  heldCount(): number {
    return this.active.size;
  }
}

/**
 * Knob frame rate limiter: at most one frame per interval while dragging,
 * and the final value always goes out on settle.
 */
export class KnobThrottle {
  private lastSent = -Infinity;
  private pending: string | null = null;

  constructor(private readonly intervalMs = 50) {}

  drag(frame: string, now: number): string | null {
    if (now - this.lastSent >= this.intervalMs) {
      this.lastSent = now;
      this.pending = null;
      return frame;
    }
    this.pending = frame;
    return null;
  }

  settle(frame: string, now: number): string {
    this.lastSent = now;
    this.pending = null;
    return frame;
  }

  /** Frame still waiting for the rate window, if any. */
  flush(now: number): string | null {
    if (this.pending !== null && now - this.lastSent >= this.intervalMs) {
      const frame = this.pending;
      this.pending = null;
      this.lastSent = now;
      return frame;
    }
    return null;
  }
}

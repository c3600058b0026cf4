/**
 * View model: the last broadcast engine state, updated frame by frame.
 * Pure data so the contract tests can drive it without a DOM.
 */

import { LedColor, ServerFrame } from "./protocol.js";

export interface StatusLine {
  mode: string;
  label: string;
  scale: string;
  root: number;
  bpm: number;
  subdivision: string;
  patch: number;
  recording: boolean;
  hasRecording: boolean;
  playing: boolean;
  ai: boolean;
  progression: number[];
  position: number;
}

const DEFAULT_STATUS: StatusLine = {
  mode: "single_note",
  label: "",
  scale: "",
  root: 0,
  bpm: 100,
  subdivision: "off",
  patch: 0,
  recording: false,
  hasRecording: false,
  playing: false,
  ai: false,
  progression: [],
  position: 0,
};

export class InstrumentView {
  leds: LedColor[] = ["off", "off", "off", "off", "off", "off", "off"];
  status: StatusLine = { ...DEFAULT_STATUS };
  lastError = "";
  /** Pitches currently sounding, per channel, for the audio preview. */
  sounding = new Map<string, number>();

  /** Fold one engine frame into the view; unknown frames are ignored. */
  apply(frame: ServerFrame): void {
    switch (frame.kind) {
      case "led":
        this.leds[frame.tube] = frame.color;
        break;
      case "state":
        this.applyState(frame.data);
        break;
      case "note": {
        const key = `${frame.channel}:${frame.pitch}`;
        const count = this.sounding.get(key) ?? 0;
        if (frame.state === "on") {
          this.sounding.set(key, count + 1);
        } else if (count > 1) {
          this.sounding.set(key, count - 1);
        } else {
          this.sounding.delete(key);
        }
        break;
      }
      case "err":
        this.lastError = frame.detail ? `${frame.code}: ${frame.detail}` : frame.code;
        break;
    }
  }

  private applyState(data: Record<string, unknown>): void {
    const s = this.status;
    if (typeof data.mode === "string") s.mode = data.mode;
    if (typeof data.label === "string") s.label = data.label;
    if (typeof data.scale === "string") s.scale = data.scale;
    if (typeof data.root === "number") s.root = data.root;
    if (typeof data.bpm === "number") s.bpm = data.bpm;
    if (typeof data.subdivision === "string") s.subdivision = data.subdivision;
    if (typeof data.patch === "number") s.patch = data.patch;
    if (typeof data.recording === "boolean") s.recording = data.recording;
    if (typeof data.has_recording === "boolean") s.hasRecording = data.has_recording;
    if (typeof data.playing === "boolean") s.playing = data.playing;
    if (typeof data.ai === "boolean") s.ai = data.ai;
    if (Array.isArray(data.progression)) {
      s.progression = data.progression.filter((d): d is number => typeof d === "number");
    }
    if (typeof data.position === "number") s.position = data.position;
  }
}

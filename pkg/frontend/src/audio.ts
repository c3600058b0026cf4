/**
 * Optional WebAudio preview. Cosmetic only: the engine's NOTE stream (or a
 * MIDI bounce) is the ground truth; this just makes the page audible.
 */

import { NoteFrame } from "./protocol.js";

type Wave = OscillatorType;

/** Rough General-MIDI family to oscillator shape. */
export function waveForPatch(patch: number): Wave {
  if (patch < 8) return "triangle"; // pianos
  if (patch < 24) return "sine"; // chromatic percussion, organs
  if (patch < 40) return "sawtooth"; // guitars, basses
  if (patch < 56) return "sawtooth"; // strings, ensemble
  if (patch < 80) return "square"; // brass, reeds, pipes
  return "sine"; // leads, pads, the rest
}

export function pitchToHz(pitch: number): number {
  return 440 * Math.pow(2, (pitch - 69) / 12);
}

interface Voice {
  osc: OscillatorNode;
  gain: GainNode;
}

export class Preview {
  private ctx: AudioContext | null = null;
  private voices = new Map<string, Voice>();
  private wave: Wave = "triangle";
  enabled = false;

  setPatch(patch: number): void {
    this.wave = waveForPatch(patch);
  }

  /** Must be called from a user gesture (browser autoplay rules). */
  enable(): void {
    if (!this.ctx) {
      const Ctx = window.AudioContext ?? (window as any).webkitAudioContext;
      if (!Ctx) return;
      this.ctx = new Ctx();
    }
    void this.ctx.resume();
    this.enabled = true;
  }

  disable(): void {
    this.enabled = false;
    for (const key of [...this.voices.keys()]) this.stopVoice(key);
  }

  handleNote(frame: NoteFrame): void {
    if (!this.enabled || !this.ctx) return;
    const key = `${frame.channel}:${frame.pitch}`;
    if (frame.state === "on") {
      this.stopVoice(key);
      const osc = this.ctx.createOscillator();
      const gain = this.ctx.createGain();
      osc.type = this.wave;
      osc.frequency.value = pitchToHz(frame.pitch);
      gain.gain.value = 0;
      gain.gain.linearRampToValueAtTime(
        0.12 * (frame.velocity / 127),
        this.ctx.currentTime + 0.01,
      );
      osc.connect(gain).connect(this.ctx.destination);
      osc.start();
      this.voices.set(key, { osc, gain });
    } else {
      this.stopVoice(key);
    }
  }

  private stopVoice(key: string): void {
    const voice = this.voices.get(key);
    if (!voice || !this.ctx) return;
    this.voices.delete(key);
    const t = this.ctx.currentTime;
    voice.gain.gain.cancelScheduledValues(t);
    voice.gain.gain.setTargetAtTime(0, t, 0.03);
    voice.osc.stop(t + 0.2);
  }
}

/**
 * Client side of the engine's wire grammar: newline-delimited text frames.
 *
 * The UI only ever sends T/K/B input frames and only ever receives
 * NOTE/LED/STATE/ERR frames; ownership is one-way in each direction.
 */

export type LedColor = "off" | "blue" | "pink";

export interface NoteFrame {
  kind: "note";
  state: "on" | "off";
  pitch: number;
  velocity: number;
  channel: number;
  time: number;
}

export interface LedFrame {
  kind: "led";
  tube: number;
  color: LedColor;
}

export interface StateFrame {
  kind: "state";
  data: Record<string, unknown>;
}

export interface ErrFrame {
  kind: "err";
  code: string;
  detail: string;
}

export type ServerFrame = NoteFrame | LedFrame | StateFrame | ErrFrame;

export type KnobName = "emotion" | "quant" | "sound";
export type ButtonName = "mode" | "rec" | "play" | "ai";

const LED_COLORS: ReadonlySet<string> = new Set(["off", "blue", "pink"]);

function asInt(token: string, lo: number, hi: number): number | null {
  if (!/^[0-9]{1,13}$/.test(token)) return null;
  const value = Number(token);
  return value >= lo && value <= hi ? value : null;
}

/** Parse one engine frame; returns null for anything malformed. */
export function parseServerFrame(line: string): ServerFrame | null {
  const trimmed = line.replace(/\r?\n$/, "");
  if (trimmed.startsWith("NOTE ")) {
    const parts = trimmed.split(" ");
    if (parts.length !== 6) return null;
    const [, state, pitch, velocity, channel, time] = parts;
    if (state !== "on" && state !== "off") return null;
    const p = asInt(pitch, 0, 127);
    const v = asInt(velocity, 0, 127);
    const c = asInt(channel, 0, 15);
    const t = asInt(time, 0, 1e12);
    if (p === null || v === null || c === null || t === null) return null;
    return { kind: "note", state, pitch: p, velocity: v, channel: c, time: t };
  }
  if (trimmed.startsWith("LED ")) {
    const parts = trimmed.split(" ");
    if (parts.length !== 3) return null;
    const tube = asInt(parts[1], 0, 6);
    if (tube === null || !LED_COLORS.has(parts[2])) return null;
    return { kind: "led", tube, color: parts[2] as LedColor };
  }
  if (trimmed.startsWith("STATE ")) {
    try {
      const data = JSON.parse(trimmed.slice(6));
      if (typeof data !== "object" || data === null || Array.isArray(data)) return null;
      return { kind: "state", data: data as Record<string, unknown> };
    } catch {
      return null;
    }
  }
  if (trimmed.startsWith("ERR ")) {
    const rest = trimmed.slice(4);
    if (!rest) return null;
    const space = rest.indexOf(" ");
    if (space < 0) return { kind: "err", code: rest, detail: "" };
    return { kind: "err", code: rest.slice(0, space), detail: rest.slice(space + 1) };
  }
  return null;
}

export function touchFrame(tube: number, area: number, down: boolean, time: number): string {
  if (!Number.isInteger(tube) || tube < 0 || tube > 6) throw new Error(`bad tube ${tube}`);
  if (!Number.isInteger(area) || area < 0 || area > 2) throw new Error(`bad area ${area}`);
  const t = Math.max(0, Math.round(time));
  return `T ${tube} ${area} ${down ? "P" : "R"} ${t}`;
}

export function knobFrame(name: KnobName, value: number): string {
  const clamped = Math.min(1, Math.max(0, value));
  return `K ${name} ${clamped}`;
}

export function buttonFrame(name: ButtonName): string {
  return `B ${name} P`;
}

/**
 * DOM wiring: builds the seven tubes and the controller panel, binds
 * pointer/knob/button events to protocol frames, and repaints from the
 * view model on every engine frame.
 */

import { Preview } from "./audio.js";
import { InstrumentView } from "./model.js";
import { KnobThrottle, PointerTracker } from "./pointer.js";
import {
  ButtonName,
  KnobName,
  buttonFrame,
  knobFrame,
  parseServerFrame,
} from "./protocol.js";
import { WebSocketTransport } from "./transport.js";

const AREA_NAMES = ["bottom", "middle", "upper"];

function wsUrl(): string {
  const override = new URLSearchParams(location.search).get("ws");
  if (override) return override;
  return `ws://${location.hostname || "localhost"}:8766`;
}

export function mount(root: HTMLElement): void {
  const view = new InstrumentView();
  const tracker = new PointerTracker(() => Math.round(performance.now()));
  const preview = new Preview();

  root.innerHTML = `
    <div id="banner" class="banner hidden">disconnected, retrying…</div>
    <div id="tubes" class="tubes"></div>
    <div class="panel">
      <label>emotion <input id="knob-emotion" type="range" min="0" max="1" step="0.001" value="0"></label>
      <label>quantize <input id="knob-quant" type="range" min="0" max="1" step="0.001" value="0"></label>
      <label>sound <input id="knob-sound" type="range" min="0" max="1" step="0.001" value="0"></label>
      <button id="btn-mode">mode</button>
      <button id="btn-rec">rec</button>
      <button id="btn-play">play</button>
      <button id="btn-ai">ai</button>
      <button id="btn-audio">preview: off</button>
    </div>
    <div id="status" class="status"></div>
    <div id="error" class="error"></div>
  `;

  const banner = root.querySelector("#banner") as HTMLElement;
  const tubesBox = root.querySelector("#tubes") as HTMLElement;
  const statusBox = root.querySelector("#status") as HTMLElement;
  const errorBox = root.querySelector("#error") as HTMLElement;

  const tubeEls: HTMLElement[] = [];
  for (let tube = 0; tube < 7; tube++) {
    const el = document.createElement("div");
    el.className = "tube led-off";
    el.dataset.tube = String(tube);
    // upper zone first so the stack reads top-to-bottom like the hardware
    for (let area = 2; area >= 0; area--) {
      const zone = document.createElement("div");
      zone.className = `zone zone-${AREA_NAMES[area]}`;
      zone.dataset.tube = String(tube);
      zone.dataset.area = String(area);
      el.appendChild(zone);
    }
    tubesBox.appendChild(el);
    tubeEls.push(el);
  }

  const transport = new WebSocketTransport(wsUrl(), {
    onFrame(line) {
      const frame = parseServerFrame(line);
      if (!frame) {
        console.warn("unparseable frame", line);
        return;
      }
      view.apply(frame);
      if (frame.kind === "note") preview.handleNote(frame);
      if (frame.kind === "state") preview.setPatch(view.status.patch);
      repaint();
    },
    onStatus(connected) {
      banner.classList.toggle("hidden", connected);
      if (!connected) {
        // owed releases can never reach the engine; drop them locally
        tracker.releaseAll();
        repaint();
      }
    },
  });

  function repaint(): void {
    for (let tube = 0; tube < 7; tube++) {
      tubeEls[tube].className = `tube led-${view.leds[tube]}`;
    }
    const s = view.status;
    statusBox.textContent =
      `${s.mode.replace("_", " ")} · ${s.label} (${s.scale}) · ` +
      `bpm ${s.bpm} · grid ${s.subdivision} · patch ${s.patch}` +
      `${s.recording ? " · REC" : ""}${s.playing ? " · LOOP" : ""}${s.ai ? " · AI" : ""}`;
    errorBox.textContent = view.lastError;
  }

  // touches: pointer down on a zone, release anywhere (incl. cancel/blur)
  tubesBox.addEventListener("pointerdown", (e) => {
    const target = e.target as HTMLElement;
    if (target.dataset.area === undefined || target.dataset.tube === undefined) return;
    const frame = tracker.down(e.pointerId, {
      tube: Number(target.dataset.tube),
      area: Number(target.dataset.area),
    });
    if (frame) transport.send(frame);
    e.preventDefault();
  });
  const lift = (e: PointerEvent) => {
    const frame = tracker.up(e.pointerId);
    if (frame) transport.send(frame);
  };
  window.addEventListener("pointerup", lift);
  window.addEventListener("pointercancel", lift);
  window.addEventListener("blur", () => {
    for (const frame of tracker.releaseAll()) transport.send(frame);
  });

  // knobs: throttled while dragging, final value on release
  for (const name of ["emotion", "quant", "sound"] as KnobName[]) {
    const input = root.querySelector(`#knob-${name}`) as HTMLInputElement;
    const throttle = new KnobThrottle(50); // 20 Hz
    input.addEventListener("input", () => {
      const frame = throttle.drag(knobFrame(name, Number(input.value)), performance.now());
      if (frame) transport.send(frame);
    });
    input.addEventListener("change", () => {
      transport.send(throttle.settle(knobFrame(name, Number(input.value)), performance.now()));
    });
  }

  for (const name of ["mode", "rec", "play", "ai"] as ButtonName[]) {
    const button = root.querySelector(`#btn-${name}`) as HTMLButtonElement;
    button.addEventListener("click", () => transport.send(buttonFrame(name)));
  }

  const audioBtn = root.querySelector("#btn-audio") as HTMLButtonElement;
  audioBtn.addEventListener("click", () => {
    if (preview.enabled) {
      preview.disable();
      audioBtn.textContent = "preview: off";
    } else {
      preview.enable();
      audioBtn.textContent = "preview: on";
    }
  });

  repaint();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app") as HTMLElement);
}

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import {
  Commander,
  DEFAULT_SETTINGS,
  joystickToCommand,
  validateSettings,
  type UiSettings,
} from "../src/commander.js";
import { sampleFromOffset } from "../src/joystick.js";
import { parseMove } from "../src/protocol.js";

/** Exactly what the client is allowed to put on the wire: a mov line with
 * two plain two-decimal floats.  Anything matching this is also inside the
 * service parser's float grammar. */
const EMIT_RE = /^mov-?\d+\.\d{2},-?\d+\.\d{2}$/;

function lcg(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (Math.imul(state, 1664525) + 1013904223) >>> 0;
    return state / 2 ** 32;
  };
}

function settings(overrides: Partial<UiSettings> = {}): UiSettings {
  return { ...DEFAULT_SETTINGS, ...overrides };
}

describe("joystickToCommand", () => {
  it.each([
    [{ x: 0, y: 1 }, "mov3.00,0.00"],
    [{ x: 1, y: 0 }, "mov0.00,1.50"],
    [{ x: 0, y: 0 }, "mov0.00,0.00"],
    [{ x: -1, y: -1 }, "mov-3.00,-1.50"],
    [{ x: 0.5, y: -0.5 }, "mov-1.50,0.75"],
  ])("maps %o at default scales", (sample, line) => {
    expect(joystickToCommand(sample, DEFAULT_SETTINGS)).toBe(line);
  });

  it("honors custom scales", () => {
    const s = settings({ velocityScale: 10, steeringScale: 5 });
    expect(joystickToCommand({ x: 1, y: 1 }, s)).toBe("mov10.00,5.00");
  });
});

describe("validateSettings", () => {
  it("accepts the documented range", () => {
    validateSettings(settings({ sendRateHz: 1 }));
    validateSettings(settings({ sendRateHz: 50 }));
  });

  it.each([
    settings({ sendRateHz: 0.5 }),
    settings({ sendRateHz: 51 }),
    settings({ sendRateHz: Number.NaN }),
    settings({ velocityScale: 0 }),
    settings({ steeringScale: -1 }),
  ])("rejects %o", (bad) => {
    expect(() => validateSettings(bad)).toThrow(RangeError);
  });
});

describe("Commander", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  function heldFor(ms: number, rateHz: number): string[] {
    const lines: string[] = [];
    const commander = new Commander(
      (line) => lines.push(line),
      settings({ sendRateHz: rateHz }),
    );
    commander.update({ x: 0.2, y: 0.8 }, true);
    vi.advanceTimersByTime(ms);
    commander.dispose();
    return lines;
  }

  it("sends at the configured rate while held, within 20 percent", () => {
    for (const rateHz of [1, 10, 20, 50]) {
      const lines = heldFor(5000, rateHz);
      const perSecond = lines.length / 5;
      expect(perSecond).toBeGreaterThanOrEqual(0.8 * rateHz);
      expect(perSecond).toBeLessThanOrEqual(1.2 * rateHz);
    }
  });

  it("meets the 10 Hz teleop floor at the default rate", () => {
    const lines = heldFor(5000, DEFAULT_SETTINGS.sendRateHz);
    expect(lines.length / 5).toBeGreaterThanOrEqual(10);
    console.log(
      `[PASS] criterion 11a held-stick command rate: ` +
        `${(lines.length / 5).toFixed(1)} lines/s at default ` +
        `${DEFAULT_SETTINGS.sendRateHz} Hz (>=10 required)`,
    );
  });

  it("sends one immediate line on engage", () => {
    const lines: string[] = [];
    const commander = new Commander((line) => lines.push(line));
    commander.update({ x: 0, y: 1 }, true);
    expect(lines).toEqual(["mov3.00,0.00"]);
    commander.dispose();
  });

  it("sends the latest sample at each tick", () => {
    const lines: string[] = [];
    const commander = new Commander((line) => lines.push(line));
    commander.update({ x: 0, y: 1 }, true);
    commander.update({ x: -1, y: 0.5 }, true);
    vi.advanceTimersByTime(50);
    expect(lines[lines.length - 1]).toBe("mov1.50,-1.50");
    commander.dispose();
  });

  it("emits exactly one zero line on release and then goes quiet", () => {
    const lines: string[] = [];
    const commander = new Commander((line) => lines.push(line));
    commander.update({ x: 0, y: 1 }, true);
    vi.advanceTimersByTime(500);
    const before = lines.length;
    commander.update({ x: 0, y: 0 }, false);
    expect(lines.length).toBe(before + 1);
    expect(lines[lines.length - 1]).toBe("mov0.00,0.00");
    vi.advanceTimersByTime(2000);
    expect(lines.length).toBe(before + 1);
    commander.dispose();
  });

  it("does nothing on release when it was never engaged", () => {
    const lines: string[] = [];
    const commander = new Commander((line) => lines.push(line));
    commander.update({ x: 0, y: 0 }, false);
    expect(lines).toEqual([]);
    commander.dispose();
  });

  it("re-engages after a release", () => {
    const lines: string[] = [];
    const commander = new Commander((line) => lines.push(line));
    commander.update({ x: 0, y: 1 }, true);
    commander.update({ x: 0, y: 0 }, false);
    commander.update({ x: 1, y: 0 }, true);
    expect(commander.engaged).toBe(true);
    vi.advanceTimersByTime(100);
    expect(lines[lines.length - 1]).toBe("mov0.00,1.50");
    commander.dispose();
  });

  it("never emits a line the shared grammar rejects", () => {
    const rand = lcg(0xb0b0);
    const lines: string[] = [];
    const commander = new Commander((line) => lines.push(line));
    for (let i = 0; i < 2000; i += 1) {
      // Raw pointer offsets well past the pad radius, through the same
      // clamping path the real joystick uses.
      const sample = sampleFromOffset(
        (rand() - 0.5) * 500,
        (rand() - 0.5) * 500,
        70,
      );
      commander.update(sample, true);
      vi.advanceTimersByTime(50);
      if (rand() < 0.1) commander.update(sample, false);
    }
    commander.dispose();
    expect(lines.length).toBeGreaterThan(2000);
    for (const line of lines) {
      expect(line).toMatch(EMIT_RE);
      const parsed = parseMove(line);
      expect(parsed.kind, line).toBe("command");
      if (parsed.kind !== "command") throw new Error("unreachable");
      expect(Math.abs(parsed.command.refVelocity)).toBeLessThanOrEqual(3.0);
      expect(Math.abs(parsed.command.refSteering)).toBeLessThanOrEqual(1.5);
    }
    console.log(
      `[PASS] criterion 11b emitted-line grammar: ${lines.length} fuzzed ` +
        `lines, all parse as commands within the reference limits`,
    );
  });
});

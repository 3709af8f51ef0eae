/** Wire protocol shared with the simulation service.
 *
 * Commands are single text lines:
 *
 *     mov<velocity>,<steering>   set references, floats in rad/s
 *     xxxxx                      keep-alive, ignored
 *     anything else              ignored
 *
 * Telemetry arrives as one JSON object per line.  The float grammar
 * accepted here is a strict subset of the service's parser (plain decimal
 * and exponent forms only), so every line this client classifies as a
 * command is guaranteed to parse on the service side too.
 */

export const MAX_VELOCITY = 10.0; // rad/s
export const MAX_STEERING = 5.0; // rad/s

export const KEEPALIVE = "xxxxx";
export const RESET_LINE = "reset";

export interface MoveCommand {
  refVelocity: number;
  refSteering: number;
}

export type ParsedLine =
  | { kind: "command"; command: MoveCommand }
  | { kind: "ignored" }
  | { kind: "error"; reason: string };

export interface TelemetryFrame {
  timeUs: number;
  pitch: number;
  targetAngle: number;
  velocity: number;
  targetVelocity: number;
  steering: number;
  accel: number;
  isBalancing: boolean;
  fallen: boolean;
  posX: number;
  posY: number;
  heading: number;
}

const FLOAT_RE = /^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$/;

function clamp(value: number, limit: number): number {
  if (value > limit) return limit;
  if (value < -limit) return -limit;
  return value;
}

function parseFloatField(field: string): number | null {
  const trimmed = field.trim();
  if (!FLOAT_RE.test(trimmed)) return null;
  const value = Number(trimmed);
  return Number.isFinite(value) ? value : null;
}

/** Classify one command line the way the service does: a clamped command,
 * ignored (keep-alives, unknown commands), or an error for mov lines whose
 * payload does not parse. */
export function parseMove(line: string): ParsedLine {
  const stripped = line.trim();
  if (stripped === KEEPALIVE) return { kind: "ignored" };
  if (!stripped.startsWith("mov")) return { kind: "ignored" };
  const payload = stripped.slice(3);
  if (!payload.includes(",")) {
    return { kind: "error", reason: "mov needs two comma-separated floats" };
  }
  // First two fields only; trailing junk after a second comma is tolerated.
  const parts = payload.split(",");
  const velocity = parseFloatField(parts[0]);
  const steering = parseFloatField(parts[1]);
  if (velocity === null || steering === null) {
    return { kind: "error", reason: "bad mov floats" };
  }
  return {
    kind: "command",
    command: {
      refVelocity: clamp(velocity, MAX_VELOCITY),
      refSteering: clamp(steering, MAX_STEERING),
    },
  };
}

/** Command line for a move, two decimals: mov1.50,-0.50 */
export function formatMove(command: MoveCommand): string {
  return `mov${command.refVelocity.toFixed(2)},${command.refSteering.toFixed(2)}`;
}

const FRAME_NUMBERS = [
  "timeUs",
  "pitch",
  "targetAngle",
  "velocity",
  "targetVelocity",
  "steering",
  "accel",
  "posX",
  "posY",
  "heading",
] as const;

const FRAME_BOOLS = ["isBalancing", "fallen"] as const;

export type DecodedFrame =
  | { ok: true; frame: TelemetryFrame }
  | { ok: false; reason: string };

/** Parse one telemetry line; malformed input comes back as a tagged error
 * so the caller can count and drop it without throwing. */
export function decodeTelemetry(text: string): DecodedFrame {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    return { ok: false, reason: "bad JSON" };
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    return { ok: false, reason: "not an object" };
  }
  const record = doc as Record<string, unknown>;
  for (const key of FRAME_NUMBERS) {
    const value = record[key];
    if (typeof value !== "number" || !Number.isFinite(value)) {
      return { ok: false, reason: `missing or bad field: ${key}` };
    }
  }
  for (const key of FRAME_BOOLS) {
    if (typeof record[key] !== "boolean") {
      return { ok: false, reason: `missing or bad field: ${key}` };
    }
  }
  return {
    ok: true,
    frame: {
      timeUs: record.timeUs as number,
      pitch: record.pitch as number,
      targetAngle: record.targetAngle as number,
      velocity: record.velocity as number,
      targetVelocity: record.targetVelocity as number,
      steering: record.steering as number,
      accel: record.accel as number,
      isBalancing: record.isBalancing as boolean,
      fallen: record.fallen as boolean,
      posX: record.posX as number,
      posY: record.posY as number,
      heading: record.heading as number,
    },
  };
}

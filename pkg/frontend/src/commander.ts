/** Turns joystick samples into mov command lines at a steady rate. */

import type { JoystickSample } from "./joystick.js";
import { formatMove } from "./protocol.js";

export interface UiSettings {
  wsUrl: string;
  /** Command send rate while the stick is held, in [1, 50] Hz. */
  sendRateHz: number;
  /** rad/s of velocity reference per unit of forward deflection. */
  velocityScale: number;
  /** rad/s of steering reference per unit of sideways deflection. */
  steeringScale: number;
}

export const DEFAULT_SETTINGS: UiSettings = {
  wsUrl: "ws://localhost:7778",
  sendRateHz: 20,
  velocityScale: 3.0,
  steeringScale: 1.5,
};

export function validateSettings(settings: UiSettings): void {
  if (!(settings.sendRateHz >= 1 && settings.sendRateHz <= 50)) {
    throw new RangeError(`sendRateHz must be in [1, 50]: ${settings.sendRateHz}`);
  }
  if (!(settings.velocityScale > 0) || !(settings.steeringScale > 0)) {
    throw new RangeError("scales must be positive");
  }
}

/** Scale a deflection to references and format the command line.
 * Full forward at the default scales gives "mov3.00,0.00". */
export function joystickToCommand(
  sample: JoystickSample,
  settings: UiSettings,
): string {
  return formatMove({
    refVelocity: sample.y * settings.velocityScale,
    refSteering: sample.x * settings.steeringScale,
  });
}

const ZERO_SAMPLE: JoystickSample = { x: 0, y: 0 };

/** Periodic command sender.
 *
 * While the stick is held, the latest sample is sent at sendRateHz (plus
 * one immediate line on engage).  Release stops the timer and sends a
 * single zero command so the robot coasts to its reference-free state.
 */
export class Commander {
  private sample: JoystickSample = ZERO_SAMPLE;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private send: (line: string) => void,
    private settings: UiSettings = DEFAULT_SETTINGS,
  ) {
    validateSettings(settings);
  }

  get engaged(): boolean {
    return this.timer !== null;
  }

  update(sample: JoystickSample, held: boolean): void {
    if (held) {
      this.sample = sample;
      if (this.timer === null) {
        this.send(joystickToCommand(this.sample, this.settings));
        this.timer = setInterval(
          () => this.send(joystickToCommand(this.sample, this.settings)),
          1000 / this.settings.sendRateHz,
        );
      }
    } else if (this.timer !== null) {
      this.stopTimer();
      this.sample = ZERO_SAMPLE;
      this.send(joystickToCommand(ZERO_SAMPLE, this.settings));
    }
  }

  dispose(): void {
    this.stopTimer();
  }

  private stopTimer(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}

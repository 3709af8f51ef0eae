/** Virtual joystick: pointer events on a round pad, normalized axes out. */

export interface JoystickSample {
  /** Steering axis, right positive, in [-1, 1]. */
  x: number;
  /** Velocity axis, up (forward) positive, in [-1, 1]. */
  y: number;
}

function clampAxis(value: number): number {
  if (value > 1) return 1;
  if (value < -1) return -1;
  // The screen-axis negation above can produce -0; keep samples tidy.
  return value === 0 ? 0 : value;
}

/** Map a pointer offset from the pad center to a sample.  Screen y grows
 * downward, so it is negated; both axes clamp to the unit box. */
export function sampleFromOffset(
  dxPx: number,
  dyPx: number,
  radiusPx: number,
): JoystickSample {
  return {
    x: clampAxis(dxPx / radiusPx),
    y: clampAxis(-dyPx / radiusPx),
  };
}

export const RELEASED: JoystickSample = { x: 0, y: 0 };

export class VirtualJoystick {
  readonly element: HTMLDivElement;
  private knob: HTMLDivElement;
  private pointerId: number | null = null;
  private centerX = 0;
  private centerY = 0;
  private radius = 70;

  private _sample: JoystickSample = RELEASED;
  private _held = false;

  constructor(private onChange?: (sample: JoystickSample, held: boolean) => void) {
    this.element = document.createElement("div");
    this.element.className = "joystick-pad";
    this.knob = document.createElement("div");
    this.knob.className = "joystick-knob";
    this.element.appendChild(this.knob);

    this.element.addEventListener("pointerdown", (e) => {
      if (this.pointerId !== null) return;
      this.pointerId = e.pointerId;
      this.element.setPointerCapture(e.pointerId);
      const rect = this.element.getBoundingClientRect();
      this.centerX = rect.left + rect.width / 2;
      this.centerY = rect.top + rect.height / 2;
      this.radius = rect.width / 2;
      this._held = true;
      this.handleMove(e.clientX, e.clientY);
    });

    this.element.addEventListener("pointermove", (e) => {
      if (this.pointerId !== e.pointerId) return;
      this.handleMove(e.clientX, e.clientY);
    });

    const release = (e: PointerEvent) => {
      if (this.pointerId !== e.pointerId) return;
      this.pointerId = null;
      this._held = false;
      this._sample = RELEASED;
      this.moveKnob(0, 0);
      this.onChange?.(this._sample, false);
    };
    this.element.addEventListener("pointerup", release);
    this.element.addEventListener("pointercancel", release);
  }

  private handleMove(clientX: number, clientY: number) {
    let dx = clientX - this.centerX;
    let dy = clientY - this.centerY;
    const dist = Math.hypot(dx, dy);
    if (dist > this.radius) {
      dx = (dx / dist) * this.radius;
      dy = (dy / dist) * this.radius;
    }
    this._sample = sampleFromOffset(dx, dy, this.radius);
    this.moveKnob(dx, dy);
    this.onChange?.(this._sample, true);
  }

  private moveKnob(dx: number, dy: number) {
    this.knob.style.transform = `translate(calc(-50% + ${dx}px), calc(-50% + ${dy}px))`;
  }

  get sample(): JoystickSample {
    return this._sample;
  }

  get held(): boolean {
    return this._held;
  }
}

/** Frame intake: decodes telemetry lines off the socket and decouples the
 * render loop from network callbacks.
 *
 * The render loop polls take() once per animation frame and only ever sees
 * the newest undrawn frame (latest wins); a bounded history is kept for the
 * time-series and trajectory views.  Malformed lines are dropped and
 * counted, never thrown.
 */

import { decodeTelemetry, type TelemetryFrame } from "./protocol.js";

export class FrameBuffer {
  private pending: TelemetryFrame | null = null;
  private _history: TelemetryFrame[] = [];
  private _malformed = 0;
  private _accepted = 0;

  constructor(private capacity = 2000) {
    if (!(capacity >= 1)) throw new RangeError("capacity must be >= 1");
  }

  /** Feed one line from the socket. Returns true when it decoded. */
  offer(line: string): boolean {
    const decoded = decodeTelemetry(line);
    if (!decoded.ok) {
      this._malformed += 1;
      return false;
    }
    this.pending = decoded.frame;
    this._accepted += 1;
    this._history.push(decoded.frame);
    if (this._history.length > this.capacity) {
      this._history.splice(0, this._history.length - this.capacity);
    }
    return true;
  }

  /** Newest frame since the last take, or null when nothing new arrived. */
  take(): TelemetryFrame | null {
    const frame = this.pending;
    this.pending = null;
    return frame;
  }

  /** Frames in arrival order, oldest first, bounded by capacity. */
  get history(): readonly TelemetryFrame[] {
    return this._history;
  }

  get latest(): TelemetryFrame | null {
    return this._history.length
      ? this._history[this._history.length - 1]
      : null;
  }

  get malformedCount(): number {
    return this._malformed;
  }

  get acceptedCount(): number {
    return this._accepted;
  }

  clear(): void {
    this.pending = null;
    this._history = [];
  }
}

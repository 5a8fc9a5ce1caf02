/** Rolling sha256 over a trajectory, byte-compatible with the native engine's
 * reference digests (`python -m forager.parity`).
 *
 * Byte layout: the reset observation, then per step the reward followed by the
 * observation. An observation contributes its grid tensor bytes (uint8,
 * row-major row/col/channel) then each aux entry as a little-endian float64;
 * a reward contributes one little-endian float64.
 */
import { createHash, type Hash } from "node:crypto";

import type { ObservationPayload } from "./types.js";

export class TrajectoryDigest {
  private readonly hash: Hash = createHash("sha256");

  observation(obs: ObservationPayload): void {
    const [rows, cols, channels] = obs.shape;
    const grid = Buffer.allocUnsafe(rows * cols * channels);
    let i = 0;
    for (const row of obs.grid) {
      for (const cell of row) {
        for (const value of cell) {
          grid[i++] = value;
        }
      }
    }
    this.hash.update(grid);
    const aux = Buffer.allocUnsafe(obs.aux.length * 8);
    for (let j = 0; j < obs.aux.length; j++) {
      aux.writeDoubleLE(obs.aux[j], j * 8);
    }
    this.hash.update(aux);
  }

  reward(value: number): void {
    const buf = Buffer.allocUnsafe(8);
    buf.writeDoubleLE(value, 0);
    this.hash.update(buf);
  }

  hex(): string {
    return this.hash.digest("hex");
  }
}

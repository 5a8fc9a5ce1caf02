/** Wire payloads of the simulation service. */

export interface ObservationPayload {
  /** (rows, cols, channels) of the grid tensor. */
  shape: [number, number, number];
  /** uint8 grid tensor as nested rows, row-major (row, col, channel). */
  grid: number[][][];
  /** float64 auxiliary inputs: action one-hot, last reward, trace, cue. */
  aux: number[];
}

export interface StepInfo {
  tick: number;
  collected: number | null;
}

export interface StepResult {
  observation: ObservationPayload;
  reward: number;
  /** Continuing task: always false. */
  done: boolean;
  info: StepInfo;
}

export interface PresetInfo {
  name: string;
  description: string;
  world: [number, number];
  fov: number;
  observation_mode: string;
  observation_shape: [number, number, number];
  aux_length: number;
}

export interface EnvDescriptor {
  env_id: string;
  preset: string | null;
  seed: number;
  num_actions: number;
  observation_shape: [number, number, number];
  aux_length: number;
}

export interface EnvInfo extends EnvDescriptor {
  tick: number;
  /** Entry count of the server-side mutable structures; stable over a run. */
  state_size: number;
}

/** A full task configuration document (see the service's /validate schema). */
export type TaskConfigDocument = Record<string, unknown>;

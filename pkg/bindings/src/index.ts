export { ForagerApiError, ForagerClient, ForagerEnvHandle } from "./client.js";
export { TrajectoryDigest } from "./digest.js";
export type {
  EnvDescriptor,
  EnvInfo,
  ObservationPayload,
  PresetInfo,
  StepInfo,
  StepResult,
  TaskConfigDocument,
} from "./types.js";

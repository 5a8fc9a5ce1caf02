/** HTTP client for the simulation service.
 *
 * `make` opens a live environment session on the server and returns a handle
 * with the conventional reset/step/close calling convention. Observations and
 * rewards are bit-exact with the native engine for the same (task, seed,
 * action sequence); no terminal signal ever fires (continuing task).
 */
import type {
  EnvInfo,
  ObservationPayload,
  PresetInfo,
  StepResult,
  TaskConfigDocument,
} from "./types.js";

export class ForagerApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`service returned ${status}: ${detail}`);
    this.name = "ForagerApiError";
  }
}

interface MakeResponse {
  env_id: string;
  preset: string | null;
  seed: number;
  num_actions: number;
  observation_shape: [number, number, number];
  aux_length: number;
  observation: ObservationPayload;
}

function detailText(payload: unknown): string {
  if (payload && typeof payload === "object" && "detail" in payload) {
    const detail = (payload as { detail: unknown }).detail;
    if (Array.isArray(detail)) {
      return detail
        .map((item) =>
          item && typeof item === "object" && "msg" in item
            ? `${String((item as { loc?: unknown }).loc ?? "")}: ${String((item as { msg: unknown }).msg)}`
            : String(item),
        )
        .join("; ");
    }
    return String(detail);
  }
  return JSON.stringify(payload);
}

export class ForagerClient {
  constructor(readonly baseUrl: string) {}

  async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status === 204) {
      return undefined as T;
    }
    const payload = (await response.json()) as unknown;
    if (!response.ok) {
      throw new ForagerApiError(response.status, detailText(payload));
    }
    return payload as T;
  }

  async health(): Promise<{ status: string; version: string }> {
    return this.request("GET", "/health");
  }

  async presets(): Promise<PresetInfo[]> {
    const data = await this.request<{ presets: PresetInfo[] }>("GET", "/presets");
    return data.presets;
  }

  async listEnvIds(): Promise<string[]> {
    const data = await this.request<{ env_ids: string[] }>("GET", "/envs");
    return data.env_ids;
  }

  /** Open a live environment from a preset name or a full config document. */
  async make(task: string | TaskConfigDocument, seed?: number): Promise<ForagerEnvHandle> {
    const body: Record<string, unknown> =
      typeof task === "string" ? { preset: task } : { config: task };
    if (seed !== undefined) {
      body.seed = seed;
    }
    const data = await this.request<MakeResponse>("POST", "/envs", body);
    return new ForagerEnvHandle(this, data);
  }
}

export class ForagerEnvHandle {
  readonly envId: string;
  readonly preset: string | null;
  readonly seed: number;
  readonly numActions: number;
  readonly observationShape: [number, number, number];
  readonly auxLength: number;
  readonly initialObservation: ObservationPayload;
  private closed = false;

  constructor(
    private readonly client: ForagerClient,
    made: MakeResponse,
  ) {
    this.envId = made.env_id;
    this.preset = made.preset;
    this.seed = made.seed;
    this.numActions = made.num_actions;
    this.observationShape = made.observation_shape;
    this.auxLength = made.aux_length;
    this.initialObservation = made.observation;
  }

  get isClosed(): boolean {
    return this.closed;
  }

  private assertOpen(): void {
    if (this.closed) {
      throw new Error(`environment ${this.envId} is closed`);
    }
  }

  /** Advance the world exactly one tick. Actions are integers 0..3. */
  async step(action: number): Promise<StepResult> {
    this.assertOpen();
    if (!Number.isInteger(action) || action < 0 || action > 3) {
      throw new RangeError(`action must be an integer in 0..3, got ${action}`);
    }
    return this.client.request<StepResult>("POST", `/envs/${this.envId}/step`, {
      action,
    });
  }

  /** Rebuild the world deterministically; same seed, same trajectory. */
  async reset(seed?: number): Promise<ObservationPayload> {
    this.assertOpen();
    const data = await this.client.request<{ observation: ObservationPayload }>(
      "POST",
      `/envs/${this.envId}/reset`,
      seed === undefined ? {} : { seed },
    );
    return data.observation;
  }

  async info(): Promise<EnvInfo> {
    this.assertOpen();
    return this.client.request<EnvInfo>("GET", `/envs/${this.envId}`);
  }

  /** Release the server-side session; calling twice is a no-op. */
  async close(): Promise<void> {
    if (this.closed) {
      return;
    }
    this.closed = true;
    await this.client.request<void>("DELETE", `/envs/${this.envId}`);
  }
}

import type {
  AnnotationPayload,
  ConsolidatedView,
  Pos,
  PositionIssue,
  ServiceStats,
  SubmitAck,
  SynsetView,
  TaskView,
} from "./types.js";

/** Error body from the service, with per-position details when present. */
export class ServiceError extends Error {
  readonly code: string;
  readonly positions: PositionIssue[];

  constructor(code: string, message: string, positions: PositionIssue[] = []) {
    super(message);
    this.code = code;
    this.positions = positions;
  }
}

async function parseError(response: Response): Promise<never> {
  let code = `HTTP${response.status}`;
  let message = response.statusText;
  let positions: PositionIssue[] = [];
  try {
    const body = await response.json();
    if (typeof body.error === "string") code = body.error;
    if (typeof body.message === "string") message = body.message;
    if (Array.isArray(body.positions)) positions = body.positions;
  } catch {
    // non-JSON error body; keep the HTTP status
  }
  throw new ServiceError(code, message, positions);
}

/** Thin typed client over the annotation service HTTP API. */
export class AnnotationClient {
  constructor(private readonly baseUrl: string) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  async forest(): Promise<SynsetView[]> {
    const body = await this.getJson<{ synsets: SynsetView[] }>("/forest");
    return body.synsets;
  }

  async searchSynsets(query: string, pos?: Pos): Promise<SynsetView[]> {
    const params = new URLSearchParams({ q: query });
    if (pos) params.set("pos", pos);
    const body = await this.getJson<{ synsets: SynsetView[] }>(
      `/synsets?${params.toString()}`,
    );
    return body.synsets;
  }

  async nextTask(workerId: string): Promise<TaskView | null> {
    const params = new URLSearchParams({ worker: workerId });
    const body = await this.getJson<{ task: TaskView | null }>(
      `/tasks/next?${params.toString()}`,
    );
    return body.task;
  }

  async submit(payload: AnnotationPayload): Promise<SubmitAck> {
    const response = await fetch(`${this.baseUrl}/annotations`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as SubmitAck;
  }

  async consolidated(gifId: string): Promise<ConsolidatedView> {
    return this.getJson<ConsolidatedView>(
      `/gifs/${encodeURIComponent(gifId)}/consolidated`,
    );
  }

  async stats(): Promise<ServiceStats> {
    return this.getJson<ServiceStats>("/stats");
  }
}

import {
  A2AView,
  ApiError,
  EdgeKey,
  ProjectionSummary,
  UploadResult,
  ViewParams,
} from "./types.js";

async function toApiError(res: Response): Promise<ApiError> {
  let code = "Error";
  let message = `HTTP ${res.status}`;
  try {
    const body = await res.json();
    if (typeof body.code === "string") code = body.code;
    if (typeof body.message === "string") message = body.message;
  } catch {
    // non-JSON error body; keep the status line
  }
  return { status: res.status, code, message };
}

async function expectOk(res: Response): Promise<Response> {
  if (!res.ok) {
    throw await toApiError(res);
  }
  return res;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  async uploadLog(content: string | Uint8Array, format: "xoc" | "jsonl"): Promise<UploadResult> {
    const contentType = format === "xoc" ? "application/xml" : "application/x-ndjson";
    const res = await expectOk(
      await fetch(`${this.baseUrl}/logs`, {
        method: "POST",
        headers: { "content-type": contentType },
        body: content as BodyInit,
      }),
    );
    return (await res.json()) as UploadResult;
  }

  async getA2A(snapshotId: string, params: ViewParams): Promise<A2AView> {
    const query = new URLSearchParams({
      metric: params.metric,
      minActivityCount: String(params.minActivityCount),
      minPathCount: String(params.minPathCount),
      weightThreshold: String(params.weightThreshold),
    });
    const res = await expectOk(
      await fetch(`${this.baseUrl}/snapshots/${encodeURIComponent(snapshotId)}/a2a?${query}`),
    );
    const raw = await res.text();
    return { raw, data: JSON.parse(raw) };
  }

  async edgeDrill(snapshotId: string, edges: EdgeKey[]): Promise<string> {
    const res = await expectOk(
      await fetch(`${this.baseUrl}/snapshots/${encodeURIComponent(snapshotId)}/filter`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ kind: "edgeDrill", edges }),
      }),
    );
    return ((await res.json()) as { snapshotId: string }).snapshotId;
  }

  async saveCheckpoint(logId: string, name: string, snapshotId: string): Promise<void> {
    await expectOk(
      await fetch(`${this.baseUrl}/logs/${encodeURIComponent(logId)}/checkpoints`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ name, snapshotId }),
      }),
    );
  }

  async resetCheckpoint(logId: string, name: string): Promise<string> {
    const res = await expectOk(
      await fetch(
        `${this.baseUrl}/logs/${encodeURIComponent(logId)}/checkpoints/${encodeURIComponent(name)}/reset`,
        { method: "POST" },
      ),
    );
    return ((await res.json()) as { snapshotId: string }).snapshotId;
  }

  async projectSummary(
    snapshotId: string,
    cls: string,
    omega: number,
    window: number,
  ): Promise<ProjectionSummary> {
    const res = await expectOk(await this.projectRaw(snapshotId, cls, omega, window, "summary"));
    return (await res.json()) as ProjectionSummary;
  }

  async projectDownload(
    snapshotId: string,
    cls: string,
    omega: number,
    window: number,
    format: "xes" | "csv",
  ): Promise<string> {
    const res = await expectOk(await this.projectRaw(snapshotId, cls, omega, window, format));
    return await res.text();
  }

  private projectRaw(
    snapshotId: string,
    cls: string,
    omega: number,
    window: number,
    format: string,
  ): Promise<Response> {
    return fetch(`${this.baseUrl}/snapshots/${encodeURIComponent(snapshotId)}/project`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ class: cls, omega, window, format }),
    });
  }

  async health(): Promise<boolean> {
    try {
      const res = await fetch(`${this.baseUrl}/healthz`);
      return res.ok;
    } catch {
      return false;
    }
  }
}

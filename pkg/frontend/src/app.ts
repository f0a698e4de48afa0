import { ApiClient } from "./api.js";
import {
  A2AView,
  ApiError,
  EdgeKey,
  edgeKeyId,
  edgeKeyOf,
  Metric,
  ProjectionSummary,
} from "./types.js";

export interface AppState {
  logId: string | null;
  snapshotId: string | null;
  metric: Metric;
  minActivityCount: number;
  minPathCount: number;
  weightThreshold: number;
  parallelEdgeSpacing: number;
  interRankSpacing: number;
  intraCellSpacing: number;
  selected: EdgeKey[];
  checkpoints: string[];
  error: string | null;
}

export interface Download {
  filename: string;
  mediaType: string;
  content: string;
}

function describe(error: unknown): string {
  const apiError = error as ApiError;
  if (apiError && typeof apiError.code === "string" && typeof apiError.message === "string") {
    return `${apiError.code}: ${apiError.message}`;
  }
  return error instanceof Error ? error.message : String(error);
}

/**
 * Server-authoritative view model. Sliders and metric only change how the
 * current snapshot is fetched/drawn; the edge drill filter and checkpoint
 * reset are the only operations that move to another snapshot.
 */
export class AppModel {
  readonly state: AppState = {
    logId: null,
    snapshotId: null,
    metric: "count",
    minActivityCount: 0,
    minPathCount: 0,
    weightThreshold: 0.5,
    parallelEdgeSpacing: 18,
    interRankSpacing: 70,
    intraCellSpacing: 40,
    selected: [],
    checkpoints: [],
    error: null,
  };

  view: A2AView | null = null;
  onChange: (() => void) | null = null;

  constructor(private readonly api: ApiClient) {}

  private notify(): void {
    this.onChange?.();
  }

  private fail(error: unknown): void {
    this.state.error = describe(error);
    this.notify();
  }

  async loadLog(content: string | Uint8Array, format: "xoc" | "jsonl"): Promise<void> {
    try {
      const uploaded = await this.api.uploadLog(content, format);
      this.state.logId = uploaded.logId;
      this.state.snapshotId = uploaded.snapshotId;
      this.state.selected = [];
      this.state.checkpoints = [];
      this.state.error = null;
      await this.refresh();
    } catch (error) {
      this.fail(error);
    }
  }

  /** Re-fetch the current snapshot's view; on failure the prior view stays. */
  async refresh(): Promise<void> {
    if (!this.state.snapshotId) return;
    try {
      const view = await this.api.getA2A(this.state.snapshotId, {
        metric: this.state.metric,
        minActivityCount: this.state.minActivityCount,
        minPathCount: this.state.minPathCount,
        weightThreshold: this.state.weightThreshold,
      });
      this.view = view;
      const displayed = new Set(view.data.edges.map((e) => edgeKeyId(edgeKeyOf(e))));
      this.state.selected = this.state.selected.filter((k) => displayed.has(edgeKeyId(k)));
      this.state.error = null;
      this.notify();
    } catch (error) {
      this.fail(error);
    }
  }

  async setMinActivityCount(n: number): Promise<void> {
    this.state.minActivityCount = Math.max(0, Math.round(n));
    await this.refresh();
  }

  async setMinPathCount(n: number): Promise<void> {
    this.state.minPathCount = Math.max(0, Math.round(n));
    await this.refresh();
  }

  async setWeightThreshold(tau: number): Promise<void> {
    this.state.weightThreshold = Math.min(1, Math.max(0, tau));
    await this.refresh();
  }

  /** Decoration only: no fetch, no topology change. */
  setMetric(metric: Metric): void {
    this.state.metric = metric;
    this.notify();
  }

  setSpacing(control: "parallelEdgeSpacing" | "interRankSpacing" | "intraCellSpacing", value: number): void {
    this.state[control] = Math.max(0, value);
    this.notify();
  }

  /** CTRL+Click semantics: toggles membership in the selection. */
  toggleEdgeSelection(key: EdgeKey): void {
    const id = edgeKeyId(key);
    const index = this.state.selected.findIndex((k) => edgeKeyId(k) === id);
    if (index >= 0) {
      this.state.selected.splice(index, 1);
    } else {
      this.state.selected.push(key);
    }
    this.notify();
  }

  get canFilter(): boolean {
    return this.state.selected.length > 0;
  }

  async applyEdgeFilter(): Promise<void> {
    if (!this.state.snapshotId || !this.canFilter) return;
    try {
      const snapshotId = await this.api.edgeDrill(this.state.snapshotId, this.state.selected);
      this.state.snapshotId = snapshotId;
      this.state.selected = [];
      await this.refresh();
    } catch (error) {
      this.fail(error);
    }
  }

  async saveCheckpoint(name: string): Promise<void> {
    if (!this.state.logId || !this.state.snapshotId || !name) return;
    try {
      await this.api.saveCheckpoint(this.state.logId, name, this.state.snapshotId);
      if (!this.state.checkpoints.includes(name)) {
        this.state.checkpoints.push(name);
      }
      this.state.error = null;
      this.notify();
    } catch (error) {
      this.fail(error);
    }
  }

  async resetToCheckpoint(name: string): Promise<void> {
    if (!this.state.logId) return;
    try {
      const snapshotId = await this.api.resetCheckpoint(this.state.logId, name);
      this.state.snapshotId = snapshotId;
      this.state.selected = [];
      await this.refresh();
    } catch (error) {
      this.fail(error);
    }
  }

  async projectSummary(cls: string, omega: number, window: number): Promise<ProjectionSummary | null> {
    if (!this.state.snapshotId) return null;
    try {
      const summary = await this.api.projectSummary(this.state.snapshotId, cls, omega, window);
      this.state.error = null;
      this.notify();
      return summary;
    } catch (error) {
      this.fail(error);
      return null;
    }
  }

  async projectDownload(
    cls: string,
    omega: number,
    window: number,
    format: "xes" | "csv",
  ): Promise<Download | null> {
    if (!this.state.snapshotId) return null;
    try {
      const content = await this.api.projectDownload(
        this.state.snapshotId, cls, omega, window, format);
      this.state.error = null;
      this.notify();
      return {
        filename: `projection-${cls}.${format}`,
        mediaType: format === "xes" ? "application/xml" : "text/csv",
        content,
      };
    } catch (error) {
      this.fail(error);
      return null;
    }
  }

  /** Object classes present in the displayed edges (perspective choices). */
  get classes(): string[] {
    if (!this.view) return [];
    return [...new Set(this.view.data.edges.map((e) => e.class))].sort();
  }
}

// Thin typed client over the review service. Every UI interaction with the
// backend goes through here, so tests can swap fetch for a stub.

import {
  Annotation,
  AnnotationPatch,
  AnomalyReport,
  DeltaEntry,
  Manifest,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class StaleRevisionError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "StaleRevisionError";
  }
}

export class ApiClient {
  private base: string;
  private fetchImpl: FetchLike;

  constructor(base = "", fetchImpl: FetchLike = (i, init) => fetch(i, init)) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(this.base + path);
    if (!resp.ok) throw new Error(`GET ${path} failed: ${resp.status}`);
    return resp.json() as Promise<T>;
  }

  manifest(): Promise<Manifest> {
    return this.getJson("/manifest");
  }

  annotation(frameIndex: number): Promise<Annotation> {
    return this.getJson(`/annotations/${frameIndex}`);
  }

  annotations(): Promise<{ revision: number; annotations: Annotation[] }> {
    return this.getJson("/annotations");
  }

  deltas(): Promise<{ entries: DeltaEntry[] }> {
    return this.getJson("/deltas");
  }

  anomalies(threshold?: number): Promise<AnomalyReport> {
    const q = threshold === undefined ? "" : `?threshold=${threshold}`;
    return this.getJson(`/anomalies${q}`);
  }

  stats(): Promise<Record<string, number>> {
    return this.getJson("/stats");
  }

  frameUrl(frameIndex: number, overlays: string[] = []): string {
    const q = overlays.length ? `?overlay=${overlays.join(",")}` : "";
    return `${this.base}/frames/${frameIndex}.png${q}`;
  }

  async nextFrame(fromIndex: number, direction: 1 | -1,
                  threshold?: number): Promise<number | null> {
    let path = `/frames/next?from_index=${fromIndex}&direction=${direction}`;
    if (threshold !== undefined) path += `&threshold=${threshold}`;
    const resp = await this.fetchImpl(this.base + path);
    if (resp.status === 404) return null;
    if (!resp.ok) throw new Error(`navigation failed: ${resp.status}`);
    const body = (await resp.json()) as { frame_index: number };
    return body.frame_index;
  }

  async saveAnnotation(frameIndex: number, patch: AnnotationPatch): Promise<Annotation> {
    const resp = await this.fetchImpl(`${this.base}/annotations/${frameIndex}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(patch),
    });
    if (resp.status === 409) {
      const body = (await resp.json()) as { detail: string };
      throw new StaleRevisionError(body.detail);
    }
    if (!resp.ok) throw new Error(`save failed: ${resp.status}`);
    return resp.json() as Promise<Annotation>;
  }

  async dismissAnomaly(id: string): Promise<string[]> {
    const resp = await this.fetchImpl(`${this.base}/anomalies/${id}/dismiss`, {
      method: "POST",
    });
    if (!resp.ok) throw new Error(`dismiss failed: ${resp.status}`);
    const body = (await resp.json()) as { dismissed: string[] };
    return body.dismissed;
  }
}

/**
 * HTTP client for the rotbox service.
 *
 * Talks only to the public endpoints; all numerics stay on the Python
 * side. Boxes are rows of 5 numbers (cx, cy, w, h, theta_deg) or 8
 * corner coordinates (x1 y1 ... x4 y4).
 */

export type BoxRow = number[];

export interface PenaltyConfig {
  kind: "absolute" | "smooth_l1";
  beta?: number;
}

export interface BatchLossResult {
  losses: number[];
  grads: number[][];
}

export interface VersionInfo {
  name: string;
  version: string;
}

export class RotboxServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`rotbox service returned ${status}: ${detail}`);
    this.name = "RotboxServiceError";
  }
}

export class RotboxClient {
  private readonly baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const parsed = (await resp.json()) as { detail?: unknown };
        if (parsed.detail !== undefined) detail = JSON.stringify(parsed.detail);
      } catch {
        // non-JSON error body, keep the status text
      }
      throw new RotboxServiceError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  async health(): Promise<boolean> {
    try {
      const resp = await fetch(this.baseUrl + "/health");
      return resp.ok;
    } catch {
      return false;
    }
  }

  async version(): Promise<VersionInfo> {
    const resp = await fetch(this.baseUrl + "/version");
    if (!resp.ok) {
      throw new RotboxServiceError(resp.status, resp.statusText);
    }
    return (await resp.json()) as VersionInfo;
  }

  /** Exact IoU for each aligned pair of box rows. */
  async batchIou(a: BoxRow[], b: BoxRow[]): Promise<number[]> {
    const out = await this.post<{ iou: number[] }>("/batch/iou", { a, b });
    return out.iou;
  }

  /** Losses and per-row gradients for aligned pred/gt/anchor rows. */
  async batchLossAndGrad(
    pred: BoxRow[],
    gt: BoxRow[],
    anchors: BoxRow[],
    kind: "5p" | "8p" = "5p",
    penalty: PenaltyConfig = { kind: "absolute" },
  ): Promise<BatchLossResult> {
    return this.post<BatchLossResult>("/batch/loss-and-grad", {
      pred,
      gt,
      anchors,
      kind,
      penalty,
    });
  }
}

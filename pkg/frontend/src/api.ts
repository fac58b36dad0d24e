/** Thin typed client for the review service's HTTP+JSON endpoints. */

import type { AgreementPayload, LabelSubmission, TaskPayload } from "./types.js";

/** The service answered with a non-2xx status (validation error, 404, 409...). */
export class ServiceRejection extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(detail);
    this.name = "ServiceRejection";
  }
}

/** The service could not be reached at all. */
export class NetworkFailure extends Error {
  constructor(cause: unknown) {
    const reason = cause instanceof Error ? cause.message : String(cause);
    super(`review service unreachable: ${reason}`);
    this.name = "NetworkFailure";
  }
}

/** The endpoint surface the UI depends on; tests substitute fakes for it. */
export interface ReviewApi {
  nextTask(annotator: string, split: string): Promise<TaskPayload | null>;
  getExample(exampleId: string): Promise<TaskPayload>;
  submitLabel(label: LabelSubmission): Promise<void>;
  submitCorrection(exampleId: string, annotatorId: string, correctedSummary: string): Promise<void>;
  agreement(split: string, aspect: string): Promise<AgreementPayload>;
  exportSplit(split?: string): Promise<string>;
}

export class ReviewClient implements ReviewApi {
  constructor(readonly baseUrl: string = "") {}

  async nextTask(annotator: string, split: string): Promise<TaskPayload | null> {
    const params = new URLSearchParams({ annotator, split });
    const response = await this.request("GET", `/tasks/next?${params}`);
    return (await response.json()) as TaskPayload | null;
  }

  async getExample(exampleId: string): Promise<TaskPayload> {
    const response = await this.request("GET", `/examples/${encodeURIComponent(exampleId)}`);
    return (await response.json()) as TaskPayload;
  }

  async submitLabel(label: LabelSubmission): Promise<void> {
    await this.request("POST", "/labels", label);
  }

  async submitCorrection(
    exampleId: string,
    annotatorId: string,
    correctedSummary: string,
  ): Promise<void> {
    await this.request("POST", "/corrections", {
      example_id: exampleId,
      annotator_id: annotatorId,
      corrected_summary: correctedSummary,
    });
  }

  async agreement(split: string, aspect: string): Promise<AgreementPayload> {
    const params = new URLSearchParams({ split, aspect });
    const response = await this.request("GET", `/agreement?${params}`);
    return (await response.json()) as AgreementPayload;
  }

  async exportSplit(split?: string): Promise<string> {
    const path = split === undefined ? "/export" : `/export?split=${encodeURIComponent(split)}`;
    const response = await this.request("GET", path);
    return await response.text();
  }

  private async request(method: string, path: string, body?: unknown): Promise<Response> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method,
        headers: body === undefined ? undefined : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new NetworkFailure(cause);
    }
    if (!response.ok) {
      throw new ServiceRejection(response.status, await extractDetail(response));
    }
    return response;
  }
}

async function extractDetail(response: Response): Promise<string> {
  try {
    const payload: unknown = await response.json();
    if (
      typeof payload === "object" &&
      payload !== null &&
      typeof (payload as { detail?: unknown }).detail === "string"
    ) {
      return (payload as { detail: string }).detail;
    }
  } catch {
    // non-JSON error body; fall through to the status line
  }
  return `HTTP ${response.status}`;
}

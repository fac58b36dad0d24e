/** Shared test doubles and fixtures. */

import { NetworkFailure, ServiceRejection } from "../src/api.js";
import type { ReviewApi } from "../src/api.js";
import type { AgreementPayload, LabelSubmission, TaskPayload } from "../src/types.js";

export function sampleTask(overrides: Partial<TaskPayload> = {}): TaskPayload {
  return {
    example_id: "t-001",
    split: "test",
    query: "How many heads of the departments are older than 56?",
    input_tables: [
      {
        name: "head",
        headers: ["head_ID", "name", "age"],
        rows: [
          ["1", "Tiger Woods", "67.0"],
          ["2", "Sergio Garcia", "68.0"],
        ],
      },
    ],
    execution_table: { name: "result", headers: ["count(*)"], rows: [["5"]] },
    candidate_summary: "There are 5 heads of departments older than 56.",
    n_labels: 0,
    ...overrides,
  };
}

export interface Correction {
  example_id: string;
  annotator_id: string;
  corrected_summary: string;
}

/** In-memory ReviewApi: a queue of tasks plus switchable failure modes. */
export class FakeClient implements ReviewApi {
  tasks: (TaskPayload | null)[] = [];
  labels: LabelSubmission[] = [];
  corrections: Correction[] = [];
  agreementReport: AgreementPayload | null = null;
  failNextTask = false;
  rejectLabels: string | null = null;
  rejectCorrections: string | null = null;
  rejectAgreement: string | null = null;

  async nextTask(): Promise<TaskPayload | null> {
    if (this.failNextTask) {
      throw new NetworkFailure(new Error("connection refused"));
    }
    return this.tasks.shift() ?? null;
  }

  async getExample(exampleId: string): Promise<TaskPayload> {
    return sampleTask({ example_id: exampleId });
  }

  async submitLabel(label: LabelSubmission): Promise<void> {
    if (this.rejectLabels !== null) {
      throw new ServiceRejection(422, this.rejectLabels);
    }
    this.labels.push(label);
  }

  async submitCorrection(
    exampleId: string,
    annotatorId: string,
    correctedSummary: string,
  ): Promise<void> {
    if (this.rejectCorrections !== null) {
      throw new ServiceRejection(422, this.rejectCorrections);
    }
    this.corrections.push({
      example_id: exampleId,
      annotator_id: annotatorId,
      corrected_summary: correctedSummary,
    });
  }

  async agreement(split: string, aspect: string): Promise<AgreementPayload> {
    if (this.rejectAgreement !== null) {
      throw new ServiceRejection(409, this.rejectAgreement);
    }
    if (this.agreementReport === null) {
      throw new ServiceRejection(409, "no example has two or more labels");
    }
    return { ...this.agreementReport, split, aspect };
  }

  async exportSplit(): Promise<string> {
    return "";
  }
}

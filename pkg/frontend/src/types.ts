/**
 * JSON payloads exchanged with the review service.
 *
 * Field names mirror the service responses exactly; the UI renders them
 * verbatim and never computes metrics of its own.
 */

export interface TableData {
  name: string;
  headers: string[];
  rows: string[][];
}

export interface TaskPayload {
  example_id: string;
  split: string;
  query: string;
  input_tables: TableData[];
  execution_table: TableData;
  candidate_summary: string;
  n_labels: number;
}

export interface AgreementPayload {
  kappa: number;
  mean_observed_agreement: number;
  expected_agreement: number;
  n_items: number;
  n_raters: number;
  split: string;
  aspect: string;
}

export interface LabelSubmission {
  example_id: string;
  annotator_id: string;
  faithfulness: number;
  fluency: number;
}

/** A judgment being assembled in the UI; null means "not set yet". */
export interface JudgmentDraft {
  faithfulness: number | null;
  fluency: number | null;
}

export const SPLITS = ["train", "validation", "test"] as const;
export const ASPECTS = ["faithfulness", "fluency"] as const;

/**
 * UI state machine for the labeling session and the agreement panel.
 *
 * The controller owns the current task and the judgment draft, talks to the
 * service through a ReviewApi, and reports every state change through a
 * single callback so the DOM layer stays a pure projection of state. The
 * server is the source of truth: submitting advances only after the service
 * accepts, and rejections surface inline without discarding the annotator's
 * input.
 */

import { NetworkFailure, ServiceRejection } from "./api.js";
import type { ReviewApi } from "./api.js";
import { applyKey, EMPTY_DRAFT, isSendable } from "./judgment.js";
import type { AgreementPayload, JudgmentDraft, TaskPayload } from "./types.js";

/** Post-correction is collected only where the dataset accepts it. */
export const CORRECTABLE_SPLITS: readonly string[] = ["validation", "test"];

export type AppState =
  | { kind: "idle" }
  | { kind: "loading" }
  | {
      kind: "task";
      task: TaskPayload;
      draft: JudgmentDraft;
      editing: boolean;
      correctionText: string;
      banner: string | null;
      submitting: boolean;
    }
  | { kind: "done"; split: string }
  | { kind: "offline"; message: string };

export function messageOf(error: unknown): string {
  if (error instanceof ServiceRejection || error instanceof NetworkFailure) {
    return error.message;
  }
  return error instanceof Error ? error.message : String(error);
}

export class AppController {
  state: AppState = { kind: "idle" };

  constructor(
    private readonly client: ReviewApi,
    readonly annotator: string,
    readonly split: string,
    private readonly onChange: (controller: AppController) => void = () => {},
  ) {}

  private setState(state: AppState): void {
    this.state = state;
    this.onChange(this);
  }

  async start(): Promise<void> {
    await this.loadNext();
  }

  async loadNext(): Promise<void> {
    this.setState({ kind: "loading" });
    let task: TaskPayload | null;
    try {
      task = await this.client.nextTask(this.annotator, this.split);
    } catch (error) {
      this.setState({ kind: "offline", message: messageOf(error) });
      return;
    }
    if (task === null) {
      this.setState({ kind: "done", split: this.split });
      return;
    }
    this.setState({
      kind: "task",
      task,
      draft: { ...EMPTY_DRAFT },
      editing: false,
      correctionText: task.candidate_summary,
      banner: null,
      submitting: false,
    });
  }

  get canSubmit(): boolean {
    return this.state.kind === "task" && !this.state.submitting && isSendable(this.state.draft);
  }

  get canEdit(): boolean {
    return this.state.kind === "task" && CORRECTABLE_SPLITS.includes(this.state.task.split);
  }

  setFaithfulness(value: number): void {
    this.patchDraft({ faithfulness: value });
  }

  setFluency(value: number): void {
    this.patchDraft({ fluency: value });
  }

  private patchDraft(patch: Partial<JudgmentDraft>): void {
    if (this.state.kind !== "task" || this.state.submitting) {
      return;
    }
    this.setState({ ...this.state, draft: { ...this.state.draft, ...patch }, banner: null });
  }

  toggleEditing(): void {
    if (this.state.kind !== "task" || this.state.submitting || !this.canEdit) {
      return;
    }
    this.setState({ ...this.state, editing: !this.state.editing });
  }

  setCorrectionText(text: string): void {
    if (this.state.kind !== "task" || this.state.submitting || !this.state.editing) {
      return;
    }
    this.setState({ ...this.state, correctionText: text });
  }

  /** Keyboard shortcuts: digits fill the draft, Enter submits. */
  async pressKey(key: string): Promise<void> {
    if (this.state.kind !== "task") {
      return;
    }
    if (key === "Enter") {
      await this.submit();
      return;
    }
    const next = applyKey(this.state.draft, key);
    if (next !== null) {
      this.patchDraft(next);
    }
  }

  /**
   * POST the judgment (and the correction when the summary was edited), then
   * advance to the next task. Incomplete or out-of-range drafts never reach
   * the network; a service rejection keeps the task and the input intact.
   */
  async submit(): Promise<void> {
    if (this.state.kind !== "task" || !this.canSubmit) {
      return;
    }
    const taskState = this.state;
    const { task, draft, editing, correctionText } = taskState;
    this.setState({ ...taskState, submitting: true, banner: null });
    try {
      await this.client.submitLabel({
        example_id: task.example_id,
        annotator_id: this.annotator,
        faithfulness: draft.faithfulness as number,
        fluency: draft.fluency as number,
      });
      const corrected = correctionText.trim();
      if (editing && corrected !== "" && corrected !== task.candidate_summary) {
        await this.client.submitCorrection(task.example_id, this.annotator, corrected);
      }
    } catch (error) {
      this.setState({ ...taskState, submitting: false, banner: messageOf(error) });
      return;
    }
    await this.loadNext();
  }
}

export type AgreementView =
  | { kind: "empty" }
  | { kind: "report"; report: AgreementPayload }
  | { kind: "notice"; message: string };

/** Refresh-on-demand dashboard over GET /agreement. */
export class AgreementPanel {
  view: AgreementView = { kind: "empty" };

  constructor(
    private readonly client: ReviewApi,
    private readonly onChange: (panel: AgreementPanel) => void = () => {},
  ) {}

  async refresh(split: string, aspect: string): Promise<void> {
    try {
      this.view = { kind: "report", report: await this.client.agreement(split, aspect) };
    } catch (error) {
      this.view = { kind: "notice", message: messageOf(error) };
    }
    this.onChange(this);
  }
}

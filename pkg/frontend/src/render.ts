/**
 * DOM layer: a scaffold built once, then re-projected from controller state
 * on every change. Every displayed value is copied verbatim from the service
 * payload — no truncation and no client-side arithmetic.
 */

import type { AgreementPanel, AppController } from "./app.js";
import { describeAgreement } from "./format.js";
import { ASPECTS, SPLITS } from "./types.js";
import type { TableData, TaskPayload } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className !== undefined) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderTableGrid(table: TableData): HTMLTableElement {
  const grid = el("table", "grid");
  grid.appendChild(el("caption", undefined, table.name));
  const thead = el("thead");
  const headRow = el("tr");
  for (const header of table.headers) {
    headRow.appendChild(el("th", undefined, header));
  }
  thead.appendChild(headRow);
  grid.appendChild(thead);
  const tbody = el("tbody");
  for (const row of table.rows) {
    const tr = el("tr");
    for (const value of row) {
      tr.appendChild(el("td", undefined, value));
    }
    tbody.appendChild(tr);
  }
  grid.appendChild(tbody);
  return grid;
}

export interface ViewRefs {
  annotatorInput: HTMLInputElement;
  splitSelect: HTMLSelectElement;
  startButton: HTMLButtonElement;
  banner: HTMLElement;
  loadingNote: HTMLElement;
  taskSection: HTMLElement;
  queryText: HTMLElement;
  inputTables: HTMLElement;
  executionTable: HTMLElement;
  summaryText: HTMLElement;
  labelsCount: HTMLElement;
  editToggle: HTMLInputElement;
  correction: HTMLTextAreaElement;
  faithfulnessButtons: Map<number, HTMLButtonElement>;
  fluencyButtons: Map<number, HTMLButtonElement>;
  submitButton: HTMLButtonElement;
  doneSection: HTMLElement;
  offlineSection: HTMLElement;
  offlineMessage: HTMLElement;
  retryButton: HTMLButtonElement;
  agreeSplit: HTMLSelectElement;
  agreeAspect: HTMLSelectElement;
  agreeRefresh: HTMLButtonElement;
  agreementResult: HTMLElement;
  /** example_id whose evidence panels are currently in the DOM. */
  renderedExampleId: string | null;
}

function optionSelect(values: readonly string[], selected: string): HTMLSelectElement {
  const select = el("select");
  for (const value of values) {
    const option = el("option", undefined, value);
    option.value = value;
    select.appendChild(option);
  }
  select.value = selected;
  return select;
}

export function buildScaffold(root: HTMLElement): ViewRefs {
  root.appendChild(el("h1", undefined, "Summary review"));

  const session = el("section", "session");
  const annotatorLabel = el("label", undefined, "Annotator ");
  const annotatorInput = el("input");
  annotatorInput.placeholder = "your id";
  annotatorLabel.appendChild(annotatorInput);
  const splitLabel = el("label", undefined, "Split ");
  const splitSelect = optionSelect(SPLITS, "test");
  splitLabel.appendChild(splitSelect);
  const startButton = el("button", undefined, "Start session");
  session.append(annotatorLabel, splitLabel, startButton);
  root.appendChild(session);

  const banner = el("div", "banner");
  banner.setAttribute("role", "alert");
  banner.hidden = true;
  root.appendChild(banner);

  const loadingNote = el("p", "loading", "Loading…");
  loadingNote.hidden = true;
  root.appendChild(loadingNote);

  const taskSection = el("section", "task");
  taskSection.hidden = true;

  const panels = el("div", "panels");
  const queryPanel = el("section", "panel");
  queryPanel.appendChild(el("h2", undefined, "Query"));
  const queryText = el("p", "query-text");
  queryPanel.appendChild(queryText);
  const inputPanel = el("section", "panel");
  inputPanel.appendChild(el("h2", undefined, "Input tables"));
  const inputTables = el("div", "input-tables");
  inputPanel.appendChild(inputTables);
  const executionPanel = el("section", "panel");
  executionPanel.appendChild(el("h2", undefined, "Execution result"));
  const executionTable = el("div", "execution-table");
  executionPanel.appendChild(executionTable);
  panels.append(queryPanel, inputPanel, executionPanel);
  taskSection.appendChild(panels);

  const summaryPanel = el("section", "panel summary");
  summaryPanel.appendChild(el("h2", undefined, "Candidate summary"));
  const summaryText = el("p", "summary-text");
  summaryPanel.appendChild(summaryText);
  const meta = el("p", "meta", "labels so far: ");
  const labelsCount = el("span", "labels-count");
  meta.appendChild(labelsCount);
  summaryPanel.appendChild(meta);
  const editLabel = el("label", "edit-toggle");
  const editToggle = el("input");
  editToggle.type = "checkbox";
  editLabel.append(editToggle, document.createTextNode(" suggest a corrected summary"));
  summaryPanel.appendChild(editLabel);
  const correction = el("textarea", "correction");
  correction.rows = 4;
  correction.hidden = true;
  summaryPanel.appendChild(correction);
  taskSection.appendChild(summaryPanel);

  const controls = el("section", "controls");
  const faithfulnessSet = el("fieldset");
  faithfulnessSet.appendChild(el("legend", undefined, "Faithful to the tables? (keys 0/1)"));
  const faithfulnessButtons = new Map<number, HTMLButtonElement>();
  for (const [value, caption] of [
    [0, "0 — unfaithful"],
    [1, "1 — faithful"],
  ] as const) {
    const button = el("button", "choice", caption);
    faithfulnessButtons.set(value, button);
    faithfulnessSet.appendChild(button);
  }
  const fluencySet = el("fieldset");
  fluencySet.appendChild(el("legend", undefined, "Fluency, 1-5 (keys 1-5)"));
  const fluencyButtons = new Map<number, HTMLButtonElement>();
  for (let value = 1; value <= 5; value += 1) {
    const button = el("button", "choice", String(value));
    fluencyButtons.set(value, button);
    fluencySet.appendChild(button);
  }
  const submitButton = el("button", "submit", "Submit and next (Enter)");
  submitButton.disabled = true;
  controls.append(faithfulnessSet, fluencySet, submitButton);
  taskSection.appendChild(controls);
  root.appendChild(taskSection);

  const doneSection = el("section", "done");
  doneSection.hidden = true;
  doneSection.appendChild(el("h2", undefined, "All done"));
  doneSection.appendChild(el("p", undefined, "No unlabeled examples remain in this split."));
  root.appendChild(doneSection);

  const offlineSection = el("section", "offline");
  offlineSection.hidden = true;
  const offlineMessage = el("p", "offline-message");
  const retryButton = el("button", "retry", "Retry");
  offlineSection.append(offlineMessage, retryButton);
  root.appendChild(offlineSection);

  const agreement = el("aside", "agreement");
  agreement.appendChild(el("h2", undefined, "Agreement"));
  const agreeSplit = optionSelect(SPLITS, "test");
  const agreeAspect = optionSelect(ASPECTS, "faithfulness");
  const agreeRefresh = el("button", undefined, "Refresh");
  const agreementResult = el("p", "agreement-result");
  agreement.append(agreeSplit, agreeAspect, agreeRefresh, agreementResult);
  root.appendChild(agreement);

  return {
    annotatorInput,
    splitSelect,
    startButton,
    banner,
    loadingNote,
    taskSection,
    queryText,
    inputTables,
    executionTable,
    summaryText,
    labelsCount,
    editToggle,
    correction,
    faithfulnessButtons,
    fluencyButtons,
    submitButton,
    doneSection,
    offlineSection,
    offlineMessage,
    retryButton,
    agreeSplit,
    agreeAspect,
    agreeRefresh,
    agreementResult,
    renderedExampleId: null,
  };
}

function renderEvidence(refs: ViewRefs, task: TaskPayload): void {
  refs.queryText.textContent = task.query;
  refs.inputTables.replaceChildren(...task.input_tables.map(renderTableGrid));
  refs.executionTable.replaceChildren(renderTableGrid(task.execution_table));
  refs.summaryText.textContent = task.candidate_summary;
  refs.renderedExampleId = task.example_id;
}

export function renderApp(refs: ViewRefs, controller: AppController): void {
  const state = controller.state;
  refs.loadingNote.hidden = state.kind !== "loading";
  refs.taskSection.hidden = state.kind !== "task";
  refs.doneSection.hidden = state.kind !== "done";
  refs.offlineSection.hidden = state.kind !== "offline";
  refs.banner.hidden = true;

  if (state.kind === "offline") {
    refs.offlineMessage.textContent = state.message;
    return;
  }
  if (state.kind !== "task") {
    refs.renderedExampleId = null;
    return;
  }

  if (refs.renderedExampleId !== state.task.example_id) {
    renderEvidence(refs, state.task);
  }
  refs.labelsCount.textContent = String(state.task.n_labels);
  if (state.banner !== null) {
    refs.banner.textContent = state.banner;
    refs.banner.hidden = false;
  }

  for (const [value, button] of refs.faithfulnessButtons) {
    button.classList.toggle("selected", state.draft.faithfulness === value);
  }
  for (const [value, button] of refs.fluencyButtons) {
    button.classList.toggle("selected", state.draft.fluency === value);
  }
  refs.editToggle.checked = state.editing;
  refs.editToggle.disabled = !controller.canEdit;
  refs.editToggle.title = controller.canEdit
    ? "propose a corrected summary alongside your label"
    : "corrections are accepted for validation and test examples only";
  refs.correction.hidden = !state.editing;
  if (refs.correction.value !== state.correctionText) {
    refs.correction.value = state.correctionText;
  }
  refs.submitButton.disabled = !controller.canSubmit;
}

export function renderAgreement(refs: ViewRefs, panel: AgreementPanel): void {
  const view = panel.view;
  refs.agreementResult.classList.toggle("notice", view.kind === "notice");
  if (view.kind === "empty") {
    refs.agreementResult.textContent = "";
  } else if (view.kind === "report") {
    refs.agreementResult.textContent = describeAgreement(view.report);
  } else {
    refs.agreementResult.textContent = view.message;
  }
}

function isTypingTarget(target: EventTarget | null): boolean {
  return (
    target instanceof HTMLInputElement ||
    target instanceof HTMLTextAreaElement ||
    target instanceof HTMLSelectElement
  );
}

export function wireEvents(
  refs: ViewRefs,
  getController: () => AppController | null,
  getPanel: () => AgreementPanel,
): void {
  for (const [value, button] of refs.faithfulnessButtons) {
    button.addEventListener("click", () => getController()?.setFaithfulness(value));
  }
  for (const [value, button] of refs.fluencyButtons) {
    button.addEventListener("click", () => getController()?.setFluency(value));
  }
  refs.submitButton.addEventListener("click", () => {
    void getController()?.submit();
  });
  refs.editToggle.addEventListener("change", () => getController()?.toggleEditing());
  refs.correction.addEventListener("input", () =>
    getController()?.setCorrectionText(refs.correction.value),
  );
  refs.retryButton.addEventListener("click", () => {
    void getController()?.loadNext();
  });
  refs.agreeRefresh.addEventListener("click", () => {
    void getPanel().refresh(refs.agreeSplit.value, refs.agreeAspect.value);
  });
  document.addEventListener("keydown", (event) => {
    if (isTypingTarget(event.target)) {
      return;
    }
    void getController()?.pressKey(event.key);
  });
}

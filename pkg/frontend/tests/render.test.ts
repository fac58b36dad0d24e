// @vitest-environment happy-dom

import { beforeEach, describe, expect, it } from "vitest";

import { AgreementPanel, AppController } from "../src/app.js";
import { buildScaffold, renderAgreement, renderApp, renderTableGrid, wireEvents } from "../src/render.js";
import type { ViewRefs } from "../src/render.js";
import { FakeClient, sampleTask } from "./helpers.js";

function freshRefs(): ViewRefs {
  document.body.innerHTML = '<div id="app"></div>';
  return buildScaffold(document.getElementById("app") as HTMLElement);
}

async function startedApp(
  client: FakeClient,
  refs: ViewRefs,
): Promise<AppController> {
  const app = new AppController(client, "rater-1", "test", () => renderApp(refs, app));
  await app.start();
  return app;
}

describe("table grids", () => {
  it("renders every header and cell verbatim", () => {
    const grid = renderTableGrid({
      name: "teacher",
      headers: ["Name", "Age"],
      rows: [
        ["Joseph Huts", "32"],
        ["", "29"],
      ],
    });
    expect(grid.querySelector("caption")?.textContent).toBe("teacher");
    const headers = [...grid.querySelectorAll("th")].map((cell) => cell.textContent);
    expect(headers).toEqual(["Name", "Age"]);
    const body = [...grid.querySelectorAll("tbody tr")].map((row) =>
      [...row.querySelectorAll("td")].map((cell) => cell.textContent),
    );
    expect(body).toEqual([
      ["Joseph Huts", "32"],
      ["", "29"],
    ]);
  });

  it("never truncates long cell values", () => {
    const long = "x".repeat(4000);
    const grid = renderTableGrid({ name: "t", headers: ["v"], rows: [[long]] });
    expect(grid.querySelector("td")?.textContent).toBe(long);
  });
});

describe("task screen", () => {
  let refs: ViewRefs;

  beforeEach(() => {
    refs = freshRefs();
  });

  it("shows the three evidence panels and the summary", async () => {
    const client = new FakeClient();
    const task = sampleTask();
    client.tasks = [task];
    await startedApp(client, refs);

    expect(refs.taskSection.hidden).toBe(false);
    expect(refs.doneSection.hidden).toBe(true);
    expect(refs.queryText.textContent).toBe(task.query);
    expect(refs.inputTables.querySelectorAll("table.grid")).toHaveLength(1);
    expect(refs.inputTables.querySelectorAll("tbody tr")).toHaveLength(2);
    expect(refs.executionTable.querySelector("td")?.textContent).toBe("5");
    expect(refs.summaryText.textContent).toBe(task.candidate_summary);
    expect(refs.labelsCount.textContent).toBe("0");
    expect(refs.submitButton.disabled).toBe(true);
  });

  it("enables submit only once both controls are set and in range", async () => {
    const client = new FakeClient();
    client.tasks = [sampleTask()];
    const app = await startedApp(client, refs);

    app.setFaithfulness(1);
    expect(refs.submitButton.disabled).toBe(true);
    app.setFluency(5);
    expect(refs.submitButton.disabled).toBe(false);
    expect(refs.faithfulnessButtons.get(1)?.classList.contains("selected")).toBe(true);
    expect(refs.fluencyButtons.get(5)?.classList.contains("selected")).toBe(true);

    app.setFluency(9);
    expect(refs.submitButton.disabled).toBe(true);
  });

  it("drives the controller from button clicks and submits", async () => {
    const client = new FakeClient();
    client.tasks = [sampleTask()];
    const app = await startedApp(client, refs);
    wireEvents(
      refs,
      () => app,
      () => new AgreementPanel(client),
    );

    refs.faithfulnessButtons.get(0)?.click();
    refs.fluencyButtons.get(3)?.click();
    expect(refs.submitButton.disabled).toBe(false);
    refs.submitButton.click();
    await new Promise((resolve) => setTimeout(resolve, 0));
    expect(client.labels).toEqual([
      { example_id: "t-001", annotator_id: "rater-1", faithfulness: 0, fluency: 3 },
    ]);
    expect(refs.doneSection.hidden).toBe(false);
    expect(refs.taskSection.hidden).toBe(true);
  });

  it("applies digit keys from the document but not from form fields", async () => {
    const client = new FakeClient();
    client.tasks = [sampleTask()];
    const app = await startedApp(client, refs);
    wireEvents(
      refs,
      () => app,
      () => new AgreementPanel(client),
    );

    document.body.dispatchEvent(
      new KeyboardEvent("keydown", { key: "1", bubbles: true }),
    );
    expect(app.state.kind === "task" && app.state.draft.faithfulness).toBe(1);

    app.toggleEditing();
    refs.correction.dispatchEvent(
      new KeyboardEvent("keydown", { key: "4", bubbles: true }),
    );
    expect(app.state.kind === "task" && app.state.draft.fluency).toBeNull();
  });

  it("reveals the correction editor through the opt-in toggle", async () => {
    const client = new FakeClient();
    client.tasks = [sampleTask()];
    const app = await startedApp(client, refs);

    expect(refs.correction.hidden).toBe(true);
    expect(refs.editToggle.disabled).toBe(false);
    app.toggleEditing();
    expect(refs.correction.hidden).toBe(false);
    expect(refs.correction.value).toBe(sampleTask().candidate_summary);
  });

  it("disables the correction toggle on train examples", async () => {
    const client = new FakeClient();
    client.tasks = [sampleTask({ split: "train" })];
    await startedApp(client, refs);
    expect(refs.editToggle.disabled).toBe(true);
    expect(refs.editToggle.title).toContain("validation and test");
  });

  it("shows a rejection banner and keeps the task on screen", async () => {
    const client = new FakeClient();
    client.tasks = [sampleTask()];
    client.rejectLabels = "fluency must be an integer in [1, 5]";
    const app = await startedApp(client, refs);
    app.setFaithfulness(1);
    app.setFluency(2);
    await app.submit();
    expect(refs.banner.hidden).toBe(false);
    expect(refs.banner.textContent).toContain("fluency must be");
    expect(refs.taskSection.hidden).toBe(false);
  });
});

describe("terminal screens", () => {
  it("shows the all-done screen when no tasks remain", async () => {
    const refs = freshRefs();
    await startedApp(new FakeClient(), refs);
    expect(refs.doneSection.hidden).toBe(false);
    expect(refs.doneSection.textContent).toContain("All done");
    expect(refs.taskSection.hidden).toBe(true);
  });

  it("shows the retry screen on network failure and recovers", async () => {
    const refs = freshRefs();
    const client = new FakeClient();
    client.failNextTask = true;
    const app = await startedApp(client, refs);
    wireEvents(
      refs,
      () => app,
      () => new AgreementPanel(client),
    );
    expect(refs.offlineSection.hidden).toBe(false);
    expect(refs.offlineMessage.textContent).toContain("unreachable");

    client.failNextTask = false;
    client.tasks = [sampleTask()];
    refs.retryButton.click();
    await new Promise((resolve) => setTimeout(resolve, 0));
    expect(refs.offlineSection.hidden).toBe(true);
    expect(refs.taskSection.hidden).toBe(false);
  });
});

describe("agreement panel rendering", () => {
  it("shows the formatted report after a refresh", async () => {
    const refs = freshRefs();
    const client = new FakeClient();
    client.agreementReport = {
      kappa: 1,
      mean_observed_agreement: 1,
      expected_agreement: 0.5,
      n_items: 3,
      n_raters: 2,
      split: "",
      aspect: "",
    };
    const panel = new AgreementPanel(client, () => renderAgreement(refs, panel));
    await panel.refresh("test", "faithfulness");
    expect(refs.agreementResult.textContent).toContain("kappa = 1.00");
    expect(refs.agreementResult.classList.contains("notice")).toBe(false);
  });

  it("shows service errors as a notice", async () => {
    const refs = freshRefs();
    const client = new FakeClient();
    const panel = new AgreementPanel(client, () => renderAgreement(refs, panel));
    await panel.refresh("train", "faithfulness");
    expect(refs.agreementResult.classList.contains("notice")).toBe(true);
    expect(refs.agreementResult.textContent).toContain("two or more labels");
  });
});

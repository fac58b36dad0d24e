/** Browser entry point: builds the scaffold and wires it to the service. */

import { ReviewClient } from "./api.js";
import { AgreementPanel, AppController } from "./app.js";
import { buildScaffold, renderAgreement, renderApp, wireEvents } from "./render.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}
const refs = buildScaffold(root);

const client = new ReviewClient("");
let controller: AppController | null = null;
const panel = new AgreementPanel(client, () => renderAgreement(refs, panel));

wireEvents(
  refs,
  () => controller,
  () => panel,
);

refs.startButton.addEventListener("click", () => {
  const annotator = refs.annotatorInput.value.trim();
  if (annotator === "") {
    refs.annotatorInput.focus();
    return;
  }
  const active = new AppController(client, annotator, refs.splitSelect.value, () => {
    if (controller === active) {
      renderApp(refs, active);
    }
  });
  controller = active;
  void active.start();
});

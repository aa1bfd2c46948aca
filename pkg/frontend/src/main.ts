/** DOM wiring for the single-page flow: editor, test feedback, questionnaire. */

import { ApiClient } from "./api.js";
import { renderBanner, renderQuestionnaire, renderStatus, renderTestResults } from "./render.js";
import { SessionController } from "./state.js";

const SESSION_KEY = "qlc-session-id";

function sessionId(): string {
  const existing = window.localStorage.getItem(SESSION_KEY);
  if (existing) {
    return existing;
  }
  const fresh = crypto.randomUUID();
  window.localStorage.setItem(SESSION_KEY, fresh);
  return fresh;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const controller = new SessionController(api, sessionId());
  await controller.init();
  await controller.restore();

  const editor = el<HTMLTextAreaElement>("editor");
  const submitButton = el<HTMLButtonElement>("submit-code");
  const testsPanel = el<HTMLDivElement>("tests-panel");
  const questionnairePanel = el<HTMLDivElement>("questionnaire-panel");
  const bannerPanel = el<HTMLDivElement>("banner-panel");
  const statusPanel = el<HTMLSpanElement>("status-panel");

  function redraw(): void {
    const view = controller.view;
    bannerPanel.innerHTML = renderBanner(view.banner);
    testsPanel.innerHTML = renderTestResults(view.latestTestResults, view.latestProgramPoints);
    questionnairePanel.innerHTML = renderQuestionnaire(
      view.questionnaire,
      (questionId) => controller.selectedOptions(questionId),
      controller.hasSubmission,
    );
    statusPanel.innerHTML = renderStatus(view);

    const openButton = document.getElementById("open-questionnaire");
    if (openButton) {
      openButton.addEventListener("click", () => {
        void controller.openQuestionnaire().then(redraw, showError);
      });
    }
    const answerButton = document.getElementById("submit-answers") as HTMLButtonElement | null;
    if (answerButton) {
      answerButton.disabled = !controller.canSubmitAnswers;
      answerButton.addEventListener("click", () => {
        void controller.submitAnswers().then(redraw, showError);
      });
      const hint = document.getElementById("answer-hint");
      if (hint) {
        const missing = controller.unansweredQuestions().length;
        hint.textContent = missing > 0 ? `${missing} question(s) still need an answer.` : "";
      }
    }
    for (const input of questionnairePanel.querySelectorAll<HTMLInputElement>("input[data-question]")) {
      input.addEventListener("change", () => {
        controller.select(input.dataset.question ?? "", input.value);
        redraw();
      });
    }
  }

  function showError(error: unknown): void {
    controller.view.banner = error instanceof Error ? error.message : String(error);
    redraw();
  }

  submitButton.addEventListener("click", () => {
    submitButton.disabled = true;
    void controller
      .submitSource(editor.value)
      .then(redraw, showError)
      .finally(() => {
        submitButton.disabled = false;
      });
  });

  redraw();
}

void boot().catch((error) => {
  const banner = document.getElementById("banner-panel");
  if (banner) {
    banner.textContent = `failed to start: ${error}`;
  }
});

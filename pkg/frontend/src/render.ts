/** Pure HTML renderers for the single-page flow.
 *
 * Everything here is a string-in, string-out function so the views are
 * testable without a browser. Option order always follows the payload
 * order; the client never reorders.
 */

import { GradeReport, StudentQuestion, TestResult } from "./api.js";
import { QuestionnairePhase, UiSessionView } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderTestResults(results: TestResult[], points: number | null): string {
  if (results.length === 0) {
    return '<p class="muted">No submission yet.</p>';
  }
  const rows = results
    .map((result) => {
      const cls = result.passed ? "test-pass" : "test-fail";
      const mark = result.passed ? "&#10003;" : "&#10007;";
      const diagnostic = result.passed
        ? ""
        : `<div class="diagnostic">${escapeHtml(result.diagnostic)}</div>`;
      return `<li class="${cls}"><span class="mark">${mark}</span> ${escapeHtml(result.testName)}${diagnostic}</li>`;
    })
    .join("");
  const passed = results.filter((result) => result.passed).length;
  const score = points === null ? "" : ` &middot; ${points} points`;
  return `<ul class="tests">${rows}</ul><p class="score">${passed}/${results.length} tests passed${score}</p>`;
}

function renderOpenQuestion(question: StudentQuestion, selected: Set<string>): string {
  const inputType = question.multiSelect ? "checkbox" : "radio";
  const options = question.options
    .map((option) => {
      const checked = selected.has(option.id) ? " checked" : "";
      return (
        `<label class="option"><input type="${inputType}" name="${escapeHtml(question.id)}" ` +
        `value="${escapeHtml(option.id)}" data-question="${escapeHtml(question.id)}"${checked}> ` +
        `${escapeHtml(option.label)}</label>`
      );
    })
    .join("");
  return (
    `<fieldset class="question" data-question-id="${escapeHtml(question.id)}">` +
    `<legend>${escapeHtml(question.prompt)}</legend>${options}</fieldset>`
  );
}

function renderAnsweredQuestion(
  question: StudentQuestion,
  selected: Set<string>,
  report: GradeReport,
): string {
  const grade = report.perQuestion.find((g) => g.questionId === question.id);
  const verdict = grade?.correct ? "correct" : "incorrect";
  const options = question.options
    .map((option) => {
      const info = report.explanations[option.id];
      const wasSelected = selected.has(option.id);
      const classes = ["option", "answered"];
      if (info?.isCorrect) {
        classes.push("option-correct");
      } else if (wasSelected) {
        classes.push("option-wrong");
      }
      const inputType = question.multiSelect ? "checkbox" : "radio";
      const checked = wasSelected ? " checked" : "";
      const explanation = info
        ? `<div class="explanation">${escapeHtml(info.explanation)}</div>`
        : "";
      return (
        `<label class="${classes.join(" ")}"><input type="${inputType}" ` +
        `name="${escapeHtml(question.id)}" value="${escapeHtml(option.id)}" disabled${checked}> ` +
        `${escapeHtml(option.label)}${explanation}</label>`
      );
    })
    .join("");
  return (
    `<fieldset class="question ${verdict}" data-question-id="${escapeHtml(question.id)}">` +
    `<legend>${escapeHtml(question.prompt)} <span class="verdict">${verdict}</span></legend>` +
    `${options}</fieldset>`
  );
}

export function renderQuestionnaire(
  phase: QuestionnairePhase,
  selectedFor: (questionId: string) => Set<string>,
  hasSubmission: boolean,
): string {
  if (phase.kind === "locked") {
    const hint = hasSubmission
      ? '<button id="open-questionnaire">Open questionnaire</button>'
      : '<p class="muted">Submit your program at least once to unlock the questionnaire.</p>';
    return `<div class="questionnaire locked">${hint}</div>`;
  }
  if (phase.kind === "open") {
    const questions = phase.view.questions
      .map((question) => renderOpenQuestion(question, selectedFor(question.id)))
      .join("");
    return (
      `<div class="questionnaire open"><p>You can answer these questions exactly once.</p>` +
      `${questions}<button id="submit-answers">Submit answers</button>` +
      `<p id="answer-hint" class="muted"></p></div>`
    );
  }
  const questions = phase.view.questions
    .map((question) => renderAnsweredQuestion(question, selectedFor(question.id), phase.report))
    .join("");
  const earned = phase.report.qlcPoints;
  return (
    `<div class="questionnaire answered">${questions}` +
    `<p class="points">${earned > 0 ? `+${earned} points` : "+0 points"}</p></div>`
  );
}

export function renderBanner(banner: string | null): string {
  return banner ? `<div class="banner">${escapeHtml(banner)}</div>` : "";
}

export function renderStatus(view: UiSessionView): string {
  const remaining =
    view.submissionsRemaining === null ? "" : `${view.submissionsRemaining} submissions left`;
  const total = `total ${view.totalPoints} / 100`;
  return `<span>${escapeHtml([remaining, total].filter(Boolean).join(" | "))}</span>`;
}

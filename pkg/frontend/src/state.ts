/** Client-side session state machine.
 *
 * The flow is strictly editor -> tests -> questionnaire -> feedback.
 * The questionnaire panel is locked until a submission exists, open until
 * the single answers request has been graded, and answered afterwards.
 * One-shot is enforced structurally: once a grade report exists the
 * machine refuses to issue another answers request, and selections are
 * validated before any request leaves the client.
 */

import {
  ApiClient,
  ApiError,
  GradeReport,
  QuestionnaireView,
  SubmitResponse,
  TestResult,
} from "./api.js";

export type QuestionnairePhase =
  | { kind: "locked" }
  | { kind: "open"; view: QuestionnaireView }
  | { kind: "answered"; view: QuestionnaireView; report: GradeReport };

export interface UiSessionView {
  sessionId: string;
  exerciseId: string | null;
  submissionsRemaining: number | null;
  latestTestResults: TestResult[];
  latestProgramPoints: number | null;
  bestProgramPoints: number;
  totalPoints: number;
  questionnaire: QuestionnairePhase;
  banner: string | null;
}

export class SessionController {
  readonly view: UiSessionView;
  private selections = new Map<string, Set<string>>();

  constructor(
    private api: ApiClient,
    sessionId: string,
  ) {
    this.view = {
      sessionId,
      exerciseId: null,
      submissionsRemaining: null,
      latestTestResults: [],
      latestProgramPoints: null,
      bestProgramPoints: 0,
      totalPoints: 0,
      questionnaire: { kind: "locked" },
      banner: null,
    };
  }

  get hasSubmission(): boolean {
    return this.view.latestProgramPoints !== null;
  }

  /** Load exercise metadata; picks the first exercise the server offers. */
  async init(): Promise<void> {
    const exercises = await this.api.listExercises();
    const first = exercises[0];
    if (!first) {
      throw new Error("service offers no exercises");
    }
    this.view.exerciseId = first.id;
  }

  /** Restore state after a page reload; no-op for an unknown session. */
  async restore(): Promise<void> {
    const session = await this.api.fetchSession(this.view.sessionId);
    if (session === null) {
      return;
    }
    this.view.exerciseId = session.exerciseId;
    this.view.submissionsRemaining = session.submissionsRemaining;
    this.view.latestTestResults = session.latestTestResults;
    this.view.latestProgramPoints = session.latestProgramPoints;
    this.view.bestProgramPoints = session.bestProgramPoints;
    this.view.totalPoints = session.totalPoints;
    if (session.questionnaire) {
      this.adoptQuestionnaire(session.questionnaire);
    }
  }

  private adoptQuestionnaire(view: QuestionnaireView): void {
    if (view.answered && view.gradeReport) {
      this.view.questionnaire = { kind: "answered", view, report: view.gradeReport };
      if (view.answers) {
        this.selections = new Map(
          Object.entries(view.answers).map(([q, ids]) => [q, new Set(ids)]),
        );
      }
    } else {
      this.view.questionnaire = { kind: "open", view };
    }
  }

  async submitSource(source: string): Promise<void> {
    if (this.view.exerciseId === null) {
      throw new Error("controller not initialized");
    }
    this.view.banner = null;
    let result: SubmitResponse;
    try {
      result = await this.api.submitSource(this.view.exerciseId, this.view.sessionId, source);
    } catch (error) {
      if (error instanceof ApiError && (error.status === 409 || error.status === 422)) {
        this.view.banner = error.message;
        const body = error.body;
        if (body && Array.isArray(body.testResults)) {
          // a 422 still records the submission; mirror what the server kept
          this.view.latestTestResults = body.testResults as TestResult[];
          this.view.latestProgramPoints = (body.programPoints as number) ?? 0;
          this.view.submissionsRemaining = (body.submissionsRemaining as number) ?? null;
        }
        return;
      }
      throw error;
    }
    this.view.latestTestResults = result.testResults;
    this.view.latestProgramPoints = result.programPoints;
    this.view.submissionsRemaining = result.submissionsRemaining;
    this.view.bestProgramPoints = Math.max(this.view.bestProgramPoints, result.programPoints);
  }

  async openQuestionnaire(): Promise<void> {
    if (!this.hasSubmission) {
      this.view.banner = "Submit your program before opening the questionnaire.";
      return;
    }
    if (this.view.questionnaire.kind !== "locked") {
      return;
    }
    const view = await this.api.openQuestionnaire(this.view.sessionId);
    this.adoptQuestionnaire(view);
  }

  /** Toggle (checkbox) or set (radio) one option of one question. */
  select(questionId: string, optionId: string): void {
    if (this.view.questionnaire.kind !== "open") {
      return; // inputs are disabled after answering; ignore stray events
    }
    const question = this.view.questionnaire.view.questions.find((q) => q.id === questionId);
    if (!question || !question.options.some((o) => o.id === optionId)) {
      return;
    }
    const chosen = this.selections.get(questionId) ?? new Set<string>();
    if (question.multiSelect) {
      if (chosen.has(optionId)) {
        chosen.delete(optionId);
      } else {
        chosen.add(optionId);
      }
    } else {
      chosen.clear();
      chosen.add(optionId);
    }
    this.selections.set(questionId, chosen);
  }

  selectedOptions(questionId: string): Set<string> {
    return this.selections.get(questionId) ?? new Set();
  }

  /** Question ids that still need a selection before submit unlocks. */
  unansweredQuestions(): string[] {
    if (this.view.questionnaire.kind !== "open") {
      return [];
    }
    return this.view.questionnaire.view.questions
      .filter((q) => this.selectedOptions(q.id).size === 0)
      .map((q) => q.id);
  }

  get canSubmitAnswers(): boolean {
    return this.view.questionnaire.kind === "open" && this.unansweredQuestions().length === 0;
  }

  async submitAnswers(): Promise<void> {
    const phase = this.view.questionnaire;
    if (phase.kind === "answered") {
      throw new Error("answers were already submitted");
    }
    if (phase.kind !== "open") {
      throw new Error("questionnaire is not open");
    }
    const missing = this.unansweredQuestions();
    if (missing.length > 0) {
      throw new Error(`unanswered questions: ${missing.join(", ")}`);
    }
    const answers: Record<string, string[]> = {};
    for (const question of phase.view.questions) {
      answers[question.id] = [...this.selectedOptions(question.id)].sort();
    }
    let report: GradeReport;
    try {
      report = await this.api.submitAnswers(phase.view.id, answers);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // answered elsewhere (another tab); adopt the server's state
        this.view.banner = error.message;
        const view = await this.api.openQuestionnaire(this.view.sessionId);
        this.adoptQuestionnaire(view);
        return;
      }
      throw error;
    }
    this.view.questionnaire = { kind: "answered", view: phase.view, report };
    if (typeof report.totalPoints === "number") {
      this.view.totalPoints = report.totalPoints;
    }
  }
}

/** Typed fetch client for the assessment service's JSON endpoints. */

export interface TestResult {
  testName: string;
  passed: boolean;
  diagnostic: string;
}

export interface SubmitResponse {
  submissionId: string;
  testResults: TestResult[];
  programPoints: number;
  submissionsRemaining: number;
}

/** Student-form option: never carries correctness or explanations. */
export interface StudentOption {
  id: string;
  label: string;
}

export interface StudentQuestion {
  id: string;
  type: string;
  prompt: string;
  multiSelect: boolean;
  options: StudentOption[];
  targetLine?: number;
}

export interface QuestionGradeView {
  questionId: string;
  qlcType: string;
  correct: boolean;
  selectedOptionIds: string[];
  errorCategories: string[];
}

export interface GradeReport {
  perQuestion: QuestionGradeView[];
  qlcPoints: number;
  explanations: Record<string, { label: string; isCorrect: boolean; explanation: string }>;
  totalPoints?: number;
}

export interface QuestionnaireView {
  id: string;
  questions: StudentQuestion[];
  answered: boolean;
  gradeReport?: GradeReport;
  answers?: Record<string, string[]>;
}

export interface SessionView {
  sessionId: string;
  exerciseId: string;
  submissionsRemaining: number;
  bestProgramPoints: number;
  totalPoints: number;
  latestTestResults: TestResult[];
  latestProgramPoints: number | null;
  questionnaire?: QuestionnaireView;
}

export interface ExerciseInfo {
  id: string;
  entryFunction: string;
  maxSubmissions: number;
  programPointsMax: number;
  qlcPointsMax: number;
  tests: string[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public body: Record<string, unknown> | null = null,
  ) {
    super(message);
  }
}

/**
 * Guard for pre-grade payloads: the client must never receive (or keep)
 * correctness or explanation data before the grade response.
 */
export function assertRedacted(payload: unknown): void {
  const text = JSON.stringify(payload);
  if (text.includes('"isCorrect"') || text.includes('"explanation"')) {
    throw new Error("server payload leaks answer data before grading");
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(base + path, init);
  let body: Record<string, unknown> | null = null;
  try {
    body = (await response.json()) as Record<string, unknown>;
  } catch {
    body = null;
  }
  if (!response.ok) {
    const message =
      body && typeof body.error === "string" ? body.error : `request failed: ${response.status}`;
    throw new ApiError(response.status, message, body);
  }
  return body as T;
}

export class ApiClient {
  constructor(private base: string = "") {}

  async listExercises(): Promise<ExerciseInfo[]> {
    const body = await request<{ exercises: ExerciseInfo[] }>(this.base, "/api/exercises");
    return body.exercises;
  }

  submitSource(exerciseId: string, sessionId: string, source: string): Promise<SubmitResponse> {
    return request<SubmitResponse>(
      this.base,
      `/api/exercises/${encodeURIComponent(exerciseId)}/submissions`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ sessionId, source }),
      },
    );
  }

  async openQuestionnaire(sessionId: string): Promise<QuestionnaireView> {
    const view = await request<QuestionnaireView>(
      this.base,
      `/api/sessions/${encodeURIComponent(sessionId)}/questionnaire`,
      { method: "POST" },
    );
    if (!view.answered) {
      assertRedacted(view);
    }
    return view;
  }

  submitAnswers(questionnaireId: string, answers: Record<string, string[]>): Promise<GradeReport> {
    return request<GradeReport>(
      this.base,
      `/api/questionnaires/${encodeURIComponent(questionnaireId)}/answers`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ answers }),
      },
    );
  }

  async fetchSession(sessionId: string): Promise<SessionView | null> {
    try {
      const view = await request<SessionView>(
        this.base,
        `/api/sessions/${encodeURIComponent(sessionId)}`,
      );
      if (view.questionnaire && !view.questionnaire.answered) {
        assertRedacted(view.questionnaire);
      }
      return view;
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        return null;
      }
      throw error;
    }
  }
}

/** Typed client for the cqsearch session service (see docs/api.md). */

export interface QuestionPayload {
  text: string;
  options: string[];
  kind: "elicitation" | "confirmation";
  template: string;
}

export interface ResultItem {
  rank: number;
  id: string;
  score: number;
  name: string;
  comment: string;
  url: string;
}

export interface ResultsPage {
  page: number;
  page_size: number;
  total: number;
  items: ResultItem[];
}

export interface SessionPayload {
  session_id: string;
  method: string;
  round: number;
  done: boolean;
  results: ResultsPage;
  question: QuestionPayload | null;
}

export type AnswerBody =
  | { selected: string }
  | { none: true }
  | { yes: true }
  | { no: true };

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let detail = `${response.status}`;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, detail);
  }
  if (response.status === 204) return undefined as T;
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private base: string = "") {}

  createSession(query: string, method?: string): Promise<SessionPayload> {
    return request(`${this.base}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(method ? { query, method } : { query }),
    });
  }

  answer(sessionId: string, body: AnswerBody): Promise<SessionPayload> {
    return request(`${this.base}/sessions/${sessionId}/answer`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  resultsPage(sessionId: string, page: number): Promise<ResultsPage> {
    return request(`${this.base}/sessions/${sessionId}/results?page=${page}`);
  }

  logEvent(sessionId: string, kind: string, payload: object): Promise<void> {
    return request(`${this.base}/sessions/${sessionId}/events`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ kind, payload }),
    });
  }
}

/** View state for one refinement session and its pure transitions.
 *
 * At most one API call is in flight; gestures are ignored while pending.
 * Rendered rows always come from the most recent server payload.
 */

import type { QuestionPayload, ResultsPage, SessionPayload } from "./api.js";

export const MAX_PAGES = 5;

export interface ViewState {
  query: string;
  sessionId: string | null;
  question: QuestionPayload | null;
  results: ResultsPage | null;
  page: number;
  round: number;
  done: boolean;
  pending: boolean;
  error: string | null;
}

export function initialState(): ViewState {
  return {
    query: "",
    sessionId: null,
    question: null,
    results: null,
    page: 1,
    round: 0,
    done: false,
    pending: false,
    error: null,
  };
}

export function maxPage(state: ViewState): number {
  if (!state.results) return 1;
  const pages = Math.ceil(state.results.total / state.results.page_size);
  return Math.min(Math.max(pages, 1), MAX_PAGES);
}

export function canSubmit(state: ViewState): boolean {
  return state.query.trim().length > 0 && !state.pending;
}

export function canAnswer(state: ViewState): boolean {
  return state.question !== null && !state.done && !state.pending;
}

export function canChangePage(state: ViewState, page: number): boolean {
  return (
    state.sessionId !== null &&
    !state.pending &&
    page >= 1 &&
    page <= maxPage(state) &&
    page !== state.page
  );
}

export function beginRequest(state: ViewState): ViewState {
  return { ...state, pending: true, error: null };
}

export function applySession(state: ViewState, payload: SessionPayload): ViewState {
  return {
    ...state,
    sessionId: payload.session_id,
    question: payload.question,
    results: payload.results,
    page: payload.results.page,
    round: payload.round,
    done: payload.done,
    pending: false,
    error: null,
  };
}

export function applyPage(state: ViewState, payload: ResultsPage): ViewState {
  return { ...state, results: payload, page: payload.page, pending: false };
}

export function applyError(state: ViewState, message: string): ViewState {
  return { ...state, pending: false, error: message };
}

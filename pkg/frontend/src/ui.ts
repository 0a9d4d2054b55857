/** DOM controller: search bar on top, the clarifying question with its
 * clickable answers directly beneath it, then the paged result list. */

import { ApiClient, type AnswerBody } from "./api.js";
import {
  applyError,
  applyPage,
  applySession,
  beginRequest,
  canAnswer,
  canChangePage,
  canSubmit,
  initialState,
  maxPage,
  type ViewState,
} from "./state.js";

export class App {
  state: ViewState = initialState();
  private seq = 0; // request token: responses from superseded requests are dropped

  constructor(private root: HTMLElement, private api: ApiClient) {
    this.render();
  }

  private async run<T>(
    call: () => Promise<T>,
    apply: (state: ViewState, payload: T) => ViewState,
  ): Promise<void> {
    if (this.state.pending) return; // single in-flight request
    const token = ++this.seq;
    this.state = beginRequest(this.state);
    this.render();
    try {
      const payload = await call();
      if (token !== this.seq) return; // stale response
      this.state = apply(this.state, payload);
    } catch (err) {
      if (token !== this.seq) return;
      this.state = applyError(this.state, err instanceof Error ? err.message : String(err));
    }
    this.render();
  }

  setQuery(text: string): void {
    this.state = { ...this.state, query: text };
    this.renderControlsOnly();
  }

  submitQuery(): Promise<void> | undefined {
    if (!canSubmit(this.state)) return undefined;
    return this.run(
      () => this.api.createSession(this.state.query.trim()),
      applySession,
    );
  }

  answer(body: AnswerBody): Promise<void> | undefined {
    if (!canAnswer(this.state) || this.state.sessionId === null) return undefined;
    const sessionId = this.state.sessionId;
    return this.run(() => this.api.answer(sessionId, body), applySession);
  }

  changePage(page: number): Promise<void> | undefined {
    if (!canChangePage(this.state, page) || this.state.sessionId === null) {
      return undefined;
    }
    const sessionId = this.state.sessionId;
    return this.run(() => this.api.resultsPage(sessionId, page), applyPage);
  }

  private renderControlsOnly(): void {
    const button = this.root.querySelector<HTMLButtonElement>("#submit");
    if (button) button.disabled = !canSubmit(this.state);
  }

  render(): void {
    const s = this.state;
    this.root.replaceChildren();

    const form = el("form", { class: "search-bar" });
    const input = el("input", {
      id: "query", type: "text", placeholder: "Search for code…",
      value: s.query, autocomplete: "off",
    }) as HTMLInputElement;
    input.addEventListener("input", () => this.setQuery(input.value));
    const submit = el("button", { id: "submit", type: "submit" }, "Search") as
      HTMLButtonElement;
    submit.disabled = !canSubmit(s);
    form.append(input, submit);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitQuery();
    });
    this.root.append(form);

    if (s.error) {
      this.root.append(el("div", { class: "banner error", role: "alert" },
        `Something went wrong: ${s.error}`));
    }

    // clarifying question block sits directly below the search bar
    if (s.question && !s.done) {
      const block = el("section", { class: "question" });
      block.append(el("p", { class: "question-text" }, s.question.text));
      const answers = el("div", { class: "answers" });
      if (s.question.kind === "elicitation") {
        for (const option of s.question.options) {
          answers.append(this.answerButton(option, { selected: option }));
        }
        answers.append(this.answerButton("None of these", { none: true }, "none"));
      } else {
        answers.append(this.answerButton("Yes", { yes: true }, "yes"));
        answers.append(this.answerButton("No", { no: true }, "no"));
      }
      block.append(answers);
      this.root.append(block);
    } else if (s.sessionId && s.done) {
      this.root.append(el("div", { class: "banner done" }, "Refinement complete"));
    }

    if (s.results) {
      const list = el("ol", { class: "results", start: String(s.results.items[0]?.rank ?? 1) });
      for (const item of s.results.items) {
        const row = el("li", { class: "result", "data-id": item.id });
        row.append(
          el("span", { class: "name" }, item.name),
          el("span", { class: "score" }, item.score.toFixed(4)),
          el("span", { class: "comment" }, item.comment),
        );
        list.append(row);
      }
      this.root.append(list);

      const pager = el("nav", { class: "pager" });
      const prev = el("button", { id: "prev" }, "Previous") as HTMLButtonElement;
      prev.disabled = !canChangePage(s, s.page - 1);
      prev.addEventListener("click", () => void this.changePage(this.state.page - 1));
      const next = el("button", { id: "next" }, "Next") as HTMLButtonElement;
      next.disabled = !canChangePage(s, s.page + 1);
      next.addEventListener("click", () => void this.changePage(this.state.page + 1));
      pager.append(prev,
        el("span", { class: "page-label" }, `Page ${s.page} of ${maxPage(s)}`),
        next);
      this.root.append(pager);
    }
  }

  private answerButton(label: string, body: AnswerBody, key?: string): HTMLButtonElement {
    const button = el("button", {
      class: "answer", "data-answer": key ?? label, type: "button",
    }, label) as HTMLButtonElement;
    button.disabled = this.state.pending || this.state.done;
    button.addEventListener("click", () => void this.answer(body));
    return button;
  }
}

function el(tag: string, attrs: Record<string, string> = {}, text?: string): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) node.textContent = text;
  return node;
}

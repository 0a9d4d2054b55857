"""Synthetic evaluation harness: a simulated user answers each strategy's
questions using relevance ratings, and per-round rankings are scored.

The simulated user accepts the relevant option tied to the fewest
candidate functions, declines when nothing shown is relevant, and
confirms an inference only when the confirmed attributes still cover a
relevant result.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from pathlib import Path

from .engine import Answer, ClarifyingQuestion, RefineConfig, SessionState
from .metrics import RELEVANT_MIN_RATING, average_precision, ndcg_rated, reciprocal_rank
from .session import (
    SearchContext,
    SessionError,
    apply_and_rerank,
    hypothetical_candidates,
    new_session,
    next_question,
)
from .tasks import build_task_table
from .vecsearch import RocchioParams, embed_query, search

MAX_ROUNDS = 10

Judgments = dict[str, dict[str, int]]  # query_id -> function_id -> rating


class HarnessError(Exception):
    pass


def load_judgments(path: str | Path) -> Judgments:
    """Read (query_id, function_id, rating) CSV rows; header optional."""
    judgments: Judgments = {}
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.reader(handle):
            if not row or row[0].strip() == "query_id":
                continue
            query_id, function_id, rating = row[0].strip(), row[1].strip(), int(row[2])
            if not 1 <= rating <= 4:
                raise HarnessError(f"rating out of range for {query_id}/{function_id}: {rating}")
            judgments.setdefault(query_id, {})[function_id] = rating
    return judgments


def load_queries(path: str | Path) -> list[tuple[str, str]]:
    """Read (query_id, text) CSV rows; header optional."""
    queries = []
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.reader(handle):
            if not row or row[0].strip() == "query_id":
                continue
            queries.append((row[0].strip(), row[1].strip()))
    return queries


def filter_queries(
    ctx: SearchContext,
    queries: list[tuple[str, str]],
    judgments: Judgments,
    config: RefineConfig | None = None,
) -> list[tuple[str, str]]:
    """Keep queries that are usable for synthetic refinement: at least
    three rated results, a relevant result carrying both a task and a
    pool keyword, and an initial ordering that can still improve."""
    from .lsi import DEFAULT_KEYWORD_COUNT, lsi_keywords

    config = config or RefineConfig()
    kept = []
    for query_id, text in queries:
        rated_by = judgments.get(query_id, {})
        ranking = search(ctx.index, embed_query(ctx.index, text), k=config.top_k)
        result_ids = ranking.ids()
        rated = [(fid, rated_by[fid]) for fid in result_ids if fid in rated_by]
        if len(rated) < 3:
            continue
        ratings_in_order = [r for _, r in rated]
        if all(a >= b for a, b in zip(ratings_in_order, ratings_in_order[1:])):
            continue  # already optimally ordered
        if ctx.lsi_model is None:
            raise HarnessError("query filtering needs an LSI model in the context")
        keywords = set(lsi_keywords(ctx.lsi_model, result_ids, ctx.index, DEFAULT_KEYWORD_COUNT))
        keyword_ids = {ctx.index.term_ids[k] for k in keywords}
        table = build_task_table([ctx.docs_by_id[fid] for fid in result_ids], ctx.lexicon)
        with_tasks = set(table.function_ids())
        usable = False
        for fid, rating in rated:
            if rating < RELEVANT_MIN_RATING or fid not in with_tasks:
                continue
            pos = ctx.index.doc_pos[fid]
            lo, hi = ctx.index.indptr[pos], ctx.index.indptr[pos + 1]
            if keyword_ids & {int(t) for t in ctx.index.indices[lo:hi]}:
                usable = True
                break
        if usable:
            kept.append((query_id, text))
    return kept


def simulate_answer(
    cq: ClarifyingQuestion, judgments: dict[str, int], state: SessionState
) -> Answer:
    """Pick the relevant option covering the fewest functions, else decline."""

    def relevant(fids: set[str]) -> bool:
        return any(judgments.get(fid, 0) >= RELEVANT_MIN_RATING for fid in fids)

    if cq.kind == "confirmation":
        candidates = hypothetical_candidates(state, cq, None)
        return Answer.confirm(relevant(candidates))
    best: tuple[int, str] | None = None
    for option in cq.options:
        candidates = hypothetical_candidates(state, cq, option)
        if relevant(candidates):
            key = (len(candidates), option)
            if best is None or key < best:
                best = key
    if best is None:
        return Answer.none_of_these()
    return Answer.pick(best[1])


@dataclass
class RoundRow:
    round: int
    rr: float
    ap: float
    ndcg: float


@dataclass
class SessionRun:
    query_id: str
    method: str
    rounds: list[RoundRow]
    transcript: list[dict] = field(default_factory=list)
    done_round: int = 0

    def metrics_at(self, round_index: int) -> RoundRow:
        """Metrics at a round, carrying the final values past Done."""
        idx = min(round_index, len(self.rounds) - 1)
        return self.rounds[idx]


def run_session(
    ctx: SearchContext,
    query_id: str,
    query_text: str,
    method: str,
    judgments: Judgments,
    config: RefineConfig | None = None,
    max_rounds: int = MAX_ROUNDS,
) -> SessionRun:
    """Simulate one full refinement dialogue and score every round."""
    rated_by = judgments.get(query_id, {})
    state = new_session(ctx, query_text, method=method, config=config)

    def row(round_index: int) -> RoundRow:
        return RoundRow(
            round=round_index,
            rr=reciprocal_rank(state.ranking, rated_by),
            ap=average_precision(state.ranking, rated_by),
            ndcg=ndcg_rated(state.ranking, rated_by),
        )

    run = SessionRun(query_id=query_id, method=method, rounds=[row(0)])
    for round_index in range(1, max_rounds + 1):
        cq = next_question(state, ctx.lexicon)
        if cq is None:
            break
        answer = simulate_answer(cq, rated_by, state)
        apply_and_rerank(state, cq, answer, ctx.index)
        run.rounds.append(row(round_index))
        run.transcript.append({
            "round": round_index,
            "question": cq.text,
            "kind": cq.kind,
            "template": cq.template_id,
            "options": list(cq.options),
            "answer": _answer_repr(answer),
            "top_ids": state.ranking.ids()[:10],
        })
    run.done_round = len(run.rounds) - 1
    return run


def _answer_repr(answer: Answer) -> str:
    if answer.selected is not None:
        return answer.selected
    if answer.none:
        return "<none>"
    return "<yes>" if answer.yes else "<no>"


@dataclass
class RoundReport:
    method: str
    round: int
    mrr: float
    map: float
    ndcg: float
    per_query: dict[str, RoundRow] = field(default_factory=dict)


def aggregate_rounds(runs: list[SessionRun], max_rounds: int) -> list[RoundReport]:
    """Per-method per-round means, carrying each query's final metrics
    forward once its session is done."""
    reports = []
    methods = sorted({run.method for run in runs})
    for method in methods:
        method_runs = [r for r in runs if r.method == method]
        horizon = min(max_rounds, max(r.done_round for r in method_runs))
        for round_index in range(horizon + 1):
            rows = {r.query_id: r.metrics_at(round_index) for r in method_runs}
            n = len(rows)
            reports.append(RoundReport(
                method=method,
                round=round_index,
                mrr=sum(r.rr for r in rows.values()) / n,
                map=sum(r.ap for r in rows.values()) / n,
                ndcg=sum(r.ndcg for r in rows.values()) / n,
                per_query=rows,
            ))
    return reports


def evaluate(
    ctx: SearchContext,
    queries: list[tuple[str, str]],
    judgments: Judgments,
    methods: tuple[str, ...] = ("zacq", "vdo", "kw"),
    config: RefineConfig | None = None,
    max_rounds: int = MAX_ROUNDS,
) -> tuple[list[RoundReport], list[SessionRun]]:
    usable = filter_queries(ctx, queries, judgments, config)
    if not usable:
        raise HarnessError("no queries survive filtering")
    runs = []
    for method in methods:
        for query_id, text in usable:
            runs.append(run_session(ctx, query_id, text, method, judgments, config, max_rounds))
    return aggregate_rounds(runs, max_rounds), runs


@dataclass(frozen=True)
class GridSpec:
    alphas: tuple[float, ...] = (1.0,)
    betas: tuple[float, ...] = (0.5, 0.75)
    gammas: tuple[float, ...] = (0.0, 0.15)
    min_supports: tuple[int, ...] = (2,)
    min_confidences: tuple[float, ...] = (0.5,)

    def configs(self) -> list[RefineConfig]:
        combos = itertools.product(
            self.alphas, self.betas, self.gammas, self.min_supports, self.min_confidences)
        return [
            RefineConfig(
                min_support=ms,
                min_confidence=mc,
                rocchio=RocchioParams(alpha=a, beta=b, gamma=g),
            )
            for a, b, g, ms, mc in combos
        ]


def config_label(config: RefineConfig) -> str:
    r = config.rocchio
    return (
        f"a{r.alpha:g}_b{r.beta:g}_g{r.gamma:g}"
        f"_s{config.min_support}_c{config.min_confidence:g}"
    )


def grid_search(
    ctx: SearchContext,
    queries: list[tuple[str, str]],
    judgments: Judgments,
    grid: GridSpec,
    methods: tuple[str, ...] = ("zacq", "vdo", "kw"),
    max_rounds: int = MAX_ROUNDS,
) -> dict:
    """Run every configuration; report the best one per (method, round,
    metric) plus the full result matrix."""
    configs = grid.configs()
    if not configs:
        raise HarnessError("empty hyperparameter grid")
    matrix = []
    for config in configs:
        reports, _ = evaluate(ctx, queries, judgments, methods, config, max_rounds)
        label = config_label(config)
        for report in reports:
            for metric in ("mrr", "map", "ndcg"):
                matrix.append({
                    "config": label,
                    "method": report.method,
                    "round": report.round,
                    "metric": metric,
                    "value": getattr(report, metric),
                })
    best: dict[tuple[str, int, str], dict] = {}
    for cell in matrix:
        key = (cell["method"], cell["round"], cell["metric"])
        current = best.get(key)
        if (
            current is None
            or cell["value"] > current["value"]
            or (cell["value"] == current["value"] and cell["config"] < current["config"])
        ):
            best[key] = cell
    best_rows = [best[k] for k in sorted(best)]
    return {"best": best_rows, "matrix": matrix}

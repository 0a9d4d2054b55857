"""Command line interface: index, search, refine, eval and serve."""

from __future__ import annotations

import argparse
import csv
import json
import os
import shutil
import sys
from pathlib import Path

from .corpus import CorpusError, load_corpus
from .engine import Answer, RefineConfig
from .harness import (
    GridSpec,
    HarnessError,
    config_label,
    evaluate,
    grid_search,
    load_judgments,
    load_queries,
)
from .lexicon import load_lexicon
from .lsi import default_dims, lsi_fit
from .session import (
    METHODS,
    SearchContext,
    apply_and_rerank,
    new_session,
    next_question,
)
from .vecsearch import (
    RocchioParams,
    VecSearchError,
    build_index,
    embed_query,
    load_index,
    save_index,
    search,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_UNKNOWN_METHOD = 4
EXIT_PORT_IN_USE = 5

INDEX_ENV_VAR = "CQSEARCH_INDEX"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def build_context(corpus_path: str | Path, lexicon_dir: str | None = None,
                  with_lsi: bool = False) -> SearchContext:
    try:
        corpus = load_corpus(corpus_path)
    except CorpusError as exc:
        raise CliError(str(exc), EXIT_MISSING_FILE) from exc
    index = build_index(corpus)
    model = lsi_fit(index, default_dims(index)) if with_lsi else None
    return SearchContext(
        corpus=corpus, index=index, lexicon=load_lexicon(lexicon_dir), lsi_model=model)


def load_context(index_dir: str | Path, with_lsi: bool = False) -> SearchContext:
    index_dir = Path(index_dir)
    corpus_path = index_dir / "corpus.jsonl"
    if not corpus_path.exists():
        raise CliError(f"no corpus.jsonl in index directory {index_dir}", EXIT_MISSING_FILE)
    try:
        corpus = load_corpus(corpus_path)
        index = load_index(index_dir)
    except (CorpusError, VecSearchError) as exc:
        raise CliError(str(exc), EXIT_MISSING_FILE) from exc
    model = lsi_fit(index, default_dims(index)) if with_lsi else None
    return SearchContext(corpus=corpus, index=index, lexicon=load_lexicon(),
                         lsi_model=model)


def _resolve_index_dir(args) -> str:
    index_dir = args.index or os.environ.get(INDEX_ENV_VAR)
    if not index_dir:
        raise CliError(
            f"no index directory (use --index or ${INDEX_ENV_VAR})", EXIT_MISSING_FILE)
    return index_dir


def cmd_index(args) -> int:
    ctx = build_context(args.corpus, args.lexicon)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_index(ctx.index, out)
    shutil.copyfile(args.corpus, out / "corpus.jsonl")
    print(f"indexed {len(ctx.corpus)} functions, {len(ctx.index.terms)} terms -> {out}")
    return EXIT_OK


def cmd_search(args) -> int:
    ctx = load_context(_resolve_index_dir(args))
    ranking = search(ctx.index, embed_query(ctx.index, args.query), k=args.k)
    for rank, (fid, score) in enumerate(ranking.entries, start=1):
        print(f"{rank}\t{score:.6f}\t{fid}")
    return EXIT_OK


def _parse_answer(raw: str, options: list[str], kind: str) -> Answer | None:
    raw = raw.strip().lower()
    if kind == "confirmation":
        if raw in ("y", "yes"):
            return Answer.confirm(True)
        if raw in ("n", "no"):
            return Answer.confirm(False)
        return None
    if raw in ("0", "none"):
        return Answer.none_of_these()
    if raw.isdigit() and 1 <= int(raw) <= len(options):
        return Answer.pick(options[int(raw) - 1])
    if raw in (o.lower() for o in options):
        return Answer.pick(next(o for o in options if o.lower() == raw))
    return None


def cmd_refine(args) -> int:
    if args.method not in METHODS:
        raise CliError(f"unknown method {args.method!r}", EXIT_UNKNOWN_METHOD)
    ctx = load_context(_resolve_index_dir(args), with_lsi=args.method == "kw")
    state = new_session(ctx, args.query, method=args.method,
                        config=RefineConfig())
    scripted = None
    if args.script:
        try:
            scripted = iter(Path(args.script).read_text(encoding="utf-8").split())
        except OSError as exc:
            raise CliError(str(exc), EXIT_MISSING_FILE) from exc
    while True:
        cq = next_question(state, ctx.lexicon)
        if cq is None:
            print("refinement complete")
            break
        print(f"\n[round {state.round + 1}] {cq.text}")
        if cq.kind == "elicitation":
            for i, option in enumerate(cq.options, start=1):
                print(f"  {i}. {option}")
            print("  0. None of these")
        else:
            print("  y. Yes    n. No")
        raw = next(scripted, None) if scripted else input("> ")
        if raw is None:
            print("script exhausted; stopping")
            break
        answer = _parse_answer(raw, cq.options, cq.kind)
        if answer is None:
            print(f"unrecognized answer {raw!r}")
            continue
        apply_and_rerank(state, cq, answer, ctx.index)
        print("top results:")
        for rank, (fid, score) in enumerate(state.ranking.entries[:10], start=1):
            print(f"  {rank}. {fid} ({score:.4f})")
    print("\nfinal ranking:")
    for rank, (fid, score) in enumerate(state.ranking.entries[:10], start=1):
        print(f"  {rank}. {fid} ({score:.4f})")
    return EXIT_OK


def _write_round_reports(reports, out_dir: Path) -> None:
    with open(out_dir / "rounds.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["method", "round", "mrr", "map", "ndcg", "queries"])
        for report in reports:
            writer.writerow([
                report.method, report.round, f"{report.mrr:.6f}",
                f"{report.map:.6f}", f"{report.ndcg:.6f}", len(report.per_query)])
    payload = [
        {"method": r.method, "round": r.round, "mrr": round(r.mrr, 10),
         "map": round(r.map, 10), "ndcg": round(r.ndcg, 10)}
        for r in reports
    ]
    (out_dir / "rounds.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_per_query(runs, out_dir: Path) -> None:
    with open(out_dir / "per_query.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["method", "query_id", "round", "rr", "ap", "ndcg"])
        for run in sorted(runs, key=lambda r: (r.method, r.query_id)):
            for row in run.rounds:
                writer.writerow([
                    run.method, run.query_id, row.round,
                    f"{row.rr:.6f}", f"{row.ap:.6f}", f"{row.ndcg:.6f}"])
    transcripts = [
        {"method": run.method, "query_id": run.query_id, "rounds": run.transcript}
        for run in sorted(runs, key=lambda r: (r.method, r.query_id))
    ]
    (out_dir / "transcripts.json").write_text(
        json.dumps(transcripts, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_eval(args) -> int:
    methods = tuple(args.methods.split(","))
    for method in methods:
        if method not in METHODS:
            raise CliError(f"unknown method {method!r}", EXIT_UNKNOWN_METHOD)
    for path in (args.judgments, args.queries):
        if not Path(path).exists():
            raise CliError(f"missing file {path}", EXIT_MISSING_FILE)
    ctx = load_context(_resolve_index_dir(args), with_lsi=True)
    queries = load_queries(args.queries)
    judgments = load_judgments(args.judgments)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.grid:
        if not Path(args.grid).exists():
            raise CliError(f"missing grid file {args.grid}", EXIT_MISSING_FILE)
        spec_data = json.loads(Path(args.grid).read_text(encoding="utf-8"))
        grid = GridSpec(
            alphas=tuple(spec_data.get("alphas", [1.0])),
            betas=tuple(spec_data.get("betas", [6.0])),
            gammas=tuple(spec_data.get("gammas", [1.0])),
            min_supports=tuple(spec_data.get("min_supports", [2])),
            min_confidences=tuple(spec_data.get("min_confidences", [0.5])),
        )
        try:
            result = grid_search(ctx, queries, judgments, grid, methods, args.max_rounds)
        except HarnessError as exc:
            raise CliError(str(exc), EXIT_MISSING_FILE) from exc
        (out_dir / "grid.json").write_text(
            json.dumps(result, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        with open(out_dir / "grid.csv", "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["method", "round", "metric", "config", "value"])
            for cell in result["best"]:
                writer.writerow([cell["method"], cell["round"], cell["metric"],
                                 cell["config"], f"{cell['value']:.6f}"])
        print(f"grid search over {len(grid.configs())} configs -> {out_dir}")
        return EXIT_OK
    try:
        reports, runs = evaluate(ctx, queries, judgments, methods,
                                 RefineConfig(), args.max_rounds)
    except HarnessError as exc:
        raise CliError(str(exc), EXIT_MISSING_FILE) from exc
    _write_round_reports(reports, out_dir)
    _write_per_query(runs, out_dir)
    for report in reports:
        print(f"{report.method}\tround {report.round}\tMRR={report.mrr:.3f}"
              f"\tMAP={report.map:.3f}\tNDCG={report.ndcg:.3f}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    ctx = load_context(_resolve_index_dir(args), with_lsi=True)
    app = create_app(ctx, store_path=args.store, default_method=args.method,
                     static_dir=args.static)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as exc:
        raise CliError(f"cannot bind port {args.port}: {exc}", EXIT_PORT_IN_USE) from exc
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqsearch",
        description="Source code search with clarifying-question refinement")
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="build and persist a TF-IDF index")
    p_index.add_argument("--corpus", required=True)
    p_index.add_argument("--out", required=True)
    p_index.add_argument("--lexicon", default=None)
    p_index.set_defaults(func=cmd_index)

    p_search = sub.add_parser("search", help="run a one-shot query")
    p_search.add_argument("--index", default=None)
    p_search.add_argument("--query", required=True)
    p_search.add_argument("-k", type=int, default=50)
    p_search.set_defaults(func=cmd_search)

    p_refine = sub.add_parser("refine", help="interactive refinement loop")
    p_refine.add_argument("--index", default=None)
    p_refine.add_argument("--query", required=True)
    p_refine.add_argument("--method", default="zacq")
    p_refine.add_argument("--script", default=None,
                          help="file of scripted answers (one per line)")
    p_refine.set_defaults(func=cmd_refine)

    p_eval = sub.add_parser("eval", help="run the synthetic evaluation")
    p_eval.add_argument("--index", default=None)
    p_eval.add_argument("--judgments", required=True)
    p_eval.add_argument("--queries", required=True)
    p_eval.add_argument("--methods", default="zacq,vdo,kw")
    p_eval.add_argument("--grid", default=None)
    p_eval.add_argument("--max-rounds", type=int, default=10)
    p_eval.add_argument("--out", required=True)
    p_eval.set_defaults(func=cmd_eval)

    p_serve = sub.add_parser("serve", help="start the HTTP session service")
    p_serve.add_argument("--index", default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--method", default="zacq")
    p_serve.add_argument("--store", default=None)
    p_serve.add_argument("--static", default=None)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

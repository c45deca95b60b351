"""Command-line front door: one-shot questions, raw search, eval runs, serving.

Exit codes: 0 success, 1 pipeline error, 2 usage error, 3 dataset error.
Every data-producing subcommand accepts --json and then emits exactly one
JSON document on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import Settings
from .curation import Question, curate_fallback, curate_with_llm
from .errors import DatasetFormatError, MalformedQueryError, ScholarQaError
from .evaluation import run_eval
from .pipeline import ask, build_deps

EXIT_OK = 0
EXIT_PIPELINE = 1
EXIT_USAGE = 2
EXIT_DATASET = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scholarqa",
        description="Answer software-engineering questions from scholarly abstracts.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    ask_p = sub.add_parser("ask", help="answer a question with citations")
    ask_p.add_argument("question")
    ask_p.add_argument("--rows", type=int, default=None, help="papers to retrieve")
    ask_p.add_argument("--offline", action="store_true",
                       help="fallback curation and cached retrieval only")
    ask_p.add_argument("--json", action="store_true")
    ask_p.add_argument("--config", default=None, help="path to JSON config file")
    ask_p.set_defaults(func=cmd_ask)

    search_p = sub.add_parser("search", help="show the curated query and ranked papers")
    search_p.add_argument("question")
    search_p.add_argument("--rows", type=int, default=None)
    search_p.add_argument("--offline", action="store_true")
    search_p.add_argument("--json", action="store_true")
    search_p.add_argument("--config", default=None)
    search_p.set_defaults(func=cmd_search)

    eval_p = sub.add_parser("eval", help="score answers against a reference dataset")
    eval_p.add_argument("--dataset", required=True)
    eval_p.add_argument("--replay", action="store_true",
                        help="score stored generated answers instead of running the pipeline")
    eval_p.add_argument("--embedder", default="", help="embedding model id")
    eval_p.add_argument("--out", default=None,
                        help="report directory (default: ./<dataset>_eval)")
    eval_p.add_argument("--sample-std", action="store_true",
                        help="use the n-1 standard-deviation divisor")
    eval_p.add_argument("--json", action="store_true")
    eval_p.add_argument("--config", default=None)
    eval_p.set_defaults(func=cmd_eval)

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--config", default=None)
    serve_p.add_argument("--host", default=None)
    serve_p.add_argument("--port", type=int, default=None)
    serve_p.add_argument("--json", action="store_true")
    serve_p.set_defaults(func=cmd_serve)
    return parser


def _load_settings(args) -> Settings:
    return Settings.load(args.config)


def _require_question(parser_hint: argparse.ArgumentParser, text: str) -> Question:
    if not text.strip():
        parser_hint.error("question must be non-empty")
    return Question(text=text)


def cmd_ask(args, parser) -> int:
    question = _require_question(parser, args.question)
    settings = _load_settings(args)
    deps = build_deps(settings, offline=args.offline)
    if args.rows:
        deps.rows = args.rows
    bundle, trace = ask(question, deps)
    if args.json:
        print(json.dumps({
            "answer": bundle.answer_text,
            "citations": [{"title": t, "url": u} for t, u in bundle.citations],
            "outcome": trace.outcome,
            "curated_query": trace.curated.wire_form if trace.curated else None,
        }, sort_keys=True))
    else:
        print(bundle.answer_text)
        if bundle.citations:
            print("\nSources:")
            for title, url in bundle.citations:
                print(f"  - {title} <{url}>")
    return EXIT_OK


def cmd_search(args, parser) -> int:
    question = _require_question(parser, args.question)
    settings = _load_settings(args)
    deps = build_deps(settings, offline=args.offline)
    rows = args.rows or deps.rows
    if deps.provider is None or args.offline:
        curated = curate_fallback(question)
    else:
        try:
            curated = curate_with_llm(question, deps.provider)
        except MalformedQueryError:
            curated = curate_fallback(question)
    retrieval = deps.cache.lookup(curated) if deps.cache else None
    if retrieval is None:
        if args.offline:
            raise ScholarQaError("offline mode and query not in cache")
        retrieval = deps.crossref.fetch_papers(curated, rows=rows)
        if deps.cache:
            deps.cache.store(retrieval)
    if args.json:
        print(json.dumps({
            "query": curated.wire_form,
            "papers": [p.to_dict() for p in retrieval.papers],
        }, sort_keys=True))
    else:
        print(f"query: {curated.wire_form}")
        print(f"{'cites':>7}  title")
        for paper in retrieval.papers:
            print(f"{paper.citation_count:>7}  {paper.title}")
            print(f"{'':>7}  {paper.url}")
    return EXIT_OK


def cmd_eval(args, parser) -> int:
    settings = _load_settings(args)
    deps = build_deps(settings)
    if deps.provider is None:
        parser.error("eval needs a configured provider (set provider_kind)")
    pipeline = None
    if not args.replay:
        def pipeline(question):
            bundle, _ = ask(question, deps)
            return bundle.answer_text
    out_dir = args.out or f"{Path(args.dataset).stem}_eval"
    report = run_eval(
        args.dataset,
        embedder=deps.provider,
        model_id=args.embedder,
        pipeline=pipeline,
        replay=args.replay,
        out_dir=out_dir,
        sample_std=args.sample_std,
    )
    if args.json:
        print(json.dumps(report.summary, sort_keys=True))
    else:
        print(report.table())
        if report.summary_path:
            print(f"\nreports written to {report.summary_path.parent}")
    return EXIT_OK


def cmd_serve(args, parser) -> int:
    import logging

    import uvicorn

    from .service import create_app

    logging.basicConfig(level=logging.INFO, stream=sys.stdout,
                        format="%(message)s")
    settings = _load_settings(args)
    if args.host:
        settings.listen_host = args.host
    if args.port:
        settings.listen_port = args.port
    uvicorn.run(create_app(settings), host=settings.listen_host,
                port=settings.listen_port, log_level="info")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except DatasetFormatError as exc:
        _report_error(args, exc)
        return EXIT_DATASET
    except ScholarQaError as exc:
        _report_error(args, exc)
        return EXIT_PIPELINE
    except ValueError as exc:  # bad config file, malformed flag values
        _report_error(args, exc)
        return EXIT_USAGE
    except OSError as exc:
        _report_error(args, exc)
        return EXIT_DATASET if args.command == "eval" else EXIT_PIPELINE


def _report_error(args, exc: Exception) -> None:
    if getattr(args, "json", False):
        print(json.dumps({"error": str(exc)}, sort_keys=True))
    else:
        print(f"error: {exc}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())

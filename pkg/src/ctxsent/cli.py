"""Command-line interface: ``ctxsent <subcommand> [options]``.

Exit codes: 0 success, 1 missing/unreadable input or bad data, 2 usage
error, 3 training aborted.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .bundle import BundleError, load_bundle, save_bundle
from .classifier import TrainingError, parse_categories, train_classifier
from .corpus import CorpusError, ingest, make_context, parse_record
from .evaluation import (
    ClassifierSpec,
    evaluate_many,
    format_accuracy_table,
    format_class_table,
    kfold,
    reports_csv,
    standard_specs,
)
from .preprocess import preprocess
from .priors import CATEGORIES, fit, report, report_csv
from .synth import SynthConfig, benchmark_config, generate, load_config

log = logging.getLogger("ctxsent")

EXIT_OK, EXIT_INPUT, EXIT_USAGE, EXIT_TRAINING = 0, 1, 2, 3


def _add_common(p, *, input_required=False):
    p.add_argument("--input", required=input_required, help="input file (default stdin where allowed)")
    p.add_argument("--output", help="output path (default stdout where allowed)")
    p.add_argument("-v", "--verbose", action="count", default=0)


def _add_model_options(p):
    p.add_argument("--mode", choices=("baseline", "contextual"), default=None)
    p.add_argument(
        "--categories",
        default=",".join(CATEGORIES),
        help="comma-separated subset of state,hour,dow,month,author (contextual mode)",
    )
    p.add_argument("--min-author-tweets", type=int, default=50)
    p.add_argument("--no-bos", action="store_true", help="score from the second token on, no BOS")
    p.add_argument("--strict", action="store_true", help="abort on malformed corpus lines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctxsent", description="Context-aware tweet polarity classification."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="label a corpus file and print ingest statistics")
    _add_common(p, input_required=True)
    p.add_argument("--strict", action="store_true")

    p = sub.add_parser("preprocess", help="filter raw lines into space-joined tokens")
    _add_common(p)

    p = sub.add_parser("train", help="fit language models and context priors into a bundle")
    _add_common(p, input_required=True)
    p.add_argument("--model", required=True, help="bundle directory to write")
    _add_model_options(p)

    p = sub.add_parser("classify", help="classify corpus records or plain text lines")
    _add_common(p)
    p.add_argument("--model", required=True, help="bundle directory to read")
    p.add_argument("--mode", choices=("baseline", "contextual"), default=None,
                   help="override the mode stored in the bundle")
    p.add_argument("--categories", default=None)

    p = sub.add_parser("evaluate", help="k-fold cross-validated accuracy report")
    _add_common(p, input_required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--all-variants", action="store_true",
                   help="report majority, bigram, every single category, all, and all-but-state")
    _add_model_options(p)

    p = sub.add_parser("priors", help="per-category average sentiment CSV reports")
    _add_common(p, input_required=True)
    p.add_argument("--categories", default=",".join(CATEGORIES))
    p.add_argument("--min-author-tweets", type=int, default=50)
    p.add_argument("--strict", action="store_true")

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--output", required=True)
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--benchmark", action="store_true",
                   help="start from the built-in benchmark effect sizes")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n", type=int, default=None, help="number of tweets")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def _echo_config(args) -> None:
    resolved = {k: v for k, v in sorted(vars(args).items())}
    print("config: " + json.dumps(resolved, sort_keys=True, default=str), file=sys.stderr)


def _open_out(path):
    if path:
        return open(path, "w", encoding="utf-8", newline="\n")
    return contextlib.nullcontext(sys.stdout)


def _open_in(path):
    if path:
        _require_file(path)
        return open(path, encoding="utf-8")
    return contextlib.nullcontext(sys.stdin)


def _require_file(path):
    if not Path(path).is_file():
        raise FileNotFoundError(path)


def _resolve_categories(mode, categories):
    if mode == "baseline":
        return None
    return parse_categories(categories)


def cmd_ingest(args):
    records, stats = ingest(args.input, strict=args.strict)
    with _open_out(args.output) as out:
        out.write(json.dumps(stats.as_dict(), indent=2) + "\n")
    return EXIT_OK


def cmd_preprocess(args):
    with _open_in(args.input) as src, _open_out(args.output) as out:
        for line in src:
            out.write(" ".join(preprocess(line.rstrip("\n"))) + "\n")
    return EXIT_OK


def _load_corpus(args):
    _require_file(args.input)
    records, stats = ingest(args.input, strict=args.strict)
    log.info("ingest: %s", stats.as_dict())
    return records


def cmd_train(args):
    records = _load_corpus(args)
    clf = train_classifier(
        records,
        _resolve_categories(args.mode or "contextual", args.categories),
        author_min_tweets=args.min_author_tweets,
        use_bos=not args.no_bos,
    )
    save_bundle(clf, args.model)
    print(f"trained on {len(records)} tweets -> {args.model}", file=sys.stderr)
    return EXIT_OK


def _classify_inputs(lines):
    """Yield (tokens, context) for corpus-format JSON lines or plain text lines."""
    for line in lines:
        line = line.rstrip("\n")
        context = None
        text = line
        if line.lstrip().startswith("{"):
            try:
                raw = parse_record(line)
            except ValueError:
                pass
            else:
                text, context = raw.text, make_context(raw)
        yield preprocess(text), context


def cmd_classify(args):
    clf = load_bundle(args.model)
    if args.mode == "baseline":
        clf = clf.with_categories(None)
    elif args.mode == "contextual" or args.categories is not None:
        clf = clf.with_categories(args.categories or ",".join(CATEGORIES))
    with _open_in(args.input) as src, _open_out(args.output) as out:
        for tokens, context in _classify_inputs(src):
            pred = clf.classify(tokens, context)
            out.write(f"{pred.label}\t{pred.margin!r}\n")
    return EXIT_OK


def cmd_evaluate(args):
    records = _load_corpus(args)
    plan = kfold(records, args.k, args.seed)
    common = dict(author_min_tweets=args.min_author_tweets, use_bos=not args.no_bos)
    if args.all_variants:
        specs = standard_specs(**common)
    else:
        mode = args.mode or "baseline"
        cats = _resolve_categories(mode, args.categories)
        name = "Baseline-Bigram" if cats is None else "Contextual-" + "+".join(cats or ("none",))
        specs = [
            ClassifierSpec("Baseline-Majority", kind="majority", **common),
            ClassifierSpec(name, categories=cats, **common),
        ]
    started = time.perf_counter()
    reports = evaluate_many(specs, records, plan)
    log.info("evaluation took %.1fs", time.perf_counter() - started)
    print(format_accuracy_table(reports))
    print()
    print(format_class_table(reports[-1] if not args.all_variants else
                             next(r for r in reports if r.name == "Contextual-All")))
    if args.output:
        with _open_out(args.output) as out:
            out.write(reports_csv(reports))
    return EXIT_OK


def cmd_priors(args):
    records = _load_corpus(args)
    table = fit(records, args.min_author_tweets)
    cats = parse_categories(args.categories)
    if args.output:
        outdir = Path(args.output)
        outdir.mkdir(parents=True, exist_ok=True)
        for cat in cats:
            (outdir / f"{cat}.csv").write_text(report_csv(report(table, cat)), encoding="utf-8")
    else:
        for cat in cats:
            print(f"# {cat}")
            sys.stdout.write(report_csv(report(table, cat)))
    return EXIT_OK


def cmd_synth(args):
    if args.config:
        _require_file(args.config)
        cfg = load_config(args.config)
    elif args.benchmark:
        cfg = benchmark_config()
    else:
        cfg = SynthConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.n is not None:
        cfg.n_tweets = args.n
    print("synth config: " + json.dumps(vars(cfg), sort_keys=True, default=str), file=sys.stderr)
    n = generate(cfg, args.output)
    print(f"wrote {n} tweets to {args.output}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "preprocess": cmd_preprocess,
    "train": cmd_train,
    "classify": cmd_classify,
    "evaluate": cmd_evaluate,
    "priors": cmd_priors,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    _echo_config(args)
    try:
        return COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_INPUT
    except TrainingError as exc:
        print(f"error: training aborted: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except (CorpusError, BundleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

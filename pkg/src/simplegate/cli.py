"""Command-line entry point: ``simplegate <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 engine error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .classifiers import SVMHyper, load_model, load_model_meta, predict_batch, save_model, train
from .corpus import DataError, corpus_stats, file_sha256, load_annotated, load_tsv, read_parallel
from .evaluation import render_text, report
from .features import (
    FEATURE_NAMES,
    FeatureResources,
    build_resources,
    dump_json,
    extract_batch,
    write_feature_csv,
)
from .gate import EngineError, GateConfig, Pipeline, write_decisions
from .lexicon import DEFAULT_ITERATIONS

log = logging.getLogger("simplegate")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_ENGINE = 0, 1, 2, 3
DEFAULT_SEED = 13


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _existing(path: str, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise DataError(f"{what} not found: {p}")
    return p


def load_pairs(path):
    p = _existing(path, "annotated data")
    return load_tsv(p) if p.suffix.lower() == ".tsv" else load_annotated(p)


def cmd_train_resources(args) -> int:
    src = _existing(args.source, "source corpus")
    tgt = _existing(args.target, "target corpus")
    pairs = read_parallel(src, tgt)
    res = build_resources(pairs, iterations=args.iterations, use_null=args.null)
    extra = {
        "inputs": {"source_sha256": file_sha256(src), "target_sha256": file_sha256(tgt)},
        "sentence_pairs": len(pairs),
    }
    out = res.save(args.out, manifest_extra=extra)
    print(f"wrote resources for {len(pairs)} sentence pairs to {out}")
    return EXIT_OK


def cmd_extract(args) -> int:
    pairs = load_pairs(args.data)
    res = FeatureResources.load(_existing(args.resources, "resource directory"))
    X, y = extract_batch(res, pairs, threads=args.threads)
    write_feature_csv(X, y, args.out)
    print(f"wrote {X.shape[0]} feature rows to {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    data = _existing(args.data, "annotated data")
    pairs = load_pairs(data)
    res = FeatureResources.load(_existing(args.resources, "resource directory"))
    X, y = extract_batch(res, pairs, threads=args.threads)
    hyper = SVMHyper(lam=args.lam, epochs=args.epochs, seed=args.seed)
    model = train(args.classifier, X, y, hyper)
    meta = {"train_data_sha256": file_sha256(data), "resources_corpus_sha256": res.provenance}
    save_model(model, args.out, extra=meta)
    training_report = {
        "classifier": args.classifier,
        "examples": int(len(y)),
        "class_balance": {"Yes": int(y.sum()), "No": int(len(y) - y.sum())},
        "feature_means": dict(zip(FEATURE_NAMES, X.mean(axis=0).tolist())),
        "hyperparameters": {"lambda": args.lam, "epochs": args.epochs, "seed": args.seed} if args.classifier == "svm" else {},
        **meta,
    }
    dump_json(training_report, str(args.out) + ".report.json")
    print(f"trained {args.classifier} on {len(y)} pairs "
          f"({training_report['class_balance']['Yes']} Yes / {training_report['class_balance']['No']} No); "
          f"model written to {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    data = _existing(args.data, "annotated data")
    pairs = load_pairs(data)
    res = FeatureResources.load(_existing(args.resources, "resource directory"))
    model_path = _existing(args.model, "model file")
    model = load_model(model_path)
    meta = load_model_meta(model_path)
    if meta.get("train_data_sha256") == file_sha256(data):
        log.warning("evaluation data is identical to the classifier's training data")
    X, y = extract_batch(res, pairs, threads=args.threads)
    preds = predict_batch(model, X)
    machine = [p.y for p in preds]
    # SVM margins are not probabilities; error scores fall back to hard labels
    scores = [p.score for p in preds] if model.kind == "nb" else None
    rep = report(y.tolist(), machine, scores)
    if args.json:
        print(rep.to_json())
    else:
        print(render_text(rep, title=f"Human - {model.kind.upper()} classifier"))
    return EXIT_OK


def cmd_gate(args) -> int:
    cfg = GateConfig.load(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    _existing(cfg.classifier_model, "classifier model")
    _existing(cfg.resources, "resource directory")
    pipeline = Pipeline.from_config(cfg)
    with open(_existing(args.input, "input file"), encoding="utf-8") as fh:
        sentences = [line.rstrip("\r\n") for line in fh if line.strip()]
    decisions = pipeline.run(sentences)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as out:
            write_decisions(decisions, pipeline.summary, out)
    else:
        write_decisions(decisions, pipeline.summary, sys.stdout)
    s = pipeline.summary
    log.info("gate: %d sentences, %d simplified, %d original, %d flagged",
             s.total, s.routed_simplified, s.routed_original, s.failures)
    return EXIT_OK


def cmd_stats(args) -> int:
    if args.data:
        pairs = load_pairs(args.data)
    elif args.source and args.target:
        pairs = read_parallel(_existing(args.source, "source corpus"), _existing(args.target, "target corpus"))
    else:
        raise UsageError("stats needs --data or both --source and --target")
    stats = corpus_stats(pairs)
    if args.json:
        print(json.dumps(stats.as_dict(), indent=2))
    else:
        print(f"{'':<14}{'Source':>10}{'Target':>10}")
        print(f"{'Sentences':<14}{stats.sentence_count:>10}")
        print(f"{'Words':<14}{stats.word_count_source:>10}{stats.word_count_target:>10}")
        print(f"{'Unique words':<14}{stats.unique_words_source:>10}{stats.unique_words_target:>10}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="simplegate", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train-resources", help="train LMs, lexicon and frequency tables")
    p.add_argument("--source", required=True, help="complex-side corpus, one sentence per line")
    p.add_argument("--target", required=True, help="simplified-side corpus, line-aligned")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS, help="Model 1 EM iterations")
    p.add_argument("--null", action="store_true", help="add a NULL source word to the lexicon")
    p.set_defaults(func=cmd_train_resources)

    p = sub.add_parser("extract", help="dump the 17 features as CSV")
    p.add_argument("--data", required=True, help="annotated JSONL (or .tsv)")
    p.add_argument("--resources", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train a classifier on annotated pairs")
    p.add_argument("--data", required=True)
    p.add_argument("--resources", required=True)
    p.add_argument("--classifier", required=True, choices=("nb", "svm"))
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--lambda", dest="lam", type=float, default=SVMHyper.lam)
    p.add_argument("--epochs", type=int, default=SVMHyper.epochs)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="compare classifier output with human labels")
    p.add_argument("--data", required=True)
    p.add_argument("--resources", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gate", help="simplify, classify and route sentences")
    p.add_argument("--config", required=True)
    p.add_argument("--input", required=True, help="one sentence per line")
    p.add_argument("--output", help="decisions JSONL (default stdout)")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("--data")
    p.add_argument("--source")
    p.add_argument("--target")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"simplegate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EngineError as exc:
        print(f"simplegate: engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    except (DataError, ValueError, OSError) as exc:
        print(f"simplegate: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

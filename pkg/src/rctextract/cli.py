"""Command-line interface: ``rctextract <command> ...``.

Every option can also come from a JSON ``--config`` file whose keys are the
option names (dashes or underscores); options given on the command line win.
Logs go to standard error. The exit status is 0 on success, 1 on a hard
error (bad input, unreadable files, network failure) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

from .corpus import CorpusError, read_corpus, write_corpus
from .eval.protocol import holdout, kfold
from .eval.synthetic import NOISE_PRESETS, generate_synthetic
from .extractor import ROW_FIELDS, EvidenceExtractor, EvidenceRow
from .inference import MODES
from .ingest import (
    EmptyBody, EntrezTransport, FixtureTransport, IngestError, RecordingTransport,
    SearchStrategy, build_query, entrez_query, fetch, filter_records, to_abstract,
)
from .preprocess.pipeline import Preprocessor

log = logging.getLogger("rctextract")

# Estimator settings accepted by train and evaluate, with their flag types.
MODEL_OPTIONS = {
    "l2": float, "max_iter": int, "tol": float, "solver": str, "delta_a": float,
    "delta_r": float, "abbreviations": str, "gazetteer": str,
}


class CLIError(Exception):
    pass


def _read_ids(path: Optional[str]) -> Optional[List[str]]:
    if path is None:
        return None
    return [l.strip() for l in Path(path).read_text(encoding="utf-8").splitlines()
            if l.strip() and not l.startswith("#")]


def _model_config(args) -> dict:
    cfg = {k: getattr(args, k) for k in MODEL_OPTIONS if getattr(args, k, None) is not None}
    if getattr(args, "same_sentence", False):
        cfg["same_sentence"] = True
    if getattr(args, "no_fallback", False):
        cfg["fallback"] = False
    if getattr(args, "no_guess_sections", False):
        cfg["guess_sections"] = False
    return cfg


def _load(path: str):
    corpus = read_corpus(path)
    log.info("read %d abstracts from %s", len(corpus), path)
    return corpus


def write_table(rows: Sequence[EvidenceRow], path: Optional[str], fmt: str) -> None:
    """Write evidence rows as TSV or CSV (to stdout when ``path`` is None or ``-``)."""
    delim = "\t" if fmt == "tsv" else ","
    fh = sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8", newline="")
    try:
        w = csv.writer(fh, delimiter=delim, lineterminator="\n")
        w.writerow(ROW_FIELDS)
        for r in rows:
            w.writerow(r.cells())
    finally:
        if fh is not sys.stdout:
            fh.close()


# -- commands ---------------------------------------------------------------


def cmd_ingest(args) -> int:
    query = build_query(args.strategy)
    if not args.verbatim_query:
        query = entrez_query(query)
    if args.fixtures:
        transport = FixtureTransport(args.fixtures, page_size=args.page_size)
    else:
        transport = EntrezTransport(page_size=args.page_size, delay=args.delay)
        if args.record:
            transport = RecordingTransport(transport, args.record)
    records = filter_records(fetch(query, transport), _read_ids(args.include_ids))
    abstracts = []
    for r in records:
        try:
            abstracts.append(to_abstract(r))
        except EmptyBody as e:
            log.warning("skipping %s", e)
    write_corpus(args.output, abstracts)
    log.info("wrote %d abstracts to %s", len(abstracts), args.output)
    return 0


def cmd_preprocess(args) -> int:
    pre = Preprocessor(abbreviations=args.abbreviations, gazetteer=args.gazetteer,
                       guess_sections=not args.no_guess_sections).fit([])
    write_corpus(args.output, pre.transform(_load(args.corpus)))
    return 0


def cmd_train(args) -> int:
    corpus = _load(args.corpus)
    if args.include_ids is not None:
        keep = set(_read_ids(args.include_ids))
        corpus = [a for a in corpus if a.id in keep]
    est = EvidenceExtractor(mode=args.mode, **_model_config(args)).fit(corpus)
    est.save(args.model)
    log.info("model written to %s", args.model)
    return 0


def _decode_rows(args_tuple):
    model_path, mode, abstracts = args_tuple
    est = EvidenceExtractor.load(model_path)
    return est.evidence_rows(abstracts, mode)


def cmd_predict(args) -> int:
    if args.mode == "zero":
        raise CLIError("zero mode has no unique head per label; use vanilla or full")
    corpus = _load(args.corpus)
    if args.workers > 1 and len(corpus) > 1:
        size = -(-len(corpus) // args.workers)
        chunks = [corpus[i:i + size] for i in range(0, len(corpus), size)]
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            parts = pool.map(_decode_rows, [(args.model, args.mode, c) for c in chunks])
            rows = [r for part in parts for r in part]
    else:
        rows = EvidenceExtractor.load(args.model).evidence_rows(corpus, args.mode)
    write_table(rows, args.output, args.format)
    bad = sum(r.status != "OK" for r in rows)
    if bad:
        log.warning("%d of %d abstracts had no feasible assignment", bad, len(rows))
    return 0


def cmd_evaluate(args) -> int:
    cfg = _model_config(args)
    modes = tuple(args.modes.split(",")) if args.modes else MODES
    if args.protocol == "cv":
        report = kfold(_load(args.corpus), k=args.k, seed=args.seed, config=cfg, modes=modes,
                       per_fold_average=args.per_fold_average, n_jobs=args.workers)
    else:
        if not args.test:
            raise CLIError("holdout needs --test")
        report = holdout(_load(args.corpus), _load(args.test), config=cfg, modes=modes, seed=args.seed)
    sys.stdout.write(report.render_text())
    if args.json:
        Path(args.json).write_text(report.to_json() + "\n", encoding="utf-8")
    return 0


def cmd_synth(args) -> int:
    write_corpus(args.output, generate_synthetic(args.n, seed=args.seed, noise=args.noise))
    return 0


# -- parser -----------------------------------------------------------------


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--l2", type=float, help="L2 penalty weight (default 1.0)")
    p.add_argument("--max-iter", type=int, help="optimizer iterations (default 500)")
    p.add_argument("--tol", type=float, help="optimizer tolerance (default 1e-6)")
    p.add_argument("--solver", choices=["lbfgs", "gd"], help="optimizer (default lbfgs)")
    p.add_argument("--delta-a", type=float, help="arm distance penalty (default 1e-5)")
    p.add_argument("--delta-r", type=float, help="result distance penalty (default 1e-5)")
    p.add_argument("--same-sentence", action="store_true",
                   help="require outcome and results in one sentence")
    p.add_argument("--no-fallback", action="store_true",
                   help="do not fall back to vanilla when full decoding is infeasible")
    _prep_flags(p)


def _prep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--abbreviations", help="abbreviation file, ABBR<TAB>expansion (default: bundled)")
    p.add_argument("--gazetteer", help="gazetteer file (default: bundled)")
    p.add_argument("--no-guess-sections", action="store_true",
                   help="leave unstructured abstracts without guessed sections")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rctextract", description="Evidence-table extraction from clinical trial abstracts.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument("--config", help="JSON file of option defaults")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="stderr log level")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("ingest", help="fetch abstracts for a search strategy", formatter_class=fmt)
    p.add_argument("--strategy", required=True, choices=[s.value for s in SearchStrategy])
    p.add_argument("-o", "--output", required=True, help="corpus file to write")
    p.add_argument("--fixtures", help="replay recorded responses from this directory")
    p.add_argument("--record", help="store live responses in this directory")
    p.add_argument("--include-ids", help="file of allowed record ids, one per line")
    p.add_argument("--page-size", type=int, default=100)
    p.add_argument("--delay", type=float, default=0.34, help="seconds between requests")
    p.add_argument("--verbatim-query", action="store_true",
                   help="send the query text as printed, without quote/parenthesis repair")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("preprocess", help="run preprocessing over a corpus", formatter_class=fmt)
    p.add_argument("corpus")
    p.add_argument("-o", "--output", required=True)
    _prep_flags(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", help="fit a model on an annotated corpus", formatter_class=fmt)
    p.add_argument("corpus")
    p.add_argument("-m", "--model", required=True, help="model file to write")
    p.add_argument("--mode", choices=MODES, default="full", help="default decoding mode")
    p.add_argument("--include-ids", help="file of allowed abstract ids, one per line")
    _model_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="emit evidence tables", formatter_class=fmt)
    p.add_argument("corpus")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("--mode", choices=MODES, default="full")
    p.add_argument("-o", "--output", help="table file (default stdout)")
    p.add_argument("--format", choices=["tsv", "csv"], default="tsv")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="cross-validation or hold-out evaluation", formatter_class=fmt)
    p.add_argument("corpus", help="annotated corpus (training set for holdout)")
    p.add_argument("--protocol", choices=["cv", "holdout"], default="cv")
    p.add_argument("--test", help="held-out annotated corpus")
    p.add_argument("-k", type=int, default=10, help="number of folds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--modes", help="comma-separated subset of zero,vanilla,full")
    p.add_argument("--per-fold-average", action="store_true",
                   help="average per-fold metrics instead of pooling counts")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", help="also write the report as JSON here")
    _model_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic annotated corpus", formatter_class=fmt)
    p.add_argument("-n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", choices=list(NOISE_PRESETS), default="medium")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            parser.error(f"cannot read config: {e}")
        if not isinstance(cfg, dict):
            parser.error("config must be a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        # Config values become defaults, so explicit flags still override them.
        parser.set_defaults(**cfg)
        for action in parser._subparsers._group_actions:
            for sp in action.choices.values():
                sp.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=args.log_level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CLIError, CorpusError, IngestError, OSError, ValueError) as e:
        log.error("%s", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())

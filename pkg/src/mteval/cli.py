"""Command-line entry point.

One binary, seven subcommands: ``bleu``, ``split``, ``sample``,
``gae-score``, ``serve``, ``report``, ``best-epoch``. Exit codes: 0 ok,
1 usage/configuration error, 2 bad input data, 3 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import gae, report as report_mod
from .bleu import BleuConfig, corpus_bleu, segments_from_lines
from .errors import ConfigurationError, DataError, MTEvalError
from .gae import SessionItem, format_score
from .tokenizers import DEFAULT_MODE, LOWER_SUFFIX, registered_modes

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_session_items(path) -> list[SessionItem]:
    """Read a JSONL items file: one sentence record per line."""
    items = []
    for lineno, line in enumerate(corpus_mod.read_lines(path), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            items.append(
                SessionItem(
                    sentence_id=str(record["sentence_id"]),
                    source_text=str(record.get("source_text", "")),
                    reference_text=str(record["reference_text"]),
                    candidate_text=str(record["candidate_text"]),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DataError(f"{path}:{lineno}: bad item record ({exc})") from exc
    if not items:
        raise DataError(f"{path}: no items")
    return items


def _tokenizer_mode(args) -> str:
    mode = args.tokenizer
    if getattr(args, "lowercase", False) and not mode.endswith(LOWER_SUFFIX):
        mode += LOWER_SUFFIX
    return mode


def _bleu_config(args) -> BleuConfig:
    weights: tuple[float, ...] = ()
    if args.weights:
        try:
            weights = tuple(float(w) for w in args.weights.split(","))
        except ValueError:
            raise ConfigurationError(f"weights must be numbers: {args.weights!r}") from None
    return BleuConfig(
        max_n=args.max_n,
        weights=weights,
        smoothing=args.smoothing,
        epsilon=args.epsilon,
    )


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --- subcommands ------------------------------------------------------------


def cmd_bleu(args) -> int:
    candidates = corpus_mod.read_lines(args.candidates)
    references = [corpus_mod.read_lines(path) for path in args.references]
    mode = _tokenizer_mode(args)
    config = _bleu_config(args)
    segments = segments_from_lines(candidates, references, mode)

    if args.per_sentence:
        scores = [corpus_bleu([segment], config).score for segment in segments]
        if args.json:
            print(json.dumps({"scores": scores, "tokenizer_mode": mode}))
        else:
            for score in scores:
                print(format_score(score))
        return EXIT_OK

    result = corpus_bleu(segments, config)
    if args.json:
        print(json.dumps(result.as_dict(), ensure_ascii=False))
    else:
        precisions = ", ".join(str(p) for p in result.precisions)
        print(
            f"BLEU = {format_score(result.score)} "
            f"(precisions: {precisions}; BP = {result.brevity_penalty:.4f}; "
            f"c = {result.candidate_length}; r = {result.reference_length}; "
            f"tokenizer = {result.tokenizer_mode}; smoothing = {result.smoothing})"
        )
        for note in result.notes:
            print(f"note: {note}", file=sys.stderr)
    return EXIT_OK


def _split_spec(args) -> corpus_mod.SplitSpec:
    if args.ratio:
        return corpus_mod.SplitSpec(seed=args.seed, ratios=corpus_mod.parse_ratio(args.ratio))
    try:
        counts = tuple(int(c) for c in args.counts.split(","))
    except ValueError:
        raise ConfigurationError(f"counts must be integers: {args.counts!r}") from None
    if len(counts) != 3:
        raise ConfigurationError(f"counts must have three parts, got {args.counts!r}")
    return corpus_mod.SplitSpec(
        seed=args.seed, counts=counts, discard_remainder=args.discard_remainder
    )


def cmd_split(args) -> int:
    parallel = corpus_mod.load_parallel(args.source, args.target)
    provenance = corpus_mod.write_split(parallel, _split_spec(args), args.output_dir)
    if args.json:
        print(json.dumps(provenance, ensure_ascii=False))
    else:
        sizes = provenance["sizes"]
        print(
            f"split {provenance['corpus_size']} pairs -> "
            f"train {sizes['train']}, valid {sizes['valid']}, test {sizes['test']}"
            + (f", discarded {sizes['discarded']}" if sizes["discarded"] else "")
        )
        print(f"wrote {args.output_dir}/{{train,valid,test}}.{{src,tgt}} and provenance.json")
    return EXIT_OK


def cmd_sample(args) -> int:
    parallel = corpus_mod.load_parallel(args.source, args.target)
    provenance = corpus_mod.write_sample(parallel, args.size, args.seed, args.output_dir, args.stem)
    if args.json:
        print(json.dumps(provenance, ensure_ascii=False))
    else:
        print(f"sampled {args.size} of {len(parallel)} pairs into {args.output_dir}/{args.stem}.{{src,tgt}}")
    return EXIT_OK


def _print_table(table: gae.GaeScoreTable) -> None:
    print(f"Annotator: {table.annotator_id}  ({table.sentence_count} sentences)")
    width = max(len(c.label) for c in gae.CATEGORIES)
    for category in gae.CATEGORIES:
        print(f"  {category.label:<{width}}  {format_score(table.category_scores[category]):>7}")
    print(f"Model score: {format_score(table.model_score)}")


def cmd_gae_score(args) -> int:
    annotations = gae.read_annotations(args.annotations)
    pooled = gae.pooled_tables(annotations)
    if pooled.pooled is None:
        raise DataError(f"{args.annotations}: no annotations")
    if args.json:
        print(
            json.dumps(
                {
                    "per_annotator": {
                        a: t.as_dict() for a, t in pooled.per_annotator.items()
                    },
                    "pooled": pooled.pooled.as_dict(),
                    "agreement": (
                        {c.key: v for c, v in pooled.agreement.items()}
                        if pooled.agreement
                        else None
                    ),
                },
                ensure_ascii=False,
            )
        )
        return EXIT_OK
    if len(pooled.per_annotator) == 1:
        _print_table(next(iter(pooled.per_annotator.values())))
        return EXIT_OK
    for table in pooled.per_annotator.values():
        _print_table(table)
        print()
    print("Pooled across annotators:")
    _print_table(pooled.pooled)
    if pooled.agreement:
        print("Raw agreement by category:")
        width = max(len(c.label) for c in gae.CATEGORIES)
        for category in gae.CATEGORIES:
            print(f"  {category.label:<{width}}  {format_score(pooled.agreement[category]):>7}")
    return EXIT_OK


def _session_fingerprint(model_label: str, items: list[SessionItem]) -> str:
    canonical = json.dumps(
        {"model_label": model_label, "items": [i.as_dict() for i in items]},
        ensure_ascii=False,
        sort_keys=True,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def cmd_serve(args) -> int:
    import uvicorn

    from .service import SessionStore, create_app

    store = SessionStore(args.data_dir)
    created = []
    for items_path in args.session or []:
        items = read_session_items(items_path)
        label = args.model_label or Path(items_path).stem
        session_id = _session_fingerprint(label, items)
        # Content-addressed id: restarting with the same flags reuses the session.
        if not store.has_session(session_id):
            store.create_session(label, items, session_id=session_id)
        created.append({"session_id": session_id, "items": len(items), "model_label": label})
    if args.json:
        print(
            json.dumps(
                {"host": args.host, "port": args.port, "data_dir": args.data_dir, "sessions": created}
            ),
            flush=True,
        )
    else:
        for session in created:
            print(
                f"session {session['session_id']} ready "
                f"({session['items']} items, model {session['model_label']})",
                flush=True,
            )
    uvicorn.run(create_app(store), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_report(args) -> int:
    items = read_session_items(args.items)
    annotations = gae.read_annotations(args.annotations)
    built = report_mod.build_report(
        items,
        annotations,
        model_label=args.model_label,
        tokenizer_mode=_tokenizer_mode(args),
        config=_bleu_config(args),
        bleu_threshold=args.bleu_threshold,
        gae_threshold=args.gae_threshold,
    )
    fmt = args.format
    if args.json:
        fmt = "json"
    if fmt is None and args.output:
        suffix = Path(args.output).suffix.lower()
        fmt = {".md": "markdown", ".csv": "csv", ".json": "json"}.get(suffix)
        if fmt is None:
            raise ConfigurationError(f"cannot infer report format from {args.output!r}")
    _emit(report_mod.render_report(built, fmt or "markdown"), args.output)
    return EXIT_OK


def cmd_best_epoch(args) -> int:
    if args.scores:
        series = report_mod.read_epoch_scores(args.scores, args.model_label)
    else:
        series = report_mod.score_epoch_dir(
            args.candidates_dir,
            args.references,
            model_label=args.model_label,
            tokenizer_mode=_tokenizer_mode(args),
            config=_bleu_config(args),
        )
    best = report_mod.best_epoch(series)
    if args.json:
        print(json.dumps({"model_label": series.model_label, "epoch": best.epoch, "bleu": best.bleu}))
    else:
        print(f"best epoch for {series.model_label}: {best.epoch} (BLEU {format_score(best.bleu)})")
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def _add_bleu_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tokenizer", default=DEFAULT_MODE, choices=registered_modes())
    parser.add_argument("--lowercase", action="store_true", help="lowercase before tokenizing")
    parser.add_argument("--max-n", type=int, default=4, help="highest n-gram order (default 4)")
    parser.add_argument("--weights", default="", help="comma-separated per-order weights")
    parser.add_argument("--smoothing", default="none", choices=["none", "add-epsilon"])
    parser.add_argument("--epsilon", type=float, default=0.1, help="numerator smoothing constant")


def build_parser() -> Parser:
    parser = Parser(prog="mteval", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bleu", help="score candidate translations against references")
    p.add_argument("--candidates", required=True, help="file with one candidate per line")
    p.add_argument("--references", required=True, nargs="+", help="one or more reference files")
    _add_bleu_flags(p)
    p.add_argument("--per-sentence", action="store_true", help="one score per input line")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bleu)

    p = sub.add_parser("split", help="split a parallel corpus into train/valid/test")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--ratio", help="e.g. 98:1:1")
    group.add_argument("--counts", help="e.g. 784000,1000,1000")
    p.add_argument("--discard-remainder", action="store_true")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("sample", help="sample an evaluation set from a parallel corpus")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("-k", "--size", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--stem", default="sample")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("gae-score", help="score grammar-accuracy annotation files")
    p.add_argument("--annotations", required=True, help="one-record-per-line annotation file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_gae_score)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument(
        "--port", type=int, default=int(os.environ.get("MTEVAL_PORT", "8000"))
    )
    p.add_argument("--host", default=os.environ.get("MTEVAL_HOST", "127.0.0.1"))
    p.add_argument(
        "--data-dir", default=os.environ.get("MTEVAL_DATA_DIR", "mteval-data")
    )
    p.add_argument(
        "--session",
        action="append",
        metavar="ITEMS_FILE",
        help="create a session from a JSONL items file at startup (repeatable)",
    )
    p.add_argument("--model-label", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("report", help="BLEU-vs-grammar comparison report")
    p.add_argument("--items", required=True, help="JSONL items file")
    p.add_argument("--annotations", required=True)
    p.add_argument("--model-label", default="model")
    p.add_argument("--format", choices=list(report_mod.RENDER_FORMATS), default=None)
    p.add_argument("--output", default=None, help=".md/.csv/.json output file")
    p.add_argument("--bleu-threshold", type=float, default=report_mod.DEFAULT_BLEU_THRESHOLD)
    p.add_argument("--gae-threshold", type=float, default=report_mod.DEFAULT_GAE_THRESHOLD)
    _add_bleu_flags(p)
    p.add_argument("--json", action="store_true", help="shorthand for --format json")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("best-epoch", help="pick the checkpoint with the highest BLEU")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--scores", help="CSV with header epoch,bleu")
    group.add_argument("--candidates-dir", help="directory of per-epoch candidate files")
    p.add_argument("--references", help="reference file for --candidates-dir")
    p.add_argument("--model-label", default=None)
    _add_bleu_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_best_epoch)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "best-epoch" and args.candidates_dir and not args.references:
        parser.error("--candidates-dir requires --references")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"mteval: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"mteval: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except MTEvalError as exc:
        print(f"mteval: error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - safety net
        print(f"mteval: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

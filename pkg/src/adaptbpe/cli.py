"""Command-line front end.

    adaptbpe tokenize    --vocab V --merges M [--domain D] [--mode bpe|adaptbpe]
    adaptbpe compare     --vocab V --merges M --domain D
    adaptbpe fragscore   --vocab V --merges M [--min-subwords K]
    adaptbpe build-vocab --vocab V --merges M --strategy avocado|sizesearch --out DIR

Input is one document per line (or JSONL with a "text" field under
``--jsonl``). Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from typing import IO, Any

from .adaptbpe_engine import AdaptBPETokenizer
from .bpe_engine import BPETokenizer, UnknownTokenError
from .metrics import compare, fragment_score, min_subwords_filter, word_tokenizer
from .pretokenizer import UnknownSymbolError
from .vocab_builder import BuildConfig, ConfigError, build_avocado, build_sizesearch, collect_candidates
from .vocab_model import ExtendedVocabulary, VocabError, load_extended

logger = logging.getLogger("adaptbpe")


class CliError(Exception):
    pass


def _escape_tsv(token: str) -> str:
    return (
        token.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace(" ", "\\s")
    )


@contextmanager
def _open_in(path: str) -> Iterator[IO[str]]:
    if path == "-":
        yield open(sys.stdin.fileno(), encoding="utf-8", newline="\n", closefd=False)
    else:
        with open(path, encoding="utf-8", newline="\n") as fh:
            yield fh


@contextmanager
def _open_out(path: str) -> Iterator[IO[str]]:
    if path == "-":
        sys.stdout.flush()
        out = open(sys.stdout.fileno(), "w", encoding="utf-8", newline="\n", closefd=False)
        try:
            yield out
        finally:
            out.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _documents(fh: IO[str], jsonl: bool) -> Iterator[str]:
    for lineno, line in enumerate(fh, start=1):
        line = line.rstrip("\n").rstrip("\r")
        if jsonl:
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                yield record["text"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CliError(f"line {lineno}: not a JSON object with a 'text' field ({exc})") from None
        else:
            yield line


def _load(args: argparse.Namespace) -> ExtendedVocabulary:
    return load_extended(args.vocab, args.merges, args.domain)


def _tokenizer(args: argparse.Namespace, ev: ExtendedVocabulary) -> BPETokenizer:
    return AdaptBPETokenizer(ev) if args.mode == "adaptbpe" else BPETokenizer(ev)


def cmd_tokenize(args: argparse.Namespace) -> None:
    tokenizer = _tokenizer(args, _load(args))
    with _open_in(args.input) as fin, _open_out(args.output) as fout:
        for n, doc in enumerate(_documents(fin, args.jsonl)):
            seq = tokenizer.encode(doc, trace=args.trace)
            if args.format == "tsv":
                row = [str(n), " ".join(_escape_tsv(t) for t in seq.tokens)]
                if args.ids:
                    row.append(" ".join(map(str, seq.ids)))
                if args.trace:
                    row.append(json.dumps(seq.trace, ensure_ascii=False))
                fout.write("\t".join(row) + "\n")
            else:
                record: dict[str, Any] = {"tokens": list(seq.tokens)}
                if args.ids:
                    record["ids"] = list(seq.ids)
                if args.trace:
                    record["trace"] = seq.trace
                fout.write(json.dumps(record, ensure_ascii=False) + "\n")


def cmd_compare(args: argparse.Namespace) -> None:
    if args.domain is None:
        raise CliError("compare needs --domain")
    ev = _load(args)
    with _open_in(args.input) as fin:
        report = compare(_documents(fin, args.jsonl), ev, sentence_initial=args.sentence_initial)
    with _open_out(args.output) as fout:
        fout.write(json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n")


def cmd_fragscore(args: argparse.Namespace) -> None:
    tokenize = word_tokenizer(_tokenizer(args, _load(args)), args.sentence_initial)
    word_filter = None
    if args.min_subwords is not None:
        word_filter = min_subwords_filter(tokenize, args.min_subwords)
    with _open_in(args.input) as fin:
        report = fragment_score(_documents(fin, args.jsonl), tokenize, word_filter)
    if report.empty:
        logger.warning("no words were scored; fragment scores are undefined")
    with _open_out(args.output) as fout:
        fout.write(json.dumps(report.to_dict(per_word=args.per_word), indent=2, ensure_ascii=False) + "\n")


def _parse_grid(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"size grid must be comma-separated integers: {text!r}") from None


def cmd_build_vocab(args: argparse.Namespace) -> None:
    ev = _load(args)
    threshold_k = args.min_subwords
    if threshold_k is None:
        threshold_k = 2 if args.strategy == "avocado" else 1
    config = BuildConfig(
        gamma=args.gamma,
        size_grid=args.size_grid,
        threshold_k=threshold_k,
        epsilon=args.epsilon,
        batch_size=args.batch,
        max_merges=args.max_merges,
        sentence_initial=args.sentence_initial,
    ).validate(args.strategy)
    with _open_in(args.input) as fin:
        pool = collect_candidates(
            _documents(fin, args.jsonl),
            ev.base,
            ev.merges,
            threshold_k=config.threshold_k,
            max_merges=config.max_merges,
            sentence_initial=config.sentence_initial,
        )
    if args.strategy == "avocado":
        result = build_avocado(pool, ev.base, ev.merges, config=config)
    else:
        result = build_sizesearch(pool, ev.base, ev.merges, config=config)
    result.write(args.out)
    if not result.reached:
        logger.warning("candidates exhausted before the fragment score reached gamma")
    with _open_out("-") as fout:
        fout.write(f"{result.size}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--vocab", required=True, help="vocab.json of the base model")
    common.add_argument("--merges", required=True, help="merges.txt (base rules, then any domain rules)")
    common.add_argument("--domain", help="domain tokens, one per line")
    common.add_argument("--mode", choices=("bpe", "adaptbpe"), default="adaptbpe")
    common.add_argument("--input", "-i", default="-", help="input file (default: stdin)")
    common.add_argument("--output", "-o", default="-", help="output file (default: stdout)")
    common.add_argument("--jsonl", action="store_true", help="input lines are JSON objects with a 'text' field")
    common.add_argument(
        "--sentence-initial",
        action="store_true",
        help="score words without a leading space marker",
    )
    common.add_argument("--verbose", "-v", action="store_true")

    parser = argparse.ArgumentParser(prog="adaptbpe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", parents=[common], help="tokenize one document per line")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--ids", action="store_true", help="also emit token ids")
    p.add_argument("--trace", action="store_true", help="emit per-word merge traces")
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("compare", parents=[common], help="fragment-score report, BPE vs AdaptBPE")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("fragscore", parents=[common], help="fragment score of a corpus")
    p.add_argument("--min-subwords", type=int, help="only score words split into more than K pieces")
    p.add_argument("--per-word", action="store_true", help="include per-word counts")
    p.set_defaults(func=cmd_fragscore)

    p = sub.add_parser("build-vocab", parents=[common], help="build a domain vocabulary")
    p.add_argument("--strategy", choices=("avocado", "sizesearch"), required=True)
    p.add_argument("--gamma", type=float, default=3.0)
    p.add_argument("--size-grid", type=_parse_grid, default=(0,))
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--batch", type=int, default=100)
    p.add_argument("--min-subwords", type=int, help="candidate cutoff (default 2 for avocado, 1 for sizesearch)")
    p.add_argument("--max-merges", type=int)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_build_vocab)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        args.func(args)
    except ConfigError as exc:
        parser.error(str(exc))
    except (OSError, VocabError, CliError, UnknownTokenError, UnknownSymbolError, UnicodeDecodeError) as exc:
        print(f"adaptbpe: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

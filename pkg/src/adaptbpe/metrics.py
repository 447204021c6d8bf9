"""Fragment score, OOV rate and BPE vs AdaptBPE corpus comparison."""

from __future__ import annotations

import logging
import statistics
import string
from collections import Counter
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from typing import Any

from .adaptbpe_engine import AdaptBPETokenizer
from .bpe_engine import BPETokenizer
from .pretokenizer import SPACE_MARKER, byte_encode
from .vocab_model import ExtendedVocabulary, Vocabulary

__all__ = [
    "DEFAULT_STRIP",
    "DiffReport",
    "FragmentReport",
    "OOVReport",
    "compare",
    "count_words",
    "fragment_score",
    "min_subwords_filter",
    "oov_rate",
    "split_words",
    "word_tokenizer",
]

logger = logging.getLogger(__name__)

DEFAULT_STRIP = string.punctuation

Tokenize = Callable[[str], "list[str] | tuple[str, ...]"]


def split_words(text: str, strip: str = DEFAULT_STRIP) -> list[str]:
    """Whitespace-delimited words with leading/trailing ``strip`` chars removed."""
    words = []
    for raw in text.split():
        word = raw.strip(strip)
        if word:
            words.append(word)
    return words


def count_words(corpus: Iterable[str], strip: str = DEFAULT_STRIP) -> Counter[str]:
    counts: Counter[str] = Counter()
    for doc in corpus:
        counts.update(split_words(doc, strip))
    return counts


def word_tokenizer(tokenizer: BPETokenizer, sentence_initial: bool = False) -> Callable[[str], list[str]]:
    """Tokenize a standalone word, by default in mid-sentence form (" word")."""
    prefix = "" if sentence_initial else " "

    def tokenize(word: str) -> list[str]:
        return list(tokenizer.encode(prefix + word).tokens)

    return tokenize


def min_subwords_filter(tokenize: Tokenize, k: int) -> Callable[[str], bool]:
    """Predicate keeping words that ``tokenize`` splits into more than ``k`` pieces."""
    return lambda word: len(tokenize(word)) > k


@dataclass
class FragmentReport:
    word_count: int = 0
    unique_words: int = 0
    subword_total: int = 0
    subword_type_total: int = 0
    per_word: dict[str, tuple[int, int]] = field(default_factory=dict, repr=False)

    @property
    def empty(self) -> bool:
        return self.word_count == 0

    @property
    def fragment_score_occurrence(self) -> float | None:
        return self.subword_total / self.word_count if self.word_count else None

    @property
    def fragment_score_type(self) -> float | None:
        return self.subword_type_total / self.unique_words if self.unique_words else None

    @classmethod
    def from_counts(cls, counts: dict[str, tuple[int, int]]) -> FragmentReport:
        report = cls(per_word=dict(sorted(counts.items())))
        for occ, subwords in report.per_word.values():
            report.word_count += occ
            report.unique_words += 1
            report.subword_total += occ * subwords
            report.subword_type_total += subwords
        return report

    def to_dict(self, per_word: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "fragment_score_occurrence": self.fragment_score_occurrence,
            "fragment_score_type": self.fragment_score_type,
            "word_count": self.word_count,
            "unique_words": self.unique_words,
            "empty": self.empty,
        }
        if per_word:
            out["per_word"] = {w: list(v) for w, v in self.per_word.items()}
        return out


def _score_words(
    counts: Counter[str], tokenize: Tokenize, word_filter: Callable[[str], bool] | None
) -> FragmentReport:
    table = {}
    for word, occ in counts.items():
        if word_filter is not None and not word_filter(word):
            continue
        table[word] = (occ, len(tokenize(word)))
    return FragmentReport.from_counts(table)


def fragment_score(
    corpus: Iterable[str],
    tokenize: Tokenize,
    word_filter: Callable[[str], bool] | None = None,
    strip: str = DEFAULT_STRIP,
) -> FragmentReport:
    """Average number of subwords per word over ``corpus``.

    Words are counted first and each distinct word is tokenized once, so the
    result does not depend on document order. Integer totals are kept and
    divided only when a score is read.
    """
    return _score_words(count_words(corpus, strip), tokenize, word_filter)


@dataclass
class OOVReport:
    fractions: list[float]
    median: float | None

    def to_dict(self) -> dict[str, Any]:
        return {"fractions": self.fractions, "median": self.median}


def _is_whole_token(word: str, vocab: Vocabulary) -> bool:
    surface = byte_encode(word.encode("utf-8"))
    return surface in vocab or SPACE_MARKER + surface in vocab


def oov_rate(documents: Iterable[str], vocab: Vocabulary, strip: str = DEFAULT_STRIP) -> OOVReport:
    """Per-document fraction of unique words that are not a single vocabulary token."""
    fractions = []
    for n, doc in enumerate(documents):
        unique = set(split_words(doc, strip))
        if not unique:
            logger.warning("document %d has no words; counting its OOV fraction as 0", n)
            fractions.append(0.0)
            continue
        missing = sum(1 for w in unique if not _is_whole_token(w, vocab))
        fractions.append(missing / len(unique))
    return OOVReport(fractions, statistics.median(fractions) if fractions else None)


@dataclass
class DiffReport:
    fragment_a: FragmentReport
    fragment_b: FragmentReport
    changed_words: list[tuple[str, list[str], list[str]]]
    domain_token_usage: dict[str, int]

    @property
    def drop_percent(self) -> float:
        a = self.fragment_a.fragment_score_occurrence
        b = self.fragment_b.fragment_score_occurrence
        if not a or b is None:
            return 0.0
        return 100.0 * (a - b) / a

    def to_dict(self) -> dict[str, Any]:
        # top-level scores describe the AdaptBPE side; the baseline sits under "bpe"
        return {
            "fragment_score_occurrence": self.fragment_b.fragment_score_occurrence,
            "fragment_score_type": self.fragment_b.fragment_score_type,
            "word_count": self.fragment_b.word_count,
            "drop_percent": self.drop_percent,
            "changed_words": [
                {"word": w, "bpe": list(a), "adaptbpe": list(b)} for w, a, b in self.changed_words
            ],
            "domain_token_usage": dict(self.domain_token_usage),
            "bpe": self.fragment_a.to_dict(per_word=False),
            "adaptbpe": self.fragment_b.to_dict(per_word=False),
        }


def compare(
    corpus: Iterable[str],
    ev: ExtendedVocabulary,
    sentence_initial: bool = False,
    strip: str = DEFAULT_STRIP,
) -> DiffReport:
    """Score ``corpus`` under standard BPE and AdaptBPE over the same vocabulary."""
    counts = count_words(corpus, strip)
    bpe = BPETokenizer(ev)
    adapt = AdaptBPETokenizer(ev)
    prefix = "" if sentence_initial else " "
    start = ev.domain_start
    rows_a, rows_b = {}, {}
    changed = []
    usage = {"bpe": 0, "adaptbpe": 0}
    for word in sorted(counts):
        occ = counts[word]
        seq_a = bpe.encode(prefix + word)
        seq_b = adapt.encode(prefix + word)
        rows_a[word] = (occ, len(seq_a))
        rows_b[word] = (occ, len(seq_b))
        usage["bpe"] += occ * sum(1 for i in seq_a.ids if i >= start)
        usage["adaptbpe"] += occ * sum(1 for i in seq_b.ids if i >= start)
        if seq_a.tokens != seq_b.tokens:
            changed.append((word, list(seq_a.tokens), list(seq_b.tokens)))
    return DiffReport(
        FragmentReport.from_counts(rows_a), FragmentReport.from_counts(rows_b), changed, usage
    )

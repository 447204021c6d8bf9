"""Domain-vocabulary construction driven by fragment score.

Two strategies:

* ``avocado``: add ranked candidate subwords in batches until the fragment
  score of the heavily split words drops to ``gamma`` or below.
* ``sizesearch``: score a grid of vocabulary sizes and keep the smallest one
  whose corpus fragment score is within ``epsilon`` of the best.

Candidates come from BPE training over the words the base tokenizer splits
into more than ``threshold_k`` pieces, in merge-creation order.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from collections.abc import Iterable
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .adaptbpe_engine import AdaptBPETokenizer
from .bpe_engine import BPETokenizer, train_bpe
from .metrics import DEFAULT_STRIP, count_words, word_tokenizer
from .pretokenizer import pre_tokenize
from .vocab_model import ExtendedVocabulary, MergeRuleTable, Vocabulary, extend, write_extended

__all__ = [
    "BuildConfig",
    "BuildResult",
    "CandidatePool",
    "ConfigError",
    "build_avocado",
    "build_sizesearch",
    "collect_candidates",
]

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BuildConfig:
    gamma: float = 3.0
    size_grid: tuple[int, ...] = (0,)
    threshold_k: int = 2
    epsilon: float = 0.01
    batch_size: int = 100
    max_merges: int | None = None
    sentence_initial: bool = False

    def validate(self, strategy: str) -> BuildConfig:
        if self.threshold_k not in (1, 2):
            raise ConfigError(f"threshold_k must be 1 or 2, got {self.threshold_k}")
        if strategy == "avocado":
            if not self.gamma > 1:
                raise ConfigError(f"gamma must exceed 1, got {self.gamma}")
            if self.batch_size < 1:
                raise ConfigError(f"batch size must be positive, got {self.batch_size}")
        elif strategy == "sizesearch":
            grid = self.size_grid
            if not grid:
                raise ConfigError("size grid is empty")
            if any(s < 0 for s in grid):
                raise ConfigError("size grid entries must be >= 0")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"size grid must be strictly increasing, got {list(grid)}")
            if self.epsilon < 0:
                raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        else:
            raise ConfigError(f"unknown strategy {strategy!r}")
        return self


@dataclass
class CandidatePool:
    """Heavily split words plus the candidate subwords learned from them.

    ``words`` counts occurrences of the selected words; ``corpus_words``
    counts every word in the corpus. ``candidate_merges[i]`` is the merge
    that first produced ``ranked_subwords[i]``.
    """

    words: Counter[str]
    corpus_words: Counter[str]
    ranked_subwords: list[str]
    candidate_merges: list[tuple[str, str]]
    threshold_k: int

    def __len__(self) -> int:
        return len(self.ranked_subwords)


def collect_candidates(
    corpus: Iterable[str],
    vocab: Vocabulary,
    merges: MergeRuleTable,
    threshold_k: int = 2,
    max_merges: int | None = None,
    sentence_initial: bool = False,
    strip: str = DEFAULT_STRIP,
) -> CandidatePool:
    corpus_words = count_words(corpus, strip)
    tokenize = word_tokenizer(BPETokenizer(extend(vocab, merges)), sentence_initial)
    words = Counter({w: c for w, c in corpus_words.items() if len(tokenize(w)) > threshold_k})

    prefix = "" if sentence_initial else " "
    surfaces: Counter[str] = Counter()
    for word, occ in words.items():
        for pre in pre_tokenize(prefix + word):
            surfaces[pre.surface] += occ
    if max_merges is None:
        max_merges = sum(len(s) for s in surfaces)
    _, learned = train_bpe(surfaces, max_merges)

    ranked, pairs, seen = [], [], set()
    for left, right in learned:
        token = left + right
        if token in vocab or token in seen:
            continue
        seen.add(token)
        ranked.append(token)
        pairs.append((left, right))
    logger.info("%d candidate words, %d candidate subwords", len(words), len(ranked))
    return CandidatePool(words, corpus_words, ranked, pairs, threshold_k)


@dataclass
class BuildResult:
    strategy: str
    extended: ExtendedVocabulary
    config: BuildConfig
    trajectory: list[dict[str, Any]] = field(default_factory=list)
    reached: bool = True
    exhausted: bool = False
    candidates: int = 0

    @property
    def size(self) -> int:
        return len(self.extended.domain)

    @property
    def domain(self):
        return self.extended.domain

    def manifest(self) -> dict[str, Any]:
        config = asdict(self.config)
        config["size_grid"] = list(config["size_grid"])
        return {
            "strategy": self.strategy,
            "config": config,
            "size": self.size,
            "candidates": self.candidates,
            "reached": self.reached,
            "exhausted": self.exhausted,
            "trajectory": self.trajectory,
        }

    def write(self, directory: str | Path) -> dict[str, Path]:
        paths = write_extended(self.extended, directory)
        paths["manifest"] = Path(directory) / "manifest.json"
        paths["manifest"].write_text(
            json.dumps(self.manifest(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        return paths


def _prefix_ev(pool: CandidatePool, vocab: Vocabulary, merges: MergeRuleTable, n: int):
    return extend(vocab, merges, pool.ranked_subwords[:n], pool.candidate_merges[:n])


def _score(counts: Counter[str], ev: ExtendedVocabulary, adaptive: bool, sentence_initial: bool) -> float:
    tokenizer = AdaptBPETokenizer(ev) if adaptive else BPETokenizer(ev)
    tokenize = word_tokenizer(tokenizer, sentence_initial)
    total = sum(occ * len(tokenize(w)) for w, occ in counts.items())
    return total / sum(counts.values())


def build_avocado(
    pool: CandidatePool,
    vocab: Vocabulary,
    merges: MergeRuleTable,
    gamma: float = 3.0,
    batch_size: int = 100,
    adaptive: bool = True,
    config: BuildConfig | None = None,
) -> BuildResult:
    """Add candidates batch by batch until the pool's fragment score is <= gamma.

    The score is the occurrence-weighted fragment score of ``pool.words``,
    recomputed after every batch. Running out of candidates first is not an
    error; the result then has ``reached=False, exhausted=True``.
    """
    if config is None:
        config = BuildConfig(gamma=gamma, batch_size=batch_size, threshold_k=pool.threshold_k)
    config.validate("avocado")
    gamma, batch_size = config.gamma, config.batch_size
    total = len(pool.ranked_subwords)

    n = 0
    trajectory = []
    while True:
        ev = _prefix_ev(pool, vocab, merges, n)
        score = _score(pool.words, ev, adaptive, config.sentence_initial) if pool.words else None
        trajectory.append({"size": n, "score": score})
        if score is None or score <= gamma or n >= total:
            break
        n = min(n + batch_size, total)
    reached = score is None or score <= gamma
    return BuildResult(
        "avocado", ev, config, trajectory, reached=reached, exhausted=not reached, candidates=total
    )


def build_sizesearch(
    pool: CandidatePool,
    vocab: Vocabulary,
    merges: MergeRuleTable,
    size_grid: Iterable[int] = (0,),
    epsilon: float = 0.01,
    adaptive: bool = True,
    config: BuildConfig | None = None,
) -> BuildResult:
    """Pick the smallest grid size scoring within (1 + epsilon) of the grid minimum.

    Scores are occurrence-weighted fragment scores over every corpus word.
    Grid sizes larger than the candidate list are capped at its length.
    """
    if config is None:
        config = BuildConfig(size_grid=tuple(size_grid), epsilon=epsilon, threshold_k=pool.threshold_k)
    config.validate("sizesearch")
    total = len(pool.ranked_subwords)

    trajectory = []
    for size in config.size_grid:
        n = min(size, total)
        ev = _prefix_ev(pool, vocab, merges, n)
        score = (
            _score(pool.corpus_words, ev, adaptive, config.sentence_initial)
            if pool.corpus_words
            else None
        )
        trajectory.append({"size": size, "effective_size": n, "score": score})

    scored = [t for t in trajectory if t["score"] is not None]
    if scored:
        bound = (1 + config.epsilon) * min(t["score"] for t in scored)
        chosen = next(t for t in scored if t["score"] <= bound)
    else:
        chosen = trajectory[0]
    ev = _prefix_ev(pool, vocab, merges, chosen["effective_size"])
    return BuildResult(
        "sizesearch", ev, config, trajectory, reached=True, exhausted=False, candidates=total
    )

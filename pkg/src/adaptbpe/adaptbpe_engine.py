"""AdaptBPE: BPE whose initial segmentation keeps domain-vocabulary matches whole.

Before the usual merge loop, each pre-token is searched for the longest
domain token it contains. That span becomes one atomic segment and is masked
out, and the search repeats on what is left. Unmatched symbols become single
segments. The standard ranked merge loop then runs unchanged over the result,
so appended domain tokens survive even when base merges would otherwise
consume their characters first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .bpe_engine import BPETokenizer, TokenSequence, apply_merges
from .matching import SENTINEL, MatchIndex
from .vocab_model import ExtendedVocabulary, MergeRuleTable

__all__ = [
    "AdaptBPETokenizer",
    "DOMAIN",
    "SYMBOL",
    "InitSegmentation",
    "MatchIndex",
    "adapt_encode",
    "adapt_encode_word",
    "adapt_initialize",
    "longest_substr",
]

DOMAIN = "domain"
SYMBOL = "symbol"


@dataclass(frozen=True)
class InitSegmentation:
    segments: tuple[tuple[str, str], ...]

    @property
    def surfaces(self) -> list[str]:
        return [s for s, _ in self.segments]

    def to_json(self) -> list[dict[str, str]]:
        return [{"surface": s, "kind": k} for s, k in self.segments]


def longest_substr(remaining: str, index: MatchIndex) -> tuple[int, str] | tuple[None, None]:
    """Longest domain token inside ``remaining``, ignoring masked positions.

    Returns ``(start, token)``, or ``(None, None)`` when nothing matches.
    """
    found = index.longest_substr(remaining)
    return found if found is not None else (None, None)


def adapt_initialize(surface: str, index: MatchIndex) -> InitSegmentation:
    if not index:
        return InitSegmentation(tuple((ch, SYMBOL) for ch in surface))
    remaining = surface
    matches: dict[int, str] = {}
    while True:
        start, token = longest_substr(remaining, index)
        if start is None:
            break
        matches[start] = token
        end = start + len(token)
        remaining = remaining[:start] + SENTINEL * len(token) + remaining[end:]

    segments = []
    i = 0
    while i < len(surface):
        token = matches.get(i)
        if token is not None:
            segments.append((token, DOMAIN))
            i += len(token)
        else:
            segments.append((surface[i], SYMBOL))
            i += 1
    return InitSegmentation(tuple(segments))


def adapt_encode_word(
    surface: str,
    index: MatchIndex,
    merges: MergeRuleTable,
    trace: list[dict[str, Any]] | None = None,
) -> list[str]:
    init = adapt_initialize(surface, index)
    return apply_merges(init.surfaces, merges.rank_of, trace)


class AdaptBPETokenizer(BPETokenizer):
    kind = "adaptbpe"

    def __init__(self, ev: ExtendedVocabulary, cache_size: int = 100_000) -> None:
        super().__init__(ev, cache_size)
        self.index = ev.domain.match_index

    def initial_segments(self, surface: str) -> list[str]:
        if not self.index:
            return list(surface)
        return adapt_initialize(surface, self.index).surfaces

    def trace_word(self, surface: str) -> dict[str, Any]:
        record = super().trace_word(surface)
        record["init"] = adapt_initialize(surface, self.index).to_json()
        return record


def adapt_encode(text: str, ev: ExtendedVocabulary, trace: bool = False) -> TokenSequence:
    return AdaptBPETokenizer(ev).encode(text, trace=trace)

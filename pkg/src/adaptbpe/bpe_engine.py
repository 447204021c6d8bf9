"""Standard byte-level BPE: encoding, decoding and a frequency-greedy trainer."""

from __future__ import annotations

import heapq
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from .pretokenizer import byte_decode, pre_tokenize
from .vocab_model import ExtendedVocabulary, MergeRuleTable

__all__ = [
    "BPETokenizer",
    "TokenSequence",
    "UnknownTokenError",
    "apply_merges",
    "decode",
    "decode_bytes",
    "encode",
    "encode_word",
    "train_bpe",
]

Pair = tuple[str, str]


class UnknownTokenError(KeyError):
    """A segment could not be resolved to an id, even symbol by symbol."""


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...] = ()
    ids: tuple[int, ...] = ()
    spans: tuple[tuple[int, int], ...] = ()
    trace: list[dict[str, Any]] | None = field(default=None, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.tokens)


def apply_merges(
    segments: Sequence[str],
    ranks: Mapping[Pair, int],
    trace: list[dict[str, Any]] | None = None,
) -> list[str]:
    """Run the ranked merge loop over ``segments``.

    Each iteration finds the applicable adjacent pair with the lowest rank
    and merges every non-overlapping occurrence of it, scanning left to
    right, exactly like the textbook loop that rebuilds the word on each
    pass. Occurrences are kept in a heap keyed by (rank, position) over a
    linked list, so a word of n segments costs O(n log n) instead of
    O(n^2).

    If ``trace`` is a list, one record per iteration is appended to it.
    """
    n = len(segments)
    if n < 2:
        return list(segments)
    syms = list(segments)
    nxt = list(range(1, n + 1))
    nxt[-1] = -1
    prv = list(range(-1, n - 1))
    heap: list[tuple[int, int]] = []
    for i in range(n - 1):
        r = ranks.get((syms[i], syms[i + 1]))
        if r is not None:
            heap.append((r, i))
    heapq.heapify(heap)

    while heap:
        rank = heap[0][0]
        batch = []
        while heap and heap[0][0] == rank:
            batch.append(heapq.heappop(heap)[1])
        batch.sort()
        merged = 0
        pair: Pair | None = None
        for pos in batch:
            # stale entries: node consumed, or either side changed since push
            if syms[pos] is None:
                continue
            right = nxt[pos]
            if right == -1 or ranks.get((syms[pos], syms[right])) != rank:
                continue
            pair = (syms[pos], syms[right])
            syms[pos] = pair[0] + pair[1]
            syms[right] = None
            after = nxt[right]
            nxt[pos] = after
            if after != -1:
                prv[after] = pos
            merged += 1
            before = prv[pos]
            if before != -1:
                r = ranks.get((syms[before], syms[pos]))
                if r is not None:
                    heapq.heappush(heap, (r, before))
            if after != -1:
                r = ranks.get((syms[pos], syms[after]))
                if r is not None:
                    heapq.heappush(heap, (r, pos))
        if merged and trace is not None:
            trace.append(
                {
                    "left": pair[0],
                    "right": pair[1],
                    "rank": rank,
                    "count": merged,
                    "segments": _collect(syms, nxt),
                }
            )
    return _collect(syms, nxt)


def _collect(syms: list, nxt: list[int]) -> list[str]:
    out = []
    i = 0
    while i != -1:
        out.append(syms[i])
        i = nxt[i]
    return out


def encode_word(
    surface: str, merges: MergeRuleTable, trace: list[dict[str, Any]] | None = None
) -> list[str]:
    """Tokenize one pre-token surface, starting from single symbols."""
    return apply_merges(list(surface), merges.rank_of, trace)


class BPETokenizer:
    """Standard BPE over an :class:`ExtendedVocabulary`.

    Uses the full merge table: base rules followed by any appended domain
    rules. Word results are cached; the cache never changes outputs.
    """

    kind = "bpe"

    def __init__(self, ev: ExtendedVocabulary, cache_size: int = 100_000) -> None:
        self.ev = ev
        self.ranks = ev.all_merges.rank_of
        self._token_to_id = ev.token_to_id
        self._cache: dict[str, tuple[str, ...]] = {}
        self._cache_size = cache_size

    def initial_segments(self, surface: str) -> list[str]:
        return list(surface)

    def encode_word(self, surface: str) -> list[str]:
        hit = self._cache.get(surface)
        if hit is not None:
            return list(hit)
        tokens = apply_merges(self.initial_segments(surface), self.ranks)
        if len(self._cache) >= self._cache_size:
            self._cache.clear()
        self._cache[surface] = tuple(tokens)
        return tokens

    def trace_word(self, surface: str) -> dict[str, Any]:
        steps: list[dict[str, Any]] = []
        tokens = apply_merges(self.initial_segments(surface), self.ranks, steps)
        return {"surface": surface, "merges": steps, "tokens": tokens}

    def resolve(self, token: str) -> list[tuple[str, int]]:
        """Map a final segment to ids, falling back to single symbols."""
        idx = self._token_to_id.get(token)
        if idx is not None:
            return [(token, idx)]
        out = []
        for sym in token:
            idx = self._token_to_id.get(sym)
            if idx is None:
                raise UnknownTokenError(f"symbol {sym!r} has no id in the vocabulary")
            out.append((sym, idx))
        return out

    def encode(self, text: str, trace: bool = False) -> TokenSequence:
        tokens: list[str] = []
        ids: list[int] = []
        spans: list[tuple[int, int]] = []
        traces: list[dict[str, Any]] | None = [] if trace else None
        for pre in pre_tokenize(text):
            if traces is not None:
                record = self.trace_word(pre.surface)
                traces.append(record)
                pieces = record["tokens"]
            else:
                pieces = self.encode_word(pre.surface)
            offset = pre.byte_span[0]
            for piece in pieces:
                for tok, idx in self.resolve(piece):
                    tokens.append(tok)
                    ids.append(idx)
                    spans.append((offset, offset + len(tok)))
                    offset += len(tok)
        return TokenSequence(tuple(tokens), tuple(ids), tuple(spans), traces)

    def decode_bytes(self, ids: Iterable[int]) -> bytes:
        return decode_bytes(ids, self.ev)

    def decode(self, ids: Iterable[int], errors: str = "strict") -> str:
        return self.decode_bytes(ids).decode("utf-8", errors=errors)


def encode(text: str, ev: ExtendedVocabulary, trace: bool = False) -> TokenSequence:
    return BPETokenizer(ev).encode(text, trace=trace)


def decode_bytes(ids: Iterable[int], ev: ExtendedVocabulary) -> bytes:
    table = ev.id_to_token
    parts = []
    for idx in ids:
        token = table.get(idx)
        if token is None:
            raise IndexError(f"token id {idx} is outside the vocabulary (size {len(ev)})")
        parts.append(token)
    return byte_decode("".join(parts))


def decode(ids: Iterable[int], ev: ExtendedVocabulary, errors: str = "strict") -> str:
    """Concatenate token surfaces and undo the byte mapping."""
    return decode_bytes(ids, ev).decode("utf-8", errors=errors)


def _merge_pair(symbols: tuple[str, ...], pair: Pair) -> tuple[str, ...]:
    out = []
    i = 0
    n = len(symbols)
    while i < n:
        if i < n - 1 and symbols[i] == pair[0] and symbols[i + 1] == pair[1]:
            out.append(pair[0] + pair[1])
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


def train_bpe(
    words: Mapping[str, int] | Iterable[str], target_merges: int
) -> tuple[set[str], list[Pair]]:
    """Learn merges by repeatedly joining the most frequent adjacent pair.

    ``words`` is a multiset of symbol strings, either a ``{word: count}``
    mapping or an iterable with repeats. Ties on frequency go to the
    lexicographically smallest ``(left, right)``. Training stops after
    ``target_merges`` merges or once no pair occurs at least twice.

    Returns the token set (initial symbols plus every merge result) and the
    merges in creation order.
    """
    if target_merges < 0:
        raise ValueError("target_merges must be >= 0")
    counts = Counter(words) if not isinstance(words, Mapping) else Counter(dict(words))
    entries = [(tuple(w), c) for w, c in counts.items() if w and c > 0]
    tokens = {s for w, _ in entries for s in w}
    merges: list[Pair] = []

    pair_counts: Counter[Pair] = Counter()
    where: dict[Pair, set[int]] = {}
    for idx, (syms, c) in enumerate(entries):
        for pair in zip(syms, syms[1:]):
            pair_counts[pair] += c
            where.setdefault(pair, set()).add(idx)
    heap = [(-c, p[0], p[1]) for p, c in pair_counts.items()]
    heapq.heapify(heap)

    while len(merges) < target_merges:
        best = None
        while heap:
            neg, left, right = heapq.heappop(heap)
            if pair_counts.get((left, right), 0) == -neg:
                best = (left, right)
                break
        if best is None or pair_counts[best] < 2:
            break
        merges.append(best)
        tokens.add(best[0] + best[1])
        touched: set[Pair] = set()
        for idx in sorted(where.pop(best, ())):
            syms, c = entries[idx]
            new = _merge_pair(syms, best)
            if new == syms:
                continue
            for pair in zip(syms, syms[1:]):
                pair_counts[pair] -= c
                touched.add(pair)
            for pair in zip(new, new[1:]):
                pair_counts[pair] += c
                where.setdefault(pair, set()).add(idx)
                touched.add(pair)
            entries[idx] = (new, c)
        for pair in touched:
            c = pair_counts[pair]
            if c <= 0:
                del pair_counts[pair]
            else:
                heapq.heappush(heap, (-c, pair[0], pair[1]))
    return tokens, merges

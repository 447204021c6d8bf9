"""Vocabularies, merge tables and appended domain vocabularies.

File formats follow the usual byte-level BPE conventions:

* ``vocab.json``: a JSON object mapping token string to integer id.
* ``merges.txt``: an optional ``#version`` header, then one ``left right``
  pair per line, highest priority first.
* domain tokens: one token per line; line order fixes id order.

When an extended vocabulary is saved, the merges header records how many of
the rules belong to the base table (``#version: 0.2 base_merges=N``) so the
appended domain rules can be told apart on reload. Loaders that only skip the
header line are unaffected.
"""

from __future__ import annotations

import io
import json
import logging
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import IO, Union

from .matching import MatchIndex

__all__ = [
    "DomainVocabulary",
    "ExtendedVocabulary",
    "MergeRuleTable",
    "VocabError",
    "Vocabulary",
    "extend",
    "load_domain_tokens",
    "load_extended",
    "load_merges",
    "load_vocabulary",
    "save_extended",
    "write_extended",
]

logger = logging.getLogger(__name__)

Source = Union[bytes, str, Path, IO[bytes], IO[str]]

_BASE_COUNT = re.compile(r"\bbase_merges=(\d+)")


class VocabError(ValueError):
    """Malformed or inconsistent vocabulary artifact."""


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if isinstance(source, str):
        # plain strings are file paths; pass document text as bytes or a stream
        return Path(source).read_text(encoding="utf-8")
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


@dataclass(frozen=True)
class Vocabulary:
    """Bijective token <-> id map."""

    entries: Mapping[str, int]
    reverse: Mapping[int, str] = field(repr=False)
    warnings: tuple[str, ...] = field(default=(), compare=False, repr=False)

    @classmethod
    def from_dict(cls, entries: Mapping[str, int]) -> Vocabulary:
        reverse: dict[int, str] = {}
        for token, idx in entries.items():
            if isinstance(idx, bool) or not isinstance(idx, int) or idx < 0:
                raise VocabError(f"id for {token!r} must be a non-negative integer, got {idx!r}")
            if idx in reverse:
                raise VocabError(f"duplicate id {idx} for {reverse[idx]!r} and {token!r}")
            reverse[idx] = token
        warnings: tuple[str, ...] = ()
        if reverse and max(reverse) != len(reverse) - 1:
            msg = f"ids are not dense: {len(reverse)} entries, max id {max(reverse)}"
            logger.warning(msg)
            warnings = (msg,)
        return cls(dict(entries), reverse, warnings)

    @property
    def size(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, token: object) -> bool:
        return token in self.entries

    @property
    def next_id(self) -> int:
        """First id past every existing id; equals ``size`` when ids are dense."""
        return max(self.reverse) + 1 if self.reverse else 0

    def to_json(self) -> str:
        ordered = dict(sorted(self.entries.items(), key=lambda kv: kv[1]))
        return json.dumps(ordered, ensure_ascii=False, indent=0) + "\n"


def _reject_duplicate_keys(pairs: list[tuple[str, object]]) -> dict[str, object]:
    out: dict[str, object] = {}
    for key, value in pairs:
        if key in out:
            raise VocabError(f"duplicate token {key!r}")
        out[key] = value
    return out


def load_vocabulary(source: Source) -> Vocabulary:
    """Parse a ``vocab.json`` document.

    ``source`` may be raw bytes, a path, or an open file. Duplicate tokens
    and duplicate ids are errors; holes in the id range only log a warning
    (kept on ``Vocabulary.warnings``).
    """
    try:
        data = json.loads(_read_text(source), object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise VocabError(f"vocabulary is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise VocabError("vocabulary document must be a JSON object")
    return Vocabulary.from_dict(data)


@dataclass(frozen=True)
class MergeRuleTable:
    rules: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if len(self.rank_of) != len(self.rules):
            seen: set[tuple[str, str]] = set()
            for pair in self.rules:
                if pair in seen:
                    raise VocabError(f"duplicate merge rule {pair[0]!r} {pair[1]!r}")
                seen.add(pair)

    @cached_property
    def rank_of(self) -> dict[tuple[str, str], int]:
        return {pair: i for i, pair in enumerate(self.rules)}

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def to_text(self, base_count: int | None = None) -> str:
        header = "#version: 0.2"
        if base_count is not None:
            header += f" base_merges={base_count}"
        return header + "\n" + "".join(f"{a} {b}\n" for a, b in self.rules)


def _parse_merges(text: str) -> tuple[list[tuple[str, str]], int | None]:
    lines = text.split("\n")
    base_count = None
    first = 1
    if lines and lines[0].startswith("#version"):
        found = _BASE_COUNT.search(lines[0])
        base_count = int(found.group(1)) if found else None
        lines = lines[1:]
        first = 2
    rules = []
    for lineno, line in enumerate(lines, start=first):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 2:
            raise VocabError(f"merges line {lineno}: expected 2 fields, got {len(fields)}: {line!r}")
        rules.append((fields[0], fields[1]))
    return rules, base_count


def load_merges(source: Source) -> MergeRuleTable:
    """Parse a ``merges.txt`` document; rank 0 is the first rule."""
    rules, _ = _parse_merges(_read_text(source))
    return MergeRuleTable(tuple(rules))


def load_domain_tokens(source: Source) -> list[str]:
    return [line for line in _read_text(source).split("\n") if line]


@dataclass(frozen=True)
class DomainVocabulary:
    """Tokens appended after the base vocabulary, with contiguous ids."""

    tokens: tuple[str, ...] = ()
    first_id: int = 0
    appended_merges: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.tokens)) != len(self.tokens):
            raise VocabError("domain tokens must be unique")
        if any(not t for t in self.tokens):
            raise VocabError("domain tokens must be non-empty")

    @cached_property
    def ids(self) -> dict[str, int]:
        return {t: self.first_id + i for i, t in enumerate(self.tokens)}

    @cached_property
    def match_index(self) -> MatchIndex:
        return MatchIndex(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: object) -> bool:
        return token in self.ids


@dataclass(frozen=True)
class ExtendedVocabulary:
    """A base vocabulary plus an appended domain vocabulary.

    ``filtered`` lists requested domain tokens that were dropped because the
    base vocabulary already had them; it is metadata and not part of equality.
    """

    base: Vocabulary
    merges: MergeRuleTable
    domain: DomainVocabulary
    filtered: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if self.domain.first_id != self.base.next_id:
            raise VocabError(
                f"domain ids must start at {self.base.next_id}, not {self.domain.first_id}"
            )
        clash = [t for t in self.domain.tokens if t in self.base]
        if clash:
            raise VocabError(f"domain tokens already in base vocabulary: {clash[:5]}")

    @property
    def base_size(self) -> int:
        return self.base.size

    @property
    def domain_start(self) -> int:
        """Smallest id a domain token can have."""
        return self.base.next_id

    def __len__(self) -> int:
        return self.base.size + len(self.domain)

    @cached_property
    def all_merges(self) -> MergeRuleTable:
        return MergeRuleTable(self.merges.rules + self.domain.appended_merges)

    @cached_property
    def token_to_id(self) -> dict[str, int]:
        table = dict(self.base.entries)
        table.update(self.domain.ids)
        return table

    @cached_property
    def id_to_token(self) -> dict[int, str]:
        return {i: t for t, i in self.token_to_id.items()}

    @property
    def filtered_count(self) -> int:
        return len(self.filtered)


def extend(
    base: Vocabulary,
    merges: MergeRuleTable,
    domain_tokens: Iterable[str] = (),
    domain_merges: Sequence[tuple[str, str]] = (),
) -> ExtendedVocabulary:
    """Append domain tokens (and optionally merges) after the base vocabulary.

    Tokens already present whole in ``base`` are dropped and reported on
    ``ExtendedVocabulary.filtered``; repeated tokens keep their first
    position. Domain merges already in the base table are dropped too, so
    every appended rule ranks below every base rule.
    """
    kept: list[str] = []
    filtered: list[str] = []
    seen: set[str] = set()
    for token in domain_tokens:
        if not token:
            raise VocabError("domain tokens must be non-empty")
        if token in base:
            filtered.append(token)
        elif token not in seen:
            seen.add(token)
            kept.append(token)
    if filtered:
        logger.info("dropped %d domain tokens already in the base vocabulary", len(filtered))

    base_rules = merges.rank_of
    appended: list[tuple[str, str]] = []
    seen_pairs: set[tuple[str, str]] = set()
    for pair in domain_merges:
        pair = (pair[0], pair[1])
        if pair in base_rules or pair in seen_pairs:
            continue
        seen_pairs.add(pair)
        appended.append(pair)

    domain = DomainVocabulary(tuple(kept), base.next_id, tuple(appended))
    return ExtendedVocabulary(base, merges, domain, tuple(filtered))


def save_extended(ev: ExtendedVocabulary) -> tuple[str, str, str]:
    """Serialize to (vocab document, merges document, domain-token document).

    The vocab document holds the base vocabulary only; the merges document
    lists base rules first, then appended domain rules.
    """
    for token in ev.domain.tokens:
        if "\n" in token:
            raise VocabError(f"domain token {token!r} contains a newline")
    merges_doc = ev.all_merges.to_text(base_count=len(ev.merges))
    domain_doc = "".join(t + "\n" for t in ev.domain.tokens)
    return ev.base.to_json(), merges_doc, domain_doc


def load_extended(vocab: Source, merges: Source, domain: Source | None = None) -> ExtendedVocabulary:
    """Rebuild an :class:`ExtendedVocabulary` from its three documents.

    Without a ``base_merges=`` header every rule is treated as a base rule.
    """
    base = load_vocabulary(vocab)
    rules, base_count = _parse_merges(_read_text(merges))
    if base_count is None:
        base_count = len(rules)
    if base_count > len(rules):
        raise VocabError(f"header claims {base_count} base merges, file has {len(rules)}")
    table = MergeRuleTable(tuple(rules[:base_count]))
    tokens = load_domain_tokens(domain) if domain is not None else []
    return extend(base, table, tokens, rules[base_count:])


def write_extended(ev: ExtendedVocabulary, directory: str | Path) -> dict[str, Path]:
    """Write the three documents into ``directory``; return their paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "vocab": directory / "vocab.json",
        "merges": directory / "merges.txt",
        "domain": directory / "domain.txt",
    }
    for path, doc in zip(paths.values(), save_extended(ev)):
        with io.open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(doc)
    return paths

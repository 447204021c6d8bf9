"""Longest-substring lookup over a fixed token set."""

from __future__ import annotations

from collections.abc import Iterable

__all__ = ["SENTINEL", "MatchIndex"]

# Marks consumed positions. It lies outside the byte alphabet, so it can
# never be part of a match.
SENTINEL = "\uffff"


class _Node:
    __slots__ = ("children", "terminal")

    def __init__(self) -> None:
        self.children: dict[str, _Node] = {}
        self.terminal = False


class MatchIndex:
    """Trie over token strings answering "longest member inside this string".

    A query walks the trie from every start position, so its cost depends on
    the query length and the longest token, never on how many tokens are
    indexed.
    """

    def __init__(self, tokens: Iterable[str] = ()) -> None:
        self._root = _Node()
        self._tokens: frozenset[str] = frozenset(tokens)
        self.max_len = 0
        for token in self._tokens:
            if not token:
                raise ValueError("cannot index an empty token")
            if SENTINEL in token:
                raise ValueError(f"token {token!r} contains the mask sentinel")
            node = self._root
            for ch in token:
                node = node.children.setdefault(ch, _Node())
            node.terminal = True
            self.max_len = max(self.max_len, len(token))

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: object) -> bool:
        return token in self._tokens

    def __bool__(self) -> bool:
        return bool(self._tokens)

    @property
    def tokens(self) -> frozenset[str]:
        return self._tokens

    def longest_at(self, text: str, start: int) -> int:
        """Length of the longest member starting at ``start`` (0 if none)."""
        node = self._root
        best = 0
        for i in range(start, len(text)):
            node = node.children.get(text[i])
            if node is None:
                break
            if node.terminal:
                best = i - start + 1
        return best

    def longest_substr(self, text: str) -> tuple[int, str] | None:
        """Return ``(start, token)`` for the longest member occurring in ``text``.

        Sentinel positions never take part in a match. Equal lengths resolve
        to the leftmost start. Returns ``None`` when nothing matches.
        """
        if not self._tokens:
            return None
        best_start, best_len = -1, 0
        n = len(text)
        for start in range(n):
            if n - start <= best_len:
                break
            length = self.longest_at(text, start)
            if length > best_len:
                best_start, best_len = start, length
        if best_len == 0:
            return None
        return best_start, text[best_start : best_start + best_len]

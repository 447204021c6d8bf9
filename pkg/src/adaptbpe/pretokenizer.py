"""Byte-level pre-tokenization.

Text is split with the GPT-2 regex family, and every UTF-8 byte of each piece
is mapped onto a printable symbol so BPE can run over plain strings.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import regex as re

__all__ = [
    "BYTE_DECODER",
    "BYTE_ENCODER",
    "PRETOKENIZE_PATTERN",
    "SPACE_MARKER",
    "PreToken",
    "UnknownSymbolError",
    "byte_decode",
    "byte_encode",
    "bytes_to_unicode",
    "pre_tokenize",
]

PRETOKENIZE_PATTERN = re.compile(
    r"""'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+"""
)


class UnknownSymbolError(ValueError):
    """Raised when a string holds a symbol outside the byte alphabet."""


@lru_cache(maxsize=None)
def bytes_to_unicode() -> dict[int, str]:
    """Return the fixed byte -> printable-symbol table used by byte-level BPE.

    Printable Latin-1 bytes map to themselves; the remaining 68 bytes
    (control characters, space, and a few others) are shifted to code
    points starting at 256, in byte order.
    """
    printable = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(ord("¡"), ord("¬") + 1))
        + list(range(ord("®"), ord("ÿ") + 1))
    )
    codepoints = printable[:]
    shift = 0
    for b in range(256):
        if b not in printable:
            printable.append(b)
            codepoints.append(256 + shift)
            shift += 1
    return dict(zip(printable, map(chr, codepoints)))


BYTE_ENCODER: dict[int, str] = dict(sorted(bytes_to_unicode().items()))
BYTE_DECODER: dict[str, int] = {s: b for b, s in BYTE_ENCODER.items()}
SPACE_MARKER = BYTE_ENCODER[0x20]

_ENCODE_TABLE = [BYTE_ENCODER[b] for b in range(256)]


def byte_encode(data: bytes) -> str:
    """Map raw bytes to their symbol string, one symbol per byte."""
    return "".join([_ENCODE_TABLE[b] for b in data])


def byte_decode(symbols: str) -> bytes:
    """Inverse of :func:`byte_encode`."""
    try:
        return bytes([BYTE_DECODER[s] for s in symbols])
    except KeyError as exc:
        raise UnknownSymbolError(f"symbol {exc.args[0]!r} is not in the byte alphabet") from None


class PreToken(NamedTuple):
    surface: str
    byte_span: tuple[int, int]


def pre_tokenize(text: str) -> list[PreToken]:
    """Split ``text`` into byte-level pre-tokens.

    Each surface is the byte-encoded form of one regex piece, so a word
    preceded by a space carries the space marker as its first symbol.
    Byte spans index into ``text.encode("utf-8")``.
    """
    out: list[PreToken] = []
    offset = 0
    for piece in PRETOKENIZE_PATTERN.findall(text):
        raw = piece.encode("utf-8")
        out.append(PreToken(byte_encode(raw), (offset, offset + len(raw))))
        offset += len(raw)
    return out

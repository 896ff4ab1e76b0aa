"""CLIP-style BPE tokenization with source-span tracking.

The pipeline: NFC normalization, whitespace collapsed to single spaces,
lowercasing, then word-boundary pre-splitting with the CLIP pattern
(contractions, letter runs, single digits, punctuation runs). Each word
is mapped through the byte-to-unicode table, given the ``</w>`` marker
on its last symbol, and reduced by greedy lowest-rank merge application.
Output ids are content tokens only; specials are added by the chunker.

Every token also carries the character span it came from in the
normalized caption, which is what makes lossless chunk planning possible.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

import regex

from .vocab import END_OF_WORD, BpeVocabulary, VocabularyError, bytes_to_unicode

# CLIP's word-splitting pattern, minus the special-token alternatives
# (specials never occur in caption text here).
_WORD_PATTERN = regex.compile(
    r"""'s|'t|'re|'ve|'m|'ll|'d|[\p{L}]+|[\p{N}]|[^\s\p{L}\p{N}]+""",
    regex.IGNORECASE,
)

_WHITESPACE = regex.compile(r"\s+")


def normalize_caption(text: str) -> str:
    """NFC, collapse whitespace runs to one space, lowercase, trim."""
    text = unicodedata.normalize("NFC", text)
    text = _WHITESPACE.sub(" ", text)
    return text.lower().strip()


@dataclass(frozen=True)
class TokenSpan:
    token_id: int
    start: int   # char offset into the normalized caption
    end: int


def _bpe_word(word: str, vocab: BpeVocabulary) -> list[tuple[str, int]]:
    """Run BPE over one word; returns (symbol, consumed_byte_count) pairs.

    Symbols start as one byte-mapped character each (the last carrying
    ``</w>``); each step merges the lowest-ranked adjacent pair until no
    ranked pair remains. Byte counts let callers map symbols back to
    source characters.
    """
    table = bytes_to_unicode()
    raw = word.encode("utf-8")
    symbols = [table[b] for b in raw]
    lengths = [1] * len(raw)
    symbols[-1] += END_OF_WORD

    ranks = vocab.bpe_ranks
    while len(symbols) > 1:
        best_rank = None
        for pair in zip(symbols, symbols[1:]):
            rank = ranks.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
                best_pair = pair
        if best_rank is None:
            break
        first, second = best_pair
        merged_symbols: list[str] = []
        merged_lengths: list[int] = []
        i = 0
        while i < len(symbols):
            if i < len(symbols) - 1 and symbols[i] == first and symbols[i + 1] == second:
                merged_symbols.append(first + second)
                merged_lengths.append(lengths[i] + lengths[i + 1])
                i += 2
            else:
                merged_symbols.append(symbols[i])
                merged_lengths.append(lengths[i])
                i += 1
        symbols = merged_symbols
        lengths = merged_lengths
    return list(zip(symbols, lengths))


def _char_offsets_for_bytes(word: str) -> list[int]:
    """byte offset -> char offset table for one word (length+1 entries)."""
    offsets = []
    for ci, ch in enumerate(word):
        offsets.extend([ci] * len(ch.encode("utf-8")))
    offsets.append(len(word))
    return offsets


def tokenize_with_spans(vocab: BpeVocabulary, text: str) -> tuple[str, list[TokenSpan]]:
    """Tokenize; returns (normalized caption, token spans in it)."""
    normalized = normalize_caption(text)
    spans: list[TokenSpan] = []
    for match in _WORD_PATTERN.finditer(normalized):
        word = match.group()
        word_start = match.start()
        byte_to_char = _char_offsets_for_bytes(word)
        byte_pos = 0
        for symbol, consumed in _bpe_word(word, vocab):
            try:
                token_id = vocab.encoder[symbol]
            except KeyError:
                raise VocabularyError(f"symbol {symbol!r} not covered by the vocabulary") from None
            start = word_start + byte_to_char[byte_pos]
            end = word_start + byte_to_char[byte_pos + consumed]
            spans.append(TokenSpan(token_id=token_id, start=start, end=end))
            byte_pos += consumed
    return normalized, spans


def tokenize(vocab: BpeVocabulary, text: str) -> list[int]:
    """Content token ids for a caption (no specials)."""
    _, spans = tokenize_with_spans(vocab, text)
    return [s.token_id for s in spans]

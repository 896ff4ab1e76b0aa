"""Long-caption chunk planning for a 77-token context window.

A caption is tokenized once, then cut into chunks of at most 75 content
tokens (77 minus the two specials framing each chunk). When a full
window must be cut, the split prefers the last comma/period token within
the final 20 positions of the window so noun phrases survive; otherwise
it is a hard cut at 75. Each chunk records the character span it covers
in the normalized caption; the spans tile the caption exactly, so
concatenating them reconstructs it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .tokenizer import TokenSpan, tokenize_with_spans
from .vocab import BpeVocabulary

SEPARATOR_LOOKBACK = 20


@dataclass(frozen=True)
class Chunk:
    token_ids: tuple[int, ...]   # includes start/end specials
    span: tuple[int, int]        # char range in the normalized caption


@dataclass(frozen=True)
class ChunkPlan:
    normalized: str
    chunks: tuple[Chunk, ...]
    content_tokens: int

    def reconstruct(self) -> str:
        return "".join(self.normalized[a:b] for (a, b) in (c.span for c in self.chunks))

    def to_dict(self) -> dict:
        return {
            "normalized": self.normalized,
            "content_tokens": self.content_tokens,
            "chunks": [
                {"ids": list(c.token_ids), "span": [c.span[0], c.span[1]]} for c in self.chunks
            ],
        }


def _split_points(spans: list[TokenSpan], window: int, separators: frozenset[int], hard_split: bool) -> list[int]:
    """Token indices at which each chunk ends (exclusive)."""
    cuts = []
    start = 0
    n = len(spans)
    while n - start > window:
        cut = start + window
        if not hard_split:
            lo = max(start + 1, cut - SEPARATOR_LOOKBACK)
            for i in range(cut - 1, lo - 1, -1):
                if spans[i].token_id in separators:
                    cut = i + 1  # keep the separator inside the chunk
                    break
        cuts.append(cut)
        start = cut
    cuts.append(n)
    return cuts


def chunk_caption(vocab: BpeVocabulary, text: str, hard_split: bool = False) -> ChunkPlan:
    """Plan the chunked encoding of one caption.

    hard_split disables separator preference, always cutting full
    windows at exactly 75 content tokens.
    """
    normalized, spans = tokenize_with_spans(vocab, text)
    window = vocab.max_content_tokens
    if not spans:
        return ChunkPlan(normalized=normalized, chunks=(), content_tokens=0)

    separators = vocab.separator_ids()
    cuts = _split_points(spans, window, separators, hard_split)

    chunks = []
    start = 0
    for index, cut in enumerate(cuts):
        part = spans[start:cut]
        ids = (vocab.sot_id, *(s.token_id for s in part), vocab.eot_id)
        span_start = 0 if index == 0 else part[0].start
        span_end = len(normalized) if cut == len(spans) else spans[cut].start
        chunks.append(Chunk(token_ids=ids, span=(span_start, span_end)))
        start = cut
    return ChunkPlan(normalized=normalized, chunks=tuple(chunks), content_tokens=len(spans))

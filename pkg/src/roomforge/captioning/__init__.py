"""Caption composition, BPE tokenization and context-window chunking."""

from .chunker import Chunk, ChunkPlan, chunk_caption
from .compose import CaptionParts, compose_caption
from .tokenizer import TokenSpan, normalize_caption, tokenize, tokenize_with_spans
from .vocab import (
    CONTEXT_LENGTH,
    EOT,
    SOT,
    BpeVocabulary,
    VocabularyError,
    bytes_to_unicode,
    default_vocabulary,
    load_vocabulary,
    load_vocabulary_files,
)

__all__ = [
    "Chunk",
    "ChunkPlan",
    "chunk_caption",
    "CaptionParts",
    "compose_caption",
    "TokenSpan",
    "normalize_caption",
    "tokenize",
    "tokenize_with_spans",
    "CONTEXT_LENGTH",
    "EOT",
    "SOT",
    "BpeVocabulary",
    "VocabularyError",
    "bytes_to_unicode",
    "default_vocabulary",
    "load_vocabulary",
    "load_vocabulary_files",
]

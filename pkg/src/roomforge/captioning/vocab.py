"""BPE vocabulary loading, byte-compatible with CLIP's distribution.

Two files define a vocabulary: a JSON object mapping token string to id,
and a merges file whose first line is a header comment and whose
following lines are one space-separated symbol pair each, in merge-rank
order. Word-final symbols carry the ``</w>`` marker. The two special
tokens ``<|startoftext|>`` and ``<|endoftext|>`` frame every encoded
chunk; the context window is 77 ids including them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

SOT = "<|startoftext|>"
EOT = "<|endoftext|>"
CONTEXT_LENGTH = 77
END_OF_WORD = "</w>"


class VocabularyError(ValueError):
    pass


@lru_cache(maxsize=1)
def bytes_to_unicode() -> dict[int, str]:
    """The GPT-2 byte-to-printable-unicode table used by CLIP.

    Maps every byte 0..255 to a unicode character, keeping printable
    latin bytes as themselves and relocating the rest above U+0100.
    """
    bs = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(ord("\xa1"), ord("\xac") + 1))
        + list(range(ord("\xae"), ord("\xff") + 1))
    )
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, [chr(c) for c in cs]))


@dataclass
class BpeVocabulary:
    encoder: dict[str, int]
    merges: list[tuple[str, str]]
    bpe_ranks: dict[tuple[str, str], int] = field(repr=False, default_factory=dict)
    decoder: dict[int, str] = field(repr=False, default_factory=dict)
    context_length: int = CONTEXT_LENGTH

    def __post_init__(self):
        if not self.bpe_ranks:
            self.bpe_ranks = {pair: i for i, pair in enumerate(self.merges)}
        if not self.decoder:
            self.decoder = {v: k for k, v in self.encoder.items()}

    @property
    def sot_id(self) -> int:
        return self.encoder[SOT]

    @property
    def eot_id(self) -> int:
        return self.encoder[EOT]

    @property
    def max_content_tokens(self) -> int:
        return self.context_length - 2

    def separator_ids(self) -> frozenset[int]:
        """Ids of standalone comma/period word tokens, if present."""
        ids = []
        for sym in ("," + END_OF_WORD, "." + END_OF_WORD):
            if sym in self.encoder:
                ids.append(self.encoder[sym])
        return frozenset(ids)


def _parse_vocab_json(vocab_text: str) -> dict[str, int]:
    def reject_duplicates(pairs):
        seen = {}
        for key, value in pairs:
            if key in seen:
                raise VocabularyError(f"duplicate token {key!r} in vocabulary")
            seen[key] = value
        return seen

    try:
        encoder = json.loads(vocab_text, object_pairs_hook=reject_duplicates)
    except json.JSONDecodeError as exc:
        raise VocabularyError(f"vocabulary is not valid JSON: {exc}") from None
    if not isinstance(encoder, dict):
        raise VocabularyError("vocabulary must be a JSON object")
    return encoder


def load_vocabulary(vocab_text: str, merges_text: str) -> BpeVocabulary:
    """Parse and validate vocabulary + merges file contents."""
    encoder = _parse_vocab_json(vocab_text)

    ids = sorted(encoder.values())
    if len(set(ids)) != len(ids):
        raise VocabularyError("token ids are not unique")
    if ids != list(range(len(ids))):
        raise VocabularyError("token ids are not dense (expected 0..n-1)")
    for special in (SOT, EOT):
        if special not in encoder:
            raise VocabularyError(f"vocabulary is missing special token {special!r}")

    merges: list[tuple[str, str]] = []
    lines = merges_text.split("\n")
    for lineno, line in enumerate(lines[1:], start=2):  # first line is a header comment
        line = line.strip()
        if not line:
            continue
        parts = line.split(" ")
        if len(parts) != 2:
            raise VocabularyError(f"merges line {lineno}: expected two symbols, got {line!r}")
        first, second = parts
        if first not in encoder:
            raise VocabularyError(f"merges line {lineno}: unknown symbol {first!r}")
        if second not in encoder:
            raise VocabularyError(f"merges line {lineno}: unknown symbol {second!r}")
        if first + second not in encoder:
            raise VocabularyError(
                f"merges line {lineno}: merge result {first + second!r} not in vocabulary"
            )
        merges.append((first, second))
    return BpeVocabulary(encoder=encoder, merges=merges)


def load_vocabulary_files(vocab_path: str, merges_path: str) -> BpeVocabulary:
    with open(vocab_path, "r", encoding="utf-8") as fh:
        vocab_text = fh.read()
    with open(merges_path, "r", encoding="utf-8") as fh:
        merges_text = fh.read()
    return load_vocabulary(vocab_text, merges_text)


def default_vocabulary() -> BpeVocabulary:
    """The vocabulary shipped with the package (trained on interior-scene captions)."""
    data = resources.files("roomforge.captioning").joinpath("data")
    return load_vocabulary(
        data.joinpath("vocab.json").read_text("utf-8"),
        data.joinpath("merges.txt").read_text("utf-8"),
    )

#!/usr/bin/env python3
"""Regenerate the shipped BPE vocabulary and the tokenizer golden corpus.

Trains merges on a deterministic synthetic corpus of interior-scene
captions using the HuggingFace `tokenizers` library (the reference BPE
implementation), rebuilds the vocabulary in the CLIP file layout
(256 byte symbols, 256 word-final symbols, merge results, two specials),
then encodes 1,000 golden captions with a reference tokenizer assembled
exactly like the public CLIP fast-tokenizer pipeline. Outputs:

    src/roomforge/captioning/data/vocab.json
    src/roomforge/captioning/data/merges.txt
    tests/data/tokenizer/golden_captions.jsonl

Requires `tokenizers` (regeneration only; the test suite consumes the
committed outputs and does not need it).
"""

from __future__ import annotations

import json
import os
import random
import sys
from pathlib import Path

os.environ.setdefault("TOKENIZERS_PARALLELISM", "false")

from tokenizers import Regex, Tokenizer, models, normalizers, pre_tokenizers, trainers

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from roomforge.captioning.vocab import EOT, SOT, bytes_to_unicode  # noqa: E402

ROOMS = [
    "bedroom", "living room", "kitchen", "bathroom", "dining room", "study",
    "balcony", "hallway", "kids room", "master bedroom", "guest room",
    "walk-in closet", "home office", "laundry room", "entryway",
]
STYLES = [
    "modern", "nordic", "minimalist", "industrial", "european", "american",
    "japanese", "new chinese", "scandinavian", "contemporary", "rustic",
    "mid-century", "bohemian", "art deco", "wabi-sabi",
]
QUALITY = [
    "hd", "high quality", "sharp focus", "well lit", "4k render",
    "photorealistic", "no watermark", "crisp details", "soft shadows",
]
FURNITURE = [
    "bed", "double bed", "nightstand", "wardrobe", "dresser", "sofa",
    "sectional sofa", "coffee table", "tv stand", "television", "armchair",
    "bookshelf", "desk", "office chair", "dining table", "dining chairs",
    "bar stools", "kitchen island", "refrigerator", "range hood", "stove",
    "sink", "toilet", "bathtub", "shower", "vanity", "mirror", "rug",
    "carpet", "floor lamp", "table lamp", "pendant light", "chandelier",
    "curtains", "blinds", "plant", "potted plant", "painting", "wall art",
    "shelving unit", "ottoman", "bench", "crib", "bunk bed", "side table",
    "console table", "wine cabinet", "display cabinet", "radiator",
]
MATERIALS = [
    "oak", "walnut", "marble", "brass", "linen", "velvet", "rattan",
    "concrete", "terrazzo", "ceramic", "glass", "leather", "bamboo",
]
COLORS = [
    "warm beige", "sage green", "charcoal grey", "cream white", "navy blue",
    "terracotta", "dusty pink", "olive", "ochre", "off-white", "slate",
]
PHRASES = [
    "natural light pours through floor-to-ceiling windows",
    "a cozy reading corner sits beside the window",
    "the ceiling features recessed lighting and a plaster cornice",
    "wide plank flooring runs the length of the space",
    "an accent wall in textured plaster anchors the room",
    "open shelving displays curated ceramics and books",
    "the layout keeps a clear walkway between the main pieces",
    "sheer curtains soften the afternoon sun",
    "a statement pendant hangs above the table",
    "the palette stays muted with occasional metallic touches",
    "greenery brings a fresh note to every corner",
    "handleless cabinetry keeps the lines clean and quiet",
    "layered lighting mixes ambient, task and accent sources",
    "the furniture proportions suit the compact footprint",
    "large mirrors visually double the available space",
    "warm wood tones balance the cool stone surfaces",
    "the room reads calm, ordered and quietly luxurious",
    "every sightline ends in a considered vignette",
    "soft area rugs define the seating zone",
    "a low media wall keeps the focus on the view",
]


def make_caption(rng: random.Random, long: bool = False) -> str:
    room = rng.choice(ROOMS)
    style = rng.choice(STYLES)
    quality = rng.sample(QUALITY, rng.randint(1, 3))
    furniture = rng.sample(FURNITURE, rng.randint(2, 6 if not long else 10))
    n_phrases = rng.randint(1, 3) if not long else rng.randint(8, 14)
    sentences = []
    for _ in range(n_phrases):
        phrase = rng.choice(PHRASES)
        if rng.random() < 0.5:
            phrase = f"{phrase}, with {rng.choice(COLORS)} {rng.choice(MATERIALS)} accents"
        sentences.append(phrase)
    text = ". ".join(sentences) + "."
    return ", ".join([room, style, *quality, *furniture, text])


def build_corpus(seed: int) -> tuple[list[str], list[str]]:
    rng = random.Random(seed)
    training = [make_caption(rng, long=rng.random() < 0.2) for _ in range(4000)]
    golden = []
    for i in range(1000):
        long = i % 5 == 0
        cap = make_caption(rng, long=long)
        if i % 7 == 0:
            cap = cap.replace(", ", ",  ", 1)           # double space
        if i % 11 == 0:
            cap = cap.upper()                           # exercises lowercasing
        if i % 13 == 0:
            cap = "  " + cap.replace(". ", ".\t", 1)    # tab + leading blanks
        if i % 17 == 0:
            cap = cap.replace("european", "café-inspired european", 1)
        golden.append(cap)
    return training, golden


def clip_pipeline(model: models.BPE) -> Tokenizer:
    """Assemble the public CLIP fast-tokenizer pipeline around a BPE model."""
    tok = Tokenizer(model)
    tok.normalizer = normalizers.Sequence(
        [normalizers.NFC(), normalizers.Replace(Regex(r"\s+"), " "), normalizers.Lowercase()]
    )
    tok.pre_tokenizer = pre_tokenizers.Sequence(
        [
            pre_tokenizers.Split(
                Regex(r"""'s|'t|'re|'ve|'m|'ll|'d|[\p{L}]+|[\p{N}]|[^\s\p{L}\p{N}]+"""),
                behavior="removed",
                invert=True,
            ),
            pre_tokenizers.ByteLevel(add_prefix_space=False, use_regex=False),
        ]
    )
    return tok


def train_merges(training: list[str], vocab_size: int) -> list[tuple[str, str]]:
    trainer = trainers.BpeTrainer(
        vocab_size=vocab_size,
        min_frequency=2,
        special_tokens=[],
        end_of_word_suffix="</w>",
        initial_alphabet=pre_tokenizers.ByteLevel.alphabet(),
        show_progress=False,
    )
    tok = clip_pipeline(models.BPE(end_of_word_suffix="</w>"))
    tok.train_from_iterator(training, trainer)
    spec = json.loads(tok.to_str())
    merges = []
    for entry in spec["model"]["merges"]:
        if isinstance(entry, str):
            first, second = entry.split(" ")
        else:
            first, second = entry
        merges.append((first, second))
    return merges


def rebuild_vocab(merges: list[tuple[str, str]]) -> dict[str, int]:
    base = list(bytes_to_unicode().values())
    tokens = base + [c + "</w>" for c in base]
    tokens += [a + b for a, b in merges]
    tokens += [SOT, EOT]
    if len(set(tokens)) != len(tokens):
        raise SystemExit("vocabulary rebuild produced duplicate symbols")
    return {tok: i for i, tok in enumerate(tokens)}


def main() -> None:
    training, golden = build_corpus(seed=20240817)
    merges = train_merges(training, vocab_size=4096)
    vocab = rebuild_vocab(merges)
    print(f"trained {len(merges)} merges; vocabulary of {len(vocab)} entries")

    data_dir = ROOT / "src" / "roomforge" / "captioning" / "data"
    data_dir.mkdir(parents=True, exist_ok=True)
    with open(data_dir / "vocab.json", "w", encoding="utf-8") as fh:
        json.dump(vocab, fh, ensure_ascii=False, indent=0, separators=(",", ": "))
        fh.write("\n")
    with open(data_dir / "merges.txt", "w", encoding="utf-8") as fh:
        fh.write("#version: 0.2 - roomforge interior caption merges\n")
        for a, b in merges:
            fh.write(f"{a} {b}\n")

    reference = clip_pipeline(
        models.BPE(
            vocab=vocab,
            merges=merges,
            dropout=None,
            continuing_subword_prefix="",
            end_of_word_suffix="</w>",
            fuse_unk=False,
            unk_token=EOT,
        )
    )
    golden_dir = ROOT / "tests" / "data" / "tokenizer"
    golden_dir.mkdir(parents=True, exist_ok=True)
    with open(golden_dir / "golden_captions.jsonl", "w", encoding="utf-8") as fh:
        for cap in golden:
            ids = reference.encode(cap, add_special_tokens=False).ids
            fh.write(json.dumps({"caption": cap, "ids": ids}, ensure_ascii=False) + "\n")
    print(f"wrote {len(golden)} golden captions")


if __name__ == "__main__":
    main()

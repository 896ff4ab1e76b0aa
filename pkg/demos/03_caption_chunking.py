"""Compose a long caption and plan its 77-token chunked encoding."""

from roomforge.captioning import CaptionParts, chunk_caption, compose_caption, default_vocabulary, tokenize

vocab = default_vocabulary()
print(f"vocabulary: {len(vocab.encoder)} tokens, {len(vocab.merges)} merges, "
      f"context {vocab.context_length} (= {vocab.max_content_tokens} content + 2 specials)")

parts = CaptionParts(
    room="living room",
    style="japanese",
    quality_labels=("hd", "no watermark"),
    furniture=("sofa", "coffee table", "floor lamp", "potted plant", "bookshelf"),
    natural_text=(
        "natural light pours through floor-to-ceiling windows. wide plank flooring runs "
        "the length of the space, with warm wood tones balancing the cool stone surfaces. "
        "open shelving displays curated ceramics and books. layered lighting mixes ambient, "
        "task and accent sources. the palette stays muted with occasional metallic touches. "
        "soft area rugs define the seating zone, and every sightline ends in a vignette."
    ),
)
caption = compose_caption(parts)
print(f"\ncomposed caption ({len(caption)} chars):\n  {caption}")

ids = tokenize(vocab, caption)
print(f"\n{len(ids)} content tokens; first ten ids: {ids[:10]}")

plan = chunk_caption(vocab, caption)
print(f"chunk plan: {len(plan.chunks)} chunks over {plan.content_tokens} content tokens")
for n, chunk in enumerate(plan.chunks):
    a, b = chunk.span
    preview = plan.normalized[a:b]
    preview = preview[:60] + "..." if len(preview) > 60 else preview
    print(f"  chunk {n}: {len(chunk.token_ids)} ids, span [{a}:{b}] -> {preview!r}")

print("\nchunk spans tile the normalized caption:", plan.reconstruct() == plan.normalized)

"""Round-trip a checkpoint archive and merge two models 60/40."""

import numpy as np

from roomforge.fusion import (
    MergeInput,
    MergeRecipe,
    TensorArchive,
    merge,
    read_tensor_archive,
    validate_compat,
    write_tensor_archive,
)

rng = np.random.default_rng(0)
base = {
    "unet.down.0.weight": rng.normal(size=(4, 4)).astype(np.float32),
    "unet.mid.weight": rng.normal(size=(8,)).astype(np.float32),
    "text.proj": rng.normal(size=(2, 3)).astype(np.float16),
}
ours = TensorArchive.from_arrays(base, metadata={"model": "ours"})
theirs = TensorArchive.from_arrays(
    {k: (v.astype(np.float32) + 0.05).astype(v.dtype) for k, v in base.items()},
    metadata={"model": "theirs"},
)

blob = write_tensor_archive(ours)
print(f"serialized archive: {len(blob)} bytes, tensors: {ours.names()}")
back = read_tensor_archive(blob)
print("read(write(a)) identical:", back.entries == ours.entries and back.buffer == ours.buffer)
print("canonical writer is stable:", write_tensor_archive(back) == blob)

report = validate_compat([ours, theirs], labels=["ours", "theirs"])
print(f"\ncompatibility: {report.compatible}, shared keys: {len(report.shared_keys)}, "
      f"dtype promotions: {list(report.dtype_promotions)}")

merged = merge(MergeRecipe([MergeInput(ours, 0.6, "ours"), MergeInput(theirs, 0.4, "theirs")]))
w = "unet.mid.weight"
print(f"\nmerged[{w}][0] = {merged.tensor(w)[0]:.6f}")
print(f"  0.6*{ours.tensor(w)[0]:.6f} + 0.4*{theirs.tensor(w)[0]:.6f} "
      f"= {0.6 * ours.tensor(w)[0] + 0.4 * theirs.tensor(w)[0]:.6f}")
print("recipe provenance:", merged.metadata["roomforge.recipe"])
print("f16 inputs promoted:", merged.entries["text.proj"].dtype)

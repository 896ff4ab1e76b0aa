"""Weighted checkpoint merging.

Per shared tensor the output is sum(alpha_i * tensor_i), accumulated in
float64 regardless of input dtype and emitted as F32. Half-precision
inputs are promoted before accumulation so the small deltas introduced
by light fine-tuning survive the merge. Weights must sum to 1 and are
validated, never silently renormalized.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .archive import TensorArchive

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOLERANCE = 1e-9


class MergeError(ValueError):
    pass


@dataclass(frozen=True)
class MergeInput:
    archive: TensorArchive
    weight: float
    label: str = ""


@dataclass
class MergeRecipe:
    inputs: list[MergeInput]
    policy: str = "strict"          # strict | intersect
    signed: bool = False            # allow negative weights

    def validate(self) -> None:
        if not self.inputs:
            raise MergeError("recipe has no inputs")
        if self.policy not in ("strict", "intersect"):
            raise MergeError(f"unknown key policy {self.policy!r}")
        total = sum(inp.weight for inp in self.inputs)
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise MergeError(f"weights sum to {total!r}, expected 1.0")
        if not self.signed:
            for inp in self.inputs:
                if inp.weight < 0:
                    raise MergeError(
                        f"negative weight {inp.weight} requires signed mode"
                    )


@dataclass(frozen=True)
class CompatReport:
    compatible: bool
    shared_keys: tuple[str, ...]
    only_in: dict[str, tuple[str, ...]]           # label -> keys missing elsewhere
    shape_mismatches: tuple[dict, ...]
    dtype_promotions: tuple[str, ...]             # shared keys with differing dtypes

    def to_dict(self) -> dict:
        return {
            "compatible": self.compatible,
            "shared_keys": len(self.shared_keys),
            "only_in": {k: list(v) for k, v in self.only_in.items()},
            "shape_mismatches": list(self.shape_mismatches),
            "dtype_promotions": list(self.dtype_promotions),
        }


def _labels(archives: Sequence[TensorArchive], labels: Sequence[str] | None) -> list[str]:
    if labels and len(labels) == len(archives):
        return list(labels)
    return [f"archive_{i}" for i in range(len(archives))]


def validate_compat(
    archives: Sequence[TensorArchive], labels: Sequence[str] | None = None
) -> CompatReport:
    """Report key/shape/dtype differences across >= 2 archives.

    Compatible means every shared key agrees in shape; dtype differences
    are reported but allowed (promoted during merge).
    """
    if len(archives) < 2:
        raise MergeError("compatibility check needs at least 2 archives")
    names = _labels(archives, labels)
    key_sets = [set(a.entries) for a in archives]
    shared = set.intersection(*key_sets)
    union = set.union(*key_sets)

    only_in: dict[str, tuple[str, ...]] = {}
    for label, keys in zip(names, key_sets):
        extras = tuple(sorted(keys - shared)) if keys != shared else ()
        if extras:
            only_in[label] = extras

    shape_mismatches = []
    dtype_promotions = []
    for key in sorted(shared):
        shapes = [a.entries[key].shape for a in archives]
        dtypes = {a.entries[key].dtype for a in archives}
        if len(set(shapes)) > 1:
            shape_mismatches.append(
                {"key": key, "shapes": [list(s) for s in shapes]}
            )
        elif len(dtypes) > 1:
            dtype_promotions.append(key)

    union_consistent = not shape_mismatches
    return CompatReport(
        compatible=union_consistent and bool(shared),
        shared_keys=tuple(sorted(shared)),
        only_in=only_in,
        shape_mismatches=tuple(shape_mismatches),
        dtype_promotions=tuple(dtype_promotions),
    )


def merge(recipe: MergeRecipe) -> TensorArchive:
    """Produce the weighted merge archive described by the recipe."""
    recipe.validate()
    archives = [inp.archive for inp in recipe.inputs]
    if len(archives) == 1:
        compat = None
        shared = sorted(archives[0].entries)
    else:
        compat = validate_compat(archives, [inp.label for inp in recipe.inputs])
        if recipe.policy == "strict":
            if compat.only_in:
                raise MergeError(
                    "strict policy requires identical key sets; extras: "
                    + json.dumps({k: list(v) for k, v in compat.only_in.items()})
                )
            if compat.shape_mismatches:
                raise MergeError(f"shape mismatches: {list(compat.shape_mismatches)}")
        else:
            if compat.shape_mismatches:
                raise MergeError(f"shape mismatches on shared keys: {list(compat.shape_mismatches)}")
            if not compat.shared_keys:
                raise MergeError("intersect policy found no shared keys")
            dropped = sorted({k for keys in compat.only_in.values() for k in keys})
            if dropped:
                logger.warning("intersect merge drops %d keys: %s", len(dropped), dropped[:8])
        shared = list(compat.shared_keys)

    merged: dict[str, np.ndarray] = {}
    for key in shared:
        acc = None
        for inp in recipe.inputs:
            values = inp.archive.tensor(key).astype(np.float64)
            term = inp.weight * values
            acc = term if acc is None else acc + term
        merged[key] = acc.astype("<f4")

    provenance = [
        {"label": inp.label or f"archive_{i}", "weight": inp.weight}
        for i, inp in enumerate(recipe.inputs)
    ]
    metadata = {
        "roomforge.recipe": json.dumps(provenance, sort_keys=True),
        "roomforge.policy": recipe.policy,
    }
    return TensorArchive.from_arrays(merged, metadata=metadata)

"""Compute the seven automated metrics, then gate a candidate model.

Uses the committed comparison fixtures (tests/data/model_compare) for the gate
and small synthetic artifacts for the metric computation itself.
"""

import numpy as np

from roomforge.evalproto import dual_gate
from roomforge.metrics import (
    DetectionRecord,
    FeatureSet,
    MetricInputs,
    MetricReport,
    PromptExpectation,
    default_metric_vocabulary,
    frechet_distance,
    gaussian_stats,
    metric_report,
)

vocab = default_metric_vocabulary()
print(f"vocabularies: {len(vocab.furniture)} furniture, {len(vocab.styles)} styles, "
      f"{len(vocab.hard_elements)} hard elements")

rng = np.random.default_rng(1)
real = FeatureSet.from_array(rng.normal(size=(256, 16)))
generated = FeatureSet.from_array(rng.normal(size=(256, 16)) * 1.1 + 0.2)
print(f"\nFID between two synthetic feature clouds: "
      f"{frechet_distance(gaussian_stats(real), gaussian_stats(generated)):.4f}")

expectations = [
    PromptExpectation("p0", furniture=frozenset({"bed", "nightstand"}), style="modern",
                      hard_elements=frozenset({"wood_floor"})),
    PromptExpectation("p1", furniture=frozenset({"sofa"}), style="nordic",
                      hard_elements=frozenset({"flat_ceiling"})),
]
detections = [
    DetectionRecord("p0", room="bedroom", objects={"bed": 1, "nightstand": 2}, style="modern",
                    hard_elements=frozenset({"wood_floor"})),
    DetectionRecord("p1", room="living_room", objects={"sofa": 1, "television": 2}, style="japanese",
                    hard_elements=frozenset()),
]
inputs = MetricInputs(
    features_real=real,
    features_generated=generated,
    image_embeddings=rng.normal(size=(2, 8)),
    text_embeddings=rng.normal(size=(2, 8)),
    aesthetic_scores=[74.0, 81.0],
    expectations=expectations,
    detections=detections,
    vocabulary=vocab,
)
report = metric_report(inputs)
print("\nseven-metric report:")
for name, entry in report.to_dict().items():
    arrow = "^" if entry["direction"] == "up" else "v"
    print(f"  {name:>4} {arrow}  {entry['value']:8.3f}   (n={entry['count']})")

baseline = MetricReport.from_json(open("tests/data/model_compare/stable_diffusion.json").read())
candidate = MetricReport.from_json(open("tests/data/model_compare/candidate.json").read())
decision = dual_gate(baseline, candidate)
print(f"\ngate vs stable diffusion fixtures: {decision.improved}/{decision.total} improved "
      f"-> {'PASS' if decision.passed else 'FAIL'} (threshold > {decision.threshold:.0%})")

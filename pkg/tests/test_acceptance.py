"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line and enforcing its runtime budget.

Run with `pytest tests/test_acceptance.py -s` to see the criterion lines.
"""

import json
import math
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from roomforge.bucketing import BucketError, assign_bucket, generate_buckets, plan_epoch
from roomforge.captioning import chunk_caption, tokenize
from roomforge.cli import run
from roomforge.curation import CurationConfig, RatedImage, build_layers, select_top_fraction
from roomforge.evalproto import (
    EventLog,
    Judgment,
    SessionStore,
    aggregate_item,
    dual_gate,
    unblind,
)
from roomforge.evalproto.session import A_LEFT, A_RIGHT
from roomforge.fusion import (
    MergeInput,
    MergeRecipe,
    TensorArchive,
    merge,
    read_tensor_archive,
    write_tensor_archive,
)
from roomforge.metrics import (
    FeatureSet,
    GaussianStats,
    frechet_distance,
    gaussian_stats,
    sqrtm_psd,
)
from roomforge.metrics.report import MetricReport
from roomforge.rng import Xoshiro256StarStar

from conftest import benign_labels

TABLE1 = Path(__file__).parent / "data" / "model_compare"
PKG_DATA = Path(__file__).parent.parent / "src" / "roomforge"


@contextmanager
def criterion(name, budget_seconds):
    start = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"FAIL: {name}")
        raise
    elapsed = time.monotonic() - start
    if elapsed >= budget_seconds:
        print(f"FAIL: {name} (runtime {elapsed:.2f}s >= {budget_seconds}s budget)")
        raise AssertionError(f"{name}: runtime {elapsed:.2f}s exceeds {budget_seconds}s")
    print(f"PASS: {name} ({elapsed:.2f}s)")


def load_report(name):
    return MetricReport.from_json((TABLE1 / f"{name}.json").read_text())


def test_acceptance_dual_gate_model_compare():
    with criterion("dual gate on published comparison fixtures", 1.0):
        candidate = load_report("candidate")
        for baseline in ("stable_diffusion", "epicrealism", "realistic_vision", "sdxl", "sdxl_refiner"):
            decision = dual_gate(load_report(baseline), candidate)
            assert decision.improved == 7 and decision.total == 7
            assert decision.passed

        epic = dual_gate(load_report("stable_diffusion"), load_report("epicrealism"))
        assert epic.improved == 6 and epic.total == 7
        assert abs(epic.improved_fraction - 0.857) < 1e-3
        assert epic.passed

        same = dual_gate(candidate, candidate)
        assert same.improved == 0 and not same.passed


def test_acceptance_fid_numerics():
    with criterion("FID numerics", 5.0):
        rng = np.random.default_rng(20240817)

        x = rng.normal(size=(64, 8))
        a = gaussian_stats(FeatureSet.from_array(x))
        assert abs(frechet_distance(a, a)) < 1e-9

        one_d = frechet_distance(
            GaussianStats(np.array([0.0]), np.array([[1.0]])),
            GaussianStats(np.array([1.0]), np.array([[1.0]])),
        )
        assert abs(one_d - 1.0) < 1e-9

        diag = frechet_distance(
            GaussianStats(np.zeros(2), np.diag([1.0, 4.0])),
            GaussianStats(np.zeros(2), np.diag([4.0, 1.0])),
        )
        assert abs(diag - 2.0) < 1e-9

        def random_spd(d=8):
            q, _ = np.linalg.qr(rng.normal(size=(d, d)))
            return (q * rng.uniform(0.1, 10.0, size=d)) @ q.T

        def ns_sqrt(m, iterations=60):
            norm = np.linalg.norm(m, ord="fro")
            y, z = m / norm, np.eye(m.shape[0])
            for _ in range(iterations):
                t = 0.5 * (3.0 * np.eye(m.shape[0]) - z @ y)
                y, z = y @ t, t @ z
            return y * math.sqrt(norm)

        for _ in range(100):
            mu_a, mu_b = rng.normal(size=8), rng.normal(size=8)
            ca, cb = random_spd(), random_spd()
            mine = frechet_distance(GaussianStats(mu_a, ca), GaussianStats(mu_b, cb))
            sa = ns_sqrt(ca)
            inner = sa @ cb @ sa
            oracle = float(
                (mu_a - mu_b) @ (mu_a - mu_b)
                + np.trace(ca) + np.trace(cb)
                - 2.0 * np.trace(ns_sqrt((inner + inner.T) / 2))
            )
            assert abs(mine - max(oracle, 0.0)) < 1e-6
            assert np.abs(sqrtm_psd(ca) - ns_sqrt(ca)).max() < 1e-6


def test_acceptance_tokenizer_oracle(vocab, golden_captions):
    with criterion("tokenizer golden corpus and chunk constraints", 10.0):
        assert len(golden_captions) == 1000
        mismatched = 0
        for rec in golden_captions:
            if tokenize(vocab, rec["caption"]) != rec["ids"]:
                mismatched += 1
        assert mismatched == 0

        for rec in golden_captions:
            plan = chunk_caption(vocab, rec["caption"])
            for chunk in plan.chunks:
                assert len(chunk.token_ids) <= 77
                assert chunk.token_ids[0] == vocab.sot_id
                assert chunk.token_ids[-1] == vocab.eot_id
            assert plan.reconstruct() == plan.normalized


def test_acceptance_bucketing_properties():
    with criterion("bucketing argmin and schedule reproducibility", 10.0):
        rng = Xoshiro256StarStar(77_000)
        plans = []
        while len(plans) < 8:
            quantum = (32, 64, 128)[rng.next_below(3)]
            lo = 256 + rng.next_below(256)
            hi = lo + rng.next_below(512)
            try:
                plans.append(generate_buckets(quantum, lo, hi, hi * hi))
            except BucketError:
                continue

        checks = 10_000
        for k in range(checks):
            plan = plans[k % len(plans)]
            width = 1 + rng.next_below(4096)
            height = 1 + rng.next_below(4096)
            got = assign_bucket(width, height, plan)
            log_aspect = math.log(width / height)
            oracle = min(
                plan.buckets,
                key=lambda b: (
                    abs(log_aspect - math.log(b.width / b.height)),
                    -(b.width * b.height),
                    b.width,
                ),
            )
            assert plan.bucket(got.bucket_id) == oracle

        plan = plans[0]
        assignments = [
            assign_bucket(1 + rng.next_below(2048), 1 + rng.next_below(2048), plan, image_id=f"i{k:05d}")
            for k in range(500)
        ]
        s1 = plan_epoch(assignments, plan, batch_size=16, seed=31337)
        s2 = plan_epoch(assignments, plan, batch_size=16, seed=31337)
        assert list(s1.iter_lines(plan)) == list(s2.iter_lines(plan))
        scheduled = [i for it in s1.iterations for i in it.image_ids]
        assert sorted(scheduled) == sorted(a.image_id for a in assignments)
        assert len(scheduled) == len(set(scheduled))


def test_acceptance_fusion():
    with criterion("fusion format and merge numerics", 10.0):
        import struct

        header = b'{"t":{"dtype":"F32","shape":[2],"data_offsets":[0,8]}}'
        golden = struct.pack("<Q", len(header)) + header + struct.pack("<ff", 1.0, 2.0)
        archive = read_tensor_archive(golden)
        np.testing.assert_array_equal(archive.tensor("t"), np.array([1.0, 2.0], dtype="<f4"))

        rng = np.random.default_rng(99)
        for _ in range(200):
            arrays = {}
            for t in range(rng.integers(0, 4)):
                shape = tuple(rng.integers(1, 5, size=rng.integers(0, 3)))
                dtype = np.float16 if rng.random() < 0.5 else np.float32
                arrays[f"k{t}.{rng.integers(0, 99)}"] = rng.normal(size=shape).astype(dtype)
            original = TensorArchive.from_arrays(arrays, metadata={"n": str(len(arrays))})
            blob = write_tensor_archive(original)
            back = read_tensor_archive(blob)
            assert back.entries == original.entries
            assert back.buffer == original.buffer
            assert back.metadata == original.metadata
            assert write_tensor_archive(back) == blob

        a = TensorArchive.from_arrays({"w": np.array([1.0, 2.0], dtype=np.float32)})
        b = TensorArchive.from_arrays({"w": np.array([3.0, 4.0], dtype=np.float32)})
        out = merge(MergeRecipe([MergeInput(a, 0.5), MergeInput(b, 0.5)]))
        assert out.tensor("w").tolist() == [2.0, 3.0]

        values = rng.normal(size=64).astype(np.float32)
        ident = merge(MergeRecipe([
            MergeInput(TensorArchive.from_arrays({"w": values}), 1.0),
            MergeInput(TensorArchive.from_arrays({"w": values * 3}), 0.0),
        ]))
        assert ident.tensor("w").tobytes() == values.astype("<f4").tobytes()

        weights = (0.2, 0.3, 0.5)
        tensors = [rng.normal(size=(6, 7)).astype(np.float32) for _ in range(3)]
        merged = merge(MergeRecipe([
            MergeInput(TensorArchive.from_arrays({"w": t}), w) for t, w in zip(tensors, weights)
        ]))
        got = merged.tensor("w")
        for i in range(6):
            for j in range(7):
                expected = sum(w * float(t[i, j]) for w, t in zip(weights, tensors))
                assert abs(got[i, j] - expected) <= 1e-6 * max(1.0, abs(expected))


def test_acceptance_gsb_protocol(tmp_path):
    with criterion("GSB majority, win rate, replay, blinding", 5.0):
        def agg(choices):
            return aggregate_item(
                [Judgment("i", f"e{k}", "d", c, "left", 0.0) for k, c in enumerate(choices)]
            ).outcome

        assert agg(["good", "good", "bad"]) == "good"
        assert agg(["good", "same", "bad"]) == "excluded"
        assert agg(["good", "good", "same", "bad"]) == "excluded"

        # summary fixture: 140 good, 60 bad, 50 same -> win rate 0.700
        log_path = tmp_path / "events.jsonl"
        store = SessionStore(EventLog(str(log_path)))
        n = 250
        store.create_session(
            "acc",
            [(f"p{k:04d}", f"prompt {k}") for k in range(n)],
            [f"a{k}.png" for k in range(n)],
            [f"b{k}.png" for k in range(n)],
            ["e1", "e2", "e3"],
            seed=5,
            dimensions=["aesthetic"],
        )
        state = store.state("acc")
        wanted = {}
        for idx, item in enumerate(state.session.items):
            wanted[item.item_id] = "good" if idx < 140 else ("bad" if idx < 200 else "same")
        events = 0
        for a in state.assignments:
            want = wanted[a.item_id]
            if want == "same":
                raw = "same"
            elif want == "good":
                raw = "left" if a.side == A_LEFT else "right"
            else:
                raw = "right" if a.side == A_LEFT else "left"
            store.record_judgment("acc", a.evaluator, a.item_id, a.dimension, raw)
            events += 1
        assert events >= 750
        summary = store.summary("acc")
        dim = summary.dimensions["aesthetic"]
        assert (dim.good, dim.bad, dim.same, dim.excluded) == (140, 60, 50, 0)
        assert dim.win_rate == pytest.approx(0.700, abs=1e-12)

        # push the log past 1,000 events with randomized judgments on a
        # second session, then replay everything and compare live state
        rng = Xoshiro256StarStar(7171)
        store.create_session(
            "acc-rand",
            [(f"q{k:04d}", f"prompt {k}") for k in range(120)],
            [f"qa{k}.png" for k in range(120)],
            [f"qb{k}.png" for k in range(120)],
            ["r1", "r2", "r3", "r4"],
            seed=8,
            dimensions=["aesthetic", "layout"],
        )
        rand_state = store.state("acc-rand")
        raw_choices = ("left", "right", "same")
        for a in rand_state.assignments:
            if rng.next_below(100) < 60:
                store.record_judgment(
                    "acc-rand", a.evaluator, a.item_id, a.dimension, raw_choices[rng.next_below(3)]
                )
        assert store.log.last_seq >= 1000

        rebuilt = SessionStore(EventLog(str(log_path)))
        assert rebuilt.state("acc").judgments == state.judgments
        assert rebuilt.summary("acc") == summary
        assert rebuilt.state("acc-rand").judgments == store.state("acc-rand").judgments
        assert rebuilt.summary("acc-rand", allow_partial=True) == store.summary("acc-rand", allow_partial=True)

        # blinding-flip symmetry
        rng = Xoshiro256StarStar(12)
        for _ in range(500):
            side = (A_LEFT, A_RIGHT)[rng.next_below(2)]
            choice = ("left", "right", "same")[rng.next_below(3)]
            flipped_side = A_RIGHT if side == A_LEFT else A_LEFT
            flipped_choice = {"left": "right", "right": "left", "same": "same"}[choice]
            assert unblind(side, choice) == unblind(flipped_side, flipped_choice)


def test_acceptance_curation(strict_rules):
    with criterion("curation selection oracle and tier nesting", 5.0):
        rng = Xoshiro256StarStar(2025)
        images = [
            RatedImage(
                image_id=f"img-{k:04d}",
                count=1 + rng.next_below(6),
                mean_level=1 + rng.next_below(4001) / 1000.0,
            )
            for k in range(1000)
        ]
        got = select_top_fraction(images, 0.10)
        ordered = sorted(images, key=lambda r: (-r.mean_level, -r.count, r.image_id))
        assert got == {r.image_id for r in ordered[:100]}

        from roomforge.manifest import ImageRecord

        for trial in range(25):
            n = 1 + rng.next_below(80)
            records = [
                ImageRecord(
                    id=f"r{k:04d}", width=1024, height=1024,
                    labels=benign_labels(**{
                        "aesthetics.realism": 30 + rng.next_below(70),
                        "basic.clarity": 30 + rng.next_below(70),
                    }),
                )
                for k in range(n)
            ]
            rated_ids = sorted({f"r{rng.next_below(n):04d}" for _ in range(max(1, n // 2))})
            ratings = [RatedImage(rid, 3, 1 + rng.next_below(4001) / 1000) for rid in rated_ids]
            config = CurationConfig(
                curated_cap=1 + rng.next_below(80),
                premium_cap=1 + rng.next_below(80),
                premium_fraction=(1 + rng.next_below(100)) / 100.0,
            )
            layered = build_layers(records, strict_rules, ratings, config)
            assert layered.premium <= layered.curated <= layered.screen


def test_acceptance_end_to_end(tmp_path):
    with criterion("end-to-end pipeline determinism", 30.0):
        rules_path = str(PKG_DATA / "filtering" / "data" / "default_rules.json")
        strict_path = str(PKG_DATA / "filtering" / "data" / "strict_rules.json")
        vocab_path = str(PKG_DATA / "captioning" / "data" / "vocab.json")
        merges_path = str(PKG_DATA / "captioning" / "data" / "merges.txt")

        rng = Xoshiro256StarStar(424242)
        rooms = ("bedroom", "living room", "kitchen", "bathroom", "study")
        styles = ("modern", "nordic", "industrial", "japanese")
        furniture = ("bed", "sofa", "desk", "rug", "mirror", "armchair", "bookshelf")

        manifest = tmp_path / "manifest.jsonl"
        with open(manifest, "w") as fh:
            for i in range(500):
                labels = benign_labels(**{
                    "low_quality.watermark": rng.next_below(10) == 0,
                    "basic.resolution_min_side": 256 + rng.next_below(1600),
                    "basic.clarity": rng.next_below(101),
                    "aesthetics.realism": rng.next_below(101),
                })
                items = [furniture[rng.next_below(len(furniture))] for _ in range(2 + rng.next_below(4))]
                fh.write(json.dumps({
                    "id": f"img-{i:04d}",
                    "width": 256 + rng.next_below(1792),
                    "height": 256 + rng.next_below(1792),
                    "labels": labels,
                    "caption": {
                        "room": rooms[rng.next_below(len(rooms))],
                        "style": styles[rng.next_below(len(styles))],
                        "quality": ["hd"],
                        "furniture": items,
                        "text": "a calm, considered space with natural light and layered textures",
                    },
                }, sort_keys=True) + "\n")

        ballots = tmp_path / "ballots.jsonl"
        with open(ballots, "w") as fh:
            for i in range(0, 500, 5):
                for rater in range(3):
                    fh.write(json.dumps({
                        "image_id": f"img-{i:04d}",
                        "rater_id": f"r{rater}",
                        "level": 1 + rng.next_below(5),
                    }) + "\n")

        def run_pipeline(outdir: Path):
            outdir.mkdir()
            kept = outdir / "kept.jsonl"
            assert run([
                "filter", "--rules", rules_path, "--in", str(manifest),
                "--out", str(kept), "--report", str(outdir / "report.json"),
            ]).exit_code == 0
            plan = outdir / "plan.json"
            assert run([
                "bucket", "plan", "--quantum", "64", "--min-side", "448",
                "--max-side", "832", "--max-pixels", str(640 * 640), "--out", str(plan),
            ]).exit_code == 0
            assert run([
                "bucket", "schedule", "--plan", str(plan), "--manifest", str(kept),
                "--batch", "16", "--seed", "7", "--out", str(outdir / "schedule.jsonl"),
            ]).exit_code == 0
            assert run([
                "caption", "chunk", "--vocab", vocab_path, "--merges", merges_path,
                "--in", str(kept), "--out", str(outdir / "chunks.jsonl"),
            ]).exit_code == 0
            assert run([
                "curate", "--manifest", str(kept), "--rules", strict_path,
                "--ballots", str(ballots), "--fraction", "0.10",
                "--premium-cap", "5000", "--out", str(outdir / "tiers.jsonl"),
            ]).exit_code == 0
            return ["kept.jsonl", "report.json", "plan.json", "schedule.jsonl", "chunks.jsonl", "tiers.jsonl"]

        files = run_pipeline(tmp_path / "run1")
        run_pipeline(tmp_path / "run2")
        for name in files:
            first = (tmp_path / "run1" / name).read_bytes()
            second = (tmp_path / "run2" / name).read_bytes()
            assert first == second, f"{name} differs between runs"

        kept_lines = (tmp_path / "run1" / "kept.jsonl").read_text().splitlines()
        schedule_rows = [json.loads(line) for line in (tmp_path / "run1" / "schedule.jsonl").read_text().splitlines()]
        scheduled = [i for row in schedule_rows for i in row["image_ids"]]
        assert sorted(scheduled) == sorted(json.loads(line)["id"] for line in kept_lines)
        chunk_rows = [json.loads(line) for line in (tmp_path / "run1" / "chunks.jsonl").read_text().splitlines()]
        assert len(chunk_rows) == len(kept_lines)
        assert all(len(c["ids"]) <= 77 for row in chunk_rows for c in row["chunks"])
        tier_rows = [json.loads(line) for line in (tmp_path / "run1" / "tiers.jsonl").read_text().splitlines()]
        assert len(tier_rows) == len(kept_lines)

"""Dual gate on the published comparison fixtures, GSB protocol, replay."""

import itertools
import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roomforge.evalproto import (
    EventLog,
    EventLogError,
    GateError,
    Judgment,
    SessionError,
    SessionStore,
    aggregate_item,
    assign_items,
    create_session,
    dual_gate,
    side_order,
    summarize,
    unblind,
)
from roomforge.evalproto.session import A_LEFT, A_RIGHT
from roomforge.evalproto.store import DuplicateJudgmentError, NotAssignedError, SessionClosedError
from roomforge.metrics import MetricReport
from roomforge.rng import Xoshiro256StarStar

TABLE1 = Path(__file__).parent / "data" / "model_compare"
BASELINES = ("stable_diffusion", "epicrealism", "realistic_vision", "sdxl", "sdxl_refiner")


def load_report(name):
    return MetricReport.from_json((TABLE1 / f"{name}.json").read_text())


# --- dual gate -------------------------------------------------------------

def test_headline_model_beats_every_baseline_7_of_7():
    candidate = load_report("candidate")
    for baseline in BASELINES:
        decision = dual_gate(load_report(baseline), candidate)
        assert decision.improved == 7 and decision.total == 7, baseline
        assert decision.passed


def test_epicrealism_vs_stable_diffusion_6_of_7():
    decision = dual_gate(load_report("stable_diffusion"), load_report("epicrealism"))
    assert decision.improved == 6 and decision.total == 7
    assert decision.improved_fraction == pytest.approx(6 / 7)
    assert decision.passed
    by_metric = {o.metric: o for o in decision.outcomes}
    assert not by_metric["AS"].improved        # 65.7 < 73.0
    assert by_metric["FRR"].improved           # 24.5 < 27.3 with direction down
    assert by_metric["FID"].improved           # 41.1 < 47.4


def test_identical_reports_fail():
    report = load_report("candidate")
    decision = dual_gate(report, report)
    assert decision.improved == 0
    assert not decision.passed


def test_five_of_seven_passes_strict_70_percent():
    base = load_report("stable_diffusion")
    values = dict(base.values)
    # improve exactly 5 metrics
    for metric in ("AS", "SFR", "SA", "HFR", "CS"):
        values[metric] = values[metric] + 1.0
    candidate = MetricReport(values=values, counts=base.counts, directions=base.directions)
    decision = dual_gate(base, candidate)
    assert decision.improved == 5
    assert decision.passed            # 5/7 = 0.714 > 0.70

    # 4/7 = 0.571 fails
    values["CS"] = base.values["CS"]
    candidate = MetricReport(values=values, counts=base.counts, directions=base.directions)
    assert not dual_gate(base, candidate).passed


def test_inclusive_mode_flips_boundary():
    base = load_report("stable_diffusion")
    values = dict(base.values)
    candidate = MetricReport(values=values, counts=base.counts, directions=base.directions)
    assert not dual_gate(base, candidate, threshold=0.0).passed       # 0 > 0 false
    assert dual_gate(base, candidate, threshold=0.0, inclusive=True).passed


def test_gate_name_mismatch():
    base = load_report("sdxl")
    smaller = MetricReport(
        values=dict(base.values), counts=base.counts, directions=base.directions
    )
    extra = dict(base.values)
    extra["NEW"] = 1.0
    bigger = MetricReport(values=extra, counts=base.counts, directions={**base.directions, "NEW": "up"})
    with pytest.raises(GateError, match="differ"):
        dual_gate(smaller, bigger)


def test_gate_monotone_in_improvements():
    """Improving one more metric never flips pass -> fail."""
    base = load_report("stable_diffusion")
    metrics = list(base.values)
    for k in range(len(metrics)):
        values_k = {
            m: base.values[m] + (1 if base.directions[m] == "up" else -1) * (1.0 if i < k else 0.0)
            for i, m in enumerate(metrics)
        }
        values_k1 = {
            m: base.values[m] + (1 if base.directions[m] == "up" else -1) * (1.0 if i < k + 1 else 0.0)
            for i, m in enumerate(metrics)
        }
        d_k = dual_gate(base, MetricReport(values_k, base.counts, base.directions))
        d_k1 = dual_gate(base, MetricReport(values_k1, base.counts, base.directions))
        assert not (d_k.passed and not d_k1.passed)


# --- session construction ----------------------------------------------------

def make_session(n_items=6, n_evaluators=3, dimensions=("aesthetic",), seed=99, min_per_item=3):
    prompts = [(f"p{k:04d}", f"prompt number {k}") for k in range(n_items)]
    return create_session(
        "sess-1",
        prompts,
        images_a=[f"a/{k}.png" for k in range(n_items)],
        images_b=[f"b/{k}.png" for k in range(n_items)],
        roster=[f"ev{j:02d}" for j in range(n_evaluators)],
        seed=seed,
        dimensions=dimensions,
        min_per_item=min_per_item,
    )


def test_create_session_thousand_prompts_twenty_evaluators():
    session = make_session(n_items=1000, n_evaluators=20)
    assert len(session.items) == 1000
    assert len(session.roster) == 20
    assert [i.item_id for i in session.items] == sorted(i.item_id for i in session.items)


def test_create_session_validations():
    with pytest.raises(SessionError, match="prompt"):
        make_session(n_items=0)
    with pytest.raises(SessionError, match="roster"):
        make_session(n_evaluators=2, min_per_item=3)
    with pytest.raises(SessionError, match="match"):
        create_session(
            "s", [("p1", "x")], images_a=[], images_b=["b.png"],
            roster=["e1", "e2", "e3"], seed=0,
        )


# --- assignment ----------------------------------------------------------------

def test_three_evaluators_cover_everything():
    session = make_session(n_items=6, n_evaluators=3)
    assignments = assign_items(session)
    assert len(assignments) == 18
    per_evaluator = {}
    for a in assignments:
        per_evaluator.setdefault(a.evaluator, []).append(a.item_id)
    assert all(len(items) == 6 for items in per_evaluator.values())
    for item in session.items:
        covering = {a.evaluator for a in assignments if a.item_id == item.item_id}
        assert len(covering) == 3


def test_twenty_evaluators_balanced_load():
    session = make_session(n_items=1000, n_evaluators=20)
    assignments = assign_items(session)
    assert len(assignments) == 3000
    loads = {}
    for a in assignments:
        loads[a.evaluator] = loads.get(a.evaluator, 0) + 1
    assert set(loads.values()) == {150}     # 3000 / 20 exactly


def test_assignment_deterministic():
    s1 = assign_items(make_session(seed=4))
    s2 = assign_items(make_session(seed=4))
    assert s1 == s2
    s3 = assign_items(make_session(seed=5))
    assert [a.side for a in s1] != [a.side for a in s3] or s1 != s3


def test_no_duplicate_evaluator_per_item_dimension():
    session = make_session(n_items=50, n_evaluators=7, dimensions=("aesthetic", "layout"))
    assignments = assign_items(session)
    keys = [(a.item_id, a.evaluator, a.dimension) for a in assignments]
    assert len(keys) == len(set(keys))


def test_side_order_is_hash_parity():
    from roomforge.rng import blind_hash

    for item, evaluator in (("p1", "e1"), ("p2", "e9"), ("item-x", "ev-y")):
        expected = A_LEFT if blind_hash(71, item, evaluator) & 1 == 0 else A_RIGHT
        assert side_order(71, item, evaluator) == expected


def test_sides_mix_both_orders():
    session = make_session(n_items=200, n_evaluators=5)
    sides = {a.side for a in assign_items(session)}
    assert sides == {A_LEFT, A_RIGHT}


# --- unblinding ----------------------------------------------------------------

def test_unblind_mapping():
    assert unblind(A_RIGHT, "right") == "good"
    assert unblind(A_RIGHT, "left") == "bad"
    assert unblind(A_LEFT, "left") == "good"
    assert unblind(A_LEFT, "right") == "bad"
    assert unblind(A_LEFT, "same") == "same"
    assert unblind(A_RIGHT, "same") == "same"
    with pytest.raises(SessionError):
        unblind(A_LEFT, "both")


@settings(max_examples=80)
@given(
    side=st.sampled_from([A_LEFT, A_RIGHT]),
    choice=st.sampled_from(["left", "right", "same"]),
)
def test_blinding_flip_symmetry(side, choice):
    """Flipping the side order and the raw choice preserves the verdict."""
    flipped_side = A_RIGHT if side == A_LEFT else A_LEFT
    flipped_choice = {"left": "right", "right": "left", "same": "same"}[choice]
    assert unblind(side, choice) == unblind(flipped_side, flipped_choice)


# --- aggregation -----------------------------------------------------------------

def score(choices):
    judgments = [
        Judgment("item", f"e{i}", "aesthetic", c, "left", float(i)) for i, c in enumerate(choices)
    ]
    return aggregate_item(judgments)


def test_strict_majority_good():
    assert score(["good", "good", "bad"]).outcome == "good"


def test_split_vote_excluded():
    assert score(["good", "same", "bad"]).outcome == "excluded"


def test_two_of_four_excluded():
    assert score(["good", "good", "same", "bad"]).outcome == "excluded"


def test_three_of_four_majority():
    assert score(["bad", "bad", "bad", "good"]).outcome == "bad"


def test_aggregate_insufficient_judgments():
    with pytest.raises(SessionError, match="need at least"):
        score(["good"])


def test_aggregate_order_neutral():
    for perm in itertools.permutations(["good", "good", "bad"]):
        assert score(list(perm)).outcome == "good"
    for perm in itertools.permutations(["good", "same", "bad"]):
        assert score(list(perm)).outcome == "excluded"


def test_majority_outcome_exceeds_half():
    rng = Xoshiro256StarStar(8)
    options = ("good", "same", "bad")
    for _ in range(300):
        n = 3 + rng.next_below(4)
        choices = [options[rng.next_below(3)] for _ in range(n)]
        agg = score(choices)
        if agg.outcome != "excluded":
            assert agg.votes[agg.outcome] * 2 > n
        else:
            assert all(v * 2 <= n for v in agg.votes.values())


# --- store / summary ---------------------------------------------------------------

def seeded_store(tmp_path=None, n_items=6, n_evaluators=3, dimensions=("aesthetic",)):
    log = EventLog(str(tmp_path / "events.jsonl") if tmp_path else None)
    store = SessionStore(log)
    store.create_session(
        "sess-1",
        [(f"p{k:04d}", f"prompt {k}") for k in range(n_items)],
        [f"a/{k}.png" for k in range(n_items)],
        [f"b/{k}.png" for k in range(n_items)],
        [f"ev{j:02d}" for j in range(n_evaluators)],
        seed=7,
        dimensions=list(dimensions),
    )
    return store


def test_record_judgment_unblinds():
    store = seeded_store()
    state = store.state("sess-1")
    assignment = state.assignments[0]
    raw = "left"
    judgment = store.record_judgment(
        "sess-1", assignment.evaluator, assignment.item_id, assignment.dimension, raw
    )
    assert judgment.choice == unblind(assignment.side, raw)


def test_duplicate_judgment_rejected():
    store = seeded_store()
    a = store.state("sess-1").assignments[0]
    store.record_judgment("sess-1", a.evaluator, a.item_id, a.dimension, "same")
    with pytest.raises(DuplicateJudgmentError):
        store.record_judgment("sess-1", a.evaluator, a.item_id, a.dimension, "left")
    # original retained
    assert store.state("sess-1").judgments[(a.item_id, a.evaluator, a.dimension)].choice == "same"


def test_unassigned_evaluator_rejected():
    store = seeded_store()
    with pytest.raises(NotAssignedError):
        store.record_judgment("sess-1", "stranger", "p0000", "aesthetic", "left")


def test_closed_session_rejects_judgments():
    store = seeded_store()
    store.close_session("sess-1")
    a = store.state("sess-1").assignments[0]
    with pytest.raises(SessionClosedError):
        store.record_judgment("sess-1", a.evaluator, a.item_id, a.dimension, "left")


def complete_session(store, session_id="sess-1", choose=None):
    state = store.state(session_id)
    for a in state.assignments:
        key = (a.item_id, a.evaluator, a.dimension)
        if key in state.judgments:
            continue
        raw = choose(a) if choose else "same"
        store.record_judgment(session_id, a.evaluator, a.item_id, a.dimension, raw)


def test_summary_win_rate_70_percent():
    summary_counts = {"good": 140, "bad": 60, "same": 50}
    total_items = sum(summary_counts.values())
    store = seeded_store(n_items=total_items, n_evaluators=3)
    state = store.state("sess-1")
    items = [i.item_id for i in state.session.items]
    outcome_of = {}
    for idx, item in enumerate(items):
        if idx < 140:
            outcome_of[item] = "good"
        elif idx < 200:
            outcome_of[item] = "bad"
        else:
            outcome_of[item] = "same"

    def choose(assignment):
        want = outcome_of[assignment.item_id]
        if want == "same":
            return "same"
        if want == "good":
            return "left" if assignment.side == A_LEFT else "right"
        return "right" if assignment.side == A_LEFT else "left"

    complete_session(store, choose=choose)
    summary = store.summary("sess-1")
    dim = summary.dimensions["aesthetic"]
    assert dim.good == 140 and dim.bad == 60 and dim.same == 50 and dim.excluded == 0
    assert dim.win_rate == pytest.approx(0.700, abs=1e-12)


def test_summary_all_same_has_null_win_rate():
    store = seeded_store(n_items=4)
    complete_session(store)     # everyone answers "same"
    summary = store.summary("sess-1")
    assert summary.dimensions["aesthetic"].win_rate is None
    assert summary.dimensions["aesthetic"].same == 4


def test_summary_requires_completion_or_close():
    store = seeded_store(n_items=4)
    with pytest.raises(SessionError, match="collecting"):
        store.summary("sess-1")
    store.summary("sess-1", allow_partial=True)    # explicit partial works
    store.close_session("sess-1")
    summary = store.summary("sess-1")
    assert summary.incomplete_items == 4


# --- event log and replay -------------------------------------------------------

def test_event_log_round_trip(tmp_path):
    log = EventLog(str(tmp_path / "log.jsonl"))
    log.append("session_created", {"x": 1})
    log.append("judgment_recorded", {"y": [1, 2, 3]})
    events = list(EventLog(str(tmp_path / "log.jsonl")).replay())
    assert [e.kind for e in events] == ["session_created", "judgment_recorded"]
    assert events[0].seq == 1 and events[1].seq == 2


def test_event_log_detects_corruption(tmp_path):
    path = tmp_path / "log.jsonl"
    log = EventLog(str(path))
    log.append("session_created", {"x": 1})
    text = path.read_text().replace('"x":1', '"x":2')
    path.write_text(text)
    with pytest.raises(EventLogError, match="checksum"):
        list(EventLog(str(path)).replay())


def test_event_log_detects_gaps(tmp_path):
    path = tmp_path / "log.jsonl"
    log = EventLog(str(path))
    log.append("a", {})
    log.append("b", {})
    lines = path.read_text().splitlines()
    path.write_text(lines[1] + "\n")
    with pytest.raises(EventLogError, match="seq"):
        list(EventLog(str(path)).replay())


def test_replay_reproduces_live_state_randomized(tmp_path):
    """1,000+ randomized judgments: a store rebuilt from the log matches."""
    store = seeded_store(tmp_path, n_items=120, n_evaluators=5, dimensions=("aesthetic", "layout", "alignment"))
    state = store.state("sess-1")
    rng = Xoshiro256StarStar(606)
    choices = ("left", "right", "same")
    recorded = 0
    for a in state.assignments:
        if rng.next_below(100) < 95:
            store.record_judgment(
                "sess-1", a.evaluator, a.item_id, a.dimension, choices[rng.next_below(3)]
            )
            recorded += 1
    assert recorded >= 1000

    rebuilt = SessionStore(EventLog(str(tmp_path / "events.jsonl")))
    live = store.state("sess-1")
    again = rebuilt.state("sess-1")
    assert again.session == live.session
    assert again.assignments == live.assignments
    assert again.judgments == live.judgments
    assert again.closed == live.closed
    assert rebuilt.summary("sess-1", allow_partial=True) == store.summary("sess-1", allow_partial=True)


def test_replay_prefix_consistency(tmp_path):
    """State rebuilt from any prefix of the log equals the live state at
    that point in time (event sourcing)."""
    path = tmp_path / "events.jsonl"
    store = seeded_store(tmp_path, n_items=3, n_evaluators=3)
    state = store.state("sess-1")
    judged = []
    for a in state.assignments[:5]:
        store.record_judgment("sess-1", a.evaluator, a.item_id, a.dimension, "left")
        judged.append(len(store.state("sess-1").judgments))

    lines = path.read_text().splitlines()
    for prefix_len in range(1, len(lines) + 1):
        partial = tmp_path / f"prefix-{prefix_len}.jsonl"
        partial.write_text("\n".join(lines[:prefix_len]) + "\n")
        rebuilt = SessionStore(EventLog(str(partial)))
        assert len(rebuilt.state("sess-1").judgments) == max(0, prefix_len - 1)

"""A complete in-memory GSB run: blinded assignments, judging, summary.

Three evaluators judge eight prompt pairs on one dimension. System A is
secretly better on most items; the demo shows blinding, strict-majority
aggregation with exclusions, and the win rate after removing "same".
"""

from roomforge.evalproto import EventLog, SessionStore
from roomforge.evalproto.session import A_LEFT
from roomforge.rng import Xoshiro256StarStar

store = SessionStore(EventLog(None))   # in-memory log
n = 8
store.create_session(
    "demo",
    prompts=[(f"p{k}", f"a cozy reading corner, variant {k}") for k in range(n)],
    images_a=[f"model_a/{k}.png" for k in range(n)],
    images_b=[f"model_b/{k}.png" for k in range(n)],
    roster=["ana", "bo", "chris"],
    seed=99,
    dimensions=["aesthetic"],
)
state = store.state("demo")
print(f"session with {len(state.session.items)} items, "
      f"{len(state.assignments)} blinded assignments (3 per item)")
sides = [a.side for a in state.assignments[:6]]
print("first side orders (hidden from evaluators):", sides)

rng = Xoshiro256StarStar(3)
for a in state.assignments:
    item_index = int(a.item_id[1:])
    if item_index < 5:
        prefers_a = rng.next_below(10) < 8      # A clearly better
    elif item_index < 7:
        prefers_a = rng.next_below(2) == 0      # coin flip: likely excluded
    else:
        prefers_a = None                        # everyone says same
    if prefers_a is None:
        raw = "same"
    elif prefers_a:
        raw = "left" if a.side == A_LEFT else "right"
    else:
        raw = "right" if a.side == A_LEFT else "left"
    judgment = store.record_judgment("demo", a.evaluator, a.item_id, a.dimension, raw)

summary = store.summary("demo")
dim = summary.dimensions["aesthetic"]
print(f"\naggregates: good={dim.good} same={dim.same} bad={dim.bad} excluded={dim.excluded}")
rate = dim.win_rate
print("win rate after removing 'same':", f"{rate:.0%}" if rate is not None else "undefined")

replayed = SessionStore(store.log)
print("\nreplaying the event log rebuilds identical state:",
      replayed.summary("demo") == summary)

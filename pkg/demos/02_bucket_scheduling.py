"""Multi-aspect bucketing end to end: plan, assign, schedule, resize specs.

Shows the log-aspect assignment rule, the remaining-count-weighted
bucket draw, and the resolution condition each iteration carries.
"""

from roomforge.bucketing import assign_bucket, generate_buckets, plan_epoch, resize_spec
from roomforge.rng import Xoshiro256StarStar

plan = generate_buckets(quantum=64, min_side=448, max_side=832, max_pixels=640 * 640)
print(f"{len(plan.buckets)} buckets under 640x640 pixels:")
for b in plan.buckets:
    print(f"  #{b.id}: {b.width}x{b.height}  (aspect {b.aspect:.3f})")
print(f"max adjacent aspect ratio r = {plan.max_adjacent_aspect_ratio():.4f}")

rng = Xoshiro256StarStar(7)
images = [(f"img-{k:03d}", 256 + rng.next_below(1536), 256 + rng.next_below(1536)) for k in range(200)]
assignments = [assign_bucket(w, h, plan, image_id=i) for i, w, h in images]

example_id, ew, eh = images[0]
a = assignments[0]
bucket = plan.bucket(a.bucket_id)
spec = resize_spec(ew, eh, bucket, image_id=example_id)
print(f"\n{example_id} is {ew}x{eh} -> bucket {bucket.width}x{bucket.height}, "
      f"log-aspect distance {a.distance:.4f}, resize distortion {spec.distortion:.4f}, crop={spec.crop}")

schedule = plan_epoch(assignments, plan, batch_size=16, seed=20240817)
print(f"\nepoch: {len(schedule.iterations)} iterations covering {len(assignments)} images exactly once")
for it in schedule.iterations[:4]:
    b = plan.bucket(it.bucket_id)
    cond = it.conditions[0]
    print(f"  iter {it.index}: bucket {b.width}x{b.height}, {len(it.image_ids)} images, "
          f"condition (target {cond.target_width}x{cond.target_height}, "
          f"orig {cond.original_width}x{cond.original_height})")

rerun = plan_epoch(assignments, plan, batch_size=16, seed=20240817)
print("\nsame seed reruns bit-identically:", rerun == schedule)

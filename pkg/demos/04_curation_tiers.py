"""Designer ratings to nested training tiers: screen > curated > premium."""

from roomforge.curation import CurationConfig, RatingBallot, aggregate_ratings, build_layers
from roomforge.filtering import default_schema, load_rules
from roomforge.manifest import ImageRecord
from roomforge.rng import Xoshiro256StarStar

schema = default_schema()
strict = load_rules("src/roomforge/filtering/data/strict_rules.json", schema)

rng = Xoshiro256StarStar(41)
records = []
for i in range(200):
    records.append(ImageRecord(
        id=f"img-{i:04d}", width=1024, height=1024,
        labels={
            "low_quality.watermark": False, "low_quality.stitched": False,
            "low_quality.not_indoor": False,
            "basic.resolution_min_side": 512 + rng.next_below(1024),
            "basic.clarity": 40 + rng.next_below(60),
            "basic.brightness": 40 + rng.next_below(40), "basic.saturation": 30 + rng.next_below(50),
            "aesthetics.color_mismatch": False, "aesthetics.outdated_style": False,
            "aesthetics.realism": 40 + rng.next_below(60),
            "composition.subject_proportion": 0.4 + rng.next_below(40) / 100,
            "composition.over_focus": False, "composition.occlusion": False,
            "composition.camera_angle": "eye_level",
            "content.furniture_count": 3 + rng.next_below(10),
            "content.people_present": False, "content.animal_present": False,
            "content.reserved_a": False, "content.reserved_b": False,
        },
    ))

# three designers rate a subset on the 1-5 beauty scale
ballots = []
for i in range(0, 200, 4):
    for rater in range(3):
        ballots.append(RatingBallot(f"img-{i:04d}", f"designer-{rater}", 1 + rng.next_below(5)))
rated = aggregate_ratings(ballots)
print(f"{len(ballots)} ballots over {len(rated)} images; "
      f"example mean {rated[0].image_id} = {rated[0].mean_level:.2f} from {rated[0].count} ballots")

config = CurationConfig(curated_cap=80, premium_cap=5000, premium_fraction=0.10)
layered = build_layers(records, strict, rated, config)
print(f"\ntiers: screen {len(layered.screen)} > curated {len(layered.curated)} "
      f"> premium {len(layered.premium)}")
print("nesting holds:", layered.premium <= layered.curated <= layered.screen)
print("strict-profile drop reasons:", dict(layered.curated_drop_report.reasons))
print("premium picks:", sorted(layered.premium))

"""Screen a small synthetic manifest with the default discrimination rules.

Walks through the full flow: load the 5-group / 19-label schema, parse
the shipped rule set, evaluate a few label sets by hand, then screen a
manifest stream and print the drop report.
"""

import json

from roomforge.filtering import default_schema, evaluate_image, filter_manifest, parse_rules

schema = default_schema()
print(f"schema: {len(schema.groups)} primary groups, {len(schema.labels)} secondary labels")
for group, name in schema.groups.items():
    members = [k.split(".", 1)[1] for k in schema.labels if k.startswith(group + ".")]
    print(f"  {name}: {', '.join(members)}")

rules_text = open("src/roomforge/filtering/data/default_rules.json").read()
rules = parse_rules(rules_text, schema)
print(f"\nparsed {len(rules.rules)} rules; first: {rules.rules[0].source!r}")

clean = {
    "low_quality.watermark": False, "low_quality.stitched": False, "low_quality.not_indoor": False,
    "basic.resolution_min_side": 1024, "basic.clarity": 82, "basic.brightness": 50,
    "basic.saturation": 55, "aesthetics.color_mismatch": False, "aesthetics.outdated_style": False,
    "aesthetics.realism": 88, "composition.subject_proportion": 0.55, "composition.over_focus": False,
    "composition.occlusion": False, "composition.camera_angle": "eye_level",
    "content.furniture_count": 7, "content.people_present": False, "content.animal_present": False,
    "content.reserved_a": False, "content.reserved_b": False,
}

print("\nclean image  ->", evaluate_image(clean, rules))
watermarked = dict(clean, **{"low_quality.watermark": True})
print("watermarked  ->", evaluate_image(watermarked, rules))
tiny = dict(clean, **{"basic.resolution_min_side": 300})
print("300px image  ->", evaluate_image(tiny, rules))

# a manifest with one malformed line mixed in
lines = []
for i in range(10):
    labels = dict(clean, **{"low_quality.watermark": i % 4 == 0})
    lines.append(json.dumps({"id": f"img-{i}", "width": 1024, "height": 768, "labels": labels}))
lines.insert(5, "{oops, not json")

kept, report = filter_manifest(lines, rules)
print(f"\nmanifest of {len(lines)} lines -> kept {report.kept}, dropped {report.dropped}, "
      f"malformed {report.malformed} (line {report.malformed_lines})")
print("drop reasons:", report.reasons)

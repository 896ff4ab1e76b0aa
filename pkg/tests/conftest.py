import json
from pathlib import Path

import pytest

from roomforge.captioning import default_vocabulary
from roomforge.filtering import default_schema, load_rules

DATA_DIR = Path(__file__).parent / "data"
PKG_DATA = Path(__file__).parent.parent / "src" / "roomforge"


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture(scope="session")
def default_rules(schema):
    return load_rules(str(PKG_DATA / "filtering" / "data" / "default_rules.json"), schema)


@pytest.fixture(scope="session")
def strict_rules(schema):
    return load_rules(str(PKG_DATA / "filtering" / "data" / "strict_rules.json"), schema)


@pytest.fixture(scope="session")
def vocab():
    return default_vocabulary()


@pytest.fixture(scope="session")
def golden_captions():
    rows = []
    with open(DATA_DIR / "tokenizer" / "golden_captions.jsonl", encoding="utf-8") as fh:
        for line in fh:
            rows.append(json.loads(line))
    return rows


def benign_labels(**overrides):
    """A label set that fires no default rule."""
    labels = {
        "low_quality.watermark": False,
        "low_quality.stitched": False,
        "low_quality.not_indoor": False,
        "basic.resolution_min_side": 1024,
        "basic.clarity": 80,
        "basic.brightness": 55,
        "basic.saturation": 50,
        "aesthetics.color_mismatch": False,
        "aesthetics.outdated_style": False,
        "aesthetics.realism": 85,
        "composition.subject_proportion": 0.6,
        "composition.over_focus": False,
        "composition.occlusion": False,
        "composition.camera_angle": "eye_level",
        "content.furniture_count": 6,
        "content.people_present": False,
        "content.animal_present": False,
        "content.reserved_a": False,
        "content.reserved_b": False,
    }
    labels.update(overrides)
    return labels

"""Quality-label schema, discrimination rules and manifest screening."""

from .engine import DropReport, FilterVerdict, evaluate_image, filter_manifest, filter_records
from .rules import (
    MissingLabelError,
    Rule,
    RuleError,
    RuleSet,
    RuleSyntaxError,
    load_rules,
    parse_predicate,
    parse_rules,
)
from .schema import (
    LabelDef,
    LabelSchema,
    LabelValueError,
    SchemaError,
    UnknownLabelError,
    default_schema,
    load_schema,
)

__all__ = [
    "DropReport",
    "FilterVerdict",
    "evaluate_image",
    "filter_manifest",
    "filter_records",
    "MissingLabelError",
    "Rule",
    "RuleError",
    "RuleSet",
    "RuleSyntaxError",
    "load_rules",
    "parse_predicate",
    "parse_rules",
    "LabelDef",
    "LabelSchema",
    "LabelValueError",
    "SchemaError",
    "UnknownLabelError",
    "default_schema",
    "load_schema",
]

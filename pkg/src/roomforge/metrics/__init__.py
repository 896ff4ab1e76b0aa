"""The seven automated evaluation metrics over precomputed artifacts."""

from .features import FeatureFileError, FeatureSet, read_features, write_features
from .fid import FidError, GaussianStats, fid_from_features, frechet_distance, gaussian_stats, sqrtm_psd
from .rates import (
    DetectionRecord,
    MetricInputError,
    PromptExpectation,
    aesthetic_score,
    clip_score,
    follow_rate,
    repetition_rate,
    style_accuracy,
)
from .report import (
    DIRECTIONS,
    METRIC_NAMES,
    MetricInputs,
    MetricReport,
    MetricVocabulary,
    default_metric_vocabulary,
    load_metric_vocabulary,
    metric_report,
)

__all__ = [
    "FeatureFileError",
    "FeatureSet",
    "read_features",
    "write_features",
    "FidError",
    "GaussianStats",
    "fid_from_features",
    "frechet_distance",
    "gaussian_stats",
    "sqrtm_psd",
    "DetectionRecord",
    "MetricInputError",
    "PromptExpectation",
    "aesthetic_score",
    "clip_score",
    "follow_rate",
    "repetition_rate",
    "style_accuracy",
    "DIRECTIONS",
    "METRIC_NAMES",
    "MetricInputs",
    "MetricReport",
    "MetricVocabulary",
    "default_metric_vocabulary",
    "load_metric_vocabulary",
    "metric_report",
]

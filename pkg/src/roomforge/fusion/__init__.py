"""Checkpoint archive parsing, canonical writing, and weighted merging."""

from .archive import (
    ArchiveError,
    TensorArchive,
    TensorEntry,
    read_archive_file,
    read_tensor_archive,
    write_archive_file,
    write_tensor_archive,
)
from .merge import CompatReport, MergeError, MergeInput, MergeRecipe, merge, validate_compat

__all__ = [
    "ArchiveError",
    "TensorArchive",
    "TensorEntry",
    "read_archive_file",
    "read_tensor_archive",
    "write_archive_file",
    "write_tensor_archive",
    "CompatReport",
    "MergeError",
    "MergeInput",
    "MergeRecipe",
    "merge",
    "validate_compat",
]

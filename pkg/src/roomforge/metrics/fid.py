"""Frechet distance between Gaussians fitted to feature distributions.

d^2 = ||mu_a - mu_b||^2 + Tr(C_a + C_b - 2 (C_a C_b)^{1/2})

The cross-covariance square root is evaluated in its symmetric form
sqrt(sqrt(C_a) C_b sqrt(C_a)) via eigendecomposition, which keeps the
computation real for positive semi-definite sample covariances.
Eigenvalues are clamped at zero before the square root and the final
distance is clamped at zero, so near-singular covariances from small
samples cannot produce negative or complex outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import FeatureSet

SYMMETRY_TOLERANCE = 1e-9


class FidError(ValueError):
    pass


@dataclass(frozen=True)
class GaussianStats:
    mean: np.ndarray         # (d,)
    covariance: np.ndarray   # (d, d), symmetric

    def __post_init__(self):
        cov = self.covariance
        if cov.shape != (self.mean.shape[0], self.mean.shape[0]):
            raise FidError(f"covariance shape {cov.shape} mismatches mean {self.mean.shape}")
        asym = np.abs(cov - cov.T).max() if cov.size else 0.0
        if asym > SYMMETRY_TOLERANCE:
            raise FidError(f"covariance asymmetric by {asym:g}")

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def gaussian_stats(features: FeatureSet) -> GaussianStats:
    """Sample mean and unbiased covariance (divisor n-1), symmetrized."""
    if features.n < 2:
        raise FidError(f"need at least 2 samples for covariance, got {features.n}")
    x = features.data
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (features.n - 1)
    cov = (cov + cov.T) / 2.0
    return GaussianStats(mean=mean, covariance=cov)


def sqrtm_psd(matrix: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition, clamped at 0."""
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    return (eigenvectors * np.sqrt(eigenvalues)) @ eigenvectors.T


def frechet_distance(a: GaussianStats, b: GaussianStats) -> float:
    if a.dim != b.dim:
        raise FidError(f"dimension mismatch: {a.dim} vs {b.dim}")
    diff = a.mean - b.mean
    sqrt_a = sqrtm_psd(a.covariance)
    inner = sqrt_a @ b.covariance @ sqrt_a
    inner = (inner + inner.T) / 2.0
    eigenvalues = np.linalg.eigvalsh(inner)
    trace_sqrt = np.sqrt(np.clip(eigenvalues, 0.0, None)).sum()
    distance = float(diff @ diff + np.trace(a.covariance) + np.trace(b.covariance) - 2.0 * trace_sqrt)
    return max(distance, 0.0)


def fid_from_features(real: FeatureSet, generated: FeatureSet) -> float:
    return frechet_distance(gaussian_stats(real), gaussian_stats(generated))

"""Principal component analysis of aligned curves in the square-root domain.

After elastic alignment the residual (amplitude) variability of a sample of
curves q_i lives in the linear space of square-root slope fields.  The sample
covariance operator is diagonalised under the trapezoid-weighted L2 inner
product; eigendirections are extracted from an SVD of the weighted, centred
data matrix, so at most n - 1 components carry variance.  Component paths
(mean plus a multiple of a direction, mapped back to a curve) visualise each
mode of variation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .elastic import AlignmentResult, _trapezoid_weights, inverse_srvf
from .errors import DataError
from .landscape import Landscape

__all__ = [
    "AmplitudeCovariance",
    "PcaModel",
    "amplitude_covariance",
    "amplitude_pca",
    "pc_scores",
    "pc_path",
]


def _as_curve_stack(source) -> tuple[np.ndarray, float, int]:
    """Normalise input to ((n, K, T) srvf stack, scale_s, degree)."""
    if isinstance(source, AlignmentResult):
        return np.asarray(source.aligned_srvf, np.float64), source.scale_s, \
            source.degree
    arr = np.asarray(source, np.float64)
    if arr.ndim != 3:
        raise DataError("expected an (n, K, T) stack of aligned curves")
    return arr, 1.0, 1


@dataclass
class AmplitudeCovariance:
    """Factored covariance of centred curves under the weighted inner product."""

    mean: np.ndarray        # (K, T)
    centered: np.ndarray    # (n, K, T)
    weights: np.ndarray     # (T,) trapezoid quadrature weights
    scale_s: float = 1.0
    degree: int = 1

    @property
    def n(self) -> int:
        return self.centered.shape[0]

    @property
    def K(self) -> int:
        return self.centered.shape[1]

    @property
    def T(self) -> int:
        return self.centered.shape[2]

    def dense(self) -> np.ndarray:
        """Explicit (K*T, K*T) covariance matrix (small problems only)."""
        flat = self.centered.reshape(self.n, -1)
        return flat.T @ flat / max(self.n - 1, 1)

    def trace(self) -> float:
        """Total variance: mean squared weighted distance to the mean."""
        sq = np.sum(self.centered ** 2, axis=1)          # (n, T)
        return float(np.sum(sq * self.weights[None, :]) / max(self.n - 1, 1))


def amplitude_covariance(source) -> AmplitudeCovariance:
    stack, scale_s, degree = _as_curve_stack(source)
    if stack.shape[0] < 2:
        raise DataError("covariance needs at least two curves")
    mean = stack.mean(axis=0)
    return AmplitudeCovariance(
        mean=mean, centered=stack - mean[None],
        weights=_trapezoid_weights(stack.shape[2]),
        scale_s=scale_s, degree=degree)


@dataclass
class PcaModel:
    mean_srvf: np.ndarray       # (K, T)
    directions: np.ndarray      # (B, K, T), orthonormal under the weights
    variances: np.ndarray       # (B,) descending
    total_variance: float
    weights: np.ndarray         # (T,)
    scale_s: float = 1.0
    degree: int = 1

    @property
    def B(self) -> int:
        return self.directions.shape[0]

    @property
    def fractions(self) -> np.ndarray:
        total = self.total_variance
        if total <= 0.0:
            return np.zeros(self.B)
        return self.variances / total

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        return float(np.sum(np.sum(f * g, axis=0) * self.weights))


def amplitude_pca(source, n_components: int = 2) -> PcaModel:
    """Leading eigendirections of the amplitude covariance.

    ``source`` may be an AlignmentResult, an (n, K, T) stack of aligned
    curves, or an AmplitudeCovariance.  The component count is capped at
    n - 1.  Each direction's sign makes its inner product with the first
    centred curve non-negative.
    """
    if isinstance(source, AmplitudeCovariance):
        cov = source
    else:
        cov = amplitude_covariance(source)
    if n_components < 1:
        raise DataError("n_components must be >= 1")
    n, K, T = cov.n, cov.K, cov.T
    B = min(n_components, n - 1, K * T)
    w = cov.weights
    root_w = np.sqrt(np.tile(w, K))
    flat = cov.centered.reshape(n, K * T)
    weighted = flat * root_w[None, :]
    _, sing, vt = np.linalg.svd(weighted, full_matrices=False)
    variances = sing ** 2 / (n - 1)
    dirs = (vt[:B] / root_w[None, :]).reshape(B, K, T)
    # sign convention: positive inner product with the first centred curve
    for b in range(B):
        ip = float(np.sum(np.sum(dirs[b] * cov.centered[0], axis=0) * w))
        if ip < 0.0:
            dirs[b] = -dirs[b]
    return PcaModel(
        mean_srvf=cov.mean.copy(), directions=dirs,
        variances=variances[:B].copy(), total_variance=cov.trace(),
        weights=w, scale_s=cov.scale_s, degree=cov.degree)


def pc_scores(model: PcaModel, source) -> np.ndarray:
    """Weighted projections of each centred curve on the model directions."""
    stack, _, _ = _as_curve_stack(source)
    if stack.shape[1:] != model.mean_srvf.shape:
        raise DataError("curve shape does not match the model")
    centered = stack - model.mean_srvf[None]
    # (n, K, T) x (B, K, T) -> (n, B) with quadrature over T
    return np.einsum("nkt,bkt,t->nb", centered, model.directions,
                     model.weights, optimize=True)


def pc_path(model: PcaModel, component: int, nu: float) -> Landscape:
    """Curve at mean + nu * sqrt(variance) along one component direction."""
    if not 0 <= component < model.B:
        raise DataError(f"component must be in [0, {model.B})")
    q = model.mean_srvf + nu * np.sqrt(model.variances[component]) \
        * model.directions[component]
    return inverse_srvf(q, model.scale_s, model.degree)

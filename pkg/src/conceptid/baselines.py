"""Classical clustering baselines: k-means (Lloyd) and full-covariance GMM (EM).

Both run from k-means++ seeding, are deterministic per seed, and expose the
truncation variants that drop weakly-assigned samples: a radius cut relative
to the globally largest sample-to-own-center distance, and a responsibility
threshold on the GMM posterior.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass, field
from scipy.linalg import cholesky, solve_triangular
from scipy.special import logsumexp

from .concept_core import UNASSIGNED, Labeling
from .errors import ConfigError

COV_REG_FRACTION = 1e-6  # of per-feature variance, added to covariance diagonals


def _as_matrix(data) -> np.ndarray:
    values = data.values if hasattr(data, "values") else data
    x = np.asarray(values, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 1:
        raise ConfigError(f"expected a (n_samples, n_features) matrix, got shape {x.shape}")
    return x


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, (n_samples, n_centers)."""
    return np.maximum(
        (x * x).sum(1)[:, None] - 2.0 * x @ centers.T + (centers * centers).sum(1)[None, :],
        0.0,
    )


def _kmeans_pp_seeds(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: each next center drawn proportional to squared distance."""
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    closest = _sq_dists(x, centers[:1]).ravel()
    for j in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = rng.choice(n, p=closest / total)
        else:
            idx = rng.integers(n)
        centers[j] = x[idx]
        closest = np.minimum(closest, _sq_dists(x, centers[j : j + 1]).ravel())
    return centers


@dataclass(frozen=True)
class KmeansResult:
    centers: np.ndarray
    labels: Labeling
    inertia: float
    inertia_history: np.ndarray = field(repr=False)
    n_iter: int = 0


def kmeans(data, k: int, seed: int = 0, max_iter: int = 300) -> KmeansResult:
    """Lloyd iterations from k-means++ seeding until the assignment is stable.

    Empty clusters are repaired by reseeding the empty center at the sample
    currently farthest from its own center.
    """
    x = _as_matrix(data)
    n = x.shape[0]
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if k > n:
        raise ConfigError(f"k={k} exceeds the {n} available samples")
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_seeds(x, k, rng)

    labels = np.zeros(n, dtype=np.int64)
    history = []
    for iteration in range(max_iter):
        d2 = _sq_dists(x, centers)
        new_labels = d2.argmin(axis=1)
        own = d2[np.arange(n), new_labels]
        for j in range(k):
            if not np.any(new_labels == j):
                far = int(own.argmax())
                centers[j] = x[far]
                new_labels[far] = j
                own[far] = 0.0
        history.append(float(own.sum()))
        converged = iteration > 0 and np.array_equal(new_labels, labels)
        labels = new_labels
        if converged:
            break
        for j in range(k):
            centers[j] = x[labels == j].mean(axis=0)

    d2 = _sq_dists(x, centers)
    inertia = float(d2[np.arange(n), labels].sum())
    return KmeansResult(
        centers=centers,
        labels=Labeling(labels, k),
        inertia=inertia,
        inertia_history=np.asarray(history),
        n_iter=len(history),
    )


@dataclass(frozen=True)
class GmmResult:
    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    responsibilities: np.ndarray = field(repr=False)
    log_likelihood: float = 0.0
    labels: Labeling = None
    loglik_history: np.ndarray = field(default=None, repr=False)
    n_iter: int = 0

    @property
    def centers(self) -> np.ndarray:
        """Alias so radius truncation treats component means like k-means centers."""
        return self.means


def _log_gaussians(x: np.ndarray, means: np.ndarray, covs: np.ndarray) -> np.ndarray:
    """log N(x | mu_j, Sigma_j) for every sample and component, via Cholesky."""
    n, d = x.shape
    out = np.empty((n, means.shape[0]))
    for j in range(means.shape[0]):
        lower = cholesky(covs[j], lower=True)
        solved = solve_triangular(lower, (x - means[j]).T, lower=True)
        log_det = 2.0 * np.log(np.diag(lower)).sum()
        out[:, j] = -0.5 * (d * np.log(2 * np.pi) + log_det + (solved * solved).sum(axis=0))
    return out


def gmm_em(data, k: int, seed: int = 0, max_iter: int = 500, tol: float = 1e-8) -> GmmResult:
    """Full-covariance EM from k-means++-seeded means.

    Stops when the total log-likelihood improves by less than ``tol``.
    Covariances get a variance-scaled diagonal ridge every M-step, so
    component collapse degrades gracefully instead of raising.
    """
    x = _as_matrix(data)
    n, d = x.shape
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if k > n:
        raise ConfigError(f"k={k} exceeds the {n} available samples")
    rng = np.random.default_rng(seed)

    reg = COV_REG_FRACTION * x.var(axis=0)
    reg = np.where(reg > 0, reg, COV_REG_FRACTION)
    means = _kmeans_pp_seeds(x, k, rng)
    base_cov = np.cov(x, rowvar=False, bias=True).reshape(d, d) + np.diag(reg)
    covs = np.repeat(base_cov[None, :, :], k, axis=0)
    weights = np.full(k, 1.0 / k)

    history = []
    log_resp = None
    for iteration in range(max_iter + 1):
        joint = _log_gaussians(x, means, covs) + np.log(weights)
        norm = logsumexp(joint, axis=1)
        history.append(float(norm.sum()))
        log_resp = joint - norm[:, None]
        done = iteration == max_iter or (len(history) > 1 and history[-1] - history[-2] < tol)
        if done:
            break

        resp = np.exp(log_resp)
        counts = resp.sum(axis=0)
        counts = np.maximum(counts, 10 * np.finfo(float).eps)
        weights = counts / counts.sum()
        means = (resp.T @ x) / counts[:, None]
        for j in range(k):
            centered = x - means[j]
            covs[j] = (centered.T * resp[:, j]) @ centered / counts[j] + np.diag(reg)

    resp = np.exp(log_resp)
    labels = np.asarray(log_resp.argmax(axis=1), dtype=np.int64)
    return GmmResult(
        weights=weights,
        means=means,
        covariances=covs,
        responsibilities=resp,
        log_likelihood=history[-1],
        labels=Labeling(labels, k),
        loglik_history=np.asarray(history),
        n_iter=len(history),
    )


def truncate_by_radius(result, data, fraction: float) -> Labeling:
    """Keep only samples within ``fraction`` of the largest own-center distance.

    The reference distance is the global maximum over all assigned samples of
    the distance to their own cluster center; everything farther than
    ``fraction`` times it becomes unassigned.
    """
    if not 0.0 < fraction <= 1.0:
        raise ConfigError(f"fraction must lie in (0, 1], got {fraction}")
    x = _as_matrix(data)
    labels = result.labels.labels
    centers = result.centers
    assigned = labels != UNASSIGNED
    dist = np.full(labels.shape, np.inf)
    dist[assigned] = np.linalg.norm(x[assigned] - centers[labels[assigned]], axis=1)
    d_max = dist[assigned].max()
    keep = assigned & (dist <= fraction * d_max)
    out = np.where(keep, labels, UNASSIGNED)
    return Labeling(out, result.labels.n_concepts)


def truncate_by_responsibility(result: GmmResult, threshold: float) -> Labeling:
    """Keep only samples whose winning posterior responsibility exceeds ``threshold``."""
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must lie in (0, 1), got {threshold}")
    best = result.responsibilities.max(axis=1)
    labels = np.where(best > threshold, result.labels.labels, UNASSIGNED)
    return Labeling(labels, result.labels.n_concepts)

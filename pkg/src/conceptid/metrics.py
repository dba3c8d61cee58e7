"""Information-theoretic and cluster-validity evaluation.

Mutual information between subspaces is estimated with the k-nearest
neighbor estimator of Kraskov, Stoegbauer & Grassberger (2004), variant 1:

    I(X;Y) = psi(k) + psi(N) - < psi(n_x + 1) + psi(n_y + 1) >

with the k-th neighbor distance taken in the joint space under the max
norm and n_x, n_y counting the strictly closer neighbors in each marginal.
Estimates are in nats. Because the estimator is undefined on tied
coordinates, inputs receive a deterministic uniform jitter of amplitude
1e-10 times the column standard deviation; the jitter stream is keyed by
the jitter seed and a checksum of the column bytes, so the estimate is
exactly symmetric in its arguments.

Significance is assessed by permutation testing: the rows of Y are
shuffled wholesale (preserving within-Y dependence) and the p-value is the
add-one-corrected fraction of surrogate estimates at least as large as the
observed one.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist
from scipy.special import digamma

from .concept_core import UNASSIGNED, Labeling
from .dataset import Dataset, SubspaceConfig, project
from .errors import ConfigError, UndefinedMetricError

JITTER_FRACTION = 1e-10


@dataclass(frozen=True)
class MiEstimate:
    value: float
    k_neighbors: int
    n_samples: int

    def __post_init__(self):
        if self.n_samples <= self.k_neighbors:
            raise ConfigError(f"need more than k={self.k_neighbors} samples, got {self.n_samples}")


def _as_block(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError(f"expected a vector or sample matrix, got shape {x.shape}")
    return x


def _jittered(block: np.ndarray, jitter_seed: int) -> np.ndarray:
    """Tie-breaking jitter, keyed by column content so argument order is irrelevant."""
    out = block.copy()
    for j in range(block.shape[1]):
        col = np.ascontiguousarray(block[:, j])
        std = col.std()
        if std == 0:
            raise ValueError(f"column {j} has zero variance; mutual information is undefined")
        key = zlib.crc32(col.tobytes())
        rng = np.random.default_rng([int(jitter_seed) & (2**64 - 1), key])
        out[:, j] = col + JITTER_FRACTION * std * rng.random(col.size)
    return out


def _strict_neighbor_counts(block: np.ndarray, radius: np.ndarray) -> np.ndarray:
    """Number of other points within max-norm distance < eps of each point.

    ``radius`` must already be shrunk below eps (nextafter), so counting the
    closed ball gives the strict count. 1-D blocks use a sorted search;
    higher dimensions a k-d tree.
    """
    if block.shape[1] == 1:
        values = block[:, 0]
        order = np.sort(values)
        hi = np.searchsorted(order, values + radius, side="right")
        lo = np.searchsorted(order, values - radius, side="left")
        return hi - lo - 1
    tree = cKDTree(block)
    counts = tree.query_ball_point(block, radius, p=np.inf, return_length=True)
    return np.asarray(counts, dtype=np.int64) - 1


def ksg_mi(x, y, k: int = 4, jitter_seed: int = 0) -> MiEstimate:
    """KSG variant-1 mutual information between paired sample blocks, in nats."""
    x = _as_block(x)
    y = _as_block(y)
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"sample counts differ: {x.shape[0]} vs {y.shape[0]}")
    n = x.shape[0]
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if n <= k:
        raise ConfigError(f"need more than k={k} samples, got {n}")

    xj = _jittered(x, jitter_seed)
    yj = _jittered(y, jitter_seed)
    joint = np.hstack([xj, yj])
    eps = cKDTree(joint).query(joint, k=k + 1, p=np.inf)[0][:, k]
    radius = np.nextafter(eps, 0.0)
    n_x = _strict_neighbor_counts(xj, radius)
    n_y = _strict_neighbor_counts(yj, radius)
    value = digamma(k) + digamma(n) - float(np.mean(digamma(n_x + 1) + digamma(n_y + 1)))
    return MiEstimate(value=float(value), k_neighbors=k, n_samples=n)


@dataclass(frozen=True)
class PermutationTestResult:
    observed: MiEstimate
    null_values: np.ndarray = field(repr=False)
    p_value: float = 0.0

    @property
    def n_perm(self) -> int:
        return self.null_values.size


def mi_permutation_test(x, y, k: int = 4, n_perm: int = 200, seed: int = 0, jitter_seed: int = 0) -> PermutationTestResult:
    """Shuffle-based independence test for the KSG estimate.

    Surrogate ``p`` permutes the rows of Y with its own stream derived from
    (seed, p), so results do not depend on evaluation order. The p-value is
    (#{null >= observed} + 1) / (n_perm + 1).
    """
    if n_perm < 1:
        raise ConfigError(f"n_perm must be >= 1, got {n_perm}")
    x = _as_block(x)
    y = _as_block(y)
    observed = ksg_mi(x, y, k=k, jitter_seed=jitter_seed)
    null_values = np.empty(n_perm)
    for p in range(n_perm):
        rng = np.random.default_rng([int(seed) & (2**64 - 1), p])
        perm = rng.permutation(y.shape[0])
        null_values[p] = ksg_mi(x, y[perm], k=k, jitter_seed=jitter_seed).value
    p_value = (int(np.count_nonzero(null_values >= observed.value)) + 1) / (n_perm + 1)
    null_values.setflags(write=False)
    return PermutationTestResult(observed=observed, null_values=null_values, p_value=p_value)


def _labels_array(labels) -> np.ndarray:
    if isinstance(labels, Labeling):
        return labels.labels
    return np.asarray(labels, dtype=np.int64).reshape(-1)


def silhouette(points, labels) -> float:
    """Mean silhouette coefficient over assigned samples, Euclidean distance.

    Unassigned samples are excluded entirely; samples in singleton clusters
    contribute 0. Undefined (raises) with fewer than two non-empty clusters.
    """
    x = _as_block(points)
    lab = _labels_array(labels)
    if lab.size != x.shape[0]:
        raise ValueError("labels and points disagree on sample count")
    keep = lab != UNASSIGNED
    x = x[keep]
    lab = lab[keep]
    clusters, lab_idx = np.unique(lab, return_inverse=True)
    if clusters.size < 2:
        raise UndefinedMetricError(f"silhouette needs >= 2 non-empty clusters, got {clusters.size}")
    n = x.shape[0]
    sizes = np.bincount(lab_idx)

    scores = np.empty(n)
    chunk = max(1, int(2**22 // max(n, 1)))
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        d = cdist(x[start:stop], x)
        sums = np.zeros((stop - start, clusters.size))
        for c in range(clusters.size):
            sums[:, c] = d[:, lab_idx == c].sum(axis=1)
        rows = np.arange(stop - start)
        own = lab_idx[start:stop]
        own_size = sizes[own]
        with np.errstate(invalid="ignore", divide="ignore"):
            a = sums[rows, own] / np.maximum(own_size - 1, 1)
            mean_other = sums / sizes[None, :]
            mean_other[rows, own] = np.inf
            b = mean_other.min(axis=1)
            s = (b - a) / np.maximum(np.maximum(a, b), np.finfo(float).tiny)
        s[own_size == 1] = 0.0
        scores[start:stop] = s
    return float(scores.mean())


def overlap_score(points, labels) -> float:
    """Fraction of assigned samples whose nearest assigned neighbor has another label.

    0 means the labeled groups are perfectly separated in this projection.
    """
    x = _as_block(points)
    lab = _labels_array(labels)
    if lab.size != x.shape[0]:
        raise ValueError("labels and points disagree on sample count")
    keep = lab != UNASSIGNED
    x = x[keep]
    lab = lab[keep]
    n = x.shape[0]
    if n < 2:
        raise UndefinedMetricError(f"overlap score needs >= 2 assigned samples, got {n}")
    tree = cKDTree(x)
    _, idx = tree.query(x, k=2)
    rows = np.arange(n)
    # with duplicate coordinates the self index may land in either slot
    neighbor = np.where(idx[:, 1] == rows, idx[:, 0], idx[:, 1])
    return float(np.count_nonzero(lab[neighbor] != lab[rows]) / n)


@dataclass(frozen=True)
class MethodReport:
    """Evaluation of one labeling: MI per subspace pair, silhouettes, overlaps."""

    n_assigned: int
    insufficient: bool
    mi: dict
    silhouette_joint: float | None
    silhouette_subspace: dict
    overlap_subspace: dict

    def to_json_dict(self) -> dict:
        return {
            "n_assigned": self.n_assigned,
            "insufficient": self.insufficient,
            "mi": {
                pair: {"value": est.value, "p_value": p, "k": est.k_neighbors, "n_samples": est.n_samples}
                for pair, (est, p) in self.mi.items()
            },
            "silhouette_joint": self.silhouette_joint,
            "silhouette_subspace": dict(self.silhouette_subspace),
            "overlap_subspace": dict(self.overlap_subspace),
        }


@dataclass(frozen=True)
class ConsistencyReport:
    methods: dict
    subspace_names: tuple[str, ...]
    pair_names: tuple[str, ...]
    k_neighbors: int
    n_perm: int
    alpha: float
    seed: int
    jitter_seed: int

    def to_json_dict(self) -> dict:
        return {
            "subspaces": list(self.subspace_names),
            "pairs": list(self.pair_names),
            "k_neighbors": self.k_neighbors,
            "n_perm": self.n_perm,
            "alpha": self.alpha,
            "seed": self.seed,
            "jitter_seed": self.jitter_seed,
            "methods": {name: rep.to_json_dict() for name, rep in self.methods.items()},
        }

    def to_csv_rows(self) -> list[list]:
        """Flat rows: method, metric, scope, value."""
        rows = [["method", "metric", "scope", "value"]]
        for name, rep in self.methods.items():
            rows.append([name, "n_assigned", "all", rep.n_assigned])
            rows.append([name, "insufficient", "all", int(rep.insufficient)])
            for pair, (est, p) in rep.mi.items():
                rows.append([name, "mi_nats", pair, est.value])
                rows.append([name, "mi_p_value", pair, p])
            if rep.silhouette_joint is not None:
                rows.append([name, "silhouette", "joint", rep.silhouette_joint])
            for sub, val in rep.silhouette_subspace.items():
                rows.append([name, "silhouette", sub, val])
            for sub, val in rep.overlap_subspace.items():
                rows.append([name, "overlap", sub, val])
        return rows


def consistency_report(
    dataset: Dataset,
    config: SubspaceConfig,
    labelings: dict,
    k: int = 4,
    n_perm: int = 200,
    seed: int = 0,
    jitter_seed: int = 0,
    alpha: float = 0.05,
) -> ConsistencyReport:
    """Evaluate several labelings of one dataset against the subspace partition.

    For every labeling (restricted to its assigned samples): KSG MI plus
    permutation p-value for each subspace pair, silhouette in the joint
    space and per subspace, and the overlap score per subspace. Labelings
    with fewer than k+1 assigned samples are flagged insufficient and carry
    no estimates.
    """
    pairs = list(combinations(range(config.n_subspaces), 2))
    pair_names = tuple(f"{config.names[i]}|{config.names[j]}" for i, j in pairs)
    projections = [project(dataset, config, i) for i in range(config.n_subspaces)]

    methods = {}
    for name, labeling in labelings.items():
        if isinstance(labeling, Labeling):
            lab = labeling
        else:
            arr = np.asarray(labeling, dtype=np.int64)
            lab = Labeling(arr, max(int(arr.max()) + 1, 1))
        if lab.n_samples != dataset.n_samples:
            raise ValueError(f"labeling {name!r} has {lab.n_samples} entries for {dataset.n_samples} samples")
        assigned = lab.assigned_mask
        n_assigned = int(np.count_nonzero(assigned))
        if n_assigned < k + 1:
            methods[name] = MethodReport(
                n_assigned=n_assigned, insufficient=True, mi={},
                silhouette_joint=None, silhouette_subspace={}, overlap_subspace={},
            )
            continue

        mi = {}
        for (i, j), pname in zip(pairs, pair_names):
            test = mi_permutation_test(
                projections[i][assigned], projections[j][assigned],
                k=k, n_perm=n_perm, seed=seed, jitter_seed=jitter_seed,
            )
            mi[pname] = (test.observed, test.p_value)

        def _try_silhouette(points):
            try:
                return silhouette(points[assigned], lab.labels[assigned])
            except UndefinedMetricError:
                return None

        sil_sub = {config.names[i]: _try_silhouette(projections[i]) for i in range(config.n_subspaces)}
        overlap = {
            config.names[i]: overlap_score(projections[i][assigned], lab.labels[assigned])
            for i in range(config.n_subspaces)
        }
        methods[name] = MethodReport(
            n_assigned=n_assigned,
            insufficient=False,
            mi=mi,
            silhouette_joint=_try_silhouette(dataset.values),
            silhouette_subspace=sil_sub,
            overlap_subspace=overlap,
        )
    return ConsistencyReport(
        methods=methods,
        subspace_names=config.names,
        pair_names=pair_names,
        k_neighbors=k,
        n_perm=n_perm,
        alpha=alpha,
        seed=seed,
        jitter_seed=jitter_seed,
    )

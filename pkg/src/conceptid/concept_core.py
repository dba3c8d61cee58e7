"""Concept assignment with cross-concept exclusion, and the concept quality metric.

A sample belongs to concept alpha iff it lies inside all of alpha's regions
(one per subspace) and inside none of any other concept's regions, in any
subspace. Samples caught by two concepts are therefore assigned to neither,
which is what makes concepts disjoint in every subspace projection.

The quality of a labeling is scored per concept as

    Q_alpha = prod_k (|C_alpha| / |C_alpha,k|)^(1/N_S)   (candidate capture)
              * F(|C_alpha| / N_D, s)                    (size band)
              * F(|P_alpha| / |P|, p)                    (preference band, optional)

and overall as the product Q = prod_alpha Q_alpha. F is a window that is 1
on (y, 1-y) and falls along quarter circles to 0 at the ends of [0, 1].
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, SubspaceConfig, project
from .errors import ConfigError
from .geometry import EllipsoidSet, membership_mask

UNASSIGNED = -1


@dataclass(frozen=True)
class Labeling:
    """Per-sample concept index, or -1 for unassigned."""

    labels: np.ndarray
    n_concepts: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if self.n_concepts < 1:
            raise ConfigError("n_concepts must be >= 1")
        if labels.size and (labels.min() < UNASSIGNED or labels.max() >= self.n_concepts):
            raise ConfigError(f"labels must lie in [-1, {self.n_concepts - 1}]")
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self) -> int:
        return self.labels.size

    @property
    def assigned_mask(self) -> np.ndarray:
        return self.labels != UNASSIGNED

    @property
    def n_assigned(self) -> int:
        return int(np.count_nonzero(self.assigned_mask))

    def members(self, alpha: int) -> np.ndarray:
        return np.flatnonzero(self.labels == alpha)

    def counts(self) -> np.ndarray:
        """Sample count per concept (unassigned excluded)."""
        return np.bincount(self.labels[self.assigned_mask], minlength=self.n_concepts)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sample_index", "label"])
            for i, lab in enumerate(self.labels):
                writer.writerow([i, int(lab)])

    @classmethod
    def from_csv(cls, path, n_concepts: int | None = None) -> "Labeling":
        with open(path, "r", newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [h.strip() for h in header] != ["sample_index", "label"]:
                raise ConfigError(f"{path}: expected header 'sample_index,label'")
            labels = [int(row[1]) for row in reader if row]
        arr = np.asarray(labels, dtype=np.int64)
        if n_concepts is None:
            n_concepts = int(arr.max()) + 1 if np.any(arr >= 0) else 1
        return cls(arr, n_concepts)

    def to_json_dict(self) -> dict:
        return {"n_concepts": self.n_concepts, "labels": [int(v) for v in self.labels]}

    @classmethod
    def from_json(cls, doc) -> "Labeling":
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        return cls(np.asarray(doc["labels"], dtype=np.int64), int(doc["n_concepts"]))


@dataclass(frozen=True)
class CandidateSets:
    """masks[alpha, k, i] is True iff sample i lies in concept alpha's region in subspace k."""

    masks: np.ndarray

    def __post_init__(self):
        masks = np.asarray(self.masks, dtype=bool)
        if masks.ndim != 3:
            raise ValueError(f"masks must be (n_concepts, n_subspaces, n_samples), got {masks.shape}")
        masks = masks.copy()
        masks.setflags(write=False)
        object.__setattr__(self, "masks", masks)

    @property
    def n_concepts(self) -> int:
        return self.masks.shape[0]

    @property
    def n_subspaces(self) -> int:
        return self.masks.shape[1]

    @property
    def n_samples(self) -> int:
        return self.masks.shape[2]

    def counts(self) -> np.ndarray:
        """Candidate count |C_alpha,k| as an (n_concepts, n_subspaces) table."""
        return np.count_nonzero(self.masks, axis=2)


@dataclass(frozen=True)
class CqmConfig:
    """Size-band parameter s, preference-band parameter p, optional preference set."""

    s: float = 0.1
    p: float = 0.1
    preference_indices: tuple[int, ...] | None = None

    def __post_init__(self):
        if not 0.0 < self.s < 0.5:
            raise ConfigError(f"s must lie in (0, 0.5), got {self.s}")
        if not 0.0 < self.p < 0.5:
            raise ConfigError(f"p must lie in (0, 0.5), got {self.p}")
        if self.preference_indices is not None:
            pref = tuple(sorted({int(i) for i in self.preference_indices}))
            if pref and pref[0] < 0:
                raise ConfigError("preference indices must be non-negative")
            object.__setattr__(self, "preference_indices", pref)

    def to_json_dict(self) -> dict:
        return {
            "s": self.s,
            "p": self.p,
            "preference_indices": list(self.preference_indices) if self.preference_indices else None,
        }


def candidate_sets(regions: EllipsoidSet, dataset: Dataset, config: SubspaceConfig) -> CandidateSets:
    """Evaluate every region's membership over its subspace projection."""
    if regions.dims != config.dims:
        raise ValueError(f"region dims {regions.dims} do not match subspace dims {config.dims}")
    projections = [project(dataset, config, k) for k in range(config.n_subspaces)]
    masks = np.empty((regions.n_concepts, regions.n_subspaces, dataset.n_samples), dtype=bool)
    for a, row in enumerate(regions.regions):
        for k, e in enumerate(row):
            masks[a, k] = membership_mask(e, projections[k])
    return CandidateSets(masks)


def assign_concepts(cands: CandidateSets) -> Labeling:
    """Label each sample by intersection-and-exclusion over the candidate masks.

    Sample i gets label alpha iff it is inside all of alpha's regions and
    outside every region of every other concept; the exclusion makes the
    assignment unambiguous.
    """
    masks = cands.masks
    in_all = masks.all(axis=1)
    in_any = masks.any(axis=1)
    touched = in_any.sum(axis=0)
    eligible = in_all & (touched == 1)
    # at most one concept can be eligible per sample, so the sum recovers it
    labels = (eligible * (np.arange(cands.n_concepts)[:, None] + 1)).sum(axis=0) - 1
    return Labeling(labels, cands.n_concepts)


def scaling_f(x: float, y: float) -> float:
    """Window that is 1 on [y, 1-y] and falls along quarter circles to 0 at 0 and 1."""
    if not 0.0 < y < 0.5:
        raise ConfigError(f"window parameter must lie in (0, 0.5), got {y}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"argument must lie in [0, 1], got {x}")
    if x < y:
        return math.sqrt(max(0.0, 1.0 - ((x - y) / y) ** 2))
    if x > 1.0 - y:
        return math.sqrt(max(0.0, 1.0 - ((x - 1.0 + y) / y) ** 2))
    return 1.0


def concept_quality(
    labeling: Labeling,
    cands: CandidateSets,
    n_data: int,
    cfg: CqmConfig,
) -> tuple[np.ndarray, float]:
    """Per-concept scores Q_alpha and their product Q.

    A concept with an empty candidate set in any subspace, or with no
    assigned samples, scores 0 rather than raising: degenerate regions are
    a normal state during optimization.
    """
    if labeling.n_samples != cands.n_samples:
        raise ValueError("labeling and candidate sets disagree on sample count")
    if labeling.n_concepts != cands.n_concepts:
        raise ValueError("labeling and candidate sets disagree on concept count")
    member_counts = labeling.counts()
    cand_counts = cands.counts()
    n_s = cands.n_subspaces

    pref = cfg.preference_indices
    if pref:
        pref_arr = np.asarray(pref, dtype=np.int64)
        if pref_arr.max() >= labeling.n_samples:
            raise ConfigError("preference index out of range")
        pref_labels = labeling.labels[pref_arr]

    q_alpha = np.zeros(cands.n_concepts)
    for a in range(cands.n_concepts):
        if np.any(cand_counts[a] == 0) or member_counts[a] == 0:
            continue
        capture = float(np.prod((member_counts[a] / cand_counts[a]) ** (1.0 / n_s)))
        size_term = scaling_f(member_counts[a] / n_data, cfg.s)
        pref_term = 1.0
        if pref:
            pref_term = scaling_f(np.count_nonzero(pref_labels == a) / len(pref), cfg.p)
        q_alpha[a] = capture * size_term * pref_term
    return q_alpha, float(np.prod(q_alpha))

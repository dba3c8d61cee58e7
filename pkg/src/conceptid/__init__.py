"""conceptid: consistent concept identification across feature subspaces.

The package finds compact, mutually disjoint groups of samples (concepts)
that stay disjoint when the data is projected into user-declared feature
subspaces. One rotated hyper-ellipsoid per (concept, subspace) pair defines
candidate regions; a quality metric scores capture, size, and optional
preference coverage; a covariance matrix adaptation evolution strategy
maximizes it. Clustering baselines (k-means, GMM, truncated variants) and
information-theoretic evaluation (KSG mutual information with permutation
testing, silhouette, subspace overlap) round out the toolbox.
"""

from .baselines import (
    GmmResult,
    KmeansResult,
    gmm_em,
    kmeans,
    truncate_by_radius,
    truncate_by_responsibility,
)
from .cmaes import CmaesConfig, CmaesRun, CmaesState
from .concept_core import (
    UNASSIGNED,
    CandidateSets,
    CqmConfig,
    Labeling,
    assign_concepts,
    candidate_sets,
    concept_quality,
    scaling_f,
)
from .dataset import (
    BoundingBox,
    Dataset,
    SubspaceConfig,
    bounding_box,
    load_csv,
    project,
    write_csv,
)
from .datagen import GeneratorSpec, gen_2d, gen_4d, gen_energy_surrogate, generate
from .geometry import Ellipsoid, EllipsoidSet, contains, membership_mask, num_params, rotation_matrix
from .identify import ConceptModel, ConceptObjective, fitness, identify_concepts, select_archetypes
from .metrics import (
    ConsistencyReport,
    MiEstimate,
    PermutationTestResult,
    consistency_report,
    ksg_mi,
    mi_permutation_test,
    overlap_score,
    silhouette,
)

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "CandidateSets",
    "CmaesConfig",
    "CmaesRun",
    "CmaesState",
    "ConceptModel",
    "ConceptObjective",
    "ConsistencyReport",
    "CqmConfig",
    "Dataset",
    "Ellipsoid",
    "EllipsoidSet",
    "GeneratorSpec",
    "GmmResult",
    "KmeansResult",
    "Labeling",
    "MiEstimate",
    "PermutationTestResult",
    "SubspaceConfig",
    "UNASSIGNED",
    "assign_concepts",
    "bounding_box",
    "candidate_sets",
    "concept_quality",
    "consistency_report",
    "contains",
    "fitness",
    "gen_2d",
    "gen_4d",
    "gen_energy_surrogate",
    "generate",
    "gmm_em",
    "identify_concepts",
    "kmeans",
    "ksg_mi",
    "load_csv",
    "membership_mask",
    "mi_permutation_test",
    "num_params",
    "overlap_score",
    "project",
    "rotation_matrix",
    "scaling_f",
    "select_archetypes",
    "silhouette",
    "truncate_by_radius",
    "truncate_by_responsibility",
    "write_csv",
]

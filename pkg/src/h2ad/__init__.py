"""H2AD MIMO receiver toolkit.

Two-stage sensing for heterogeneous hybrid analog-digital arrays: estimate
how many far-field narrowband sources are present (eigen-domain clustering
plus two learned counters), then estimate their directions by per-group
ESPRIT with clustering fusion of the ambiguity-expanded candidates, all
benchmarked against the exact multi-source Cramer-Rao bound.
"""

from .arrays import (ArrayConfig, SteeringVector, config_digest, steering,
                     subarray_gain, virtual_steering)
from .crlb import (CrlbResult, FimMatrix, covariance_derivative, crlb, fim,
                   model_covariance, orthogonality_profile)
from .edc import (ClusterLabeling, EdcSourceCounter, LiftedPoint, dbscan,
                  edc_analysis, estimate_count_edc, lift, standardize)
from .esprit import (CandidateAngle, CandidateAngleSet, build_candidate_set,
                     esprit_group, expand_ambiguities)
from .features import FeatureVector, extract_features
from .fusion import (FusionResult, MicroCluster, OmcDoaFuser, WgmdFuser,
                     WlmdFuser, accuracy_and_rmse, omc_fuse, wgmd_fuse,
                     wlmd_fuse)
from .simulate import (SnapshotMatrix, SourceScene, generate_all_groups,
                       generate_group_snapshots, read_snapshots,
                       write_snapshots)
from .spectral import (CovarianceMatrix, EigenSpectrum, hermitian_eig,
                       jacobi_eig, sample_covariance)

__version__ = "0.1.0"

__all__ = [
    "ArrayConfig", "SteeringVector", "config_digest", "steering",
    "subarray_gain", "virtual_steering", "CrlbResult", "FimMatrix",
    "covariance_derivative", "crlb", "fim", "model_covariance",
    "orthogonality_profile", "ClusterLabeling", "EdcSourceCounter",
    "LiftedPoint", "dbscan", "edc_analysis", "estimate_count_edc", "lift",
    "standardize", "CandidateAngle", "CandidateAngleSet",
    "build_candidate_set", "esprit_group", "expand_ambiguities",
    "FeatureVector", "extract_features", "FusionResult", "MicroCluster",
    "OmcDoaFuser", "WgmdFuser", "WlmdFuser", "accuracy_and_rmse", "omc_fuse",
    "wgmd_fuse", "wlmd_fuse", "SnapshotMatrix", "SourceScene",
    "generate_all_groups", "generate_group_snapshots", "read_snapshots",
    "write_snapshots", "CovarianceMatrix", "EigenSpectrum", "hermitian_eig",
    "jacobi_eig", "sample_covariance", "__version__",
]

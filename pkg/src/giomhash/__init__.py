"""Cancellable template hashing for variable-size point-set features.

The pipeline: minutiae -> per-point cylinder descriptors -> per-point
winner-index codes under a seeded Gaussian bank -> greedy local similarity
scoring -> FVC-style accuracy evaluation, plus the security experiments
(inversion, unlinkability, revocability) and the classic baselines
(fixed-vector index hashing, random maxout features, sign-threshold codes,
orthonormal random projection).
"""

from .model import (
    Minutia,
    MinutiaeTemplate,
    CylinderSet,
    HashKey,
    GaussianBank,
    HashedTemplate,
    MatchScore,
    ParseError,
    IntegrityError,
    KeyMismatchWarning,
    load_minutiae,
    save_minutiae,
    load_cylinders,
    save_cylinders,
    load_key,
    save_key,
    load_hashed,
    save_hashed,
)
from .randomness import (
    OrthoMatrix,
    bank_matrix,
    derive_bank,
    gram_schmidt,
    random_ortho,
    random_projection,
    jl_dimension,
)
from .hashing import (
    BioHashCode,
    RmfVector,
    giom_hash,
    iom_hash,
    rmf_features,
    biohash,
    hash_rows,
    project_rows,
)
from .mcc import MccParams, SynthParams, encode_cylinders, synth_dataset, write_dataset
from .matching import (
    LgsParams,
    np_select,
    point_similarity,
    similarity_matrix,
    lgs_match,
    lgs_match_detail,
    hamming_similarity,
)
from .evaluation import (
    EvalReport,
    SweepResult,
    genuine_pairs,
    impostor_pairs,
    compute_eer,
    run_evaluation,
    sweep,
    load_report,
)
from .security import (
    InequalitySystem,
    build_inequalities,
    sample_preimage,
    preimage_volume_estimate,
    brute_force_guess_count,
    histogram_intersection,
    unlinkability_experiment,
    revocability_experiment,
)
from .cases import InversionCase, get_case

__all__ = [name for name in dir() if not name.startswith("_")]

"""Security and privacy experiments: inversion, unlinkability, revocability.

A protected code pins its preimage to an intersection of half-spaces through
the origin (winner column beats every loser column). The experiments probe
that cone by rejection sampling and Monte-Carlo volume, and measure score
distribution overlap for the unlinkability and revocability claims.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .evaluation import genuine_pairs, impostor_pairs, encode_dataset, hash_dataset, score_pairs
from .matching import LgsParams, lgs_match
from .mcc import MccParams
from .model import GaussianBank, HashKey

DEFAULT_HIST_BINS = 100


@dataclass(frozen=True, eq=False)
class InequalitySystem:
    """Strict linear constraints <normal, x> > 0 describing a preimage cone."""

    normals: np.ndarray
    variable_dim: int

    def __post_init__(self) -> None:
        normals = np.asarray(self.normals, dtype=float)
        if normals.ndim != 2:
            raise ValueError(f"normals must be (k, d), got shape {normals.shape}")
        object.__setattr__(self, "variable_dim", int(self.variable_dim))
        if normals.shape[1] != self.variable_dim:
            raise ValueError(f"normals have dimension {normals.shape[1]}, expected {self.variable_dim}")
        normals = normals.copy()
        normals.flags.writeable = False
        object.__setattr__(self, "normals", normals)

    @property
    def n_constraints(self) -> int:
        return self.normals.shape[0]

    def satisfied(self, points, margin: float = 0.0) -> np.ndarray:
        """Boolean mask of rows satisfying every constraint strictly (> margin)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.variable_dim:
            raise ValueError(f"points have dimension {pts.shape[1]}, expected {self.variable_dim}")
        if self.n_constraints == 0:
            return np.ones(pts.shape[0], dtype=bool)
        return (pts @ self.normals.T > margin).all(axis=1)


def build_inequalities(bank: GaussianBank, code) -> InequalitySystem:
    """The m*(q-1) half-space constraints equivalent to observing `code`.

    Position i with winner j* contributes w_{j*} - w_j for every losing
    column j of matrix i.
    """
    code = np.asarray(code)
    if code.shape != (bank.m,):
        raise ValueError(f"expected a code of length m={bank.m}, got shape {code.shape}")
    if code.min() < 1 or code.max() > bank.q:
        raise ValueError(f"code indices must lie in [1, {bank.q}]")
    rows = []
    for i, winner in enumerate(code):
        mat = bank.matrices[i]
        win_col = mat[:, winner - 1]
        for j in range(bank.q):
            if j != winner - 1:
                rows.append(win_col - mat[:, j])
    return InequalitySystem(normals=np.array(rows), variable_dim=bank.d)


def sample_preimage(
    system: InequalitySystem,
    attempts: int,
    seed: int,
    batch_size: int = 4096,
) -> np.ndarray | None:
    """Rejection-sample a vector satisfying every constraint strictly.

    Candidate batches alternate standard-normal draws with uniform draws over
    [0, 1]^d (the cylinder-value domain). Returns the first hit, or None once
    `attempts` candidates are exhausted. Reproducible from (seed, attempts,
    batch_size).
    """
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    remaining = int(attempts)
    batch_index = 0
    while remaining > 0:
        n = min(batch_size, remaining)
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), batch_index]))
        if batch_index % 2 == 0:
            candidates = rng.standard_normal((n, system.variable_dim))
        else:
            candidates = rng.random((n, system.variable_dim))
        hits = system.satisfied(candidates)
        if hits.any():
            return candidates[int(np.argmax(hits))].copy()
        remaining -= n
        batch_index += 1
    return None


def preimage_volume_estimate(
    system: InequalitySystem,
    samples: int,
    seed: int = 0,
    batch_size: int = 65536,
) -> float:
    """Fraction of uniform-[0, 1]^d samples inside the cone.

    A larger fraction at fixed q and smaller m means the code constrains the
    input more weakly. An empty constraint set gives exactly 1.0.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    hits = 0
    done = 0
    batch_index = 0
    while done < samples:
        n = min(batch_size, samples - done)
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), batch_index]))
        candidates = rng.random((n, system.variable_dim))
        hits += int(system.satisfied(candidates).sum())
        done += n
        batch_index += 1
    return hits / samples


def brute_force_guess_count(decimal_places: int = 4, dim: int = 1536) -> int:
    """Size of the naive guessing space: 10^(decimal_places * dim), exactly."""
    if decimal_places < 1 or dim < 1:
        raise ValueError("decimal_places and dim must be >= 1")
    return 10 ** (decimal_places * dim)


def histogram_intersection(a, b, bins: int = DEFAULT_HIST_BINS, value_range=(0.0, 1.0)) -> float:
    """Overlap of two score samples: sum of per-bin minimum mass fractions."""
    a = np.asarray(list(a), dtype=float)
    b = np.asarray(list(b), dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("both score sets must be non-empty")
    hist_a, _ = np.histogram(a, bins=bins, range=value_range)
    hist_b, _ = np.histogram(b, bins=bins, range=value_range)
    return float(np.minimum(hist_a / a.size, hist_b / b.size).sum())


def unlinkability_experiment(
    dataset,
    key_a: HashKey,
    key_b: HashKey,
    mcc: MccParams = MccParams(),
    lgs: LgsParams = LgsParams(),
) -> tuple[list[float], list[float]]:
    """Cross-key score distributions: (mated_genuine, non_mated_impostor).

    Mated scores compare same-finger templates hashed under the two keys;
    non-mated scores compare different-finger templates across the keys. If
    the system is unlinkable the two distributions overlap heavily.
    """
    if key_a.seed == key_b.seed:
        raise ValueError("keys must have different seeds; identical keys make the experiment meaningless")
    if (key_a.m, key_a.q, key_a.d) != (key_b.m, key_b.q, key_b.d):
        raise ValueError("keys must share (m, q, d) so scores are comparable")
    if key_a.d != mcc.dim:
        raise ValueError(f"key d={key_a.d} does not match cylinder dimension {mcc.dim}")
    cylinders = encode_dataset(dataset, mcc)
    under_a = hash_dataset(cylinders, key_a)
    under_b = hash_dataset(cylinders, key_b)
    mated_pairs = genuine_pairs(dataset)
    fingers = {t.finger_id for t in dataset}
    if len(fingers) < 2:
        warnings.warn("single-finger dataset: non-mated score set is empty", stacklevel=2)
        non_mated_pairs = []
    else:
        non_mated_pairs = impostor_pairs(dataset)
    mated = score_pairs(mated_pairs, under_a, lgs, allow_cross_key=True, hashed_b=under_b)
    non_mated = score_pairs(non_mated_pairs, under_a, lgs, allow_cross_key=True, hashed_b=under_b)
    return mated, non_mated


def revocability_experiment(
    dataset,
    base_key: HashKey,
    n_keys: int,
    seed: int,
    mcc: MccParams = MccParams(),
    lgs: LgsParams = LgsParams(),
    key_seeds=None,
) -> tuple[list[float], list[float], list[float]]:
    """Renewal experiment: (mated_genuine, genuine, impostor) score sets.

    Every finger's first sample is re-hashed under n_keys fresh keys and
    matched against its base-key code, giving F * n_keys mated-genuine
    scores. Genuine and impostor scores under the base key provide the
    reference distributions. key_seeds overrides the derived fresh seeds
    (the degenerate n_keys=1 control with key_seeds=[base_key.seed] yields
    all scores 1.0, which is why n_keys=1 is permitted).
    """
    if n_keys < 1:
        raise ValueError("n_keys must be >= 1")
    if key_seeds is not None:
        key_seeds = [int(s) for s in key_seeds]
        if len(key_seeds) != n_keys:
            raise ValueError(f"key_seeds has {len(key_seeds)} entries, expected n_keys={n_keys}")
    if base_key.d != mcc.dim:
        raise ValueError(f"key d={base_key.d} does not match cylinder dimension {mcc.dim}")
    cylinders = encode_dataset(dataset, mcc)
    under_base = hash_dataset(cylinders, base_key)

    by_finger: dict[str, list] = {}
    for template in dataset:
        by_finger.setdefault(template.finger_id, []).append(template)
    firsts = [min(ts, key=lambda t: t.sample_id).key for _, ts in sorted(by_finger.items())]
    first_rows = {k: cylinders[k] for k in firsts}

    mated: list[float] = []
    for finger_index, template_key in enumerate(firsts):
        for key_index in range(n_keys):
            if key_seeds is not None:
                fresh_seed = key_seeds[key_index]
            else:
                seq = np.random.SeedSequence([int(seed), finger_index, key_index])
                fresh_seed = int(seq.generate_state(1, np.uint64)[0])
            fresh_key = HashKey(seed=fresh_seed, m=base_key.m, q=base_key.q, d=base_key.d)
            renewed = hash_dataset({template_key: first_rows[template_key]}, fresh_key)
            score = lgs_match(
                under_base[template_key], renewed[template_key], lgs, allow_cross_key=True
            )
            mated.append(score.value)

    genuine = score_pairs(genuine_pairs(dataset), under_base, lgs)
    impostor = score_pairs(impostor_pairs(dataset), under_base, lgs)
    return mated, genuine, impostor

"""Local greedy similarity over hashed point codes, plus the Hamming baseline.

The pair budget n_p follows a sigmoid of the smaller template's point count,
so small templates are compared on few pairs and large ones on up to max_np.
Greedy-unique selection repeatedly takes the best remaining pair and retires
its row and column; flat selection just takes the top n_p matrix entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .hashing import BioHashCode
from .model import HashedTemplate, MatchScore


@dataclass(frozen=True)
class LgsParams:
    min_np: int = 4
    max_np: int = 12
    mu_p: float = 20.0
    tau_p: float = 0.4
    greedy_unique: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "min_np", int(self.min_np))
        object.__setattr__(self, "max_np", int(self.max_np))
        object.__setattr__(self, "mu_p", float(self.mu_p))
        object.__setattr__(self, "tau_p", float(self.tau_p))
        object.__setattr__(self, "greedy_unique", bool(self.greedy_unique))
        if not 1 <= self.min_np <= self.max_np:
            raise ValueError(f"need 1 <= min_np <= max_np, got [{self.min_np}, {self.max_np}]")
        if not (math.isfinite(self.mu_p) and math.isfinite(self.tau_p)):
            raise ValueError("mu_p and tau_p must be finite")


def _sigmoid(t: float) -> float:
    if t > 700.0:
        return 1.0
    if t < -700.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-t))


def np_select(n_a: int, n_b: int, params: LgsParams = LgsParams()) -> int:
    """Pair budget: min_np + round(Z * (max_np - min_np)), clamped by both sizes.

    Z is the sigmoid 1 / (1 + exp(-tau_p * (v - mu_p))) of v = min(n_a, n_b).
    """
    n_a, n_b = int(n_a), int(n_b)
    if n_a < 1 or n_b < 1:
        raise ValueError("template sizes must be >= 1")
    v = min(n_a, n_b)
    z = _sigmoid(params.tau_p * (v - params.mu_p))
    raw = params.min_np + round(z * (params.max_np - params.min_np))
    return min(max(raw, params.min_np), params.max_np, n_a, n_b)


def _check_codes(codes: np.ndarray, q: int, label: str) -> np.ndarray:
    codes = np.asarray(codes)
    if codes.ndim != 2:
        raise ValueError(f"{label}: expected an (N, m) code array, got shape {codes.shape}")
    if not np.issubdtype(codes.dtype, np.integer):
        raise ValueError(f"{label}: codes must be integers")
    if codes.size and (codes.min() < 1 or codes.max() > q):
        raise ValueError(f"{label}: code indices must lie in [1, {q}]")
    return codes


def point_similarity(a, b, q: int) -> float:
    """1 - Euclidean distance between two index codes, normalized by its maximum.

    The maximum distance is (q - 1) * sqrt(m), attained by codes all-1 vs
    all-q, so the result lies in [0, 1].
    """
    a = np.atleast_2d(np.asarray(a))
    b = np.atleast_2d(np.asarray(b))
    if a.shape != b.shape or a.shape[0] != 1:
        raise ValueError(f"expected two equal-length index vectors, got {a.shape} and {b.shape}")
    q = int(q)
    _check_codes(a, q, "a")
    _check_codes(b, q, "b")
    return float(similarity_matrix(a, b, q)[0, 0])


def similarity_matrix(codes_a, codes_b, q: int) -> np.ndarray:
    """Pairwise point similarities between two code arrays, shape (N_A, N_B)."""
    codes_a = np.asarray(codes_a)
    codes_b = np.asarray(codes_b)
    if codes_a.shape[1] != codes_b.shape[1]:
        raise ValueError(f"code lengths differ: {codes_a.shape[1]} vs {codes_b.shape[1]}")
    m = codes_a.shape[1]
    dist = cdist(codes_a.astype(float), codes_b.astype(float))
    sim = 1.0 - dist / ((q - 1) * math.sqrt(m))
    return np.clip(sim, 0.0, 1.0)


def _greedy_pairs(sim: np.ndarray, n_p: int) -> list[tuple[int, int]]:
    work = sim.copy()
    pairs = []
    for _ in range(n_p):
        flat = int(np.argmax(work))
        row, col = divmod(flat, work.shape[1])
        pairs.append((row, col))
        work[row, :] = -1.0
        work[:, col] = -1.0
    return pairs


def _flat_pairs(sim: np.ndarray, n_p: int) -> list[tuple[int, int]]:
    order = np.argsort(-sim, axis=None, kind="stable")[:n_p]
    return [divmod(int(flat), sim.shape[1]) for flat in order]


def lgs_match(
    a: HashedTemplate,
    b: HashedTemplate,
    params: LgsParams = LgsParams(),
    allow_cross_key: bool = False,
) -> MatchScore:
    """Mean similarity of the selected n_p point pairs, in [0, 1].

    Templates hashed under different keys are not comparable; such calls
    raise unless allow_cross_key is set (the security experiments construct
    cross-key comparisons deliberately).
    """
    score, _, _ = lgs_match_detail(a, b, params, allow_cross_key)
    return score


def lgs_match_detail(
    a: HashedTemplate,
    b: HashedTemplate,
    params: LgsParams = LgsParams(),
    allow_cross_key: bool = False,
) -> tuple[MatchScore, list[tuple[int, int, float]], int]:
    """lgs_match plus the selected (row_in_a, row_in_b, similarity) pairs and n_p."""
    if a.m != b.m:
        raise ValueError(f"code length mismatch: m={a.m} vs m={b.m}")
    if a.q != b.q:
        raise ValueError(f"index range mismatch: q={a.q} vs q={b.q}")
    if not allow_cross_key and a.key_fingerprint != b.key_fingerprint:
        raise ValueError(
            f"key fingerprint mismatch ({a.key_fingerprint} vs {b.key_fingerprint}); "
            "templates hashed under different keys are not comparable"
        )
    # canonical orientation makes greedy tie-breaking symmetric in (a, b)
    swapped = (b.n_points, b.codes.tobytes()) < (a.n_points, a.codes.tobytes())
    first, second = (b, a) if swapped else (a, b)
    sim = similarity_matrix(first.codes, second.codes, a.q)
    n_p = np_select(a.n_points, b.n_points, params)
    picker = _greedy_pairs if params.greedy_unique else _flat_pairs
    pairs = picker(sim, n_p)
    selected = [(c, r, float(sim[r, c])) if swapped else (r, c, float(sim[r, c])) for r, c in pairs]
    score = MatchScore(float(np.mean([s for _, _, s in selected])))
    return score, selected, n_p


def hamming_similarity(a: BioHashCode, b: BioHashCode) -> float:
    """1 - normalized Hamming distance between two bit codes."""
    if a.bits.shape != b.bits.shape:
        raise ValueError(f"code length mismatch: {a.bits.shape} vs {b.bits.shape}")
    return float(1.0 - np.mean(a.bits != b.bits))

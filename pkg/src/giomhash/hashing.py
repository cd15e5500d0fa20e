"""Winner-index transforms.

giom_hash maps every row of a cylinder set through m Gaussian matrices and
keeps only the 1-based argmax column per matrix, giving an N x m index code.
iom_hash is the single fixed-vector case. rmf_features keeps the max value
instead of its index, and biohash is the classic sign-threshold baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CylinderSet, GaussianBank, HashedTemplate
from .randomness import OrthoMatrix


@dataclass(frozen=True, eq=False)
class RmfVector:
    """Max-of-projections features, scaled by 1/sqrt(m)."""

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or not np.isfinite(vals).all():
            raise ValueError("values must be a finite 1-d array")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True, eq=False)
class BioHashCode:
    """Binary code from thresholded orthonormal projections."""

    bits: np.ndarray
    tau: float

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits)
        if bits.ndim != 1 or not np.isin(bits, (0, 1)).all():
            raise ValueError("bits must be a 1-d array of 0/1")
        bits = np.asarray(bits, dtype=np.uint8)
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "tau", float(self.tau))


def _check_rows(rows: np.ndarray, bank: GaussianBank) -> np.ndarray:
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2:
        raise ValueError(f"expected (N, d) rows, got shape {rows.shape}")
    if rows.shape[1] != bank.d:
        raise ValueError(f"feature dimension {rows.shape[1]} does not match bank d={bank.d}")
    if not np.isfinite(rows).all():
        raise ValueError("features must be finite")
    return rows


def project_rows(rows, bank: GaussianBank) -> np.ndarray:
    """Inner products of each row with every bank column, shape (N, m, q)."""
    rows = _check_rows(rows, bank)
    return (rows @ bank.flat()).reshape(rows.shape[0], bank.m, bank.q)


def hash_rows(rows, bank: GaussianBank) -> np.ndarray:
    """1-based winner indices for each row and matrix, shape (N, m).

    Ties resolve to the smallest column index (numpy argmax convention).
    """
    proj = project_rows(rows, bank)
    return np.argmax(proj, axis=2).astype(np.int64) + 1


def giom_hash(cylinders: CylinderSet, bank: GaussianBank) -> HashedTemplate:
    """Hash a variable-size cylinder set into an N x m protected index code."""
    codes = hash_rows(cylinders.vectors, bank)
    return HashedTemplate(codes=codes, q=bank.q, key_fingerprint=bank.fingerprint())


def iom_hash(x, bank: GaussianBank) -> np.ndarray:
    """Hash a single feature vector into a length-m index code."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {x.shape}")
    return hash_rows(x[None, :], bank)[0]


def rmf_features(x, bank: GaussianBank) -> RmfVector:
    """Length-m vector of per-matrix maxima, scaled by 1/sqrt(m)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {x.shape}")
    proj = project_rows(x[None, :], bank)[0]
    return RmfVector(proj.max(axis=1) / np.sqrt(bank.m))


def biohash(x, ortho: OrthoMatrix, tau: float = 0.0) -> BioHashCode:
    """Threshold the k orthonormal projections of x at tau.

    A projection exactly equal to tau yields bit 0 (strict inequality).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (ortho.n,):
        raise ValueError(f"expected input of shape ({ortho.n},), got {x.shape}")
    if not np.isfinite(x).all():
        raise ValueError("features must be finite")
    bits = (ortho.entries.T @ x - float(tau) > 0.0).astype(np.uint8)
    return BioHashCode(bits=bits, tau=float(tau))

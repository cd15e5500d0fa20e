"""Domain types for cancellable point-set hashing, plus their on-disk formats.

Five artifacts persist: minutiae templates (text), cylinder sets (.npy),
hash keys (JSON), hashed templates (JSON), and evaluation reports (JSON,
handled in evaluation.py next to the report type).
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TWO_PI = 2.0 * math.pi


class ParseError(ValueError):
    """A minutiae text file violates the expected format."""


class IntegrityError(ValueError):
    """A persisted artifact fails validation on load."""


class KeyMismatchWarning(UserWarning):
    """A loaded hashed template was produced under a different key."""


def _wrap_angle(theta: float) -> float:
    wrapped = float(theta) % TWO_PI
    # float modulo can round up to exactly 2*pi for tiny negative inputs
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


@dataclass(frozen=True)
class Minutia:
    """A single feature point: position in pixels, direction in radians.

    The direction is wrapped into [0, 2*pi) on construction.
    """

    x: float
    y: float
    theta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", _wrap_angle(self.theta))


@dataclass(frozen=True)
class MinutiaeTemplate:
    """An ordered set of minutiae belonging to one sample of one finger."""

    finger_id: str
    sample_id: int
    points: tuple[Minutia, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "sample_id", int(self.sample_id))
        if len(self.points) < 1:
            raise ValueError("template must contain >= 1 minutia")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def key(self) -> tuple[str, int]:
        return (self.finger_id, self.sample_id)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Return positions as an (N, 2) array and directions as an (N,) array."""
        xy = np.array([[p.x, p.y] for p in self.points], dtype=float)
        theta = np.array([p.theta for p in self.points], dtype=float)
        return xy, theta


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class CylinderSet:
    """Real-valued local descriptors, one row per point, all cells in [0, 1]."""

    vectors: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vectors, dtype=float)
        if v.ndim != 2:
            raise ValueError(f"cylinder array must be 2-d, got shape {v.shape}")
        if v.shape[0] < 1:
            raise ValueError("cylinder set must contain >= 1 row")
        if not np.isfinite(v).all():
            raise ValueError("cylinder values must be finite")
        if v.size and (v.min() < 0.0 or v.max() > 1.0):
            raise ValueError("cylinder values must lie in [0, 1]")
        object.__setattr__(self, "vectors", _frozen_array(v, float))

    @property
    def n_points(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CylinderSet):
            return NotImplemented
        return np.array_equal(self.vectors, other.vectors)


@dataclass(frozen=True)
class HashKey:
    """Seed material for one revocable bank of Gaussian projection matrices.

    Two keys with equal (seed, m, q, d) derive identical banks; changing the
    seed revokes the old templates.
    """

    seed: int
    m: int
    q: int
    d: int

    def __post_init__(self) -> None:
        for name in ("seed", "m", "q", "d"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.q < 2:
            raise ValueError("q must be >= 2: argmax over fewer than two candidates is degenerate")
        if self.d < 1:
            raise ValueError("d must be >= 1")

    def fingerprint(self) -> str:
        """Short stable digest identifying this key in stored templates."""
        payload = f"{self.seed}:{self.m}:{self.q}:{self.d}".encode()
        return hashlib.sha256(payload).hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class GaussianBank:
    """m stacked d x q matrices of standard-normal entries, the projection key.

    When built from a HashKey the key travels with the bank so hashed output
    can record its fingerprint.
    """

    matrices: np.ndarray
    key: HashKey | None = None

    def __post_init__(self) -> None:
        mats = np.asarray(self.matrices, dtype=float)
        if mats.ndim != 3:
            raise ValueError(f"bank must have shape (m, d, q), got {mats.shape}")
        if not np.isfinite(mats).all():
            raise ValueError("bank entries must be finite")
        m, d, q = mats.shape
        if m < 1 or d < 1 or q < 2:
            raise ValueError(f"degenerate bank shape {mats.shape}")
        if self.key is not None and (m, d, q) != (self.key.m, self.key.d, self.key.q):
            raise ValueError(
                f"bank shape {mats.shape} does not match key (m={self.key.m}, "
                f"d={self.key.d}, q={self.key.q})"
            )
        object.__setattr__(self, "matrices", _frozen_array(mats, float))

    @property
    def m(self) -> int:
        return self.matrices.shape[0]

    @property
    def d(self) -> int:
        return self.matrices.shape[1]

    @property
    def q(self) -> int:
        return self.matrices.shape[2]

    def fingerprint(self) -> str:
        if self.key is not None:
            return self.key.fingerprint()
        return hashlib.sha256(self.matrices.tobytes()).hexdigest()[:16]

    def flat(self) -> np.ndarray:
        """The bank reshaped to (d, m*q) for one-shot projection of row stacks."""
        cached = self.__dict__.get("_flat")
        if cached is None:
            cached = np.ascontiguousarray(self.matrices.transpose(1, 0, 2).reshape(self.d, self.m * self.q))
            self.__dict__["_flat"] = cached
            cached.flags.writeable = False
        return cached

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussianBank):
            return NotImplemented
        return self.key == other.key and np.array_equal(self.matrices, other.matrices)


@dataclass(frozen=True, eq=False)
class HashedTemplate:
    """Protected template: one row of 1-based winning-column indices per point."""

    codes: np.ndarray
    q: int
    key_fingerprint: str

    def __post_init__(self) -> None:
        codes = np.asarray(self.codes)
        if codes.ndim != 2 or codes.shape[0] < 1 or codes.shape[1] < 1:
            raise ValueError(f"codes must be a non-empty 2-d array, got shape {codes.shape}")
        if not np.issubdtype(codes.dtype, np.integer):
            as_int = np.asarray(codes, dtype=np.int64)
            if not np.array_equal(as_int, codes):
                raise ValueError("codes must be integers")
            codes = as_int
        object.__setattr__(self, "q", int(self.q))
        if self.q < 2:
            raise ValueError("q must be >= 2")
        if codes.min() < 1 or codes.max() > self.q:
            raise ValueError(f"code indices must lie in [1, {self.q}]")
        object.__setattr__(self, "codes", _frozen_array(codes, np.int64))

    @property
    def n_points(self) -> int:
        return self.codes.shape[0]

    @property
    def m(self) -> int:
        return self.codes.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, HashedTemplate):
            return NotImplemented
        return (
            self.q == other.q
            and self.key_fingerprint == other.key_fingerprint
            and np.array_equal(self.codes, other.codes)
        )


@dataclass(frozen=True, order=True)
class MatchScore:
    """A similarity score in [0, 1]; higher means more similar."""

    value: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", float(self.value))
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"score must lie in [0, 1], got {self.value}")


# ---------------------------------------------------------------------------
# persistence

_HEADER_RE = re.compile(r"^#\s*finger=(\S+)\s+sample=(\d+)\s*$")


def save_minutiae(template: MinutiaeTemplate, path) -> None:
    """Write one template as a header line plus one x y theta triple per line."""
    path = Path(path)
    lines = [f"# finger={template.finger_id} sample={template.sample_id}"]
    for p in template.points:
        lines.append(f"{p.x!r} {p.y!r} {p.theta!r}")
    path.write_text("\n".join(lines) + "\n")


def _parse_minutiae_file(path: Path) -> MinutiaeTemplate:
    finger_id = None
    sample_id = None
    points = []
    wrapped = 0
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if finger_id is None:
            match = _HEADER_RE.match(line)
            if match is None:
                raise ParseError(
                    f"{path.name}:{lineno}: expected header '# finger=<id> sample=<int>', got {line!r}"
                )
            finger_id, sample_id = match.group(1), int(match.group(2))
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ParseError(f"{path.name}:{lineno}: expected 'x y theta', got {line!r}")
        try:
            x, y, theta = (float(f) for f in fields)
        except ValueError:
            raise ParseError(f"{path.name}:{lineno}: non-numeric value in {line!r}") from None
        if not (0.0 <= theta < TWO_PI):
            wrapped += 1
        points.append(Minutia(x, y, theta))
    if finger_id is None:
        raise ParseError(f"{path.name}: missing header line")
    if not points:
        raise ParseError(f"{path.name}: template must contain >= 1 minutia")
    if wrapped:
        warnings.warn(
            f"{path.name}: wrapped {wrapped} direction(s) into [0, 2*pi)",
            stacklevel=3,
        )
    return MinutiaeTemplate(finger_id, sample_id, tuple(points))


def load_minutiae(path) -> list[MinutiaeTemplate]:
    """Load one template from a file, or all *.txt templates under a directory.

    Directory contents are read in sorted filename order so dataset ordering
    is stable across runs.
    """
    path = Path(path)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix == ".txt")
        if not files:
            raise ParseError(f"no .txt templates under {path}")
        return [_parse_minutiae_file(f) for f in files]
    return [_parse_minutiae_file(path)]


def save_cylinders(cylinders: CylinderSet, path) -> None:
    np.save(Path(path), cylinders.vectors)


def load_cylinders(path) -> CylinderSet:
    arr = np.load(Path(path))
    try:
        return CylinderSet(arr)
    except ValueError as exc:
        raise IntegrityError(f"{Path(path).name}: {exc}") from None


def save_key(key: HashKey, path) -> None:
    payload = {"seed": key.seed, "m": key.m, "q": key.q, "d": key.d}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_key(path) -> HashKey:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
        return HashKey(**{k: payload[k] for k in ("seed", "m", "q", "d")})
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise IntegrityError(f"{path.name}: invalid key file ({exc})") from None


def save_hashed(template: HashedTemplate, path) -> None:
    payload = {
        "q": template.q,
        "m": template.m,
        "key_fingerprint": template.key_fingerprint,
        "codes": template.codes.tolist(),
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_hashed(path, expected_key: HashKey | None = None) -> HashedTemplate:
    """Load a hashed template, validating index ranges and row lengths.

    Passing expected_key warns (KeyMismatchWarning) if the stored fingerprint
    does not match; comparing templates across keys is meaningless.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
        codes = payload["codes"]
        q = payload["q"]
        fingerprint = payload["key_fingerprint"]
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise IntegrityError(f"{path.name}: invalid hashed-template file ({exc})") from None
    rows = [len(row) for row in codes] if isinstance(codes, list) else []
    if rows and len(set(rows)) != 1:
        raise IntegrityError(f"{path.name}: ragged code rows {sorted(set(rows))}")
    try:
        template = HashedTemplate(np.asarray(codes), q, str(fingerprint))
    except ValueError as exc:
        raise IntegrityError(f"{path.name}: {exc}") from None
    if "m" in payload and int(payload["m"]) != template.m:
        raise IntegrityError(f"{path.name}: declared m={payload['m']} but rows have {template.m} entries")
    if expected_key is not None and template.key_fingerprint != expected_key.fingerprint():
        warnings.warn(
            f"{path.name}: stored under key {template.key_fingerprint}, "
            f"expected {expected_key.fingerprint()}",
            KeyMismatchWarning,
            stacklevel=2,
        )
    return template

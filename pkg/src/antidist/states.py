"""Pure states, Haar sampling, state-set files and the pairwise-overlap check."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hermitian import as_hermitian

log = logging.getLogger(__name__)

NORM_TOL = 1e-12
# Renormalize only vectors this far from unit norm, so that load/save/load
# leaves already-normalized amplitudes bit-identical.
RENORMALIZE_THRESHOLD = 1e-14
CORRECTION_REPORT_THRESHOLD = 1e-10

RNG_NAME = "philox4x64-boxmuller-v1"


class StateFileError(ValueError):
    """A state-set document could not be parsed into a valid StateSet."""

    def __init__(self, message: str, index: int | None = None):
        self.index = index
        if index is not None:
            message = f"state {index}: {message}"
        super().__init__(message)


class SchemaError(StateFileError):
    pass


class DimensionMismatchError(StateFileError):
    pass


class ZeroNormError(StateFileError):
    pass


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if a.size == 0 or not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be a non-empty finite vector")
        norm = np.linalg.norm(a)
        if norm == 0.0:
            raise ZeroNormError("zero vector is not a state")
        if abs(norm - 1.0) > RENORMALIZE_THRESHOLD:
            a = a / norm
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __eq__(self, other):
        return isinstance(other, PureState) and np.array_equal(self.amplitudes, other.amplitudes)


@dataclass(frozen=True, eq=False)
class StateSet:
    states: tuple[PureState, ...]
    input_norms: tuple[float, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        states = tuple(s if isinstance(s, PureState) else PureState(s) for s in self.states)
        if not states:
            raise ValueError("a state set needs at least one state")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise DimensionMismatchError(f"states have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "states", states)

    @classmethod
    def from_vectors(cls, vectors) -> StateSet:
        return cls(tuple(PureState(v) for v in vectors))

    @property
    def dim(self) -> int:
        return self.states[0].dim

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def vectors(self) -> np.ndarray:
        return np.array([s.amplitudes for s in self.states])

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i) -> PureState:
        return self.states[i]

    def __iter__(self):
        return iter(self.states)

    def __eq__(self, other):
        return isinstance(other, StateSet) and self.states == other.states

    def densities(self) -> list[np.ndarray]:
        return [density(s) for s in self.states]


def trial_rng(seed: int) -> np.random.Generator:
    """Counter-based stream for one seed; independent of any global state."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def standard_complex_normal(rng: np.random.Generator, size: int) -> np.ndarray:
    """Complex Gaussian with E|z|^2 = 1 via Box-Muller on the uniform stream."""
    u = rng.random((2, size))
    radius = np.sqrt(-np.log1p(-u[0]))  # 1 - u in (0, 1]
    angle = 2.0 * np.pi * u[1]
    return radius * np.exp(1j * angle)


def haar_random_state(d: int, rng: np.random.Generator) -> PureState:
    if d < 1:
        raise ValueError("dimension must be positive")
    return PureState(standard_complex_normal(rng, d))


def haar_random_set(d: int, n: int, rng: np.random.Generator) -> StateSet:
    return StateSet(tuple(haar_random_state(d, rng) for _ in range(n)))


def density(s: PureState) -> np.ndarray:
    """Rank-one projector onto ``s``."""
    a = s.amplitudes
    return as_hermitian(np.outer(a, a.conj()))


@dataclass(frozen=True)
class GramReport:
    n: int
    dim: int
    overlaps: np.ndarray
    max_offdiag: float
    bound: float
    hypothesis_satisfied: bool
    note: str | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "dim": self.dim,
            "overlaps": self.overlaps.tolist(),
            "max_offdiag": self.max_offdiag,
            "bound": self.bound,
            "hypothesis_satisfied": self.hypothesis_satisfied,
            "note": self.note,
        }


def conjecture_bound(d: int) -> float:
    """Largest pairwise overlap the d-state conjecture allows: (d-2)/(d-1)."""
    if d < 2:
        raise ValueError("the overlap bound needs d >= 2")
    return (d - 2) / (d - 1)


def _overlap_matrix(states: StateSet) -> np.ndarray:
    v = states.vectors
    g = np.abs(v.conj() @ v.T)
    # Exact symmetry and unit diagonal for normalized inputs.
    g = np.triu(g, 1)
    g = g + g.T + np.diag(np.abs(np.einsum("ij,ij->i", v.conj(), v)))
    return g


def gram_report(states: StateSet) -> GramReport:
    if states.n < 2:
        raise ValueError("a Gram report needs at least two states")
    d, n = states.dim, states.n
    g = _overlap_matrix(states)
    off = g[~np.eye(n, dtype=bool)]
    max_off = float(off.max())
    bound = conjecture_bound(d) if d >= 2 else 0.0
    note = None
    if n != d:
        note = f"n={n} differs from d={d}; the overlap bound is only conjectured for n = d"
    return GramReport(n, d, g, max_off, bound, max_off <= bound, note)


def is_pairwise_orthogonal(states: StateSet, tol: float = 1e-9) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    if states.n < 2:
        return True
    g = _overlap_matrix(states)
    return bool(np.all(g[~np.eye(states.n, dtype=bool)] <= tol))


def _parse_complex(entry, index: int) -> complex:
    if (
        not isinstance(entry, (list, tuple))
        or len(entry) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        raise SchemaError(f"amplitude {entry!r} is not a [re, im] pair", index)
    return complex(float(entry[0]), float(entry[1]))


def state_set_from_dict(doc) -> StateSet:
    if not isinstance(doc, dict) or "dim" not in doc or "states" not in doc:
        raise SchemaError("document must be an object with 'dim' and 'states'")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SchemaError(f"'dim' must be a positive integer, got {dim!r}")
    raw = doc["states"]
    if not isinstance(raw, list) or not raw:
        raise SchemaError("'states' must be a non-empty list")
    states, norms = [], []
    for i, vec in enumerate(raw):
        if not isinstance(vec, list):
            raise SchemaError("state must be a list of amplitudes", i)
        if len(vec) != dim:
            raise DimensionMismatchError(f"has {len(vec)} amplitudes, expected {dim}", i)
        amps = np.array([_parse_complex(e, i) for e in vec])
        if not np.all(np.isfinite(amps)):
            raise SchemaError("non-finite amplitude", i)
        norm = float(np.linalg.norm(amps))
        if norm == 0.0:
            raise ZeroNormError("zero-norm vector", i)
        if abs(norm - 1.0) > CORRECTION_REPORT_THRESHOLD:
            log.info("state %d renormalized by factor %.12g", i, 1.0 / norm)
        norms.append(norm)
        states.append(PureState(amps))
    return StateSet(tuple(states), tuple(norms))


def load_state_set(source) -> StateSet:
    """Read a state-set JSON document from a path or an open file."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return state_set_from_dict(doc)


def complex_to_json(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def matrix_to_json(m: np.ndarray) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise SchemaError("matrix must be a non-empty list of rows")
    return np.array([[_parse_complex(e, None) for e in row] for row in rows])


def state_set_to_dict(states: StateSet) -> dict:
    return {
        "dim": states.dim,
        "states": [[complex_to_json(z) for z in s.amplitudes] for s in states],
    }


def save_state_set(states: StateSet, path) -> None:
    Path(path).write_text(json.dumps(state_set_to_dict(states), indent=1) + "\n")

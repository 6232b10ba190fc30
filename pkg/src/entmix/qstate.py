"""Two-qubit state containers, ensembles and Gram matrices.

All containers are frozen dataclasses holding read-only numpy arrays, so they
can be shared between threads freely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidDensityMatrix, InvalidEnsemble, ZeroVector

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_SLACK = 1e-10
WEIGHT_RENORM_TOL = 1e-9
ZERO_NORM = 1e-14
MAX_STATES = 4


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _as_vector(raw) -> np.ndarray:
    v = np.asarray(raw)
    if v.shape != (4,):
        raise InvalidEnsemble(f"a two-qubit state needs 4 amplitudes, got shape {v.shape}")
    if np.iscomplexobj(v):
        v = v.astype(np.complex128)
        if not np.any(v.imag):
            v = v.real.copy()
    else:
        v = v.astype(np.float64)
    return v


@dataclass(frozen=True)
class PureState:
    """Normalized 4-component two-qubit state vector.

    Amplitudes are ordered |00>, |01>, |10>, |11>. Vectors whose imaginary
    parts are all exactly zero are stored as float64 and flagged ``real``.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        v = _as_vector(self.amplitudes)
        norm2 = float(np.vdot(v, v).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidEnsemble(f"state is not normalized (|psi|^2 = {norm2!r}); use normalize()")
        object.__setattr__(self, "amplitudes", _frozen(v))

    @property
    def real(self) -> bool:
        return not np.iscomplexobj(self.amplitudes)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __len__(self):
        return 4

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return np.array_equal(self.amplitudes, other.amplitudes)

    def __hash__(self):
        return hash(self.amplitudes.tobytes())

    def projector(self) -> np.ndarray:
        v = self.amplitudes
        return np.outer(v, v.conj())


def normalize(raw) -> PureState:
    """Scale a raw 4-vector to unit norm.

    Raises
    ------
    ZeroVector
        If the norm is below 1e-14.
    """
    v = _as_vector(raw)
    n = np.linalg.norm(v)
    if not n > ZERO_NORM:
        raise ZeroVector(f"cannot normalize vector of norm {n!r}")
    return PureState(v / n)


def as_state(obj) -> PureState:
    if isinstance(obj, PureState):
        return obj
    return PureState(obj)


@dataclass(frozen=True)
class WeightedEnsemble:
    """Between one and four pure states with probability weights.

    Weights that sum to one within 1e-9 are rescaled so the sum is exact;
    anything further off is rejected.
    """

    states: tuple
    weights: np.ndarray

    def __post_init__(self):
        states = tuple(as_state(s) for s in self.states)
        if not 1 <= len(states) <= MAX_STATES:
            raise InvalidEnsemble(f"need 1 to {MAX_STATES} states, got {len(states)}")
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if w.shape != (len(states),):
            raise InvalidEnsemble(f"{len(states)} states but {w.size} weights")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidEnsemble("weights must be finite and non-negative")
        total = w.sum()
        if abs(total - 1.0) > WEIGHT_RENORM_TOL:
            raise InvalidEnsemble(f"weights sum to {total!r}, not 1")
        w = w / total
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def uniform(cls, states: Sequence) -> "WeightedEnsemble":
        k = len(states)
        return cls(tuple(states), np.full(k, 1.0 / k))

    @property
    def k(self) -> int:
        return len(self.states)

    @property
    def real(self) -> bool:
        return all(s.real for s in self.states)

    def matrix(self) -> np.ndarray:
        """States as the columns of a 4 x k array."""
        return np.stack([s.amplitudes for s in self.states], axis=1)

    def to_json(self) -> dict:
        return {"states": [_encode_vector(s.amplitudes) for s in self.states],
                "weights": [float(p) for p in self.weights]}


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 Hermitian, positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (4, 4):
            raise InvalidDensityMatrix(f"expected 4x4 matrix, got {m.shape}")
        m = m.astype(np.complex128) if np.iscomplexobj(m) else m.astype(np.float64)
        validate_density(m)
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def real(self) -> bool:
        return not np.iscomplexobj(self.matrix) or not np.any(self.matrix.imag)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def validate_density(m: np.ndarray) -> None:
    """Raise InvalidDensityMatrix unless ``m`` is Hermitian, PSD and unit-trace."""
    herm = np.max(np.abs(m - m.conj().T))
    if herm > HERMITIAN_TOL:
        raise InvalidDensityMatrix(f"not Hermitian (max asymmetry {herm:.3g})")
    tr = np.trace(m).real
    if abs(tr - 1.0) > HERMITIAN_TOL:
        raise InvalidDensityMatrix(f"trace is {tr!r}, not 1")
    lo = np.linalg.eigvalsh((m + m.conj().T) / 2)[0]
    if lo < -PSD_SLACK:
        raise InvalidDensityMatrix(f"negative eigenvalue {lo:.3g}")


def as_density(obj) -> DensityMatrix:
    if isinstance(obj, DensityMatrix):
        return obj
    if isinstance(obj, WeightedEnsemble):
        return density_from_ensemble(obj)
    return DensityMatrix(obj)


def density_from_ensemble(e: WeightedEnsemble) -> DensityMatrix:
    a = e.matrix() * np.sqrt(e.weights)
    rho = a @ a.conj().T
    # Hermitize exactly; the product above can leave ~1e-17 asymmetry.
    rho = (rho + rho.conj().T) / 2
    if not np.iscomplexobj(e.matrix()):
        rho = rho.real
    return DensityMatrix(rho)


@dataclass(frozen=True)
class GramMatrix:
    """Overlaps ``t[j, i] = <psi_j|psi_i>`` and the weighted ``t'``."""

    t: np.ndarray
    t_prime: np.ndarray


def gram(e: WeightedEnsemble) -> GramMatrix:
    x = e.matrix()
    t = x.conj().T @ x
    t = (t + t.conj().T) / 2
    np.fill_diagonal(t, 1.0)
    d = np.sqrt(e.weights)
    return GramMatrix(_frozen(t), _frozen(d[:, None] * t * d[None, :]))


def is_independent(e: WeightedEnsemble, tol: float = 1e-10) -> bool:
    """True iff the Gram determinant of the states exceeds ``tol`` in modulus."""
    return bool(abs(np.linalg.det(gram(e).t)) > tol)


def _encode_vector(v: np.ndarray) -> list:
    if np.iscomplexobj(v):
        return [[float(z.real), float(z.imag)] for z in v]
    return [float(x) for x in v]


def _decode_amplitude(a) -> complex | float:
    if isinstance(a, (int, float)) and not isinstance(a, bool):
        return float(a)
    if isinstance(a, (list, tuple)) and len(a) == 2 and all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in a):
        return complex(float(a[0]), float(a[1]))
    raise InvalidEnsemble(f"cannot parse amplitude {a!r}")


def ensemble_from_json(data: dict | str) -> WeightedEnsemble:
    """Build an ensemble from the JSON schema ``{"states": [...], "weights": [...]}``.

    Each state is a list of four amplitudes; an amplitude is a bare number or
    a ``[re, im]`` pair. States are normalized on read. If ``weights`` is
    missing, uniform weights are used.
    """
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InvalidEnsemble(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict) or "states" not in data:
        raise InvalidEnsemble('expected an object with a "states" list')
    raw_states = data["states"]
    if not isinstance(raw_states, list) or not raw_states:
        raise InvalidEnsemble('"states" must be a non-empty list')
    states = []
    for s in raw_states:
        if not isinstance(s, list) or len(s) != 4:
            raise InvalidEnsemble(f"each state needs 4 amplitudes, got {s!r}")
        vals = [_decode_amplitude(a) for a in s]
        dtype = np.complex128 if any(isinstance(a, complex) for a in vals) else np.float64
        states.append(normalize(np.array(vals, dtype=dtype)))
    weights = data.get("weights")
    if weights is None:
        return WeightedEnsemble.uniform(states)
    if not isinstance(weights, list):
        raise InvalidEnsemble('"weights" must be a list')
    return WeightedEnsemble(tuple(states), weights)


def ensemble_to_json(e: WeightedEnsemble) -> str:
    return json.dumps(e.to_json())


def computational_basis() -> list[PureState]:
    return [PureState(np.eye(4)[i]) for i in range(4)]


def bell_states() -> dict[str, PureState]:
    s = 1 / np.sqrt(2)
    return {
        "phi+": PureState([s, 0, 0, s]),
        "phi-": PureState([s, 0, 0, -s]),
        "psi+": PureState([0, s, s, 0]),
        "psi-": PureState([0, s, -s, 0]),
    }


def states_from_rows(rows: Iterable) -> list[PureState]:
    return [normalize(r) for r in rows]

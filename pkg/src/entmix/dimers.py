"""Superpositions of dimerized 2N-qubit states.

Each branch i of the superposition is a product of N two-qubit factors
``phi_j^i = alpha|00> + beta|01> + gamma|10> + delta|11>``; pair j occupies
qubits (2j-1, 2j) and the reduced state of interest is that of the first
pair. For k=2 branches the reduced state has a closed form in terms of the
first factors and the overlap products over the remaining pairs; the
brute-force path builds the full 4^N-amplitude vector and traces it down,
and works for any k.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .concurrence import concurrence_mixed, concurrence_pure
from .errors import DegenerateNorm, InvalidEnsemble, TooLarge, WrongBranchCount
from .qstate import DensityMatrix, PureState, WeightedEnsemble, _decode_amplitude, density_from_ensemble
from .sampling import standard_normals, stream

MAX_PAIRS = 12
NORM_TOL = 1e-12


@dataclass(frozen=True)
class DimerFactor:
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def __post_init__(self):
        n2 = sum(abs(c) ** 2 for c in self.vector)
        if abs(n2 - 1) > NORM_TOL:
            raise InvalidEnsemble(f"dimer factor not normalized (norm^2 = {n2!r})")

    @property
    def vector(self) -> np.ndarray:
        v = np.array([self.alpha, self.beta, self.gamma, self.delta])
        return v.real if not np.any(np.imag(v)) else v.astype(np.complex128)


class DimerizedSuperposition:
    """k branches of N normalized two-qubit factors with amplitudes a_i.

    ``factors`` is array-like shaped (k, N, 4). Amplitudes default to
    1/sqrt(k) each and must satisfy sum |a_i|^2 = 1.
    """

    def __init__(self, factors, amplitudes=None):
        f = np.asarray(factors)
        if f.ndim != 3 or f.shape[2] != 4 or f.shape[0] < 1 or f.shape[1] < 1:
            raise InvalidEnsemble(f"factors must have shape (k, N, 4), got {f.shape}")
        f = f.astype(np.complex128) if np.iscomplexobj(f) and np.any(f.imag) else f.real.astype(np.float64)
        norms = np.sum(np.abs(f) ** 2, axis=2)
        if np.max(np.abs(norms - 1)) > NORM_TOL:
            raise InvalidEnsemble("every dimer factor must be normalized")
        k = f.shape[0]
        if amplitudes is None:
            a = np.full(k, 1 / np.sqrt(k))
        else:
            a = np.asarray(amplitudes)
            a = a.astype(np.complex128) if np.iscomplexobj(a) and np.any(a.imag) else a.real.astype(np.float64)
            if a.shape != (k,):
                raise InvalidEnsemble(f"{k} branches but {a.size} amplitudes")
            if abs(np.sum(np.abs(a) ** 2) - 1) > NORM_TOL:
                raise InvalidEnsemble("amplitudes must satisfy sum |a_i|^2 = 1")
        f.setflags(write=False)
        a.setflags(write=False)
        self.factors = f
        self.amplitudes = a

    @property
    def k(self) -> int:
        return self.factors.shape[0]

    @property
    def N(self) -> int:
        return self.factors.shape[1]

    @property
    def real(self) -> bool:
        return not np.iscomplexobj(self.factors)

    def factor(self, i: int, j: int) -> DimerFactor:
        return DimerFactor(*self.factors[i, j])

    def first_states(self) -> list[PureState]:
        return [PureState(self.factors[i, 0]) for i in range(self.k)]

    def with_theta(self, theta: float) -> "DimerizedSuperposition":
        if self.k != 2:
            raise WrongBranchCount(f"theta parametrizes k=2 only, got k={self.k}")
        return DimerizedSuperposition(self.factors, [np.cos(theta), np.sin(theta)])

    @classmethod
    def from_json(cls, data: dict | str) -> "DimerizedSuperposition":
        """Parse ``{"branches": [[[a, b, c, d], ...], ...], "amplitudes": [...]}``.

        Amplitudes may be bare numbers or ``[re, im]`` pairs. Factors are
        normalized on read.
        """
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise InvalidEnsemble(f"malformed JSON: {exc}") from exc
        if not isinstance(data, dict) or "branches" not in data:
            raise InvalidEnsemble('expected an object with a "branches" list')
        try:
            rows = [[[_decode_amplitude(c) for c in fac] for fac in br] for br in data["branches"]]
            f = np.array(rows, dtype=np.complex128)
        except (TypeError, ValueError) as exc:
            raise InvalidEnsemble(f"cannot parse branches: {exc}") from exc
        if f.ndim != 3 or f.shape[2] != 4:
            raise InvalidEnsemble("each branch must be a list of 4-component factors")
        f = f / np.linalg.norm(f, axis=2, keepdims=True)
        amps = data.get("amplitudes")
        if amps is not None:
            amps = np.array([_decode_amplitude(a) for a in amps], dtype=np.complex128)
        return cls(f, amps)

    def to_json(self) -> dict:
        def enc(z):
            return float(z) if not np.iscomplexobj(z) else [float(z.real), float(z.imag)]
        return {"branches": [[[enc(c) for c in fac] for fac in br] for br in self.factors],
                "amplitudes": [enc(a) for a in self.amplitudes]}


def random_superposition(N: int, k: int = 2, seed: int = 0, real: bool = True) -> DimerizedSuperposition:
    """Haar-random factors (real by default) with equal amplitudes."""
    gen = stream(seed, 0)
    x = standard_normals(gen, (k, N, 4))
    if not real:
        x = x + 1j * standard_normals(gen, (k, N, 4))
    x = x / np.linalg.norm(x, axis=2, keepdims=True)
    return DimerizedSuperposition(x)


@dataclass(frozen=True)
class OverlapProducts:
    mu1: complex
    mu2: complex


def overlaps(s: DimerizedSuperposition) -> OverlapProducts:
    """Products of the factor overlaps <phi_j^1|phi_j^2> over j=1..N (mu1) and j=2..N (mu2)."""
    if s.k != 2:
        raise WrongBranchCount(f"overlaps need k=2, got k={s.k}")
    ov = np.einsum("ja,ja->j", s.factors[0].conj(), s.factors[1])
    mu1, mu2 = ov.prod(), ov[1:].prod()
    if s.real:
        return OverlapProducts(float(mu1), float(mu2))
    return OverlapProducts(complex(mu1), complex(mu2))


def _amps(s: DimerizedSuperposition, theta):
    if theta is None:
        return s.amplitudes
    return np.array([np.cos(theta), np.sin(theta)])


def normalization(s: DimerizedSuperposition, theta: float | None = None) -> float:
    """Normalization factor 1/sqrt(1 + sin(2 theta) mu1) of the superposition.

    For general (possibly complex) amplitudes a this is
    1/sqrt(1 + 2 Re(conj(a1) a2 mu1)).
    """
    if s.k != 2:
        raise WrongBranchCount(f"closed-form normalization needs k=2, got k={s.k}")
    a1, a2 = _amps(s, theta)
    mu1 = overlaps(s).mu1
    n2 = 1 + 2 * np.real(np.conj(a1) * a2 * mu1)
    if n2 < 1e-12:
        raise DegenerateNorm(f"superposition has vanishing norm ({n2:.3g})")
    return float(1 / np.sqrt(n2))


def reduced_dm_coherent(s: DimerizedSuperposition, theta: float | None = None) -> DensityMatrix:
    """Exact reduced state of the first pair for k=2, including the interference term."""
    if s.k != 2:
        raise WrongBranchCount(f"closed-form reduction needs k=2, got k={s.k}")
    a1, a2 = _amps(s, theta)
    nrm2 = normalization(s, theta) ** 2
    mu2 = overlaps(s).mu2
    p1, p2 = s.factors[0, 0], s.factors[1, 0]
    cross = a1 * np.conj(a2) * np.conj(mu2) * np.outer(p1, p2.conj())
    rho = nrm2 * (abs(a1) ** 2 * np.outer(p1, p1.conj()) + abs(a2) ** 2 * np.outer(p2, p2.conj())
                  + cross + cross.conj().T)
    rho = (rho + rho.conj().T) / 2
    if not np.any(np.imag(rho)):
        rho = np.real(rho)
    return DensityMatrix(rho)


def incoherent_ensemble(s: DimerizedSuperposition, theta: float | None = None) -> WeightedEnsemble:
    """First-pair states of each branch weighted by |a_i|^2."""
    a = _amps(s, theta) if s.k == 2 else s.amplitudes
    return WeightedEnsemble(tuple(s.first_states()), np.abs(a) ** 2)


def reduced_dm_incoherent(e: WeightedEnsemble) -> DensityMatrix:
    """Reduced state with the interference term dropped: sum_i |a_i|^2 |psi_i><psi_i|."""
    return density_from_ensemble(e)


def full_state(s: DimerizedSuperposition, amplitudes=None) -> np.ndarray:
    """Normalized 4^N-amplitude vector of the superposition."""
    if s.N > MAX_PAIRS:
        raise TooLarge(f"N={s.N} exceeds the brute-force limit of {MAX_PAIRS} pairs")
    a = s.amplitudes if amplitudes is None else np.asarray(amplitudes)
    if a.shape != (s.k,):
        raise InvalidEnsemble(f"{s.k} branches but {a.size} amplitudes")
    dtype = np.complex128 if (np.iscomplexobj(s.factors) or np.iscomplexobj(a)) else np.float64
    psi = np.zeros(4 ** s.N, dtype=dtype)
    for i in range(s.k):
        branch = np.ones(1, dtype=dtype)
        for j in range(s.N):
            branch = np.kron(branch, s.factors[i, j])
        psi += a[i] * branch
    n = np.linalg.norm(psi)
    if n * n < 1e-12:
        raise DegenerateNorm("superposition has vanishing norm")
    return psi / n


def brute_force_reduced_dm(s: DimerizedSuperposition, theta_or_amplitudes=None) -> DensityMatrix:
    """Reduced state of qubits 1-2 by explicit partial trace of the full vector.

    ``theta_or_amplitudes`` is a scalar angle (k=2 only), a length-k
    amplitude vector, or None to use the superposition's own amplitudes.
    """
    amps = theta_or_amplitudes
    if amps is not None and np.ndim(amps) == 0:
        if s.k != 2:
            raise WrongBranchCount("an angle parametrizes k=2 only")
        amps = np.array([np.cos(amps), np.sin(amps)])
    psi = full_state(s, amps).reshape(4, -1)
    rho = psi @ psi.conj().T
    return DensityMatrix((rho + rho.conj().T) / 2)


@dataclass(frozen=True)
class SweepRow:
    p: float
    C_coherent: float
    C_incoherent: float
    weighted_sum: float


def theta_from_p(p: float) -> float:
    """Angle with cos^2(theta) = p, theta in [0, pi/2]."""
    return float(np.arccos(np.sqrt(np.clip(p, 0.0, 1.0))))


def concurrence_sweep(s: DimerizedSuperposition, p_grid: Sequence[float]) -> list[SweepRow]:
    """Concurrence of the first pair against p = cos^2(theta), coherent vs incoherent."""
    if s.k != 2:
        raise WrongBranchCount(f"sweep needs k=2, got k={s.k}")
    c1, c2 = (concurrence_pure(x) for x in s.first_states())
    rows = []
    for p in p_grid:
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"grid point {p} outside [0, 1]")
        th = theta_from_p(p)
        cc = concurrence_mixed(reduced_dm_coherent(s, th))
        ci = concurrence_mixed(reduced_dm_incoherent(incoherent_ensemble(s, th)))
        rows.append(SweepRow(p, cc, ci, p * c1 + (1 - p) * c2))
    return rows


def max_coherence_gap(s: DimerizedSuperposition, p_grid: Sequence[float]) -> float:
    """max over the grid of |C_coherent - C_incoherent|."""
    return max(abs(r.C_coherent - r.C_incoherent) for r in concurrence_sweep(s, p_grid))


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "C_coherent", "C_incoherent", "weighted_sum"])
    for r in rows:
        w.writerow([f"{r.p:.12g}", f"{r.C_coherent:.15g}", f"{r.C_incoherent:.15g}",
                    f"{r.weighted_sum:.15g}"])
    return buf.getvalue()

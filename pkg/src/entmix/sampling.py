"""Haar sampling of real two-qubit states and Monte Carlo fraction estimates.

Randomness is counter-based: samples are generated in fixed blocks of
``CHUNK`` and block ``c`` of seed ``s`` always comes from a Philox stream keyed
by ``(s, c)``. Sample ``i`` therefore depends only on ``(seed, i)``, and any
number of worker threads yields bit-identical estimates. Normal deviates are
obtained by the inverse normal CDF applied to 53-bit uniforms shifted off 0.

Every estimator that draws k states per sample uses the same stream for the
same seed, so e.g. the strict and relaxed pair conditions are evaluated on
the very same pairs.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtri

from .optimality import pair_conditions, triple_conditions
from .qstate import PureState
from .rmatrix import batch_r

CHUNK = 1 << 16
_HALF_ULP = 2.0 ** -54

F2_TARGET = (math.pi - 2) / 4
F3_TARGET = 0.0512
REBIT2_TARGET = math.pi / 4
REBIT3_TARGET = 0.485


def stream(seed: int, chunk: int = 0) -> np.random.Generator:
    """Philox generator for block ``chunk`` of ``seed``."""
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return np.random.Generator(np.random.Philox(key=seed + (chunk << 64)))


def standard_normals(gen: np.random.Generator, shape) -> np.ndarray:
    return ndtri(gen.random(shape) + _HALF_ULP)


def sample_real_state(gen: np.random.Generator) -> PureState:
    """One Haar-random real two-qubit state: four normals, normalized."""
    v = standard_normals(gen, 4)
    return PureState(v / np.linalg.norm(v))


def haar_block(seed: int, chunk: int, k: int) -> np.ndarray:
    """The full block ``chunk`` of k-tuples of Haar real states, shape (CHUNK, k, 4)."""
    x = standard_normals(stream(seed, chunk), (CHUNK, k, 4))
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def sample_real_states(n: int, k: int, seed: int = 0) -> np.ndarray:
    """The first ``n`` sampled k-tuples for ``seed``, shape (n, k, 4)."""
    out = []
    for c in range(-(-n // CHUNK)):
        m = min(CHUNK, n - c * CHUNK)
        out.append(haar_block(seed, c, k)[:m])
    return np.concatenate(out) if out else np.zeros((0, k, 4))


Draw = Callable[[int, int, int], np.ndarray]


def _run_chunks(n: int, seed: int, k: int, kernel, threads: int = 1,
                draw: Draw | None = None) -> list:
    """Apply ``kernel`` to each block of samples; results returned in block order."""
    if n < 0:
        raise ValueError("sample count must be non-negative")
    draw = draw or haar_block
    nchunks = -(-n // CHUNK)

    def work(c):
        m = min(CHUNK, n - c * CHUNK)
        return kernel(draw(seed, c, k)[:m])

    if threads <= 1 or nchunks <= 1:
        return [work(c) for c in range(nchunks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, range(nchunks)))


@dataclass(frozen=True)
class McEstimate:
    fraction: float
    stderr: float
    n: int
    seed: int
    target: float | None = None

    @classmethod
    def from_count(cls, count: int, n: int, seed: int, target=None) -> "McEstimate":
        f = count / n if n else 0.0
        se = math.sqrt(f * (1 - f) / n) if n else 0.0
        return cls(f, se, n, seed, target)

    def to_json(self) -> dict:
        return {"estimate": self.fraction, "stderr": self.stderr, "n": self.n,
                "seed": self.seed, "target": self.target}


def _count(n, seed, k, predicate, threads, draw, target) -> McEstimate:
    counts = _run_chunks(n, seed, k, lambda x: int(np.count_nonzero(predicate(x))), threads, draw)
    return McEstimate.from_count(sum(counts), n, seed, target)


def _pair_optimal(x):
    r = batch_r(x)
    return pair_conditions(r[:, 0, 0], r[:, 1, 1], r[:, 0, 1])[0]


def _pair_rebit(x):
    r = batch_r(x)
    return pair_conditions(r[:, 0, 0], r[:, 1, 1], r[:, 0, 1])[1]


def _triple_optimal(x):
    return triple_conditions(batch_r(x))[0]


def _triple_rebit(x):
    return triple_conditions(batch_r(x))[1]


def estimate_f2(n: int, seed: int = 0, threads: int = 1, draw: Draw | None = None) -> McEstimate:
    """Fraction of Haar pairs of real states that are optimal."""
    return _count(n, seed, 2, _pair_optimal, threads, draw, F2_TARGET)


def estimate_f3(n: int, seed: int = 0, threads: int = 1, draw: Draw | None = None) -> McEstimate:
    """Fraction of Haar triples of real states that are optimal."""
    return _count(n, seed, 3, _triple_optimal, threads, draw, F3_TARGET)


def estimate_rebit_fraction(n: int, seed: int = 0, k: int = 2, threads: int = 1,
                            draw: Draw | None = None) -> McEstimate:
    """Fraction of sampled sets meeting the relaxed (rebit) conditions.

    k=2 counts chi12 < 0. k=3 counts all three 2x2 principal minors of r
    negative, i.e. the optimality conditions with the requirement that the
    r_ii share a sign dropped.
    """
    if k == 2:
        return _count(n, seed, 2, _pair_rebit, threads, draw, REBIT2_TARGET)
    if k == 3:
        return _count(n, seed, 3, _triple_rebit, threads, draw, REBIT3_TARGET)
    raise ValueError(f"k must be 2 or 3, got {k}")


@dataclass(frozen=True)
class Rank4Result:
    violations: int
    n: int
    seed: int
    min_det: float

    def to_json(self) -> dict:
        return {"violations": self.violations, "n": self.n, "seed": self.seed,
                "min_det": self.min_det, "target": 0}


def estimate_rank4_violations(n: int, seed: int = 0, threads: int = 1,
                              draw: Draw | None = None) -> Rank4Result:
    """Count sampled real quadruples with det(r) <= 0."""
    def kernel(x):
        d = np.linalg.det(batch_r(x))
        return int(np.count_nonzero(d <= 0)), float(d.min())

    parts = _run_chunks(n, seed, 4, kernel, threads, draw)
    if not parts:
        return Rank4Result(0, 0, seed, math.inf)
    return Rank4Result(sum(p[0] for p in parts), n, seed, min(p[1] for p in parts))


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    stderr: float
    target: float | None = None

    def to_json(self) -> dict:
        return {"estimate": self.mean, "stderr": self.stderr, "target": self.target}


def _moment_reduce(parts: list, idx: int, n: int, target) -> MomentEstimate:
    s1 = math.fsum(p[idx][0] for p in parts)
    s2 = math.fsum(p[idx][1] for p in parts)
    mean = s1 / n
    var = max(s2 - s1 * s1 / n, 0.0) / (n - 1) if n > 1 else 0.0
    return MomentEstimate(mean, math.sqrt(var / n), target)


def _sums(v: np.ndarray) -> tuple:
    return math.fsum(v), math.fsum(v * v)


@dataclass(frozen=True)
class MuMoments:
    N: int
    n: int
    seed: int
    mu1: MomentEstimate
    mu1_sq: MomentEstimate
    mu2_sq: MomentEstimate

    def to_json(self) -> dict:
        return {"N": self.N, "n": self.n, "seed": self.seed, "mu1": self.mu1.to_json(),
                "mu1_sq": self.mu1_sq.to_json(), "mu2_sq": self.mu2_sq.to_json()}


def overlap_products(x: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    """mu1 and mu2 for stacked dimer factors ``x`` shaped (n, 2N, 4).

    The first N factors belong to branch 1 and the last N to branch 2.
    """
    ov = np.einsum("nja,nja->nj", x[:, :N], x[:, N:])
    return ov.prod(axis=1), ov[:, 1:].prod(axis=1)


def estimate_mu_moments(N: int, n: int, seed: int = 0, threads: int = 1) -> MuMoments:
    """Sample moments of the overlap products for Haar-random real dimer factors.

    Targets: <mu1> = 0, <mu1^2> = 4^-N, <mu2^2> = 4^-(N-1).
    """
    if N < 2:
        raise ValueError("N must be at least 2")

    def kernel(x):
        mu1, mu2 = overlap_products(x, N)
        return _sums(mu1), _sums(mu1 * mu1), _sums(mu2 * mu2)

    parts = _run_chunks(n, seed, 2 * N, kernel, threads)
    return MuMoments(
        N, n, seed,
        _moment_reduce(parts, 0, n, 0.0),
        _moment_reduce(parts, 1, n, 4.0 ** -N),
        _moment_reduce(parts, 2, n, 4.0 ** -(N - 1)),
    )


@dataclass(frozen=True)
class R12Moments:
    n: int
    seed: int
    second: MomentEstimate
    fourth: MomentEstimate
    max_abs: float

    def to_json(self) -> dict:
        return {"n": self.n, "seed": self.seed, "second": self.second.to_json(),
                "fourth": self.fourth.to_json(), "max_abs": self.max_abs}


def r12_distribution_check(n: int, seed: int = 0, threads: int = 1) -> R12Moments:
    """Second and fourth moments of r12 over Haar pairs.

    A semicircle law on [-1, 1] predicts 1/4 and 1/8.
    """
    def kernel(x):
        r12 = batch_r(x)[:, 0, 1]
        r2 = r12 * r12
        return _sums(r2), _sums(r2 * r2), float(np.abs(r12).max())

    parts = _run_chunks(n, seed, 2, kernel, threads)
    return R12Moments(
        n, seed,
        _moment_reduce(parts, 0, n, 0.25),
        _moment_reduce(parts, 1, n, 0.125),
        max((p[2] for p in parts), default=0.0),
    )


__all__ = [
    "CHUNK",
    "McEstimate",
    "MomentEstimate",
    "MuMoments",
    "R12Moments",
    "Rank4Result",
    "estimate_f2",
    "estimate_f3",
    "estimate_mu_moments",
    "estimate_rank4_violations",
    "estimate_rebit_fraction",
    "haar_block",
    "overlap_products",
    "r12_distribution_check",
    "sample_real_state",
    "sample_real_states",
    "standard_normals",
    "stream",
]

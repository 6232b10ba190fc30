"""Optimality certificates for mixtures of two or three real pure states.

A set of pure states is *optimal* when every mixture of them has concurrence
equal to the weighted average of the pure-state concurrences. For real
states this reduces to sign conditions on entries and minors of the r
matrix. Strict inequalities are evaluated against a band of +/-1e-12; a
verdict decided inside that band is reported as ``boundary`` and never as
optimal.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .concurrence import concurrence_mixed, concurrence_pure
from .errors import DependentStates, InvalidEnsemble, NotReal
from .qstate import WeightedEnsemble, as_state, density_from_ensemble, is_independent
from .rmatrix import build_r

BAND = 1e-12


# Vectorized predicates. The certificate classes and the Monte Carlo
# estimators both go through these so the two can never disagree.

def pair_conditions(r11, r22, r12, band: float = BAND):
    """Return (optimal, rebit_coincident, boundary) arrays for pair r-entries."""
    r11, r22, r12 = np.asarray(r11), np.asarray(r22), np.asarray(r12)
    prod = r11 * r22
    chi = prod - r12 * r12
    optimal = (prod > band) & (chi < -band)
    rebit = chi < -band
    boundary = ~optimal & (prod > -band) & (chi < band)
    return optimal, rebit, boundary


def principal_minors(r: np.ndarray) -> np.ndarray:
    """2x2 principal minors [r]_ii of 3x3 matrices (deleting row and column i).

    Works on a single matrix or a stack shaped (..., 3, 3).
    """
    r = np.asarray(r)
    out = []
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        out.append(r[..., j, j] * r[..., k, k] - r[..., j, k] * r[..., k, j])
    return np.stack(out, axis=-1)


def det3(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r)
    return (r[..., 0, 0] * (r[..., 1, 1] * r[..., 2, 2] - r[..., 1, 2] * r[..., 2, 1])
            - r[..., 0, 1] * (r[..., 1, 0] * r[..., 2, 2] - r[..., 1, 2] * r[..., 2, 0])
            + r[..., 0, 2] * (r[..., 1, 0] * r[..., 2, 1] - r[..., 1, 1] * r[..., 2, 0]))


def triple_conditions(r: np.ndarray, band: float = BAND):
    """Return (optimal, minors_negative, boundary) for 3x3 r matrices.

    ``optimal`` is r_ii det(r) > 0 and [r]_ii < 0 for every i.
    ``minors_negative`` drops the sign condition on the diagonal; it is the
    condition under which every pair in the triple has rebit concurrence
    equal to its concurrence.
    """
    r = np.asarray(r)
    d = det3(r)
    diag = np.stack([r[..., i, i] for i in range(3)], axis=-1)
    minors = principal_minors(r)
    sign_ok = diag * d[..., None]
    minors_neg = np.all(minors < -band, axis=-1)
    optimal = np.all(sign_ok > band, axis=-1) & minors_neg
    maybe = np.all(sign_ok > -band, axis=-1) & np.all(minors < band, axis=-1)
    boundary = ~optimal & maybe
    return optimal, minors_neg, boundary


def _require_real(states):
    states = [as_state(s) for s in states]
    for s in states:
        if not s.real:
            raise NotReal("optimality certificates are only defined for real states")
    return states


def _require_independent(states):
    e = WeightedEnsemble.uniform(states)
    if not is_independent(e):
        raise DependentStates("states are linearly dependent")


@dataclass(frozen=True)
class PairCertificate:
    r11: float
    r22: float
    r12: float
    chi12: float
    optimal: bool
    rebit_coincident: bool
    boundary: bool

    def to_dict(self) -> dict:
        return {"kind": "pair", **asdict(self)}


@dataclass(frozen=True)
class TripleCertificate:
    r: np.ndarray
    det_r: float
    minors: tuple
    optimal: bool
    minors_negative: bool
    boundary: bool

    def pair(self, i: int, j: int) -> PairCertificate:
        """Certificate of the pair (i, j) read off this triple's r matrix."""
        return _pair_from_r(self.r[i, i], self.r[j, j], self.r[i, j])

    def pairs(self) -> list[PairCertificate]:
        return [self.pair(0, 1), self.pair(0, 2), self.pair(1, 2)]

    def to_dict(self) -> dict:
        return {
            "kind": "triple",
            "r": [[float(x) for x in row] for row in self.r],
            "diag": [float(self.r[i, i]) for i in range(3)],
            "det_r": self.det_r,
            "minors": list(self.minors),
            "optimal": self.optimal,
            "minors_negative": self.minors_negative,
            "boundary": self.boundary,
        }


def _pair_from_r(r11, r22, r12) -> PairCertificate:
    r11, r22, r12 = float(r11), float(r22), float(r12)
    opt, reb, bnd = pair_conditions(r11, r22, r12)
    return PairCertificate(r11, r22, r12, r11 * r22 - r12 * r12, bool(opt), bool(reb), bool(bnd))


def certify_pair(psi1, psi2) -> PairCertificate:
    """Check whether every mixture of two real states is optimally entangled.

    Optimal iff r11 r22 > 0 and chi12 = r11 r22 - r12^2 < 0. Independently of
    the sign of r11 r22, chi12 < 0 means the concurrence of every mixture
    equals |p1 r11 + p2 r22|, i.e. coincides with the rebit concurrence.
    """
    s1, s2 = _require_real([psi1, psi2])
    r = build_r([s1, s2]).real
    return _pair_from_r(r[0, 0], r[1, 1], r[0, 1])


def certify_triple(psi1, psi2, psi3) -> TripleCertificate:
    states = _require_real([psi1, psi2, psi3])
    _require_independent(states)
    r = build_r(states).real
    opt, mneg, bnd = triple_conditions(r)
    return TripleCertificate(
        r=r,
        det_r=float(det3(r)),
        minors=tuple(float(m) for m in principal_minors(r)),
        optimal=bool(opt),
        minors_negative=bool(mneg),
        boundary=bool(bnd),
    )


def check_rank4(states) -> float:
    """det(r) for four independent real states; always positive for real states,
    which rules out optimal real quadruples."""
    states = _require_real(states)
    if len(states) != 4:
        raise InvalidEnsemble(f"need exactly 4 states, got {len(states)}")
    _require_independent(states)
    return float(np.linalg.det(build_r(states).real))


def mixture_concurrence_k2(e: WeightedEnsemble) -> float:
    """Closed-form concurrence of a mixture of two real states.

    With xi = p1 r11 + p2 r22 and chi12 = r11 r22 - r12^2: if chi12 < 0 the
    concurrence is |xi|, otherwise sqrt(xi^2 - 4 p1 p2 chi12).
    """
    if e.k != 2:
        raise InvalidEnsemble(f"need k=2, got k={e.k}")
    if not e.real:
        raise NotReal("closed form holds for real states only")
    r = build_r(e.states).real
    p1, p2 = e.weights
    xi = p1 * r[0, 0] + p2 * r[1, 1]
    chi = r[0, 0] * r[1, 1] - r[0, 1] ** 2
    if chi <= 0.0:
        return float(abs(xi))
    return float(np.sqrt(max(xi * xi - 4.0 * p1 * p2 * chi, 0.0)))


def verify_optimality_numerically(e: WeightedEnsemble, n_weight_samples: int = 100,
                                  seed: int = 0) -> float:
    """Max over random weight vectors of |C(rho) - sum_i p_i C(psi_i)|.

    Weights are drawn uniformly from the simplex. The Wootters formula is
    evaluated directly on each rho, so this is an independent check of any
    certificate.
    """
    conc = np.array([concurrence_pure(s) for s in e.states])
    if e.k == 1:
        return abs(concurrence_mixed(density_from_ensemble(e)) - conc[0])
    rng = np.random.Generator(np.random.Philox(seed))
    gap = 0.0
    for p in rng.dirichlet(np.ones(e.k), size=n_weight_samples):
        p = p / p.sum()
        rho = density_from_ensemble(WeightedEnsemble(e.states, p))
        gap = max(gap, abs(concurrence_mixed(rho) - float(p @ conc)))
    return gap


def experimental_complex_pair_check(psi1, psi2, *, experimental: bool = False) -> dict:
    """Candidate optimality test for complex pairs: 0 < r11 r22 / r12^2 < 1.

    Not a certificate; no claim is made about how often it holds. Must be
    enabled explicitly with ``experimental=True``.
    """
    if not experimental:
        raise NotImplementedError("complex-pair check is experimental; pass experimental=True")
    r = build_r([psi1, psi2])
    r12sq = r[0, 1] ** 2
    if abs(r12sq) <= BAND:
        ratio = complex("inf")
    else:
        ratio = complex(r[0, 0] * r[1, 1] / r12sq)
    holds = abs(ratio.imag) <= 1e-12 and BAND < ratio.real < 1 - BAND
    return {"ratio_re": ratio.real, "ratio_im": ratio.imag, "condition_holds": bool(holds)}

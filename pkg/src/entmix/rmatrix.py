"""The k x k matrices r and r' whose spectrum carries the concurrence of a mixture.

For an ensemble rho = sum_i p_i |psi_i><psi_i| with independent states, the
eigenvalues of rho rho~ coincide with those of r' r'* where
``r[i, j] = <psi_i| sigma_y x sigma_y |psi_j*>`` and ``r' = D r D`` with
``D = diag(sqrt(p))``. For real states r' is real symmetric, so the square
roots of that spectrum are just |eigenvalues of r'|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .concurrence import SIGMA_YY, wootters_spectrum
from .errors import DependentEnsemble, InvalidEnsemble
from .qstate import WeightedEnsemble, as_state, density_from_ensemble, is_independent


def build_r(states) -> np.ndarray:
    """r[i, j] = <psi_i| S |psi_j*> for S = sigma_y x sigma_y.

    Real input gives a real symmetric matrix; complex input a complex
    symmetric one.
    """
    states = [as_state(s) for s in states]
    if not 1 <= len(states) <= 4:
        raise InvalidEnsemble(f"need 1 to 4 states, got {len(states)}")
    x = np.stack([s.amplitudes for s in states], axis=1)
    r = (x.T @ SIGMA_YY @ x).conj()
    return (r + r.T) / 2


def build_r_prime(e: WeightedEnsemble) -> np.ndarray:
    d = np.sqrt(e.weights)
    return d[:, None] * build_r(e.states) * d[None, :]


def batch_r(x: np.ndarray) -> np.ndarray:
    """r matrices for a stack of real states, ``x`` shaped (n, k, 4) -> (n, k, k)."""
    sx = x[..., ::-1] * np.array([-1.0, 1.0, 1.0, -1.0])
    return np.einsum("nia,nja->nij", x, sx)


@dataclass(frozen=True)
class CubicCoefficients:
    """Coefficients of lambda^3 + xi1 lambda^2 + xi2 lambda + xi3, the
    characteristic polynomial of r' for three real states."""

    xi1: float
    xi2: float
    xi3: float

    def as_array(self) -> np.ndarray:
        return np.array([1.0, self.xi1, self.xi2, self.xi3])


def cubic_coefficients(e: WeightedEnsemble) -> CubicCoefficients:
    if e.k != 3:
        raise InvalidEnsemble(f"cubic coefficients need k=3, got k={e.k}")
    if not e.real:
        raise InvalidEnsemble("cubic coefficients are defined for real states")
    r = build_r(e.states).real
    p = e.weights
    xi1 = -float(np.dot(p, np.diag(r)))
    # Sum over unordered pairs: the lambda coefficient is the sum of the
    # 2x2 principal minors of r'.
    xi2 = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            xi2 += p[i] * p[j] * (r[i, i] * r[j, j] - r[i, j] ** 2)
    xi3 = -float(p[0] * p[1] * p[2] * np.linalg.det(r))
    return CubicCoefficients(xi1, float(xi2), xi3)


def cubic_real_roots(a: float, b: float, c: float) -> np.ndarray:
    """Roots of x^3 + a x^2 + b x + c, assumed all real, in ascending order.

    Trigonometric (Viete) solution; valid for the characteristic polynomial
    of any real symmetric 3x3 matrix.
    """
    q = (a * a - 3.0 * b) / 9.0
    rr = (2.0 * a ** 3 - 9.0 * a * b + 27.0 * c) / 54.0
    sq = np.sqrt(max(q, 0.0))
    if sq ** 3 <= np.finfo(float).tiny:
        # (numerically) triple root
        return np.full(3, -a / 3.0)
    cos_arg = np.clip(rr / (sq ** 3), -1.0, 1.0)
    theta = np.arccos(cos_arg)
    roots = -2.0 * sq * np.cos((theta + 2.0 * np.pi * np.arange(3)) / 3.0) - a / 3.0
    return np.sort(roots)


def r_prime_eigenvalues(e: WeightedEnsemble) -> np.ndarray:
    """Eigenvalues of the real symmetric r', ascending.

    Uses the quadratic formula for k=2, the trigonometric cubic for k=3 and a
    symmetric eigensolver for k=4.
    """
    if not e.real:
        raise InvalidEnsemble("r' is only real symmetric for real states")
    rp = build_r_prime(e).real
    k = e.k
    if k == 1:
        return rp[0].copy()
    if k == 2:
        tr = rp[0, 0] + rp[1, 1]
        det = rp[0, 0] * rp[1, 1] - rp[0, 1] ** 2
        disc = np.sqrt(max(tr * tr - 4.0 * det, 0.0))
        return np.array([(tr - disc) / 2.0, (tr + disc) / 2.0])
    if k == 3:
        c = cubic_coefficients(e)
        return cubic_real_roots(c.xi1, c.xi2, c.xi3)
    return np.linalg.eigvalsh(rp)


def r_prime_spectrum(e: WeightedEnsemble) -> np.ndarray:
    """Eigenvalues of r' r'* (= r' r'^dagger), descending, length k."""
    rp = build_r_prime(e)
    if e.real:
        lam = r_prime_eigenvalues(e)
        return np.sort(lam ** 2)[::-1]
    h = rp @ rp.conj().T
    return np.linalg.eigvalsh((h + h.conj().T) / 2)[::-1]


def concurrence_from_r_prime(e: WeightedEnsemble) -> float:
    """Concurrence of the mixture computed from the r' spectrum alone."""
    rp = build_r_prime(e)
    lam = np.linalg.svd(rp, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1:].sum()))


def verify_spectral_equivalence(e: WeightedEnsemble, tol: float = 1e-10) -> float:
    """Max deviation between the sorted spectra of rho rho~ and r' r'*.

    The r' spectrum is padded with zeros up to length four.

    Raises
    ------
    DependentEnsemble
        If the Gram determinant of the states is at most ``tol``.
    """
    if not is_independent(e, tol):
        raise DependentEnsemble("states are linearly dependent; spectral reduction does not apply")
    mu_rho = wootters_spectrum(density_from_ensemble(e))
    mu_r = np.zeros(4)
    mu_r[: e.k] = r_prime_spectrum(e)
    return float(np.max(np.abs(np.sort(mu_rho) - np.sort(mu_r))))


def char_poly(m: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients of ``m`` (highest power first)."""
    return np.poly(m)

"""Wootters concurrence for pure and mixed two-qubit states, and rebit concurrence."""

from __future__ import annotations

import numpy as np

from .errors import NotReal, NumericalFailure
from .qstate import DensityMatrix, as_density, as_state

# sigma_y (x) sigma_y in the computational basis. It is real: the two factors
# of i cancel, leaving the antidiagonal (-1, 1, 1, -1).
SIGMA_YY = np.array([
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
])
SIGMA_YY.setflags(write=False)

# Eigenvalues of rho at or below this are treated as exact zeros. Without it
# the square roots of rounding noise (~1e-17) leak ~1e-8 into the concurrence.
RANK_CUTOFF = 1e-13
MU_CLAMP = 1e-10
RESIDUAL_TOL = 1e-8


def spin_flip(rho) -> np.ndarray:
    """Return (sigma_y x sigma_y) rho* (sigma_y x sigma_y)."""
    m = np.asarray(as_density(rho).matrix)
    return SIGMA_YY @ m.conj() @ SIGMA_YY


def _sqrtm_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    resid = np.max(np.abs(m @ v - v * w))
    if resid > RESIDUAL_TOL:
        raise NumericalFailure(f"eigendecomposition residual {resid:.3g}")
    if w[0] < -MU_CLAMP:
        raise NumericalFailure(f"matrix has eigenvalue {w[0]:.3g} < 0")
    w = np.where(w > RANK_CUTOFF, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def wootters_spectrum(rho) -> np.ndarray:
    """Eigenvalues mu_1 >= ... >= mu_4 of rho * spin_flip(rho).

    Computed through the Hermitian similar matrix sqrt(rho) rho~ sqrt(rho), so
    the spectrum is real and non-negative up to rounding.
    """
    m = np.asarray(as_density(rho).matrix)
    s = _sqrtm_psd(m)
    h = s @ SIGMA_YY @ m.conj() @ SIGMA_YY @ s
    h = (h + h.conj().T) / 2
    mu = np.linalg.eigvalsh(h)[::-1]
    if mu[-1] < -MU_CLAMP:
        raise NumericalFailure(f"rho rho~ has eigenvalue {mu[-1]:.3g} < 0")
    return np.clip(mu, 0.0, None)


def wootters_lambdas(rho) -> np.ndarray:
    """Square roots of the rho rho~ spectrum, descending.

    Taken as singular values of sqrt(rho) S sqrt(rho)* (S = sigma_y x sigma_y),
    whose Gram product is sqrt(rho) rho~ sqrt(rho). This avoids the square root
    of tiny eigenvalues, which would amplify rounding error from 1e-16 to 1e-8.
    """
    m = np.asarray(as_density(rho).matrix)
    s = _sqrtm_psd(m)
    return np.linalg.svd(s @ SIGMA_YY @ s.conj(), compute_uv=False)


def concurrence_mixed(rho) -> float:
    """Concurrence max(0, l1 - l2 - l3 - l4) of a two-qubit density matrix.

    Accepts a DensityMatrix, a 4x4 array, or a WeightedEnsemble.
    """
    lam = wootters_lambdas(rho)
    return float(max(0.0, lam[0] - lam[1:].sum()))


def concurrence_pure(psi) -> float:
    """|<psi| sigma_y x sigma_y |psi*>| for a pure state."""
    v = as_state(psi).amplitudes
    return float(abs(v @ SIGMA_YY @ v))


def rebit_concurrence(rho) -> float:
    """|tr(sigma_y x sigma_y rho)|, the concurrence of a real density matrix
    minimized over real ensembles only."""
    m = np.asarray(as_density(rho).matrix)
    if np.iscomplexobj(m):
        if np.max(np.abs(m.imag)) > 1e-12:
            raise NotReal("rebit concurrence needs a real density matrix")
        m = m.real
    return float(abs(np.trace(SIGMA_YY @ m)))


def werner_state(w: float) -> DensityMatrix:
    """w |Phi+><Phi+| + (1 - w) I/4."""
    phi = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2)
    return DensityMatrix(w * np.outer(phi, phi) + (1 - w) * np.eye(4) / 4)


def _batch_pure(x: np.ndarray) -> np.ndarray:
    """Pure-state concurrences of real states stacked along the last axis."""
    return np.abs(2 * (x[..., 1] * x[..., 2] - x[..., 0] * x[..., 3]))


__all__ = [
    "SIGMA_YY",
    "spin_flip",
    "wootters_spectrum",
    "wootters_lambdas",
    "concurrence_mixed",
    "concurrence_pure",
    "rebit_concurrence",
    "werner_state",
]

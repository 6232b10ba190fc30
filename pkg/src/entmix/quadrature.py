"""Quadrature of the angular integrals behind the optimal-pair fraction.

After reducing the pair integral to three angular variables, each region
contributes

    I = int dalpha int dbeta int du  1 / (sqrt(1 - u^2/A^2) sqrt(1 - u^2/B^2))

with A = 2 cos(alpha) cos(beta) and B = 2 sin(alpha) sin(beta). The u range
always ends at m = min(A, B), where the integrand has an inverse square root
singularity. Substituting u = m sin(phi) removes it exactly:

    int_{u0}^{m} ... du = m (F(pi/2 | k) - F(asin(u0/m) | k)),  k = (m/M)^2,

with F the incomplete elliptic integral of the first kind and M = max(A, B).
What remains is a log singularity where A = B; the outer (alpha, beta)
integration is adaptive and places a breakpoint on that line when it lies
inside the region.

Outer integration uses QUADPACK (adaptive Gauss-Kronrod with extrapolation)
at absolute tolerance tol/3 per level; subdivision is deterministic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, special

from .concurrence import SIGMA_YY
from .errors import NonConvergence, ParallelStates
from .qstate import as_state

QUARTER = math.pi / 4
HALF = math.pi / 2


def appendix_integrand(u: float, alpha: float, beta: float) -> float:
    """The raw u-integrand at (u, alpha, beta); equals 1 at u = 0."""
    a = 2 * math.cos(alpha) * math.cos(beta)
    b = 2 * math.sin(alpha) * math.sin(beta)
    return 1.0 / (math.sqrt(1 - (u / a) ** 2) * math.sqrt(1 - (u / b) ** 2))


def inner_integral(alpha: float, beta: float, constrained: bool = False) -> float:
    """u-integral at fixed (alpha, beta).

    Unconstrained: u from 0 to min(A, B). Constrained: u from
    sqrt(cos 2alpha cos 2beta) instead, which is zero-width (returns 0)
    outside the region where that lower limit is below the upper one.
    """
    a = 2 * math.cos(alpha) * math.cos(beta)
    b = 2 * math.sin(alpha) * math.sin(beta)
    m, big = min(a, b), max(a, b)
    if m <= 0.0:
        return 0.0
    k = (m / big) ** 2
    full = special.ellipk(k)
    if not constrained:
        return m * full
    prod = math.cos(2 * alpha) * math.cos(2 * beta)
    if prod <= 0.0:
        return m * full
    u0 = math.sqrt(prod)
    if u0 >= m:
        return 0.0
    return m * (full - special.ellipkinc(math.asin(u0 / m), k))


def beta_lower_ll(alpha: float) -> float:
    """Smallest beta in the lower-lower square where the constraint can hold."""
    return math.asin(math.sqrt(max(0.5 - math.sin(alpha) ** 2, 0.0)))


def _check_tol(tol: float) -> None:
    if not 1e-8 <= tol <= 1e-3:
        raise ValueError(f"tol must lie in [1e-8, 1e-3], got {tol}")


def _quad(f, lo, hi, tol, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        kw = {"epsabs": tol, "epsrel": 0.0, "limit": 200}
        if points is not None and lo < points < hi:
            kw["points"] = [points]
        val, err = integrate.quad(f, lo, hi, **kw)
    return val, err


def _region(alpha_lo, alpha_hi, beta_lo, beta_hi, constrained, tol):
    """Integrate inner_integral over alpha in [alpha_lo, alpha_hi] and beta
    between beta_lo(alpha) and beta_hi(alpha) (callables)."""
    level_tol = tol / 3
    inner_err = [0.0]

    def over_beta(alpha):
        lo, hi = beta_lo(alpha), beta_hi(alpha)
        if hi <= lo:
            return 0.0
        # log singularity of K along alpha + beta = pi/2
        val, err = _quad(lambda b: inner_integral(alpha, b, constrained), lo, hi,
                         level_tol, points=HALF - alpha)
        inner_err[0] = max(inner_err[0], err)
        return val

    val, err = _quad(over_beta, alpha_lo, alpha_hi, level_tol)
    total_err = err + inner_err[0] * (alpha_hi - alpha_lo)
    if not total_err <= tol:
        raise NonConvergence(f"error estimate {total_err:.3g} exceeds tol {tol:.3g}")
    return val, total_err


def integrate_f_n_ll(tol: float = 1e-5) -> tuple[float, float]:
    """Constrained integral over the lower-lower square; (value, error estimate)."""
    _check_tol(tol)
    return _region(0.0, QUARTER, beta_lower_ll, lambda a: QUARTER, True, tol)


def integrate_f_d_ll(tol: float = 1e-5) -> tuple[float, float]:
    """Unconstrained integral over the lower-lower square."""
    _check_tol(tol)
    return _region(0.0, QUARTER, lambda a: 0.0, lambda a: QUARTER, False, tol)


def integrate_f_ul(tol: float = 1e-5) -> tuple[float, float]:
    """Integral over alpha in [0, pi/4], beta in [pi/4, pi/2]; the constraint is inactive there."""
    _check_tol(tol)
    return _region(0.0, QUARTER, lambda a: QUARTER, lambda a: HALF, False, tol)


def integrate_f_lu(tol: float = 1e-5) -> tuple[float, float]:
    """Mirror region of integrate_f_ul (alpha and beta ranges swapped)."""
    _check_tol(tol)
    return _region(QUARTER, HALF, lambda a: 0.0, lambda a: QUARTER, False, tol)


@dataclass(frozen=True)
class AppendixResult:
    f_n_ll: float
    f_d_ll: float
    f_ul: float
    f: float
    f2: float
    error_estimate: float

    def to_json(self) -> dict:
        return asdict(self)


def assemble(f_n_ll: float, f_d_ll: float, f_ul: float,
             errors: tuple[float, float, float] = (0.0, 0.0, 0.0)) -> AppendixResult:
    """Combine the region integrals into f and f2 = f - 1/2.

    ``errors`` are the component error estimates; they are propagated to
    first order into the reported error of f.
    """
    num = 2 * f_ul + 2 * f_n_ll
    den = 2 * f_ul + 2 * f_d_ll
    f = num / den
    en, ed, eu = errors
    err = (2 * en / den + 2 * num * ed / den ** 2 + abs(2 / den - 2 * num / den ** 2) * eu)
    return AppendixResult(f_n_ll, f_d_ll, f_ul, f, f - 0.5, err)


def evaluate_appendix(tol: float = 1e-5) -> AppendixResult:
    n, en = integrate_f_n_ll(tol)
    d, ed = integrate_f_d_ll(tol)
    u, eu = integrate_f_ul(tol)
    return assemble(n, d, u, (en, ed, eu))


def _chi(x: np.ndarray, y: np.ndarray) -> float:
    """r12^2 - r11 r22 for real vectors x, y."""
    r11, r22, r12 = x @ SIGMA_YY @ x, y @ SIGMA_YY @ y, x @ SIGMA_YY @ y
    return float(r12 * r12 - r11 * r22)


def gram_schmidt_sign_invariance(psi1, psi2) -> bool:
    """Check that r12^2 - r11 r22 keeps its sign when psi2 is replaced by its
    component orthogonal to psi1.

    The identity behind this, chi(psi1, psi2) = sin^2(theta) chi(psi1, eta),
    holds for any real symmetric observable, so sigma_y x sigma_y is used
    directly rather than the rotated sigma_z x sigma_z form.
    """
    x = np.asarray(as_state(psi1).amplitudes, dtype=float)
    y = np.asarray(as_state(psi2).amplitudes, dtype=float)
    eta = y - (x @ y) * x
    n = np.linalg.norm(eta)
    if n < 1e-12:
        raise ParallelStates("states are parallel; no orthogonal component")
    eta = eta / n
    before, after = _chi(x, y), _chi(x, eta)
    if abs(before) <= 1e-12:
        # sin^2(theta) can push a nonzero value into the rounding band
        return True
    return bool(np.sign(before) == np.sign(after))

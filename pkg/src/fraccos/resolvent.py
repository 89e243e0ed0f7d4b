"""Resolvents ``R(lambda**alpha; A) = (lambda**alpha I - A)**-1`` and their
Neumann-series perturbation by a bounded matrix ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DomainError, HypothesisError, SingularityError
from .families import ExponentialBound, as_generator, check_alpha, opnorm

#: Largest condition number of ``lambda**alpha I - A`` accepted as invertible.
COND_CAP = 1e12

NEUMANN_TERM_CAP = 100_000


@dataclass(frozen=True)
class ResolventPoint:
    """A real spectral parameter ``lambda`` together with the order ``alpha``."""

    lam: float
    alpha: float

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        check_alpha(self.alpha)

    @property
    def value_lambda_alpha(self) -> float:
        return self.lam ** self.alpha

    @property
    def scale(self) -> float:
        """``lambda**(alpha-1)``, the cosine-side factor."""
        return self.lam ** (self.alpha - 1.0)

    def require_above(self, bound: ExponentialBound) -> None:
        if not self.lam > bound.omega:
            raise DomainError(f"lambda = {self.lam} must exceed omega = {bound.omega}")


@dataclass
class NeumannReport:
    theta: float
    n_terms: int
    partial_sums: list = field(repr=False)
    term_norms: list
    bound_rhs: float
    resolvent_norm: float


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    theta: float
    series_residual: float = 0.0

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def _lu_inverse(M: np.ndarray, cond_cap: float) -> np.ndarray:
    cond = np.linalg.cond(M, p=np.inf)
    if not np.isfinite(cond) or cond > cond_cap:
        raise SingularityError(f"matrix is numerically singular (condition number {cond:.3e})")
    lu = scipy.linalg.lu_factor(M, check_finite=True)
    I = np.eye(M.shape[0])
    X = scipy.linalg.lu_solve(lu, I)
    # one step of iterative refinement
    X = X + scipy.linalg.lu_solve(lu, I - M @ X)
    return X


def direct_inverse(M, cond_cap: float = COND_CAP) -> np.ndarray:
    """Inverse of a small dense matrix by LU with partial pivoting."""
    return _lu_inverse(np.asarray(M, dtype=float), cond_cap)


def resolvent(point: ResolventPoint, A, cond_cap: float = COND_CAP) -> np.ndarray:
    """``(lambda**alpha I - A)**-1``.

    Raises
    ------
    SingularityError
        When ``lambda**alpha`` is (numerically) an eigenvalue of ``A``.
    """
    A = as_generator(A)
    return _lu_inverse(point.value_lambda_alpha * np.eye(A.shape[0]) - A, cond_cap)


def _theta(point, A, B):
    A = as_generator(A)
    B = as_generator(B)
    if A.shape != B.shape:
        raise DomainError(f"A and B shapes differ: {A.shape} vs {B.shape}")
    R = resolvent(point, A)
    BR = B @ R
    return A, B, R, BR, float(opnorm(BR))


def neumann_resolvent(point: ResolventPoint, A, B, tol: float = 1e-14,
                      max_terms: int = NEUMANN_TERM_CAP):
    r"""Perturbed resolvent by the Neumann series ``sum_n R (B R)**n``.

    Summation stops before the first term whose norm is below ``tol``.

    Returns
    -------
    value : ndarray
    report : NeumannReport

    Raises
    ------
    HypothesisError
        ``theta = ||B R|| >= 1``: the expansion is not applicable and no
        fallback is attempted.
    """
    A, B, R, BR, theta = _theta(point, A, B)
    if theta >= 1.0:
        raise HypothesisError(f"||B R(lambda^alpha; A)|| = {theta:.6g} >= 1")
    total = R.copy()
    partial = [total.copy()]
    norms = [float(opnorm(R))]
    term = R
    for _ in range(max_terms):
        term = term @ BR
        tn = float(opnorm(term))
        if tn < tol:
            break
        total = total + term
        partial.append(total.copy())
        norms.append(tn)
    else:
        raise HypothesisError(f"Neumann series did not reach tol={tol} in {max_terms} terms")
    rn = norms[0]
    report = NeumannReport(theta=theta, n_terms=len(partial), partial_sums=partial,
                           term_norms=norms, bound_rhs=rn * theta / (1.0 - theta),
                           resolvent_norm=rn)
    return total, report


def perturbed_resolvent_direct(point: ResolventPoint, A, B) -> np.ndarray:
    """``(lambda**alpha I - A - B)**-1`` by direct LU inversion (the oracle)."""
    A = as_generator(A)
    B = as_generator(B)
    return direct_inverse(point.value_lambda_alpha * np.eye(A.shape[0]) - A - B)


def lemma_bound_check(point: ResolventPoint, A, B) -> BoundCheck:
    """``||R(A+B) - R(A)||`` against ``||R(A)|| theta / (1 - theta)``.

    The perturbed resolvent comes from direct inversion.
    """
    A, B, R, BR, theta = _theta(point, A, B)
    if theta >= 1.0:
        raise HypothesisError(f"||B R(lambda^alpha; A)|| = {theta:.6g} >= 1")
    diff = perturbed_resolvent_direct(point, A, B) - R
    return BoundCheck(float(opnorm(diff)), float(opnorm(R)) * theta / (1.0 - theta), theta)


def corollary_scaled_check(point: ResolventPoint, A, B, tol: float = 1e-14) -> BoundCheck:
    """Cosine-side (``lambda**(alpha-1)``-scaled) version of :func:`lemma_bound_check`.

    ``series_residual`` is the largest gap between the scaled Neumann
    partial sums' limit and the scaled direct inverse.
    """
    A, B, R, BR, theta = _theta(point, A, B)
    if theta >= 1.0:
        raise HypothesisError(f"||B R(lambda^alpha; A)|| = {theta:.6g} >= 1")
    c = point.scale
    diff = perturbed_resolvent_direct(point, A, B) - R
    lhs = c * float(opnorm(diff))
    rhs = c * float(opnorm(R)) * theta / (1.0 - theta)
    series, _ = neumann_resolvent(point, A, B, tol=tol)
    resid = float(opnorm(c * series - c * (diff + R)))
    return BoundCheck(lhs, rhs, theta, resid)


def choose_lambda(alpha: float, A, B, omega: float, theta_max: float = 0.5,
                  start_gap: float = 1.0, max_doublings: int = 60) -> float:
    """Smallest ``omega + gap * 2**k`` with ``||B R(lambda**alpha; A)|| <= theta_max``."""
    gap = start_gap
    for _ in range(max_doublings):
        point = ResolventPoint(omega + gap, alpha)
        try:
            *_, theta = _theta(point, A, B)
        except SingularityError:
            theta = np.inf
        if theta <= theta_max:
            return point.lam
        gap *= 2.0
    raise HypothesisError("no lambda found with theta below the requested level")

"""Fractional cosine, sine and Riemann-Liouville families of a matrix generator.

For a real ``d x d`` generator ``A`` and order ``1 < alpha <= 2``

* cosine:            ``C(t) = E_{alpha,1}(t**alpha A)``
* sine:              ``S(t) = t E_{alpha,2}(t**alpha A)``   (``S' = C``)
* Riemann-Liouville: ``T(t) = t**(alpha-1) E_{alpha,alpha}(t**alpha A)``

plus numerical checks of the defining axioms.  The operator norm used
throughout is the max-row-sum norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import special
from .errors import ConvergenceError, DomainError, QuadratureError
from .quadrature import QuadratureConfig, refined_convolution

FamilyKind = Literal["cosine", "sine", "riemann_liouville"]

# estimated rounding error (relative to 1 + ||sum||) above which the double
# precision matrix series is re-summed in extended precision
_CANCEL_LIMIT = 1e-11
_ROUNDING = 4e-16


def opnorm(M) -> float | np.ndarray:
    """Max-row-sum norm; batched over leading axes."""
    M = np.asarray(M, dtype=float)
    return np.abs(M).sum(axis=-1).max(axis=-1)


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (1.0 < alpha <= 2.0):
        raise DomainError(f"fractional order must satisfy 1 < alpha <= 2, got {alpha}")
    return alpha


def as_generator(A) -> np.ndarray:
    """Validate a square, finite, real matrix and return it as float array."""
    A = np.array(A, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DomainError(f"generator must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("generator has non-finite entries")
    return A


@dataclass(frozen=True)
class FamilyEvaluation:
    t: float
    kind: FamilyKind
    value: np.ndarray


@dataclass(frozen=True)
class ExponentialBound:
    """Constants with ``||C(t)|| <= M exp(omega t)``."""

    M: float
    omega: float

    def __post_init__(self):
        if not (self.M >= 1.0 and self.omega >= 0.0):
            raise DomainError(f"need M >= 1 and omega >= 0, got {self.M}, {self.omega}")

    def __call__(self, t):
        return self.M * np.exp(self.omega * np.asarray(t, dtype=float))


def _ml_matrix_mpmath(a, b, X, max_terms):
    import mpmath

    scale = float(opnorm(X))
    digits = 20 + int(math.ceil(math.log10(max(special.ml_scalar(a, b, scale), 10.0))))
    d = X.shape[0]
    with mpmath.workdps(digits):
        Xm = mpmath.matrix(X.tolist())
        power = mpmath.eye(d)
        acc = mpmath.zeros(d, d)
        bound_prev = math.inf
        for k in range(max_terms):
            coef = mpmath.rgamma(a * k + b)
            acc += power * coef
            bound = float(mpmath.mpf(scale) ** (k + 1) * mpmath.rgamma(a * (k + 1) + b))
            if bound < 1e-17 * (1.0 + float(mpmath.mnorm(acc, "inf"))) and bound <= bound_prev:
                return np.array(acc.tolist(), dtype=float)
            bound_prev = bound
            power = power * Xm
    raise ConvergenceError(f"matrix Mittag-Leffler series exceeded {max_terms} terms")


def ml_matrix(a: float, b: float, X, *, z_max: float = special.Z_MAX,
              max_terms: int = special.ML_TERM_CAP) -> np.ndarray:
    r"""Matrix Mittag-Leffler function ``sum_k X**k / Gamma(a k + b)``.

    The raw power series is used; it stops once the next term's norm drops
    below ``1e-15 (1 + ||sum||)`` while the scalar majorant
    ``||X||**k / Gamma(a k + b)`` is decreasing.  If the partial sums cancel
    so much that double precision cannot deliver the result, the series is
    re-summed in extended precision.

    Raises
    ------
    DomainError
        ``||X|| > z_max`` (max-row-sum norm) or a malformed matrix.
    ConvergenceError
        Term cap reached.
    """
    if a <= 0 or b <= 0:
        raise DomainError(f"Mittag-Leffler parameters must be positive, got a={a}, b={b}")
    X = as_generator(X)
    nx = float(opnorm(X))
    if nx > z_max:
        raise DomainError(f"||X|| = {nx:.6g} exceeds the evaluation domain {z_max}")
    d = X.shape[0]
    acc = np.eye(d) * special.rgamma(b)
    if nx == 0.0:
        return acc
    power = np.eye(d)
    magnitude = opnorm(acc)
    log_nx = math.log(nx)
    bound_prev = math.inf
    for k in range(1, max_terms):
        power = power @ X
        coef = special.rgamma(a * k + b)
        term = power * coef
        tnorm = float(opnorm(term))
        bound = math.exp(k * log_nx - special.lgamma(a * k + b))
        acc = acc + term
        magnitude += tnorm
        if bound < special.SERIES_EPS * (1.0 + float(opnorm(acc))) and bound <= bound_prev:
            break
        bound_prev = bound
    else:
        raise ConvergenceError(f"matrix Mittag-Leffler series exceeded {max_terms} terms")
    if magnitude * _ROUNDING > _CANCEL_LIMIT * (1.0 + float(opnorm(acc))):
        return _ml_matrix_mpmath(a, b, X, max_terms)
    return acc


def ml_matrix_batch(a: float, b: float, A, z, *, z_max: float = special.Z_MAX,
                    max_terms: int = special.ML_TERM_CAP) -> np.ndarray:
    """``E_{a,b}(z_j A)`` for every non-negative scale ``z_j``; shape ``(m, d, d)``.

    Shares the powers of ``A`` across all scales, which is what makes
    sampling a family on thousands of quadrature nodes cheap.  Scales whose
    series cancels too much are delegated to :func:`ml_matrix`.
    """
    A = as_generator(A)
    z = np.asarray(z, dtype=float).ravel()
    if np.any(z < 0):
        raise DomainError("batch scales must be non-negative")
    d = A.shape[0]
    nA = float(opnorm(A))
    zmax = float(z.max()) if z.size else 0.0
    if zmax * nA > z_max:
        raise DomainError(f"||z A|| = {zmax * nA:.6g} exceeds the evaluation domain {z_max}")
    out = np.broadcast_to(np.eye(d) * special.rgamma(b), (z.size, d, d)).copy()
    if nA == 0.0 or zmax == 0.0:
        return out
    r = zmax * nA
    log_r = math.log(r)
    bound_prev = math.inf
    for K in range(1, max_terms):
        bound = math.exp(K * log_r - special.lgamma(a * K + b))
        if bound < 1e-17 and bound <= bound_prev:
            break
        bound_prev = bound
    else:
        raise ConvergenceError(f"matrix Mittag-Leffler series exceeded {max_terms} terms")
    An = A / nA
    powers = np.empty((K, d, d))
    powers[0] = np.eye(d)
    for k in range(1, K):
        powers[k] = powers[k - 1] @ An
    k = np.arange(K)
    zs = z * nA
    with np.errstate(divide="ignore"):
        logz = np.where(zs > 0, np.log(np.where(zs > 0, zs, 1.0)), -np.inf)
    with np.errstate(invalid="ignore"):
        logc = k[None, :] * logz[:, None] - special.lgamma(a * k + b)[None, :]
    logc[:, 0] = -special.lgamma(b)
    coef = np.exp(logc)
    out = np.einsum("mk,kij->mij", coef, powers)
    magnitude = coef @ opnorm(powers)
    risky = magnitude * _ROUNDING > _CANCEL_LIMIT * (1.0 + opnorm(out))
    for j in np.flatnonzero(risky):
        out[j] = ml_matrix(a, b, z[j] * A, z_max=z_max, max_terms=max_terms)
    return out


def _family_batch(kind: FamilyKind, alpha: float, A, times) -> np.ndarray:
    times = np.asarray(times, dtype=float).ravel()
    if np.any(times < 0):
        raise DomainError("family evaluation needs t >= 0")
    z = times ** alpha
    if kind == "cosine":
        return ml_matrix_batch(alpha, 1.0, A, z)
    if kind == "sine":
        return times[:, None, None] * ml_matrix_batch(alpha, 2.0, A, z)
    if kind == "riemann_liouville":
        return (times ** (alpha - 1.0))[:, None, None] * ml_matrix_batch(alpha, alpha, A, z)
    raise ValueError(f"unknown family kind {kind!r}")


def family_values(kind: FamilyKind, alpha: float, A, times) -> np.ndarray:
    """Sample one family at many times; returns ``(m, d, d)``."""
    return _family_batch(kind, check_alpha(alpha), as_generator(A), times)


def _single(kind, alpha, t, A):
    alpha = check_alpha(alpha)
    A = as_generator(A)
    t = float(t)
    if t < 0:
        raise DomainError("family evaluation needs t >= 0")
    d = A.shape[0]
    if t == 0.0:
        value = np.eye(d) if kind == "cosine" else np.zeros((d, d))
        return FamilyEvaluation(0.0, kind, value)
    X = t ** alpha * A
    if kind == "cosine":
        value = ml_matrix(alpha, 1.0, X)
    elif kind == "sine":
        value = t * ml_matrix(alpha, 2.0, X)
    else:
        value = t ** (alpha - 1.0) * ml_matrix(alpha, alpha, X)
    return FamilyEvaluation(t, kind, value)


def cosine_family(alpha: float, t: float, A) -> FamilyEvaluation:
    """``C_alpha(t; A) = E_{alpha,1}(t**alpha A)``; the identity at ``t = 0``."""
    return _single("cosine", alpha, t, A)


def sine_family(alpha: float, t: float, A) -> FamilyEvaluation:
    """``S_alpha(t; A) = int_0^t C_alpha(s; A) ds = t E_{alpha,2}(t**alpha A)``."""
    return _single("sine", alpha, t, A)


def rl_family(alpha: float, t: float, A) -> FamilyEvaluation:
    """Riemann-Liouville family ``T_alpha(t; A) = t**(alpha-1) E_{alpha,alpha}(t**alpha A)``.

    This is the order ``alpha - 1`` fractional integral of the cosine family.
    """
    return _single("riemann_liouville", alpha, t, A)


def fractional_integral_of_cosine(alpha: float, A, order: float, times,
                                  quad: QuadratureConfig | None = None):
    """``int_0^t g_order(t - r) C_alpha(r) dr`` by quadrature on sampled ``C``.

    Returns ``(values, error_estimate)``.
    """
    alpha = check_alpha(alpha)
    A = as_generator(A)
    quad = quad or QuadratureConfig()
    d = A.shape[0]

    def kernel(u):
        return special.g_kernel(order, u)

    def feed(s):
        return _family_batch("cosine", alpha, A, s)

    values, err = refined_convolution(times, kernel, feed, quad)
    return values.reshape(-1, d, d), err


def check_functional_equation(alpha: float, A, s: float, t: float,
                              quad: QuadratureConfig | None = None) -> float:
    """Residual of the cosine functional equation at ``(s, t)``.

    Computes ``|| C(s) J(t) - J(s) C(t) - J(t) + J(s) ||`` with
    ``J(x) = int_0^x g_alpha(x - r) C(r) dr`` evaluated by quadrature
    against sampled ``C``.  Residuals at quadrature level certify the
    axiom numerically.

    Raises
    ------
    QuadratureError
        If refinement does not settle.
    """
    alpha = check_alpha(alpha)
    A = as_generator(A)
    d = A.shape[0]
    if s < 0 or t < 0:
        raise DomainError("functional equation needs s, t >= 0")
    J = {}
    for x in {float(s), float(t)}:
        if x == 0.0:
            J[x] = np.zeros((d, d))
        else:
            J[x] = fractional_integral_of_cosine(alpha, A, alpha, [x], quad)[0][0]
    Cs = cosine_family(alpha, s, A).value
    Ct = cosine_family(alpha, t, A).value
    resid = Cs @ J[float(t)] - J[float(s)] @ Ct - J[float(t)] + J[float(s)]
    return float(opnorm(resid))


def generator_limit(alpha: float, A, x, t_sequence) -> np.ndarray:
    """Difference quotients ``Gamma(alpha+1) (C(t) x - x) / t**alpha``.

    One row per entry of the strictly decreasing, positive ``t_sequence``;
    the rows approach ``A x`` at rate ``O(t**alpha)``.
    """
    alpha = check_alpha(alpha)
    A = as_generator(A)
    x = np.asarray(x, dtype=float).ravel()
    if x.size != A.shape[0]:
        raise DomainError("vector dimension does not match the generator")
    ts = np.asarray(t_sequence, dtype=float).ravel()
    if np.any(ts <= 0) or np.any(np.diff(ts) >= 0):
        raise DomainError("t_sequence must be positive and strictly decreasing")
    g = special.gamma(alpha + 1.0)
    out = []
    for t in ts:
        C = cosine_family(alpha, t, A).value
        out.append(g * (C @ x - x) / t ** alpha)
    return np.array(out)


def growth_rate(alpha: float, A) -> float:
    """Asymptotic exponential rate of ``C_alpha(t; A)``: ``max(0, Re mu**(1/alpha))``."""
    mu = np.linalg.eigvals(as_generator(A)).astype(complex)
    rates = np.real(mu ** (1.0 / alpha))
    rate = max(0.0, float(rates.max()))
    return 0.0 if rate < 1e-12 else rate


def estimate_exponential_bound(alpha: float, A, grid) -> ExponentialBound:
    """Grid estimate of ``(M, omega)`` with ``||C(t)|| <= M exp(omega t)``.

    ``omega`` is the eigenvalue growth rate and ``M`` the largest
    ``||C(t)|| exp(-omega t)`` seen on ``grid``, floored at 1.  Only a
    statement about the grid, not a global bound.
    """
    alpha = check_alpha(alpha)
    A = as_generator(A)
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0 or np.any(grid < 0):
        raise DomainError("grid must be non-empty with t >= 0")
    omega = growth_rate(alpha, A)
    C = _family_batch("cosine", alpha, A, grid)
    M = float(np.max(opnorm(C) * np.exp(-omega * grid)))
    return ExponentialBound(max(1.0, M), omega)


__all__ = [
    "ExponentialBound", "FamilyEvaluation", "QuadratureError", "check_alpha", "as_generator",
    "check_functional_equation", "cosine_family", "estimate_exponential_bound",
    "family_values", "fractional_integral_of_cosine", "generator_limit", "growth_rate",
    "ml_matrix", "ml_matrix_batch", "opnorm", "rl_family", "sine_family",
]

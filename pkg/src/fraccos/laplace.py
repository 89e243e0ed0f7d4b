"""Numerical Laplace transforms of the families and their perturbation series.

``int_0^inf e^{-lambda t} F(t) dt`` is split into a composite quadrature on
``[0, T_max]`` and a certified tail.  If ``||F(t)|| <= sum_k c_k e^{wt} g_{a_k}(t)``
then, with ``mu = lambda - w``,

    int_T^inf e^{-lambda t} ||F(t)|| dt <= sum_k c_k mu**-a_k Q(a_k, mu T)

where ``Q`` is the regularised upper incomplete gamma function.  The
identities checked here are::

    L[C](lambda)  = lambda**(alpha-1) R        L[S](lambda) = lambda**(alpha-2) R
    L[T](lambda)  = R                          R = (lambda**alpha - A)**-1

together with their per-term and summed versions for ``A + B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.special import gammaincc

from .errors import DomainError, TailTooLargeError
from .families import (ExponentialBound, as_generator, check_alpha,
                       estimate_exponential_bound, family_values, opnorm)
from .quadrature import QuadratureConfig, TimeGrid
from .resolvent import (ResolventPoint, neumann_resolvent, perturbed_resolvent_direct,
                        resolvent)
from .series import convolve_family, initial_term, perturbed_cosine, perturbed_sine

__all__ = [
    "LaplaceQuadrature", "LaplaceValue", "TransformCheck", "tail_bound",
    "laplace_of_family", "check_transform_relations", "check_term_recursion_transform",
    "check_perturbed_transforms",
]

FamilyKind = Literal["cosine", "sine", "riemann_liouville", "perturbed_cosine",
                     "perturbed_sine", "term_n"]


@dataclass(frozen=True)
class LaplaceQuadrature:
    """Truncated Laplace quadrature on ``[0, T_max]``.

    ``tol`` is the requested accuracy; a family whose certified tail
    exceeds it is rejected.  The grid is a :class:`~fraccos.quadrature.TimeGrid`
    with ``panels`` uniform panels of ``nodes_per_panel`` Gauss nodes.
    """

    T_max: float = 20.0
    panels: int = 20
    nodes_per_panel: int = 16
    tol: float = 1e-5
    grading_levels: int = 24
    series_tol: float = 1e-9

    def __post_init__(self):
        if not self.T_max > 0 or not self.tol > 0:
            raise DomainError("T_max and tol must be positive")

    @property
    def series_quad(self) -> QuadratureConfig:
        return QuadratureConfig(panels=self.panels, nodes_per_panel=self.nodes_per_panel,
                                grading_levels=self.grading_levels)

    def grid(self) -> TimeGrid:
        return self.series_quad.grid(self.T_max)


@dataclass
class LaplaceValue:
    """Truncated transform, its certified tail and a quadrature error estimate."""

    value: np.ndarray
    tail_bound: float
    quad_error: float

    @property
    def allowance(self) -> float:
        return self.tail_bound + self.quad_error


@dataclass
class TransformCheck:
    """Residuals of transform identities.

    ``residuals`` must each stay within ``allowance``; ``informational``
    holds residuals of variants that are not expected to vanish.
    """

    residuals: dict
    allowance: float
    tail_bound: float
    quad_error: float
    informational: dict = field(default_factory=dict)

    def ok(self) -> bool:
        return all(r <= self.allowance for r in self.residuals.values())

    def __iter__(self):
        return iter(self.residuals.values())


# --------------------------------------------------------------------------
# tails


def _gamma_tail(coef_log: float, a: float, mu: float, T: float) -> float:
    """``exp(coef_log) * int_T^inf e^{-mu t} g_a(t) dt``."""
    if coef_log == -math.inf:
        return 0.0
    return math.exp(coef_log - a * math.log(mu)) * float(gammaincc(a, mu * T))


def tail_bound(kind: str, lam: float, alpha: float, bound: ExponentialBound, T_max: float,
               B_norm: float = 0.0, n: int = 0, term: str = "sine") -> float:
    """Closed-form bound on ``int_{T_max}^inf e^{-lambda t} ||F(t)|| dt``.

    Growth bounds used: ``||C|| <= M e^{wt}``, ``||S|| <= M e^{wt} t``,
    ``||T|| <= M e^{wt} g_alpha(t)``, the term majorants of
    :func:`fraccos.series.term_majorant`, and their sums for the perturbed
    families (``E_{alpha,1}`` / ``t E_{alpha,2}`` majorants).

    Raises
    ------
    TailTooLargeError
        If ``lambda <= omega`` or the perturbed majorant is not
        Laplace-integrable (``M ||B|| <= (lambda - omega)**alpha`` fails).
    """
    mu = lam - bound.omega
    if not mu > 0:
        raise TailTooLargeError(f"lambda = {lam} must exceed omega = {bound.omega}")
    logM = math.log(bound.M)
    if kind == "cosine":
        return _gamma_tail(logM, 1.0, mu, T_max)
    if kind == "sine":
        return _gamma_tail(logM, 2.0, mu, T_max)
    if kind == "riemann_liouville":
        return _gamma_tail(logM, alpha, mu, T_max)
    logb = math.log(B_norm) if B_norm > 0 else -math.inf
    if kind == "term_n":
        if n > 0 and B_norm == 0.0:
            return 0.0
        order = {"sine": n * alpha + 2.0, "generated": n * alpha + 1.0,
                 "literal": (n - 1) * alpha + 3.0 if n > 0 else 1.0}[term]
        return _gamma_tail((n + 1) * logM + (n * logb if n else 0.0), order, mu, T_max)
    if kind in ("perturbed_cosine", "perturbed_sine"):
        shift = 1.0 if kind == "perturbed_cosine" else 2.0
        if B_norm == 0.0:
            return _gamma_tail(logM, shift, mu, T_max)
        ratio = bound.M * B_norm / mu ** alpha
        if ratio >= 1.0:
            raise TailTooLargeError(
                f"perturbed majorant not integrable at lambda = {lam} (M||B||/mu^alpha = {ratio:.3g})")
        total = 0.0
        for k in range(100_000):
            piece = _gamma_tail((k + 1) * logM + (k * logb if k else 0.0), k * alpha + shift, mu, T_max)
            total += piece
            # remaining pieces are below piece * ratio / (1 - ratio) once Q has saturated
            if k > 0 and piece <= 1e-17 * total + 1e-300 and ratio ** k < 1e-17:
                break
        return total
    raise ValueError(f"unknown family kind {kind!r}")


# --------------------------------------------------------------------------
# transforms


def _bound(alpha, A, lq: LaplaceQuadrature, bound):
    if bound is not None:
        return bound
    return estimate_exponential_bound(alpha, A, np.concatenate([[0.0], lq.grid().nodes]))


def _integrate(nodal: np.ndarray, grid: TimeGrid, lam: float) -> tuple[np.ndarray, float]:
    fine = TimeGrid(grid.T, 2 * grid.panels, grid.nodes_per_panel, grid.grading_levels)
    value = grid.integrate(nodal, np.exp(-lam * grid.nodes))
    check = fine.integrate(grid.interpolate(nodal, fine.nodes), np.exp(-lam * fine.nodes))
    return value, float(opnorm(value - check))


def _series_nodal(kind, alpha, A, B, lq, bound, n=None, term="sine"):
    """Nodal values on ``lq.grid()`` of a perturbed family or of one term,
    with the accumulated convolution error estimate."""
    quad = lq.series_quad
    t_end = np.array([lq.T_max])
    if kind == "perturbed_cosine":
        _, rep = perturbed_cosine(alpha, t_end, A, B, lq.series_tol, quad, bound)
    elif kind == "perturbed_sine":
        _, rep = perturbed_sine(alpha, t_end, A, B, lq.series_tol, quad, bound)
    else:
        last = _term_chain(alpha, A, B, quad, n, term, t_end)
        return last.nodal, last.quad_error
    nodal = sum(tm.nodal for tm in rep.terms)
    return nodal, rep.quad_error * len(rep.terms)


def _term_chain(alpha, A, B, quad, n, term, t_end):
    if term == "literal" and n > 0:
        s = _term_chain(alpha, A, B, quad, n - 1, "sine", t_end)
        out = convolve_family("cosine", alpha, A, B, s)
        out.quad_error += s.quad_error
        return out
    first = "sine_term" if term == "sine" else "cosine_term"
    x = initial_term(first, alpha, t_end, A, B, quad)
    err = 0.0
    for _ in range(n):
        x = convolve_family("riemann_liouville", alpha, A, B, x)
        err += x.quad_error
    x.quad_error = err
    return x


def laplace_of_family(kind: FamilyKind, lam: float, alpha: float, A, B=None,
                      lq: LaplaceQuadrature | None = None, *, n: int | None = None,
                      term: Literal["sine", "generated", "literal"] = "sine",
                      bound: ExponentialBound | None = None) -> LaplaceValue:
    """``int_0^inf e^{-lambda t} F(t) dt`` for one family or series term.

    ``kind="term_n"`` selects the ``n``-th series term; ``term`` picks the
    sine terms, the generated cosine terms or the literal cosine terms.

    Raises
    ------
    TailTooLargeError
        If the certified tail exceeds ``lq.tol``.
    """
    alpha = check_alpha(alpha)
    A = as_generator(A)
    lq = lq or LaplaceQuadrature()
    if not lam > 0:
        raise DomainError("lambda must be positive")
    B = np.zeros_like(A) if B is None else as_generator(B)
    bound = _bound(alpha, A, lq, bound)
    b = float(opnorm(B))
    if kind == "term_n" and (n is None or n < 0):
        raise DomainError("term_n needs a term index n >= 0")
    tail = tail_bound(kind, lam, alpha, bound, lq.T_max, b, n or 0, term)
    if tail > lq.tol:
        raise TailTooLargeError(f"tail bound {tail:.3e} exceeds tolerance {lq.tol:.1e}")
    grid = lq.grid()
    if kind in ("cosine", "sine", "riemann_liouville"):
        nodal, conv_err = family_values(kind, alpha, A, grid.nodes), 0.0
    else:
        nodal, conv_err = _series_nodal(kind, alpha, A, B, lq, bound, n, term)
    value, err = _integrate(nodal, grid, lam)
    # pointwise convolution error integrated against e^{-lambda t}
    return LaplaceValue(value, tail, err + conv_err / lam)


def _resolvent_at(lam, alpha, A):
    point = ResolventPoint(lam, alpha)
    return point, resolvent(point, A)


def check_transform_relations(lam: float, alpha: float, A, bound: ExponentialBound | None = None,
                              lq: LaplaceQuadrature | None = None) -> TransformCheck:
    """Residuals of ``L[C] = lambda^(alpha-1) R``, ``L[S] = lambda^(alpha-2) R``, ``L[T] = R``."""
    alpha = check_alpha(alpha)
    A = as_generator(A)
    lq = lq or LaplaceQuadrature()
    bound = _bound(alpha, A, lq, bound)
    point, R = _resolvent_at(lam, alpha, A)
    targets = {"cosine": point.scale * R, "sine": lam ** (alpha - 2.0) * R, "riemann_liouville": R}
    res, tails, errs = {}, 0.0, 0.0
    for kind, target in targets.items():
        lv = laplace_of_family(kind, lam, alpha, A, lq=lq, bound=bound)
        res[kind] = float(opnorm(lv.value - target))
        tails = max(tails, lv.tail_bound)
        errs = max(errs, lv.quad_error)
    return TransformCheck(res, lq.tol + tails + errs, tails, errs)


def check_term_recursion_transform(n: int, lam: float, alpha: float, A, B,
                                   lq: LaplaceQuadrature | None = None,
                                   bound: ExponentialBound | None = None) -> TransformCheck:
    """Per-term transform identities for the ``n``-th series term.

    Asserted::

        L[S_n]        = R B L[S_{n-1}]            = lambda^(alpha-2) R (B R)^n
        L[C_n^lit]    = lambda^(alpha-1) R B L[S_{n-1}]
        L[C_n^gen]    = R B L[C_{n-1}^gen]        = lambda^(alpha-1) R (B R)^n

    Informational: ``L[S_n] - R (B R)^n`` (no ``lambda^(alpha-2)``) and
    ``L[C_n^lit] - lambda^(alpha-1) R (B R)^n``; both vanish only at
    ``alpha = 2``.
    """
    if n < 1:
        raise DomainError("term index must be >= 1")
    alpha = check_alpha(alpha)
    A = as_generator(A)
    B = as_generator(B)
    lq = lq or LaplaceQuadrature()
    bound = _bound(alpha, A, lq, bound)
    point, R = _resolvent_at(lam, alpha, A)
    BRn = np.linalg.matrix_power(B @ R, n)

    def lt(k, term):
        return laplace_of_family("term_n", lam, alpha, A, B, lq, n=k, term=term, bound=bound)

    S_n, S_p = lt(n, "sine"), lt(n - 1, "sine")
    Cg_n, Cg_p = lt(n, "generated"), lt(n - 1, "generated")
    Cl_n = lt(n, "literal")
    parts = [S_n, S_p, Cg_n, Cg_p, Cl_n]
    tails = sum(p.tail_bound for p in parts)
    errs = sum(p.quad_error for p in parts)
    amp = 1.0 + max(1.0, point.scale) * float(opnorm(R)) * float(opnorm(B))
    res = {
        "sine_recursion": float(opnorm(S_n.value - R @ B @ S_p.value)),
        "sine_closed_form": float(opnorm(S_n.value - lam ** (alpha - 2.0) * R @ BRn)),
        "cosine_literal_recursion": float(opnorm(Cl_n.value - point.scale * R @ B @ S_p.value)),
        "cosine_generated_recursion": float(opnorm(Cg_n.value - R @ B @ Cg_p.value)),
        "cosine_generated_closed_form": float(opnorm(Cg_n.value - point.scale * R @ BRn)),
    }
    info = {
        "sine_closed_form_without_scale": float(opnorm(S_n.value - R @ BRn)),
        "cosine_literal_closed_form": float(opnorm(Cl_n.value - point.scale * R @ BRn)),
    }
    return TransformCheck(res, lq.tol + amp * (tails + errs), tails, errs, info)


def check_perturbed_transforms(lam: float, alpha: float, A, B,
                               lq: LaplaceQuadrature | None = None,
                               bound: ExponentialBound | None = None) -> TransformCheck:
    """Transforms of the perturbed families against the perturbed resolvent.

    Asserted: ``L[C(A+B)] = lambda^(alpha-1) R(A+B)`` and
    ``L[S(A+B)] = lambda^(alpha-2) R(A+B)``, with ``R(A+B)`` from both the
    Neumann series and direct inversion.  Informational:
    ``L[S(A+B)] - R(A+B)``.

    Raises
    ------
    HypothesisError
        When ``||B R(lambda^alpha; A)|| >= 1``.
    """
    alpha = check_alpha(alpha)
    A = as_generator(A)
    B = as_generator(B)
    lq = lq or LaplaceQuadrature()
    bound = _bound(alpha, A, lq, bound)
    point = ResolventPoint(lam, alpha)
    neumann, _ = neumann_resolvent(point, A, B)
    direct = perturbed_resolvent_direct(point, A, B)
    C = laplace_of_family("perturbed_cosine", lam, alpha, A, B, lq, bound=bound)
    S = laplace_of_family("perturbed_sine", lam, alpha, A, B, lq, bound=bound)
    cs, ss = point.scale, lam ** (alpha - 2.0)
    res = {
        "cosine_neumann": float(opnorm(C.value - cs * neumann)),
        "cosine_direct": float(opnorm(C.value - cs * direct)),
        "sine_neumann": float(opnorm(S.value - ss * neumann)),
        "sine_direct": float(opnorm(S.value - ss * direct)),
    }
    info = {"sine_without_scale": float(opnorm(S.value - neumann))}
    tails = C.tail_bound + S.tail_bound
    errs = C.quad_error + S.quad_error
    return TransformCheck(res, lq.tol + tails + errs, tails, errs, info)

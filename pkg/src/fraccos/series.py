"""Bounded perturbation of a fractional cosine family by iterated convolution.

Given the families of ``A`` and a bounded ``B``, the families of ``A + B``
are built as series of convolution terms::

    S_0 = S,   S_n(t) = int_0^t T(t-s) B S_{n-1}(s) ds
    C_0 = C,   C_n(t) = int_0^t T(t-s) B C_{n-1}(s) ds          ("generated")

The second line is what makes ``sum_n C_n = E_{alpha,1}(t**alpha (A+B))``
for every ``alpha``.  The variant that convolves the cosine kernel against
the sine terms::

    C_n(t) = int_0^t C(t-s) B S_{n-1}(s) ds                     ("literal")

coincides with it only at ``alpha = 2``; it is kept because its terms obey
the sharper ``g_{(n-1)alpha+3}`` induction bound and its own majorant.

Terms live on a graded :class:`~fraccos.quadrature.TimeGrid` covering
``[0, max(t_grid)]`` and are read off at the requested times by
interpolation.  Truncation is driven by the analytic term majorants.
"""

from __future__ import annotations

import math
import os
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import special
from .errors import ConvergenceError, DomainError, QuadratureError
from .families import (ExponentialBound, as_generator, check_alpha,
                       estimate_exponential_bound, family_values, opnorm)
from .quadrature import ConvolutionPlan, QuadratureConfig, TimeGrid

__all__ = [
    "QuadratureConfig", "SeriesTerm", "TruncationReport", "MajorantReport",
    "initial_term", "convolve_family", "perturbed_cosine", "perturbed_sine",
    "perturbed_families", "term_majorant", "induction_bound_check", "majorant_check",
    "classical_perturbed_families", "solve_cauchy", "term_cap",
]

TermKind = Literal["cosine_term", "sine_term"]
Recursion = Literal["generated", "literal", "sine", "classical"]

#: Environment variable overriding :func:`term_cap`.
TERM_CAP_ENV = "FRACCOS_TERM_CAP"
DEFAULT_TERM_CAP = 200


def term_cap() -> int:
    """Maximum number of series terms (``$FRACCOS_TERM_CAP`` or 200)."""
    raw = os.environ.get(TERM_CAP_ENV)
    if raw is None:
        return DEFAULT_TERM_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise DomainError(f"{TERM_CAP_ENV} must be an integer, got {raw!r}") from None
    if cap < 1:
        raise DomainError(f"{TERM_CAP_ENV} must be positive")
    return cap


# --------------------------------------------------------------------------
# discretisation workspace (shared by every term of one problem)


class _Workspace:
    """Grid, convolution plans and the n = 0 closed forms for one ``(alpha, A, T)``."""

    def __init__(self, alpha, A, T, quad: QuadratureConfig, kernels):
        self.alpha = alpha
        self.A = A
        self.quad = quad
        self.grid: TimeGrid = quad.grid(T)
        self.kernels = kernels        # name -> family kind used as convolution kernel
        self._plans = {}
        self._feeds = {}
        self._base = {}
        self.level = 0

    def plan(self, kernel: str, level: int) -> ConvolutionPlan:
        key = (kernel, level)
        if key not in self._plans:
            h, inner = self.quad.level(level)
            kind = self.kernels[kernel]
            self._plans[key] = ConvolutionPlan(
                self.grid, lambda u: family_values(kind, self.alpha, self.A, u),
                de_step=h, piece_width=self.quad.piece_width, interior_nodes=inner)
        return self._plans[key]

    def base_nodal(self, kind: str) -> np.ndarray:
        if kind not in self._base:
            self._base[kind] = family_values(kind, self.alpha, self.A, self.grid.nodes)
        return self._base[kind]

    def base_feed(self, kind: str, kernel: str, level: int) -> np.ndarray:
        key = (kind, kernel, level)
        if key not in self._feeds:
            plan = self.plan(kernel, level)
            self._feeds[key] = family_values(kind, self.alpha, self.A, plan.pairs.s)
        return self._feeds[key]

    def convolve(self, kernel: str, B: np.ndarray, prev_nodal, prev_base: str | None):
        """Nodal values of ``int_0^t K(t-s) B F(s) ds`` with refinement.

        ``prev_base`` names the closed-form family when ``F`` is a zeroth
        term; otherwise ``prev_nodal`` is interpolated.
        """
        tol = self.quad.target_tol
        last_err = math.inf
        j = self.level
        while j < self.level + self.quad.max_refinements + 1:
            vals = []
            for lev in (j, j + 1):
                plan = self.plan(kernel, lev)
                feed = (self.base_feed(prev_base, kernel, lev) if prev_base
                        else plan.feed_at_pairs(prev_nodal))
                vals.append(plan.apply(feed, left=B))
            err = float(np.max(np.abs(vals[1] - vals[0]))) if vals[0].size else 0.0
            if err <= tol:
                self.level = j
                return vals[1], err
            if err >= last_err:
                raise QuadratureError(
                    f"convolution refinement stalled at error estimate {err:.3e} > {tol:.1e}")
            last_err = err
            j += 1
        raise QuadratureError(f"convolution did not reach {tol:.1e} (estimate {last_err:.3e})")


_WORKSPACES: OrderedDict = OrderedDict()
_WORKSPACE_CACHE = 6


def _workspace(alpha, A, T, quad, classical=False) -> _Workspace:
    key = (alpha, A.tobytes(), A.shape, float(T), quad, classical)
    ws = _WORKSPACES.get(key)
    if ws is None:
        if classical:
            kernels = {"cosine": "cosine", "sine": "sine"}
        else:
            kernels = {"cosine": "cosine", "riemann_liouville": "riemann_liouville"}
        ws = _Workspace(alpha, A, T, quad, kernels)
        _WORKSPACES[key] = ws
        while len(_WORKSPACES) > _WORKSPACE_CACHE:
            _WORKSPACES.popitem(last=False)
    else:
        _WORKSPACES.move_to_end(key)
    return ws


# --------------------------------------------------------------------------
# data types


@dataclass
class SeriesTerm:
    """One term ``C_n`` or ``S_n`` sampled on ``t_grid``.

    ``recursion`` records how a cosine term was produced (``"generated"``
    or ``"literal"``); sine terms carry ``"sine"`` and terms of the
    ``alpha = 2`` classical path ``"classical"``.
    """

    n: int
    kind: TermKind
    t_grid: np.ndarray
    values: np.ndarray
    term_norm: np.ndarray
    alpha: float
    recursion: Recursion
    quad_error: float = 0.0
    nodal: np.ndarray | None = field(default=None, repr=False)
    _ws: _Workspace | None = field(default=None, repr=False, compare=False)


@dataclass
class TruncationReport:
    """Diagnostics of one series run.

    ``per_term_norms[n]`` and ``majorant_values[n]`` are arrays over
    ``t_grid``; ``tail_bound`` is the majorant of the discarded terms at
    ``max(t_grid)``.
    """

    n_used: int
    per_term_norms: list
    majorant_values: list
    stop_reason: Literal["tolerance_met", "term_cap"]
    tail_bound: float
    quad_error: float
    bound: ExponentialBound
    terms: list = field(default_factory=list, repr=False)

    def domination_ok(self, rel: float = 1e-9) -> bool:
        return all(np.all(nrm <= maj * (1 + rel) + 1e-300)
                   for nrm, maj in zip(self.per_term_norms[1:], self.majorant_values[1:]))


# --------------------------------------------------------------------------
# majorants


def _log_or_neg_inf(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def term_majorant(which: str, n: int, alpha: float, bound: ExponentialBound,
                  B_norm: float, t) -> np.ndarray:
    """Induction bound on the norm of the ``n``-th term.

    ``which`` is one of

    * ``"sine"``:       ``M**(n+1) ||B||**n e**(wt) g_{n alpha + 2}(t)``
    * ``"generated"``:  ``M**(n+1) ||B||**n e**(wt) g_{n alpha + 1}(t)``
    * ``"literal"``:    ``M**(n+1) ||B||**n e**(wt) g_{(n-1) alpha + 3}(t)``
      for ``n >= 1`` (``n = 0`` is answered with ``M e**(wt)``, the true
      bound on ``C_0``).
    """
    t = np.asarray(t, dtype=float)
    if which in ("sine", "classical_sine"):
        order = n * alpha + 2.0
    elif which in ("generated", "classical"):
        order = n * alpha + 1.0
    elif which == "literal":
        if n == 0:
            return bound.M * np.exp(bound.omega * t)
        order = (n - 1) * alpha + 3.0
    else:
        raise ValueError(f"unknown majorant family {which!r}")
    if n > 0 and B_norm == 0.0:
        return np.zeros_like(t)
    logc = (n + 1) * math.log(bound.M) - special.lgamma(order)
    if n > 0:
        logc += n * _log_or_neg_inf(B_norm)
    pos = t > 0
    tp = np.where(pos, t, 1.0)
    out = np.exp(logc + bound.omega * tp + (order - 1.0) * np.log(tp))
    return np.where(pos, out, 1.0 * bound.M if order == 1.0 else 0.0)


def _tail(which, n_last, alpha, bound, b, T, cap=100_000) -> float:
    if b == 0.0:
        return 0.0
    acc = 0.0
    prev = math.inf
    for n in range(n_last + 1, n_last + 1 + cap):
        m = float(term_majorant(which, n, alpha, bound, b, T))
        acc += m
        if m < 1e-18 * (1.0 + acc) and m <= prev:
            return acc
        prev = m
    raise ConvergenceError("majorant tail did not converge")


# --------------------------------------------------------------------------
# terms


def _prepare(alpha, t_grid, A, B):
    alpha = check_alpha(alpha)
    A = as_generator(A)
    B = as_generator(B)
    if A.shape != B.shape:
        raise DomainError(f"A and B shapes differ: {A.shape} vs {B.shape}")
    t_grid = np.asarray(t_grid, dtype=float).ravel()
    if t_grid.size == 0 or np.any(t_grid < 0) or not np.all(np.isfinite(t_grid)):
        raise DomainError("t_grid must be non-empty, finite and non-negative")
    return alpha, t_grid, A, B


def _sample(ws: _Workspace, nodal: np.ndarray, t_grid: np.ndarray) -> np.ndarray:
    vals = ws.grid.interpolate(nodal, t_grid)
    vals[t_grid == 0.0] = 0.0
    return vals


def initial_term(kind: TermKind, alpha: float, t_grid, A, B=None,
                 quad: QuadratureConfig | None = None, *, classical: bool = False) -> SeriesTerm:
    """The zeroth term (the unperturbed family) on ``t_grid``."""
    alpha, t_grid, A, B = _prepare(alpha, t_grid, A, np.zeros_like(as_generator(A)) if B is None else B)
    quad = quad or QuadratureConfig()
    fam = "cosine" if kind == "cosine_term" else "sine"
    values = family_values(fam, alpha, A, t_grid)
    T = float(t_grid.max())
    ws = _workspace(alpha, A, T, quad, classical) if T > 0 else None
    nodal = ws.base_nodal(fam) if ws else None
    if classical:
        recursion = "classical"
    else:
        recursion = "generated" if kind == "cosine_term" else "sine"
    return SeriesTerm(0, kind, t_grid, values, opnorm(values), alpha, recursion,
                      nodal=nodal, _ws=ws)


def convolve_family(kernel_family: Literal["cosine", "riemann_liouville", "sine"],
                    alpha: float, A, B, prev: SeriesTerm,
                    quad: QuadratureConfig | None = None) -> SeriesTerm:
    """Next term ``int_0^t K(t-s) B prev(s) ds``.

    ========================  ===============  ==========================
    kernel_family             prev.kind        result
    ========================  ===============  ==========================
    ``riemann_liouville``     ``sine_term``    ``S_{n}``
    ``cosine``                ``sine_term``    literal ``C_{n}``
    ``riemann_liouville``     ``cosine_term``  generated ``C_{n}``
    ``sine`` (alpha = 2)      either           classical ``S_n`` / ``C_n``
    ========================  ===============  ==========================

    Raises
    ------
    QuadratureError
        If the refinement loop cannot reach ``quad.target_tol``.
    """
    alpha = check_alpha(alpha)
    A = as_generator(A)
    B = as_generator(B)
    ws = prev._ws
    if ws is None:
        if float(np.max(prev.t_grid)) == 0.0:
            zero = np.zeros_like(prev.values)
            kind = prev.kind if kernel_family != "cosine" else "cosine_term"
            return SeriesTerm(prev.n + 1, kind, prev.t_grid, zero, opnorm(zero), alpha,
                              prev.recursion if kernel_family != "cosine" else "literal")
        raise ValueError("prev term carries no grid data; build it with initial_term")
    if quad is not None and quad != ws.quad:
        raise ValueError("quadrature config differs from the one prev was built with")
    if ws.alpha != alpha or not np.array_equal(ws.A, A):
        raise ValueError("prev term belongs to a different (alpha, A)")
    if kernel_family not in ws.kernels:
        raise ValueError(f"kernel {kernel_family!r} not available on this path")
    if prev.recursion == "literal":
        raise ValueError("literal cosine terms do not feed further terms")
    if kernel_family == "cosine" and prev.kind != "sine_term":
        raise ValueError("the cosine kernel is only convolved against sine terms")

    if kernel_family == "cosine":
        kind, recursion = "cosine_term", ("classical" if prev.recursion == "classical" else "literal")
    else:
        kind, recursion = prev.kind, prev.recursion
    base = None
    if prev.n == 0:
        base = "cosine" if prev.kind == "cosine_term" else "sine"
    nodal, err = ws.convolve(kernel_family, B, prev.nodal, base)
    values = _sample(ws, nodal, prev.t_grid)
    return SeriesTerm(prev.n + 1, kind, prev.t_grid, values, opnorm(values), alpha,
                      recursion, quad_error=err, nodal=nodal, _ws=ws)


def _run_series(first: SeriesTerm, next_term, which: str, alpha, A, B, tol,
                bound: ExponentialBound, max_terms):
    b = float(opnorm(B))
    T = float(np.max(first.t_grid))
    terms = [first]
    norms = [first.term_norm]
    majs = [term_majorant(which, 0, alpha, bound, b, first.t_grid)]
    total = first.values.copy()
    qerr = 0.0
    tail = _tail(which, 0, alpha, bound, b, T)
    reason = "tolerance_met"
    while tail >= tol:
        if len(terms) >= max_terms:
            reason = "term_cap"
            raise ConvergenceError(
                f"series needed more than {max_terms} terms (tail bound {tail:.3e} >= {tol:.1e})")
        term = next_term(terms[-1])
        terms.append(term)
        total = total + term.values
        norms.append(term.term_norm)
        majs.append(term_majorant(which, term.n, alpha, bound, b, first.t_grid))
        qerr = max(qerr, term.quad_error)
        tail = _tail(which, term.n, alpha, bound, b, T)
    return total, TruncationReport(len(terms), norms, majs, reason, tail, qerr, bound, terms)


def _bound_for(alpha, A, t_grid, quad, bound):
    if bound is not None:
        return bound
    T = float(np.max(t_grid))
    if T == 0.0:
        return estimate_exponential_bound(alpha, A, [0.0])
    grid = np.concatenate([[0.0], quad.grid(T).nodes, t_grid])
    return estimate_exponential_bound(alpha, A, grid)


def perturbed_sine(alpha: float, t_grid, A, B, tol: float = 1e-8,
                   quad: QuadratureConfig | None = None, bound: ExponentialBound | None = None,
                   max_terms: int | None = None):
    """``S_alpha(t; A + B)`` as the sum of the sine terms.

    Terms are added until the majorant of the remainder at ``max(t_grid)``
    drops below ``tol``.

    Returns
    -------
    values : ndarray, shape (m, d, d)
    report : TruncationReport
    """
    alpha, t_grid, A, B = _prepare(alpha, t_grid, A, B)
    quad = quad or QuadratureConfig()
    bound = _bound_for(alpha, A, t_grid, quad, bound)
    first = initial_term("sine_term", alpha, t_grid, A, B, quad)
    step = lambda prev: convolve_family("riemann_liouville", alpha, A, B, prev)  # noqa: E731
    return _run_series(first, step, "sine", alpha, A, B, tol, bound, max_terms or term_cap())


def perturbed_cosine(alpha: float, t_grid, A, B, tol: float = 1e-8,
                     quad: QuadratureConfig | None = None, bound: ExponentialBound | None = None,
                     max_terms: int | None = None,
                     recursion: Literal["generated", "literal"] = "generated"):
    """``C_alpha(t; A + B)`` as a sum of cosine terms.

    ``recursion="generated"`` (default) sums ``C_n = T * B C_{n-1}`` and
    reproduces ``E_{alpha,1}(t**alpha (A + B))``.  ``recursion="literal"``
    sums ``C_n = C * B S_{n-1}``, which agrees with it only at ``alpha = 2``.

    Returns
    -------
    values : ndarray, shape (m, d, d)
    report : TruncationReport
    """
    alpha, t_grid, A, B = _prepare(alpha, t_grid, A, B)
    quad = quad or QuadratureConfig()
    bound = _bound_for(alpha, A, t_grid, quad, bound)
    max_terms = max_terms or term_cap()
    if recursion == "generated":
        first = initial_term("cosine_term", alpha, t_grid, A, B, quad)
        step = lambda prev: convolve_family("riemann_liouville", alpha, A, B, prev)  # noqa: E731
        return _run_series(first, step, "generated", alpha, A, B, tol, bound, max_terms)
    if recursion != "literal":
        raise ValueError(f"unknown recursion {recursion!r}")
    c0 = initial_term("cosine_term", alpha, t_grid, A, B, quad)
    sine_chain = [initial_term("sine_term", alpha, t_grid, A, B, quad)]

    def step(prev):
        s_prev = sine_chain[-1]
        term = convolve_family("cosine", alpha, A, B, s_prev)
        sine_chain.append(convolve_family("riemann_liouville", alpha, A, B, s_prev))
        return term

    c0 = SeriesTerm(0, "cosine_term", c0.t_grid, c0.values, c0.term_norm, alpha, "literal",
                    nodal=c0.nodal, _ws=c0._ws)
    values, report = _run_series(c0, step, "literal", alpha, A, B, tol, bound, max_terms)
    return values, report


def perturbed_families(alpha, t_grid, A, B, tol=1e-8, quad=None, bound=None, max_terms=None):
    """Both perturbed families; returns ``(C, S, cosine_report, sine_report)``."""
    C, rc = perturbed_cosine(alpha, t_grid, A, B, tol, quad, bound, max_terms)
    S, rs = perturbed_sine(alpha, t_grid, A, B, tol, quad, rc.bound, max_terms)
    return C, S, rc, rs


def classical_perturbed_families(t_grid, A, B, tol: float = 1e-8,
                                 quad: QuadratureConfig | None = None,
                                 bound: ExponentialBound | None = None,
                                 max_terms: int | None = None):
    """Order-2 perturbation series with the sine family as kernel.

    ``C_n = int C(t-s) B S_{n-1}(s) ds`` and ``S_n = int S(t-s) B S_{n-1}(s) ds``.

    Returns
    -------
    C, S : ndarray, shape (m, d, d)
    reports : tuple of TruncationReport
    """
    alpha, t_grid, A, B = _prepare(2.0, t_grid, A, B)
    quad = quad or QuadratureConfig()
    bound = _bound_for(alpha, A, t_grid, quad, bound)
    max_terms = max_terms or term_cap()
    s0 = initial_term("sine_term", alpha, t_grid, A, B, quad, classical=True)
    c0 = initial_term("cosine_term", alpha, t_grid, A, B, quad, classical=True)
    chain = [s0]

    def sine_step(prev):
        return convolve_family("sine", alpha, A, B, prev)

    def cosine_step(prev):
        n = prev.n + 1
        while len(chain) < n:
            chain.append(sine_step(chain[-1]))
        return convolve_family("cosine", alpha, A, B, chain[n - 1])

    S, rs = _run_series(s0, lambda prev: _grow(chain, prev, sine_step), "sine",
                        alpha, A, B, tol, bound, max_terms)
    C, rc = _run_series(c0, cosine_step, "generated", alpha, A, B, tol, bound, max_terms)
    return C, S, (rc, rs)


def _grow(chain, prev, step):
    n = prev.n + 1
    while len(chain) <= n:
        chain.append(step(chain[-1]))
    return chain[n]


def solve_cauchy(alpha: float, t_grid, A, B, v0, v1, tol: float = 1e-8,
                 quad: QuadratureConfig | None = None) -> np.ndarray:
    """Mild solution ``v(t) = C(t; A+B) v0 + S(t; A+B) v1``; shape ``(m, d)``."""
    alpha, t_grid, A, B = _prepare(alpha, t_grid, A, B)
    v0 = np.asarray(v0, dtype=float).ravel()
    v1 = np.asarray(v1, dtype=float).ravel()
    d = A.shape[0]
    if v0.size != d or v1.size != d:
        raise DomainError(f"initial vectors must have dimension {d}")
    if not (v0.any() or v1.any()):
        return np.zeros((t_grid.size, d))
    C, S, _, _ = perturbed_families(alpha, t_grid, A, B, tol, quad)
    return C @ v0 + S @ v1


# --------------------------------------------------------------------------
# checks


def induction_bound_check(term: SeriesTerm, bound: ExponentialBound, B_norm: float) -> np.ndarray:
    """Bound minus measured norm at every grid point of ``term``.

    Sine terms use ``g_{n alpha + 2}``, literal cosine terms
    ``g_{(n-1) alpha + 3}`` (only for ``n >= 1``), generated cosine terms
    ``g_{n alpha + 1}``.  Non-negative slack means the bound holds.
    """
    if term.kind == "sine_term":
        which = "sine"
    elif term.recursion == "literal" or (term.recursion == "classical" and term.n >= 1):
        which = "literal"
    else:
        which = "generated"
    if which == "literal" and term.n == 0:
        raise DomainError("the literal cosine bound is only established for n >= 1")
    maj = term_majorant(which, term.n, term.alpha, bound, B_norm, term.t_grid)
    return maj - term.term_norm


@dataclass
class MajorantReport:
    """Outcome of :func:`majorant_check`; slacks are majorant minus norm."""

    t_grid: np.ndarray
    sine_slack: np.ndarray
    cosine_slack: np.ndarray            # E_{alpha,1} majorant vs generated cosine
    literal_corrected_slack: np.ndarray  # 1 + M b t^2 E_{alpha,3} vs literal series
    stated_slack: np.ndarray            # t^(2-alpha) E_{alpha,3-alpha} vs generated cosine
    stated_literal_slack: np.ndarray    # same, vs literal series
    corrected_vs_generated_slack: np.ndarray

    @property
    def stated_violations(self) -> np.ndarray:
        """Grid times where the cosine majorant as written undershoots."""
        return self.t_grid[(self.stated_slack < -1e-9) | (self.stated_literal_slack < -1e-9)]

    def asserted_ok(self, slack: float = -1e-9) -> bool:
        return bool(np.all(self.sine_slack >= slack) and np.all(self.cosine_slack >= slack)
                    and np.all(self.literal_corrected_slack >= slack))


def _ml_vec(a, b, z):
    return np.array([special.ml_scalar(a, b, float(x)) for x in np.ravel(z)])


def majorant_envelopes(alpha, t, bound: ExponentialBound, B_norm: float) -> dict:
    """All closed-form series majorants on ``t`` (arrays keyed by name)."""
    t = np.asarray(t, dtype=float)
    M, w = bound.M, bound.omega
    z = M * B_norm * t ** alpha
    growth = M * np.exp(w * t)
    return {
        "sine": growth * t * _ml_vec(alpha, 2.0, z),
        "cosine": growth * _ml_vec(alpha, 1.0, z),
        "cosine_stated": growth * t ** (2.0 - alpha) * _ml_vec(alpha, 3.0 - alpha, z),
        "cosine_corrected": growth * (1.0 + M * B_norm * t ** 2 * _ml_vec(alpha, 3.0, z)),
    }


def majorant_check(alpha: float, t_grid, A, B, bound: ExponentialBound | None = None,
                   tol: float = 1e-10, quad: QuadratureConfig | None = None,
                   families=None) -> MajorantReport:
    """Compare the perturbed families with their series majorants.

    ``families`` may pass precomputed ``(C_generated, C_literal, S)``.
    """
    alpha, t_grid, A, B = _prepare(alpha, t_grid, A, B)
    quad = quad or QuadratureConfig()
    bound = _bound_for(alpha, A, t_grid, quad, bound)
    if families is None:
        C, _ = perturbed_cosine(alpha, t_grid, A, B, tol, quad, bound)
        CL, _ = perturbed_cosine(alpha, t_grid, A, B, tol, quad, bound, recursion="literal")
        S, _ = perturbed_sine(alpha, t_grid, A, B, tol, quad, bound)
    else:
        C, CL, S = families
    env = majorant_envelopes(alpha, t_grid, bound, float(opnorm(B)))
    nC, nCL, nS = opnorm(C), opnorm(CL), opnorm(S)
    return MajorantReport(
        t_grid=t_grid,
        sine_slack=env["sine"] - nS,
        cosine_slack=env["cosine"] - nC,
        literal_corrected_slack=env["cosine_corrected"] - nCL,
        stated_slack=env["cosine_stated"] - nC,
        stated_literal_slack=env["cosine_stated"] - nCL,
        corrected_vs_generated_slack=env["cosine_corrected"] - nC,
    )

"""Quadrature and time-grid machinery.

Two building blocks:

* :class:`TimeGrid` stores a function of time on ``[0, T]`` by its values at
  Gauss-Legendre nodes of a panel split that is geometrically graded toward
  ``t = 0`` (where every family behaves like a fractional power of ``t``).
  It integrates with the matching weights and interpolates panel-wise.
* :class:`ConvolutionPlan` discretises ``int_0^t K(t - s) F(s) ds`` for
  every grid node ``t``.  The end pieces of ``[0, t]`` use a tanh-sinh rule,
  which absorbs the algebraic end-point behaviour of both factors; interior
  pieces use plain Gauss-Legendre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse


@lru_cache(maxsize=64)
def gauss_legendre(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``p``-point rule on ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(p)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=64)
def tanh_sinh(h: float, tau_max: float = 5.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tanh-sinh rule on ``[0, 1]`` with step ``h``.

    Returns ``(x, 1 - x, w)``; the complement is computed directly so that
    nodes piled up against ``x = 1`` keep full relative accuracy.  The
    default ``tau_max`` reaches ``1e-100`` of either end, enough for
    integrable singularities down to ``x**-0.7``.
    """
    n = int(math.ceil(tau_max / h))
    tau = h * np.arange(-n, n + 1)
    u = 0.5 * math.pi * np.sinh(tau)
    x = 1.0 / (1.0 + np.exp(-2.0 * u))
    xc = 1.0 / (1.0 + np.exp(2.0 * u))
    w = h * math.pi * np.cosh(tau) * x * xc
    keep = w > 0.0
    return x[keep], xc[keep], w[keep]


def integrate_01_singular(f, h: float = 1.0 / 16):
    """``int_0^1 f(x, 1 - x) dx`` by tanh-sinh; ``f`` is vectorised."""
    x, xc, w = tanh_sinh(h)
    return np.tensordot(w, f(x, xc), axes=(0, 0))


def _barycentric_weights(x: np.ndarray) -> np.ndarray:
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    w = 1.0 / np.prod(diff, axis=1)
    return w / np.max(np.abs(w))


class TimeGrid:
    """Graded composite Gauss-Legendre grid on ``[0, T]``.

    ``[0, T]`` is cut into ``panels`` equal pieces; the first piece is
    further split geometrically (ratio 1/2) into ``grading_levels`` panels
    accumulating at zero.  Each panel carries ``nodes_per_panel`` nodes.
    """

    def __init__(self, T: float, panels: int = 4, nodes_per_panel: int = 14,
                 grading_levels: int = 24):
        if T <= 0:
            raise ValueError("grid length must be positive")
        if panels < 1 or nodes_per_panel < 2 or grading_levels < 0:
            raise ValueError("invalid grid configuration")
        self.T = float(T)
        self.panels = panels
        self.nodes_per_panel = nodes_per_panel
        self.grading_levels = grading_levels
        width = self.T / panels
        graded = [0.0] + [width * 0.5 ** j for j in range(grading_levels, 0, -1)]
        uniform = [width * k for k in range(1, panels + 1)]
        self.edges = np.array(graded + uniform)
        self.edges[-1] = self.T
        ref_x, ref_w = gauss_legendre(nodes_per_panel)
        lo, hi = self.edges[:-1], self.edges[1:]
        self.nodes = (lo[:, None] + (hi - lo)[:, None] * ref_x[None, :]).ravel()
        self.weights = ((hi - lo)[:, None] * ref_w[None, :]).ravel()
        self._ref_x = ref_x
        self._bary = _barycentric_weights(ref_x)

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def n_panels(self) -> int:
        return self.edges.size - 1

    def interpolation(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Panel-local Lagrange interpolation stencils for ``points``.

        Returns ``(idx, w)`` of shape ``(m, nodes_per_panel)`` such that
        ``f(points) ~ sum(w * f_nodes[idx], axis=1)``.
        """
        pts = np.asarray(points, dtype=float).ravel()
        if pts.size and (pts.min() < -1e-14 * self.T or pts.max() > self.T * (1 + 1e-12)):
            raise ValueError("interpolation point outside the grid")
        panel = np.clip(np.searchsorted(self.edges, pts, side="right") - 1, 0, self.n_panels - 1)
        lo, hi = self.edges[panel], self.edges[panel + 1]
        xi = (pts - lo) / (hi - lo)
        p = self.nodes_per_panel
        diff = xi[:, None] - self._ref_x[None, :]
        exact = diff == 0.0
        diff[exact] = 1.0
        terms = self._bary[None, :] / diff
        w = terms / terms.sum(axis=1, keepdims=True)
        hit = exact.any(axis=1)
        if hit.any():
            w[hit] = exact[hit].astype(float)
        idx = panel[:, None] * p + np.arange(p)[None, :]
        return idx, w

    def interpolate(self, values: np.ndarray, points) -> np.ndarray:
        """Evaluate nodal ``values`` (leading axis = nodes) at ``points``."""
        idx, w = self.interpolation(points)
        return np.einsum("mp,mp...->m...", w, values[idx])

    def integrate(self, values: np.ndarray, weight=None) -> np.ndarray:
        """``int_0^T weight(t) f(t) dt`` from nodal values."""
        w = self.weights if weight is None else self.weights * weight
        return np.tensordot(w, values, axes=(0, 0))


@dataclass
class _Pairs:
    target: np.ndarray   # index of the grid node t each pair belongs to
    s: np.ndarray        # integration node
    lag: np.ndarray      # t - s, computed without cancellation
    w: np.ndarray


def _pieces(t: float, piece_width: float) -> int:
    return max(1, int(math.ceil(t / piece_width - 1e-12)))


def convolution_pairs(targets: np.ndarray, de_step: float, piece_width: float,
                      interior_nodes: int) -> _Pairs:
    """Quadrature pairs for ``int_0^t K(t-s) F(s) ds`` at every ``t`` in ``targets``."""
    x, xc, wd = tanh_sinh(de_step)
    gx, gw = gauss_legendre(interior_nodes)
    tgt, ss, lag, ww = [], [], [], []
    for i, t in enumerate(targets):
        m = _pieces(t, piece_width)
        width = t / m
        for j in range(m):
            a = j * width
            right_gap = (m - j - 1) * width  # t - b
            if j == 0 or j == m - 1:
                s = a + width * x
                u = right_gap + width * xc
                w = width * wd
            else:
                s = a + width * gx
                u = right_gap + width * (1.0 - gx)
                w = width * gw
            tgt.append(np.full(s.size, i))
            ss.append(s)
            lag.append(u)
            ww.append(w)
    return _Pairs(np.concatenate(tgt), np.concatenate(ss), np.concatenate(lag),
                  np.concatenate(ww))


class ConvolutionPlan:
    """Precomputed quadrature for ``(K * F)(t) = int_0^t K(t-s) F(s) ds``.

    The plan targets every node of ``grid``.  ``kernel`` maps an array of
    lags ``u >= 0`` to an array of ``(d, d)`` matrices; it is evaluated once
    here, so repeated convolutions against new ``F`` only cost a gather and
    a batched matrix product.
    """

    def __init__(self, grid: TimeGrid, kernel, de_step: float = 1.0 / 8,
                 piece_width: float = 1.0, interior_nodes: int = 16):
        self.grid = grid
        self.de_step = de_step
        pairs = convolution_pairs(grid.nodes, de_step, piece_width, interior_nodes)
        self.pairs = pairs
        self.kernel_values = np.asarray(kernel(pairs.lag))
        idx, w = grid.interpolation(pairs.s)
        rows = np.repeat(np.arange(pairs.s.size), idx.shape[1])
        self._interp = scipy.sparse.csr_matrix((w.ravel(), (rows, idx.ravel())),
                                               shape=(pairs.s.size, grid.size))
        order = pairs.target
        self._starts = np.flatnonzero(np.r_[True, order[1:] != order[:-1]])

    def feed_at_pairs(self, nodal: np.ndarray) -> np.ndarray:
        """Interpolate nodal values of ``F`` to the integration nodes."""
        flat = nodal.reshape(nodal.shape[0], -1)
        return (self._interp @ flat).reshape((-1,) + nodal.shape[1:])

    def apply(self, feed: np.ndarray, left=None) -> np.ndarray:
        """Return nodal values of ``int_0^t K(t-s) L F(s) ds``.

        ``feed`` holds ``F`` at the integration nodes (see
        :meth:`feed_at_pairs`); ``left`` is an optional constant matrix
        ``L`` applied before the kernel.
        """
        if left is not None:
            feed = np.matmul(left, feed)
        integrand = np.matmul(self.kernel_values, feed) * self.pairs.w[:, None, None]
        return np.add.reduceat(integrand, self._starts, axis=0)


@dataclass(frozen=True)
class QuadratureConfig:
    """Discretisation settings for the convolution integrals.

    ``panels`` and ``nodes_per_panel`` fix the :class:`TimeGrid` on which
    series terms are stored (plus ``grading_levels`` geometric panels at
    ``t = 0``).  The local convolution rule starts at tanh-sinh step
    ``de_step`` and is refined by ``refinement_factor`` until two
    successive levels agree to ``target_tol``, at most ``max_refinements``
    times.
    """

    panels: int = 4
    nodes_per_panel: int = 14
    refinement_factor: int = 2
    target_tol: float = 1e-10
    grading_levels: int = 24
    de_step: float = 1.0 / 8
    piece_width: float = 1.0
    max_refinements: int = 3

    def __post_init__(self):
        if self.panels < 1 or self.nodes_per_panel < 2 or self.refinement_factor < 2:
            raise ValueError("QuadratureConfig counts out of range")
        if not self.target_tol > 0:
            raise ValueError("target_tol must be positive")

    def level(self, j: int) -> tuple[float, int]:
        """(tanh-sinh step, interior Gauss nodes) at refinement level ``j``."""
        return self.de_step / self.refinement_factor ** j, 16 + 8 * j

    def grid(self, T: float) -> TimeGrid:
        return TimeGrid(T, self.panels, self.nodes_per_panel, self.grading_levels)


def refined_convolution(targets, kernel, feed, quad: QuadratureConfig):
    """``int_0^t K(t-s) F(s) ds`` at each target with closed-form ``K`` and ``F``.

    ``kernel(u)`` and ``feed(s)`` return arrays (scalars or matrices) for
    arrays of lags/nodes.  Refines until two levels agree to
    ``quad.target_tol``.

    Returns
    -------
    values, error_estimate
    """
    from .errors import QuadratureError

    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    prev, prev_err = None, math.inf
    for j in range(quad.max_refinements + 1):
        h, inner = quad.level(j)
        pairs = convolution_pairs(targets, h, quad.piece_width, inner)
        k = np.asarray(kernel(pairs.lag))
        f = np.asarray(feed(pairs.s))
        prod = k @ f if k.ndim == 3 else k.reshape(k.shape + (1,) * (f.ndim - 1)) * f
        prod = prod * pairs.w.reshape((-1,) + (1,) * (prod.ndim - 1))
        starts = np.flatnonzero(np.r_[True, pairs.target[1:] != pairs.target[:-1]])
        values = np.add.reduceat(prod, starts, axis=0)
        if prev is not None:
            err = float(np.max(np.abs(values - prev)))
            if err <= quad.target_tol:
                return values, err
            if err >= prev_err:
                raise QuadratureError(
                    f"convolution refinement stalled at error estimate {err:.3e}")
            prev_err = err
        prev = values
    raise QuadratureError(
        f"convolution did not reach {quad.target_tol:.1e} (estimate {prev_err:.3e})")

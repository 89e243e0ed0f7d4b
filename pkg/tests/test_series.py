import math

import numpy as np
import pytest

from conftest import random_instance
from fraccos import special
from fraccos.errors import ConvergenceError, DomainError
from fraccos.families import ExponentialBound, family_values, opnorm
from fraccos.series import (classical_perturbed_families, convolve_family,
                            induction_bound_check, initial_term, majorant_check,
                            majorant_envelopes, perturbed_cosine, perturbed_sine,
                            solve_cauchy, term_majorant)

ALPHAS = [1.25, 1.5, 1.75, 2.0]
T = np.array([0.25, 0.5, 1.0, 2.0])


@pytest.mark.parametrize("alpha", ALPHAS)
def test_zero_perturbation_single_term(alpha, rng):
    A, _ = random_instance(rng, 2, radius=3.0)
    Z = np.zeros_like(A)
    C, rep = perturbed_cosine(alpha, T, A, Z)
    assert rep.n_used == 1
    np.testing.assert_array_equal(C, family_values("cosine", alpha, A, T))
    S, rep = perturbed_sine(alpha, T, A, Z)
    np.testing.assert_array_equal(S, family_values("sine", alpha, A, T))


@pytest.mark.parametrize("alpha", ALPHAS)
def test_zero_perturbation_terms_vanish(alpha):
    A = np.array([[-1.0, 0.2], [0.2, -0.5]])
    Z = np.zeros_like(A)
    s = initial_term("sine_term", alpha, T, A, Z)
    for n in range(1, 3):
        s = convolve_family("riemann_liouville", alpha, A, Z, s)
        assert s.n == n
        np.testing.assert_array_equal(s.values, 0.0)
        slack = induction_bound_check(s, ExponentialBound(1.5, 0.0), 0.0)
        np.testing.assert_array_equal(slack, 0.0)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_first_terms_closed_forms(alpha):
    beta = 0.7
    A, B = np.zeros((2, 2)), beta * np.eye(2)
    t = np.array([0.3, 1.0, 2.0])
    s1 = convolve_family("riemann_liouville", alpha, A, B, initial_term("sine_term", alpha, t, A, B))
    np.testing.assert_allclose(s1.values[:, 0, 0], beta * t ** (alpha + 1) / special.gamma(alpha + 2),
                               atol=1e-12)
    # sine-fed cosine term: C * B S_0 with C = I
    s0 = initial_term("sine_term", alpha, t, A, B)
    c1 = convolve_family("cosine", alpha, A, B, s0)
    assert c1.recursion == "literal"
    np.testing.assert_allclose(c1.values[:, 0, 0], beta * t ** 2 / 2, atol=1e-12)
    # generated cosine term: T * B C_0
    g1 = convolve_family("riemann_liouville", alpha, A, B, initial_term("cosine_term", alpha, t, A, B))
    np.testing.assert_allclose(g1.values[:, 0, 0], beta * t ** alpha / special.gamma(alpha + 1),
                               atol=1e-12)
    # the tightness witness for the sine bound
    slack = induction_bound_check(s1, ExponentialBound(1.0, 0.0), beta)
    np.testing.assert_allclose(slack, 0.0, atol=1e-12)


def test_convolve_family_rejects_bad_combinations():
    A, B = np.zeros((1, 1)), np.ones((1, 1))
    c0 = initial_term("cosine_term", 1.5, [1.0], A, B)
    with pytest.raises(ValueError):
        convolve_family("cosine", 1.5, A, B, c0)
    lit = convolve_family("cosine", 1.5, A, B, initial_term("sine_term", 1.5, [1.0], A, B))
    with pytest.raises(ValueError):
        convolve_family("riemann_liouville", 1.5, A, B, lit)
    with pytest.raises(ValueError):
        convolve_family("riemann_liouville", 1.25, A, B, c0)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_series_match_oracle(alpha, rng):
    A, B = random_instance(rng, 3, radius=4.0, b_norm=0.5)
    C, rc = perturbed_cosine(alpha, T, A, B)
    S, rs = perturbed_sine(alpha, T, A, B, bound=rc.bound)
    np.testing.assert_allclose(C, family_values("cosine", alpha, A + B, T), atol=1e-6)
    np.testing.assert_allclose(S, family_values("sine", alpha, A + B, T), atol=1e-6)
    assert rc.stop_reason == "tolerance_met" and rc.domination_ok() and rs.domination_ok()
    assert rc.tail_bound < 1e-8


def test_spec_oracle_example(rng):
    A, B = random_instance(rng, 2, radius=2.0, b_norm=0.3)
    t = np.linspace(0.0, 2.0, 9)
    C, _ = perturbed_cosine(1.5, t, A, B)
    S, _ = perturbed_sine(1.5, t, A, B)
    np.testing.assert_allclose(C, family_values("cosine", 1.5, A + B, t), atol=1e-6)
    np.testing.assert_allclose(S, family_values("sine", 1.5, A + B, t), atol=1e-6)


def test_hyperbolic_examples():
    t = np.linspace(0.0, 2.0, 9)
    C, _ = perturbed_cosine(2.0, t, [[0.0]], [[1.0]])
    S, _ = perturbed_sine(2.0, t, [[0.0]], [[1.0]])
    np.testing.assert_allclose(C[:, 0, 0], np.cosh(t), atol=1e-8)
    np.testing.assert_allclose(S[:, 0, 0], np.sinh(t), atol=1e-8)


@pytest.mark.parametrize("alpha", [1.25, 1.5, 1.75])
def test_literal_recursion_differs_below_two(alpha, rng):
    A, B = random_instance(rng, 2, radius=2.0, b_norm=0.5)
    CL, _ = perturbed_cosine(alpha, T, A, B, recursion="literal")
    assert np.max(np.abs(CL - family_values("cosine", alpha, A + B, T))) > 1e-4


def test_literal_recursion_agrees_at_two(rng):
    A, B = random_instance(rng, 2, radius=2.0, b_norm=0.5)
    CL, _ = perturbed_cosine(2.0, T, A, B, recursion="literal")
    np.testing.assert_allclose(CL, family_values("cosine", 2.0, A + B, T), atol=1e-8)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_induction_bounds(alpha, rng):
    A, B = random_instance(rng, 3, radius=4.0, b_norm=0.5)
    t = np.linspace(0.05, 2.0, 20)
    C, rc = perturbed_cosine(alpha, t, A, B, tol=1e-12)
    CL, rl = perturbed_cosine(alpha, t, A, B, tol=1e-12, bound=rc.bound, recursion="literal")
    S, rs = perturbed_sine(alpha, t, A, B, tol=1e-12, bound=rc.bound)
    b = opnorm(B)
    for rep in (rc, rl, rs):
        for term in rep.terms[1:7]:
            assert np.all(induction_bound_check(term, rc.bound, b) >= -1e-9)


def test_literal_bound_not_for_n0():
    c0 = initial_term("cosine_term", 1.5, [1.0], [[0.0]], [[0.0]])
    c0.recursion = "literal"
    with pytest.raises(DomainError):
        induction_bound_check(c0, ExponentialBound(1.0, 0.0), 1.0)


def test_term_majorant_values():
    eb = ExponentialBound(2.0, 0.5)
    t = np.array([0.0, 1.0])
    m = term_majorant("sine", 2, 1.5, eb, 0.3, t)
    assert m[0] == 0.0
    assert m[1] == pytest.approx(8 * 0.09 * math.exp(0.5) / special.gamma(5.0), rel=1e-13)
    assert term_majorant("literal", 0, 1.5, eb, 0.3, t)[1] == pytest.approx(2 * math.exp(0.5))


@pytest.mark.parametrize("alpha", ALPHAS)
def test_majorants(alpha, rng):
    A, B = random_instance(rng, 2, radius=2.0, b_norm=0.3)
    t = np.linspace(0.05, 2.0, 25)
    rep = majorant_check(alpha, t, A, B)
    assert rep.asserted_ok()
    if alpha < 2:
        assert rep.stated_violations.size > 0
    else:
        assert rep.stated_violations.size == 0


def test_majorant_trivial_and_hyperbolic_limit():
    t = np.linspace(0.1, 2.0, 7)
    rep = majorant_check(1.5, t, [[0.0]], [[0.0]], bound=ExponentialBound(1.0, 0.0))
    np.testing.assert_allclose(rep.sine_slack, 0.0, atol=1e-14)
    eb, b = ExponentialBound(1.3, 0.2), 0.4
    env = majorant_envelopes(2.0, t, eb, b)
    r = math.sqrt(eb.M * b)
    growth = eb.M * np.exp(eb.omega * t)
    np.testing.assert_allclose(env["sine"], growth * np.sinh(r * t) / r, rtol=1e-12)
    np.testing.assert_allclose(env["cosine"], growth * np.cosh(r * t), rtol=1e-12)


def test_classical_examples():
    t = np.linspace(0.0, 2.0, 9)
    C, S, _ = classical_perturbed_families(t, [[-1.0]], [[0.0]])
    np.testing.assert_allclose(C[:, 0, 0], np.cos(t), atol=1e-10)
    np.testing.assert_allclose(S[:, 0, 0], np.sin(t), atol=1e-10)
    C, S, _ = classical_perturbed_families(t, [[0.0]], [[1.0]])
    np.testing.assert_allclose(C[:, 0, 0], np.cosh(t), atol=1e-8)
    np.testing.assert_allclose(S[:, 0, 0], np.sinh(t), atol=1e-8)


def test_classical_matches_generic(rng):
    A, B = random_instance(rng, 3, radius=3.0, b_norm=0.5)
    C, S, _ = classical_perturbed_families(T, A, B)
    Cg, _ = perturbed_cosine(2.0, T, A, B)
    Sg, _ = perturbed_sine(2.0, T, A, B)
    np.testing.assert_allclose(C, Cg, atol=1e-8)
    np.testing.assert_allclose(S, Sg, atol=1e-8)


def test_solve_cauchy_examples():
    t = np.linspace(0.0, 3.0, 7)
    v = solve_cauchy(2.0, t, [[-1.0]], [[0.0]], [1.0], [1.0])
    np.testing.assert_allclose(v[:, 0], np.cos(t) + np.sin(t), atol=1e-10)
    np.testing.assert_array_equal(solve_cauchy(1.5, t, [[-1.0]], [[0.3]], [0.0], [0.0]), 0.0)


def test_solve_cauchy_diagonal():
    A, B = np.diag([-1.0, -0.5]), np.diag([0.2, -0.1])
    t = np.array([0.5, 1.5])
    v = solve_cauchy(1.5, t, A, B, [1.0, 2.0], [0.0, 1.0])
    for i, (mu, a0, a1) in enumerate([(-0.8, 1.0, 0.0), (-0.6, 2.0, 1.0)]):
        ref = [a0 * special.ml_scalar(1.5, 1.0, s ** 1.5 * mu)
               + a1 * s * special.ml_scalar(1.5, 2.0, s ** 1.5 * mu) for s in t]
        np.testing.assert_allclose(v[:, i], ref, atol=1e-8)


def test_term_cap(monkeypatch, rng):
    A, B = random_instance(rng, 2, radius=2.0, b_norm=0.5)
    monkeypatch.setenv("FRACCOS_TERM_CAP", "2")
    with pytest.raises(ConvergenceError):
        perturbed_cosine(1.5, T, A, B)
    monkeypatch.setenv("FRACCOS_TERM_CAP", "zero")
    with pytest.raises(DomainError):
        perturbed_cosine(1.5, T, A, B)


def test_mismatched_shapes():
    with pytest.raises(DomainError):
        perturbed_cosine(1.5, T, np.zeros((2, 2)), np.zeros((3, 3)))

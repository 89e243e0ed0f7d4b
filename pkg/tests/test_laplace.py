import math

import numpy as np
import pytest
from scipy import integrate

from fraccos.errors import HypothesisError, TailTooLargeError
from fraccos.families import ExponentialBound, opnorm
from fraccos.laplace import (LaplaceQuadrature, check_perturbed_transforms,
                             check_term_recursion_transform, check_transform_relations,
                             laplace_of_family, tail_bound)

LQ = LaplaceQuadrature()


def small_instance(seed, d, alpha, b_norm=0.05):
    # keeps 20^alpha ||A|| well inside the evaluation domain
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((d, d))
    A = -(X @ X.T)
    A *= 0.8 * 10 ** alpha / 20 ** alpha / opnorm(A)
    B = rng.standard_normal((d, d))
    B *= b_norm / opnorm(B)
    return A, B


@pytest.mark.parametrize("kind,expected", [("cosine", 1 / 2.0), ("sine", 1 / 4.0),
                                           ("riemann_liouville", 2.0 ** -1.5)])
def test_zero_generator_transforms(kind, expected):
    lv = laplace_of_family(kind, 2.0, 1.5, np.zeros((1, 1)), lq=LQ)
    assert lv.value[0, 0] == pytest.approx(expected, abs=1e-10)
    assert lv.tail_bound < 1e-10


def test_tail_bound_closed_form():
    eb = ExponentialBound(1.0, 0.0)
    # cosine tail is e^{-lambda T}/lambda
    assert tail_bound("cosine", 2.0, 1.5, eb, 3.0) == pytest.approx(math.exp(-6) / 2, rel=1e-12)
    # sine tail against scipy quadrature of t e^{-lambda t}
    ref, _ = integrate.quad(lambda t: t * math.exp(-2 * t), 3.0, np.inf)
    assert tail_bound("sine", 2.0, 1.5, eb, 3.0) == pytest.approx(ref, rel=1e-10)
    with pytest.raises(TailTooLargeError):
        tail_bound("perturbed_cosine", 1.0, 1.5, eb, 3.0, B_norm=2.0)


def test_tail_too_large():
    with pytest.raises(TailTooLargeError):
        laplace_of_family("cosine", 0.1, 1.5, np.zeros((1, 1)), lq=LQ)


def test_transform_relations_examples():
    chk = check_transform_relations(2.0, 1.5, np.zeros((1, 1)), lq=LQ)
    assert chk.ok() and max(chk) <= 1e-10
    lv = laplace_of_family("cosine", 1.0, 2.0, [[-1.0]], lq=LaplaceQuadrature(T_max=10, tol=1e-4))
    assert abs(lv.value[0, 0] - 0.5) <= lv.allowance
    chk = check_transform_relations(50.0, 1.5, [[-0.1]], lq=LQ)
    assert chk.ok()


@pytest.mark.parametrize("alpha", [1.25, 1.5, 2.0])
def test_transform_relations_random(alpha):
    A, _ = small_instance(1, 3, alpha)
    chk = check_transform_relations(1.5, alpha, A, lq=LQ)
    assert chk.ok() and max(chk) <= 1e-5


def test_term_transforms_zero_perturbation():
    chk = check_term_recursion_transform(1, 2.0, 1.5, [[-0.1]], [[0.0]], lq=LQ)
    assert max(chk) <= 1e-12


def test_term_transform_witness():
    beta, lam, alpha = 0.05, 2.0, 1.5
    lv = laplace_of_family("term_n", lam, alpha, [[0.0]], [[beta]], LQ, n=1, term="sine")
    assert lv.value[0, 0] == pytest.approx(beta * lam ** -alpha * lam ** -2, abs=1e-9)


@pytest.mark.parametrize("n", [1, 2])
def test_term_transforms_random(n):
    A, B = small_instance(2, 2, 1.5)
    chk = check_term_recursion_transform(n, 2.0, 1.5, A, B, lq=LQ)
    assert chk.ok() and max(chk) <= 1e-6
    # the unscaled closed forms only hold at alpha = 2
    assert chk.informational["sine_closed_form_without_scale"] > 1e-6


def test_perturbed_transforms_scalar():
    chk = check_perturbed_transforms(2.0, 1.5, [[0.0]], [[0.5]], lq=LQ)
    assert chk.ok()
    lv = laplace_of_family("perturbed_sine", 2.0, 1.5, [[0.0]], [[0.5]], LQ)
    assert lv.value[0, 0] == pytest.approx(2 ** -0.5 / (2 ** 1.5 - 0.5), abs=1e-6)


def test_perturbed_transforms_zero_perturbation():
    A, _ = small_instance(3, 2, 1.5)
    chk = check_perturbed_transforms(2.0, 1.5, A, np.zeros((2, 2)), lq=LQ)
    base = check_transform_relations(2.0, 1.5, A, lq=LQ)
    assert chk.residuals["cosine_direct"] == pytest.approx(base.residuals["cosine"], abs=1e-12)
    assert chk.ok()


def test_perturbed_transforms_random():
    A, B = small_instance(4, 2, 1.5)
    chk = check_perturbed_transforms(2.0, 1.5, A, B, lq=LQ)
    assert chk.ok() and max(chk) <= 1e-5


def test_perturbed_transforms_hypothesis():
    with pytest.raises(HypothesisError):
        check_perturbed_transforms(1.0, 1.5, [[0.0]], [[1.5]], lq=LQ)

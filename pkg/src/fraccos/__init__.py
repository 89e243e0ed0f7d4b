"""Fractional cosine families under bounded perturbation.

Matrix realisations of the order-``alpha`` (``1 < alpha <= 2``) cosine,
sine and Riemann-Liouville families, their bounded perturbation by
iterated convolution series, resolvent perturbation by Neumann series and
numerical Laplace-transform verification of the connecting identities.
"""

from .errors import (ConvergenceError, DomainError, FraccosError, HypothesisError,
                     QuadratureError, SingularityError, TailTooLargeError)
from .special import g_kernel, gamma, lgamma, ml_scalar, rgamma
from .families import (ExponentialBound, FamilyEvaluation, check_functional_equation,
                       cosine_family, estimate_exponential_bound, family_values,
                       fractional_integral_of_cosine, generator_limit, ml_matrix,
                       opnorm, rl_family, sine_family)
from .quadrature import QuadratureConfig, TimeGrid
from .resolvent import (BoundCheck, NeumannReport, ResolventPoint, choose_lambda,
                        corollary_scaled_check, direct_inverse, lemma_bound_check,
                        neumann_resolvent, perturbed_resolvent_direct, resolvent)
from .series import (SeriesTerm, TruncationReport, classical_perturbed_families,
                     convolve_family, induction_bound_check, initial_term, majorant_check,
                     perturbed_cosine, perturbed_families, perturbed_sine, solve_cauchy)
from .laplace import (LaplaceQuadrature, check_perturbed_transforms,
                      check_term_recursion_transform, check_transform_relations,
                      laplace_of_family)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "FraccosError",
    "HypothesisError",
    "QuadratureError",
    "SingularityError",
    "TailTooLargeError",
    "g_kernel",
    "gamma",
    "lgamma",
    "ml_scalar",
    "rgamma",
    "ExponentialBound",
    "FamilyEvaluation",
    "check_functional_equation",
    "cosine_family",
    "estimate_exponential_bound",
    "family_values",
    "fractional_integral_of_cosine",
    "generator_limit",
    "ml_matrix",
    "opnorm",
    "rl_family",
    "sine_family",
    "QuadratureConfig",
    "TimeGrid",
    "BoundCheck",
    "NeumannReport",
    "ResolventPoint",
    "choose_lambda",
    "corollary_scaled_check",
    "direct_inverse",
    "lemma_bound_check",
    "neumann_resolvent",
    "perturbed_resolvent_direct",
    "resolvent",
    "SeriesTerm",
    "TruncationReport",
    "classical_perturbed_families",
    "convolve_family",
    "induction_bound_check",
    "initial_term",
    "majorant_check",
    "perturbed_cosine",
    "perturbed_families",
    "perturbed_sine",
    "solve_cauchy",
    "LaplaceQuadrature",
    "check_perturbed_transforms",
    "check_term_recursion_transform",
    "check_transform_relations",
    "laplace_of_family",
]

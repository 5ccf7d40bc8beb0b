"""Ruin probabilities, deficit-at-ruin tails, diffusion-perturbed compound
geometric tails, continuity bounds between risk models, and Monte Carlo
verification by exact ladder sampling."""

from .bounds import BoundReport, dk1, dk2, dk3
from .classical import (RiskModel, adjustment_rate, deficit_tail,
                        deficit_tail_family, exact_ruin_exponential,
                        pk_truncated_series, ruin_probability,
                        weighted_psi_moment)
from .diffusion import (KIterates, PerturbedModel, decompose,
                        k_exact_exponential, k_iterate_erlang, k_iterates,
                        k_tail, ladder_density, ladder_tail, psi_total)
from .distributions import (DEFAULT_QUADRATURE, ClaimDistribution, Erlang,
                            ErlangMixture, Exponential, HyperExponential,
                            QuadratureSettings, Tabulated, partial_exp_sum)
from .errors import (GridMismatchError, NumericalError, PreconditionError,
                     RuinboundsError, TruncationError)
from .metrics import (GridFunction, SupDistance, kantorovich, nu_gamma, q_y,
                      sup_distance, tail_crossings)
from .oracle import MCEstimate, estimate as mc_estimate
from .renewal import (DEFAULT_H, IterationTrace, RenewalProblem, iterate,
                      residual, solve)

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "dk1", "dk2", "dk3",
    "RiskModel", "adjustment_rate", "deficit_tail", "deficit_tail_family",
    "exact_ruin_exponential", "pk_truncated_series", "ruin_probability",
    "weighted_psi_moment",
    "KIterates", "PerturbedModel", "decompose", "k_exact_exponential",
    "k_iterate_erlang", "k_iterates", "k_tail", "ladder_density",
    "ladder_tail", "psi_total",
    "DEFAULT_QUADRATURE", "ClaimDistribution", "Erlang", "ErlangMixture",
    "Exponential", "HyperExponential", "QuadratureSettings", "Tabulated",
    "partial_exp_sum",
    "GridMismatchError", "NumericalError", "PreconditionError",
    "RuinboundsError", "TruncationError",
    "GridFunction", "SupDistance", "kantorovich", "nu_gamma", "q_y",
    "sup_distance", "tail_crossings",
    "MCEstimate", "mc_estimate",
    "DEFAULT_H", "IterationTrace", "RenewalProblem", "iterate", "residual",
    "solve",
]

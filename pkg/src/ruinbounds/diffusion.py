"""Diffusion-perturbed surplus: ladder law, compound geometric tail K-bar,
fixed-point iterates, total ruin probability and its decomposition.

Oscillation record highs are exponential with rate b0 = c/D, claim record
highs follow the equilibrium law, so one ladder step has law
A = Exp(b0) * F_e (convolution) with density a and tail

    A-bar(t) = Fe-bar(t) + a(t) / b0,

an identity that supplies the renewal forcing for free once the kernel is
known.  K-bar solves the defective renewal equation with modulus
phi = 1/(1+theta), kernel a and forcing phi * A-bar; the total ruin
probability adds one independent oscillation on top of K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .classical import RiskModel
from .distributions import (DEFAULT_QUADRATURE, Erlang, ErlangMixture,
                            Exponential, HyperExponential, QuadratureSettings,
                            partial_exp_sum)
from .errors import NumericalError, PreconditionError
from .metrics import GridFunction
from .renewal import (DEFAULT_H, IterationTrace, RenewalProblem, iterate,
                      solve, trapezoid_convolution)

__all__ = [
    "PerturbedModel",
    "ladder_density",
    "ladder_tail",
    "k_tail",
    "k_exact_exponential",
    "KIterates",
    "k_iterates",
    "k_iterate_erlang",
    "psi_total",
    "decompose",
]

_RATE_MATCH = 1e-9  # relative threshold for "b0 equals a claim rate"


@dataclass(frozen=True)
class PerturbedModel:
    """Classical model plus an independent Brownian perturbation.

    D = sigma^2 / 2 is the diffusion coefficient; b0 = c/D the rate of the
    oscillation record-high law.
    """

    base: RiskModel
    D: float

    def __post_init__(self):
        if self.D <= 0:
            raise ValueError("diffusion coefficient must be positive")

    @property
    def b0(self) -> float:
        return self.base.c / self.D

    @property
    def sigma(self) -> float:
        return math.sqrt(2.0 * self.D)

    @property
    def phi(self) -> float:
        return self.base.phi

    @property
    def theta(self) -> float:
        return self.base.theta


def _exp_conv_density(b0, rate, t):
    """Density of Exp(b0) * Exp(rate) at t; Erlang(2) when the rates agree."""
    if abs(rate - b0) <= _RATE_MATCH * b0:
        return b0 * rate * t * np.exp(-rate * t)
    # exp(-rate t) - exp(-b0 t) via expm1 keeps nearby rates cancellation-free
    return b0 * rate * (-np.exp(-rate * t) * np.expm1(-(b0 - rate) * t)) / (b0 - rate)


def _closed_form_components(pm: PerturbedModel):
    """Equilibrium mixture (weight, rate) pairs when they exist."""
    claims = pm.base.claims
    if isinstance(claims, Exponential):
        return [(1.0, claims.beta)]
    if isinstance(claims, HyperExponential):
        eq = claims.equilibrium()
        return list(zip(eq.weights, eq.rates))
    return None


def ladder_density(pm: PerturbedModel, t,
                   settings: QuadratureSettings = DEFAULT_QUADRATURE):
    """Density a(t) of one ladder step L_o + L_c.

    Closed form for exponential-family claims (sums and differences of
    exponentials, an Erlang factor when b0 matches a claim rate); numeric
    convolution against the equilibrium density otherwise.
    """
    arr = np.asarray(t, dtype=float)
    comps = _closed_form_components(pm)
    if comps is not None:
        out = np.zeros_like(arr)
        for w, r in comps:
            out += w * _exp_conv_density(pm.b0, r, arr)
        return float(out) if np.ndim(t) == 0 else out

    b0, mu = pm.b0, pm.base.mu
    tail = pm.base.claims.tail

    def point(x):
        if x == 0.0:
            return 0.0
        val, _ = integrate.quad(
            lambda z: np.exp(-b0 * (x - z)) * float(tail(z)), 0.0, x,
            epsabs=settings.abs_tol, epsrel=settings.rel_tol, limit=500)
        return b0 * val / mu

    out = np.vectorize(point)(arr)
    return float(out) if np.ndim(t) == 0 else out


def _ladder_density_grid(pm: PerturbedModel, grid: np.ndarray) -> np.ndarray:
    """a on a uniform grid; O(n) scaled trapezoid accumulation for the
    variants without closed form."""
    comps = _closed_form_components(pm)
    if comps is not None:
        return np.asarray(ladder_density(pm, grid))
    b0, mu = pm.b0, pm.base.mu
    h = grid[1] - grid[0]
    tail = np.asarray(pm.base.claims.tail(grid))
    decay = np.exp(-b0 * h)
    acc = np.zeros_like(grid)
    # J_i = e^{-b0 h} J_{i-1} + trapezoid of e^{-b0 (t_i - z)} tail(z) over the cell
    for i in range(1, len(grid)):
        acc[i] = decay * acc[i - 1] + 0.5 * h * (decay * tail[i - 1] + tail[i])
    return b0 * acc / mu


def ladder_tail(pm: PerturbedModel, t,
                settings: QuadratureSettings = DEFAULT_QUADRATURE):
    """Tail A-bar(t) = Fe-bar(t) + a(t)/b0 of one ladder step."""
    fe = pm.base.claims.equilibrium()
    a = ladder_density(pm, t, settings)
    out = np.asarray(fe.tail(t)) + np.asarray(a) / pm.b0
    return float(out) if np.ndim(t) == 0 else out


def _k_problem(pm: PerturbedModel, h, u_max):
    n = int(round(u_max / h))
    grid = np.arange(n + 1) * h
    a = _ladder_density_grid(pm, grid)
    fe = pm.base.claims.equilibrium()
    abar = np.asarray(fe.tail(grid)) + a / pm.b0
    return RenewalProblem(phi=pm.phi, forcing=pm.phi * abar, kernel=a,
                          h=h, u_max=u_max), grid, a, abar


def _default_k_umax(pm: PerturbedModel) -> float:
    phi = pm.phi
    r = min(pm.b0, pm.base.claims.slowest_rate)
    u = np.log(phi / ((1.0 - phi) * 1e-9)) / r
    return float(max(10.0, np.ceil(u)))


def k_tail(pm: PerturbedModel, h: float = DEFAULT_H,
           u_max: float | None = None) -> GridFunction:
    """Compound geometric tail K-bar on a grid; K-bar(0) = phi exactly."""
    if u_max is None:
        u_max = _default_k_umax(pm)
    problem, _, _, _ = _k_problem(pm, h, u_max)
    x = solve(problem)
    return GridFunction(h, x.values, is_tail=True)


def k_exact_exponential(pm: PerturbedModel, u):
    """Exact K-bar for exponential claims: theta*(D1 e^{-s1 u} + D2 e^{-s2 u}).

    s1 < s2 are the roots of s^2 - (b0 + beta) s + (theta/(1+theta)) b0 beta;
    the discriminant (b0-beta)^2 + 4 b0 beta/(1+theta) is positive, so both
    roots are real, and computing the larger root first avoids cancellation
    when b0 is close to beta.
    """
    claims = pm.base.claims
    if not isinstance(claims, Exponential):
        raise PreconditionError("closed form requires exponential claims")
    beta, b0, theta = claims.beta, pm.b0, pm.theta
    product = theta / (1.0 + theta) * b0 * beta
    disc = math.sqrt((b0 - beta) ** 2 + 4.0 * b0 * beta / (1.0 + theta))
    s2 = 0.5 * (b0 + beta + disc)
    s1 = product / s2
    denom = theta * (1.0 + theta) * disc
    d1 = s2 / denom
    d2 = -s1 / denom
    arr = np.asarray(u, dtype=float)
    out = theta * (d1 * np.exp(-s1 * arr) + d2 * np.exp(-s2 * arr))
    return float(out) if np.ndim(u) == 0 else out


@dataclass(frozen=True)
class KIterates:
    """Fixed-point iterates of K-bar computed along two routes.

    ``trace`` applies the renewal operator; ``power_route`` assembles the
    same iterates from convolution powers of the ladder law,

        K_n = phi - (1-k) phi^n A^{*n} - (1-phi) sum_{i<n} phi^i A^{*i},

    with A^{*i} in closed form (Erlang) when b0 matches an exponential
    claim rate and by grid self-convolution otherwise.  The two routes must
    agree; their largest gap is recorded.
    """

    trace: IterationTrace
    power_route: list
    path_disagreement: float


def _a_power_tails(pm, grid, a, abar, n, force_grid=False):
    """Tails of A^{*i}, i = 1..n."""
    claims = pm.base.claims
    exact_erlang = (not force_grid and isinstance(claims, Exponential)
                    and abs(claims.beta - pm.b0) <= _RATE_MATCH * pm.b0)
    if exact_erlang:
        beta = pm.b0
        # A^{*i} is Erlang(2i, beta)
        return [np.exp(-beta * grid) * partial_exp_sum(2 * i - 1, beta * grid)
                for i in range(1, n + 1)]
    h = grid[1] - grid[0]
    cur = abar.copy()
    tails = [cur]
    for _ in range(2, n + 1):
        cur = abar + trapezoid_convolution(cur, a, h)
        tails.append(cur)
    return tails


def k_iterates(pm: PerturbedModel, k0: float, n: int, h: float = DEFAULT_H,
               u_max: float | None = None, agreement_tol: float = 1e-6,
               force_grid_powers: bool = False) -> KIterates:
    """n fixed-point iterates of K-bar from the constant start K_0 = k0.

    k0 must lie in [0, 1] (the interior is the textbook case; the endpoints
    are admitted as limits).  Operator and convolution-power routes are both
    evaluated and must agree to ``agreement_tol`` in sup norm.
    """
    if not 0.0 <= k0 <= 1.0:
        raise PreconditionError("starting constant must lie in [0, 1]")
    if u_max is None:
        u_max = _default_k_umax(pm)
    problem, grid, a, abar = _k_problem(pm, h, u_max)
    trace = iterate(problem, k0, n)

    phi = pm.phi
    a_tails = _a_power_tails(pm, grid, a, abar, n, force_grid=force_grid_powers)
    power_route = []
    partial = np.zeros_like(grid)
    for j in range(1, n + 1):
        a_cdf_j = 1.0 - a_tails[j - 1]
        vals = phi - (1.0 - k0) * phi**j * a_cdf_j - (1.0 - phi) * partial
        power_route.append(GridFunction(h, vals))
        partial = partial + phi**j * a_cdf_j
    gap = max(float(np.max(np.abs(t.values - l.values)))
              for t, l in zip(trace.iterates, power_route))
    if gap > agreement_tol:
        raise NumericalError(
            f"operator and convolution-power iterates disagree by {gap:.3e} "
            f"(tolerance {agreement_tol:.1e}); refine the grid")
    return KIterates(trace=trace, power_route=power_route,
                     path_disagreement=gap)


def k_iterate_erlang(pm: PerturbedModel, k0: float, n: int, u: float) -> float:
    """Exact n-th iterate at one point for the matched-rate case beta = c/D,
    where one ladder step is Erlang(2, beta):

        K_1(u) = phi k + phi (1-k) e^{-z} S_1(z),            z = beta u,
        K_n(u) = phi e^{-z} S_1(z)
                 + sum_{m=2}^{n-1} phi^m e^{-z} [S_{2m-1}(z) - S_{2m-3}(z)]
                 + phi^n k (1 - e^{-z} S_{2n-3}(z))
                 + phi^n (1-k) e^{-z} [S_{2n-1}(z) - S_{2n-3}(z)],

    with S_m the partial exponential sums.
    """
    claims = pm.base.claims
    if not isinstance(claims, Exponential):
        raise PreconditionError("matched-rate closed form requires exponential claims")
    beta = claims.beta
    if abs(beta - pm.b0) > _RATE_MATCH * pm.b0:
        raise PreconditionError(
            f"closed form needs beta = c/D; got beta={beta}, c/D={pm.b0}")
    if not 0.0 <= k0 <= 1.0:
        raise PreconditionError("starting constant must lie in [0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    phi = pm.phi
    z = beta * u
    e = math.exp(-z)
    if n == 1:
        return phi * k0 + phi * (1.0 - k0) * e * partial_exp_sum(1, z)
    total = phi * e * partial_exp_sum(1, z)
    for m in range(2, n):
        total += phi**m * e * (partial_exp_sum(2 * m - 1, z)
                               - partial_exp_sum(2 * m - 3, z))
    total += phi**n * k0 * (1.0 - e * partial_exp_sum(2 * n - 3, z))
    total += phi**n * (1.0 - k0) * e * (partial_exp_sum(2 * n - 1, z)
                                        - partial_exp_sum(2 * n - 3, z))
    return total


def psi_total(pm: PerturbedModel, h: float = DEFAULT_H,
              u_max: float | None = None,
              k_grid: GridFunction | None = None) -> GridFunction:
    """Total ruin probability: tail of K convolved with the oscillation law.

        psi_t(u) = K-bar(u) + (1-phi) H1-bar(u) + int_0^u H1-bar(u-t) dK(t)

    where the (1-phi) atom of K at 0 must be carried explicitly, otherwise
    psi_t is biased low by (1-phi) H1-bar(u).  The Stieltjes integral uses
    cell masses of K with the exponential H1-bar at midpoints, accumulated
    recursively so no factor ever exceeds 1.
    """
    if k_grid is None:
        k_grid = k_tail(pm, h=h, u_max=u_max)
    kv = k_grid.values
    h = k_grid.h
    b0, phi = pm.b0, pm.phi
    n = len(kv)
    dk = kv[:-1] - kv[1:]            # continuous-part mass per cell
    decay = math.exp(-b0 * h)
    half = math.exp(-b0 * h / 2.0)
    conv = np.zeros(n)
    for i in range(1, n):
        conv[i] = conv[i - 1] * decay + dk[i - 1] * half
    vals = kv + (1.0 - phi) * np.exp(-b0 * k_grid.grid) + conv
    return GridFunction(h, np.clip(vals, 0.0, 1.0), is_tail=True)


def decompose(pm: PerturbedModel, h: float = DEFAULT_H,
              u_max: float | None = None,
              k_grid: GridFunction | None = None,
              psi_t_grid: GridFunction | None = None):
    """Split psi_t into the oscillation-caused and claim-caused parts.

    K-bar = phi * psi_d + psi_s and psi_t = psi_d + psi_s solve to

        psi_d = (psi_t - K-bar) / (1 - phi),     psi_s = psi_t - psi_d,

    giving psi_d(0) = 1 and psi_s(0) = 0: ruin from zero initial surplus is
    immediate and caused by oscillation, never by a claim.
    """
    if k_grid is None:
        k_grid = k_tail(pm, h=h, u_max=u_max)
    if psi_t_grid is None:
        psi_t_grid = psi_total(pm, h=h, u_max=u_max, k_grid=k_grid)
    phi = pm.phi
    psi_d = (psi_t_grid.values - k_grid.values) / (1.0 - phi)
    psi_s = psi_t_grid.values - psi_d
    psi_d = np.clip(psi_d, 0.0, 1.0)
    psi_s = np.clip(psi_s, 0.0, 1.0)
    return (GridFunction(k_grid.h, psi_d, is_tail=True),
            GridFunction(k_grid.h, psi_s))

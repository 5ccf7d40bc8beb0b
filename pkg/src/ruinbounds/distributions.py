"""Claim-size distribution families.

Light-tailed parametric families (exponential, hyperexponential, Erlang,
mixtures of Erlangs with a common rate) plus a tabulated fallback.  Each
family knows its survival function, density, low-order moments, equilibrium
transform and an exact sampler, which is everything the renewal solvers,
the probability metrics and the Monte Carlo checks need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import gammaincc, gammaln

from .errors import PreconditionError, TruncationError

__all__ = [
    "QuadratureSettings",
    "DEFAULT_QUADRATURE",
    "ClaimDistribution",
    "Exponential",
    "HyperExponential",
    "Erlang",
    "ErlangMixture",
    "Tabulated",
    "partial_exp_sum",
]


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances shared by the quadrature-based operations.

    ``tail_epsilon`` is the threshold below which an exponential tail is
    considered numerically dead; improper integrals are truncated where the
    analytic envelope of the integrand drops under it.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    tail_epsilon: float = 1e-12
    max_subdivisions: int = 2**20

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.tail_epsilon > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSettings()

# scipy.integrate.quad caps subdivisions at 2**31-ish; keep a sane limit
_QUAD_LIMIT = 500


def partial_exp_sum(m, z):
    """Partial exponential sum S_m(z) = sum_{r=0}^m z^r / r!.

    S_{-1}(z) = 0 by convention.  The accumulation is generic: passing a
    ``fractions.Fraction`` keeps the arithmetic exact, floats stay floats.
    Same-sign term accumulation is stable for z up to ~1e3 as long as the
    result itself is representable.
    """
    if m < -1:
        raise ValueError("m must be >= -1")
    if m == -1:
        return 0 * z
    total = 1 + 0 * z  # one, in the arithmetic of z
    term = 1 + 0 * z
    for r in range(1, m + 1):
        term = term * z / r
        total = total + term
    return total


def _as_array(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("claim sizes are nonnegative; got a negative argument")
    return arr


def _scalar_like(t, values):
    return float(values) if np.isscalar(t) or np.ndim(t) == 0 else values


class ClaimDistribution:
    """Common interface of all claim-size laws.

    Subclasses provide ``tail``, ``density``, ``mean``, ``second_moment``,
    ``equilibrium``, ``mgf``, ``sample`` and the ``slowest_rate`` of their
    exponential envelope.
    """

    def tail(self, t):
        """Survival function F-bar(t) = 1 - F(t)."""
        raise NotImplementedError

    def density(self, t):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def second_moment(self) -> float:
        raise NotImplementedError

    def equilibrium(self) -> "ClaimDistribution":
        """Integrated-tail (equilibrium) transform of this law."""
        raise NotImplementedError

    def mgf(self, r: float) -> float:
        """E exp(rX) for r below the slowest exponential rate."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    @property
    def slowest_rate(self) -> float:
        """Rate of the slowest exponential component; the tail is
        O(poly(t) * exp(-slowest_rate * t))."""
        raise NotImplementedError

    # -- generic quadrature-backed operations ---------------------------

    def weighted_tail_moment(self, gamma: float,
                             settings: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
        """Weighted tail moment: integral of (1+t)^gamma * tail(t) over [0, inf).

        Equals (E(X+1)^(gamma+1) - 1)/(gamma+1) whenever the (gamma+1)-moment
        is finite; the identity is exercised by the test suite.
        """
        if gamma < 0:
            raise ValueError("gamma must be >= 0")
        T = self.tail_cutoff(gamma, settings)
        val, _ = integrate.quad(lambda t: (1.0 + t) ** gamma * float(self.tail(t)),
                                0.0, T, epsabs=settings.abs_tol,
                                epsrel=settings.rel_tol, limit=_QUAD_LIMIT)
        return val + self._tail_remainder(T, gamma)

    def tail_cutoff(self, gamma: float,
                    settings: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
        """Truncation point T past which (1+t)^gamma * tail(t) integrates to
        below ``tail_epsilon`` (estimated from the exponential envelope)."""
        r = self.slowest_rate
        T = max(1.0, 20.0 / r)
        for _ in range(200):
            if self._tail_remainder(T, gamma) < settings.tail_epsilon:
                return T
            T *= 1.5
        raise TruncationError("tail does not decay within a workable window")

    def _tail_remainder(self, T: float, gamma: float) -> float:
        # First-order envelope estimate of int_T^inf (1+t)^gamma tail(t) dt.
        # A factor 4 absorbs polynomial slack (Erlang-type components).
        r = self.slowest_rate
        top = (1.0 + T) ** gamma * float(self.tail(T))
        return 4.0 * top / r * (1.0 + gamma / (r * (1.0 + T)))


@dataclass(frozen=True)
class Exponential(ClaimDistribution):
    """Exponential claim sizes with rate beta (mean 1/beta)."""

    beta: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("rate must be positive")

    def tail(self, t):
        arr = _as_array(t)
        return _scalar_like(t, np.exp(-self.beta * arr))

    def density(self, t):
        arr = _as_array(t)
        return _scalar_like(t, self.beta * np.exp(-self.beta * arr))

    def mean(self):
        return 1.0 / self.beta

    def second_moment(self):
        return 2.0 / self.beta**2

    def equilibrium(self):
        # memorylessness: the integrated tail is the same exponential
        return self

    def mgf(self, r):
        if r >= self.beta:
            raise PreconditionError("mgf diverges at and beyond the rate")
        return self.beta / (self.beta - r)

    def sample(self, rng, size):
        return rng.exponential(1.0 / self.beta, size)

    @property
    def slowest_rate(self):
        return self.beta


@dataclass(frozen=True)
class HyperExponential(ClaimDistribution):
    """Mixture of exponentials: tail(t) = sum_i p_i exp(-beta_i t).

    Rates must be distinct; components with equal rates are merged at
    construction (their weights added) so partial-fraction manipulations
    downstream never hit a repeated pole.
    """

    weights: tuple = field()
    rates: tuple = field()

    def __init__(self, weights, rates):
        w = np.asarray(weights, dtype=float)
        b = np.asarray(rates, dtype=float)
        if w.shape != b.shape or w.ndim != 1 or len(w) == 0:
            raise ValueError("weights and rates must be 1-d sequences of equal length")
        if np.any(w < 0) or np.any(b <= 0):
            raise ValueError("weights must be >= 0 and rates > 0")
        s = w.sum()
        if abs(s - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1 (got {s!r})")
        w = w / s
        # merge components whose rates coincide to machine accuracy
        order = np.argsort(b)
        w, b = w[order], b[order]
        mw, mb = [w[0]], [b[0]]
        for wi, bi in zip(w[1:], b[1:]):
            if abs(bi - mb[-1]) <= 1e-12 * bi:
                mw[-1] += wi
            else:
                mw.append(wi)
                mb.append(bi)
        object.__setattr__(self, "weights", tuple(float(x) for x in mw))
        object.__setattr__(self, "rates", tuple(float(x) for x in mb))

    def tail(self, t):
        arr = _as_array(t)
        out = np.zeros_like(arr)
        for p, b in zip(self.weights, self.rates):
            out += p * np.exp(-b * arr)
        return _scalar_like(t, out)

    def density(self, t):
        arr = _as_array(t)
        out = np.zeros_like(arr)
        for p, b in zip(self.weights, self.rates):
            out += p * b * np.exp(-b * arr)
        return _scalar_like(t, out)

    def mean(self):
        return float(sum(p / b for p, b in zip(self.weights, self.rates)))

    def second_moment(self):
        return float(sum(2.0 * p / b**2 for p, b in zip(self.weights, self.rates)))

    def equilibrium(self):
        # reweight each component by 1/beta_i and renormalise
        mu = self.mean()
        w = [p / (b * mu) for p, b in zip(self.weights, self.rates)]
        return HyperExponential(w, self.rates)

    def mgf(self, r):
        if r >= min(self.rates):
            raise PreconditionError("mgf diverges at and beyond the slowest rate")
        return float(sum(p * b / (b - r) for p, b in zip(self.weights, self.rates)))

    def sample(self, rng, size):
        u = rng.random(size)
        cum = np.cumsum(self.weights)
        idx = np.searchsorted(cum, u, side="right").clip(0, len(self.rates) - 1)
        rates = np.asarray(self.rates)[idx]
        return rng.exponential(1.0, size) / rates

    @property
    def slowest_rate(self):
        return min(self.rates)


@dataclass(frozen=True)
class Erlang(ClaimDistribution):
    """Erlang claim sizes: shape k (positive integer), rate beta."""

    shape: int
    beta: float

    def __post_init__(self):
        if int(self.shape) != self.shape or self.shape < 1:
            raise ValueError("shape must be a positive integer")
        if self.beta <= 0:
            raise ValueError("rate must be positive")
        object.__setattr__(self, "shape", int(self.shape))

    def tail(self, t):
        arr = _as_array(t)
        # survival of Erlang(k) = regularized upper incomplete gamma Q(k, beta t)
        return _scalar_like(t, gammaincc(self.shape, self.beta * arr))

    def density(self, t):
        arr = _as_array(t)
        k, b = self.shape, self.beta
        with np.errstate(divide="ignore"):
            logt = np.where(arr > 0, np.log(np.where(arr > 0, arr, 1.0)), 0.0)
        out = np.exp(k * math.log(b) + (k - 1) * logt - b * arr - gammaln(k))
        if k > 1:
            out = np.where(arr == 0, 0.0, out)
        return _scalar_like(t, out)

    def mean(self):
        return self.shape / self.beta

    def second_moment(self):
        return self.shape * (self.shape + 1) / self.beta**2

    def equilibrium(self):
        # equal-weight mixture of Erlang(1..k) with the same rate
        k = self.shape
        return ErlangMixture([1.0 / k] * k, list(range(1, k + 1)), self.beta)

    def mgf(self, r):
        if r >= self.beta:
            raise PreconditionError("mgf diverges at and beyond the rate")
        return (self.beta / (self.beta - r)) ** self.shape

    def sample(self, rng, size):
        return rng.gamma(self.shape, 1.0 / self.beta, size)

    @property
    def slowest_rate(self):
        return self.beta


@dataclass(frozen=True)
class ErlangMixture(ClaimDistribution):
    """Mixture of Erlang laws sharing one rate.

    Mainly the image of ``Erlang.equilibrium``; closed under a further
    equilibrium transform, which keeps repeated transforms exact.
    """

    weights: tuple
    shapes: tuple
    beta: float

    def __init__(self, weights, shapes, beta):
        w = np.asarray(weights, dtype=float)
        k = np.asarray(shapes)
        if beta <= 0:
            raise ValueError("rate must be positive")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("weights must be >= 0 and sum to 1")
        if np.any(k != k.astype(int)) or np.any(k.astype(int) < 1):
            raise ValueError("shapes must be positive integers")
        object.__setattr__(self, "weights", tuple(float(x) for x in w / w.sum()))
        object.__setattr__(self, "shapes", tuple(int(x) for x in k))
        object.__setattr__(self, "beta", float(beta))

    def tail(self, t):
        arr = _as_array(t)
        out = np.zeros_like(arr)
        for w, k in zip(self.weights, self.shapes):
            out += w * gammaincc(k, self.beta * arr)
        return _scalar_like(t, out)

    def density(self, t):
        arr = _as_array(t)
        out = np.zeros_like(arr)
        for w, k in zip(self.weights, self.shapes):
            out += w * Erlang(k, self.beta).density(arr)
        return _scalar_like(t, out)

    def mean(self):
        return float(sum(w * k for w, k in zip(self.weights, self.shapes)) / self.beta)

    def second_moment(self):
        return float(sum(w * k * (k + 1) for w, k in zip(self.weights, self.shapes))
                     / self.beta**2)

    def equilibrium(self):
        kmax = max(self.shapes)
        cum = np.zeros(kmax + 1)
        for w, k in zip(self.weights, self.shapes):
            cum[1:k + 1] += w  # stage i <= k contributes weight w
        v = cum[1:] / (self.beta * self.mean())
        return ErlangMixture(v, list(range(1, kmax + 1)), self.beta)

    def mgf(self, r):
        if r >= self.beta:
            raise PreconditionError("mgf diverges at and beyond the rate")
        return float(sum(w * (self.beta / (self.beta - r)) ** k
                         for w, k in zip(self.weights, self.shapes)))

    def sample(self, rng, size):
        u = rng.random(size)
        cum = np.cumsum(self.weights)
        idx = np.searchsorted(cum, u, side="right").clip(0, len(self.shapes) - 1)
        shapes = np.asarray(self.shapes, dtype=float)[idx]
        return rng.gamma(shapes) / self.beta

    @property
    def slowest_rate(self):
        return self.beta


@dataclass(frozen=True)
class Tabulated(ClaimDistribution):
    """Tail given on a uniform grid with step h, linearly interpolated.

    Queries past the grid return 0 once the recorded tail has decayed below
    ``tail_epsilon``; otherwise they fail, because extrapolating an
    undecayed tail silently truncates mass.
    """

    h: float
    values: np.ndarray
    tail_epsilon: float = 1e-12

    def __init__(self, h, values, tail_epsilon=1e-12):
        v = np.asarray(values, dtype=float)
        if h <= 0:
            raise ValueError("grid step must be positive")
        if v.ndim != 1 or len(v) < 2:
            raise ValueError("need at least two tail values")
        if abs(v[0] - 1.0) > 1e-9:
            raise ValueError("tail must start at 1 at the origin")
        if np.any(v < 0) or np.any(v > 1 + 1e-12):
            raise ValueError("tail values must lie in [0, 1]")
        if np.any(np.diff(v) > 1e-12):
            raise ValueError("tail values must be nonincreasing")
        object.__setattr__(self, "h", float(h))
        object.__setattr__(self, "values", v.copy())
        object.__setattr__(self, "tail_epsilon", float(tail_epsilon))
        self.values.setflags(write=False)

    @property
    def grid_end(self):
        return (len(self.values) - 1) * self.h

    def _decayed(self):
        return self.values[-1] < self.tail_epsilon

    def tail(self, t):
        arr = _as_array(t)
        if np.any(arr > self.grid_end + 1e-12) and not self._decayed():
            raise TruncationError(
                "query beyond the tabulated grid while the tail has not decayed")
        grid = np.arange(len(self.values)) * self.h
        out = np.interp(arr, grid, self.values, right=0.0)
        return _scalar_like(t, out)

    def density(self, t):
        # central finite differences of the CDF; one-sided at the origin
        arr = _as_array(t)
        d = self.h / 2.0
        hi = self.tail(np.maximum(arr - d, 0.0))
        lo = self.tail(arr + d)
        width = (arr + d) - np.maximum(arr - d, 0.0)
        return _scalar_like(t, (hi - lo) / width)

    def mean(self, settings: QuadratureSettings = DEFAULT_QUADRATURE):
        if self.values[-1] >= settings.tail_epsilon:
            raise TruncationError(
                "tabulated tail has not decayed below tail_epsilon at the grid end; "
                "the mean would be truncated")
        return float(integrate.trapezoid(self.values, dx=self.h))

    def second_moment(self, settings: QuadratureSettings = DEFAULT_QUADRATURE):
        if self.values[-1] >= settings.tail_epsilon:
            raise TruncationError("tabulated tail has not decayed; moment truncated")
        grid = np.arange(len(self.values)) * self.h
        return float(2.0 * integrate.trapezoid(grid * self.values, dx=self.h))

    def equilibrium(self):
        mu = self.mean()
        # reverse cumulative trapezoid of the tail
        cells = 0.5 * self.h * (self.values[:-1] + self.values[1:])
        rest = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
        return Tabulated(self.h, rest / mu, self.tail_epsilon)

    def mgf(self, r):
        if not self._decayed():
            raise TruncationError("tabulated tail has not decayed; mgf truncated")
        grid = np.arange(len(self.values)) * self.h
        # E e^{rX} = 1 + r * int e^{rt} tail(t) dt
        return float(1.0 + r * integrate.trapezoid(np.exp(r * grid) * self.values,
                                                    dx=self.h))

    def sample(self, rng, size):
        u = rng.random(size)
        cdf = 1.0 - self.values
        grid = np.arange(len(self.values)) * self.h
        return np.interp(u, cdf, grid)

    @property
    def slowest_rate(self):
        # empirical decay rate over the last decade of the recorded tail
        v = self.values
        pos = v > 0
        if pos.sum() < 2:
            return 1.0 / self.h
        i0 = max(0, int(0.9 * pos.sum()) - 1)
        j = np.nonzero(pos)[0]
        a, b = j[i0], j[-1]
        if b == a or v[b] >= v[a]:
            return 1.0 / ((b - a + 1) * self.h)
        return float(np.log(v[a] / v[b]) / ((b - a) * self.h))

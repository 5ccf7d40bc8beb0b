"""Monte Carlo verification by exact ladder sampling.

No numerical integration is shared with the solvers: ruin events are
sampled from the geometric number of record highs and exact draws of the
ladder laws.  The record count N is geometric with P(N = n) =
(1-phi) phi^n and is sampled by inversion; claim ladder heights follow the
equilibrium law (exact samplers exist for every family in scope) and
oscillation ladder heights are exponential with rate c/D.

Streams: the generator is PCG64 (explicitly constructed, never a platform
default) seeded per block through SeedSequence((seed, block_index)) with a
fixed block size, so an estimate depends only on (seed, n_samples) and is
reproducible across platforms and numpy-compatible parallel schedules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import RiskModel
from .diffusion import PerturbedModel
from .errors import PreconditionError

__all__ = ["MCEstimate", "estimate", "BLOCK_SIZE"]

BLOCK_SIZE = 2**16

_QUANTITIES = ("psi", "psi_t", "k_tail", "deficit")


@dataclass(frozen=True)
class MCEstimate:
    """A Monte Carlo probability estimate with its binomial standard error."""

    estimate: float
    standard_error: float
    n_samples: int
    seed: int
    quantity: str

    def within(self, true_value: float, n_se: float = 3.0) -> bool:
        return abs(self.estimate - true_value) <= n_se * self.standard_error


def _rng_for_block(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, block))))


def _geometric_record_counts(rng, size: int, phi: float) -> np.ndarray:
    # inversion: P(N >= n) = phi^n, using 1-U in (0, 1] to dodge log(0)
    u = rng.random(size)
    return np.floor(np.log1p(-u) / math.log(phi)).astype(np.int64)


def _segment_sums(values: np.ndarray, counts: np.ndarray) -> np.ndarray:
    cs = np.concatenate(([0.0], np.cumsum(values)))
    ends = np.cumsum(counts)
    starts = ends - counts
    return cs[ends] - cs[starts]


def _first_crossing_overshoot(values, counts, u):
    """Per segment: does the running sum ever exceed u, and by how much at
    the first crossing."""
    nb = len(counts)
    total = len(values)
    cs = np.concatenate(([0.0], np.cumsum(values)))
    ends = np.cumsum(counts)
    starts = ends - counts
    sums = cs[ends] - cs[starts]
    ruined = sums > u
    partial = cs[1:] - np.repeat(cs[starts], counts)
    sentinel = np.where(partial > u, np.arange(total), total)
    first = np.full(nb, total, dtype=np.int64)
    nz = counts > 0
    if np.any(nz):
        first[nz] = np.minimum.reduceat(sentinel, starts[nz])
    overshoot = np.zeros(nb)
    hit = first < total
    overshoot[hit] = partial[first[hit]] - u
    return ruined, overshoot


def _block_classical(model, u, y, quantity, rng, size):
    eq = model.claims.equilibrium()
    counts = _geometric_record_counts(rng, size, model.phi)
    draws = eq.sample(rng, int(counts.sum()))
    if quantity == "psi":
        return np.count_nonzero(_segment_sums(draws, counts) > u)
    ruined, overshoot = _first_crossing_overshoot(draws, counts, u)
    return np.count_nonzero(ruined & (overshoot > y))


def _block_perturbed(pm, u, quantity, rng, size):
    eq = pm.base.claims.equilibrium()
    counts = _geometric_record_counts(rng, size, pm.phi)
    total = int(counts.sum())
    osc = rng.exponential(1.0 / pm.b0, total)
    claims = eq.sample(rng, total)
    trailing = rng.exponential(1.0 / pm.b0, size)
    l_k = _segment_sums(osc, counts) + _segment_sums(claims, counts)
    if quantity == "k_tail":
        return np.count_nonzero(l_k > u)
    return np.count_nonzero(l_k + trailing > u)


def estimate(model, quantity: str, u: float, n_samples: int, seed: int,
             y: float | None = None) -> MCEstimate:
    """Estimate one ruin-type probability at initial surplus u.

    quantity:
      psi      P(ruin)                       -- RiskModel
      deficit  P(ruin and deficit > y)       -- RiskModel, needs y
      k_tail   P(L_K > u)                    -- PerturbedModel
      psi_t    P(ruin, perturbed surplus)    -- PerturbedModel

    Deterministic given (seed, n_samples); same seed gives bit-identical
    results, and k_tail/psi_t estimates from one seed are pathwise ordered.
    """
    if quantity not in _QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {_QUANTITIES}")
    if n_samples < 1:
        raise ValueError("need at least one sample")
    if u < 0:
        raise ValueError("initial surplus must be >= 0")
    if quantity == "deficit":
        if y is None:
            raise ValueError("deficit estimation needs y")
        if not isinstance(model, RiskModel):
            raise PreconditionError("deficit is a classical-model quantity")
    elif quantity == "psi":
        if not isinstance(model, RiskModel):
            raise PreconditionError("psi is a classical-model quantity")
    else:
        if not isinstance(model, PerturbedModel):
            raise PreconditionError(f"{quantity} needs a PerturbedModel")

    hits = 0
    done = 0
    block = 0
    while done < n_samples:
        size = min(BLOCK_SIZE, n_samples - done)
        rng = _rng_for_block(seed, block)
        if quantity in ("psi", "deficit"):
            hits += _block_classical(model, u, y or 0.0, quantity, rng, size)
        else:
            hits += _block_perturbed(model, u, quantity, rng, size)
        done += size
        block += 1

    p = hits / n_samples
    se = math.sqrt(p * (1.0 - p) / n_samples)
    return MCEstimate(estimate=p, standard_error=se, n_samples=n_samples,
                      seed=seed, quantity=quantity)

"""Independent closed forms used as test oracles.

Everything here is derived by Laplace-transform residue calculus on the
renewal equations, so it shares no code path with the grid solvers it
checks.  All poles involved are simple and real for the families used in
the tests.
"""

import numpy as np

__all__ = ["psi_exponents_hyperexp", "k_exponents", "eval_exponents"]


def eval_exponents(terms, u):
    """Evaluate sum of c * exp(-r u) for (c, r) pairs."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    for c, r in terms:
        out = out + c * np.exp(-r * u)
    return out


def _poly_from_roots(roots):
    p = np.array([1.0])
    for r in roots:
        p = np.convolve(p, [1.0, r])
    return p


def psi_exponents_hyperexp(weights, rates, phi):
    """Ruin probability for hyperexponential claims as a sum of
    exponentials: residues of phi (1 - fe^)/(s (1 - phi fe^))."""
    weights = np.asarray(weights, dtype=float)
    rates = np.asarray(rates, dtype=float)
    mu = np.sum(weights / rates)
    w = weights / (rates * mu)                 # equilibrium mixture weights

    def fe_hat(s):
        return np.sum(w * rates / (s + rates))

    def fe_hat_prime(s):
        return np.sum(-w * rates / (s + rates) ** 2)

    # denominator polynomial of 1 - phi*fe_hat over the common denominator
    full = _poly_from_roots(rates)
    sub = np.zeros_like(full)
    for i in range(len(rates)):
        rest = _poly_from_roots(np.delete(rates, i))
        term = phi * w[i] * rates[i] * rest
        sub[len(sub) - len(term):] += term
    den = full - sub
    poles = np.roots(den)
    terms = []
    for s in poles:
        s = float(np.real(s))
        coef = (1.0 - phi) / (s * phi * fe_hat_prime(s))
        terms.append((coef, -s))
    return terms


def k_exponents(weights, rates, phi, b0):
    """Perturbed compound geometric tail for hyperexponential-type claims as
    a sum of exponentials: residues of phi (1 - a^)/(s (1 - phi a^)) with
    a^ = (b0/(s+b0)) fe^."""
    weights = np.asarray(weights, dtype=float)
    rates = np.asarray(rates, dtype=float)
    mu = np.sum(weights / rates)
    w = weights / (rates * mu)

    def fe_hat(s):
        return np.sum(w * rates / (s + rates))

    def fe_hat_prime(s):
        return np.sum(-w * rates / (s + rates) ** 2)

    def a_hat(s):
        return b0 / (s + b0) * fe_hat(s)

    def a_hat_prime(s):
        return (-b0 / (s + b0) ** 2 * fe_hat(s)
                + b0 / (s + b0) * fe_hat_prime(s))

    full = _poly_from_roots(np.concatenate(([b0], rates)))
    sub = np.zeros_like(full)
    for i in range(len(rates)):
        rest = _poly_from_roots(np.delete(rates, i))
        term = phi * b0 * w[i] * rates[i] * rest
        sub[len(sub) - len(term):] += term
    den = full - sub
    poles = np.roots(den)
    terms = []
    for s in poles:
        s = float(np.real(s))
        coef = phi * (1.0 - a_hat(s)) / (s * (-phi) * a_hat_prime(s))
        terms.append((coef, -s))
    return terms

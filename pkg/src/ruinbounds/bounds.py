"""Continuity bounds: how far apart can two models push psi, the deficit
tail, and the perturbed compound geometric tail.

Each bound is returned as a ``BoundReport`` carrying its additive pieces,
the contraction modulus behind its prefactor, and the pass/fail status of
every hypothesis, so a caller can see exactly what the number is made of.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .classical import RiskModel, weighted_psi_moment
from .diffusion import PerturbedModel
from .distributions import (DEFAULT_QUADRATURE, Exponential,
                            QuadratureSettings)
from .errors import NumericalError, PreconditionError
from .metrics import GridFunction, kantorovich, nu_gamma, q_y

__all__ = ["BoundReport", "dk1", "dk2", "dk3"]


def _tight(settings: QuadratureSettings) -> QuadratureSettings:
    # metric evaluations inside bounds run 10x tighter than the caller asked
    return QuadratureSettings(abs_tol=settings.abs_tol / 10.0,
                              rel_tol=settings.rel_tol / 10.0,
                              tail_epsilon=settings.tail_epsilon / 10.0,
                              max_subdivisions=settings.max_subdivisions)


@dataclass(frozen=True)
class BoundReport:
    """A bound value with its build: named components, the contraction
    modulus, hypothesis flags and any convention notes.

    ``reconstruct()`` reassembles the value from the components; the two
    must agree to machine accuracy, which the test suite enforces.
    """

    kind: str
    value: float
    components: dict
    contraction_modulus: float
    preconditions: list = field(default_factory=list)
    convention_notes: list = field(default_factory=list)

    def reconstruct(self) -> float:
        c = self.components
        if self.kind == "dk1":
            return c["prefactor"] * (c["nu_gamma_plus_one_term"]
                                     + c["nu_gamma_ml_term"]
                                     + c["intensity_term"])
        if self.kind == "dk2":
            return c["prefactor"] * (c["q_y_term"] + c["intensity_term"])
        if self.kind == "dk3":
            inner = (c["h1_kantorovich_term"] + c["diffusion_ratio_term"]
                     + c["claims_kantorovich_term"] + c["mean_ratio_term"])
            return c["prefactor"] * (c["claim_scale"] * inner
                                     + c["intensity_term"])
        raise ValueError(f"unknown bound kind {self.kind!r}")


def _check(preconditions):
    for name, ok in preconditions:
        if not ok:
            raise PreconditionError(f"hypothesis violated: {name}")


def dk1(m: RiskModel, mt: RiskModel, gamma: float = 0.0,
        settings: QuadratureSettings = DEFAULT_QUADRATURE,
        h: float | None = None, u_max: float | None = None,
        psi: GridFunction | None = None) -> BoundReport:
    """Weighted-L1 continuity bound for the ruin probability:

        nu_gamma(psi, psi~) <= c/(c - lam*M_gamma) * ( nu_{gamma+1}(F, F~)/(gamma+1)
                               + nu_gamma(F, F~) * ML_gamma
                               + |lam - lam~|/c * M~_{gamma+1} * (1 + ML_gamma) )

    with M_gamma the weighted tail moment of the first claim law and
    ML_gamma the weighted moment of the first model's ruin probability.
    Requires a shared premium rate and lam*M_gamma/c < 1.

    Convention: the proof leaves open whose ruin probability enters
    ML_gamma; the first (non-tilde) model is used, and the value under the
    tilde-model convention is recorded in the notes.  At gamma = 0,
    ML_0 = E X^2 / (2 theta mu) exactly, and the report carries the reduced
    Kantorovich form, which must coincide when the intensities agree.
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    tq = _tight(settings)
    same_c = abs(m.c - mt.c) <= 1e-12 * max(m.c, mt.c)
    mx = m.claims.weighted_tail_moment(gamma, tq)
    contraction = m.lam * mx / m.c
    pre = [("shared premium rate c", same_c),
           ("contraction lam*M_gamma/c < 1", contraction < 1.0),
           ("net profit (first model)", m.phi < 1.0),
           ("net profit (second model)", mt.phi < 1.0)]
    _check(pre)

    notes = []
    if gamma == 0.0:
        ml = m.claims.second_moment() / (2.0 * m.theta * m.mu)
        ml_tilde = mt.claims.second_moment() / (2.0 * mt.theta * mt.mu)
    else:
        kwargs = {}
        if h is not None:
            kwargs["h"] = h
        ml = weighted_psi_moment(m, gamma, tq, u_max=u_max, psi=psi, **kwargs)
        ml_tilde = weighted_psi_moment(mt, gamma, tq, u_max=u_max, **kwargs)

    nu_g = nu_gamma(m.claims, mt.claims, gamma, tq)
    nu_g1 = nu_gamma(m.claims, mt.claims, gamma + 1.0, tq)
    mt_g1 = mt.claims.weighted_tail_moment(gamma + 1.0, tq)

    prefactor = m.c / (m.c - m.lam * mx)
    term1 = nu_g1 / (gamma + 1.0)
    term2 = nu_g * ml
    term3 = abs(m.lam - mt.lam) / m.c * mt_g1 * (1.0 + ml)
    value = prefactor * (term1 + term2 + term3)

    alt = prefactor * (term1 + nu_g * ml_tilde
                       + abs(m.lam - mt.lam) / m.c * mt_g1 * (1.0 + ml_tilde))
    notes.append(f"ML convention: first model ML_gamma={ml:.10g}; "
                 f"tilde-model convention would give bound {alt:.10g} "
                 f"(ML~={ml_tilde:.10g})")
    if gamma == 0.0:
        remark = prefactor * (nu_g1 + nu_g * ml
                              + abs(m.lam - mt.lam) * mt.mu / m.c * (1.0 + ml))
        notes.append(f"gamma=0 Kantorovich form: {remark:.10g}")
        if m.lam == mt.lam and abs(remark - value) > 1e-9 * max(value, 1e-300):
            raise NumericalError(
                "gamma=0 reduced form disagrees with the assembled bound")

    return BoundReport(kind="dk1", value=value,
                       components={"prefactor": prefactor,
                                   "nu_gamma_plus_one_term": term1,
                                   "nu_gamma_ml_term": term2,
                                   "intensity_term": term3,
                                   "nu_gamma": nu_g,
                                   "nu_gamma_plus_one": nu_g1,
                                   "m_gamma": mx,
                                   "ml_gamma": ml},
                       contraction_modulus=contraction,
                       preconditions=pre, convention_notes=notes)


def dk2(m: RiskModel, mt: RiskModel, y: float,
        settings: QuadratureSettings = DEFAULT_QUADRATURE) -> BoundReport:
    """Uniform bound on the deficit-at-ruin tails:

        sup_u |G-bar(u,y) - G~-bar(u,y)| <= [lam * Q_y(F, F~) + |lam - lam~| mu~]
                                             / (c - lam * mu).

    When the models share lam and mu (so c = lam (1+theta) mu), the bound
    reduces to Q_y / (theta mu), noted on the report.
    """
    if y < 0:
        raise ValueError("y must be >= 0")
    tq = _tight(settings)
    same_c = abs(m.c - mt.c) <= 1e-12 * max(m.c, mt.c)
    pre = [("shared premium rate c", same_c),
           ("net profit (first model)", m.phi < 1.0)]
    _check(pre)

    qy = q_y(m.claims, mt.claims, y, tq)
    prefactor = 1.0 / (m.c - m.lam * m.mu)
    term_q = m.lam * qy
    term_i = abs(m.lam - mt.lam) * mt.mu
    value = prefactor * (term_q + term_i)

    notes = []
    if m.lam == mt.lam and abs(m.mu - mt.mu) <= 1e-9 * m.mu:
        notes.append(
            f"lam and mu shared: bound reduces to Q_y/(theta*mu) = "
            f"{qy / (m.theta * m.mu):.10g}")

    return BoundReport(kind="dk2", value=value,
                       components={"prefactor": prefactor,
                                   "q_y_term": term_q,
                                   "intensity_term": term_i,
                                   "q_y": qy},
                       contraction_modulus=m.phi,
                       preconditions=pre, convention_notes=notes)


def dk3(pm: PerturbedModel, pmt: PerturbedModel,
        settings: QuadratureSettings = DEFAULT_QUADRATURE) -> BoundReport:
    """Uniform bound on the perturbed compound geometric tails:

        sup_u |K-bar - K~-bar| <= [ lam mu ( (c/D) K(H1, H1~) + |D~-D|/D
                                   + K(F, F~)/mu + |mu~-mu|/mu )
                                   + |lam mu - lam~ mu~| ] / (c - lam mu)

    under D >= D~ and mu >= mu~.  The oscillation laws are exponential, so
    K(H1, H1~) = |D - D~|/c in closed form; the quadrature route must agree
    and is kept as a cross-check.
    """
    m, mt = pm.base, pmt.base
    tq = _tight(settings)
    same_c = abs(m.c - mt.c) <= 1e-12 * max(m.c, mt.c)
    pre = [("shared premium rate c", same_c),
           ("D >= D~ (swap the arguments otherwise)", pm.D >= pmt.D),
           ("mu >= mu~ (swap the arguments otherwise)", m.mu >= mt.mu),
           ("net profit (first model)", m.phi < 1.0),
           ("net profit (second model)", mt.phi < 1.0)]
    _check(pre)

    k_h1_closed = abs(pm.D - pmt.D) / m.c
    k_h1_quad = kantorovich(Exponential(pm.b0), Exponential(pmt.b0), tq)
    if abs(k_h1_quad - k_h1_closed) > max(1e-10, 1e-8 * k_h1_closed):
        raise NumericalError(
            f"oscillation-law Kantorovich distance disagrees with the closed "
            f"form: {k_h1_quad!r} vs {k_h1_closed!r}")
    k_ff = kantorovich(m.claims, mt.claims, tq)

    lam_mu = m.lam * m.mu
    prefactor = 1.0 / (m.c - lam_mu)
    t_h1 = (m.c / pm.D) * k_h1_closed
    t_dr = abs(pmt.D - pm.D) / pm.D
    t_ff = k_ff / m.mu
    t_mr = abs(mt.mu - m.mu) / m.mu
    t_int = abs(lam_mu - mt.lam * mt.mu)
    value = prefactor * (lam_mu * (t_h1 + t_dr + t_ff + t_mr) + t_int)

    notes = [f"K(H1, H1~) closed form {k_h1_closed:.10g}, quadrature "
             f"{k_h1_quad:.10g}"]

    return BoundReport(kind="dk3", value=value,
                       components={"prefactor": prefactor,
                                   "claim_scale": lam_mu,
                                   "h1_kantorovich_term": t_h1,
                                   "diffusion_ratio_term": t_dr,
                                   "claims_kantorovich_term": t_ff,
                                   "mean_ratio_term": t_mr,
                                   "intensity_term": t_int,
                                   "k_h1": k_h1_closed,
                                   "k_ff": k_ff},
                       contraction_modulus=m.phi,
                       preconditions=pre, convention_notes=notes)

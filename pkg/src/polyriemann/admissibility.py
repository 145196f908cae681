"""Classification and admissibility of contact discontinuities (alpha = 0).

Three algebraic criteria are evaluated directly from region membership and
level-set tracing.  The vanishing-adsorption criterion is decided
numerically by solving a sequence of adsorption Riemann problems.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

from scipy.integrate import quad
from scipy.optimize import brentq

from .curves import trace_monotone_contact
from .errors import Inconclusive, NotAContact, WrongRegion
from .model import NO_ADSORPTION, Adsorption, FluxModel, State, coincidence_s, region

CRITERIA = ("KK", "IT", "DSM")
CONTACT_TOL = 1e-9
REGION_BAND = 1e-9
DEFAULT_ALPHAS = tuple(0.1 * 2.0 ** -k for k in range(7))


@dataclass(frozen=True)
class ContactClass:
    config: str  # OneFamily | TwoFamily | Overcompressive | Crossing | Boundary
    verdicts: dict = field(compare=False)
    sigma: float = 0.0

    def admissible(self, criterion: str) -> bool:
        return self.verdicts[_criterion_key(criterion)] == "Admissible"


def _criterion_key(criterion: str) -> str:
    key = criterion.upper()
    if key in ("VA", "VANISHINGADSORPTION", "VANISHING_ADSORPTION"):
        return "DSM"
    if key not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}")
    return key


def contact_level(model: FluxModel, U: State) -> float:
    return model.f(U.s, U.c) / U.s


def _require_contact(model: FluxModel, U_minus: State, U_plus: State) -> float:
    a, b = contact_level(model, U_minus), contact_level(model, U_plus)
    if abs(a - b) >= CONTACT_TOL:
        raise NotAContact(f"f/s differs across the jump: {a} vs {b}")
    return a


def configuration(model: FluxModel, U_minus: State, U_plus: State) -> str:
    r_minus = region(model, NO_ADSORPTION, U_minus, REGION_BAND)
    r_plus = region(model, NO_ADSORPTION, U_plus, REGION_BAND)
    if "boundary" in (r_minus, r_plus):
        return "Boundary"
    return {
        ("lower", "lower"): "OneFamily",
        ("upper", "upper"): "TwoFamily",
        ("lower", "upper"): "Overcompressive",
        ("upper", "lower"): "Crossing",
    }[(r_minus, r_plus)]


@lru_cache(maxsize=1 << 16)
def _dsm_cached(model: FluxModel, s_m: float, c_m: float, s_p: float, c_p: float) -> bool:
    return trace_monotone_contact(model, State(s_m, c_m), State(s_p, c_p))[0]


def check_dsm(model: FluxModel, U_minus: State, U_plus: State) -> bool:
    """True iff the contact curve joins the two states with ``c`` monotone."""
    _require_contact(model, U_minus, U_plus)
    return _dsm_cached(model, U_minus.s, U_minus.c, U_plus.s, U_plus.c)


def classify_contact(model: FluxModel, U_minus: State, U_plus: State,
                     with_dsm: bool = True) -> ContactClass:
    sigma = _require_contact(model, U_minus, U_plus)
    config = configuration(model, U_minus, U_plus)
    # Boundary states belong to both closed regions
    same_region = config in ("OneFamily", "TwoFamily", "Boundary")
    alg = "Admissible" if same_region else "NotAdmissible"
    verdicts = {"KK": alg, "IT": alg}
    if with_dsm:
        verdicts["DSM"] = "Admissible" if check_dsm(model, U_minus, U_plus) else "NotAdmissible"
    return ContactClass(config, verdicts, sigma)


def crossing_gap(model: FluxModel, U_minus: State) -> float:
    """Spread ``|f_s(U*) - f_s(U_minus)|`` with ``U*`` on the coincidence locus at ``c_minus``."""
    if region(model, NO_ADSORPTION, U_minus, REGION_BAND) == "lower":
        raise WrongRegion(f"({U_minus.s}, {U_minus.c}) lies where lambda_s > lambda_c")
    s_star = coincidence_s(model, NO_ADSORPTION, U_minus.c)
    return abs(model.f_s(s_star, U_minus.c) - model.f_s(U_minus.s, U_minus.c))


def crossing_floor(model: FluxModel, U_minus: State) -> float:
    """L1 mass, against the constant ``U_minus``, of the fan from ``U_minus`` toward ``U*``.

    Only the part of the fan slower than the contact speed is counted, so the
    value bounds from below the distance between the contact and any limit
    that keeps this fan.  Its width in ``xi`` is at most the crossing gap.
    """
    s_m, c = U_minus.s, U_minus.c
    s_star = coincidence_s(model, NO_ADSORPTION, c)
    if s_m <= s_star:
        return 0.0
    sigma = model.f(s_m, c) / s_m
    # fan speeds grow from f_s(s_m) toward f_s(s_star); stop at sigma
    s_end = s_star
    if model.f_s(s_star, c) > sigma:
        s_end = brentq(lambda s: model.f_s(s, c) - sigma, s_star, s_m, xtol=1e-14)

    def mass(s):
        return (s_m - s) * abs(model.derivatives(s, c).f_ss)
    return float(quad(mass, s_end, s_m, epsabs=1e-13)[0])


@dataclass
class VanishingReport:
    alphas: list
    distances: list
    verdict: str
    delta: float | None
    verdicts: dict
    config: str
    floor: float | None = None

    def to_dict(self) -> dict:
        return {
            "alpha": list(self.alphas),
            "l1": list(self.distances),
            "verdict": self.verdict,
            "delta": self.delta,
            "floor": self.floor,
            "criteria": dict(self.verdicts),
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def vanishing_adsorption_verify(model: FluxModel, ads_template: Adsorption, U_minus: State,
                                U_plus: State, alpha_seq=DEFAULT_ALPHAS, window=(-0.5, 3.5),
                                shrink: float = 0.05, floor: float = 0.02,
                                persist: float = 0.5) -> VanishingReport:
    """Decide whether the contact is a limit of adsorption Riemann solutions.

    Admissible when the last distance is below ``shrink`` times the first and
    below ``floor * width * diameter``; NotAdmissible when the last distance
    stays above ``persist`` times the first.  Otherwise raises
    :class:`Inconclusive` carrying the report.
    """
    from .riemann import contact_solution, l1_distance, solve_malpha

    alphas = [float(a) for a in alpha_seq]
    if any(b >= a for a, b in zip(alphas, alphas[1:])) or alphas[-1] <= 0:
        raise ValueError("alpha sequence must be positive and strictly decreasing")
    cls = classify_contact(model, U_minus, U_plus)
    reference = contact_solution(model, U_minus, U_plus, cls)
    dists = []
    for a in alphas:
        sol = solve_malpha(model, ads_template.with_alpha(a), U_minus, U_plus)
        dists.append(l1_distance(sol, reference, window))
    try:
        delta = crossing_gap(model, U_minus)
        gap_floor = crossing_floor(model, U_minus)
    except WrongRegion:
        delta = gap_floor = None
    width = window[1] - window[0]
    diameter = abs(U_minus.s - U_plus.s) + abs(U_minus.c - U_plus.c)
    first, last = dists[0], dists[-1]
    if last < shrink * first and last < floor * width * diameter:
        verdict = "Admissible"
    elif last > persist * first:
        verdict = "NotAdmissible"
    else:
        verdict = "Inconclusive"
    report = VanishingReport(alphas, dists, verdict, delta, dict(cls.verdicts), cls.config, gap_floor)
    if verdict == "Inconclusive":
        raise Inconclusive(f"L1 distances {dists} fit neither decision rule", report)
    return report

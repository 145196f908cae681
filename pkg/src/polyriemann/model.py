"""Flux families, adsorption isotherm and characteristic structure.

Both built-in flux families share the Corey-type form

    f(s, c) = s^2 / (s^2 + mu(c) (1 - s)^2)

with a quadratic viscosity ratio ``mu(c) = m0 + m1 c + m2 c^2``.  The
monotone family uses ``mu = 1 + c`` (so ``f_c < 0``); the boomerang family
uses ``mu = 1 + 4c(1 - c)``, which is symmetric about ``c = 0.5``.

All formulas are written with plain arithmetic so that they accept python
floats as well as numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateState, NoRoot

S_EPS = 1e-9
ROOT_XTOL = 1e-14


@dataclass(frozen=True)
class State:
    s: float
    c: float

    def __post_init__(self):
        if not (-1e-12 <= self.s <= 1 + 1e-12 and -1e-12 <= self.c <= 1 + 1e-12):
            raise ValueError(f"state ({self.s}, {self.c}) outside the unit square")

    def as_tuple(self) -> tuple[float, float]:
        return (self.s, self.c)


class FluxDerivatives(NamedTuple):
    f: float
    f_s: float
    f_c: float
    f_ss: float
    f_sc: float
    f_cc: float


@dataclass(frozen=True)
class FluxModel:
    """Fractional flow ``f(s, c)`` with a quadratic viscosity ratio."""

    family: str
    mu_coeffs: tuple[float, float, float]

    @classmethod
    def monotone(cls, mu0: float = 1.0, mu1: float = 1.0, mu2: float = 0.0) -> "FluxModel":
        return cls("monotone", (float(mu0), float(mu1), float(mu2)))

    @classmethod
    def boomerang(cls, mu0: float = 1.0, amplitude: float = 4.0) -> "FluxModel":
        # mu0 + a c (1 - c): symmetric about c = 0.5
        return cls("boomerang", (float(mu0), float(amplitude), -float(amplitude)))

    @property
    def name(self) -> str:
        return self.family

    def mu(self, c):
        m0, m1, m2 = self.mu_coeffs
        return m0 + c * (m1 + m2 * c)

    def dmu(self, c):
        _, m1, m2 = self.mu_coeffs
        return m1 + 2.0 * m2 * c

    def d2mu(self, c):
        return 2.0 * self.mu_coeffs[2]

    @property
    def c_turn(self) -> float | None:
        """Concentration where ``f_c`` vanishes (``dmu = 0``), if interior."""
        _, m1, m2 = self.mu_coeffs
        if m2 == 0.0:
            return None
        c = -m1 / (2.0 * m2)
        return c if 0.0 < c < 1.0 else None

    def f(self, s, c):
        q = 1.0 - s
        return s * s / (s * s + self.mu(c) * q * q)

    def f_s(self, s, c):
        q = 1.0 - s
        mu = self.mu(c)
        d = s * s + mu * q * q
        return 2.0 * mu * s * q / (d * d)

    def derivatives(self, s, c) -> FluxDerivatives:
        q = 1.0 - s
        mu = self.mu(c)
        dmu = self.dmu(c)
        d2mu = self.d2mu(c)
        g = s * q
        d = s * s + mu * q * q
        d_s = 2.0 * s - 2.0 * mu * q
        d_c = dmu * q * q
        d2 = d * d
        d3 = d2 * d
        return FluxDerivatives(
            f=s * s / d,
            f_s=2.0 * mu * g / d2,
            f_c=-dmu * g * g / d2,
            f_ss=2.0 * mu * ((1.0 - 2.0 * s) * d - 2.0 * g * d_s) / d3,
            f_sc=2.0 * g * (dmu * d - 2.0 * mu * d_c) / d3,
            f_cc=-g * g * (d2mu * d - 2.0 * dmu * d_c) / d3,
        )

    def inflection(self, c) -> float:
        """Saturation where ``f_ss(., c)`` changes sign."""
        return brentq(lambda s: self.derivatives(s, c).f_ss, 1e-9, 1.0 - 1e-9, xtol=ROOT_XTOL)


@dataclass(frozen=True)
class Adsorption:
    """Langmuir isotherm ``a1(c) = (1 + b) c / (1 + b c)`` scaled by ``alpha``.

    The normalisation gives ``a1(0) = 0`` and ``a1(1) = 1``; ``b = 1`` is the
    reference isotherm ``2c / (1 + c)``.
    """

    alpha: float = 0.0
    langmuir_b: float = 1.0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.langmuir_b <= 0:
            raise ValueError("Langmuir constant must be positive")

    def with_alpha(self, alpha: float) -> "Adsorption":
        return Adsorption(alpha, self.langmuir_b)

    def a1(self, c):
        b = self.langmuir_b
        return (1.0 + b) * c / (1.0 + b * c)

    def da1(self, c):
        b = self.langmuir_b
        w = 1.0 + b * c
        return (1.0 + b) / (w * w)

    def d2a1(self, c):
        b = self.langmuir_b
        w = 1.0 + b * c
        return -2.0 * b * (1.0 + b) / (w * w * w)


NO_ADSORPTION = Adsorption(0.0)


def eval_flux(model: FluxModel, U: State) -> FluxDerivatives:
    return model.derivatives(U.s, U.c)


def _c_denominator(ads: Adsorption, s, c):
    return s + ads.alpha * ads.da1(c)


def char_speeds(model: FluxModel, ads: Adsorption, U: State) -> tuple[float, float]:
    """Return ``(lambda_s, lambda_c)`` at ``U``."""
    den = _c_denominator(ads, U.s, U.c)
    if den <= 0.0:
        raise DegenerateState(f"c-speed undefined at s={U.s}, alpha={ads.alpha}")
    d = model.derivatives(U.s, U.c)
    return d.f_s, d.f / den


def c_speed(model: FluxModel, ads: Adsorption, s, c):
    return model.f(s, c) / _c_denominator(ads, s, c)


def characteristic_matrix(model: FluxModel, ads: Adsorption, U: State) -> np.ndarray:
    lam_s, lam_c = char_speeds(model, ads, U)
    d = model.derivatives(U.s, U.c)
    return np.array([[lam_s, d.f_c], [0.0, lam_c]])


def c_eigenvector(model: FluxModel, ads: Adsorption, U: State) -> np.ndarray:
    lam_s, lam_c = char_speeds(model, ads, U)
    return np.array([-model.derivatives(U.s, U.c).f_c, lam_s - lam_c])


def lin_degeneracy(model: FluxModel, ads: Adsorption, U: State) -> float:
    """Directional derivative of the c-speed along its eigenvector."""
    lam_s, lam_c = char_speeds(model, ads, U)
    if ads.alpha == 0.0:
        return 0.0
    den = _c_denominator(ads, U.s, U.c)
    f = model.f(U.s, U.c)
    return -ads.alpha * f * ads.d2a1(U.c) * (lam_s - lam_c) / (den * den)


def a1_secant(ads: Adsorption, c_minus: float, c_plus: float) -> float:
    if c_plus == c_minus:
        return ads.da1(c_minus)
    return (ads.a1(c_plus) - ads.a1(c_minus)) / (c_plus - c_minus)


def tangent_point(model: FluxModel, c: float, shift: float) -> float:
    """Saturation where the ray from ``(-shift, 0)`` touches ``f(., c)``.

    Solves ``f_s(s, c) (s + shift) = f(s, c)`` on (0, 1).  For ``shift = 0``
    this is the interior coincidence locus of the model without adsorption.
    """
    def h(s):
        d = model.derivatives(s, c)
        return d.f_s * (s + shift) - d.f

    lo, hi = S_EPS, 1.0 - S_EPS
    h_lo, h_hi = h(lo), h(hi)
    if not (h_lo > 0.0 > h_hi):
        raise NoRoot(f"no tangency for c={c}, shift={shift}: flux is not S-shaped")
    return brentq(h, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)


def tangent_point_vec(model: FluxModel, c, shift, iters: int = 60):
    """Vectorised bisection version of :func:`tangent_point`."""
    c = np.asarray(c, dtype=float)
    shift = np.broadcast_to(np.asarray(shift, dtype=float), c.shape)
    lo = np.full(c.shape, S_EPS)
    hi = np.full(c.shape, 1.0 - S_EPS)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        d = model.derivatives(mid, c)
        pos = d.f_s * (mid + shift) - d.f > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    return 0.5 * (lo + hi)


def coincidence_s(model: FluxModel, ads: Adsorption, c: float) -> float:
    """Saturation on the interior coincidence locus at concentration ``c``."""
    return tangent_point(model, c, ads.alpha * ads.da1(c))


def max_ratio(model: FluxModel, c: float, shift: float = 0.0) -> tuple[float, float]:
    """Largest value of ``f/(s + shift)`` at fixed ``c`` and where it occurs."""
    s = tangent_point(model, c, shift)
    return model.f(s, c) / (s + shift), s


def level_roots(model: FluxModel, c: float, level: float, shift: float = 0.0,
                s_tan: float | None = None) -> dict[str, float]:
    """Solve ``f(s, c) = level (s + shift)`` on each side of the tangency.

    Returns a dict with keys ``"lower"`` (``s`` below the tangency, where
    ``f_s`` exceeds the ray slope) and/or ``"upper"``.  When the level equals
    the maximum the tangency point is returned under both keys.
    """
    if s_tan is None:
        s_tan = tangent_point(model, c, shift)
    top = model.f(s_tan, c) / (s_tan + shift)
    out: dict[str, float] = {}
    if level > top * (1 + 1e-13) or level <= 0.0:
        return out
    if abs(level - top) <= 1e-13 * top:
        return {"lower": s_tan, "upper": s_tan}

    def g(s):
        return model.f(s, c) - level * (s + shift)

    # f/(s+shift) rises from 0 on (0, s_tan] and falls to 1/(1+shift) on [s_tan, 1]
    if g(S_EPS * 1e-3) < 0.0:
        out["lower"] = brentq(g, S_EPS * 1e-3, s_tan, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    if g(1.0) <= 0.0:
        out["upper"] = 1.0 if g(1.0) == 0.0 else brentq(
            g, s_tan, 1.0, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    return out


def region(model: FluxModel, ads: Adsorption, U: State, band: float = 1e-9) -> str:
    """``"lower"`` for lambda_s > lambda_c, ``"upper"`` for <, else ``"boundary"``."""
    lam_s, lam_c = char_speeds(model, ads, U)
    gap = lam_s - lam_c
    if abs(gap) <= band:
        return "boundary"
    return "lower" if gap > 0 else "upper"


def saturation_on_square(s: float) -> float:
    """Clamp boundary saturations inward so that c-speeds stay defined."""
    return min(max(s, S_EPS), 1.0 - S_EPS)


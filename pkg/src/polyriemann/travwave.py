"""Traveling waves of the viscous adsorption model and the alpha -> 0 limit.

The profile system is

    s' = f(s, c) - sigma (s + alpha a1(1))
    c' = (sigma alpha / kappa) (a1(1) c - a1(c))

Both edges ``c = 0`` and ``c = 1`` consist of equilibria.  The connection
from the saddle on ``c = 1`` to the saddle on ``c = 0`` is located by
shooting in ``sigma`` with a matching section at ``c = 0.5``.  Both halves
are integrated with ``c`` as the independent variable, which makes the
section exact and removes the slow tails near the invariant edges.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .curves import CurveSample, sigma_min_max
from .errors import NoConnection, RootCountMismatch
from .model import Adsorption, FluxModel, State, level_roots

SEED = 1e-8
MATCH_C = 0.5
MATCH_TOL = 1e-9
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12
ALPHA_BAR = 0.5


@dataclass(frozen=True)
class TWSystem:
    model: FluxModel
    alpha: float
    kappa: float
    sigma: float
    ads: Adsorption = Adsorption()

    @property
    def shift(self) -> float:
        return self.alpha * self.ads.a1(1.0)

    @property
    def c_rate(self) -> float:
        return self.sigma * self.alpha / self.kappa


@dataclass(frozen=True)
class Equilibrium:
    state: State
    type: str  # Saddle | Repeller | Attractor
    eigenvalues: tuple[float, float]


def tw_rhs(sys: TWSystem, U: State) -> tuple[float, float]:
    s, c = U.s, U.c
    ds = sys.model.f(s, c) - sys.sigma * (s + sys.shift)
    dc = sys.c_rate * (sys.ads.a1(1.0) * c - sys.ads.a1(c))
    return ds, dc


def jacobian(sys: TWSystem, U: State) -> np.ndarray:
    d = sys.model.derivatives(U.s, U.c)
    ads = sys.ads
    return np.array([
        [d.f_s - sys.sigma, d.f_c],
        [0.0, sys.c_rate * (ads.a1(1.0) - ads.da1(U.c))],
    ])


def _classify(lam_s: float, lam_c: float) -> str:
    if lam_s > 0 and lam_c > 0:
        return "Repeller"
    if lam_s < 0 and lam_c < 0:
        return "Attractor"
    return "Saddle"


def equilibria_at_edge(sys: TWSystem, c_edge: float) -> list[Equilibrium]:
    """The two equilibria on the invariant line ``c = c_edge``, lower root first."""
    try:
        roots = level_roots(sys.model, c_edge, sys.sigma, sys.shift)
    except Exception as exc:  # flux without an interior tangency
        raise RootCountMismatch(str(exc)) from exc
    vals = sorted(set(roots.values()))
    if len(vals) != 2 or not all(0.0 < v < 1.0 for v in vals):
        raise RootCountMismatch(
            f"expected two interior equilibria on c={c_edge} for sigma={sys.sigma}, found {vals}")
    out = []
    for s in vals:
        U = State(s, c_edge)
        J = jacobian(sys, U)
        lam_s, lam_c = float(J[0, 0]), float(J[1, 1])
        out.append(Equilibrium(U, _classify(lam_s, lam_c), (lam_s, lam_c)))
    return out


def _saddles(sys: TWSystem) -> tuple[State, State]:
    top = equilibria_at_edge(sys, 1.0)[1].state
    bottom = equilibria_at_edge(sys, 0.0)[0].state
    return top, bottom


def _seed(sys: TWSystem, U: State) -> State:
    """Step ``SEED`` off a saddle along its c-eigenvector, into ``0 < c < 1``."""
    J = jacobian(sys, U)
    lam = J[1, 1]
    v = np.array([J[0, 1], lam - J[0, 0]])
    v /= np.linalg.norm(v)
    if (U.c == 1.0 and v[1] > 0) or (U.c == 0.0 and v[1] < 0):
        v = -v
    return State(float(U.s + SEED * v[0]), float(U.c + SEED * v[1]))


def _half_orbit(sys: TWSystem, start: State, c_end: float):
    """Integrate ``(s, xi)`` as functions of ``c`` from ``start`` to ``c_end``."""
    model, ads = sys.model, sys.ads
    a1_1 = ads.a1(1.0)

    def rhs(c, y):
        s = y[0]
        dc = sys.c_rate * (a1_1 * c - ads.a1(c))
        ds = model.f(s, c) - sys.sigma * (s + sys.shift)
        return [ds / dc, 1.0 / dc]

    def wall(_c, y):
        return min(y[0], 1.0 - y[0])
    wall.terminal = True

    sol = solve_ivp(rhs, (start.c, c_end), [start.s, 0.0], method="RK45", rtol=ODE_RTOL,
                    atol=ODE_ATOL, events=(wall,))
    hit = len(sol.t_events[0]) > 0
    return sol, hit


def _mismatch(sys: TWSystem):
    U_minus, U_plus = _saddles(sys)
    fwd, hit_f = _half_orbit(sys, _seed(sys, U_minus), MATCH_C)
    bwd, hit_b = _half_orbit(sys, _seed(sys, U_plus), MATCH_C)
    s_f = fwd.y[0, -1] if not hit_f else round(fwd.y[0, -1])
    s_b = bwd.y[0, -1] if not hit_b else round(bwd.y[0, -1])
    return float(s_f - s_b), (U_minus, U_plus, fwd, bwd)


@dataclass
class Connection:
    sigma: float
    U_minus: State
    U_plus: State
    orbit: CurveSample
    xi: np.ndarray
    mismatch: float
    alpha: float
    kappa: float

    def rh_residuals(self, model: FluxModel, ads: Adsorption) -> tuple[float, float]:
        shift = self.alpha * ads.a1(1.0)
        r1 = self.sigma - model.f(self.U_minus.s, 1.0) / (self.U_minus.s + shift)
        r2 = self.sigma - model.f(self.U_plus.s, 0.0) / (self.U_plus.s + shift)
        return abs(r1), abs(r2)

    def orbit_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["xi", "s", "c"])
        for x, (s, c) in zip(self.xi, self.orbit.points):
            w.writerow([repr(float(x)), repr(float(s)), repr(float(c))])
        return buf.getvalue()


def shoot_connection(model: FluxModel, alpha: float, kappa: float,
                     ads_template: Adsorption = Adsorption(), reverse: bool = False,
                     alpha_bar: float = ALPHA_BAR) -> Connection:
    """Saddle-to-saddle orbit and its speed, by bisection on ``sigma``.

    ``reverse`` flips the sign convention of the matching mismatch; the
    located speed does not depend on it.
    """
    if not (0.0 < alpha <= alpha_bar):
        raise NoConnection(f"alpha={alpha} outside (0, {alpha_bar}]")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    ads = ads_template.with_alpha(alpha)
    lo_edge, hi_edge = sigma_min_max(model, ads)
    eps = 1e-6 * (hi_edge - lo_edge)
    lo, hi = lo_edge + eps, hi_edge - eps
    sign = -1.0 if reverse else 1.0

    def m(sigma):
        val, data = _mismatch(TWSystem(model, alpha, kappa, sigma, ads))
        return sign * val, data

    m_lo, _ = m(lo)
    m_hi, _ = m(hi)
    if m_lo == 0.0:
        hi = lo
    elif m_hi == 0.0:
        lo = hi
    elif m_lo * m_hi > 0:
        raise NoConnection(f"matching mismatch keeps its sign on [{lo}, {hi}]", m_lo, m_hi)
    mid, val, data = lo, m_lo, None
    while True:
        mid = 0.5 * (lo + hi)
        val, data = m(mid)
        if abs(val) < MATCH_TOL or hi - lo <= 4 * np.finfo(float).eps * hi or mid in (lo, hi):
            break
        if (val > 0) == (m_lo > 0):
            lo, m_lo = mid, val
        else:
            hi = mid

    U_minus, U_plus, fwd, bwd = data
    # forward half runs c: 1 -> 0.5, backward half c: 0 -> 0.5; join at the section
    xi_f = fwd.y[1] - fwd.y[1, -1]
    xi_b = bwd.y[1] - bwd.y[1, -1]
    s = np.concatenate([fwd.y[0], bwd.y[0][::-1][1:]])
    c = np.concatenate([fwd.t, bwd.t[::-1][1:]])
    xi = np.concatenate([xi_f, xi_b[::-1][1:]])
    pts = np.column_stack([s, c])
    orbit = CurveSample(pts, "c", "TravelingWave", xi, {"sigma": mid})
    return Connection(float(mid), U_minus, U_plus, orbit, xi, float(sign * val), alpha, kappa)


@dataclass(frozen=True)
class LimitRow:
    alpha: float
    sigma: float
    s_minus: float
    s_plus: float
    err_sigma: float
    err_s_minus: float
    err_s_plus: float


def undercompressive_limit(model: FluxModel) -> tuple[float, State, State]:
    """Speed and end states of the alpha = 0 undercompressive contact."""
    sigma_u = sigma_min_max(model, Adsorption(0.0))[0]
    s_minus = level_roots(model, 1.0, sigma_u)["upper"]
    s_plus = level_roots(model, 0.0, sigma_u)["lower"]
    return sigma_u, State(s_minus, 1.0), State(s_plus, 0.0)


@dataclass
class LimitStudy:
    rows: list
    sigma_u: float
    U_minus_u: State
    U_plus_u: State
    connections: list

    def orders(self) -> list[float]:
        """Empirical convergence order of the speed error between successive rows."""
        out = []
        for a, b in zip(self.rows, self.rows[1:]):
            if a.err_sigma > 0 and b.err_sigma > 0:
                out.append(math.log(a.err_sigma / b.err_sigma) / math.log(a.alpha / b.alpha))
            else:
                out.append(float("nan"))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "sigma", "s_minus", "s_plus", "err_sigma", "err_s_minus", "err_s_plus"])
        for r in self.rows:
            w.writerow([repr(float(v)) for v in (r.alpha, r.sigma, r.s_minus, r.s_plus,
                                                 r.err_sigma, r.err_s_minus, r.err_s_plus)])
        return buf.getvalue()


def limit_study(model: FluxModel, kappa: float, alpha_seq,
                ads_template: Adsorption = Adsorption()) -> LimitStudy:
    alphas = [float(a) for a in alpha_seq]
    if any(b >= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alpha sequence must be strictly decreasing")
    sigma_u, Um, Up = undercompressive_limit(model)
    rows, conns = [], []
    for a in alphas:
        con = shoot_connection(model, a, kappa, ads_template)
        conns.append(con)
        rows.append(LimitRow(a, con.sigma, con.U_minus.s, con.U_plus.s, abs(con.sigma - sigma_u),
                             abs(con.U_minus.s - Um.s), abs(con.U_plus.s - Up.s)))
    return LimitStudy(rows, sigma_u, Um, Up, conns)

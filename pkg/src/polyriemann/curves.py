"""Wave curves of the concentration family.

Hugoniot c-branches, integral (rarefaction) curves, contact level sets of
``f/s`` and the tangent constructions used by the traveling-wave problem.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from .errors import NoIntersection, StalledAtApex
from .model import (
    Adsorption,
    FluxModel,
    State,
    a1_secant,
    c_speed,
    level_roots,
    max_ratio,
    tangent_point,
    tangent_point_vec,
)

C_STEP = 1.0 / 512
TOUCH_TOL = 1e-9
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12


@dataclass(frozen=True)
class CurveSample:
    points: np.ndarray  # shape (n, 2): columns s, c
    param: str  # "s" or "c"
    kind: str  # "HugoniotC" | "IntegralC" | "ContactLevelSet"
    values: np.ndarray | None = None  # speed or level per point
    flags: dict = field(default_factory=dict)

    @property
    def s(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def c(self) -> np.ndarray:
        return self.points[:, 1]

    def end(self) -> State:
        s, c = self.points[-1]
        return State(float(s), float(c))


def _param_of(points: np.ndarray) -> str:
    ds = np.diff(points[:, 0])
    dc = np.diff(points[:, 1])
    if len(ds) == 0 or np.all(ds > 0) or np.all(ds < 0):
        return "s"
    if np.all(dc > 0) or np.all(dc < 0):
        return "c"
    return "arc"


# ---------------------------------------------------------------- Hugoniot ---

def hugoniot_c_branch(model: FluxModel, ads: Adsorption, U_minus: State, c_target: float,
                      side: str) -> tuple[State, float]:
    """Point at ``c_target`` on the requested side of the c-branch through ``U_minus``.

    ``side`` is ``"lower"`` (below the arch apex) or ``"upper"``.  Returns the
    state and the shock speed.
    """
    shift = ads.alpha * a1_secant(ads, U_minus.c, c_target)
    sigma = model.f(U_minus.s, U_minus.c) / (U_minus.s + shift)
    roots = level_roots(model, c_target, sigma, shift)
    if side not in roots:
        raise NoIntersection(
            f"c-branch through ({U_minus.s}, {U_minus.c}) does not reach c={c_target} on the {side} side")
    return State(roots[side], c_target), sigma


def hugoniot_c_curve(model: FluxModel, ads: Adsorption, U_minus: State, n: int = 257) -> CurveSample:
    """Sampled c-branch of the Hugoniot locus (both sides), ordered by ``s``."""
    lower, upper = [], []
    for c in np.linspace(0.0, 1.0, n):
        shift = ads.alpha * a1_secant(ads, U_minus.c, float(c))
        sigma = model.f(U_minus.s, U_minus.c) / (U_minus.s + shift)
        roots = level_roots(model, float(c), sigma, shift)
        if "lower" in roots:
            lower.append((roots["lower"], c, sigma))
        if "upper" in roots and roots["upper"] != roots.get("lower"):
            upper.append((roots["upper"], c, sigma))
    pts = np.array(sorted(lower + upper))
    return CurveSample(pts[:, :2], "s", "HugoniotC", pts[:, 2])


# ---------------------------------------------------------- integral curves ---

def _eigen_rhs(model: FluxModel, ads: Adsorption, sign: float):
    def rhs(_eta, y):
        s, c = y
        d = model.derivatives(s, c)
        lam_c = d.f / (s + ads.alpha * ads.da1(c))
        return [-sign * d.f_c, sign * (d.f_s - lam_c)]
    return rhs


def integral_curve(model: FluxModel, ads: Adsorption, U0: State, c_target: float,
                   max_eta: float = 1e4) -> CurveSample:
    """Integral curve of the c-eigenvector field from ``U0`` until ``c = c_target``.

    The curve stays on the side of the coincidence locus containing ``U0``.
    Raises :class:`StalledAtApex` if the arch turns over before reaching the
    target concentration.
    """
    lam_s = model.f_s(U0.s, U0.c)
    gap0 = lam_s - c_speed(model, ads, U0.s, U0.c)
    if c_target == U0.c:
        pts = np.array([[U0.s, U0.c]])
        return CurveSample(pts, "s", "IntegralC", np.array([c_speed(model, ads, U0.s, U0.c)]))
    up = c_target > U0.c
    if gap0 == 0.0:
        raise StalledAtApex(f"({U0.s}, {U0.c}) is on the coincidence locus")
    sign = 1.0 if (gap0 > 0) == up else -1.0
    rhs = _eigen_rhs(model, ads, sign)

    def hit_target(_eta, y):
        return y[1] - c_target
    hit_target.terminal = True

    def hit_apex(_eta, y):
        s, c = y
        return model.f_s(s, c) - c_speed(model, ads, s, c)
    hit_apex.terminal = True

    def hit_wall(_eta, y):
        return min(y[0], 1.0 - y[0])
    hit_wall.terminal = True

    sol = solve_ivp(rhs, (0.0, max_eta), [U0.s, U0.c], method="RK45", rtol=ODE_RTOL,
                    atol=ODE_ATOL, events=(hit_target, hit_apex, hit_wall), dense_output=True)
    if len(sol.t_events[0]) == 0:
        y_end = sol.y[:, -1]
        raise StalledAtApex(
            f"integral curve from ({U0.s}, {U0.c}) stalls at ({y_end[0]:.6g}, {y_end[1]:.6g}) "
            f"before c={c_target}")
    eta_end = sol.t_events[0][0]
    ys = sol.y[:, sol.t <= eta_end]
    end = sol.y_events[0][0].copy()
    end[1] = c_target
    pts = np.column_stack([np.append(ys[0], end[0]), np.append(ys[1], end[1])])
    if len(pts) > 1 and np.all(pts[-1] == pts[-2]):
        pts = pts[:-1]
    speeds = c_speed(model, ads, pts[:, 0], pts[:, 1])
    return CurveSample(pts, _param_of(pts), "IntegralC", speeds,
                       {"eta_end": float(eta_end), "dense": sol.sol, "sign": sign})


def integral_curve_to_apex(model: FluxModel, ads: Adsorption, U0: State,
                           max_eta: float = 1e4) -> CurveSample:
    """Integral curve from ``U0`` climbing in ``c`` until it meets the coincidence locus."""
    gap0 = model.f_s(U0.s, U0.c) - c_speed(model, ads, U0.s, U0.c)
    sign = 1.0 if gap0 > 0 else -1.0
    rhs = _eigen_rhs(model, ads, sign)

    def hit_apex(_eta, y):
        s, c = y
        return model.f_s(s, c) - c_speed(model, ads, s, c)
    hit_apex.terminal = True

    sol = solve_ivp(rhs, (0.0, max_eta), [U0.s, U0.c], method="RK45", rtol=ODE_RTOL,
                    atol=ODE_ATOL, events=(hit_apex,), dense_output=True)
    if len(sol.t_events[0]) == 0:
        raise StalledAtApex("integral curve left the domain before reaching its apex")
    end = sol.y_events[0][0]
    pts = np.column_stack([np.append(sol.y[0], end[0]), np.append(sol.y[1], end[1])])
    return CurveSample(pts, _param_of(pts), "IntegralC",
                       c_speed(model, ads, pts[:, 0], pts[:, 1]), {"apex": (float(end[0]), float(end[1]))})


# ---------------------------------------------------------- contact levels ---

class LevelGrid:
    """Both roots of ``f(s, c) = level * s`` on a grid of concentrations."""

    def __init__(self, model: FluxModel, level: float, extra=(), step: float = C_STEP):
        nodes = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
        extra = [float(e) for e in extra if e is not None and 0.0 <= e <= 1.0]
        if model.c_turn is not None:
            extra.append(model.c_turn)
        self.c = np.unique(np.concatenate([nodes, np.array(extra, dtype=float)]))
        self.model = model
        self.level = level
        self.s_tan = tangent_point_vec(model, self.c, 0.0)
        self.top = model.f(self.s_tan, self.c) / self.s_tan
        scale = max(1.0, abs(level))
        self.touch = np.abs(self.top - level) <= TOUCH_TOL * scale
        self.attained = (self.top >= level) | self.touch
        self.lower = self._bisect(np.full_like(self.c, 1e-12), self.s_tan)
        upper_ok = level >= 1.0
        self.upper = self._bisect(self.s_tan, np.ones_like(self.c)) if upper_ok else np.full_like(self.c, np.nan)
        self.lower[~self.attained] = np.nan
        self.upper[~self.attained] = np.nan
        self.lower[self.touch] = self.s_tan[self.touch]
        self.upper[self.touch] = self.s_tan[self.touch]

    def _bisect(self, a, b, iters: int = 60):
        a = a.copy()
        b = b.copy()
        ga = self.model.f(a, self.c) - self.level * a
        for _ in range(iters):
            m = 0.5 * (a + b)
            gm = self.model.f(m, self.c) - self.level * m
            same = np.sign(gm) == np.sign(ga)
            a = np.where(same, m, a)
            ga = np.where(same, gm, ga)
            b = np.where(same, b, m)
        return 0.5 * (a + b)

    def index(self, c: float) -> int:
        return int(np.argmin(np.abs(self.c - c)))

    def root(self, i: int, side: str) -> float:
        return float(self.lower[i] if side == "lower" else self.upper[i])

    def apex_between(self, i: int, j: int) -> float:
        """Concentration between nodes ``i`` (attained) and ``j`` (not) where the level is the maximum."""
        model, level = self.model, self.level

        def gap(c):
            return max_ratio(model, c)[0] - level
        a, b = self.c[i], self.c[j]
        if gap(a) * gap(b) > 0:
            return float(a)
        return brentq(gap, min(a, b), max(a, b), xtol=1e-14)


def _flip(side: str) -> str:
    return "upper" if side == "lower" else "lower"


def _walk(grid: LevelGrid, i0: int, side: str, direction: int, allow_turn: bool):
    """Follow one branch from node ``i0``; returns (points, events)."""
    pts: list[tuple[float, float]] = []
    events: list[tuple[str, float, float]] = []
    i = i0
    n = len(grid.c)
    while True:
        j = i + direction
        if j < 0 or j >= n:
            return pts, events
        if not grid.attained[j]:
            if not allow_turn:
                events.append(("gap", float(grid.c[j]), float("nan")))
                return pts, events
            c_ap = grid.apex_between(i, j)
            s_ap = tangent_point(grid.model, c_ap, 0.0)
            pts.append((s_ap, c_ap))
            events.append(("apex", s_ap, c_ap))
            side = _flip(side)
            direction = -direction
            # walk back from node i on the other branch
            pts.append((grid.root(i, side), float(grid.c[i])))
            continue
        s = grid.root(j, side)
        if np.isnan(s):
            events.append(("gap", float(grid.c[j]), float("nan")))
            return pts, events
        pts.append((s, float(grid.c[j])))
        if grid.touch[j] and 0 < j < n - 1:
            nxt = j + direction
            if grid.attained[nxt] and not grid.touch[nxt]:
                events.append(("saddle", s, float(grid.c[j])))
                side = _flip(side)
        i = j


def contact_level_set(model: FluxModel, U0: State) -> CurveSample:
    """Connected piece of the level set ``f/s = f(U0)/s0`` through ``U0``."""
    level = model.f(U0.s, U0.c) / U0.s
    grid = LevelGrid(model, level, extra=(U0.c,))
    i0 = grid.index(U0.c)
    s_tan = float(grid.s_tan[i0])
    n = len(grid.c)
    cross = None
    saddle = (grid.touch[i0] and 0 < i0 < n - 1
              and grid.attained[i0 - 1] and grid.attained[i0 + 1]
              and not grid.touch[i0 - 1] and not grid.touch[i0 + 1])
    if saddle:
        # separatrix cross: two diagonals through the saddle, each monotone in c
        a, ev_a = _walk(grid, i0, "lower", -1, False)
        b, ev_b = _walk(grid, i0, "upper", +1, False)
        pts = list(reversed(a)) + [(U0.s, U0.c)] + b
        a2, _ = _walk(grid, i0, "upper", -1, False)
        b2, _ = _walk(grid, i0, "lower", +1, False)
        cross = np.array(list(reversed(a2)) + [(U0.s, U0.c)] + b2, dtype=float)
        ev_a = ev_a + [("saddle", U0.s, U0.c)]
    elif grid.touch[i0]:
        a, ev_a = _walk(grid, i0, "lower", -1, True)
        b, ev_b = _walk(grid, i0, "upper", -1, True)
        pts = list(reversed(a)) + [(U0.s, U0.c)] + b
    else:
        side = "lower" if U0.s < s_tan else "upper"
        a, ev_a = _walk(grid, i0, side, -1, True)
        b, ev_b = _walk(grid, i0, side, +1, True)
        pts = list(reversed(a)) + [(U0.s, U0.c)] + b
    arr = np.array(pts, dtype=float)
    events = ev_a + ev_b
    flags = {
        "apex": [(e[1], e[2]) for e in events if e[0] == "apex"],
        "saddle": [(e[1], e[2]) for e in events if e[0] == "saddle"],
    }
    if cross is not None:
        flags["cross"] = cross
    values = model.f(arr[:, 0], arr[:, 1]) / arr[:, 0]
    return CurveSample(arr, _param_of(arr), "ContactLevelSet", values, flags)


def trace_monotone_contact(model: FluxModel, U_minus: State, U_plus: State,
                           tol: float = 1e-6) -> tuple[bool, list]:
    """Follow the level set from ``U_minus`` with ``c`` moving monotonically to ``c_plus``.

    Branch changes are accepted only where the level touches the coincidence
    locus at an interior node with the level attained on both sides (a saddle
    junction).  Returns ``(reached, events)``.
    """
    level = model.f(U_minus.s, U_minus.c) / U_minus.s
    if U_minus.c == U_plus.c:
        return abs(U_minus.s - U_plus.s) <= tol, []
    grid = LevelGrid(model, level, extra=(U_minus.c, U_plus.c))
    i0, i1 = grid.index(U_minus.c), grid.index(U_plus.c)
    direction = 1 if i1 > i0 else -1
    if grid.touch[i0]:
        starts = ["lower", "upper"]
    else:
        starts = ["lower" if U_minus.s < grid.s_tan[i0] else "upper"]
    for side in starts:
        i, cur = i0, side
        events: list = []
        ok = True
        while i != i1:
            j = i + direction
            if not grid.attained[j]:
                ok = False
                events.append(("gap", float(grid.c[j])))
                break
            if grid.touch[j] and j != i1:
                nxt = j + direction
                if grid.attained[nxt] and not grid.touch[nxt]:
                    events.append(("saddle", float(grid.c[j])))
                    cur = _flip(cur)
            i = j
        if not ok:
            continue
        s_end = grid.root(i1, cur)
        if not np.isnan(s_end) and abs(s_end - U_plus.s) <= tol:
            return True, events
    return False, []


# ------------------------------------------------------- tangent constructions ---

def sigma_min_max(model: FluxModel, ads: Adsorption) -> tuple[float, float]:
    """Slopes of the tangents from ``(-alpha a1(1), 0)`` bounding the shooting interval.

    The lower value minimises the tangent slope over ``c``; the upper value is
    the tangent slope to ``f(., 0)``.
    """
    shift = ads.alpha * ads.a1(1.0)
    res = minimize_scalar(lambda c: max_ratio(model, c, shift)[0], bounds=(0.0, 1.0),
                          method="bounded", options={"xatol": 1e-10})
    lo = min(float(res.fun), max_ratio(model, 0.0, shift)[0], max_ratio(model, 1.0, shift)[0])
    c_turn = model.c_turn
    if c_turn is not None:
        at_turn = max_ratio(model, c_turn, shift)[0]
        if abs(res.x - c_turn) > 1e-6 and at_turn > lo + 1e-12:
            raise AssertionError(f"tangent-slope minimiser {res.x} differs from c={c_turn}")
        lo = min(lo, at_turn)
    hi = max_ratio(model, 0.0, shift)[0]
    return lo, hi


def saddle_point_A(model: FluxModel) -> tuple[State, float]:
    """Equilibrium of the contact-curve field where ``f_c = 0`` on the coincidence locus."""
    c = model.c_turn
    if c is None:
        raise ValueError("model has no interior concentration with f_c = 0")
    s = tangent_point(model, c, 0.0)
    d = model.derivatives(s, c)
    return State(s, c), -d.f_sc ** 2 + d.f_ss * d.f_cc

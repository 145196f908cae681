"""Riemann solutions of the polymer system with and without adsorption.

Every solution has the layout ``s-wave group -> c-wave -> s-wave group``.
The c-wave speed can only take a handful of values (the c-speed of either
data state, or the largest ray slope at either data concentration), so the
solver enumerates those candidates, builds both s-wave groups with the
envelope construction and keeps the assemblies whose speeds are ordered and
whose c-wave passes the requested admissibility test.  Exactly one distinct
profile must survive.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .admissibility import ContactClass, classify_contact, configuration, _criterion_key
from .curves import integral_curve
from .errors import (
    AmbiguousSolution,
    NoAdmissibleSolution,
    NoIntersection,
    NoRoot,
    PreconditionViolated,
    StalledAtApex,
    UnsupportedModel,
)
from .model import (
    NO_ADSORPTION,
    S_EPS,
    Adsorption,
    FluxModel,
    State,
    a1_secant,
    c_speed,
    coincidence_s,
    level_roots,
    max_ratio,
    region,
    tangent_point,
)
from .scalar_bl import SWaveGroup, envelope_construct, fan_invert, oleinik_check

SPEED_TOL = 1e-9
SAME_TOL = 1e-9
RH_TOL = 1e-10
DEFAULT_WINDOW = (-0.5, 3.5)
L1_SAMPLES = 10_000

S_KINDS = ("SShock", "SRarefaction")
DISCONTINUITIES = ("SShock", "CShock", "Contact")


@dataclass(frozen=True)
class Wave:
    kind: str  # SShock | SRarefaction | CShock | CRarefaction | Contact
    left: State
    right: State
    speed_l: float
    speed_r: float
    contact: ContactClass | None = None
    fan: Callable | None = field(default=None, compare=False, repr=False)

    @property
    def is_fan(self) -> bool:
        return self.kind in ("SRarefaction", "CRarefaction")

    @property
    def speed(self) -> float:
        return self.speed_l

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "left": {"s": self.left.s, "c": self.left.c},
            "right": {"s": self.right.s, "c": self.right.c},
        }
        if self.is_fan:
            out["speed_range"] = [self.speed_l, self.speed_r]
        else:
            out["speed"] = self.speed_l
        if self.contact is not None:
            out["config"] = self.contact.config
        return out


@dataclass(frozen=True)
class RiemannSolution:
    model: FluxModel
    alpha: float
    U_L: State
    U_R: State
    waves: tuple[Wave, ...]
    criterion: str | None = None
    ads: Adsorption = NO_ADSORPTION

    @property
    def constants(self) -> list[State]:
        return [self.U_L] + [w.right for w in self.waves]

    def speeds(self) -> list[float]:
        out = []
        for w in self.waves:
            out.extend([w.speed_l, w.speed_r] if w.is_fan else [w.speed_l])
        return out

    def to_dict(self) -> dict:
        return {
            "model": {"family": self.model.family, "mu": list(self.model.mu_coeffs)},
            "alpha": self.alpha,
            "criterion": self.criterion,
            "UL": {"s": self.U_L.s, "c": self.U_L.c},
            "UR": {"s": self.U_R.s, "c": self.U_R.c},
            "waves": [w.to_dict() for w in self.waves],
        }

    def to_json(self, valid=None) -> str:
        d = self.to_dict()
        d["valid"] = valid
        return json.dumps(d, sort_keys=True, indent=2)


# ------------------------------------------------------------ s-wave groups ---

@lru_cache(maxsize=1 << 17)
def _envelope(model: FluxModel, c: float, s_minus: float, s_plus: float) -> SWaveGroup:
    return envelope_construct(model, c, s_minus, s_plus)


def _s_waves(model: FluxModel, group: SWaveGroup) -> list[Wave]:
    waves = []
    c = group.c
    for seg in group.segments:
        kind = "SShock" if seg.kind == "shock" else "SRarefaction"
        fan = None
        if kind == "SRarefaction":
            fan = _s_fan(model, c, seg.s_l, seg.s_r)
        waves.append(Wave(kind, State(seg.s_l, c), State(seg.s_r, c), seg.speed_l, seg.speed_r, fan=fan))
    return waves


def _s_fan(model, c, s_l, s_r):
    def sample(xi):
        s = fan_invert(model, c, s_l, s_r, xi)
        return s, np.full_like(s, c)
    return sample


def _c_fan(model: FluxModel, ads: Adsorption, dense, eta_a: float, eta_b: float):
    """Sampler of a c-rarefaction from its integral-curve dense output."""
    def speed_at(eta):
        y = dense(eta)
        return c_speed(model, ads, y[0], y[1])

    def sample(xi, iters: int = 60):
        xi = np.asarray(xi, dtype=float)
        a = np.full(xi.shape, eta_a)
        b = np.full(xi.shape, eta_b)
        # the c-speed increases from eta_a to eta_b
        for _ in range(iters):
            m = 0.5 * (a + b)
            below = speed_at(m) < xi
            a = np.where(below, m, a)
            b = np.where(below, b, m)
        y = dense(0.5 * (a + b))
        return y[0], y[1]
    return sample


# ------------------------------------------------------------------ helpers ---

def _nudge(U: State) -> State:
    s = min(max(U.s, S_EPS), 1.0 - S_EPS)
    return U if s == U.s else State(s, U.c)


def _roots(model, c, level, shift, pin=None):
    try:
        roots = level_roots(model, c, level, shift)
    except NoRoot:
        return []
    vals = []
    for v in roots.values():
        if pin is not None and abs(v - pin) < 1e-11:
            v = pin
        if all(abs(v - w) > 1e-13 for w in vals):
            vals.append(v)
    return vals


def _max_speed(group: SWaveGroup, fallback: float) -> float:
    return group.segments[-1].speed_r if group.segments else fallback


def _min_speed(group: SWaveGroup, fallback: float) -> float:
    return group.segments[0].speed_l if group.segments else fallback


def _signature(waves) -> list:
    """Profile fingerprint: fans and jumps, with equal-speed jumps merged."""
    sig: list[tuple] = []
    for w in waves:
        if w.left == w.right:
            continue
        if w.is_fan:
            sig.append(("fan", w.speed_l, w.speed_r, w.left.s, w.left.c, w.right.s, w.right.c))
        elif sig and sig[-1][0] == "jump" and abs(sig[-1][1] - w.speed_l) <= 1e-12:
            sig[-1] = sig[-1][:4] + (w.right.s, w.right.c)
        else:
            sig.append(("jump", w.speed_l, w.left.s, w.left.c, w.right.s, w.right.c))
    return sig


def _same_profile(a, b) -> bool:
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if x[0] != y[0] or len(x) != len(y):
            return False
        if any(abs(p - q) > SAME_TOL for p, q in zip(x[1:], y[1:])):
            return False
    return True


def _pick_unique(candidates, U_L, U_R, what):
    if not candidates:
        raise NoAdmissibleSolution(f"no admissible {what} assembly for ({U_L.s}, {U_L.c}) -> ({U_R.s}, {U_R.c})")
    groups: list[list] = []
    for waves in candidates:
        sig = _signature(waves)
        for g in groups:
            if _same_profile(g[0], sig):
                g[1].append(waves)
                break
        else:
            groups.append([sig, [waves]])
    if len(groups) > 1:
        raise AmbiguousSolution(
            f"{len(groups)} distinct admissible {what} profiles for ({U_L.s}, {U_L.c}) -> ({U_R.s}, {U_R.c})")
    return min(groups[0][1], key=len)


def _bl_solution(model, ads, U_L, U_R, criterion):
    group = _envelope(model, U_L.c, U_L.s, U_R.s)
    return RiemannSolution(model, ads.alpha, U_L, U_R, tuple(_s_waves(model, group)), criterion, ads)


# ------------------------------------------------------------------- alpha=0 ---

def solve_m0(model: FluxModel, U_L: State, U_R: State, criterion: str = "IT") -> RiemannSolution:
    """Riemann solution without adsorption, contacts filtered by ``criterion``.

    ``criterion`` is one of ``KK``, ``IT``, ``DSM`` or ``VA`` (the last is
    decided through the monotone contact-curve test).
    """
    key = _criterion_key(criterion)
    U_L, U_R = _nudge(U_L), _nudge(U_R)
    if U_L == U_R:
        return RiemannSolution(model, 0.0, U_L, U_R, (), criterion)
    if U_L.c == U_R.c:
        return _bl_solution(model, NO_ADSORPTION, U_L, U_R, criterion)

    lev_L = model.f(U_L.s, U_L.c) / U_L.s
    lev_R = model.f(U_R.s, U_R.c) / U_R.s
    sigmas = [lev_L, lev_R, max_ratio(model, U_L.c)[0], max_ratio(model, U_R.c)[0]]
    candidates = []
    seen: list[float] = []
    for sigma in sigmas:
        if any(abs(sigma - t) <= 1e-14 * max(1.0, sigma) for t in seen):
            continue
        seen.append(sigma)
        for s_a in _roots(model, U_L.c, sigma, 0.0, pin=U_L.s):
            g1 = _envelope(model, U_L.c, U_L.s, s_a)
            if _max_speed(g1, -np.inf) > sigma + SPEED_TOL:
                continue
            U_a = State(s_a, U_L.c)
            for s_b in _roots(model, U_R.c, sigma, 0.0, pin=U_R.s):
                g2 = _envelope(model, U_R.c, s_b, U_R.s)
                if _min_speed(g2, np.inf) < sigma - SPEED_TOL:
                    continue
                U_b = State(s_b, U_R.c)
                if key in ("KK", "IT"):
                    if configuration(model, U_a, U_b) in ("Overcompressive", "Crossing"):
                        continue
                    cls = classify_contact(model, U_a, U_b)
                else:
                    cls = classify_contact(model, U_a, U_b)
                    if not cls.admissible(key):
                        continue
                contact = Wave("Contact", U_a, U_b, sigma, sigma, contact=cls)
                candidates.append(_s_waves(model, g1) + [contact] + _s_waves(model, g2))
    waves = _pick_unique(candidates, U_L, U_R, f"{criterion} contact")
    return RiemannSolution(model, 0.0, U_L, U_R, tuple(waves), criterion)


def contact_solution(model: FluxModel, U_minus: State, U_plus: State,
                     cls: ContactClass | None = None) -> RiemannSolution:
    """The single-contact weak solution joining two states of one contact level."""
    if cls is None:
        cls = classify_contact(model, U_minus, U_plus)
    w = Wave("Contact", U_minus, U_plus, cls.sigma, cls.sigma, contact=cls)
    return RiemannSolution(model, 0.0, U_minus, U_plus, (w,), None)


# ------------------------------------------------------------------- alpha>0 ---

def _side(model, shift, U) -> str:
    """Position of ``U`` relative to the tangency of rays from ``(-shift, 0)``."""
    s_t = tangent_point(model, U.c, shift)
    if abs(U.s - s_t) <= 1e-9:
        return "boundary"
    return "lower" if U.s < s_t else "upper"


def _c_shock_candidates(model, ads, U_L, U_R):
    shift = ads.alpha * a1_secant(ads, U_L.c, U_R.c)
    lev_L = model.f(U_L.s, U_L.c) / (U_L.s + shift)
    lev_R = model.f(U_R.s, U_R.c) / (U_R.s + shift)
    sigmas = [lev_L, lev_R, max_ratio(model, U_L.c, shift)[0], max_ratio(model, U_R.c, shift)[0]]
    out = []
    seen: list[float] = []
    for sigma in sigmas:
        if any(abs(sigma - t) <= 1e-14 * max(1.0, sigma) for t in seen):
            continue
        seen.append(sigma)
        for s_a in _roots(model, U_L.c, sigma, shift, pin=U_L.s):
            g1 = _envelope(model, U_L.c, U_L.s, s_a)
            if _max_speed(g1, -np.inf) > sigma + SPEED_TOL:
                continue
            U_a = State(s_a, U_L.c)
            for s_b in _roots(model, U_R.c, sigma, shift, pin=U_R.s):
                g2 = _envelope(model, U_R.c, s_b, U_R.s)
                if _min_speed(g2, np.inf) < sigma - SPEED_TOL:
                    continue
                U_b = State(s_b, U_R.c)
                sides = {_side(model, shift, U_a), _side(model, shift, U_b)} - {"boundary"}
                if len(sides) > 1:
                    continue
                shock = Wave("CShock", U_a, U_b, sigma, sigma)
                out.append(_s_waves(model, g1) + [shock] + _s_waves(model, g2))
    return out


def _partner(model, ads, U) -> float | None:
    """Other saturation at ``c`` with the same c-speed as ``U``."""
    shift = ads.alpha * ads.da1(U.c)
    level = model.f(U.s, U.c) / (U.s + shift)
    try:
        roots = level_roots(model, U.c, level, shift)
    except NoRoot:
        return None
    others = [v for v in roots.values() if abs(v - U.s) > 1e-10]
    return others[0] if others else None


def _trace(model, ads, U0, c_target):
    """Integral curve from ``U0`` to ``c_target`` as (end state, dense, eta_end)."""
    curve = integral_curve(model, ads, U0, c_target)
    return curve.end(), curve.flags.get("dense"), curve.flags.get("eta_end", 0.0)


def _c_rarefaction_candidates(model, ads, U_L, U_R):
    arcs = []  # (U_a, U_b, dense, eta at U_a, eta at U_b)
    starts = [U_L]
    p = _partner(model, ads, U_L)
    if p is not None:
        starts.append(State(p, U_L.c))
    for U_a in starts:
        try:
            U_b, dense, eta = _trace(model, ads, U_a, U_R.c)
        except (StalledAtApex, NoRoot):
            continue
        arcs.append((U_a, U_b, dense, 0.0, eta))
    ends = [U_R]
    p = _partner(model, ads, U_R)
    if p is not None:
        ends.append(State(p, U_R.c))
    s_top = coincidence_s(model, ads, U_R.c)
    ends += [State(s_top - 1e-6, U_R.c), State(s_top + 1e-6, U_R.c)]
    for k, U_b in enumerate(ends):
        try:
            U_a, dense, eta = _trace(model, ads, U_b, U_L.c)
        except (StalledAtApex, NoRoot):
            continue
        if k >= 2:
            U_b = State(s_top, U_R.c)
        arcs.append((U_a, U_b, dense, eta, 0.0))

    out = []
    for U_a, U_b, dense, eta_a, eta_b in arcs:
        lam_a = c_speed(model, ads, U_a.s, U_a.c)
        lam_b = c_speed(model, ads, U_b.s, U_b.c)
        if lam_b < lam_a - SPEED_TOL:
            continue
        g1 = _envelope(model, U_L.c, U_L.s, U_a.s)
        if _max_speed(g1, -np.inf) > lam_a + SPEED_TOL:
            continue
        g2 = _envelope(model, U_R.c, U_b.s, U_R.s)
        if _min_speed(g2, np.inf) < lam_b - SPEED_TOL:
            continue
        fan = _c_fan(model, ads, dense, eta_a, eta_b)
        wave = Wave("CRarefaction", U_a, U_b, float(lam_a), float(lam_b), fan=fan)
        out.append(_s_waves(model, g1) + [wave] + _s_waves(model, g2))
    return out


def solve_malpha(model: FluxModel, ads: Adsorption, U_L: State, U_R: State) -> RiemannSolution:
    """Riemann solution with adsorption ``alpha > 0`` (monotone flux family only)."""
    if model.family != "monotone":
        raise UnsupportedModel("adsorption Riemann solver is implemented for the monotone family only")
    if ads.alpha <= 0.0:
        raise ValueError("solve_malpha needs alpha > 0; use solve_m0 otherwise")
    U_L, U_R = _nudge(U_L), _nudge(U_R)
    if U_L == U_R:
        return RiemannSolution(model, ads.alpha, U_L, U_R, (), None, ads)
    if U_L.c == U_R.c:
        return _bl_solution(model, ads, U_L, U_R, None)
    if U_R.c < U_L.c:
        candidates = _c_shock_candidates(model, ads, U_L, U_R)
    else:
        candidates = _c_rarefaction_candidates(model, ads, U_L, U_R)
    waves = _pick_unique(candidates, U_L, U_R, f"alpha={ads.alpha}")
    return RiemannSolution(model, ads.alpha, U_L, U_R, tuple(waves), None, ads)


# ------------------------------------------------------------------ sampling ---

def sample_arrays(sol: RiemannSolution, xi) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised right-continuous evaluation of ``(s, c)`` at ``xi``."""
    xi = np.asarray(xi, dtype=float)
    s = np.full(xi.shape, sol.U_L.s)
    c = np.full(xi.shape, sol.U_L.c)
    for w in sol.waves:
        past = xi >= w.speed_r if w.is_fan else xi >= w.speed_l
        s = np.where(past, w.right.s, s)
        c = np.where(past, w.right.c, c)
        if w.is_fan:
            inside = (xi >= w.speed_l) & (xi < w.speed_r)
            if np.any(inside):
                fs, fc = w.fan(xi[inside])
                s[inside] = fs
                c[inside] = fc
    return s, c


def sample(sol: RiemannSolution, xi: float) -> State:
    s, c = sample_arrays(sol, np.array([xi]))
    return State(float(s[0]), float(c[0]))


def profile(sol: RiemannSolution, grid) -> list[State]:
    s, c = sample_arrays(sol, grid)
    return [State(float(a), float(b)) for a, b in zip(s, c)]


def l1_distance(sol_a: RiemannSolution, sol_b: RiemannSolution, window=DEFAULT_WINDOW,
                n: int = L1_SAMPLES) -> float:
    """Trapezoid L1 distance of ``s`` plus ``c`` over ``window`` at ``t = 1``.

    Wave speeds inside the window are added to the uniform grid together with
    their left neighbours so that jumps are integrated exactly.
    """
    lo, hi = float(window[0]), float(window[1])
    grid = np.linspace(lo, hi, n)
    breaks = np.array([v for v in sol_a.speeds() + sol_b.speeds() if lo < v < hi])
    if breaks.size:
        grid = np.unique(np.concatenate([grid, breaks, np.nextafter(breaks, -np.inf)]))
    sa, ca = sample_arrays(sol_a, grid)
    sb, cb = sample_arrays(sol_b, grid)
    return float(np.trapezoid(np.abs(sa - sb) + np.abs(ca - cb), grid))


# ---------------------------------------------------------------- validation ---

def _rh_residual(model: FluxModel, ads: Adsorption, w: Wave) -> float:
    l, r, sig = w.left, w.right, w.speed_l
    f_l, f_r = model.f(l.s, l.c), model.f(r.s, r.c)
    water = sig * (r.s - l.s) - (f_r - f_l)
    acc_l = l.c * l.s + ads.alpha * ads.a1(l.c)
    acc_r = r.c * r.s + ads.alpha * ads.a1(r.c)
    agent = sig * (acc_r - acc_l) - (r.c * f_r - l.c * f_l)
    return max(abs(water), abs(agent))


def validate(sol: RiemannSolution) -> dict:
    """Report-only structural checks of a solution."""
    model, ads = sol.model, sol.ads
    rh = all(_rh_residual(model, ads, w) < RH_TOL for w in sol.waves if not w.is_fan)
    ordered = all(b.speed_l >= a.speed_r - SPEED_TOL for a, b in zip(sol.waves, sol.waves[1:]))
    ordered = ordered and all(w.speed_r >= w.speed_l - SPEED_TOL for w in sol.waves)
    oleinik = True
    for w in sol.waves:
        if w.kind == "SShock":
            try:
                oleinik &= oleinik_check(model, w.left.c, w.left.s, w.right.s, w.speed_l)
            except Exception:
                oleinik = False
    contacts = True
    for w in sol.waves:
        if w.kind == "Contact":
            if w.contact is None:
                contacts = False
                continue
            try:
                again = classify_contact(model, w.left, w.right)
            except Exception:
                contacts = False
                continue
            contacts &= again.config == w.contact.config and again.verdicts == w.contact.verdicts
    chain = all(a.right == b.left for a, b in zip(sol.waves, sol.waves[1:]))
    if sol.waves:
        chain = chain and sol.waves[0].left == sol.U_L and sol.waves[-1].right == sol.U_R
    else:
        chain = sol.U_L == sol.U_R
    report = {"rh": rh, "ordering": ordered, "oleinik": oleinik, "contacts": contacts, "end_states": chain}
    report["valid"] = all(report.values())
    return report


# ----------------------------------------------------------- nonuniqueness ---

def nonuniqueness_pair(model: FluxModel, U_L: State, U_R: State) -> tuple[RiemannSolution, RiemannSolution]:
    """Two distinct weak solutions for data on one contact level with crossing regions."""
    if region(model, NO_ADSORPTION, U_L) != "upper" or region(model, NO_ADSORPTION, U_R) != "lower":
        raise PreconditionViolated("need U_L with lambda_s < lambda_c and U_R with lambda_s > lambda_c")
    lev_L = model.f(U_L.s, U_L.c) / U_L.s
    lev_R = model.f(U_R.s, U_R.c) / U_R.s
    if abs(lev_L - lev_R) >= 1e-9:
        raise PreconditionViolated(f"data are not on one contact level ({lev_L} vs {lev_R})")
    first = contact_solution(model, U_L, U_R)

    s2 = coincidence_s(model, NO_ADSORPTION, U_R.c)
    U2 = State(s2, U_R.c)
    sigma = model.f(s2, U_R.c) / s2
    g2 = _envelope(model, U_R.c, s2, U_R.s)
    options = []
    for s1 in _roots(model, U_L.c, sigma, 0.0):
        g1 = _envelope(model, U_L.c, U_L.s, s1)
        if _max_speed(g1, -np.inf) <= sigma + SPEED_TOL:
            U1 = State(s1, U_L.c)
            contact = Wave("Contact", U1, U2, sigma, sigma, contact=classify_contact(model, U1, U2))
            options.append(_s_waves(model, g1) + [contact] + _s_waves(model, g2))
    if not options:
        raise NoIntersection("no level partner of the coincidence state at c_L")
    second = RiemannSolution(model, 0.0, U_L, U_R, tuple(options[0]), None)
    return first, second

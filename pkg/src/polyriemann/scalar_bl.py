"""Buckley-Leverett wave groups at fixed concentration.

The admissible solution of the scalar problem ``s_t + f(s, c)_x = 0`` with a
jump from ``s_minus`` to ``s_plus`` follows the lower convex envelope of
``f(., c)`` when ``s_minus < s_plus`` and the upper concave envelope when
``s_minus > s_plus``.  Envelopes are built by a monotone-chain hull on a
uniform grid; every chord/graph tangency is then polished by a root solve.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import SpeedMismatch
from .model import FluxModel

GRID_POINTS = 2001
SONIC_TOL = 1e-9


@dataclass(frozen=True)
class Segment:
    kind: str  # "shock" | "rarefaction"
    s_l: float
    s_r: float
    speed_l: float
    speed_r: float

    @property
    def speed(self) -> float:
        return self.speed_l


@dataclass(frozen=True)
class SWaveGroup:
    c: float
    s_minus: float
    s_plus: float
    segments: tuple[Segment, ...] = field(default_factory=tuple)

    @property
    def empty(self) -> bool:
        return not self.segments

    @property
    def speed_range(self) -> tuple[float, float] | None:
        if not self.segments:
            return None
        return self.segments[0].speed_l, self.segments[-1].speed_r

    def sample(self, model: FluxModel, xi):
        """Saturation at similarity coordinate(s) ``xi`` (right-continuous)."""
        xi = np.asarray(xi, dtype=float)
        out = np.full(xi.shape, float(self.s_minus))
        for seg in self.segments:
            if seg.kind == "shock":
                out = np.where(xi >= seg.speed_l, seg.s_r, out)
            else:
                inside = (xi >= seg.speed_l) & (xi < seg.speed_r)
                out = np.where(xi >= seg.speed_r, seg.s_r, out)
                if np.any(inside):
                    out[inside] = fan_invert(model, self.c, seg.s_l, seg.s_r, xi[inside])
        return out


def fan_invert(model: FluxModel, c: float, s_l: float, s_r: float, xi, iters: int = 60):
    """Solve ``f_s(s, c) = xi`` for ``s`` between ``s_l`` and ``s_r`` (f_s monotone there)."""
    xi = np.asarray(xi, dtype=float)
    a = np.full(xi.shape, s_l, dtype=float)
    b = np.full(xi.shape, s_r, dtype=float)
    # speed increases from s_l towards s_r along a fan
    for _ in range(iters):
        m = 0.5 * (a + b)
        below = model.f_s(m, c) < xi
        a = np.where(below, m, a)
        b = np.where(below, b, m)
    return 0.5 * (a + b)


def _hull(x: np.ndarray, y: np.ndarray, lower: bool) -> list[int]:
    """Monotone-chain lower (or upper) hull of points sorted by ``x``."""
    sign = 1.0 if lower else -1.0
    hull: list[int] = []
    for i in range(len(x)):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o])
            if sign * cross <= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def _chord(model, c, a, b):
    return (model.f(b, c) - model.f(a, c)) / (b - a)


def _polish_tangency(model, c, anchor, guess, h, lo, hi):
    """Point ``t`` in ``[lo, hi]`` where the chord from ``anchor`` is tangent to ``f``.

    ``f(., c)`` has one inflection, and the tangency from ``anchor`` lies on
    the other side of it, which gives a sign-changing bracket for
    ``f_s(t) - chord(t, anchor)``.
    """
    def psi(t):
        return model.f_s(t, c) - (model.f(t, c) - model.f(anchor, c)) / (t - anchor)

    try:
        p = model.inflection(c)
    except ValueError:
        p = None
    if p is not None:
        a, b = (lo, min(p, hi)) if anchor > p else (max(p, lo), hi)
        a, b = (a, min(b, anchor - 1e-15)) if anchor > guess else (max(a, anchor + 1e-15), b)
        if a < b and psi(a) * psi(b) < 0.0:
            return brentq(psi, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)

    def phi(t):
        return model.f_s(t, c) * (t - anchor) - (model.f(t, c) - model.f(anchor, c))

    lo_lim, hi_lim = (anchor, 1.0) if guess > anchor else (0.0, anchor)
    width = 2.0 * h
    for _ in range(40):
        a = max(guess - width, lo_lim + 1e-15 if guess > anchor else lo_lim)
        b = min(guess + width, hi_lim - 1e-15 if guess < anchor else hi_lim)
        pa, pb = phi(a), phi(b)
        if pa == 0.0:
            return a
        if pb == 0.0:
            return b
        if pa * pb < 0.0:
            return brentq(phi, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        width *= 2.0
    return guess


def envelope_construct(model: FluxModel, c: float, s_minus: float, s_plus: float,
                       n: int = GRID_POINTS) -> SWaveGroup:
    """Oleinik-admissible wave group from ``s_minus`` to ``s_plus`` at fixed ``c``."""
    if s_minus == s_plus:
        return SWaveGroup(c, s_minus, s_plus, ())
    lower = s_minus < s_plus
    lo, hi = (s_minus, s_plus) if lower else (s_plus, s_minus)
    if hi - lo <= 1e-14:
        # below grid resolution: a weak shock moving with the characteristic speed
        sp = float(model.f_s(0.5 * (lo + hi), c))
        return SWaveGroup(c, s_minus, s_plus, (Segment("shock", float(s_minus), float(s_plus), sp, sp),))
    x = np.linspace(lo, hi, n)
    y = model.f(x, c)
    verts = _hull(x, y, lower)
    h = (hi - lo) / (n - 1)

    # pieces in increasing s: ("fan", i, j) or ("chord", i, j)
    pieces: list[list] = []
    for i, j in zip(verts[:-1], verts[1:]):
        kind = "fan"
        if j > i + 1:
            line = y[i] + (y[j] - y[i]) * (x[i + 1:j] - x[i]) / (x[j] - x[i])
            if np.max(np.abs(y[i + 1:j] - line)) > 1e-13:
                kind = "chord"
        if pieces and pieces[-1][0] == kind == "fan":
            pieces[-1][2] = j
        else:
            pieces.append([kind, i, j])

    # breakpoints in s with polished tangencies
    cuts = [lo] + [None] * (len(pieces) - 1) + [hi]
    for k in range(1, len(pieces)):
        left, right = pieces[k - 1], pieces[k]
        guess = x[left[2]]
        if left[0] == "chord" and right[0] == "fan":
            anchor = cuts[k - 1] if cuts[k - 1] is not None else x[left[1]]
            cuts[k] = _polish_tangency(model, c, anchor, guess, h, lo, hi)
        elif left[0] == "fan" and right[0] == "chord":
            anchor = x[right[2]]
            cuts[k] = _polish_tangency(model, c, anchor, guess, h, lo, hi)
        else:
            cuts[k] = guess

    raw = []
    for k, piece in enumerate(pieces):
        a, b = cuts[k], cuts[k + 1]
        if b - a <= 1e-14:
            continue
        raw.append((piece[0], a, b))
    # merge neighbouring chords left by degenerate fans
    merged: list[tuple[str, float, float]] = []
    for kind, a, b in raw:
        if merged and merged[-1][0] == kind == "chord":
            merged[-1] = ("chord", merged[-1][1], b)
        else:
            merged.append((kind, a, b))

    segs = []
    for kind, a, b in merged:
        if kind == "chord":
            sp = _chord(model, c, a, b)
            segs.append(("shock", a, b, sp, sp))
        else:
            segs.append(("rarefaction", a, b, model.f_s(a, c), model.f_s(b, c)))
    if not lower:
        segs = [(k, b, a, sb, sa) for (k, a, b, sa, sb) in reversed(segs)]
    segments = tuple(Segment(k, float(a), float(b), float(sa), float(sb)) for k, a, b, sa, sb in segs)
    return SWaveGroup(c, s_minus, s_plus, segments)


def oleinik_check(model: FluxModel, c: float, s_l: float, s_r: float, sigma: float,
                  tol: float = 1e-9, n: int = 1001) -> bool:
    """Oleinik chord condition for a shock from ``s_l`` to ``s_r`` with speed ``sigma``.

    Admissible iff ``(f(s) - f(s_l)) / (s - s_l) >= sigma`` for every ``s``
    strictly between the two states (both orientations).
    """
    if s_l == s_r:
        raise ValueError("zero-strength shock")
    if abs(s_r - s_l) <= 1e-14:
        # chord slope is lost to rounding; the weak-shock limit is the characteristic speed
        return bool(abs(sigma - model.f_s(0.5 * (s_l + s_r), c)) <= 1e-9)
    chord = _chord(model, c, s_l, s_r)
    if abs(chord - sigma) > 1e-10 * max(1.0, abs(chord)):
        raise SpeedMismatch(f"sigma={sigma} but Rankine-Hugoniot gives {chord}")
    f_l = model.f(s_l, c)

    def ratio(s):
        return (model.f(s, c) - f_l) / (s - s_l)

    t = np.linspace(0.0, 1.0, n)[1:-1]
    s = s_l + t * (s_r - s_l)
    r = ratio(s)
    k = int(np.argmin(r))
    worst = r[k]
    a = s[max(k - 1, 0)]
    b = s[min(k + 1, len(s) - 1)]
    if a != b:
        res = minimize_scalar(ratio, bounds=tuple(sorted((a, b))), method="bounded",
                              options={"xatol": 1e-13})
        worst = min(worst, float(res.fun))
    return bool(worst >= sigma - tol)

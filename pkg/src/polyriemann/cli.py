"""Command-line front end.

Exit codes: 0 success, 1 malformed input, 2 no admissible solution,
3 validation failure.  Settings come from a flat ``key = value`` config file
(``--config``); command-line flags override it.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .admissibility import DEFAULT_ALPHAS, classify_contact, vanishing_adsorption_verify
from .curves import contact_level_set, hugoniot_c_curve, integral_curve, integral_curve_to_apex
from .errors import Inconclusive, NoAdmissibleSolution, NoConnection, PolyRiemannError, StalledAtApex
from .model import Adsorption, FluxModel, State
from .riemann import (
    RiemannSolution,
    Wave,
    l1_distance,
    nonuniqueness_pair,
    sample_arrays,
    solve_m0,
    solve_malpha,
    validate,
)
from .travwave import ALPHA_BAR, limit_study

EXIT_OK, EXIT_INPUT, EXIT_NO_SOLUTION, EXIT_INVALID = 0, 1, 2, 3

DEFAULTS = {
    "model": "monotone",
    "mu0": None,
    "mu1": None,
    "mu2": None,
    "amplitude": 4.0,
    "langmuir_b": 1.0,
    "alpha": 0.0,
    "alphas": None,
    "kappa": "1",
    "window": "-0.5,3.5",
    "samples": 1001,
    "criterion": "IT",
    "alpha_bar": ALPHA_BAR,
    "out": ".",
}


class InputError(Exception):
    """Malformed command-line or config input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------------ config ---

def read_config(path: str) -> dict:
    out = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"config line {n}: expected key = value")
        key, val = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise InputError(f"config line {n}: unknown key {key!r}")
        out[key] = val
    return out


def _settings(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _float(cfg, key) -> float:
    try:
        return float(cfg[key])
    except (TypeError, ValueError):
        raise InputError(f"{key}: expected a number, got {cfg[key]!r}") from None


def _floats(text, key) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{key}: expected comma-separated numbers, got {text!r}") from None


def _state(text, key) -> State:
    vals = _floats(text, key) if text is not None else []
    if len(vals) != 2:
        raise InputError(f"{key}: expected 's,c', got {text!r}")
    try:
        return State(*vals)
    except ValueError as exc:
        raise InputError(f"{key}: {exc}") from None


def build_model(cfg) -> tuple[FluxModel, Adsorption]:
    family = str(cfg["model"]).lower()
    if family == "monotone":
        coeffs = [1.0, 1.0, 0.0]
        for i, key in enumerate(("mu0", "mu1", "mu2")):
            if cfg[key] is not None:
                coeffs[i] = _float(cfg, key)
        model = FluxModel.monotone(*coeffs)
    elif family == "boomerang":
        mu0 = _float(cfg, "mu0") if cfg["mu0"] is not None else 1.0
        model = FluxModel.boomerang(mu0, _float(cfg, "amplitude"))
    else:
        raise InputError(f"model: expected 'monotone' or 'boomerang', got {cfg['model']!r}")
    try:
        ads = Adsorption(_float(cfg, "alpha"), _float(cfg, "langmuir_b"))
    except ValueError as exc:
        raise InputError(f"alpha/langmuir_b: {exc}") from None
    return model, ads


def _window(cfg) -> tuple[float, float]:
    w = _floats(cfg["window"], "window")
    if len(w) != 2 or not w[0] < w[1]:
        raise InputError(f"window: expected 'lo,hi' with lo < hi, got {cfg['window']!r}")
    return w[0], w[1]


def _alphas(cfg, default) -> list[float]:
    if cfg["alphas"] is None:
        return list(default)
    vals = _floats(cfg["alphas"], "alphas")
    if not vals or any(b >= a for a, b in zip(vals, vals[1:])) or vals[-1] <= 0:
        raise InputError("alphas: expected a positive, strictly decreasing list")
    return vals


# ------------------------------------------------------------------ output ---

def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _profile_csv(sol: RiemannSolution, window, n: int) -> str:
    xi = np.linspace(window[0], window[1], n)
    s, c = sample_arrays(sol, xi)
    return _csv(["xi", "s", "c"], zip(xi, s, c))


def solution_from_dict(d: dict) -> RiemannSolution:
    """Rebuild a solution (without fan samplers) from its JSON form."""
    model = FluxModel(d["model"]["family"], tuple(float(v) for v in d["model"]["mu"]))
    alpha = float(d.get("alpha") or 0.0)
    ads = Adsorption(alpha)
    waves = []
    for w in d["waves"]:
        left = State(w["left"]["s"], w["left"]["c"])
        right = State(w["right"]["s"], w["right"]["c"])
        lo, hi = w["speed_range"] if "speed_range" in w else (w["speed"], w["speed"])
        contact = classify_contact(model, left, right) if w["kind"] == "Contact" else None
        if contact is not None and w.get("config") != contact.config:
            contact = type(contact)(w.get("config"), contact.verdicts, contact.sigma)
        waves.append(Wave(w["kind"], left, right, float(lo), float(hi), contact=contact))
    U_L = State(d["UL"]["s"], d["UL"]["c"])
    U_R = State(d["UR"]["s"], d["UR"]["c"])
    return RiemannSolution(model, alpha, U_L, U_R, tuple(waves), d.get("criterion"), ads)


# ---------------------------------------------------------------- commands ---

def cmd_solve(args, cfg) -> int:
    model, ads = build_model(cfg)
    U_L, U_R = _state(args.uL, "uL"), _state(args.uR, "uR")
    window = _window(cfg)
    out = Path(cfg["out"])
    try:
        if ads.alpha > 0:
            sol = solve_malpha(model, ads, U_L, U_R)
        else:
            sol = solve_m0(model, U_L, U_R, str(cfg["criterion"]))
    except NoAdmissibleSolution as exc:
        print(f"no admissible solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except ValueError as exc:
        raise InputError(f"criterion: {exc}") from None
    report = validate(sol)
    d = sol.to_dict()
    d["valid"] = report
    _write(out / "solution.json", _dump(d))
    _write(out / "profile.csv", _profile_csv(sol, window, int(cfg["samples"])))
    print(f"{len(sol.waves)} waves; valid={report['valid']}")
    return EXIT_OK if report["valid"] else EXIT_INVALID


def cmd_curves(args, cfg) -> int:
    model, ads = build_model(cfg)
    U0 = _state(args.u0, "u0")
    kinds = [k.strip().lower() for k in args.kinds.split(",") if k.strip()]
    out = Path(cfg["out"])
    for kind in kinds:
        if kind == "hugoniot":
            curve = hugoniot_c_curve(model, ads, U0)
        elif kind == "integral":
            if args.c_target is not None:
                curve = integral_curve(model, ads, U0, float(args.c_target))
            else:
                try:
                    curve = integral_curve(model, ads, U0, 1.0)
                except StalledAtApex:
                    curve = integral_curve_to_apex(model, ads, U0)
        elif kind == "contact":
            curve = contact_level_set(model, U0)
        else:
            raise InputError(f"kinds: unknown curve kind {kind!r}")
        rows = zip(curve.s, curve.c, curve.values)
        _write(out / f"curve_{kind}.csv", _csv(["s", "c", "sigma_or_level"], rows))
        print(f"{kind}: {len(curve.points)} points")
    return EXIT_OK


def cmd_limit(args, cfg) -> int:
    model, ads = build_model(cfg)
    U_m, U_p = _state(args.um, "um"), _state(args.up, "up")
    alphas = _alphas(cfg, DEFAULT_ALPHAS)
    try:
        report = vanishing_adsorption_verify(model, ads, U_m, U_p, alphas, _window(cfg))
        code = EXIT_OK
    except Inconclusive as exc:
        report, code = exc.report, EXIT_INVALID
    except PolyRiemannError as exc:
        raise InputError(str(exc)) from None
    _write(Path(cfg["out"]) / "limit_report.json", _dump(report.to_dict()))
    print(f"verdict: {report.verdict}")
    return code


def cmd_travwave(args, cfg) -> int:
    model, ads = build_model(cfg)
    alphas = _alphas(cfg, (0.2, 0.1, 0.05, 0.025, 0.0125))
    kappas = _floats(cfg["kappa"], "kappa")
    alpha_bar = _float(cfg, "alpha_bar")
    if any(k <= 0 for k in kappas):
        raise InputError("kappa: values must be positive")
    if alphas[0] > alpha_bar:
        print(f"no connection: alpha={alphas[0]} outside (0, {alpha_bar}]", file=sys.stderr)
        return EXIT_NO_SOLUTION
    out = Path(cfg["out"])
    for kappa in kappas:
        tag = f"kappa{kappa!r}"
        try:
            study = limit_study(model, kappa, alphas, Adsorption(0.0, ads.langmuir_b))
        except NoConnection as exc:
            print(f"no connection: {exc}", file=sys.stderr)
            return EXIT_NO_SOLUTION
        _write(out / f"limit_study_{tag}.csv", study.to_csv())
        for k, con in enumerate(study.connections):
            _write(out / f"orbit_{tag}_alpha{k}.csv", con.orbit_csv())
        last = study.rows[-1]
        print(f"kappa={kappa!r}: sigma={last.sigma!r} err={last.err_sigma!r}")
    return EXIT_OK


def cmd_validate(args, cfg) -> int:
    try:
        d = json.loads(Path(args.solution).read_text(encoding="utf-8"))
        sol = solution_from_dict(d)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"solution: cannot read {args.solution!r}: {exc}") from None
    report = validate(sol)
    print(_dump(report), end="")
    return EXIT_OK if report["valid"] else EXIT_INVALID


def cmd_nonuniq(args, cfg) -> int:
    model, _ = build_model(cfg)
    U_L, U_R = _state(args.uL, "uL"), _state(args.uR, "uR")
    try:
        first, second = nonuniqueness_pair(model, U_L, U_R)
    except PolyRiemannError as exc:
        raise InputError(str(exc)) from None
    out = Path(cfg["out"])
    reports = []
    for name, sol in (("single_contact", first), ("three_wave", second)):
        rep = validate(sol)
        reports.append(rep["valid"])
        d = sol.to_dict()
        d["valid"] = rep
        _write(out / f"nonuniq_{name}.json", _dump(d))
    dist = l1_distance(first, second, _window(cfg))
    _write(out / "nonuniq_distance.json", _dump({"l1": dist}))
    print(f"l1 distance {dist!r}")
    return EXIT_OK if all(reports) else EXIT_INVALID


# ------------------------------------------------------------------ parser ---

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value settings file")
    common.add_argument("--model", choices=["monotone", "boomerang"])
    common.add_argument("--mu0", type=float)
    common.add_argument("--mu1", type=float)
    common.add_argument("--mu2", type=float)
    common.add_argument("--amplitude", type=float, help="boomerang viscosity bump")
    common.add_argument("--langmuir-b", dest="langmuir_b", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--alphas", help="comma-separated decreasing alpha list")
    common.add_argument("--kappa", help="kappa value(s), comma-separated")
    common.add_argument("--alpha-bar", dest="alpha_bar", type=float)
    common.add_argument("--window", help="xi window 'lo,hi'")
    common.add_argument("--samples", type=int, help="profile samples")
    common.add_argument("--criterion", choices=["kk", "it", "dsm", "va", "KK", "IT", "DSM", "VA"])
    common.add_argument("--out", help="output directory")

    p = _Parser(prog="polyriemann", description="Riemann problems for polymer flooding.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="solve one Riemann problem")
    s.add_argument("--uL", required=True)
    s.add_argument("--uR", required=True)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("curves", parents=[common], help="sample wave curves through a state")
    s.add_argument("--u0", required=True)
    s.add_argument("--kinds", default="hugoniot,integral,contact")
    s.add_argument("--c-target", dest="c_target", type=float)
    s.set_defaults(func=cmd_curves)

    s = sub.add_parser("limit", parents=[common], help="vanishing-adsorption test of a contact")
    s.add_argument("--um", required=True)
    s.add_argument("--up", required=True)
    s.set_defaults(func=cmd_limit)

    s = sub.add_parser("travwave", parents=[common], help="traveling-wave limit study")
    s.set_defaults(func=cmd_travwave)

    s = sub.add_parser("validate", parents=[common], help="check a solution JSON file")
    s.add_argument("solution")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("nonuniq", parents=[common], help="two weak solutions for crossing data")
    s.add_argument("--uL", required=True)
    s.add_argument("--uR", required=True)
    s.set_defaults(func=cmd_nonuniq)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _settings(args)
        return args.func(args, cfg)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

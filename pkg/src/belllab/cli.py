"""Command-line front end: JSON config in, JSON (or CSV for sweeps) out.

Commands
--------
corr      closed-form correlation value (unconditional, or conditional when
          a branch is given)
chsh      conditional CHSH violation quantity and report
eigen     Bell-operator spectrum vs. the closed-form largest eigenvalue
family    sweep the maximal-violation setting family over a (phi0, theta0)
          grid; CSV columns phi0, theta0, lhs, deviation
optimize  derivative-free search for the settings maximizing |<B>|
simulate  Monte Carlo sampling + post-selection statistics

All angles are radians.  Exit codes: 0 success, 1 config/validation error,
2 runtime error (e.g. conditioning on a zero-probability outcome).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from math import sqrt

import numpy as np

from . import bell, correlations, experiment, qlinalg, states

COEFF_NORM_TOL = 1e-9  # looser than internal: user-typed decimals


class ConfigError(ValueError):
    pass


def _require(config: dict, key: str):
    if key not in config:
        raise ConfigError(f"missing config field {key!r}")
    return config[key]


def _parse_direction(obj, name: str) -> states.Direction:
    try:
        if isinstance(obj, dict):
            return states.Direction(float(obj["theta"]), float(obj["phi"]))
        theta, phi = obj
        return states.Direction(float(theta), float(phi))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"direction {name!r} must be {{'theta':…, 'phi':…}} or [theta, phi]: {exc}")


def _parse_directions(config: dict) -> dict:
    dirs = _require(config, "directions")
    if not isinstance(dirs, dict):
        raise ConfigError("'directions' must be an object of named angle pairs")
    return {name: _parse_direction(v, name) for name, v in dirs.items()}


def _direction_for(dirs: dict, name: str) -> states.Direction:
    if name not in dirs:
        raise ConfigError(f"directions: missing entry {name!r}")
    return dirs[name]


def _parse_spec(config: dict) -> states.TriorthogonalSpec:
    st = _require(config, "state")
    try:
        n = int(st["n"])
        c1 = float(st["c1"])
        c2 = float(st["c2"])
        labels = tuple(int(z) for z in st["labels"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"state must define n, c1, c2, labels: {exc}")
    norm = c1 * c1 + c2 * c2
    if abs(norm - 1.0) > COEFF_NORM_TOL:
        raise ConfigError(f"c1^2 + c2^2 = {norm!r}, not 1 within {COEFF_NORM_TOL}")
    # renormalize the user-typed decimals so internal invariants hold exactly
    scale = sqrt(norm)
    try:
        return states.TriorthogonalSpec(n, c1 / scale, c2 / scale, labels)
    except (ValueError, qlinalg.BadNorm) as exc:
        raise ConfigError(str(exc))


def _parse_branch(config: dict) -> int:
    branch = _require(config, "branch")
    if branch not in (+1, -1):
        raise ConfigError(f"branch must be +1 or -1, got {branch!r}")
    return int(branch)


def _direction_json(d: states.Direction) -> dict:
    return {"theta": d.theta, "phi": d.phi}


def _chsh_settings(dirs: dict) -> bell.ChshSettings:
    return bell.ChshSettings(
        e1=_direction_for(dirs, "e1"),
        e1p=_direction_for(dirs, "e1p"),
        e2=_direction_for(dirs, "e2"),
        e2p=_direction_for(dirs, "e2p"),
    )


def _check(name: str, lhs: float, rhs: float, tolerance: float) -> dict:
    return {
        "name": name,
        "pass": bool(abs(lhs - rhs) <= tolerance),
        "lhs": float(lhs),
        "rhs": float(rhs),
        "tolerance": float(tolerance),
    }


def _cmd_corr(config: dict) -> tuple[dict, list]:
    spec = _parse_spec(config)
    dirs = _parse_directions(config)
    if "branch" in config:
        if spec.n != 3:
            raise ConfigError("conditional correlation requires n = 3")
        branch = _parse_branch(config)
        e1, e2, e3 = (_direction_for(dirs, k) for k in ("e1", "e2", "e3"))
        rec = correlations.conditional_correlation_closed(spec, e1, e2, e3, branch)
        outcome = branch * spec.labels[2]
        cond = states.condition_on(states.make_triorthogonal(spec), {3: (e3, outcome)})
        oracle = correlations.expectation(cond.state, correlations.spin_product_operator([e1, e2]))
        checks = [_check("closed_form_vs_projection_oracle", rec.value, oracle, 1e-10)]
    else:
        names = [f"e{i}" for i in range(1, len(dirs) + 1)]
        measured_dirs = [_direction_for(dirs, nm) for nm in names]
        rec = correlations.unconditional_correlation_closed(spec, measured_dirs)
        rho = states.reduced_density(spec, len(measured_dirs))
        oracle = correlations.expectation(rho, correlations.spin_product_operator(measured_dirs))
        checks = [_check("closed_form_vs_operator_oracle", rec.value, oracle, 1e-12)]
    return {"kind": rec.kind, "value": rec.value}, checks


def _cmd_chsh(config: dict) -> tuple[dict, list]:
    spec = _parse_spec(config)
    if spec.n != 3:
        raise ConfigError("chsh requires n = 3")
    dirs = _parse_directions(config)
    settings = _chsh_settings(dirs)
    e3 = _direction_for(dirs, "e3")
    branch = _parse_branch(config)
    lhs = bell.chsh_condition_lhs(spec, settings, e3, branch)
    report = bell.ViolationReport.from_value(lhs)
    return {
        "lhs": lhs,
        "bound": report.bound,
        "violated": report.violated,
        "margin": report.margin,
    }, []


def _cmd_eigen(config: dict) -> tuple[dict, list]:
    dirs = _parse_directions(config)
    if "e3" in dirs or "e3p" in dirs:
        settings = bell.HardySettings(
            **{k: _direction_for(dirs, k) for k in ("e1", "e1p", "e2", "e2p", "e3", "e3p")}
        )
        op = bell.hardy_operator(settings)
        lam = bell.hardy_lambda_closed(settings)
        kind = "hardy"
    else:
        settings = _chsh_settings(dirs)
        op = bell.chsh_operator(settings)
        lam = bell.chsh_lambda_closed(settings)
        kind = "chsh"
    evals, _ = qlinalg.hermitian_eigen(op)
    top = float(max(abs(evals[0]), abs(evals[-1])))
    checks = [_check(f"{kind}_top_eigenvalue_vs_closed_form", top, lam, 1e-9)]
    return {"kind": kind, "eigenvalues": [float(v) for v in evals], "lambda_closed": lam}, checks


def _grid(spec, name: str):
    try:
        start, stop, num = spec
        return np.linspace(float(start), float(stop), int(num))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"family.{name} must be [start, stop, num]: {exc}")


def _cmd_family(config: dict) -> str:
    fam = _require(config, "family")
    which = fam.get("which", "singlet")
    if which not in ("singlet", "triplet"):
        raise ConfigError(f"family.which must be 'singlet' or 'triplet', got {which!r}")
    equality = bell.singlet_equality_lhs if which == "singlet" else bell.triplet_equality_lhs
    target = 2.0 * sqrt(2.0)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["phi0", "theta0", "lhs", "deviation"])
    for phi0 in _grid(_require(fam, "phi0"), "phi0"):
        for theta0 in _grid(_require(fam, "theta0"), "theta0"):
            settings = bell.maximal_family(float(phi0), float(theta0), which)
            lhs = equality(settings)
            writer.writerow([repr(float(phi0)), repr(float(theta0)), repr(lhs), repr(lhs - target)])
    return buf.getvalue()


def _cmd_optimize(config: dict) -> tuple[dict, list]:
    kind = _require(config, "kind")
    if kind not in ("chsh", "hardy"):
        raise ConfigError(f"kind must be 'chsh' or 'hardy', got {kind!r}")
    spec = _parse_spec(config)
    state = states.make_triorthogonal(spec)
    expected_n = 2 if kind == "chsh" else 3
    if spec.n != expected_n:
        raise ConfigError(f"{kind} optimization requires n = {expected_n}, got n = {spec.n}")
    restarts = int(config.get("restarts", 32))
    seed = int(config.get("seed", 0))
    settings, value = bell.optimize_settings(state, kind, restarts=restarts, seed=seed)
    names = ("e1", "e1p", "e2", "e2p") if kind == "chsh" else ("e1", "e1p", "e2", "e2p", "e3", "e3p")
    lam = bell.chsh_lambda_closed(settings) if kind == "chsh" else bell.hardy_lambda_closed(settings)
    return {
        "kind": kind,
        "value": float(value),
        "settings": {name: _direction_json(getattr(settings, name)) for name in names},
        "lambda_closed_at_optimum": float(lam),
    }, [
        {
            "name": "value_below_spectral_ceiling",
            "pass": bool(value <= lam + 1e-9),
            "lhs": float(value),
            "rhs": float(lam),
            "tolerance": 1e-9,
        }
    ]


def _cmd_simulate(config: dict) -> tuple[dict, list]:
    spec = _parse_spec(config)
    state = states.make_triorthogonal(spec)
    dirs = _parse_directions(config)
    per_particle = [_direction_for(dirs, f"e{i}") for i in range(1, spec.n + 1)]
    selector = _require(config, "selector")
    try:
        sel_particle = int(selector["particle"])
        sel_outcome = int(selector["outcome"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"selector must define particle and outcome: {exc}")
    shots = int(config.get("shots", 100_000))
    seed = int(config.get("seed", 0))
    if shots < 1:
        raise ConfigError("shots must be >= 1")
    shot_array = experiment.sample_shots(state, per_particle, shots, seed)
    stats = experiment.postselect(shot_array, sel_particle, sel_outcome)
    results = {
        "shots_total": stats.shots_total,
        "shots_selected": stats.shots_selected,
        "p_hat": stats.p_hat,
        "e12_hat": stats.e12_hat,
        "stderr": stats.stderr,
    }
    checks = []
    if spec.n == 3 and sel_particle == 3:
        branch = sel_outcome * spec.labels[2]
        e3 = per_particle[2]
        p = correlations.conditional_probability(spec, e3, branch)
        p_band = 5.0 * sqrt(max(p * (1.0 - p), 1e-300) / shots)
        checks.append(_check("p_hat_vs_closed_form_5sigma", stats.p_hat, p, p_band))
        e_closed = correlations.conditional_correlation_closed(
            spec, per_particle[0], per_particle[1], e3, branch
        ).value
        band = max(5.0 * stats.stderr, 1e-12)
        checks.append(_check("e12_hat_vs_closed_form_5sigma", stats.e12_hat, e_closed, band))
    return results, checks


_COMMANDS = {
    "corr": _cmd_corr,
    "chsh": _cmd_chsh,
    "eigen": _cmd_eigen,
    "optimize": _cmd_optimize,
    "simulate": _cmd_simulate,
}


def run(config: dict) -> tuple[int, str]:
    """Execute one command; returns (exit_status, serialized report)."""
    try:
        command = _require(config, "command")
        if command == "family":
            return 0, _cmd_family(config)
        if command not in _COMMANDS:
            raise ConfigError(f"unknown command {command!r}")
        results, checks = _COMMANDS[command](config)
    except ConfigError:
        raise
    except (states.ZeroProbability, experiment.EmptySubensemble, qlinalg.BadSubset,
            qlinalg.NotHermitian, correlations.DimensionMismatch) as exc:
        return 2, json.dumps({"command": config.get("command"), "error": str(exc)}, indent=2) + "\n"
    report = {"command": command, "config": config, "results": results, "checks": checks}
    return 0, json.dumps(report, indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="belllab",
        description="Conditional-entanglement analyses for triorthogonal n-qubit states",
    )
    parser.add_argument("--config", required=True, help="path to the JSON run configuration")
    parser.add_argument("--output", default=None, help="report destination (default stdout)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--shots", type=int, default=None, help="override the config shot count")
    parser.add_argument("--restarts", type=int, default=None, help="override the optimizer restarts")
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {args.config}: {exc}", file=sys.stderr)
        return 1
    if not isinstance(config, dict):
        print(f"config error: {args.config}: top level must be a JSON object", file=sys.stderr)
        return 1
    for key in ("seed", "shots", "restarts"):
        value = getattr(args, key)
        if value is not None:
            config[key] = value

    try:
        status, payload = run(config)
    except ConfigError as exc:
        print(f"config error: {args.config}: {exc}", file=sys.stderr)
        return 1

    if args.output:
        with open(args.output, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return status


if __name__ == "__main__":
    sys.exit(main())

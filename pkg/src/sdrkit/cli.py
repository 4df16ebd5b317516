"""Command-line front end.

Subcommands: screen, fit (pfc | spc | binary-pfc), bridge, simulate, angle.
JSON carries parameters and reports, CSV carries tabular plot data.  Every
run logs its resolved configuration (seed included) to stderr, and repeated
invocations with the same inputs and seed produce byte-identical outputs
regardless of --threads.

Exit codes: 0 success, 1 validation error (bad flags, malformed CSV/JSON),
2 numerical failure.
"""

import argparse
import dataclasses
import json
import logging
import os
import sys

import numpy as np

from .basis import BasisSpec, build_fy
from .binary_pfc import fit_binary_pfc
from .data import load_csv
from .exceptions import NumericalError, ValidationError
from .latent import LatentSpcModel, latent_to_pfc, verify_covariance_blocks, \
    verify_mean_structure
from .pfc import fit_pfc, fit_spc, project
from .screening import ScreeningConfig, forward_screen, inverse_screen, \
    reduce_columns
from .simulate import run_angle_study, table1_config
from .subspace import ReductionBasis, subspace_angle

log = logging.getLogger("sdrkit")


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default; flag problems are validation
    # errors here (exit 1), so route them through the shared handler.
    def error(self, message):
        raise ValidationError(message)


def _write_text(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _json_dumps(payload):
    return json.dumps(payload, indent=2, allow_nan=True) + "\n"


def _csv_lines(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v)
                              for v in row))
    return "\n".join(lines) + "\n"


def _log_config(command, params):
    log.info("%s config: %s", command, json.dumps(params, sort_keys=True))


def _screening_config(args):
    criterion = "coefficient" if args.theta is not None else "p_value"
    return ScreeningConfig(mode=args.mode, criterion=criterion,
                           alpha=args.alpha, theta=args.theta)


def _screen_payload(result, names):
    return {
        "mode": result.config.mode,
        "criterion": result.config.criterion,
        "alpha": result.config.alpha,
        "theta": result.config.theta,
        "kept": list(result.kept),
        "kept_names": [names[j] for j in result.kept] if names else None,
        "records": [
            {
                "index": r.index,
                "name": names[r.index] if names else None,
                "statistic": r.statistic,
                "p_value": r.p_value,
                "coefficient": r.coefficient,
                "raw_slope": list(r.raw_slope),
                "kept": r.kept,
                "note": r.note,
            }
            for r in result.records
        ],
        "warnings": [list(w) for w in result.warnings],
    }


def _run_screen(data, mode, basis_name, config):
    if mode == "inverse":
        fy = build_fy(data.y, BasisSpec.from_name(basis_name))
        return inverse_screen(data.X, fy, config)
    return forward_screen(data.X, data.y, config)


def cmd_screen(args):
    data = load_csv(args.data, args.response)
    config = _screening_config(args)
    _log_config("screen", {
        "mode": args.mode, "basis": args.basis, "alpha": args.alpha,
        "theta": args.theta, "response": args.response, "data": args.data,
    })
    result = _run_screen(data, args.mode, args.basis, config)
    _write_text(_json_dumps(_screen_payload(result, data.column_names)), args.out)
    return 0


def cmd_fit(args):
    data = load_csv(args.data, args.response)
    _log_config("fit", {
        "what": args.what, "d": args.d, "basis": args.basis,
        "screen": args.screen, "alpha": args.alpha,
        "response": args.response, "data": args.data,
        "max_outer": getattr(args, "max_outer", None),
        "tol": getattr(args, "tol", None),
    })

    if args.what == "binary-pfc":
        non_binary = [data.column_names[j] if data.column_names else j
                      for j in np.flatnonzero(~data.is_binary)]
        if non_binary:
            raise ValidationError(
                f"binary-pfc requires 0/1 predictors; offending columns: "
                f"{non_binary}"
            )
        state = fit_binary_pfc(data.X, data.y, d=args.d,
                               max_outer=args.max_outer, tol=args.tol)
        payload = {
            "d": args.d,
            "columns": list(data.column_names) if data.column_names else None,
            "mu": state.mu.tolist(),
            "gamma": state.basis.G.tolist(),
            "nu": state.nu.tolist(),
            "loglik": state.loglik,
            "loglik_trace": list(state.loglik_trace),
            "outer_iterations": state.outer_iterations,
            "converged": state.converged,
            "warnings": [dataclasses.asdict(w) for w in state.warnings],
        }
        _write_text(_json_dumps(payload), args.out)
        return 0

    screen_report = None
    if args.screen is not None:
        config = ScreeningConfig(mode=args.screen, alpha=args.alpha)
        result = _run_screen(data, args.screen, args.basis, config)
        data = reduce_columns(data, result)
        screen_report = _screen_payload(result, None)

    if args.what == "pfc":
        fy = build_fy(data.y, BasisSpec.from_name(args.basis))
        basis = fit_pfc(data.X, fy, d=args.d)
    else:
        basis = fit_spc(data.X, d=args.d)

    payload = {
        "method": args.what,
        "d": args.d,
        "columns": list(data.column_names) if data.column_names else None,
        "basis": basis.G.tolist(),
        "screening": screen_report,
    }
    sys.stdout.write(_json_dumps(payload))
    if args.out:
        table = project(data.X, basis, data.y)
        header = [f"z{k + 1}" for k in range(args.d)] + ["y"]
        _write_text(_csv_lines(header, [tuple(map(float, row)) for row in table]),
                    args.out)
    return 0


def cmd_bridge(args):
    with open(args.model) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{args.model}: invalid JSON ({exc})") from None
    try:
        model = LatentSpcModel(
            beta0=float(raw["beta0"]),
            beta1=float(raw["beta1"]),
            alpha0=raw["alpha0"],
            alpha1=raw["alpha1"],
            var_eps=float(raw["var_eps"]),
            var_epsx=raw["var_epsx"],
        )
    except KeyError as exc:
        raise ValidationError(f"{args.model}: missing field {exc}") from None
    _log_config("bridge", {"model": args.model})
    y_grid = np.linspace(-5.0, 5.0, 11)
    form = latent_to_pfc(model, ybar=float(y_grid.mean()))
    mean_report = verify_mean_structure(model, form, y_grid)
    blocks = verify_covariance_blocks(model, form)
    payload = {
        "mu": form.mu.tolist(),
        "gamma": form.basis.G[:, 0].tolist(),
        "c": form.c,
        "ybar": form.ybar,
        "omega": form.Omega,
        "omega0": form.Omega0.tolist(),
        "var_eps_star": form.var_eps_star.tolist(),
        "verification": {
            "mean_structure_max_deviation": mean_report.max_deviation,
            "omega_deviation": blocks.omega_deviation,
            "omega0_deviation": blocks.omega0_deviation,
            "cross_block_norm": blocks.cross_block_norm,
        },
    }
    _write_text(_json_dumps(payload), args.out)
    return 0


def cmd_simulate(args):
    sigmas = [float(s) for s in args.sigma_y.split(",") if s.strip()]
    if not sigmas:
        raise ValidationError("--sigma-y must list at least one value")
    _log_config("simulate", {
        "table": args.table, "gamma": args.gamma, "sigma_y": sigmas,
        "reps": args.reps, "seed": args.seed, "threads": args.threads,
    })
    rows = []
    for sigma in sigmas:
        cfg = table1_config(args.gamma, sigma, replications=args.reps,
                            seed=args.seed)
        report = run_angle_study(cfg, n_workers=args.threads)
        log.info("cell %s sigma_y=%g: mean angle %.3f deg (%.1fs)",
                 args.gamma, sigma, report.mean_angle_deg, report.wall_clock_s)
        rows.append((args.gamma, float(sigma), report.mean_angle_deg,
                     report.sd_angle_deg, report.n_warnings, report.n_failed))
    text = _csv_lines(
        ["gamma", "sigma_y", "mean_angle_deg", "sd_angle_deg",
         "n_warnings", "n_failed"],
        rows,
    )
    _write_text(text, args.out)
    return 0


def _load_basis_json(path):
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    for key in ("basis", "gamma"):
        if key in raw:
            return ReductionBasis.from_matrix(np.asarray(raw[key],
                                                         dtype=np.float64))
    raise ValidationError(f"{path}: no 'basis' or 'gamma' field")


def cmd_angle(args):
    a = _load_basis_json(args.a)
    b = _load_basis_json(args.b)
    print(subspace_angle(a, b))
    return 0


def _default_threads():
    env = os.environ.get("PFC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"PFC_THREADS={env!r} is not an integer") \
                from None
    return os.cpu_count() or 1


def build_parser():
    parser = _Parser(prog="sdrkit",
                     description="Sufficient dimension reduction toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_screen = sub.add_parser("screen", help="univariate predictor screening")
    p_screen.add_argument("--mode", choices=["forward", "inverse"],
                          required=True)
    p_screen.add_argument("--basis", choices=["linear", "quadratic"],
                          default="linear")
    p_screen.add_argument("--alpha", type=float, default=0.05)
    p_screen.add_argument("--theta", type=float, default=None,
                          help="use the |coefficient| > theta criterion")
    p_screen.add_argument("--response", required=True)
    p_screen.add_argument("--out", default=None)
    p_screen.add_argument("data")
    p_screen.set_defaults(func=cmd_screen)

    p_fit = sub.add_parser("fit", help="fit a reduction basis")
    p_fit.add_argument("what", choices=["pfc", "spc", "binary-pfc"])
    p_fit.add_argument("--d", type=int, default=1)
    p_fit.add_argument("--basis", choices=["linear", "quadratic"],
                       default="linear")
    p_fit.add_argument("--screen", choices=["forward", "inverse"],
                       default=None)
    p_fit.add_argument("--alpha", type=float, default=0.05)
    p_fit.add_argument("--max-outer", type=int, default=200)
    p_fit.add_argument("--tol", type=float, default=1e-6)
    p_fit.add_argument("--response", required=True)
    p_fit.add_argument("--out", default=None)
    p_fit.add_argument("data")
    p_fit.set_defaults(func=cmd_fit)

    p_bridge = sub.add_parser("bridge",
                              help="latent SPC model to inverse-regression form")
    p_bridge.add_argument("--model", required=True)
    p_bridge.add_argument("--out", default=None)
    p_bridge.set_defaults(func=cmd_bridge)

    p_sim = sub.add_parser("simulate", help="Monte Carlo angle study")
    p_sim.add_argument("table", choices=["table1"])
    p_sim.add_argument("--gamma", choices=["G1", "G2", "G3", "G4"],
                       required=True)
    p_sim.add_argument("--sigma-y", default="0.1,1,3,5,10")
    p_sim.add_argument("--reps", type=int, default=50)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--threads", type=int, default=None)
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_angle = sub.add_parser("angle",
                             help="largest principal angle between two bases")
    p_angle.add_argument("a")
    p_angle.add_argument("b")
    p_angle.set_defaults(func=cmd_angle)

    return parser


def main(argv=None):
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "threads", None) is None and args.command == "simulate":
            args.threads = _default_threads()
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front door.

Subcommands: ``cs``, ``kw``, ``nahm``, ``jones``, ``plotdata``, ``fixtures``.
Each run emits one schema-versioned JSON report (stdout or ``--output``)
whose config echo reproduces the run; trajectory and plot data go to CSV.

Exit codes: 0 success, 2 invalid configuration or input, 3 fixture I/O
failure, 4 numerical fault (step rejection, blow-up, missing boundary
data), 5 shooting non-convergence.

A ``key = value`` config file (one section per subcommand) supplies
defaults; command-line flags win.  The environment variable
``GAUGEFLOW_FIXTURE_DIR`` sets the base directory for relative fixture
paths.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
import time

import numpy as np

from . import algebra, fields, fixtures as fx, functionals, kwflow, reduced
from .knots import PDError, jones_polynomial, parse_pd, writhe
from .reports import RunReport, file_checksum, write_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FIXTURE_IO = 3
EXIT_NUMERICAL = 4
EXIT_SHOOTING = 5


class ConfigError(ValueError):
    pass


def _fixture_path(path: str) -> str:
    base = os.environ.get("GAUGEFLOW_FIXTURE_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _parse_t(text: str) -> kwflow.KWParams:
    if text in ("inf", "infinity", "oo"):
        return kwflow.KWParams.from_t(math.inf)
    try:
        return kwflow.KWParams.from_t(float(text))
    except ValueError as exc:
        raise ConfigError(f"bad coupling value {text!r}") from exc


def _emit(report: RunReport, output: str | None) -> None:
    text = report.to_json()
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_echo(args: argparse.Namespace) -> dict:
    skip = {"func", "output", "config"}
    out = {}
    for key, val in sorted(vars(args).items()):
        if key in skip or callable(val):
            continue
        out[key] = val
    return out


# -- cs ---------------------------------------------------------------------------


def cmd_cs(args) -> RunReport:
    n = args.algebra_n
    grid = fields.periodic_box(args.grid_n, extent=args.extent)
    checksums = {}
    if args.fixture_a:
        path = _fixture_path(args.fixture_a)
        A = fields.load_field_fixture(path)
        checksums["fixture_a"] = file_checksum(path)
        phi = fields.zero_field(A.grid, 1, A.n)
        phi0 = fields.zero_field(A.grid, 0, A.n)
        if args.fixture_phi:
            ppath = _fixture_path(args.fixture_phi)
            phi = fields.load_field_fixture(ppath)
            checksums["fixture_phi"] = file_checksum(ppath)
        if args.fixture_phi0:
            zpath = _fixture_path(args.fixture_phi0)
            phi0 = fields.load_field_fixture(zpath)
            checksums["fixture_phi0"] = file_checksum(zpath)
        state = functionals.FlowState(functionals.ComplexConnection(A, phi), phi0)
    elif args.generator == "zero":
        state = fx.zero_flow_state(grid, n)
    else:
        state = fx.random_flow_state(grid, n, args.seed, amplitude=args.amplitude)
    params = functionals.MorseParams(alpha=args.alpha, level_normalization=args.level)
    cs_r = functionals.cs_real(state.conn.A)
    cs_c = functionals.cs_complex(state.conn)
    metrics = {
        "cs_real": cs_r,
        "cs_complex": {"re": cs_c.real, "im": cs_c.imag},
        "h0": functionals.morse_h0(state.conn, params),
        "h": functionals.extended_h(state, params),
        "mu_norm": functionals.moment_norm(state),
        "records": [
            functionals.functional_record("cs_real", cs_r, state.conn.A),
        ],
    }
    if args.gradient_check:
        metrics["gradient_check"] = functionals.gradient_check(
            state, params, n_directions=args.directions, seed=args.seed
        )
    return RunReport("cs", _config_echo(args), metrics, checksums)


# -- kw ---------------------------------------------------------------------------


def cmd_kw(args) -> RunReport:
    metrics: dict = {}
    if args.mode == "pole-residual":
        spec = algebra.LieAlgebraSpec(args.algebra_n)
        triple = algebra.principal_triple(spec)
        grid = fields.half_space_grid(
            args.spatial_n,
            half_line=fields.HalfLineSpec(args.y0, args.ymax, args.y_points),
        )
        cfg = kwflow.nahm_pole_config(triple, grid)
        params = _parse_t(args.t)
        rule = fields.pole_derivative_rule(grid) if args.analytic_derivatives else None
        res = kwflow.kw_residual(cfg, params, deriv=rule)
        metrics["residual_norms"] = res.norms()
        metrics["t"] = params.as_pair()
    elif args.mode == "involution":
        params = _parse_t(args.t)
        spec = algebra.LieAlgebraSpec(args.algebra_n)
        grid = fields.half_space_grid(
            args.spatial_n,
            half_line=fields.HalfLineSpec(args.y0, args.ymax, args.y_points),
        )
        worst = 0.0
        for i in range(args.samples):
            A = fields.random_smooth_field(grid, 1, spec, seed=args.seed + 2 * i, amplitude=0.2)
            phi = fields.random_smooth_field(
                grid, 1, spec, seed=args.seed + 2 * i + 1, amplitude=0.2
            )
            rep = kwflow.involution_check(kwflow.FourConfig(A, phi), params)
            worst = max(worst, rep["max_discrepancy"])
        metrics["max_discrepancy"] = worst
        metrics["samples"] = args.samples
        metrics["t"] = params.as_pair()
    elif args.mode == "flow":
        grid = fields.periodic_box(args.grid_n)
        state = fx.random_flow_state(grid, args.algebra_n, args.seed, amplitude=args.amplitude)
        params = functionals.MorseParams(alpha=args.alpha, level_normalization=args.level)
        ds = args.ds if args.ds > 0 else kwflow.suggest_step(state, params)
        states, series = kwflow.run_flow(state, params, ds, args.steps)
        metrics["ds"] = ds
        metrics["flow_series"] = series
        metrics["h_monotone"] = all(
            series[i + 1]["h"] <= series[i]["h"] + 1e-12 for i in range(len(series) - 1)
        )
        if args.equivalence:
            samples = [(k * ds, s) for k, s in enumerate(states)]
            metrics["equivalence"] = kwflow.flow_kw_equivalence_check(samples, params)
    elif args.mode == "refine-real":
        metrics["refinement"] = kwflow.real_flow_refinement_study(
            seed=args.seed,
            base_n=args.base_n,
            base_ds=args.base_ds,
            base_steps=args.base_steps,
            levels=args.levels,
        )
    elif args.mode == "refine-kw":
        metrics["refinement"] = kwflow.flow_kw_refinement_study(
            alpha=args.alpha,
            seed=args.seed,
            base_n=args.base_n,
            base_ds=args.base_ds,
            base_steps=args.base_steps,
            levels=args.levels,
        )
    else:
        raise ConfigError(f"unknown kw mode {args.mode!r}")
    return RunReport("kw", _config_echo(args), metrics)


# -- nahm -------------------------------------------------------------------------


def cmd_nahm(args) -> RunReport:
    spec = algebra.LieAlgebraSpec(2)
    triple = algebra.principal_triple(spec)
    metrics: dict = {}
    if args.mode == "shoot":
        grid = fields.HalfLineSpec(args.y0, args.ymax, args.points)
        traj = reduced.solve_pole_to_coulomb(
            triple, args.k, grid, max_step=args.max_step
        )
        ref = reduced.bps_profile(triple, args.k, traj.nodes)
        metrics["max_deviation_from_profile"] = float(np.abs(traj.values - ref).max())
        split = reduced.pole_split_derivatives(traj, triple)
        metrics["max_split_residual"] = float(
            reduced.nahm_residual(traj, derivatives=split).max()
        )
    elif args.mode in ("bps", "pole"):
        grid = fields.HalfLineSpec(args.y0, args.ymax, args.points)
        k = args.k if args.mode == "bps" else 0.0
        init_vals = reduced.bps_profile(triple, k, np.array([args.y0]))[0]
        init = reduced.NahmState(
            algebra.LieElement(init_vals[0]),
            algebra.LieElement(init_vals[1]),
            algebra.LieElement(init_vals[2]),
            args.y0,
        )
        traj = reduced.integrate_nahm(init, grid, max_step=args.max_step)
        ref = reduced.bps_profile(triple, k, traj.nodes)
        metrics["max_deviation_from_profile"] = float(np.abs(traj.values - ref).max())
    else:
        raise ConfigError(f"unknown nahm mode {args.mode!r}")
    if args.lax_check:
        metrics["lax_drift"] = reduced.lax_drift(traj)
    metrics["k"] = args.k if args.mode != "pole" else 0.0
    metrics["nodes"] = len(traj.nodes)
    if args.csv:
        header, rows = reduced.trajectory_csv_rows(traj)
        write_csv(args.csv, header, rows)
        metrics["csv"] = args.csv
    return RunReport("nahm", _config_echo(args), metrics)


# -- jones ------------------------------------------------------------------------


def cmd_jones(args) -> RunReport:
    checksums = {}
    if args.pd_file:
        path = _fixture_path(args.pd_file)
        with open(path) as fh:
            text = fh.read()
        checksums["pd_file"] = file_checksum(path)
    elif args.pd:
        text = args.pd
    else:
        raise ConfigError("jones needs --pd or --pd-file")
    pd = parse_pd(text)
    v_bracket = jones_polynomial(pd, method="bracket")
    v_vertex = jones_polynomial(pd, method="vertex")
    metrics = {
        "crossings": pd.n_crossings,
        "components": pd.n_components,
        "writhe": writhe(pd),
        "jones_bracket": v_bracket.to_json_terms(),
        "jones_vertex": v_vertex.to_json_terms(),
        "methods_agree": v_bracket == v_vertex,
    }
    return RunReport("jones", _config_echo(args), metrics, checksums)


# -- plotdata ----------------------------------------------------------------------


def cmd_plotdata(args) -> RunReport:
    import json

    metrics: dict = {"out": args.out}
    if args.kind == "flow":
        with open(args.report) as fh:
            rep = json.load(fh)
        series = rep["metrics"]["flow_series"]
        rows = [[i, r["s"], r["h"], r["mu_norm"]] for i, r in enumerate(series)]
        write_csv(args.out, ["step", "s", "h", "mu_norm"], rows)
    elif args.kind == "refine":
        with open(args.report) as fh:
            rep = json.load(fh)
        ref = rep["metrics"]["refinement"]
        norms = ref.get("f_plus_norms") or ref.get("totals")
        orders = ref["orders"]
        rows = []
        for i, (h, r) in enumerate(zip(ref["spacings"], norms)):
            rows.append([h, r, orders[i - 1] if i > 0 else ""])
        write_csv(args.out, ["spacing", "residual", "estimated_order"], rows)
    elif args.kind == "nahm":
        with open(args.csv) as fh:
            lines = [line.rstrip("\n") for line in fh if line.strip()]
        header = lines[0].split(",")
        rows = [line.split(",") for line in lines[1:]]
        write_csv(args.out, header, rows)
    else:
        raise ConfigError(f"unknown plotdata kind {args.kind!r}")
    metrics["rows"] = len(rows)
    return RunReport("plotdata", _config_echo(args), metrics)


# -- fixtures ------------------------------------------------------------------------


def cmd_fixtures(args) -> RunReport:
    out = _fixture_path(args.out)
    spec = algebra.LieAlgebraSpec(args.algebra_n)
    metrics: dict = {"out": out}
    if args.kind == "random-field":
        grid = fields.periodic_box(args.grid_n, dim=args.dim, extent=args.extent)
        fld = fields.random_smooth_field(
            grid, args.degree, spec, seed=args.seed, amplitude=args.amplitude
        )
        fields.save_field_fixture(out, fld)
    elif args.kind == "nahm-pole":
        triple = algebra.principal_triple(spec)
        grid = fields.half_space_grid(
            args.grid_n, half_line=fields.HalfLineSpec(args.y0, args.ymax, args.y_points)
        )
        fields.save_field_fixture(out, fields.embed_nahm_pole(triple, grid))
    elif args.kind == "matrix":
        algebra.save_matrix_fixture(out, algebra.random_element(spec, args.seed))
    elif args.kind == "pd":
        with open(out, "w") as fh:
            fh.write(args.pd + "\n")
    else:
        raise ConfigError(f"unknown fixture kind {args.kind!r}")
    metrics["checksum"] = file_checksum(out)
    return RunReport("fixtures", _config_echo(args), metrics)


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaugeflow",
        description="Gauge-flow residual toolkit: Chern-Simons descent, "
        "four-dimensional residual systems, Nahm boundary problems, and "
        "Jones polynomials.",
    )
    parser.add_argument("--config", help="key = value config file (section per command)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cs", help="Chern-Simons functionals and gradients")
    p.add_argument("--grid-n", type=int, default=4)
    p.add_argument("--extent", type=float, default=2 * math.pi)
    p.add_argument("--algebra-n", type=int, default=2)
    p.add_argument("--generator", choices=["zero", "random"], default="random")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--amplitude", type=float, default=0.3)
    p.add_argument("--fixture-a")
    p.add_argument("--fixture-phi")
    p.add_argument("--fixture-phi0")
    p.add_argument("--alpha", type=float, default=math.pi / 2)
    p.add_argument("--level", type=float, default=2 * math.pi,
                   help="constant multiplying CS in the Morse function")
    p.add_argument("--gradient-check", action="store_true")
    p.add_argument("--directions", type=int, default=8)
    p.add_argument("--output")
    p.set_defaults(func=cmd_cs)

    p = sub.add_parser("kw", help="four-dimensional residuals and flows")
    p.add_argument("--mode", default="pole-residual",
                   choices=["pole-residual", "involution", "flow", "refine-real", "refine-kw"])
    p.add_argument("--t", default="1", help="coupling (number or 'inf')")
    p.add_argument("--algebra-n", type=int, default=2)
    p.add_argument("--spatial-n", type=int, default=4)
    p.add_argument("--y0", type=float, default=0.1)
    p.add_argument("--ymax", type=float, default=4.0)
    p.add_argument("--y-points", type=int, default=24)
    p.add_argument("--analytic-derivatives", action=argparse.BooleanOptionalAction,
                   default=True)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--grid-n", type=int, default=4)
    p.add_argument("--alpha", type=float, default=math.pi / 2)
    p.add_argument("--level", type=float, default=2 * math.pi)
    p.add_argument("--amplitude", type=float, default=0.1)
    p.add_argument("--ds", type=float, default=0.0, help="0 selects the stability heuristic")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--equivalence", action="store_true")
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--base-n", type=int, default=6)
    p.add_argument("--base-ds", type=float, default=0.02)
    p.add_argument("--base-steps", type=int, default=6)
    p.add_argument("--output")
    p.set_defaults(func=cmd_kw)

    p = sub.add_parser("nahm", help="Nahm flow: closed profiles and shooting")
    p.add_argument("--mode", default="bps", choices=["bps", "pole", "shoot"])
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--y0", type=float, default=0.1)
    p.add_argument("--ymax", type=float, default=2.0)
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--max-step", type=float, default=1e-3)
    p.add_argument("--lax-check", action="store_true")
    p.add_argument("--csv", help="trajectory CSV output path")
    p.add_argument("--output")
    p.set_defaults(func=cmd_nahm)

    p = sub.add_parser("jones", help="Jones polynomial by both routes")
    p.add_argument("--pd", help="inline PD code, e.g. 'X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]'")
    p.add_argument("--pd-file")
    p.add_argument("--output")
    p.set_defaults(func=cmd_jones)

    p = sub.add_parser("plotdata", help="tidy CSV from a prior report")
    p.add_argument("--kind", required=True, choices=["flow", "refine", "nahm"])
    p.add_argument("--report", help="prior JSON report (flow, refine)")
    p.add_argument("--csv", help="prior trajectory CSV (nahm)")
    p.add_argument("--out", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("fixtures", help="generate fixture files")
    p.add_argument("--kind", required=True,
                   choices=["random-field", "nahm-pole", "matrix", "pd"])
    p.add_argument("--out", required=True)
    p.add_argument("--grid-n", type=int, default=4)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--extent", type=float, default=2 * math.pi)
    p.add_argument("--algebra-n", type=int, default=2)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--amplitude", type=float, default=0.3)
    p.add_argument("--y0", type=float, default=0.1)
    p.add_argument("--ymax", type=float, default=4.0)
    p.add_argument("--y-points", type=int, default=24)
    p.add_argument("--pd", default="U")
    p.add_argument("--output")
    p.set_defaults(func=cmd_fixtures)

    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Fold config-file values in as defaults; explicit flags win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError as exc:
        raise ConfigError("--config needs a path") from exc
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise OSError(f"config file {path!r} not found")
    command = next((a for a in argv if not a.startswith("-") and a != path), None)
    if command and cp.has_section(command):
        for key, value in cp.items(command):
            flag = "--" + key.replace("_", "-")
            if flag not in argv:
                argv = argv + [flag, value]
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        start = time.perf_counter()
        report = args.func(args)
        report.wall_time_s = time.perf_counter() - start
        _emit(report, args.output)
        return EXIT_OK
    except (OSError, IOError) as exc:
        print(f"fixture I/O failure: {exc}", file=sys.stderr)
        return EXIT_FIXTURE_IO
    except (kwflow.FlowStepFault, reduced.NahmBlowupError, kwflow.BoundaryDataError) as exc:
        print(f"numerical fault: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except reduced.ShootingError as exc:
        print(f"shooting failed: {exc}", file=sys.stderr)
        return EXIT_SHOOTING
    except (
        ConfigError,
        PDError,
        ValueError,
    ) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

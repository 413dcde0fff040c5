"""Command-line surface: classify, norms, simulate, experiment.

Exit codes: 0 success, 2 configuration or hypothesis error, 3 numerical
guard abort, 4 run completed but flagged (blowup suspected).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import itertools
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import regimes
from .dynamics import (
    STATUS_BLOWUP,
    STATUS_COMPLETED,
    STATUS_GUARD,
    EquationParams,
    StepControl,
    evolve,
    linear_propagate,
    phase_flow,
)
from .fieldio import read_field, write_field
from .records import ExperimentRecord, write_csv, write_fit_csv, write_jsonl
from .spectral import (
    Field,
    SobolevSpec,
    WeightedSpec,
    ZeroModeObstruction,
    lq_norm,
    make_grid,
    sobolev_norm,
    spectrum_profile,
    weighted_norm,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_FLAGGED = 4


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# classify
# --------------------------------------------------------------------------

def _query_from(d, nu, gamma, mu, beta=None, small=()) -> regimes.RegimeQuery:
    return regimes.RegimeQuery(
        d=int(d), nu=float(nu), gamma=float(gamma), mu=int(mu),
        beta=None if beta in (None, "") else float(beta),
        small_l2="l2" in small, small_h2="h2" in small,
        small_critical="critical" in small,
    )


def cmd_classify(args) -> int:
    if args.batch:
        rows_out = []
        with open(args.batch, newline="") as fh:
            reader = csv.DictReader(fh)
            for i, row in enumerate(reader):
                try:
                    small = tuple(
                        s.strip() for s in (row.get("small_data") or "").split(";")
                        if s.strip()
                    )
                    q = _query_from(row["d"], row["nu"], row["gamma"],
                                    row.get("mu", 1) or 1,
                                    row.get("beta"), small)
                    v = regimes.classify(q)
                    rows_out.append({**row, "status": "ok",
                                     **_verdict_row(v)})
                except Exception as exc:
                    rows_out.append({**row, "status": "error",
                                     "error": str(exc)})
        _emit_table(rows_out, args.output)
        return EXIT_OK
    if args.d is None or args.nu is None or args.gamma is None:
        print("classify: --d, --nu and --gamma are required "
              "(or use --batch)", file=sys.stderr)
        return EXIT_CONFIG
    small = tuple(s.strip() for s in (args.small_data or "").split(",")
                  if s.strip())
    try:
        q = _query_from(args.d, args.nu, args.gamma, args.mu, args.beta, small)
        v = regimes.classify(q)
    except ValueError as exc:
        print(f"classify: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = json.dumps(v.as_dict(), indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _verdict_row(v: regimes.RegimeVerdict) -> dict:
    e = v.exponents.as_dict()
    return {
        "verdict": v.verdict, "theorem_tag": v.statement,
        "gamma_c": e["gamma_c"], "p": e["p"], "q": e["q"],
        "m": e["m"], "n": e["n"], "theta": e["theta"],
        "conditions": "; ".join(v.conditions),
    }


def _emit_table(rows: list[dict], output: str | None) -> None:
    keys: list[str] = []
    for row in rows:
        for k in row:
            if k not in keys:
                keys.append(k)
    out = sys.stdout if not output else open(output, "w", newline="")
    try:
        writer = csv.DictWriter(out, fieldnames=keys)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if output:
            out.close()


# --------------------------------------------------------------------------
# norms
# --------------------------------------------------------------------------

def cmd_norms(args) -> int:
    try:
        f = read_field(args.field)
    except (OSError, ValueError) as exc:
        print(f"norms: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = []
    try:
        for q in args.lq or ():
            qv = math.inf if q in ("inf", "Inf") else float(q)
            rows.append({"kind": "lq", "param": q, "value": lq_norm(f, qv)})
        for g in args.sobolev or ():
            rows.append({"kind": "H", "param": g,
                         "value": sobolev_norm(f, SobolevSpec(float(g)))})
        for g in args.sobolev_dot or ():
            rows.append({
                "kind": "Hdot", "param": g,
                "value": sobolev_norm(f, SobolevSpec(float(g),
                                                     homogeneous=True)),
            })
        for k in args.weighted or ():
            rows.append({"kind": "Hkk", "param": k,
                         "value": weighted_norm(f, WeightedSpec(int(k)))})
    except ZeroModeObstruction as exc:
        print(f"norms: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit_table(rows, args.output)
    return EXIT_OK


# --------------------------------------------------------------------------
# simulate
# --------------------------------------------------------------------------

def _parse_profile(text: str) -> ex.ProfileSpec:
    """``family[:key=value,key=value]``, e.g. moment-vanishing-gaussian:m=2."""
    family, _, rest = text.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            if not value:
                raise ConfigError(f"bad profile parameter {item!r}")
            params[key.strip()] = float(value)
    return ex.ProfileSpec.make(family.strip(), **params)


def cmd_simulate(args) -> int:
    out_dir = Path(args.out)
    try:
        grid = make_grid(args.d, args.L, args.N)
        profile = _parse_profile(args.profile)
        u0 = profile.build(grid)
        params = EquationParams(
            dim=args.d, nu=args.nu, mu=args.mu, disp=args.disp,
            nonlinearity_enabled=not args.no_nonlinearity,
        )
        ctrl = StepControl(
            dt=args.dt, t_end=args.t_end, guard=not args.no_guard,
            record_every=args.record_every, monitor_gamma=args.monitor_gamma,
            blowup_factor=args.blowup_factor,
        )
    except (ValueError, ex.StudyConfigError) as exc:
        print(f"simulate: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    traj = evolve(u0, ctrl, params)
    out_dir.mkdir(parents=True, exist_ok=True)
    fields_dir = out_dir / "fields"
    fields_dir.mkdir(exist_ok=True)
    config = {
        "d": args.d, "nu": args.nu, "mu": args.mu, "disp": args.disp,
        "L": args.L, "N": args.N, "dt": args.dt, "t_end": args.t_end,
        "profile": profile.as_dict(), "record_every": args.record_every,
        "monitor_gamma": args.monitor_gamma, "seed": args.seed,
        "nonlinearity": not args.no_nonlinearity,
    }
    with open(out_dir / "trajectory.jsonl", "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"kind": "header", "config": config,
                             "status": traj.status,
                             "message": traj.message}) + "\n")
        for i, (t, fld) in enumerate(zip(traj.times, traj.fields)):
            snap = None
            if not args.no_snapshots:
                snap = f"fields/snap_{i:06d}.fld"
                write_field(out_dir / snap, fld)
            rec = {
                "kind": "state", "t": t, "mass": traj.mass[i],
                "energy": traj.energy[i], "l2": math.sqrt(traj.mass[i]),
                "snapshot": snap, "seed": args.seed,
            }
            if traj.monitor:
                rec["monitor"] = traj.monitor[i]
            fh.write(json.dumps(rec) + "\n")

    if traj.status == STATUS_COMPLETED:
        print(f"completed: {len(traj.times)} records -> {out_dir}")
        return EXIT_OK
    if traj.status == STATUS_BLOWUP:
        print(f"blowup suspected: {traj.message}", file=sys.stderr)
        return EXIT_FLAGGED
    if traj.status == STATUS_GUARD:
        diag = out_dir / "spectrum_diagnostic.json"
        diag.write_text(json.dumps(
            {"message": traj.message,
             "profile": spectrum_profile(traj.final)}, indent=2))
        print(f"guard abort: {traj.message} (diagnostic: {diag})",
              file=sys.stderr)
        return EXIT_GUARD
    print(f"aborted: {traj.message}", file=sys.stderr)
    return EXIT_GUARD


# --------------------------------------------------------------------------
# experiment
# --------------------------------------------------------------------------

def _coerce(value: str):
    parts = value.split()
    if len(parts) > 1:
        return [_coerce(p) for p in parts]
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    if value.lower() in ("true", "false"):
        return value.lower() == "true"
    return value


def _load_config(path: str | None) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if path:
        read = cfg.read(path)
        if not read:
            raise ConfigError(f"cannot read config file {path}")
    return cfg


def _grid_from(cfg: configparser.ConfigParser):
    if not cfg.has_section("grid"):
        return None
    sec = cfg["grid"]
    dim = sec.getint("dim", 1)
    extent = _coerce(sec.get("extent", "16"))
    points = _coerce(sec.get("points", "256"))
    return make_grid(dim, extent, points)


def _profile_from(cfg: configparser.ConfigParser) -> ex.ProfileSpec | None:
    if not cfg.has_section("profile"):
        return None
    sec = dict(cfg["profile"])
    family = sec.pop("family", ex.GAUSSIAN)
    return ex.ProfileSpec.make(family, **{k: float(v) for k, v in sec.items()})


def _setup_from(cfg: configparser.ConfigParser,
                profile: ex.ProfileSpec | None) -> ex.IllposednessSetup | None:
    if not cfg.has_section("setup"):
        return None
    sec = dict(cfg["setup"])
    kwargs = {k: _coerce(v) for k, v in sec.items()}
    kwargs["profile"] = profile or ex.ProfileSpec(ex.GAUSSIAN)
    return ex.IllposednessSetup(**kwargs)


def _study_kwargs(study: str, cfg: configparser.ConfigParser) -> dict:
    kwargs: dict = {}
    grid = _grid_from(cfg)
    if grid is not None:
        kwargs["grid"] = grid
    profile = _profile_from(cfg)
    setup = _setup_from(cfg, profile)
    if cfg.has_section("params"):
        for key, value in cfg["params"].items():
            kwargs[key] = _coerce(value)

    if study == "small-dispersion" and profile is not None:
        g = grid or make_grid(1, 16.0, 256)
        kwargs["grid"] = g
        kwargs["phi0"] = profile.build(g)
    elif study in ("initial-norm-scaling", "conservation") and profile is not None:
        kwargs["profile"] = profile
    elif study == "norm-inflation" and setup is not None:
        kwargs["setup"] = setup
    elif study == "low-frequency" and setup is not None:
        deltas = kwargs.pop("deltas", [setup.delta])
        if not isinstance(deltas, list):
            deltas = [deltas]
        kwargs["setups"] = [
            ex.IllposednessSetup(
                profile=setup.profile, gamma=setup.gamma, delta=float(d),
                nu=setup.nu, mu=setup.mu, dim=setup.dim, kappa=setup.kappa)
            for d in deltas
        ]
    elif study == "uniform-discontinuity" and setup is not None:
        kwargs["setup"] = setup
    return kwargs


def _run_study(study: str, kwargs: dict, out_dir: Path) -> ExperimentRecord:
    result = ex.STUDIES[study](**kwargs)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_jsonl([result.record], out_dir / "records.jsonl")
    write_csv([result.record], out_dir / f"{study}.csv")
    for name, fit in result.fits.items():
        write_fit_csv(fit, out_dir / f"{study}_{name}_fit.csv")
    return result.record


def cmd_experiment(args) -> int:
    out_dir = Path(args.out)
    try:
        cfg = _load_config(args.config)
    except ConfigError as exc:
        print(f"experiment: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.study == "sweep":
        if not args.config:
            print("experiment sweep: --config is required", file=sys.stderr)
            return EXIT_CONFIG
        try:
            base_study = cfg["study"]["type"]
            if base_study not in ex.STUDIES:
                raise ConfigError(f"unknown study {base_study!r}")
            base_kwargs = _study_kwargs(base_study, cfg)
            vary = {k: _coerce(v) for k, v in cfg["vary"].items()} \
                if cfg.has_section("vary") else {}
            for k, v in vary.items():
                if not isinstance(v, list):
                    vary[k] = [v]
            plan = []
            keys = sorted(vary)
            for combo in itertools.product(*(vary[k] for k in keys)):
                kw = dict(base_kwargs)
                kw.update(dict(zip(keys, combo)))
                plan.append((base_study, kw))
        except (KeyError, ConfigError, ValueError, ex.StudyConfigError) as exc:
            print(f"experiment sweep: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        records = ex.sweep(plan, workers=args.workers)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_jsonl(records, out_dir / "records.jsonl")
        write_csv(records, out_dir / "sweep.csv")
        for rec in records:
            print(f"{rec.study}: {_status_word(rec)}")
        return EXIT_OK

    if args.study not in ex.STUDIES:
        print(f"experiment: unknown study {args.study!r}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        kwargs = _study_kwargs(args.study, cfg)
        rec = _run_study(args.study, kwargs, out_dir)
    except (ex.StudyConfigError, ConfigError, TypeError, ValueError) as exc:
        print(f"experiment {args.study}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ex.StudyResolutionError as exc:
        print(f"experiment {args.study}: {exc}", file=sys.stderr)
        return EXIT_GUARD
    print(f"{rec.study}: {_status_word(rec)}")
    for key, value in rec.outputs.items():
        if isinstance(value, (int, float, bool)):
            print(f"  {key} = {value}")
    return EXIT_OK


def _status_word(rec: ExperimentRecord) -> str:
    if rec.status != "ok":
        return f"ERROR ({rec.error})"
    if rec.passed is None:
        return "done"
    return "PASS" if rec.passed else "FAIL"


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bnls",
        description="Fourth-order NLS: spectral solver, regime classifier "
                    "and scaling-law experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="regime verdict for (d, nu, gamma, mu)")
    c.add_argument("--d", type=int)
    c.add_argument("--nu", type=float)
    c.add_argument("--gamma", type=float)
    c.add_argument("--mu", type=int, default=1, choices=(1, -1))
    c.add_argument("--beta", type=float, default=None)
    c.add_argument("--small-data", default="",
                   help="comma list from {l2, h2, critical}")
    c.add_argument("--batch", help="CSV of queries (bulk mode)")
    c.add_argument("--output", help="write result to file instead of stdout")
    c.set_defaults(fn=cmd_classify)

    n = sub.add_parser("norms", help="norm table for a stored field")
    n.add_argument("--field", required=True)
    n.add_argument("--lq", action="append", help="L^q order (repeatable)")
    n.add_argument("--sobolev", action="append",
                   help="inhomogeneous H^gamma order (repeatable)")
    n.add_argument("--sobolev-dot", action="append",
                   help="homogeneous order (repeatable)")
    n.add_argument("--weighted", action="append",
                   help="weighted-space order k (repeatable)")
    n.add_argument("--output")
    n.set_defaults(fn=cmd_norms)

    s = sub.add_parser("simulate", help="evolve an initial profile")
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--nu", type=float, required=True)
    s.add_argument("--mu", type=int, required=True, choices=(1, -1))
    s.add_argument("--disp", type=float, default=1.0)
    s.add_argument("--L", type=float, default=16.0)
    s.add_argument("--N", type=int, default=256)
    s.add_argument("--dt", type=float, required=True)
    s.add_argument("--t-end", type=float, required=True)
    s.add_argument("--profile", default="gaussian",
                   help="family[:key=val,...]")
    s.add_argument("--record-every", type=int, default=1)
    s.add_argument("--monitor-gamma", type=float, default=None)
    s.add_argument("--blowup-factor", type=float, default=1e4)
    s.add_argument("--no-nonlinearity", action="store_true")
    s.add_argument("--no-guard", action="store_true")
    s.add_argument("--no-snapshots", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="sim_out")
    s.set_defaults(fn=cmd_simulate)

    e = sub.add_parser("experiment", help="run a scaling-law study")
    e.add_argument("study", choices=sorted(ex.STUDIES) + ["sweep"])
    e.add_argument("--config", help="INI config (required for sweep)")
    e.add_argument("--out", default="exp_out")
    e.add_argument("--workers", type=int, default=1)
    e.set_defaults(fn=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

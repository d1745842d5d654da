"""``hawkdove`` command-line front end.

Exit codes: 0 ok, 2 invalid config or arguments, 3 I/O error, 4 a reproduced
table value differs from its printed counterpart.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass, field
from typing import Optional

from . import abm, experiments
from .equilibria import GridResolutionWarning, analyze, find_stationary_states
from .flow import DEFAULT_T_MAX, CONVERGENCE_TOL, estimate_basins, integrate
from .game import Game, GameError
from .response import build_response
from .sampling import SWEEP_G, Dynamics, SampleDistribution, TieRule, as_distribution, \
    sweep_distributions
from .svg import phase_portrait

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_GOLDEN = 4


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    game: Game
    theta: SampleDistribution
    dynamics: Dynamics = Dynamics.ACTION
    tie: TieRule = TieRule.DOVE
    seed: int = 0
    t_max: float = DEFAULT_T_MAX
    tol: float = CONVERGENCE_TOL
    N: int = 1000
    horizon: int = 100
    replicates: int = 10
    start: Optional[tuple[float, float]] = None
    basin_samples: int = 400
    sweep: dict = field(default_factory=dict)


def parse_config(raw: dict) -> Config:
    """Validate a decoded JSON config; raises ConfigError with a readable message."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    try:
        g = raw.get("game", {})
        game = Game(float(g.get("g", 0.25)), float(g.get("l", g.get("g", 0.25))),
                    g.get("mode", "strict"))
        theta = as_distribution(raw.get("theta", "degenerate:3"))
        integ = raw.get("integrator", {})
        sim = raw.get("abm", {})
        start = raw.get("start")
        if start is not None:
            start = (float(start[0]), float(start[1]))
            if not all(0.0 <= s <= 1.0 for s in start):
                raise ConfigError(f"start must lie in [0,1]^2, got {start}")
        cfg = Config(
            game=game, theta=theta,
            dynamics=Dynamics(raw.get("dynamics", "action")),
            tie=TieRule(raw.get("tie", "dove")),
            seed=int(raw.get("seed", 0)),
            t_max=float(integ.get("t_max", DEFAULT_T_MAX)),
            tol=float(integ.get("tol", CONVERGENCE_TOL)),
            N=int(sim.get("N", 1000)), horizon=int(sim.get("horizon", 100)),
            replicates=int(sim.get("replicates", 10)),
            start=start,
            basin_samples=int(raw.get("basins", {}).get("n", 400)),
            sweep=dict(raw.get("sweep", {})),
        )
    except ConfigError:
        raise
    except (GameError, ValueError, TypeError, KeyError, IndexError, AttributeError) as exc:
        raise ConfigError(str(exc)) from None
    if cfg.t_max <= 0 or cfg.tol <= 0:
        raise ConfigError("integrator t_max and tol must be positive")
    if cfg.N < 2 or cfg.horizon < 0 or cfg.replicates < 1 or cfg.basin_samples < 1:
        raise ConfigError("abm.N >= 2, abm.horizon >= 0, abm.replicates >= 1, basins.n >= 1")
    return cfg


def load_config(path: Optional[str]) -> Config:
    if path is None:
        return parse_config({})
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_config(raw)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _response(cfg: Config):
    return build_response(cfg.game, cfg.theta, cfg.dynamics, cfg.tie)


def _states(f):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GridResolutionWarning)
        return find_stationary_states(f)


# subcommands -------------------------------------------------------------

def cmd_analyze(cfg: Config, fmt: str) -> tuple[str, int]:
    report = analyze(cfg.game, cfg.theta, cfg.dynamics, cfg.tie)
    if fmt == "csv":
        rows = [(s["p1"], s["p2"], s["slope_product"], s["label"])
                for s in report["stationary_states"]]
        return _csv(["p1", "p2", "slope_product", "label"], rows), EXIT_OK
    return json.dumps(report, indent=2) + "\n", EXIT_OK


def cmd_trajectory(cfg: Config, fmt: str) -> tuple[str, int]:
    f = _response(cfg)
    start = cfg.start or (0.1, 0.8)
    traj = integrate(f, start, t_max=cfg.t_max, tol=cfg.tol, states=_states(f))
    if fmt == "csv":
        return traj.to_csv(), EXIT_OK
    out = {"start": list(start), "converged": traj.converged, "steps": traj.steps,
           "final": list(traj.final.as_tuple()),
           "path": traj.path.tolist()}
    return json.dumps(out) + "\n", EXIT_OK


def cmd_basins(cfg: Config, fmt: str) -> tuple[str, int]:
    f = _response(cfg)
    est = estimate_basins(f, n=cfg.basin_samples, seed=cfg.seed, states=_states(f),
                          t_max=cfg.t_max, tol=cfg.tol)
    if fmt == "csv":
        rows = [(s.location.p1, s.location.p2, s.label.value, f"{fr:.6g}", f"{hw:.6g}")
                for s, fr, hw in zip(est.states, est.fractions, est.half_widths)]
        return _csv(["p1", "p2", "label", "fraction", "half_width"], rows), EXIT_OK
    return json.dumps(est.to_dict(), indent=2) + "\n", EXIT_OK


def cmd_abm(cfg: Config, fmt: str) -> tuple[str, int]:
    sim = abm.SimConfig(cfg.game, cfg.theta, cfg.dynamics, cfg.tie, N=cfg.N,
                        horizon=cfg.horizon, seed=cfg.seed, start=cfg.start)
    runs = abm.run_replicates(sim, cfg.replicates)
    if fmt == "csv":
        lines = ["event_block,p1_hat,p2_hat,replicate_id"]
        for r, run in enumerate(runs):
            lines += run.to_csv_rows(r)
        return "\n".join(lines) + "\n", EXIT_OK
    report = abm.compare_to_mean_field(runs, _response(cfg)).to_dict()
    report["terminal"] = [run.terminal.tolist() for run in runs]
    return json.dumps(report, indent=2) + "\n", EXIT_OK


def cmd_sweep(cfg: Config, fmt: str, basins: bool = True, workers: int = 1) -> tuple[str, int]:
    grid = cfg.sweep
    gs = tuple(float(g) for g in grid.get("g", SWEEP_G))
    try:
        dists = ([as_distribution(d) for d in grid["distributions"]]
                 if "distributions" in grid else sweep_distributions())
        kinds = [Dynamics(k).value for k in grid.get("dynamics", ("action", "payoff"))]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = experiments.run_sweep(gs, dists, kinds, basins=basins, n=cfg.basin_samples,
                                 seed=cfg.seed, workers=workers)
    if fmt == "json":
        return json.dumps([r.__dict__ for r in rows], indent=1, allow_nan=True) + "\n", EXIT_OK
    return experiments.rows_to_csv(rows), EXIT_OK


def cmd_tables(fmt: str) -> tuple[str, int]:
    entries = experiments.table_entries()
    code = EXIT_OK if all(e.ok for e in entries) else EXIT_GOLDEN
    if fmt == "json":
        data = [{"entry": e.name, "computed": e.computed, "printed": e.golden, "ok": e.ok}
                for e in entries]
        return json.dumps(data, indent=1) + "\n", code
    if fmt == "csv":
        rows = [(e.name, f"{e.computed:.6f}", f"{e.golden:.3f}", int(e.ok)) for e in entries]
        return _csv(["entry", "computed", "printed", "ok"], rows), code
    return experiments.format_tables(entries), code


def cmd_plot(cfg: Config) -> tuple[str, int]:
    f = _response(cfg)
    title = f"{cfg.dynamics.value} sampling, g={cfg.game.g:g}, l={cfg.game.l:g}, theta={cfg.theta}"
    return phase_portrait(f, _states(f), title=title), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON environment config")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), help="output format")

    parser = argparse.ArgumentParser(prog="hawkdove", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="stationary states and stability")
    sub.add_parser("trajectory", parents=[common], help="integrate from config 'start'")
    sub.add_parser("basins", parents=[common], help="Monte Carlo basin estimate")
    sub.add_parser("abm", parents=[common], help="finite-population simulation")
    sw = sub.add_parser("sweep", parents=[common], help="parameter sweep over the grid")
    sw.add_argument("--no-basins", action="store_true", help="skip basin sampling")
    sw.add_argument("--workers", type=int, default=1)
    sub.add_parser("tables", parents=[common], help="reproduce the fixed-point tables")
    sub.add_parser("plot", parents=[common], help="SVG phase portrait")
    return parser


def _emit(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = load_config(args.config) if args.command != "tables" else None
        if cfg is not None and args.seed is not None:
            cfg.seed = args.seed
        cmd = args.command
        if cmd == "analyze":
            text, code = cmd_analyze(cfg, args.format or "json")
        elif cmd == "trajectory":
            text, code = cmd_trajectory(cfg, args.format or "csv")
        elif cmd == "basins":
            text, code = cmd_basins(cfg, args.format or "json")
        elif cmd == "abm":
            text, code = cmd_abm(cfg, args.format or "csv")
        elif cmd == "sweep":
            text, code = cmd_sweep(cfg, args.format or "csv", not args.no_basins,
                                   max(1, args.workers))
        elif cmd == "tables":
            text, code = cmd_tables(args.format or "text")
        else:
            text, code = cmd_plot(cfg)
        _emit(text, args.out)
    except ConfigError as exc:
        print(f"hawkdove: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"hawkdove: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if code == EXIT_GOLDEN:
        print("hawkdove: some reproduced values differ from the printed tables", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``semiwig <command> [options]``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from .config import RegimeConfig, load_config
from .dynamics import NLSParams, solve
from .errors import ConfigError, SemiwigError
from .experiments import classify_regime, epsilon_sweep, reproduce_tables
from .grid import SampledField, make_grid
from .initial_data import classify, select_grid, synthesize, wavepacket_verdict
from .norms import norm_report
from .phase_space import fourier_wigner, wigner_transform, write_raster_csv

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class _Printer:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, *lines):
        if not self.quiet:
            for line in lines:
                print(line)


def _config(args) -> RegimeConfig:
    return load_config(args.config) if args.config else RegimeConfig()


def _out(args) -> Path:
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=float) + "\n")


def _pick_eps(cfg: RegimeConfig, eps):
    return float(eps) if eps is not None else cfg.epsilons[0]


def _initial(cfg: RegimeConfig, eps: float):
    spec = cfg.wavepacket_spec()
    grid = select_grid(spec, eps, t_end=abs(cfg.t_end), max_points=cfg.max_points)
    return synthesize(spec, eps, grid)


def cmd_solve(args, say) -> int:
    cfg = _config(args)
    eps = _pick_eps(cfg, args.epsilon)
    psi0 = _initial(cfg, eps)
    params = NLSParams.from_schedule(eps, cfg.sigma, cfg.coefficient, cfg.exponent, cfg.focusing, cfg.n)
    traj = solve(params, psi0, cfg.t_end, dt=cfg.dt, frame_stride=cfg.frame_stride, frames=cfg.frames, safety=cfg.safety)
    out = _out(args)
    traj.write_conserved_csv(out / "conserved.csv")
    traj.write_frames_npz(out / "frames.npz")
    if psi0.grid.dim == 1:
        traj.write_frame_csv(len(traj.frames) - 1, out / "final.csv")
    g = psi0.grid
    summary = {
        "epsilon": eps,
        "b": params.b,
        "points": g.points,
        "half_width": g.half_width,
        "dt": traj.dt,
        "halvings": traj.halvings,
        "mass_drift": traj.mass_drift,
        "energy_drift": traj.energy_drift,
        "frames": len(traj.frames),
    }
    _write_json(out / "solve.json", summary)
    say(
        f"eps={eps:g} b={params.b:.4g} N={g.points} L={g.half_width:g} dt={traj.dt:.4g}",
        f"mass drift {traj.mass_drift:.2e}, energy drift {traj.energy_drift:.2e}",
        f"wrote {out / 'conserved.csv'}, {out / 'frames.npz'}",
    )
    return EXIT_OK


def _load_frame(path, index: int) -> SampledField:
    data = np.load(path)
    frames = data["frames"]
    if frames.ndim != 2:
        raise ConfigError("the wigner command works on 1D frames")
    grid = make_grid(1, frames.shape[1], float(data["half_width"]))
    return SampledField(grid, frames[index], float(data["epsilon"]))


def cmd_wigner(args, say) -> int:
    if args.frames:
        field = _load_frame(args.frames, args.index)
    else:
        cfg = _config(args)
        if cfg.n != 1:
            raise ConfigError("the wigner command works on 1D data")
        field = _initial(cfg, _pick_eps(cfg, args.epsilon))
    W = wigner_transform(field)
    rep = norm_report(W)
    out = _out(args)
    write_raster_csv(W, out / "wigner.csv")
    if args.spectrum:
        write_raster_csv(fourier_wigner(field), out / "wigner_fourier.csv")
    payload = rep.as_dict() | {"norm_chain_holds": rep.chain_holds(), "imag_residue": W.imag_residue}
    _write_json(out / "norms.json", payload)
    say(*(f"{k:>14}: {v:.6g}" for k, v in rep.as_dict().items()))
    say(f"norm chain Lions-Paul <= A0 <= A1: {rep.chain_holds()}")
    return EXIT_OK


def cmd_classify(args, say) -> int:
    cfg = _config(args)
    regime = classify_regime(cfg)
    if cfg.n == 3:
        # three-dimensional data is classified by regime only
        say(*regime.lines())
        _write_json(_out(args) / "classify.json", {"regime": regime.as_dict()})
        return EXIT_OK
    diags, rows = [], []
    say(f"{'eps':>8} {'L2':>10} {'eps*H1':>10} {'FH1':>10} {'eps*grad_c':>11} {'spread_c':>10}")
    for eps in cfg.epsilons:
        spec = cfg.wavepacket_spec()
        f = synthesize(spec, eps, select_grid(spec, eps, max_points=cfg.max_points))
        d = classify(f, cfg.position, cfg.wavenumber)
        diags.append(d)
        rows.append({"epsilon": eps} | d.as_dict())
        say(
            f"{eps:8.4g} {d.l2_norm:10.6f} {eps * d.h1_norm:10.5g} {d.fourier_h1_norm:10.5g} "
            f"{eps * d.centered_gradient:11.5g} {d.centered_spread:10.5g}"
        )
    verdict = wavepacket_verdict(cfg.epsilons, diags, cfg.threshold)
    say(verdict.summary())
    say(*regime.lines())
    _write_json(
        _out(args) / "classify.json",
        {
            "diagnostics": rows,
            "verdict": {
                "wavepacket": verdict.wavepacket,
                "narrowband": verdict.narrowband,
                "gradient_fit": verdict.gradient_fit.as_dict(),
                "spread_fit": verdict.spread_fit.as_dict(),
            },
            "regime": regime.as_dict(),
        },
    )
    return EXIT_OK


def cmd_sweep(args, say) -> int:
    cfg = _config(args)
    res = epsilon_sweep(cfg, args.jobs)
    out = _out(args)
    res.write_csv(out / "sweep.csv")
    _write_json(out / "summary.json", res.summary())
    for p in res.points:
        status = "ok" if p.ok else f"failed ({p.error})"
        say(f"eps={p.epsilon:g} N={p.points} L={p.half_width:g} {status}")
    for v in res.verdicts:
        say(f"[{'PASS' if v.passed else 'FAIL'}] {v.metric}: {v.name}; {v.detail}")
    if not res.ok:
        return EXIT_NUMERIC
    return EXIT_OK if res.passed else EXIT_VERIFY


def cmd_tables(args, say) -> int:
    rep = reproduce_tables(long_time=args.long_time, dynamics=not args.no_dynamics, jobs=args.jobs)
    out = _out(args)
    rep.write_csv(out / "tables_report.csv")
    (out / "tables_report.txt").write_text(rep.text() + "\n")
    say(rep.text())
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_verify(args, say) -> int:
    only = None
    if args.only:
        try:
            only = sorted({int(x) for x in args.only.split(",")})
        except ValueError as err:
            raise ConfigError(f"--only expects comma-separated criterion numbers: {args.only}") from err
        bad = [n for n in only if n not in acceptance.CRITERIA]
        if bad:
            raise ConfigError(f"unknown criteria {bad}")
    results = acceptance.run_all(args.seed, only, args.jobs, callback=lambda r: say(r.line()))
    out = _out(args)
    (out / "verify.json").write_text(acceptance.dumps(results) + "\n")
    passed = sum(r.passed for r in results)
    say(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps values given before the subcommand from being reset
    common.add_argument("--config", default=argparse.SUPPRESS, help="INI experiment config")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized corpora")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="parallel sweep points")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="semiwig", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="one trajectory: frames and conserved quantities")
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("wigner", parents=[common], help="Wigner raster and norms of one field")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--frames", help="frames.npz written by solve")
    p.add_argument("--index", type=int, default=-1)
    p.add_argument("--spectrum", action="store_true", help="also write the phase-space Fourier raster")
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("classify", parents=[common], help="initial-data diagnostics and regime report")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", parents=[common], help="epsilon sweep with fits and verdicts")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tables", parents=[common], help="predicted versus fitted exponents")
    p.add_argument("--long-time", action="store_true", help="add the growing-horizon probe")
    p.add_argument("--no-dynamics", action="store_true", help="initial-data cells only")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_verify)
    return parser


_DEFAULTS = {"config": None, "out": ".", "seed": 0, "jobs": 1, "quiet": False}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for k, v in _DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    say = _Printer(args.quiet)
    try:
        return args.func(args, say)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except SemiwigError as err:
        print(f"numerical failure: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

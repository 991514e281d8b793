"""``tpa-opt`` command-line front end.

Each subcommand writes CSV/JSON files plus ``manifest.json`` into
``<out>/<command>/``.  Exit status: 0 success, 1 configuration error,
2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .config import RunConfig, load_config
from .dynamics import classical_populations, quantum_populations, symmetry_metric, time_axis
from .errors import AsymmetricTimeGrid, ConfigError, NumericalError, TpaOptError
from .model import Symmetric
from .optimal import analytic_norm, optimize
from .output import ensure_dir, write_csv, write_json, write_manifest, write_matrix_csv
from .response import build_kernel, dump_kernel
from .rubidium import rubidium_study
from .schmidt import decompose
from .selfcheck import run_selfcheck
from .sweep import analyze_sweep, run_sweep, stderr_progress

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


class _Context:
    def __init__(self, args: argparse.Namespace, argv: Sequence[str], command: str):
        self.args = args
        self.argv = list(argv)
        self.command = command
        self.cfg: RunConfig = load_config(args.config)
        if args.workers is not None and args.workers < 1:
            raise ConfigError(f"--workers must be >= 1 (got {args.workers})")
        self.workers = args.workers if args.workers is not None else self.cfg.workers()
        self.seed = args.seed if args.seed is not None else self.cfg.seed()
        try:
            self.outdir = ensure_dir(self.cfg.out_dir(args.out) / command)
        except OSError as exc:
            raise ConfigError(f"cannot use output directory: {exc}") from None
        self.files: list[Path] = []
        self.started = time.perf_counter()
        self.extra: dict = {}

    def path(self, name: str) -> Path:
        p = self.outdir / name
        self.files.append(p)
        return p

    def finish(self) -> None:
        normalized = self.cfg.normalized()
        normalized["_cli"] = {"workers": self.workers, "seed": self.seed}
        extra = {"elapsed_s": time.perf_counter() - self.started, **self.extra}
        write_manifest(self.outdir, self.command, self.argv, normalized, self.files, extra)


def _axis_rows(grid):
    return zip(grid.nodes, grid.weights)


def _write_axes(ctx: _Context, kernel) -> None:
    write_csv(ctx.path("axis_a.csv"), ["nu", "weight"], _axis_rows(kernel.grid_a))
    write_csv(ctx.path("axis_b.csv"), ["nu", "weight"], _axis_rows(kernel.grid_b))


def _kernel(ctx: _Context):
    system = ctx.cfg.system()
    grid = ctx.cfg.grid(system)
    return system, grid, build_kernel(system, grid, grid, ctx.cfg.target_time())


def _base_summary(system, grid) -> dict:
    return {"system": system.as_dict(), "grid": grid.describe()}


def cmd_kernel(ctx: _Context) -> int:
    system, grid, kernel = _kernel(ctx)
    write_matrix_csv(ctx.path("kernel_abs.csv"), np.abs(kernel.values))
    _write_axes(ctx, kernel)
    if ctx.args.binary:
        for p in dump_kernel(kernel, ctx.outdir / "kernel"):
            ctx.files.append(p)
    summary = _base_summary(system, grid)
    summary.update({"shape": list(kernel.shape), "t": kernel.t, "norm2": kernel.norm2()})
    if isinstance(system.coupling_mode, Symmetric):
        summary["analytic_norm"] = analytic_norm(system)
    write_json(ctx.path("summary.json"), summary)
    return EXIT_OK


def _write_modes(ctx: _Context, sd, count: int) -> int:
    # the CLI always builds square kernels on one grid
    count = min(count, sd.rank)
    for k in range(count):
        rows = zip(sd.grid_a.nodes, sd.psi[k].real, sd.psi[k].imag, sd.phi[k].real, sd.phi[k].imag)
        write_csv(ctx.path(f"mode_{k + 1:03d}.csv"), ["nu", "psi_re", "psi_im", "phi_re", "phi_im"], rows)
    return count


def cmd_schmidt(ctx: _Context) -> int:
    system, grid, kernel = _kernel(ctx)
    sd = decompose(kernel)
    total = sd.sum_r2
    rows = ((k + 1, r, r * r / total) for k, r in enumerate(sd.r))
    write_csv(ctx.path("schmidt_values.csv"), ["k", "r", "weight"], rows)
    written = _write_modes(ctx, sd, ctx.cfg.export_modes())
    summary = _base_summary(system, grid)
    summary.update({"rank": sd.rank, "r1": float(sd.r[0]), "sum_rk2": total, "modes_written": written})
    write_json(ctx.path("summary.json"), summary)
    return EXIT_OK


def _optimize(ctx: _Context):
    system, grid, kernel = _kernel(ctx)
    sd = decompose(kernel)
    return system, grid, kernel, optimize(kernel, sd, ctx.cfg.photon_number())


def cmd_optimize(ctx: _Context) -> int:
    system, grid, kernel, res = _optimize(ctx)
    p, s = res.pulses, res.state
    rows = zip(grid.nodes, p.a1.real, p.a1.imag, p.a2.real, p.a2.imag)
    write_csv(ctx.path("pulses.csv"), ["nu", "a1_re", "a1_im", "a2_re", "a2_im"], rows)
    write_matrix_csv(ctx.path("state_abs.csv"), np.abs(s.amplitude))
    write_matrix_csv(ctx.path("state_arg.csv"), np.angle(s.amplitude))
    _write_axes(ctx, kernel)
    rows = ((k + 1, r) for k, r in enumerate(res.decomposition.r))
    write_csv(ctx.path("schmidt_values.csv"), ["k", "r"], rows)
    summary = _base_summary(system, grid)
    summary.update(res.summary())
    write_json(ctx.path("summary.json"), summary)
    return EXIT_OK


def cmd_sweep(ctx: _Context) -> int:
    spec = ctx.cfg.sweep_spec()
    result = run_sweep(spec, workers=ctx.workers, progress=stderr_progress)
    ctx.path("sweep.csv").write_text(result.to_csv())
    failed = [
        {"delta_cap": r.delta_cap, "delta_small": r.delta_small, "error": r.error} for r in result.rows if not r.ok
    ]
    summary = analyze_sweep(result).as_dict()
    summary["failed"] = failed
    summary["grid"] = {"margin": spec.grid.margin, "n": spec.grid.n}
    write_json(ctx.path("sweep_summary.json"), summary)
    ctx.extra["sweep_elapsed_s"] = result.meta["elapsed_s"]
    return EXIT_OK


def cmd_dynamics(ctx: _Context) -> int:
    system, grid, kernel, res = _optimize(ctx)
    tmin, tmax, count = ctx.cfg.times(ctx.args.times)
    times = time_axis(tmin, tmax, count)
    traces = [classical_populations(system, res.pulses, times), quantum_populations(system, res.state, times)]
    rows = [row for tr in traces for row in tr.rows()]
    write_csv(ctx.path("dynamics.csv"), ["t", "p_e", "p_f", "drive"], rows)
    summary = _base_summary(system, grid)
    summary["E"] = res.enhancement
    summary["pf_classical_frequency_domain"] = res.pf_classical
    summary["pf_quantum_frequency_domain"] = res.pf_quantum
    for tr in traces:
        info = {
            "peak_p_e": float(np.max(tr.p_e)),
            "peak_p_f": float(np.max(tr.p_f)),
            "peak_time_p_f": tr.peak_time(),
            "final_p_f": float(tr.p_f[-1]),
        }
        i0 = int(np.argmin(np.abs(times)))
        if times[i0] == 0.0:
            info["p_f_at_0"] = float(tr.p_f[i0])
        try:
            info["symmetry_metric"] = symmetry_metric(tr)
        except AsymmetricTimeGrid:
            info["symmetry_metric"] = None
        summary[tr.drive] = info
    write_json(ctx.path("summary.json"), summary)
    return EXIT_OK


def cmd_rubidium(ctx: _Context) -> int:
    system = ctx.cfg.system() if ctx.cfg.section("system") else None
    report = rubidium_study(ctx.cfg.rubidium_levels(), ctx.cfg.rubidium_band(), system)
    d = report.as_dict()
    ctx.extra["level_elapsed_s"] = [lv.pop("elapsed_s") for lv in d["levels"]]
    header = ["reach", "nodes_per_cluster", "total_nodes", "r1", "r2", "sum_rk2", "E", "norm_ratio"]
    write_csv(ctx.path("convergence.csv"), header, ([lv[h] for h in header] for lv in d["levels"]))
    write_json(ctx.path("report.json"), d)
    lo, hi = report.band
    verdict = "inside" if report.in_band else "outside"
    print(f"rubidium: E = {report.E_finest:.4f} (extrapolated {report.E_extrapolated:.4f}), "
          f"{verdict} band [{lo}, {hi}]", file=sys.stderr)
    return EXIT_OK


def cmd_selfcheck(ctx: _Context) -> int:
    results = run_selfcheck(ctx.seed)
    write_csv(ctx.path("selfcheck.csv"), ["check", "ok", "value", "limit"],
              ((r.name, str(r.ok).lower(), r.value, r.limit) for r in results))
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.value:.3e} (limit {r.limit:.1e})", file=sys.stderr)
    return EXIT_OK if all(r.ok for r in results) else EXIT_NUMERICAL


COMMANDS = {
    "kernel": cmd_kernel,
    "schmidt": cmd_schmidt,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "dynamics": cmd_dynamics,
    "rubidium": cmd_rubidium,
    "selfcheck": cmd_selfcheck,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI-style run configuration")
    common.add_argument("--out", metavar="DIR", help="output root (default: $TPAOPT_OUT or ./tpaopt_out)")
    common.add_argument("--workers", type=int, metavar="N", help="worker processes for sweeps")
    common.add_argument("--seed", type=int, metavar="N", help="seed for randomized checks")

    parser = argparse.ArgumentParser(prog="tpa-opt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    k = sub.add_parser("kernel", parents=[common], help="response kernel |T| on the grid")
    k.add_argument("--binary", action="store_true", help="also dump the complex kernel (.bin + .hdr)")
    sub.add_parser("schmidt", parents=[common], help="Schmidt coefficients and modes")
    sub.add_parser("optimize", parents=[common], help="optimal pulses, optimal state and E")
    sub.add_parser("sweep", parents=[common], help="E over the (Delta, delta) plane")
    d = sub.add_parser("dynamics", parents=[common], help="p_e(t), p_f(t) for both optimal drives")
    d.add_argument("--times", metavar="MIN:MAX:COUNT", help="time axis")
    pre = sub.add_parser("preset", help="named end-to-end studies")
    pre_sub = pre.add_subparsers(dest="preset", required=True)
    pre_sub.add_parser("rubidium", parents=[common], help="rubidium ladder convergence study")
    sub.add_parser("selfcheck", parents=[common], help="fast invariant checks")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    command = args.preset if args.command == "preset" else args.command
    try:
        ctx = _Context(args, argv, command)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            status = COMMANDS[command](ctx)
        ctx.finish()
        return status
    except ConfigError as exc:
        print(f"tpa-opt: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, TpaOptError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"tpa-opt: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"tpa-opt: I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

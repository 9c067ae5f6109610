"""Command line entry point: ``qps snapshot | sweep | validate``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import _kernels
from .config import RunConfig, load_config
from .density import reduced_density
from .errors import ConfigError
from .measures import integrate, negativity, sweep, wehrl_entropy, wigner_entropy
from .model import choose_truncation, derive_params
from .phasespace import husimi_field, make_grid, wigner_field, write_field, write_pgm
from .validation import run_validation

EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_VALIDATION = 3


def _n_max(cfg: RunConfig) -> int:
    if cfg.truncation.n_max is not None:
        return cfg.truncation.n_max
    return choose_truncation(derive_params(cfg.model), cfg.truncation.tail_tol)


def _out_dir(cfg: RunConfig, override) -> Path:
    path = Path(override if override is not None else cfg.outputs.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _time_tag(t: float) -> str:
    return f"{t:g}".replace("-", "m")


def cmd_snapshot(cfg: RunConfig, time: float, out=None) -> list[Path]:
    directory = _out_dir(cfg, out)
    grid = make_grid(cfg.half_width, cfg.grid.spacing)
    b = reduced_density(cfg.model, time, _n_max(cfg))
    w = wigner_field(b, grid)
    q = husimi_field(b, grid)
    written = []
    tag = _time_tag(time)
    if cfg.outputs.emit_fields:
        for name, f in (("wigner", w), ("husimi", q)):
            path = directory / f"{name}_t{tag}.dat"
            write_field(f, path)
            written.append(path)
    if cfg.outputs.emit_heatmaps:
        for name, f in (("wigner", w), ("husimi", q)):
            path = directory / f"{name}_t{tag}.pgm"
            write_pgm(f, path)
            written.append(path)
    print(
        f"omega_t={time:g} negativity={negativity(w):.6f} S_W={wigner_entropy(w):.6f} "
        f"S_Q={wehrl_entropy(q):.6f} int_W={integrate(w):.6f} int_Q={integrate(q):.6f}"
    )
    return written


def cmd_sweep(cfg: RunConfig, out=None) -> Path:
    directory = _out_dir(cfg, out)
    grid = make_grid(cfg.half_width, cfg.grid.spacing)

    def progress(rec):
        flag = "  FLAGGED" if rec.flagged else ""
        print(
            f"omega_t={rec.time:g} negativity={rec.negativity:.5f} S_W={rec.wigner_entropy:.5f} "
            f"S_Q={rec.wehrl_entropy:.5f}{flag}",
            file=sys.stderr,
        )

    series = sweep(cfg.model, cfg.times.values(), grid, n_max=_n_max(cfg), progress=progress)
    path = directory / "sweep.csv"
    path.write_text(series.to_csv(), encoding="ascii")
    return path


def cmd_validate(cfg: RunConfig) -> bool:
    width = 42
    print(f"{'check':<{width}} {'value':>12} {'tolerance':>10}  result")

    def report(c):
        status = "PASS" if c.passed else "FAIL"
        print(f"{c.name:<{width}} {c.value:12.3e} {c.tolerance:10.1e}  {status}", flush=True)

    checks = run_validation(cfg, report)
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return not failed


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qps", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    snap = sub.add_parser("snapshot", help="write W and Q fields at one scaled time")
    snap.add_argument("--config", required=True)
    snap.add_argument("--time", type=float, required=True, help="scaled time omega*t")
    snap.add_argument("--out")

    sw = sub.add_parser("sweep", help="write the negativity/entropy time series CSV")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out")

    val = sub.add_parser("validate", help="run the invariant suite")
    val.add_argument("--config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _kernels.apply_worker_cap()
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
    except (ConfigError, OSError) as exc:
        print(f"qps: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "snapshot":
            for path in cmd_snapshot(cfg, args.time, args.out):
                print(path)
        elif args.command == "sweep":
            print(cmd_sweep(cfg, args.out))
        else:
            return 0 if cmd_validate(cfg) else EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - any failure past config parsing is a runtime error
        print(f"qps: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())

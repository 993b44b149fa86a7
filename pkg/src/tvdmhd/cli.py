"""Command surface: run, bench, validate, slice.

Configuration is flat ``key = value`` text; command-line flags override file
values.  The default worker count comes from the TVDMHD_WORKERS environment
variable when set.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from statistics import median

from . import perf, validation
from .grid import GridShape, SchemeParams
from .ic import KINDS, init_condition
from .snapshot import read_snapshot, slice_export, write_snapshot
from .stepper import run as run_cycles
from .stepper import step_cycle

ENV_WORKERS = "TVDMHD_WORKERS"


class ConfigError(ValueError):
    """Bad configuration text; the message names the key and line."""


def default_workers() -> int:
    raw = os.environ.get(ENV_WORKERS, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class RunConfig:
    size: int = 32
    n1: int | None = None
    n2: int | None = None
    n3: int | None = None
    dx: float = 1.0
    gamma: float = 5.0 / 3.0
    courant: float = 0.9
    precision: str = "double"
    ic: str = "solenoidal_random"
    seed: int = 0
    amplitude: float | None = None
    b_amplitude: float | None = None
    width: float | None = None
    velocity: float | None = None
    profile: str | None = None
    workers: int = field(default_factory=default_workers)
    cycles: int | None = 10
    t_end: float | None = None
    out: str | None = None
    snapshot_every: int = 0

    def shape(self) -> GridShape:
        n1 = self.n1 if self.n1 is not None else self.size
        n2 = self.n2 if self.n2 is not None else self.size
        n3 = self.n3 if self.n3 is not None else self.size
        return GridShape(n1, n2, n3, dx=self.dx)

    def params(self) -> SchemeParams:
        return SchemeParams(gamma=self.gamma, courant=self.courant,
                            precision=self.precision)

    def ic_options(self) -> dict:
        opts = {}
        if self.ic == "solenoidal_random":
            opts["seed"] = self.seed
            if self.amplitude is not None:
                opts["fluid_amplitude"] = self.amplitude
            if self.b_amplitude is not None:
                opts["b_amplitude"] = self.b_amplitude
        elif self.ic == "advect_pulse":
            for key in ("amplitude", "width", "velocity", "profile"):
                v = getattr(self, key)
                if v is not None:
                    opts[key] = v
        return opts


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_INT_KEYS = {"size", "n1", "n2", "n3", "seed", "workers", "cycles", "snapshot_every"}
_FLOAT_KEYS = {"dx", "gamma", "courant", "amplitude", "b_amplitude", "width",
               "velocity", "t_end"}
_STR_KEYS = {"precision", "ic", "out", "profile"}


def parse_config(text: str) -> dict:
    """Parse key=value lines into typed values; every error names key and line."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(raw)
            elif key in _FLOAT_KEYS:
                values[key] = float(raw)
            else:
                values[key] = raw
        except ValueError:
            raise ConfigError(
                f"line {lineno}: invalid value for {key!r}: {raw!r}") from None
    return values


def load_config(path: str | None, overrides: dict) -> RunConfig:
    values: dict = {}
    if path is not None:
        values.update(parse_config(Path(path).read_text()))
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.ic not in KINDS:
        raise ConfigError(f"unknown initial condition kind {cfg.ic!r}")
    return cfg


# ---------------------------------------------------------------------------
# commands

def run_command(cfg: RunConfig, out=sys.stdout) -> int:
    params = cfg.params()
    state = init_condition(cfg.ic, cfg.shape(), params, **cfg.ic_options())
    n_cycles = cfg.cycles if cfg.t_end is None else None
    out.write("# cycle\tdt\ttime\twall_ms\n")

    remaining = n_cycles
    while True:
        if cfg.t_end is not None and state.time >= cfg.t_end:
            break
        if remaining is not None and remaining <= 0:
            break
        report = step_cycle(state, params, workers=cfg.workers)
        out.write(f"{state.cycle}\t{report.dt:.6g}\t{state.time:.6g}\t{report.wall_ms:.3f}\n")
        if remaining is not None:
            remaining -= 1
        if cfg.snapshot_every and cfg.out and state.cycle % cfg.snapshot_every == 0:
            write_snapshot(state, f"{cfg.out}.cycle{state.cycle}")
    if cfg.out:
        write_snapshot(state, cfg.out)
        out.write(f"# snapshot written to {cfg.out}\n")
    return 0


def _available_memory_bytes() -> int | None:
    try:
        with open("/proc/meminfo") as fh:
            for line in fh:
                if line.startswith("MemAvailable:"):
                    return int(line.split()[1]) * 1024
    except OSError:
        return None
    return None


def bench_command(sizes, repeats, workers, precision, machines_path=None,
                  out=sys.stdout) -> int:
    """Time step cycles per size and derive the comparison metrics.

    Repetition statistic: median and min over `repeats` timed cycles after two
    warm-ups; initialization and snapshot IO are excluded from the timings.
    """
    params = SchemeParams(precision=precision)
    width = 4 if precision == "single" else 8
    avail = _available_memory_bytes()
    measured: dict[int, float] = {}

    out.write("# size\tmedian_ms\tmin_ms\tworkers\n")
    for n in sizes:
        # state + solver temporaries; generous factor to stay safe
        need = n ** 3 * width * 60
        if avail is not None and need > avail:
            out.write(f"{n}\tskipped\tskipped\t{workers}\t# insufficient memory\n")
            continue
        shape = GridShape(n, n, n)
        state = init_condition("uniform", shape, params, v=(1.0, 0.0, 0.0))
        for _ in range(2):  # warm-up
            step_cycle(state, params, workers=workers)
        times = [step_cycle(state, params, workers=workers).wall_ms
                 for _ in range(repeats)]
        measured[n] = median(times)
        out.write(f"{n}\t{median(times):.3f}\t{min(times):.3f}\t{workers}\n")

    machines = perf.load_machines(machines_path)
    baseline = machines.get(perf.BASELINE_LABEL)
    out.write("#\n# machine\truntime_ms\tcode_speedup\tfractional_speedup"
              "\tflops_pct\tbandwidth_pct\n")
    for label, spec in machines.items():
        if spec.reference_runtime_ms_128 is None or spec.peak_gflops is None:
            continue
        rep = perf.criteria(spec.reference_runtime_ms_128, spec, baseline)
        out.write(f"{label}\t{spec.reference_runtime_ms_128:g}\t{rep.code_speedup:.1f}"
                  f"\t{rep.fractional_speedup:.2f}\t{rep.flops_fraction_pct:.1f}"
                  f"\t{rep.bandwidth_fraction_pct:.1f}\n")

    if 128 in measured:
        host = machines.get("host")
        if host is not None and host.peak_gflops and host.peak_gbps:
            rep = perf.criteria(measured[128], host, baseline)
            out.write(f"host\t{measured[128]:.1f}\t{rep.code_speedup:.1f}"
                      f"\t{rep.fractional_speedup:.2f}\t{rep.flops_fraction_pct:.1f}"
                      f"\t{rep.bandwidth_fraction_pct:.1f}\n")
        host_record = perf.MachineSpec(
            label="host",
            peak_gflops=host.peak_gflops if host else None,
            peak_gbps=host.peak_gbps if host else None,
            watts=host.watts if host else None,
            reference_runtime_ms_128=measured[128],
        )
        out.write("#\n# host record (machine-spec format):\n")
        for line in perf.format_machine(host_record).splitlines():
            out.write(line + "\n")
    return 0


def validate_command(full=False, out=sys.stdout) -> int:
    """Run the invariant checks; one machine-readable line per check."""
    out.write("# check\tvalue\tthreshold\tverdict\n")
    failures = 0
    for result in validation.default_checks(full=full):
        out.write(result.line() + "\n")
        failures += 0 if result.passed else 1
    if not full:
        out.write("scaling_ratio_128_64\tnan\tnan\tSKIPPED\trun with --full\n")
    out.write(f"# {failures} failure(s)\n")
    return 0


def slice_command(args, out=sys.stdout) -> int:
    if args.snapshot:
        state = read_snapshot(args.snapshot)
        gamma = args.gamma
    else:
        cfg = load_config(args.config, {"size": args.size, "ic": args.ic})
        state = init_condition(cfg.ic, cfg.shape(), cfg.params(), **cfg.ic_options())
        gamma = cfg.gamma
    slice_export(state, (args.axis, args.index), args.out, gamma=gamma)
    out.write(f"# slice written to {args.out}\n")
    return 0


# ---------------------------------------------------------------------------

def _parse_sizes(raw: str) -> list[int]:
    return [int(tok) for tok in raw.split(",") if tok]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="tvdmhd",
                                     description="relaxing-TVD MHD solver and benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="advance an initial condition")
    p_run.add_argument("--config", default=None)
    p_run.add_argument("--size", type=int, default=None)
    p_run.add_argument("--workers", type=int, default=None)
    p_run.add_argument("--cycles", type=int, default=None)
    p_run.add_argument("--t-end", dest="t_end", type=float, default=None)
    p_run.add_argument("--precision", choices=("single", "double"), default=None)
    p_run.add_argument("--ic", choices=KINDS, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None)

    p_bench = sub.add_parser("bench", help="time step cycles over a size ladder")
    p_bench.add_argument("--sizes", default="16,32,64,128")
    p_bench.add_argument("--repeats", type=int, default=5)
    p_bench.add_argument("--workers", type=int, default=None)
    p_bench.add_argument("--precision", choices=("single", "double"), default="single")
    p_bench.add_argument("--machines", default=None)
    p_bench.add_argument("--out", default=None,
                         help="also write the report to this file")

    p_val = sub.add_parser("validate", help="run the invariant checks")
    p_val.add_argument("--full", action="store_true",
                       help="include the timing-based scaling check")

    p_slice = sub.add_parser("slice", help="export one grid plane as TSV")
    p_slice.add_argument("--snapshot", default=None)
    p_slice.add_argument("--config", default=None)
    p_slice.add_argument("--size", type=int, default=None)
    p_slice.add_argument("--ic", choices=KINDS, default=None)
    p_slice.add_argument("--axis", choices=("x", "y", "z"), default="z")
    p_slice.add_argument("--index", type=int, default=0)
    p_slice.add_argument("--gamma", type=float, default=5.0 / 3.0)
    p_slice.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            overrides = {k: getattr(args, k) for k in
                         ("size", "workers", "cycles", "t_end", "precision",
                          "ic", "seed", "out")}
            if args.t_end is not None:
                overrides["cycles"] = None
            cfg = load_config(args.config, overrides)
            return run_command(cfg)
        if args.command == "bench":
            workers = args.workers if args.workers is not None else default_workers()
            if args.out:
                import io as _io
                buf = _io.StringIO()
                rc = bench_command(_parse_sizes(args.sizes), args.repeats, workers,
                                   args.precision, args.machines, out=buf)
                Path(args.out).write_text(buf.getvalue())
                sys.stdout.write(buf.getvalue())
                return rc
            return bench_command(_parse_sizes(args.sizes), args.repeats, workers,
                                 args.precision, args.machines)
        if args.command == "validate":
            return validate_command(full=args.full)
        if args.command == "slice":
            return slice_command(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

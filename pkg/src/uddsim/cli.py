"""Command-line front end: schedules, identity verification, simulations, sweeps.

Every subcommand emits a single-header CSV (stdout by default, or
``--output``), deterministic byte-for-byte for a fixed configuration.
``--figure PATH`` additionally renders a matplotlib figure of the same
data next to the delimited output.  Numeric fields use full round-trip
precision except ``schedule``, which prints 15 significant digits.

Exit codes: 0 on success, 1 when a scaling-threshold check fails,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from .algebra import (
    basis_state,
    bell_plus_state,
    polarization_from_state,
    singlet_state,
    up_up_state,
)
from .evolve import avg_distance, evolve_delta, evolve_gaussian
from .models import (
    CONTROL_KINDS,
    build_three_level_bath,
    build_two_qubit_spin_bath,
    control_operator,
    write_coefficient_log,
)
from .pulses import PulseShape, periodic_times, udd_times
from .verify import (
    NOISE_FLOOR,
    random_hermitian_pair,
    scaling_slope,
    yangliu_deviation,
)

SEED_ENV_VAR = "UDDSIM_SEED"
DEFAULT_SEED = 42

CONFIG_FIELDS = ("model", "control", "n", "t", "pulse", "c_ratio", "seed", "samples", "initial")


@dataclass(frozen=True)
class ExperimentConfig:
    """One fully pinned simulation run."""

    model: str = "two_qubit"
    control: str = "y1_product"
    n: int = 8
    t: float = 0.1
    pulse: str = "gaussian"
    c_ratio: float = 100.0
    seed: int = DEFAULT_SEED
    samples: int = 1000
    initial: str = "auto"

    def __post_init__(self):
        if self.model not in ("two_qubit", "three_level"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.control not in CONTROL_KINDS:
            raise ValueError(f"unknown control {self.control!r}")
        if self.pulse not in ("delta", "gaussian"):
            raise ValueError(f"unknown pulse shape {self.pulse!r}")
        if self.n < 0 or self.t <= 0 or self.c_ratio <= 0 or self.samples < 2:
            raise ValueError("n must be >= 0 and t, c_ratio positive, samples >= 2")


def _fmt(x) -> str:
    return repr(float(x))


def _load_config(path: str) -> dict[str, str]:
    """Flat key=value file; blank lines and # comments ignored."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in CONFIG_FIELDS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            out[key] = val
    return out


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV_VAR)
    return int(env) if env else DEFAULT_SEED


def _resolve_config(args) -> ExperimentConfig:
    """Defaults < config file < explicit flags."""
    file_vals = _load_config(args.config) if getattr(args, "config", None) else {}
    casts = {"n": int, "t": float, "c_ratio": float, "seed": int, "samples": int}
    merged = {}
    for name in CONFIG_FIELDS:
        cli_val = getattr(args, name, None)
        if cli_val is not None:
            merged[name] = cli_val
        elif name in file_vals:
            merged[name] = casts.get(name, str)(file_vals[name])
    merged.setdefault("seed", _default_seed())
    return ExperimentConfig(**merged)


def _build_model(cfg: ExperimentConfig):
    if cfg.model == "two_qubit":
        return build_two_qubit_spin_bath(cfg.seed)
    return build_three_level_bath(cfg.seed)


_TWO_QUBIT_PRESETS = {
    "up_up": up_up_state,
    "bell_plus": bell_plus_state,
    "singlet": singlet_state,
}


def _initial_system_state(cfg: ExperimentConfig, model) -> np.ndarray:
    name = cfg.initial
    if name == "auto":
        name = "up_up" if cfg.model == "two_qubit" else "level0"
    if name in _TWO_QUBIT_PRESETS:
        if model.system_dims != (2, 2):
            raise ValueError(f"initial state {name!r} needs a two-qubit system")
        return _TWO_QUBIT_PRESETS[name]()
    if name == "level0":
        return basis_state(model.system_dim, 0)
    # Otherwise: explicit comma-separated amplitudes, normalized here.
    try:
        amps = np.array([complex(s) for s in name.split(",")])
    except ValueError as exc:
        raise ValueError(f"cannot parse initial state {name!r}: {exc}") from exc
    if amps.size != model.system_dim:
        raise ValueError(f"initial state has {amps.size} amplitudes, system dim is {model.system_dim}")
    nrm = np.linalg.norm(amps)
    if nrm == 0:
        raise ValueError("initial state amplitudes are all zero")
    return amps / nrm


def _run_experiment(cfg: ExperimentConfig, keep_reduced: bool):
    """Build and run one configuration; returns (series, model, psi_sys)."""
    model = _build_model(cfg)
    psi_sys = _initial_system_state(cfg, model)
    p_measure = polarization_from_state(psi_sys)
    ctrl = control_operator(cfg.control, model.system_dims)
    n_pulses = 0 if ctrl is None else cfg.n
    schedule = udd_times(n_pulses, cfg.t)
    psi0 = np.kron(psi_sys, basis_state(model.bath_dim, 0))
    if cfg.pulse == "delta":
        series = evolve_delta(model, p_measure, schedule, psi0, cfg.samples,
                              control=ctrl, keep_reduced=keep_reduced)
    else:
        shape = PulseShape("gaussian", c=cfg.t / cfg.c_ratio)
        series = evolve_gaussian(model, p_measure, schedule, shape, psi0, cfg.samples,
                                 control=ctrl, keep_reduced=keep_reduced)
    return series, model, psi_sys


def _open_output(args):
    if getattr(args, "output", None):
        return open(args.output, "w", encoding="utf-8", newline="")
    return None


def _maybe_log_coefficients(args, model) -> None:
    path = getattr(args, "log_coefficients", None)
    if path:
        with open(path, "w", encoding="utf-8", newline="") as f:
            write_coefficient_log(model, f)


def cmd_schedule(args) -> int:
    if args.n < 0:
        raise ValueError("n must be >= 0")
    maker = udd_times if args.kind == "udd" else periodic_times
    if args.kind == "periodic" and args.n < 1:
        raise ValueError("periodic schedule needs n >= 1")
    sched = maker(args.n, args.t)
    sink = _open_output(args)
    out = sink or sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["j", "t_j"])
        for j, tj in enumerate(sched.times, 1):
            w.writerow([j, f"{tj:.15g}"])
    finally:
        if sink:
            sink.close()
    return 0


def cmd_verify(args) -> int:
    if args.points < 4:
        raise ValueError("need at least 4 grid points")
    if args.seeds < 1:
        raise ValueError("need at least 1 seed")
    if not (0 < args.t_min < args.t_max):
        raise ValueError("need 0 < t-min < t-max")
    t_grid = np.geomspace(args.t_min, args.t_max, args.points)
    threshold = args.n + 0.7

    rows = []        # (seed, T, deviation) for the figure
    slope_rows = []  # (seed, slope_str, passed)
    for seed in range(args.seeds):
        if args.commuting_smoke:
            c, z = _commuting_pair(args.dim, seed)
        else:
            c, z = random_hermitian_pair(args.dim, seed)
        devs = [yangliu_deviation(c, z, args.n, float(t)) for t in t_grid]
        for t, d in zip(t_grid, devs):
            rows.append((seed, float(t), float(d)))
        if max(devs) <= NOISE_FLOOR:
            slope_rows.append((seed, "exact", True))
            continue
        dev_by_t = dict(zip((float(t) for t in t_grid), devs))
        try:
            fit = scaling_slope(lambda t: dev_by_t[float(t)], t_grid)
        except ValueError:
            slope_rows.append((seed, "unfittable", False))
            continue
        slope_rows.append((seed, _fmt(fit.slope), fit.slope >= threshold))

    sink = _open_output(args)
    out = sink or sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["record", "seed", "t", "value"])
        for seed in range(args.seeds):
            for s, t, d in rows:
                if s == seed:
                    w.writerow(["deviation", s, _fmt(t), _fmt(d)])
            _, slope_str, _ = slope_rows[seed]
            w.writerow(["slope", seed, "", slope_str])
        all_pass = all(ok for _, _, ok in slope_rows)
        fitted = [float(s) for _, s, _ in slope_rows if s not in ("exact", "unfittable")]
        min_slope = min(fitted) if fitted else float("nan")
        out.write(
            f"# n={args.n} seeds={args.seeds} threshold={threshold:g} "
            f"min_slope={min_slope:g} result={'PASS' if all_pass else 'FAIL'}\n"
        )
    finally:
        if sink:
            sink.close()
    if args.figure:
        from .plots import save_deviation_figure
        save_deviation_figure(rows, args.figure, threshold=threshold,
                              title=f"deviation vs T (n={args.n})")
    return 0 if all_pass else 1


def _commuting_pair(dim: int, seed: int):
    """Diagonal (hence commuting) pair for the smoke path, unit spectral norm."""
    from .rng import SplitMix64

    rng = SplitMix64(seed)

    def one():
        d = np.array([2.0 * rng.next_float() - 1.0 for _ in range(dim)])
        return np.diag(d / np.max(np.abs(d))).astype(np.complex128)

    return one(), one()


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    series, model, psi_sys = _run_experiment(cfg, keep_reduced=args.with_distance)
    _maybe_log_coefficients(args, model)

    d_col = None
    if args.with_distance:
        rho_ref = np.outer(psi_sys, psi_sys.conj())
        d_col = np.array([
            0.5 * np.abs(np.linalg.eigvalsh(r - rho_ref)).sum()
            for r in series.reduced_states
        ])

    sink = _open_output(args)
    out = sink or sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", "F"] + (["D_integrand"] if d_col is not None else []))
        for i, (t, f) in enumerate(zip(series.times, series.f_values)):
            row = [_fmt(t), _fmt(f)]
            if d_col is not None:
                row.append(_fmt(d_col[i]))
            w.writerow(row)
    finally:
        if sink:
            sink.close()
    if args.figure:
        from .plots import save_coherence_figure
        save_coherence_figure(
            series.times, series.f_values, args.figure,
            title=f"{cfg.model} {cfg.control} n={cfg.n} {cfg.pulse}",
            d_integrand=d_col,
        )
    return 0


def cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    raw_values = [v for v in args.values.split(",") if v.strip()]
    if not raw_values:
        raise ValueError("empty sweep value list")
    if args.param == "n":
        values = [int(v) for v in raw_values]
    else:
        values = [float(v) for v in raw_values]
    if args.param == "c_ratio" and cfg.pulse != "gaussian":
        raise ValueError("sweeping c_ratio requires gaussian pulses")

    metric_label = "D_bar" if args.metric == "d_bar" else "final_F"
    results = []
    model_for_log = None
    for value in values:
        run_cfg = replace(cfg, **{_SWEEP_FIELD[args.param]: value})
        series, model, psi_sys = _run_experiment(run_cfg, keep_reduced=args.metric == "d_bar")
        model_for_log = model
        if args.metric == "d_bar":
            rho_ref = np.outer(psi_sys, psi_sys.conj())
            metric = avg_distance(series, rho_ref, run_cfg.t)
        else:
            metric = float(series.f_values[-1])
        results.append((value, metric))
    results.sort(key=lambda r: r[0])
    if model_for_log is not None:
        _maybe_log_coefficients(args, model_for_log)

    sink = _open_output(args)
    out = sink or sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["value", metric_label])
        for value, metric in results:
            w.writerow([_fmt(value) if args.param != "n" else value, _fmt(metric)])
    finally:
        if sink:
            sink.close()
    if args.figure:
        from .plots import save_sweep_figure
        save_sweep_figure([r[0] for r in results], [r[1] for r in results], args.figure,
                          xlabel=args.param, ylabel=metric_label,
                          title=f"{cfg.model} {cfg.control} sweep {args.param}")
    return 0


_SWEEP_FIELD = {"n": "n", "c_ratio": "c_ratio", "total_time": "t"}


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--model", choices=["two_qubit", "three_level"])
    p.add_argument("--control", choices=list(CONTROL_KINDS))
    p.add_argument("--n", type=int, help="pulse count (default 8)")
    p.add_argument("--t", type=float, help="total time (default 0.1)")
    p.add_argument("--pulse", choices=["delta", "gaussian"])
    p.add_argument("--c-ratio", type=float, dest="c_ratio",
                   help="gaussian width divisor c = t / c_ratio (default 100)")
    p.add_argument("--seed", type=int, help=f"model seed (default {DEFAULT_SEED}, env {SEED_ENV_VAR})")
    p.add_argument("--samples", type=int, help="sample grid size (default 1000)")
    p.add_argument("--initial",
                   help="up_up | bell_plus | singlet | level0 | comma-separated amplitudes")
    p.add_argument("--log-coefficients", metavar="PATH",
                   help="also dump the model coefficient log CSV to PATH")
    p.add_argument("--output", "-o", metavar="PATH", help="write CSV here instead of stdout")
    p.add_argument("--figure", metavar="PATH", help="render a figure of the output to PATH")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uddsim",
        description="Pulse-sequence decoherence suppression simulator and verifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sched = sub.add_parser("schedule", help="emit pulse times as CSV")
    p_sched.add_argument("--n", type=int, required=True)
    p_sched.add_argument("--t", type=float, required=True)
    p_sched.add_argument("--kind", choices=["udd", "periodic"], default="udd")
    p_sched.add_argument("--output", "-o", metavar="PATH")
    p_sched.set_defaults(func=cmd_schedule)

    p_ver = sub.add_parser("verify", help="brute-force scaling-identity check")
    p_ver.add_argument("--dim", type=int, default=4)
    p_ver.add_argument("--n", type=int, required=True)
    p_ver.add_argument("--seeds", type=int, default=10)
    p_ver.add_argument("--t-min", type=float, default=0.0125, dest="t_min")
    p_ver.add_argument("--t-max", type=float, default=0.2, dest="t_max")
    p_ver.add_argument("--points", type=int, default=5)
    p_ver.add_argument("--commuting-smoke", action="store_true",
                       help="use a commuting (C, Z) pair; deviations must vanish")
    p_ver.add_argument("--output", "-o", metavar="PATH")
    p_ver.add_argument("--figure", metavar="PATH")
    p_ver.set_defaults(func=cmd_verify)

    p_sim = sub.add_parser("simulate", help="run one configuration, emit t,F CSV")
    _add_experiment_flags(p_sim)
    p_sim.add_argument("--with-distance", action="store_true",
                       help="add a D_integrand column (trace distance to the initial state)")
    p_sim.set_defaults(func=cmd_simulate)

    p_swp = sub.add_parser("sweep", help="sweep one parameter, emit value,metric CSV")
    _add_experiment_flags(p_swp)
    p_swp.add_argument("--param", choices=["n", "c_ratio", "total_time"], required=True)
    p_swp.add_argument("--values", required=True, help="comma-separated values")
    p_swp.add_argument("--metric", choices=["d_bar", "final_f"], default="d_bar")
    p_swp.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

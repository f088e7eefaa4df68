"""Command-line front end.

    dwentangle meanfield | evolve | sweep | peaks | oracle-compare [options]

Options may also come from a flat ``key = value`` file given with
``--config``; command-line flags win over file values.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import entanglement, fock, meanfield
from .dynamics import expectation_sz, initial_state_LR
from .model import ModelParams
from .numerics import IntegrationError, NonHermitianError
from .output import write_csv

log = logging.getLogger(__name__)

COMMANDS = ("meanfield", "evolve", "sweep", "peaks", "oracle-compare")
EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    count: int

    def __str__(self):
        return f"{self.lo:g}:{self.hi:g}:{self.count}"

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


def parse_grid(token: str, name: str) -> Grid:
    parts = token.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{name}: expected min:max:count, got {token!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError:
        raise ConfigError(f"{name}: malformed number in {token!r}") from None
    if count < 2:
        raise ConfigError(f"{name}: grid needs at least 2 points, got {token!r}")
    if not hi > lo:
        raise ConfigError(f"{name}: max must exceed min in {token!r}")
    return Grid(lo, hi, count)


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: ModelParams
    omega_grid: Grid | None = None
    time_grid: Grid | None = None
    n_a: int = 3
    n_b: int = 3
    dt: float = meanfield.DEFAULT_DT
    t_end: float = 20.0
    eps: float = meanfield.DEFAULT_IMBALANCE_EPS
    every: int = 100
    n_peaks: int = 3
    t_max: float | None = None
    workers: int = 1
    output: str = "-"
    pod_output: str | None = None

    def metadata(self) -> dict:
        meta = {"command": self.command, "omega": self.params.omega, "kappa": self.params.kappa,
                "kappa_a": self.params.kappa_a, "kappa_b": self.params.kappa_b}
        if self.command == "sweep":
            meta["omega"] = str(self.omega_grid)
        if self.time_grid is not None:
            meta["time"] = str(self.time_grid)
        if self.command in ("meanfield", "oracle-compare"):
            meta.update(n_a=self.n_a, n_b=self.n_b)
        if self.command == "meanfield":
            meta.update(dt=self.dt, t_end=self.t_end, eps=self.eps, every=self.every)
        if self.command == "peaks":
            meta.update(n_peaks=self.n_peaks, t_max=self.t_max)
        return meta


# option name -> (converter, default); None default means "command dependent"
OPTIONS = {
    "omega": (str, None),
    "kappa": (float, 20.0),
    "kappa_a": (float, 20.0),
    "kappa_b": (float, 20.0),
    "time": (str, None),
    "n_a": (int, None),
    "n_b": (int, None),
    "dt": (float, meanfield.DEFAULT_DT),
    "t_end": (float, 20.0),
    "eps": (float, meanfield.DEFAULT_IMBALANCE_EPS),
    "every": (int, 100),
    "n_peaks": (int, 3),
    "t_max": (float, None),
    "workers": (int, 1),
    "output": (str, "-"),
    "pod_output": (str, None),
}

COMMAND_DEFAULTS = {
    "meanfield": {"omega": "1.0", "n_a": 3, "n_b": 3},
    "evolve": {"omega": "1.0", "time": "0:200:2001"},
    "sweep": {"omega": "0.5:2.0:61", "time": "0:200:2001"},
    "peaks": {"omega": "1.0"},
    "oracle-compare": {"omega": "1.0", "time": "0:500:5001", "n_a": 1, "n_b": 1},
}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        norm = key.replace("-", "_")
        if norm not in OPTIONS and norm != "command":
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        values[norm] = value
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dwentangle", description="Two-component double-well condensate simulations.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}")
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        p.add_argument("--config", help="key = value file; flags override it")
        p.add_argument("--omega", help="tunneling rate (sweep: min:max:count)")
        p.add_argument("--kappa")
        p.add_argument("--kappa-a")
        p.add_argument("--kappa-b")
        p.add_argument("-o", "--output", help="CSV path, '-' for stdout")
        if cmd in ("evolve", "sweep", "oracle-compare"):
            p.add_argument("--time", help="time grid min:max:count")
        if cmd in ("meanfield", "oracle-compare"):
            p.add_argument("--n-a", help="particle number of component A")
            p.add_argument("--n-b", help="particle number of component B")
        if cmd == "meanfield":
            p.add_argument("--dt")
            p.add_argument("--t-end")
            p.add_argument("--eps", help="initial imbalance offset from full imbalance")
            p.add_argument("--every", help="record every n-th step")
        if cmd == "sweep":
            p.add_argument("--workers", help="parallel worker processes")
        if cmd == "peaks":
            p.add_argument("--n-peaks")
            p.add_argument("--t-max")
        if cmd == "oracle-compare":
            p.add_argument("--pod-output", help="also write the Fock POD trace (t, pod_A, pod_B)")
    return parser


def _convert(key: str, raw):
    conv = OPTIONS[key][0]
    if raw is None or conv is str:
        return raw
    try:
        return conv(raw)
    except ValueError:
        raise ConfigError(f"--{key.replace('_', '-')}: malformed number {raw!r}") from None


def parse_config(argv: list[str], file_text: str | None = None) -> RunConfig:
    """Resolve defaults, then config-file values, then command-line flags."""
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise ConfigError("missing command")
    cmd = ns.command
    if file_text is None and getattr(ns, "config", None):
        try:
            with open(ns.config) as fh:
                file_text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {ns.config!r}: {exc.strerror}") from None
    merged = {k: d for k, (_, d) in OPTIONS.items()}
    merged.update(COMMAND_DEFAULTS[cmd])
    if file_text:
        file_vals = parse_config_text(file_text)
        if file_vals.pop("command", cmd) != cmd:
            raise ConfigError("config file command does not match command line")
        merged.update(file_vals)
    for key in OPTIONS:
        val = getattr(ns, key, None)
        if val is not None:
            merged[key] = val
    v = {k: _convert(k, raw) for k, raw in merged.items()}

    omega_grid = None
    if cmd == "sweep":
        omega_grid = parse_grid(v["omega"], "--omega")
        if omega_grid.lo <= 0:
            raise ConfigError(f"--omega: sweep needs omega_min > 0, got {v['omega']!r}")
        omega = omega_grid.lo
    else:
        omega = _float(v["omega"], "--omega")
        if cmd == "peaks" and omega <= 0:
            raise ConfigError(f"--omega: peaks needs omega > 0, got {v['omega']!r}")
    try:
        params = ModelParams(omega, v["kappa"], v["kappa_a"], v["kappa_b"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    time_grid = None
    if cmd in ("evolve", "sweep", "oracle-compare"):
        time_grid = parse_grid(v["time"], "--time")

    kw = {k: v[k] for k in ("n_a", "n_b", "dt", "t_end", "eps", "every", "n_peaks", "t_max",
                            "workers", "pod_output") if v[k] is not None}
    if kw.get("n_a", 1) < 1 or kw.get("n_b", 1) < 1:
        raise ConfigError("particle numbers must be >= 1")
    if kw.get("workers", 1) < 1:
        raise ConfigError("--workers must be >= 1")
    return RunConfig(cmd, params, omega_grid, time_grid, output=v["output"], **kw)


def _float(token: str, name: str) -> float:
    try:
        return float(token)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: malformed number {token!r}") from None


# -- commands ----------------------------------------------------------------

def _run_meanfield(cfg: RunConfig) -> tuple[int, str]:
    p = meanfield.MeanFieldParams(cfg.params, cfg.n_a, cfg.n_b)
    s0 = meanfield.default_initial_state(p, cfg.eps)
    traj = meanfield.integrate(p, s0, cfg.t_end, cfg.dt, record_every=cfg.every)
    drift = traj.relative_drift
    rows = zip(traj.t, traj.n_a, traj.n_b, traj.theta_a, traj.theta_b, traj.energy, drift)
    n = write_csv(cfg.output, cfg.metadata(),
                  ["t", "n_A", "n_B", "theta_A", "theta_B", "energy", "energy_drift"], rows)
    period = meanfield.oscillation_period(traj.t, traj.n_a)
    return n, f"max relative energy drift {drift.max():.3e}; POD period {period:.6g}"


def _run_evolve(cfg: RunConfig) -> tuple[int, str]:
    t = cfg.time_grid.values()
    prop = entanglement.effective_propagator(cfg.params)
    psi = prop.evolve(initial_state_LR(), t)
    c = entanglement.concurrence_pure(psi)
    prob = np.abs(psi) ** 2
    rows = (([t[i], c[i]] + list(prob[i])) for i in range(len(t)))
    n = write_csv(cfg.output, cfg.metadata(), ["t", "concurrence", "p_LL", "p_LR", "p_RL", "p_RR"], rows)
    t1, c1 = entanglement.first_maximum(t, c)
    return n, f"first concurrence maximum {c1:.6f} at t={t1:.6g}"


def _sweep_row(params: ModelParams, omega: float, t: np.ndarray) -> np.ndarray:
    return entanglement.concurrence_trace(ModelParams(omega, params.kappa, params.kappa_a, params.kappa_b), t)


def sweep_grid(params: ModelParams, omegas: np.ndarray, t: np.ndarray, workers: int = 1) -> np.ndarray:
    """C(omega, t), rows in ``omegas`` order regardless of worker count."""
    out = np.empty((len(omegas), len(t)))
    if workers == 1:
        for i, w in enumerate(omegas):
            out[i] = _sweep_row(params, float(w), t)
        return out
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_sweep_row, params, float(w), t) for w in omegas]
        for i, fut in enumerate(futures):
            out[i] = fut.result()
    return out


def _run_sweep(cfg: RunConfig) -> tuple[int, str]:
    omegas, t = cfg.omega_grid.values(), cfg.time_grid.values()
    grid = sweep_grid(cfg.params, omegas, t, cfg.workers)
    rows = ((omegas[i], t[j], grid[i, j]) for i in range(len(omegas)) for j in range(len(t)))
    n = write_csv(cfg.output, cfg.metadata(), ["omega", "t", "concurrence"], rows)
    return n, f"{len(omegas)}x{len(t)} grid, max concurrence {grid.max():.6f}"


def _run_peaks(cfg: RunConfig) -> tuple[int, str]:
    p = cfg.params
    t_max = cfg.t_max
    if t_max is None:
        t_max = 2 * p.kappa / p.omega**2 * (math.pi / 4 + cfg.n_peaks * math.pi / 2) if p.kappa > 0 else 200.0
        cfg = replace(cfg, t_max=t_max)
    reports = entanglement.find_peaks(p, t_max, cfg.n_peaks)
    rows = ((r.k_index, r.t_peak_formula, r.t_peak_numeric, r.c_peak, r.tau_half_width) for r in reports)
    n = write_csv(cfg.output, cfg.metadata(), ["k", "t_formula", "t_numeric", "c_peak", "tau"], rows)
    tau = f"tau(k=0) {reports[0].tau_half_width:.6g}" if reports else "no peaks (weak entanglement)"
    return n, f"{len(reports)} peaks; {tau}"


def _run_oracle(cfg: RunConfig) -> tuple[int, str]:
    t = cfg.time_grid.values()
    trace = fock.oracle_evolve_pod(cfg.params, cfg.n_a, cfg.n_b, t)
    psi = entanglement.effective_propagator(cfg.params).evolve(initial_state_LR(), t)
    pod_eff = 2 * expectation_sz(psi, "A")
    diff = np.abs(trace.pod_a - pod_eff)
    n = write_csv(cfg.output, cfg.metadata(), ["t", "pod_A_fock", "pod_A_effective", "abs_diff"],
                  zip(t, trace.pod_a, pod_eff, diff))
    if cfg.pod_output:
        write_csv(cfg.pod_output, cfg.metadata(), ["t", "pod_A", "pod_B"], zip(t, trace.pod_a, trace.pod_b))
    mean, var = fock.diagonal_ensemble_pod(cfg.params, cfg.n_a, cfg.n_b)
    worst = diff.max()
    dev = "max trace deviation < 1e-9" if worst < 1e-9 else f"max trace deviation {worst:.3e}"
    return n, f"{dev}; long-time pod_A mean {mean:.6g}, variance {var:.6g}"


RUNNERS = {
    "meanfield": _run_meanfield,
    "evolve": _run_evolve,
    "sweep": _run_sweep,
    "peaks": _run_peaks,
    "oracle-compare": _run_oracle,
}


def run(cfg: RunConfig) -> int:
    start = time.perf_counter()
    try:
        rows, summary = RUNNERS[cfg.command](cfg)
    except OSError as exc:
        print(f"error: cannot write {exc.filename or cfg.output!r}: {exc.strerror}", file=sys.stderr)
        return EXIT_NUMERIC
    except (IntegrationError, NonHermitianError, ValueError, ArithmeticError) as exc:
        print(f"numerical failure in {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    elapsed = time.perf_counter() - start
    stream = sys.stderr if cfg.output == "-" else sys.stdout
    print(f"{cfg.command}: wrote {rows} rows to {cfg.output} in {elapsed:.2f}s; {summary}", file=stream)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if "-v" in argv or "--verbose" in argv else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

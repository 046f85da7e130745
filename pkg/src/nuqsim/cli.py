"""Experiment orchestration and the ``simulate`` command line.

Runs the repeated-measurement protocol: a configured algorithm produces
survival-probability estimates on the reporting grid, n_runs independent
sampled trials are aggregated into a per-time median and median absolute
deviation, and the exact-oracle curve is attached for comparison.  Output
is CSV or JSON with enough provenance (config echo + seed) to reproduce a
run byte for byte.
"""
from __future__ import annotations

import dataclasses
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field

import click
import numpy as np

from . import oracle, qas, trotter
from .model import (
    CouplingSchedule,
    NeutrinoModel,
    build_model,
    initial_flavor_state,
)
from .statevector import Statevector, marginal_probability, sample_counts

__all__ = [
    "RunConfig",
    "TrajectoryRow",
    "TrajectoryRecord",
    "run_experiment",
    "emit",
    "read_record",
    "load_config_file",
    "main",
]

ALGORITHMS = ("trotter", "cartan", "qas", "exact")
CSV_HEADER = "t,p_median,p_mad,p_exact,algorithm,qubit"


@dataclass
class RunConfig:
    """One experiment; every field can come from file, env, or flag."""

    n_neutrinos: int = 2
    theta: float | None = None
    mu_kind: str = "constant"
    mu0: float | None = None
    r_nu: float | None = None
    mu_table: tuple[tuple[float, float], ...] = field(default=())
    t_start: float = 210.64
    t_end: float | None = None
    report_dt: float = 0.2
    algorithm: str = "trotter"
    shots: int = 1024  # 0 means analytic probabilities, no sampling
    n_runs: int = 50
    rng_seed: int = 0
    track_all_qubits: bool = False
    dt_classical: float | None = None  # hybrid integrator step, default dt/20
    oracle_dt_inner: float | None = None
    dense_cap: int = 12
    out_path: str | None = None
    out_format: str = "csv"

    def validate(self) -> None:
        if self.n_neutrinos < 2:
            raise ValueError("n must be at least 2")
        if self.theta is None:
            raise ValueError("theta is required (no physical default exists)")
        if not 0 <= self.theta < math.pi / 2:
            raise ValueError("theta must lie in [0, pi/2)")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.resolved_t_end() <= self.t_start:
            raise ValueError("t_end must exceed t_start")
        if self.report_dt <= 0:
            raise ValueError("dt must be positive")
        if self.shots < 0:
            raise ValueError("shots must be >= 0 (0 = analytic)")
        if self.n_runs < 1:
            raise ValueError("runs must be >= 1")
        if self.out_format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        self.schedule()  # validates the coupling parameters

    def resolved_t_end(self) -> float:
        if self.t_end is not None:
            return self.t_end
        # circuit algorithms on four neutrinos stop at 270 by convention
        if self.n_neutrinos == 4 and self.algorithm in ("trotter", "cartan"):
            return 270.0
        raise ValueError("t_end is required for this configuration")

    def schedule(self) -> CouplingSchedule:
        if self.mu_kind == "constant":
            if self.mu0 is None:
                raise ValueError("constant schedule needs mu0")
            return CouplingSchedule.constant(self.mu0)
        if self.mu_kind == "profile":
            if self.mu0 is None or self.r_nu is None:
                raise ValueError("profile schedule needs mu0 and rnu")
            return CouplingSchedule.supernova_profile(self.mu0, self.r_nu)
        if self.mu_kind == "table":
            if not self.mu_table:
                raise ValueError("table schedule needs mu_table samples")
            times = [t for t, _ in self.mu_table]
            values = [v for _, v in self.mu_table]
            return CouplingSchedule.tabulated(times, values)
        raise ValueError(f"unknown mu kind {self.mu_kind!r}")

    def model(self) -> NeutrinoModel:
        return NeutrinoModel(self.n_neutrinos, self.theta, self.schedule())


@dataclass(frozen=True)
class TrajectoryRow:
    """One reporting point for one tracked qubit; mirrors the CSV schema."""

    t: float
    p_median: float
    p_mad: float
    p_exact: float  # nan when the oracle is unavailable
    algorithm: str
    qubit: int

    def __post_init__(self) -> None:
        for p in (self.p_median, self.p_exact):
            if not math.isnan(p) and not -1e-9 <= p <= 1 + 1e-9:
                raise ValueError(f"probability {p} outside [0, 1]")
        if not math.isnan(self.p_mad) and self.p_mad < 0:
            raise ValueError("spread must be nonnegative")


@dataclass(frozen=True)
class TrajectoryRecord:
    rows: tuple[TrajectoryRow, ...]
    config: RunConfig | None = None

    def times(self) -> list[float]:
        seen: list[float] = []
        for r in self.rows:
            if not seen or r.t > seen[-1]:
                seen.append(r.t)
        return seen


def _median_mad(samples: np.ndarray, axis: int | None = None) -> tuple:
    """Median and median absolute deviation (the protocol's error bar)."""
    med = np.median(samples, axis=axis)
    mad = np.median(np.abs(samples - med), axis=axis)
    return med, mad


def _count_marginal(counts: dict[str, int], qubit: int, outcome: int) -> float:
    total = sum(counts.values())
    hit = sum(c for bits, c in counts.items() if int(bits[qubit]) == outcome)
    return hit / total


def _report_times(cfg: RunConfig) -> np.ndarray:
    steps = int(math.floor((cfg.resolved_t_end() - cfg.t_start) / cfg.report_dt + 1e-9))
    return cfg.t_start + cfg.report_dt * np.arange(steps + 1)


def _oracle_probabilities(
    cfg: RunConfig, qubits: list[int]
) -> dict[int, np.ndarray] | None:
    if cfg.n_neutrinos > cfg.dense_cap:
        warnings.warn(
            f"oracle skipped: {cfg.n_neutrinos} qubits exceed the dense cap "
            f"{cfg.dense_cap}; exact column will hold nan",
            stacklevel=2,
        )
        return None
    config = oracle.OracleConfig(
        dt_inner=cfg.oracle_dt_inner, dense_cap=cfg.dense_cap
    )
    states = oracle.evolve_exact(
        cfg.model(),
        None,
        initial_flavor_state(cfg.n_neutrinos, "e" * cfg.n_neutrinos),
        cfg.t_start,
        cfg.resolved_t_end(),
        cfg.report_dt,
        config,
    )
    return {
        q: np.array([marginal_probability(s, q, 0) for s in states]) for q in qubits
    }


def _sampled_statistics(
    states: list[Statevector], cfg: RunConfig, qubits: list[int]
) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Median/MAD of the shot-sampled survival estimator per grid point."""
    n_pts = len(states)
    estimates = {q: np.empty((cfg.n_runs, n_pts)) for q in qubits}
    for run in range(cfg.n_runs):
        gen = np.random.default_rng(cfg.rng_seed + run)
        for k, state in enumerate(states):
            counts = sample_counts(state, cfg.shots, gen)
            for q in qubits:
                estimates[q][run, k] = _count_marginal(counts, q, 0)
    return {q: _median_mad(estimates[q], axis=0) for q in qubits}


def _qas_survivals(cfg: RunConfig, run_seed: int, qubits: list[int]) -> dict[int, np.ndarray]:
    split = build_model(cfg.n_neutrinos, cfg.theta)
    psi0 = initial_flavor_state(cfg.n_neutrinos, "e" * cfg.n_neutrinos)
    basis = qas.build_basis(split, psi0, moment_order=1, reduce=True)
    if cfg.shots == 0:
        overlaps = qas.estimate_overlaps(basis, split, backend="exact")
    else:
        overlaps = qas.estimate_overlaps(
            basis, split, backend="hadamard", shots=cfg.shots, rng_seed=run_seed
        )
    dt_req = cfg.dt_classical if cfg.dt_classical is not None else cfg.report_dt / 20
    substeps = max(1, round(cfg.report_dt / dt_req))
    c0 = np.zeros(len(basis), dtype=complex)
    c0[0] = 1.0
    # propagate to the last whole reporting point so records align with the grid
    trajectory = qas.propagate_coefficients(
        overlaps,
        cfg.schedule(),
        c0,
        cfg.t_start,
        float(_report_times(cfg)[-1]),
        cfg.report_dt / substeps,
        record_every=substeps,
    )
    # sampled overlap matrices blur the reconstruction norm at the
    # 1/sqrt(shots) scale; the guard then only needs to catch divergence
    norm_tol = 1e-3 if cfg.shots == 0 else 0.5
    return {
        q: np.array(
            [
                qas.survival_probability(basis, c, q, 0, norm_tol=norm_tol)
                for c in trajectory.coeffs
            ]
        )
        for q in qubits
    }


def run_experiment(cfg: RunConfig) -> TrajectoryRecord:
    """Execute the configured protocol and aggregate the statistics.

    Sampled algorithms run n_runs independent trials with seeds
    rng_seed + run_index; analytic mode (shots=0) needs no repetition and
    reports zero spread.  The hybrid algorithm estimates its overlap
    matrices before the first step of each trial and never afterwards.
    """
    cfg.validate()
    qubits = list(range(cfg.n_neutrinos)) if cfg.track_all_qubits else [0]
    times = _report_times(cfg)
    n_pts = len(times)

    p_exact = _oracle_probabilities(cfg, qubits)

    per_qubit: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    if cfg.algorithm == "exact":
        if p_exact is None:
            raise ValueError("algorithm=exact needs a register within the dense cap")
        per_qubit = {q: (p_exact[q], np.zeros(n_pts)) for q in qubits}
    elif cfg.algorithm in ("trotter", "cartan"):
        plan = trotter.TrotterPlan(
            variant="brute_force" if cfg.algorithm == "trotter" else "cartan",
            dt=cfg.report_dt,
        )
        states = trotter.evolve(
            cfg.model(),
            plan,
            initial_flavor_state(cfg.n_neutrinos, "e" * cfg.n_neutrinos),
            cfg.t_start,
            cfg.resolved_t_end(),
        )
        if cfg.shots == 0:
            per_qubit = {
                q: (
                    np.array([marginal_probability(s, q, 0) for s in states]),
                    np.zeros(n_pts),
                )
                for q in qubits
            }
        else:
            per_qubit = _sampled_statistics(states, cfg, qubits)
    else:  # qas
        if cfg.shots == 0:
            survivals = _qas_survivals(cfg, cfg.rng_seed, qubits)
            per_qubit = {q: (survivals[q], np.zeros(n_pts)) for q in qubits}
        else:
            trials = {q: np.empty((cfg.n_runs, n_pts)) for q in qubits}
            for run in range(cfg.n_runs):
                survivals = _qas_survivals(cfg, cfg.rng_seed + run, qubits)
                for q in qubits:
                    trials[q][run] = survivals[q]
            per_qubit = {q: _median_mad(trials[q], axis=0) for q in qubits}

    rows = []
    for k, t in enumerate(times):
        for q in qubits:
            med, mad = per_qubit[q]
            exact = p_exact[q][k] if p_exact is not None else math.nan
            rows.append(
                TrajectoryRow(
                    t=float(t),
                    p_median=float(med[k]),
                    p_mad=float(mad[k]),
                    p_exact=float(exact),
                    algorithm=cfg.algorithm,
                    qubit=q,
                )
            )
    return TrajectoryRecord(tuple(rows), cfg)


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def emit(record: TrajectoryRecord, fmt: str, stream: io.TextIOBase) -> None:
    """Write a record as CSV (fixed header, 12 significant digits) or JSON.

    Identical records produce identical bytes, so runs can be diffed and
    re-emission after a round-trip read is exact.
    """
    if fmt == "csv":
        stream.write(CSV_HEADER + "\n")
        for r in record.rows:
            stream.write(
                f"{_fmt(r.t)},{_fmt(r.p_median)},{_fmt(r.p_mad)},"
                f"{_fmt(r.p_exact)},{r.algorithm},{r.qubit}\n"
            )
    elif fmt == "json":
        payload = {
            "config": dataclasses.asdict(record.config) if record.config else None,
            "seed": record.config.rng_seed if record.config else None,
            "rows": [dataclasses.asdict(r) for r in record.rows],
        }
        json.dump(payload, stream, indent=2, sort_keys=True)
        stream.write("\n")
    else:
        raise ValueError("format must be csv or json")


def emit_to_path(record: TrajectoryRecord, fmt: str, path: str | None) -> None:
    if path is None:
        emit(record, fmt, sys.stdout)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            emit(record, fmt, fh)


def read_record(path: str) -> TrajectoryRecord:
    """Re-ingest an emitted CSV file."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            t, med, mad, exact, algorithm, qubit = line.split(",")
            rows.append(
                TrajectoryRow(
                    t=float(t),
                    p_median=float(med),
                    p_mad=float(mad),
                    p_exact=float(exact),
                    algorithm=algorithm,
                    qubit=int(qubit),
                )
            )
    return TrajectoryRecord(tuple(rows))


def _parse_mu_table(text: str) -> tuple[tuple[float, float], ...]:
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        t, _, v = chunk.partition(":")
        pairs.append((float(t), float(v)))
    if not pairs:
        raise ValueError("empty mu table")
    return tuple(pairs)


_CONFIG_PARSERS = {
    "n_neutrinos": int,
    "theta": float,
    "mu_kind": str,
    "mu0": float,
    "r_nu": float,
    "mu_table": _parse_mu_table,
    "t_start": float,
    "t_end": float,
    "report_dt": float,
    "algorithm": str,
    "shots": int,
    "n_runs": int,
    "rng_seed": int,
    "track_all_qubits": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "dt_classical": float,
    "oracle_dt_inner": float,
    "dense_cap": int,
    "out_path": str,
    "out_format": str,
}

# accepted aliases so the config file can use the same short names as the flags
_CONFIG_ALIASES = {
    "n": "n_neutrinos",
    "rnu": "r_nu",
    "dt": "report_dt",
    "runs": "n_runs",
    "seed": "rng_seed",
    "out": "out_path",
    "format": "out_format",
}


def load_config_file(path: str) -> dict:
    """Parse a flat ``key = value`` file ('#' starts a comment)."""
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            key = _CONFIG_ALIASES.get(key, key)
            if key not in _CONFIG_PARSERS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _CONFIG_PARSERS[key](value.strip())
    return values


@click.command(
    name="simulate",
    context_settings={"auto_envvar_prefix": "NUQSIM", "show_default": True},
)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Flat key = value config file.")
@click.option("--algorithm", type=click.Choice(ALGORITHMS), default=None)
@click.option("--n", "n_neutrinos", type=int, default=None, help="Number of neutrinos.")
@click.option("--theta", type=float, default=None, help="Mixing angle in radians.")
@click.option("--mu-kind", type=click.Choice(["constant", "profile", "table"]),
              default=None)
@click.option("--mu0", type=float, default=None, help="Coupling scale.")
@click.option("--rnu", "r_nu", type=float, default=None,
              help="Emission radius of the profile schedule.")
@click.option("--mu-table", type=str, default=None,
              help="Tabulated schedule as t1:mu1,t2:mu2,...")
@click.option("--t-start", type=float, default=None)
@click.option("--t-end", type=float, default=None)
@click.option("--dt", "report_dt", type=float, default=None, help="Reporting step.")
@click.option("--shots", type=int, default=None, help="0 = analytic probabilities.")
@click.option("--runs", "n_runs", type=int, default=None)
@click.option("--seed", "rng_seed", type=int, default=None)
@click.option("--all-qubits", "track_all_qubits", is_flag=True, default=None,
              help="Track every qubit, not just the lowest-frequency one.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Output file (default: stdout).")
@click.option("--format", "out_format", type=click.Choice(["csv", "json"]),
              default=None)
def main(config_path: str | None, **overrides) -> None:
    """Simulate collective neutrino flavor evolution.

    Settings are resolved as flags > NUQSIM_* environment variables >
    config file > built-in defaults.
    """
    try:
        values = load_config_file(config_path) if config_path else {}
        for key, val in overrides.items():
            if val is not None:
                values[key] = _parse_mu_table(val) if key == "mu_table" else val
        cfg = RunConfig(**values)
        cfg.validate()
        record = run_experiment(cfg)
        emit_to_path(record, cfg.out_format, cfg.out_path)
    except (ValueError, RuntimeError) as err:
        raise click.ClickException(str(err)) from err


if __name__ == "__main__":
    main()

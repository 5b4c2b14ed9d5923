"""Squared-error simulation study across kernels, signals, sparsity and dimension.

Reproduces the squared-error comparison tables: sparse truth vectors with
q_n entries at signal strength A, unit-noise data, posterior chains under
each kernel, and the average squared error of the posterior median (or
mean) across replicates.  Replicates are embarrassingly parallel; every
replicate owns derived random streams, so a study is bit-reproducible for a
fixed master seed regardless of the parallelism degree.  Datasets are shared
across kernels and concentrations within a replicate index, mirroring the
paired design of the published tables.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .kernels import ChainConfig, KernelId, run_posterior_chain
from .model import PriorConfig
from .rng import RngStream

__all__ = [
    "ESTIMATORS",
    "ScenarioGrid",
    "Scenario",
    "SimCell",
    "SimTable",
    "resolve_concentration",
    "gen_truth",
    "gen_data",
    "run_replicate",
    "run_study",
]

ESTIMATORS = ("median", "mean")

_DATA_STREAM = 0x64617461
_CHAIN_STREAM = 0x636861696E


def resolve_concentration(spec, n: int) -> tuple[float, str]:
    """Resolve a concentration spec ("1/n" or a number) to (value, label)."""
    if isinstance(spec, str) and spec.strip() == "1/n":
        return 1.0 / n, "1/n"
    value = float(spec)
    if not (math.isfinite(value) and value > 0.0):
        raise ParameterError(f"concentration must be positive, got {spec!r}")
    return value, f"{value:g}"


@dataclass(frozen=True)
class Scenario:
    """One table cell before the estimator dimension: a (data, prior, kernel) combo."""

    n: int
    q_n: int
    sparsity: float
    signal: float
    a_value: float
    a_label: str
    kernel: KernelId


@dataclass(frozen=True)
class ScenarioGrid:
    """Cartesian scenario grid plus chain defaults for each replicate."""

    n_values: tuple[int, ...]
    sparsity_fractions: tuple[float, ...]
    signal_strengths: tuple[float, ...]
    concentrations: tuple[object, ...] = ("1/n", 0.5)
    kernels: tuple[KernelId, ...] = (KernelId.ORIGINAL, KernelId.CORRECTED,
                                     KernelId.ALTERNATIVE)
    replicates: int = 20
    estimators: tuple[str, ...] = ("median",)
    iterations: int = 5000
    burn_in: int = 1000
    thin: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise ParameterError(f"replicates must be >= 1, got {self.replicates}")
        for est in self.estimators:
            if est not in ESTIMATORS:
                raise ParameterError(f"unknown estimator {est!r}, expected one of {ESTIMATORS}")
        if not self.estimators:
            raise ParameterError("need at least one estimator")
        for frac in self.sparsity_fractions:
            if not 0.0 < frac <= 1.0:
                raise ParameterError(f"sparsity fraction must be in (0, 1], got {frac}")
        for A in self.signal_strengths:
            if A <= 0.0:
                raise ParameterError(f"signal strength must be positive, got {A}")
        object.__setattr__(self, "kernels", tuple(KernelId(k) for k in self.kernels))
        for n in self.n_values:
            for frac in self.sparsity_fractions:
                if round(frac * n) < 1:
                    raise ParameterError(
                        f"sparsity {frac} at n={n} gives q_n = 0; need q_n >= 1")
        # Chain settings are validated once against a placeholder prior.
        ChainConfig(iterations=self.iterations, burn_in=self.burn_in,
                    thin=self.thin, seed=0, kernel=KernelId.CORRECTED,
                    prior=PriorConfig(n=1, a=1.0))

    def scenarios(self) -> tuple[Scenario, ...]:
        """Deterministic cell enumeration (n, sparsity, A, a, kernel)."""
        out = []
        for n in self.n_values:
            for frac in self.sparsity_fractions:
                for A in self.signal_strengths:
                    for spec in self.concentrations:
                        a_value, a_label = resolve_concentration(spec, n)
                        for kernel in self.kernels:
                            out.append(Scenario(n=int(n), q_n=int(round(frac * n)),
                                                sparsity=float(frac), signal=float(A),
                                                a_value=a_value, a_label=a_label,
                                                kernel=kernel))
        return tuple(out)


def gen_truth(n: int, q_n: int, A: float) -> np.ndarray:
    """Sparse truth: the first q_n entries equal A, the rest are zero.

    Placement and sign are immaterial for squared error under the
    exchangeable prior; the leading-entries convention is fixed here.
    """
    if not 1 <= q_n <= n:
        raise ParameterError(f"q_n must satisfy 1 <= q_n <= n, got {q_n} vs n={n}")
    if A <= 0.0:
        raise ParameterError(f"signal strength must be positive, got {A}")
    theta0 = np.zeros(int(n))
    theta0[: int(q_n)] = float(A)
    return theta0


def gen_data(theta0, rng: RngStream) -> np.ndarray:
    """y = theta0 + eps with iid standard normal noise."""
    theta0 = np.ascontiguousarray(theta0, dtype=np.float64)
    return theta0 + rng.gen.standard_normal(theta0.size)


def _estimates(matrix, estimators: tuple[str, ...]) -> dict[str, np.ndarray]:
    theta = matrix.theta()
    out = {}
    for est in estimators:
        out[est] = np.median(theta, axis=0) if est == "median" else theta.mean(axis=0)
    return out


def _replicate_errors(theta0, chain: ChainConfig, estimators: tuple[str, ...],
                      rng: RngStream) -> dict[str, float]:
    y = gen_data(theta0, rng.spawn(_DATA_STREAM))
    matrix = run_posterior_chain(y, chain, rng.spawn(_CHAIN_STREAM))
    return {est: float(np.sum((estimate - theta0) ** 2))
            for est, estimate in _estimates(matrix, estimators).items()}


def run_replicate(theta0, chain: ChainConfig, estimator: str, rng: RngStream) -> float:
    """One replicate: simulate data, run the chain, return the squared error
    of the requested posterior point estimate against theta0."""
    if estimator not in ESTIMATORS:
        raise ParameterError(f"unknown estimator {estimator!r}")
    return _replicate_errors(np.ascontiguousarray(theta0, dtype=np.float64),
                             chain, (estimator,), rng)[estimator]


@dataclass(frozen=True)
class SimCell:
    """One aggregated table cell."""

    n: int
    sparsity: float
    signal: float
    a_label: str
    kernel: str
    estimator: str
    avg_sq_err: float
    mc_se: float
    replicates: int
    error: str | None = None


@dataclass(frozen=True)
class SimTable:
    """Aggregated study results plus the settings needed to reproduce them."""

    cells: tuple[SimCell, ...]
    master_seed: int
    iterations: int
    burn_in: int
    thin: int

    def failed_cells(self) -> tuple[SimCell, ...]:
        return tuple(c for c in self.cells if c.error is not None)

    def cell(self, **match) -> SimCell:
        """The unique cell whose fields equal every keyword given."""
        hits = [c for c in self.cells
                if all(getattr(c, k) == v for k, v in match.items())]
        if len(hits) != 1:
            raise KeyError(f"{match} matches {len(hits)} cells")
        return hits[0]

    def to_csv(self) -> str:
        lines = ["n,sparsity,A,a,kernel,estimator,avg_sq_err,mc_se,R"]
        for c in self.cells:
            lines.append(
                f"{c.n},{c.sparsity!r},{c.signal!r},{c.a_label},{c.kernel},"
                f"{c.estimator},{c.avg_sq_err!r},{c.mc_se!r},{c.replicates}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())

    def to_text(self) -> str:
        """Aligned table in the published layout: column groups (n, q/n%, A),
        one row per (a, kernel), one section per estimator."""
        columns = sorted({(c.n, c.sparsity, c.signal) for c in self.cells})
        rows = []
        for c in self.cells:  # preserve first-seen row order
            key = (c.a_label, c.kernel)
            if key not in rows:
                rows.append(key)
        by_key = {(c.n, c.sparsity, c.signal, c.a_label, c.kernel, c.estimator): c
                  for c in self.cells}
        estimators = []
        for c in self.cells:
            if c.estimator not in estimators:
                estimators.append(c.estimator)
        width = 10
        label_w = max([len(f"DL[{a}] {k}") for a, k in rows] + [12])
        blocks = []
        for est in estimators:
            lines = [f"average squared error, posterior {est} "
                     f"(R per cell below; seed {self.master_seed}, "
                     f"{self.iterations} sweeps, {self.burn_in} burn-in, thin {self.thin})"]
            for header, fmt in (("n", lambda col: f"{col[0]}"),
                                ("q/n%", lambda col: f"{100 * col[1]:g}"),
                                ("A", lambda col: f"{col[2]:g}")):
                cells = "".join(f"{fmt(col):>{width}}" for col in columns)
                lines.append(f"{header:<{label_w}}{cells}")
            for a_label, kernel in rows:
                vals = []
                for col in columns:
                    c = by_key.get((col[0], col[1], col[2], a_label, kernel, est))
                    if c is None:
                        vals.append(f"{'':>{width}}")
                    elif c.error is not None:
                        vals.append(f"{'FAILED':>{width}}")
                    else:
                        vals.append(f"{c.avg_sq_err:>{width}.2f}")
                lines.append(f"{f'DL[{a_label}] {kernel}':<{label_w}}{''.join(vals)}")
            blocks.append("\n".join(lines))
        return "\n\n".join(blocks) + "\n"

    def write_text(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_text())


def _scenario_streams(master_seed: int, sc: Scenario,
                      rep: int) -> tuple[RngStream, RngStream]:
    """(data stream, chain stream) for one replicate of one scenario cell.

    The data stream is derived from (n, q_n, A, replicate) only, so every
    kernel and concentration sees the same simulated datasets; the chain
    stream additionally keys on (a, kernel).
    """
    a_key = int(round(sc.a_value * 1e12))
    sig_key = int(round(sc.signal * 1e6))
    kernel_key = list(KernelId).index(sc.kernel)
    base = RngStream(master_seed)
    data = base.spawn(_DATA_STREAM, sc.n, sc.q_n, sig_key, rep)
    chain = base.spawn(_CHAIN_STREAM, sc.n, sc.q_n, sig_key, a_key, kernel_key, rep)
    return data, chain


def _run_task(payload) -> tuple[int, int, dict[str, float] | None, str | None]:
    (master_seed, idx, rep, n, q_n, signal, a_value, kernel_value,
     estimators, iterations, burn_in, thin) = payload
    try:
        sc = Scenario(n=n, q_n=q_n, sparsity=q_n / n, signal=signal,
                      a_value=a_value, a_label="", kernel=KernelId(kernel_value))
        data_rng, chain_rng = _scenario_streams(master_seed, sc, rep)
        theta0 = gen_truth(n, q_n, signal)
        y = gen_data(theta0, data_rng)
        chain = ChainConfig(iterations=iterations, burn_in=burn_in, thin=thin,
                            seed=master_seed, kernel=sc.kernel,
                            prior=PriorConfig(n=n, a=a_value))
        matrix = run_posterior_chain(y, chain, chain_rng)
        errors = {est: float(np.sum((estimate - theta0) ** 2))
                  for est, estimate in _estimates(matrix, tuple(estimators)).items()}
        return idx, rep, errors, None
    except Exception as exc:  # recorded per cell; the study continues
        return idx, rep, None, f"{type(exc).__name__}: {exc}"


def run_study(grid: ScenarioGrid, parallelism: int, master_seed: int) -> SimTable:
    """Run every grid cell with R derived-seed replicates and aggregate.

    Results are identical for any parallelism degree: replicate seeds are
    pure functions of (master seed, scenario, replicate index) and
    aggregation runs in replicate order.  Per-cell failures are recorded in
    the table and do not abort the study.
    """
    if parallelism < 1:
        raise ParameterError(f"parallelism must be >= 1, got {parallelism}")
    scenarios = grid.scenarios()
    payloads = []
    for idx, sc in enumerate(scenarios):
        for rep in range(grid.replicates):
            payloads.append((int(master_seed), idx, rep, sc.n, sc.q_n, sc.signal,
                             sc.a_value, sc.kernel.value, tuple(grid.estimators),
                             grid.iterations, grid.burn_in, grid.thin))
    if parallelism == 1 or len(payloads) == 1:
        outcomes = [_run_task(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(_run_task, payloads, chunksize=4))

    errors = {idx: {est: np.full(grid.replicates, np.nan) for est in grid.estimators}
              for idx in range(len(scenarios))}
    failures: dict[int, str] = {}
    for idx, rep, errs, failure in outcomes:
        if failure is not None:
            failures.setdefault(idx, failure)
        else:
            for est, value in errs.items():
                errors[idx][est][rep] = value

    cells = []
    for idx, sc in enumerate(scenarios):
        for est in grid.estimators:
            failure = failures.get(idx)
            vals = errors[idx][est]
            if failure is None:
                avg = float(np.mean(vals))
                se = (float(np.std(vals, ddof=1) / math.sqrt(grid.replicates))
                      if grid.replicates > 1 else float("nan"))
            else:
                avg = float("nan")
                se = float("nan")
            cells.append(SimCell(n=sc.n, sparsity=sc.sparsity, signal=sc.signal,
                                 a_label=sc.a_label, kernel=sc.kernel.value,
                                 estimator=est, avg_sq_err=avg, mc_se=se,
                                 replicates=grid.replicates, error=failure))
    return SimTable(cells=tuple(cells), master_seed=int(master_seed),
                    iterations=grid.iterations, burn_in=grid.burn_in,
                    thin=grid.thin)

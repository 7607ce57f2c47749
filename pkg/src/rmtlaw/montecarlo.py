"""Monte Carlo verification of the predicted spectral moments.

Each replicate draws an m x n matrix X whose columns are independent
stationary paths, forms W = (1/n) X X^T, and records the spectral moments
(1/m) tr(W^k).  Replicates use counter-based Philox substreams keyed by
(seed, replicate), so results are reproducible and independent of the worker
count.  ``run_monte_carlo`` lines the empirical means up against the
finite-window and limiting predictions in a JSON-ready report.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DomainError, NumericError, UnsupportedModelError
from .models import (
    StationaryModel,
    covariance_matrix,
    h_finite,
    h_szego,
    model_text,
    sample_paths,
    standard_normals,
)
from .moments import limiting_moment

DEFAULT_MAX_M = 512
DEFAULT_MAX_N = 1024
DEFAULT_MAX_REPLICATES = 1000
DEFAULT_BUDGET = DEFAULT_MAX_M * DEFAULT_MAX_N * DEFAULT_MAX_REPLICATES
BUDGET_ENV = "RMTLAW_BUDGET"

MODE_DIRECT = "direct"
MODE_REMARK1 = "remark1-gaussian"
MAX_K_MAX = 20

_SYMMETRY_TOL = 1e-8


def replicate_stream(seed: int, replicate: int) -> np.random.Generator:
    """Philox substream keyed by (seed, replicate): replicate r produces the
    same draws no matter which worker runs it."""
    key = np.array([seed, replicate], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SimConfig:
    """One simulation setup: model, matrix shape, moment orders, replication."""

    model: StationaryModel
    m: int
    n: int
    k_max: int = 4
    replicates: int = 100
    seed: int = 0
    mode: str = MODE_DIRECT

    def __post_init__(self) -> None:
        if self.m < 2 or self.n < 2:
            raise DomainError(f"need m >= 2 and n >= 2, got m={self.m}, n={self.n}")
        if not 1 <= self.k_max <= MAX_K_MAX:
            raise DomainError(f"need 1 <= k_max <= {MAX_K_MAX}, got {self.k_max}")
        if self.replicates < 1:
            raise DomainError(f"need replicates >= 1, got {self.replicates}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.mode not in (MODE_DIRECT, MODE_REMARK1):
            raise DomainError(f"mode must be {MODE_DIRECT!r} or {MODE_REMARK1!r}, got {self.mode!r}")

    @property
    def y(self) -> float:
        return self.m / self.n


def check_budget(config: SimConfig, force: bool = False) -> None:
    """Refuse configurations past the size caps unless forced.  The work cap
    m * n * replicates defaults to 512 * 1024 * 1000 and can be overridden
    through the RMTLAW_BUDGET environment variable."""
    if force:
        return
    if config.m > DEFAULT_MAX_M:
        raise BudgetError(f"m = {config.m} exceeds the cap {DEFAULT_MAX_M}; pass force to override")
    if config.n > DEFAULT_MAX_N:
        raise BudgetError(f"n = {config.n} exceeds the cap {DEFAULT_MAX_N}; pass force to override")
    if config.replicates > DEFAULT_MAX_REPLICATES:
        raise BudgetError(
            f"replicates = {config.replicates} exceeds the cap {DEFAULT_MAX_REPLICATES}; "
            "pass force to override"
        )
    budget = DEFAULT_BUDGET
    raw = os.environ.get(BUDGET_ENV)
    if raw is not None:
        try:
            budget = int(raw)
        except ValueError as exc:
            raise BudgetError(f"{BUDGET_ENV}={raw!r} is not an integer") from exc
    work = config.m * config.n * config.replicates
    if work > budget:
        raise BudgetError(
            f"m * n * replicates = {work} exceeds the budget {budget}; "
            f"raise {BUDGET_ENV} or pass force"
        )


def sample_matrix(
    config: SimConfig, replicate: int, stream: np.random.Generator | None = None
) -> np.ndarray:
    """The m x n data matrix for one replicate.

    Direct mode draws n independent model paths.  The remark1-gaussian mode
    replaces them with Gaussian columns of the same covariance window,
    T_m^(1/2) Z, using a Cholesky square root.
    """
    if stream is None:
        stream = replicate_stream(config.seed, replicate)
    if config.mode == MODE_DIRECT:
        return sample_paths(config.model, config.m, config.n, stream)
    t = covariance_matrix(config.model, config.m)
    try:
        root = np.linalg.cholesky(t)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"covariance window is not positive definite: {exc}") from exc
    return root @ standard_normals(stream, (config.m, config.n))


def spectral_moments(w: np.ndarray, k_max: int) -> np.ndarray:
    """Moments (1/m) tr(W^k), k = 1..k_max, of a symmetric matrix W."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DomainError(f"need a square matrix, got shape {w.shape}")
    scale = float(np.abs(w).max())
    if not np.allclose(w, w.T, atol=_SYMMETRY_TOL * max(scale, 1.0), rtol=0.0):
        raise DomainError("matrix is not symmetric")
    try:
        eig = np.linalg.eigvalsh(w)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc
    powers = eig[None, :] ** np.arange(1, k_max + 1)[:, None]
    return powers.mean(axis=1)


def _replicate_eigenvalues(config: SimConfig, replicate: int) -> np.ndarray:
    x = sample_matrix(config, replicate)
    w = (x @ x.T) / config.n
    try:
        return np.linalg.eigvalsh(w)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed on replicate {replicate}: {exc}") from exc


def _moments_from_eigenvalues(eig: np.ndarray, k_max: int) -> np.ndarray:
    powers = eig[None, :] ** np.arange(1, k_max + 1)[:, None]
    return powers.mean(axis=1)


def _sig12(value: float) -> float:
    return float(format(value, ".12g"))


@dataclass(frozen=True)
class MomentRow:
    """Predictions and the empirical estimate for one moment order."""

    k: int
    predicted_limit: float | None
    predicted_finite: float
    empirical_mean: float
    empirical_stderr: float


@dataclass(frozen=True)
class MomentReport:
    """Full outcome of one Monte Carlo run."""

    config: SimConfig
    moments: tuple[MomentRow, ...]
    runtime_seconds: float

    def config_dict(self) -> dict:
        return {
            "model": model_text(self.config.model),
            "m": self.config.m,
            "n": self.config.n,
            "replicates": self.config.replicates,
            "k_max": self.config.k_max,
            "seed": self.config.seed,
            "mode": self.config.mode,
        }

    def payload(self) -> dict:
        """Config and moments only: the deterministic part of the report."""
        rows = []
        for row in self.moments:
            rows.append(
                {
                    "k": row.k,
                    "predicted_limit": None
                    if row.predicted_limit is None
                    else _sig12(row.predicted_limit),
                    "predicted_finite": _sig12(row.predicted_finite),
                    "empirical_mean": _sig12(row.empirical_mean),
                    "empirical_stderr": _sig12(row.empirical_stderr),
                }
            )
        return {"config": self.config_dict(), "moments": rows}

    def to_json(self, include_runtime: bool = True) -> str:
        doc = self.payload()
        if include_runtime:
            doc["runtime_seconds"] = _sig12(self.runtime_seconds)
        return json.dumps(doc, indent=2) + "\n"


def run_monte_carlo(config: SimConfig, workers: int = 1, force: bool = False) -> MomentReport:
    """Run all replicates and assemble the report.

    The limiting prediction uses quadrature trace moments when the model has
    a supported spectral density, else null.  The finite prediction uses the
    eigenvalues of the m-window covariance.  Replicates are farmed out to a
    thread pool but gathered by index, so the report is identical for any
    worker count.
    """
    check_budget(config, force=force)
    if workers < 1:
        raise DomainError(f"need workers >= 1, got {workers}")
    start = time.monotonic()
    finite = h_finite(config.model, config.m, config.k_max)
    try:
        limit_values: tuple[float, ...] | None = h_szego(config.model, config.k_max).values
    except UnsupportedModelError:
        limit_values = None

    y = config.y
    predicted_finite = [limiting_moment(k, y, finite) for k in range(1, config.k_max + 1)]
    predicted_limit = (
        None
        if limit_values is None
        else [limiting_moment(k, y, limit_values) for k in range(1, config.k_max + 1)]
    )

    samples = np.empty((config.replicates, config.k_max))
    if workers == 1:
        for rep in range(config.replicates):
            samples[rep] = _moments_from_eigenvalues(
                _replicate_eigenvalues(config, rep), config.k_max
            )
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                rep: pool.submit(_replicate_eigenvalues, config, rep)
                for rep in range(config.replicates)
            }
            for rep, future in futures.items():
                samples[rep] = _moments_from_eigenvalues(future.result(), config.k_max)

    means = samples.mean(axis=0)
    if config.replicates > 1:
        stderrs = samples.std(axis=0, ddof=1) / math.sqrt(config.replicates)
    else:
        stderrs = np.zeros(config.k_max)

    rows = tuple(
        MomentRow(
            k=k,
            predicted_limit=None if predicted_limit is None else predicted_limit[k - 1],
            predicted_finite=predicted_finite[k - 1],
            empirical_mean=float(means[k - 1]),
            empirical_stderr=float(stderrs[k - 1]),
        )
        for k in range(1, config.k_max + 1)
    )
    return MomentReport(config=config, moments=rows, runtime_seconds=time.monotonic() - start)


@dataclass(frozen=True, eq=False)
class SpectrumSample:
    """Eigenvalues of W for one replicate."""

    replicate: int
    eigenvalues: np.ndarray


def sample_spectra(config: SimConfig, workers: int = 1, force: bool = False) -> list[SpectrumSample]:
    """Eigenvalues of every replicate, in replicate order."""
    check_budget(config, force=force)
    if workers < 1:
        raise DomainError(f"need workers >= 1, got {workers}")
    if workers == 1:
        return [
            SpectrumSample(rep, _replicate_eigenvalues(config, rep))
            for rep in range(config.replicates)
        ]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            rep: pool.submit(_replicate_eigenvalues, config, rep)
            for rep in range(config.replicates)
        }
        return [SpectrumSample(rep, futures[rep].result()) for rep in sorted(futures)]


@dataclass(frozen=True)
class Histogram:
    """Pooled eigenvalue histogram, density-normalized over the range."""

    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    density: tuple[float, ...]
    total: int

    def to_csv(self) -> str:
        lines = ["bin_lo,bin_hi,count,density"]
        for i, count in enumerate(self.counts):
            lines.append(
                f"{format(self.bin_edges[i], '.12g')},{format(self.bin_edges[i + 1], '.12g')},"
                f"{count},{format(self.density[i], '.12g')}"
            )
        return "\n".join(lines) + "\n"


def _histogram_from_values(values: np.ndarray, bins: int, lo: float, hi: float) -> Histogram:
    if bins < 1:
        raise DomainError(f"need bins >= 1, got {bins}")
    if not hi > lo:
        raise DomainError(f"need hi > lo, got [{lo}, {hi}]")
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    inside = int(counts.sum())
    width = (hi - lo) / bins
    if inside:
        density = counts / (inside * width)
    else:
        density = np.zeros(bins)
    return Histogram(
        bin_edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        density=tuple(float(d) for d in density),
        total=int(values.size),
    )


def eigenvalue_histogram(
    config: SimConfig,
    bins: int = 50,
    value_range: tuple[float, float] | None = None,
    workers: int = 1,
    force: bool = False,
) -> Histogram:
    """Histogram of all replicate eigenvalues pooled together.  The default
    range is [0, 1.05 * max eigenvalue]."""
    spectra = sample_spectra(config, workers=workers, force=force)
    values = np.concatenate([s.eigenvalues for s in spectra])
    if value_range is None:
        top = float(values.max())
        value_range = (0.0, 1.05 * top if top > 0 else 1.0)
    return _histogram_from_values(values, bins, float(value_range[0]), float(value_range[1]))

"""Monte Carlo link simulation over an SNR grid.

Trials are fast-fading: every trial draws a fresh channel realization, a
uniform symbol (or message), and a noise sample, then runs coherent
maximum-likelihood detection against the composite gain.

Work is organized in fixed-size chunks.  Chunk ``k`` of grid point ``p``
always consumes the stream ``(seed, p * 2**32 + k)``, and a point stops at
the smallest chunk index whose cumulative (index-ordered) symbol-error
count reaches ``min_errors``.  Both rules depend only on per-chunk results,
so sweeps are bitwise reproducible for any worker count and any scheduling
order; extra speculatively-computed chunks are simply discarded.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .rng import RAYLEIGH_SCALE, RngStream
from .schemes import Scheme, SchemeConfig

WORKERS_ENV_VAR = "RIS_LINKLAB_THREADS"

__all__ = [
    "WORKERS_ENV_VAR",
    "SweepSpec",
    "SweepPoint",
    "run_sweep",
    "confidence_interval",
]


@dataclass(frozen=True)
class SweepSpec:
    """One simulation campaign: a link config swept over an SNR grid.

    ``snr_grid_db`` holds Es/N0 values in dB, strictly increasing.  Each
    point runs until ``min_errors`` symbol errors are seen or ``max_trials``
    trials are exhausted, in chunks of ``chunk_size`` trials.  ``noiseless``
    is a test hook that runs the zero-noise limit of the receiver path.
    """

    config: SchemeConfig
    snr_grid_db: tuple[float, ...]
    max_trials: int = 10_000_000
    min_errors: int = 200
    seed: int = 0
    chunk_size: int = 10_000
    noiseless: bool = False

    def __post_init__(self) -> None:
        grid = tuple(float(v) for v in self.snr_grid_db)
        object.__setattr__(self, "snr_grid_db", grid)
        if len(grid) == 0:
            raise ValueError("snr_grid_db must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("snr_grid_db must be strictly increasing")
        if self.min_errors < 1:
            raise ValueError(f"min_errors must be >= 1, got {self.min_errors}")
        if self.chunk_size < 1 or self.max_trials < self.chunk_size:
            raise ValueError("need max_trials >= chunk_size >= 1")


@dataclass(frozen=True)
class SweepPoint:
    """Error statistics accumulated at one SNR grid point."""

    snr_db: float
    trials: int
    symbol_errors: int
    bit_errors: int
    bits_per_symbol: int = 1

    @property
    def ser(self) -> float:
        return self.symbol_errors / self.trials

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.trials * self.bits_per_symbol)

    def stderr(self, metric: str = "ser") -> float:
        p = self.ser if metric == "ser" else self.ber
        n = self.trials if metric == "ser" else self.trials * self.bits_per_symbol
        return math.sqrt(p * (1.0 - p) / n)


def confidence_interval(
    point: SweepPoint, level: float = 0.95, metric: str = "ser"
) -> tuple[float, float]:
    """Normal-approximation binomial confidence interval, clamped to [0, 1]."""
    from scipy.stats import norm

    if point.trials <= 0:
        raise ValueError("confidence interval requires trials > 0")
    p = point.ser if metric == "ser" else point.ber
    z = norm.ppf(0.5 + level / 2.0)
    half = z * point.stderr(metric)
    return (max(0.0, p - half), min(1.0, p + half))


def _chunk_counts(
    config: SchemeConfig,
    snr_db: float,
    stream: RngStream,
    trials: int,
    noiseless: bool,
) -> tuple[int, int]:
    """Run one chunk of trials; return (symbol_errors, bit_errors).

    Draw order per chunk is fixed: channel block(s), then symbol indices,
    then the noise block.  Intelligent schemes sample the channel
    amplitudes directly (Rayleigh by inverse CDF, which is exact): after
    ideal phase cancellation the received sample depends on the channel
    only through those amplitudes.
    """
    rng = stream.generator()
    n = config.n_reflectors
    scheme = config.scheme
    const = config.constellation
    m = const.order
    # Es/N0 is swept by scaling noise at fixed unit symbol energy.
    es = 1.0
    n0 = 10.0 ** (-snr_db / 10.0)

    if scheme is Scheme.DH_INTELLIGENT:
        alpha = rng.rayleigh(RAYLEIGH_SCALE, (trials, n))
        beta = rng.rayleigh(RAYLEIGH_SCALE, (trials, n))
        gain = np.einsum("ij,ij->i", alpha, beta)
    elif scheme is Scheme.DH_BLIND:
        h = (rng.standard_normal((trials, n)) + 1j * rng.standard_normal((trials, n))) * RAYLEIGH_SCALE
        g = (rng.standard_normal((trials, n)) + 1j * rng.standard_normal((trials, n))) * RAYLEIGH_SCALE
        gain = np.einsum("ij,ij->i", h, g)
    elif scheme is Scheme.AP_INTELLIGENT:
        beta = rng.rayleigh(RAYLEIGH_SCALE, (trials, n))
        gain = beta.sum(axis=1)
    else:  # AP_BLIND
        g = (rng.standard_normal((trials, n)) + 1j * rng.standard_normal((trials, n))) * RAYLEIGH_SCALE
        gain = g.sum(axis=1)

    tx = rng.integers(0, m, size=trials)
    received = np.sqrt(es) * gain * const.points[tx]
    if not noiseless:
        noise = (rng.standard_normal(trials) + 1j * rng.standard_normal(trials)) * (
            RAYLEIGH_SCALE * np.sqrt(n0)
        )
        received = received + noise

    # Coherent ML detection against the known composite gain.
    hypotheses = np.sqrt(es) * gain[:, None] * const.points[None, :]
    rx = np.argmin(np.abs(received[:, None] - hypotheses) ** 2, axis=1)

    symbol_errors = int(np.count_nonzero(rx != tx))
    bit_errors = int(const.bit_distance_table[tx, rx].sum())
    return symbol_errors, bit_errors


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV_VAR)
        workers = int(env) if env else 1
    else:
        env = os.environ.get(WORKERS_ENV_VAR)
        if env:
            workers = min(workers, int(env))
    return max(1, workers)


def _run_point(
    spec: SweepSpec, point_index: int, snr_db: float, workers: int
) -> SweepPoint:
    n_chunks = math.ceil(spec.max_trials / spec.chunk_size)

    def chunk_task(chunk_index: int) -> tuple[int, int, int]:
        start = chunk_index * spec.chunk_size
        trials = min(spec.chunk_size, spec.max_trials - start)
        stream = RngStream(spec.seed, (point_index << 32) | chunk_index)
        sym, bit = _chunk_counts(spec.config, snr_db, stream, trials, spec.noiseless)
        return trials, sym, bit

    total_trials = total_sym = total_bit = 0

    def accumulate(results) -> bool:
        nonlocal total_trials, total_sym, total_bit
        for trials, sym, bit in results:
            total_trials += trials
            total_sym += sym
            total_bit += bit
            if total_sym >= spec.min_errors:
                return True
        return False

    if workers == 1:
        accumulate(map(chunk_task, range(n_chunks)))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # Waves of speculative chunks; results are consumed in chunk-index
            # order, so the stopping decision never depends on worker count.
            wave = max(2 * workers, 4)
            for lo in range(0, n_chunks, wave):
                hi = min(lo + wave, n_chunks)
                if accumulate(pool.map(chunk_task, range(lo, hi))):
                    break

    return SweepPoint(
        snr_db=snr_db,
        trials=total_trials,
        symbol_errors=total_sym,
        bit_errors=total_bit,
        bits_per_symbol=spec.config.constellation.bits_per_symbol,
    )


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[SweepPoint]:
    """Simulate every grid point of ``spec``; deterministic in ``spec.seed``."""
    workers = _resolve_workers(workers)
    return [
        _run_point(spec, i, snr_db, workers)
        for i, snr_db in enumerate(spec.snr_grid_db)
    ]

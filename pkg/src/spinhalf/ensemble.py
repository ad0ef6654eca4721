"""Setting-dependent partition of a hidden-variable space, and seeded sampling.

The hidden variable ``lambda`` is uniform on ``[0, 1)``.  For a setting pair
``(a, b)`` the unit interval is cut into four consecutive half-open pieces
whose lengths are the joint outcome weights ``c_k(a, b)``, in the fixed
order ``(+,-), (-,+), (+,+), (-,-)``.  A sample lands in exactly one piece,
which fixes its outcome pair.  This uniform-interval layout is a modelling
choice: any measure space with the same piece weights would do.

Random numbers come from numpy's counter-based ``Philox`` bit generator.
A run of ``n`` draws is cut into chunks of ``chunk_size``; chunk ``j`` uses
its own stream keyed by ``SeedSequence(seed, spawn_key=(j,))``.  Results for
a fixed ``(seed, n, chunk_size)`` are therefore identical for any number of
worker threads.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterator

import numpy as np

from .singlet import OUTCOME_ORDER, joint_distribution
from .spin import Direction

DEFAULT_CHUNK_SIZE = 1 << 16
# retaining more records than this needs an explicit request
RECORD_RETENTION_LIMIT = 100_000
Z_FLAG = 4.0


@dataclass(frozen=True)
class PartitionModel:
    setting_a: Direction
    setting_b: Direction
    boundaries: tuple[float, float, float, float, float]
    weights: tuple[float, float, float, float]
    labels: tuple[tuple[int, int], ...] = OUTCOME_ORDER

    def lengths(self) -> tuple[float, ...]:
        t = self.boundaries
        return tuple(t[k] - t[k - 1] for k in range(1, 5))


def build_partition(a: Direction, b: Direction) -> PartitionModel:
    """Cut ``[0, 1)`` into pieces of length ``c_k(a, b)``."""
    w = joint_distribution(a, b).weights
    t1 = w[0]
    t2 = t1 + w[1]
    t3 = min(t2 + w[2], 1.0)
    return PartitionModel(a, b, (0.0, t1, t2, t3, 1.0), w)


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"lambda={lam!r} outside [0, 1)")
    return lam


def classify(lam: float, p: PartitionModel) -> tuple[int, int, int]:
    """Return ``(k, alpha, beta)`` for the piece ``[t_{k-1}, t_k)`` holding ``lam``."""
    lam = _check_lambda(lam)
    for k in range(1, 5):
        if lam < p.boundaries[k]:
            alpha, beta = p.labels[k - 1]
            return k, alpha, beta
    raise AssertionError("unreachable: last boundary is 1")


def classify_many(lams: np.ndarray, p: PartitionModel) -> np.ndarray:
    """Vectorized :func:`classify`; returns the 1-based piece index per sample."""
    lams = np.asarray(lams, dtype=float)
    if lams.size and (lams.min() < 0.0 or lams.max() >= 1.0):
        raise ValueError("lambda values must lie in [0, 1)")
    return np.searchsorted(np.asarray(p.boundaries[1:]), lams, side="right") + 1


@dataclass(frozen=True)
class SampleRecord:
    lam: float
    k: int
    alpha: int
    beta: int

    @property
    def product(self) -> int:
        return self.alpha * self.beta


@dataclass(frozen=True)
class RunSummary:
    setting_a: Direction
    setting_b: Direction
    n: int
    seed: int
    chunk_size: int
    counts: tuple[int, int, int, int]
    mean_product: float
    std_err: float

    @property
    def empirical_weights(self) -> tuple[float, ...]:
        return tuple(c / self.n for c in self.counts)


def _check_run_args(n: int, seed: int, chunk_size: int) -> None:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"sample count must be a positive integer, got {n!r}")
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be positive, got {chunk_size!r}")


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _chunk_lambdas(seed: int, chunk: int, size: int) -> np.ndarray:
    return chunk_generator(seed, chunk).random(size)


def _chunk_sizes(n: int, chunk_size: int) -> list[int]:
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def sample_run(
    a: Direction,
    b: Direction,
    n: int,
    seed: int,
    *,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> RunSummary:
    """Draw ``n`` hidden variables and estimate the mean of ``alpha * beta``.

    The estimate targets the singlet correlation ``-a.b``; ``std_err`` is the
    sample standard deviation of the products over ``sqrt(n)``.
    """
    _check_run_args(n, seed, chunk_size)
    p = build_partition(a, b)
    sizes = _chunk_sizes(n, chunk_size)

    def count(j: int) -> np.ndarray:
        k = classify_many(_chunk_lambdas(seed, j, sizes[j]), p)
        return np.bincount(k - 1, minlength=4)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(count, range(len(sizes))))
    else:
        parts = [count(j) for j in range(len(sizes))]
    counts = tuple(int(c) for c in np.sum(parts, axis=0))

    signed = sum(al * be * c for (al, be), c in zip(p.labels, counts))
    mean = signed / n
    # sum of squared deviations of +-1 values is n (1 - mean^2)
    var = n * (1.0 - mean * mean) / (n - 1) if n > 1 else 0.0
    std_err = math.sqrt(max(var, 0.0) / n)
    return RunSummary(a, b, n, int(seed), chunk_size, counts, mean, std_err)


def iter_records(
    a: Direction,
    b: Direction,
    n: int,
    seed: int,
    *,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> Iterator[SampleRecord]:
    """Per-sample stream matching :func:`sample_run` draw for draw."""
    _check_run_args(n, seed, chunk_size)
    p = build_partition(a, b)
    for j, size in enumerate(_chunk_sizes(n, chunk_size)):
        lams = _chunk_lambdas(seed, j, size)
        for lam, k in zip(lams.tolist(), classify_many(lams, p).tolist()):
            alpha, beta = p.labels[k - 1]
            yield SampleRecord(lam, k, alpha, beta)


def collect_records(a, b, n, seed, *, chunk_size=DEFAULT_CHUNK_SIZE, allow_large=False):
    if n > RECORD_RETENTION_LIMIT and not allow_large:
        raise ValueError(f"refusing to hold {n} records in memory; stream them instead")
    return list(iter_records(a, b, n, seed, chunk_size=chunk_size))


def write_records_csv(fh: IO[str], records) -> int:
    """Write ``lambda,k,alpha,beta`` rows; returns the number of rows."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["lambda", "k", "alpha", "beta"])
    rows = 0
    for rec in records:
        w.writerow([f"{rec.lam:.17g}", rec.k, rec.alpha, rec.beta])
        rows += 1
    return rows


@dataclass(frozen=True)
class WeightCheck:
    z_scores: tuple[float, float, float, float]
    flagged: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.flagged


def empirical_vs_exact(summary: RunSummary, p: PartitionModel) -> WeightCheck:
    """Binomial z-score of each empirical piece weight against the exact ``c_k``."""
    if summary.setting_a != p.setting_a or summary.setting_b != p.setting_b:
        raise ValueError("run summary and partition were built for different settings")
    z = []
    for emp, c in zip(summary.empirical_weights, p.weights):
        sd = math.sqrt(c * (1.0 - c) / summary.n)
        if sd == 0.0:
            z.append(0.0 if abs(emp - c) <= 1e-12 else math.inf)
        else:
            z.append((emp - c) / sd)
    flagged = tuple(k for k, zk in enumerate(z, start=1) if abs(zk) > Z_FLAG)
    return WeightCheck(tuple(z), flagged)

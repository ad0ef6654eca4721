"""CHSH combinations for the singlet.

``S = C(a,b) + C(a,b') + C(a',b) - C(a',b')``.

Three evaluations are offered: the exact quantum value, the 16-case algebraic
bound for a single shared assignment of +-1 outcomes, and an estimate where
each of the four setting pairs is sampled against its *own* partition of the
hidden-variable space.  The sampled estimate is a demonstration that
per-pair partitions reproduce the quantum value; it is not a bound.
"""
from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO

import numpy as np

from .ensemble import DEFAULT_CHUNK_SIZE, RunSummary, sample_run
from .singlet import correlation, correlation_many
from .spin import Direction, X, Z, random_angles, unit_vectors

TSIRELSON = 2.0 * math.sqrt(2.0)
SIGNS = (1, 1, 1, -1)
VIOLATION_SIGMAS = 4.0


@dataclass(frozen=True)
class ChshSetting:
    a: Direction
    a_prime: Direction
    b: Direction
    b_prime: Direction

    def pairs(self) -> tuple[tuple[Direction, Direction], ...]:
        return (
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        )


PRESETS: dict[str, ChshSetting] = {
    # coplanar in x-z: a = 0, a' = 90 deg, b = 45 deg, b' = -45 deg
    "optimal": ChshSetting(
        Direction.in_xz_plane(0.0),
        Direction.in_xz_plane(math.pi / 2),
        Direction.in_xz_plane(math.pi / 4),
        Direction.in_xz_plane(-math.pi / 4),
    ),
    "equal": ChshSetting(Z, Z, Z, Z),
    "orthogonal": ChshSetting(Z, Z, X, X),
}


def combine(values) -> float:
    v = tuple(values)
    return v[0] + v[1] + v[2] - v[3]


@dataclass(frozen=True)
class SampledChsh:
    value: float
    std_err: float
    n: int
    seed: int
    sub_seeds: tuple[int, int, int, int]
    runs: tuple[RunSummary, ...]

    @property
    def violation_demonstrated(self) -> bool:
        return abs(self.value) - 2.0 > VIOLATION_SIGMAS * self.std_err


@dataclass(frozen=True)
class ChshResult:
    s_quantum: float
    per_pair: tuple[float, float, float, float]
    s_sampled: SampledChsh | None = None


def chsh_quantum(s: ChshSetting) -> ChshResult:
    per_pair = tuple(correlation(x, y) for x, y in s.pairs())
    return ChshResult(combine(per_pair), per_pair)


def chsh_direct(s: ChshSetting) -> float:
    """``S`` straight from the dot products, bypassing the state vector."""
    return -s.a.dot(s.b) - s.a.dot(s.b_prime) - s.a_prime.dot(s.b) + s.a_prime.dot(s.b_prime)


def derive_seed(seed: int, index: int) -> int:
    """Independent 64-bit sub-seed for stream ``index`` under ``seed``."""
    state = np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, np.uint64)
    return int(state[0])


def chsh_sampled(
    s: ChshSetting,
    n_per_pair: int,
    seed: int,
    *,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> ChshResult:
    """Quantum value plus an estimate sampling each pair on its own partition."""
    exact = chsh_quantum(s)
    sub_seeds = tuple(derive_seed(seed, i) for i in range(4))

    def run(i: int) -> RunSummary:
        x, y = s.pairs()[i]
        return sample_run(x, y, n_per_pair, sub_seeds[i], chunk_size=chunk_size)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, 4)) as pool:
            runs = tuple(pool.map(run, range(4)))
    else:
        runs = tuple(run(i) for i in range(4))
    value = combine(r.mean_product for r in runs)
    std_err = math.sqrt(sum(r.std_err ** 2 for r in runs))
    sampled = SampledChsh(value, std_err, n_per_pair, int(seed), sub_seeds, runs)
    return ChshResult(exact.s_quantum, exact.per_pair, sampled)


@dataclass(frozen=True)
class BoundReport:
    table: tuple[tuple[int, int, int, int, int], ...]  # (alpha, alpha', beta, beta', value)
    values: frozenset[int]
    max_abs: int

    @property
    def ok(self) -> bool:
        return self.values <= {-2, 2} and self.max_abs == 2


def noncontextual_bound_check() -> BoundReport:
    """Enumerate ``ab + ab' + a'b - a'b'`` over all 16 sign assignments."""
    rows = []
    for al, alp, be, bep in itertools.product((1, -1), repeat=4):
        rows.append((al, alp, be, bep, al * be + al * bep + alp * be - alp * bep))
    values = frozenset(r[-1] for r in rows)
    return BoundReport(tuple(rows), values, max(abs(v) for v in values))


def random_quadruple_scan(n: int, seed: int) -> float:
    """Largest ``|S|`` over ``n`` uniformly random quadruples of directions."""
    rng = np.random.Generator(np.random.Philox(seed))
    a, ap, b, bp = (unit_vectors(*random_angles(rng, n)) for _ in range(4))
    s = combine((correlation_many(a, b), correlation_many(a, bp), correlation_many(ap, b), correlation_many(ap, bp)))
    return float(np.max(np.abs(s)))


@dataclass(frozen=True)
class SweepResult:
    angles: np.ndarray
    table: np.ndarray  # table[i, j] = S(b=angles[i], b'=angles[j])
    best_b: float
    best_b_prime: float
    best_s: float


def sweep_angles(step: float) -> np.ndarray:
    """Integer multiples of ``step`` in ``[-pi, pi)``."""
    lo, hi = math.ceil(-math.pi / step - 1e-9), math.ceil(math.pi / step - 1e-9)
    return step * np.arange(lo, hi, dtype=float)


def sweep_planar(step: float, a: float = 0.0, a_prime: float = math.pi / 2) -> SweepResult:
    """Grid of quantum ``S`` over coplanar ``(b, b')`` with ``a, a'`` fixed.

    All four directions lie in the x-z plane, angles measured from +z.
    """
    if not (math.isfinite(step) and 0.0 < step <= math.pi / 4):
        raise ValueError(f"step={step!r} outside (0, pi/4]")
    angles = sweep_angles(step)
    m = angles.size
    plane = np.stack([np.sin(angles), np.zeros(m), np.cos(angles)], axis=-1)
    va = np.tile([math.sin(a), 0.0, math.cos(a)], (m, 1))
    vap = np.tile([math.sin(a_prime), 0.0, math.cos(a_prime)], (m, 1))
    c_ab = correlation_many(va, plane)
    c_apb = correlation_many(vap, plane)
    table = (c_ab + c_apb)[:, None] + (c_ab - c_apb)[None, :]
    i, j = np.unravel_index(int(np.argmax(np.abs(table))), table.shape)
    return SweepResult(angles, table, float(angles[i]), float(angles[j]), float(table[i, j]))


def write_sweep_csv(fh: IO[str], result: SweepResult) -> int:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["b_angle", "b_prime_angle", "S"])
    rows = 0
    for i, b in enumerate(result.angles):
        for j, bp in enumerate(result.angles):
            w.writerow([f"{b:.17g}", f"{bp:.17g}", f"{result.table[i, j]:.17g}"])
            rows += 1
    return rows

"""Two-particle singlet state, its correlation function and outcome probabilities.

The singlet is built from an arbitrary reference direction ``r``; every
observable computed here is independent of that choice (up to the global
phase of the ket).

Two expansions of the correlation ``<Psi| (sigma.a) x (sigma.b) |Psi>`` are
provided:

* :func:`fk_decomposition` inserts the product basis aligned with ``r``
  between the two single-particle operators;
* :func:`joint_distribution` expands over the product eigenbasis of the two
  measured operators, so that the expansion coefficients are joint outcome
  probabilities.
"""
from __future__ import annotations

import logging
import math
from functools import lru_cache
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import linalg
from .linalg import ATOL
from .spin import Direction, Z, eigenspinor, eigenspinors_many, sigma_dot, sigma_dot_many

logger = logging.getLogger(__name__)

# (alpha_k, beta_k) for k = 1..4
OUTCOME_ORDER: tuple[tuple[int, int], ...] = ((1, -1), (-1, 1), (1, 1), (-1, -1))
EIGENVALUES: tuple[int, ...] = tuple(al * be for al, be in OUTCOME_ORDER)
# weights within this of zero are rounding noise and are set to exactly 0
WEIGHT_FLOOR = 1e-15
DRIFT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Normalized ket in the tensor order ``(|++>, |+->, |-+>, |-->)``."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(linalg.as_complex(self.amplitudes, (4,)))
        n = linalg.norm(amps)
        if abs(n - 1.0) > ATOL:
            raise ValueError(f"state norm {n!r} is not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def product(cls, first, second) -> "BipartiteState":
        return cls(linalg.tensor_vec(_amps2(first), _amps2(second)))

    def overlap(self, other: "BipartiteState") -> complex:
        return linalg.inner(self.amplitudes, other.amplitudes)


def _amps2(s) -> np.ndarray:
    return getattr(s, "amplitudes", s)


def _amps4(s) -> np.ndarray:
    return s.amplitudes if isinstance(s, BipartiteState) else linalg.as_complex(s, (4,))


@lru_cache(maxsize=1024)
def singlet_state(r: Direction = Z) -> BipartiteState:
    """``(|+r>|-r> - |-r>|+r>) / sqrt(2)``."""
    up, down = eigenspinor(r, 1).amplitudes, eigenspinor(r, -1).amplitudes
    ket = (linalg.tensor_vec(up, down) - linalg.tensor_vec(down, up)) / math.sqrt(2.0)
    return BipartiteState(ket)


def r_basis(r: Direction) -> tuple[BipartiteState, ...]:
    """Product basis ``|+r-r>, |-r+r>, |+r+r>, |-r-r>`` (antiparallel pairs first)."""
    return tuple(
        BipartiteState.product(eigenspinor(r, al), eigenspinor(r, be)) for al, be in OUTCOME_ORDER
    )


def local_operator(a: Direction, side: int) -> np.ndarray:
    """``(sigma.a) x I`` on side 1 or ``I x (sigma.a)`` on side 2."""
    if side == 1:
        return linalg.tensor_mat(sigma_dot(a), linalg.I2)
    if side == 2:
        return linalg.tensor_mat(linalg.I2, sigma_dot(a))
    raise ValueError(f"side must be 1 or 2, got {side!r}")


def single_side_expectation(state, a: Direction, side: int) -> float:
    v = _amps4(state)
    return linalg.sandwich(v, local_operator(a, side), v).real


def correlation(a: Direction, b: Direction, r: Direction = Z) -> float:
    """Singlet correlation by the full 4x4 matrix sandwich; equals ``-a.b``."""
    psi = singlet_state(r).amplitudes
    op = linalg.tensor_mat(sigma_dot(a), sigma_dot(b))
    return linalg.sandwich(psi, op, psi).real


def correlation_resolved(a: Direction, b: Direction, basis, r: Direction = Z) -> float:
    """Correlation with ``sum_k |k><k|`` inserted between the two local operators.

    ``basis`` is any orthonormal basis of the two-particle space.
    """
    psi = singlet_state(r).amplitudes
    left = linalg.matvec(linalg.adjoint(local_operator(a, 1)), psi)
    right = linalg.matvec(local_operator(b, 2), psi)
    total = sum(linalg.inner(left, _amps4(k)) * linalg.inner(_amps4(k), right) for k in basis)
    return complex(total).real


def correlation_many(a_vecs, b_vecs, r: Direction = Z) -> np.ndarray:
    """Vectorized matrix-sandwich correlation for rows of unit 3-vectors."""
    psi = singlet_state(r).amplitudes
    sa, sb = sigma_dot_many(a_vecs), sigma_dot_many(b_vecs)
    n = sa.shape[0]
    op = np.einsum("nij,nkl->nikjl", sa, sb).reshape(n, 4, 4)
    return np.einsum("i,nij,j->n", psi.conj(), op, psi).real


@dataclass(frozen=True)
class CorrelationBreakdown:
    f1: complex
    f2: complex
    f3: complex
    f4: complex
    total: float

    @property
    def terms(self) -> tuple[complex, complex, complex, complex]:
        return (self.f1, self.f2, self.f3, self.f4)

    @property
    def antiparallel(self) -> complex:
        return self.f1 + self.f2

    @property
    def parallel(self) -> complex:
        return self.f3 + self.f4


def fk_decomposition(r: Direction, a: Direction, b: Direction) -> CorrelationBreakdown:
    """Split the correlation over the ``r``-aligned product basis.

    ``F_k = <Psi|(sigma.a) x I|Psi^k> <Psi^k|I x (sigma.b)|Psi>`` with the
    singlet and the basis both built from ``r``.
    """
    psi = singlet_state(r).amplitudes
    op_a, op_b = local_operator(a, 1), local_operator(b, 2)
    terms = [
        linalg.sandwich(psi, op_a, k.amplitudes) * linalg.sandwich(k.amplitudes, op_b, psi)
        for k in r_basis(r)
    ]
    total = complex(sum(terms))
    if abs(total.imag) > ATOL:
        logger.warning("correlation breakdown has imaginary part %.3g", total.imag)
    return CorrelationBreakdown(*terms, total=total.real)


def fk_closed_form(r: Direction, a: Direction, b: Direction) -> CorrelationBreakdown:
    """Vector-algebra expressions for the four ``F_k`` terms."""
    rv, av, bv = r.cartesian, a.cartesian, b.cartesian
    f1 = complex(-0.5 * np.dot(rv, av) * np.dot(rv, bv))
    f3 = complex(-0.5 * (np.dot(np.cross(rv, av), np.cross(rv, bv)) - 1j * np.dot(rv, np.cross(av, bv))))
    return CorrelationBreakdown(f1, f1, f3, f3.conjugate(), total=-float(np.dot(av, bv)))


@dataclass(frozen=True)
class BasisEntry:
    state: BipartiteState
    alpha: int
    beta: int


@dataclass(frozen=True)
class ProductBasis:
    """Eigenbasis ``|alpha_a>|beta_b>`` of ``(sigma.a) x (sigma.b)`` in fixed k-order."""

    setting_a: Direction
    setting_b: Direction
    entries: tuple[BasisEntry, ...]

    @property
    def states(self) -> tuple[BipartiteState, ...]:
        return tuple(e.state for e in self.entries)

    def gram(self) -> np.ndarray:
        v = np.array([e.state.amplitudes for e in self.entries])
        return v.conj() @ v.T


def product_basis(a: Direction, b: Direction) -> ProductBasis:
    entries = tuple(
        BasisEntry(BipartiteState.product(eigenspinor(a, al), eigenspinor(b, be)), al, be)
        for al, be in OUTCOME_ORDER
    )
    return ProductBasis(a, b, entries)


@dataclass(frozen=True)
class JointDistribution:
    """Outcome weights ``c_k = P(alpha_k, beta_k)`` for one setting pair."""

    setting_a: Direction
    setting_b: Direction
    weights: tuple[float, float, float, float]
    eigenvalues: tuple[int, ...] = EIGENVALUES
    labels: tuple[tuple[int, int], ...] = OUTCOME_ORDER

    def prob(self, alpha: int, beta: int) -> float:
        return self.weights[self.labels.index((_sign(alpha), _sign(beta)))]

    def expectation(self) -> float:
        """``sum_k A_k c_k``, which reproduces the correlation."""
        return float(sum(A * c for A, c in zip(self.eigenvalues, self.weights)))


def _sign(x: int) -> int:
    if x not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {x!r}")
    return int(x)


@lru_cache(maxsize=4096)
def joint_distribution(a: Direction, b: Direction, r: Direction = Z) -> JointDistribution:
    """Weights ``|<phi^k|Psi>|^2`` over the product eigenbasis of the two settings."""
    psi = singlet_state(r)
    raw = np.array([abs(e.state.overlap(psi)) ** 2 for e in product_basis(a, b).entries])
    if np.any(raw < -WEIGHT_FLOOR):
        raise ArithmeticError(f"negative joint weight {raw.min()!r}")
    w = np.where(raw <= WEIGHT_FLOOR, 0.0, raw)
    drift = abs(float(w.sum()) - 1.0)
    if drift > DRIFT_TOL:
        logger.warning("joint weights sum drifted by %.3g; renormalizing", drift)
        w = w / w.sum()
    return JointDistribution(a, b, tuple(float(x) for x in w))


def joint_weights_closed_form(a: Direction, b: Direction) -> tuple[float, ...]:
    """``(1 - A_k a.b) / 4`` for each k; a cross-check, never the primary path."""
    ab = a.dot(b)
    return tuple((1.0 - A * ab) / 4.0 for A in EIGENVALUES)


def joint_prob_many(a: Direction, b_theta, b_phi, alpha: int, beta: int, r: Direction = Z) -> np.ndarray:
    """``|<alpha_a, beta_b|Psi>|^2`` for many ``b`` directions at once."""
    psi = singlet_state(r).amplitudes.reshape(2, 2)
    u = eigenspinor(a, _sign(alpha)).amplitudes
    v = eigenspinors_many(b_theta, b_phi, _sign(beta))
    amp = v.conj() @ (u.conj() @ psi)
    return np.abs(amp) ** 2


def reduced_density_matrix(state, keep: int = 1) -> np.ndarray:
    """Partial trace of ``|Psi><Psi|`` over the other particle."""
    m = _amps4(state).reshape(2, 2)
    if keep == 1:
        return m @ m.conj().T
    if keep == 2:
        return m.T @ m.conj()
    raise ValueError(f"keep must be 1 or 2, got {keep!r}")


def marginal(a: Direction, b: Direction, side: int, outcome: int) -> float:
    """Single-side outcome probability obtained by summing the joint table."""
    dist = joint_distribution(a, b)
    outcome = _sign(outcome)
    if side == 1:
        return dist.prob(outcome, 1) + dist.prob(outcome, -1)
    if side == 2:
        return dist.prob(1, outcome) + dist.prob(-1, outcome)
    raise ValueError(f"side must be 1 or 2, got {side!r}")


def marginal_from_reduced(d: Direction, side: int, outcome: int, r: Direction = Z) -> float:
    """``<+-_d| rho_side |+-_d>`` from the reduced density matrix."""
    rho = reduced_density_matrix(singlet_state(r), keep=side)
    v = eigenspinor(d, _sign(outcome)).amplitudes
    return linalg.sandwich(v, rho, v).real


def conditional(a: Direction, b: Direction, alpha: int, given_beta: int) -> float:
    """``P(alpha | beta)`` with ``beta`` the side-2 outcome."""
    p_beta = marginal(a, b, 2, given_beta)
    if p_beta <= 0.0:
        raise RuntimeError(f"internal error: zero marginal for beta={given_beta}")
    return joint_distribution(a, b).prob(alpha, given_beta) / p_beta


class SphereAverage(NamedTuple):
    value: float
    std_err: float
    n: int
    method: str


def average_joint_over_b(
    a: Direction,
    alpha: int,
    beta: int,
    method: str = "quadrature",
    *,
    n_theta: int = 64,
    n_phi: int = 128,
    samples: int = 1_000_000,
    seed: int = 0,
) -> SphereAverage:
    """Average of ``P_ab(alpha, beta)`` over all ``b`` with measure ``dOmega / 4 pi``.

    ``quadrature`` uses Gauss-Legendre nodes in ``cos theta`` times a uniform
    periodic grid in ``phi``; ``montecarlo`` draws ``samples`` uniform
    directions from a Philox stream keyed by ``seed``.
    """
    if method == "quadrature":
        x, w = leggauss(n_theta)
        phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
        theta_grid, phi_grid = np.meshgrid(np.arccos(x), phi, indexing="ij")
        f = joint_prob_many(a, theta_grid.ravel(), phi_grid.ravel(), alpha, beta).reshape(n_theta, n_phi)
        # weights sum to 2 in cos(theta) and 2 pi in phi
        value = float(w @ f.sum(axis=1)) * (2.0 * math.pi / n_phi) / (4.0 * math.pi)
        return SphereAverage(value, 0.0, n_theta * n_phi, method)
    if method == "montecarlo":
        if samples < 2:
            raise ValueError("montecarlo averaging needs at least 2 samples")
        rng = np.random.Generator(np.random.Philox(seed))
        theta = np.arccos(rng.uniform(-1.0, 1.0, samples))
        phi = rng.uniform(0.0, 2.0 * math.pi, samples)
        f = joint_prob_many(a, theta, phi, alpha, beta)
        return SphereAverage(float(f.mean()), float(f.std(ddof=1) / math.sqrt(samples)), samples, method)
    raise ValueError(f"unknown method {method!r}")

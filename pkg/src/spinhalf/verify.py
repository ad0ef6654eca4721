"""Numerical identity suite for the single-spin and singlet layers.

Each check evaluates one identity over a batch of random directions drawn
from a fixed seed and reports the worst deviation seen.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg, singlet, spin
from .spin import Direction

DEFAULT_SEED = 20240101
DEFAULT_COUNT = 1000


@dataclass(frozen=True)
class CheckResult:
    name: str
    identity: str
    measured: float
    tolerance: float
    passed: bool
    # "max_error" checks pass when measured <= tolerance, "min_value" when >=
    kind: str = "max_error"


@dataclass(frozen=True)
class _Check:
    name: str
    identity: str
    tolerance: float
    fn: Callable[[list, list, list], float]
    kind: str = "max_error"


def _eigen(rs, as_, bs):
    err = 0.0
    for r in rs:
        m = spin.sigma_dot(r)
        for sign in (1, -1):
            v = spin.eigenspinor(r, sign).amplitudes
            err = max(err, linalg.max_abs_diff(m @ v, sign * v))
    return err


def _resolution(rs, as_, bs):
    err = 0.0
    for r in rs:
        up, dn = spin.eigenspinor(r, 1).amplitudes, spin.eigenspinor(r, -1).amplitudes
        err = max(err, linalg.max_abs_diff(linalg.outer(up, up) + linalg.outer(dn, dn), linalg.I2))
    return err


def _rotation(rs, as_, bs):
    err = 0.0
    for r in rs:
        u = spin.rotation_matrix(r.theta, r.phi)
        err = max(
            err,
            linalg.max_abs_diff(u.conj().T @ u, linalg.I2),
            linalg.max_abs_diff(u[:, 0], spin.spinor_plus(r.theta, r.phi).amplitudes),
            linalg.max_abs_diff(u[:, 1], spin.spinor_minus(r.theta, r.phi).amplitudes),
        )
    return err


def _bloch(rs, as_, bs):
    return max(
        linalg.max_abs_diff(spin.bloch_vector(spin.spinor_plus(r.theta, r.phi)), r.cartesian) for r in rs
    )


def _projection_expectation(rs, as_, bs):
    err = 0.0
    for r, a in zip(rs, as_):
        ra = r.dot(a)
        err = max(
            err,
            abs(spin.expectation_projection(spin.eigenspinor(r, 1), a) - ra),
            abs(spin.expectation_projection(spin.eigenspinor(r, -1), a) + ra),
        )
    return err


def _off_diagonal_form(rs, as_, bs):
    return max(abs(spin.off_diagonal(r, a) - spin.off_diagonal_triad(r, a)) for r, a in zip(rs, as_))


def _modulus(rs, as_, bs):
    err = 0.0
    for r, a in zip(rs, as_):
        angle = spin.clamped_angle(r.cartesian, a.cartesian)
        err = max(err, abs(abs(spin.off_diagonal(r, a)) - math.sin(angle)))
    return err


def _reflection(rs, as_, bs):
    err = 0.0
    for r, a in zip(rs, as_):
        moved = spin.apply_projection(a, spin.eigenspinor(r, 1))
        err = max(err, linalg.max_abs_diff(spin.bloch_vector(moved), spin.reflect_bloch(r, a)))
    return err


def _double(rs, as_, bs):
    err = 0.0
    for r, a in zip(rs, as_):
        s = spin.eigenspinor(r, 1)
        back = spin.apply_projection(a, spin.apply_projection(a, s))
        err = max(
            err,
            linalg.max_abs_diff(back.amplitudes, s.amplitudes),
            linalg.max_abs_diff(spin.bloch_vector(back), r.cartesian),
        )
    return err


def _correlation(rs, as_, bs):
    return max(abs(singlet.correlation(a, b) + a.dot(b)) for a, b in zip(as_, bs))


def _decompositions(rs, as_, bs):
    err = 0.0
    for r, a, b in zip(rs, as_, bs):
        c = singlet.correlation(a, b)
        err = max(
            err,
            abs(singlet.fk_decomposition(r, a, b).total - c),
            abs(singlet.joint_distribution(a, b).expectation() - c),
        )
    return err


def _fk_structure(rs, as_, bs):
    err = 0.0
    for r, a, b in zip(rs, as_, bs):
        f = singlet.fk_decomposition(r, a, b)
        g = singlet.fk_closed_form(r, a, b)
        rv, av, bv = r.cartesian, a.cartesian, b.cartesian
        err = max(
            err,
            abs(f.f1 - f.f2),
            abs(f.f4 - f.f3.conjugate()),
            abs(f.antiparallel + np.dot(rv, av) * np.dot(rv, bv)),
            abs(f.parallel + np.dot(np.cross(rv, av), np.cross(rv, bv))),
            max(abs(x - y) for x, y in zip(f.terms, g.terms)),
        )
    return err


def _basis_resolution(rs, as_, bs):
    err = 0.0
    for r, a, b in zip(rs, as_, bs):
        c = singlet.correlation(a, b)
        err = max(
            err,
            abs(singlet.correlation_resolved(a, b, singlet.r_basis(r)) - c),
            abs(singlet.correlation_resolved(a, b, singlet.product_basis(a, b).states) - c),
        )
    return err


def _closed_form_weights(rs, as_, bs):
    return max(
        max(abs(x - y) for x, y in zip(singlet.joint_distribution(a, b).weights, singlet.joint_weights_closed_form(a, b)))
        for a, b in zip(as_, bs)
    )


def _r_independence(rs, as_, bs):
    err = 0.0
    for r, a, b in zip(rs, as_, bs):
        err = max(
            err,
            abs(singlet.correlation(a, b, r) - singlet.correlation(a, b)),
            max(
                abs(x - y)
                for x, y in zip(singlet.joint_distribution(a, b, r).weights, singlet.joint_distribution(a, b).weights)
            ),
            abs(abs(singlet.singlet_state(r).overlap(singlet.singlet_state())) - 1.0),
        )
    return err


def _axioms(rs, as_, bs):
    err = 0.0
    for a, b in zip(as_, bs):
        d = singlet.joint_distribution(a, b)
        err = max(err, abs(sum(d.weights) - 1.0))
        for side in (1, 2):
            for o in (1, -1):
                err = max(err, abs(singlet.marginal(a, b, side, o) - 0.5))
        for al in (1, -1):
            for be in (1, -1):
                lhs = d.prob(al, be)
                rhs = singlet.conditional(a, b, al, be) * singlet.marginal(a, b, 2, be)
                err = max(err, abs(lhs - rhs))
    return err


def _local_zero(rs, as_, bs):
    psi = singlet.singlet_state()
    return max(
        max(abs(singlet.single_side_expectation(psi, a, 1)), abs(singlet.single_side_expectation(psi, a, 2)))
        for a in as_
    )


def _reduced(rs, as_, bs):
    err = 0.0
    for r in rs[:100]:
        psi = singlet.singlet_state(r)
        for keep in (1, 2):
            err = max(err, linalg.max_abs_diff(singlet.reduced_density_matrix(psi, keep), linalg.I2 / 2))
    return err


def _sphere_average(rs, as_, bs):
    err = 0.0
    for a in as_[:4]:
        for al in (1, -1):
            for be in (1, -1):
                err = max(err, abs(singlet.average_joint_over_b(a, al, be).value - 0.25))
    return err


def _setting_dependence(rs, as_, bs):
    a = spin.Z
    w1 = singlet.joint_distribution(a, a).weights
    w2 = singlet.joint_distribution(a, spin.X).weights
    return max(abs(x - y) for x, y in zip(w1, w2))


CHECKS: tuple[_Check, ...] = (
    _Check("eigen_equation", "(sigma.r)|+-r> = +-|+-r>", 1e-12, _eigen),
    _Check("resolution_of_identity", "|+r><+r| + |-r><-r| = I", 1e-12, _resolution),
    _Check("rotation_unitary", "U^dag U = I, columns |+r>, |-r>", 1e-12, _rotation),
    _Check("bloch_vector", "<+r|sigma|+r> = r", 1e-12, _bloch),
    _Check("projection_expectation", "<+-r|sigma.a|+-r> = +-r.a", 1e-12, _projection_expectation),
    _Check("off_diagonal_triad", "<-r|sigma.a|+r> = e^{i phi}(theta_hat + i phi_hat).a", 1e-12, _off_diagonal_form),
    _Check("modulus_law", "|<-r|sigma.a|+r>| = sin(theta_ra)", 1e-9, _modulus),
    _Check("reflection_law", "bloch((sigma.a)|+r>) = 2(r.a)a - r", 1e-12, _reflection),
    _Check("double_application", "(sigma.a)(sigma.a)|s> = |s>", 1e-12, _double),
    _Check("local_expectation_zero", "<Psi|(sigma.a) x I|Psi> = <Psi|I x (sigma.a)|Psi> = 0", 1e-12, _local_zero),
    _Check("correlation_closed_form", "<Psi|(sigma.a) x (sigma.b)|Psi> = -a.b", 1e-12, _correlation),
    _Check("decomposition_equivalence", "sum_k F_k = sum_k A_k C_k = C(a,b)", 1e-12, _decompositions),
    _Check("fk_structure", "F1 = F2, F4 = F3*, F1+F2 = -(r.a)(r.b), F3+F4 = -(r x a).(r x b)", 1e-12, _fk_structure),
    _Check("basis_resolution", "inserting either product basis leaves C(a,b) unchanged", 1e-12, _basis_resolution),
    _Check("closed_form_weights", "|<phi^k|Psi>|^2 = (1 - A_k a.b)/4", 1e-12, _closed_form_weights),
    _Check("r_independence", "C(a,b) and C_k do not depend on the singlet reference r", 1e-12, _r_independence),
    _Check("probability_axioms", "sum C_k = 1, marginals = 1/2, P(al,be) = P(al|be) P(be)", 1e-12, _axioms),
    _Check("reduced_state", "Tr_other |Psi><Psi| = I/2", 1e-12, _reduced),
    _Check("sphere_average", "(1/4pi) int dOmega_b P_ab(al,be) = 1/4", 1e-10, _sphere_average),
    _Check("setting_dependence", "max_k |C_k(z,z) - C_k(z,x)| >= 0.1", 0.1, _setting_dependence, "min_value"),
)


def random_triples(seed: int, count: int) -> tuple[list[Direction], list[Direction], list[Direction]]:
    rng = np.random.Generator(np.random.Philox(seed))
    return tuple(spin.random_directions(rng, count) for _ in range(3))  # type: ignore[return-value]


def run_checks(
    *, seed: int = DEFAULT_SEED, count: int = DEFAULT_COUNT, tolerance: float | None = None
) -> list[CheckResult]:
    """Run every identity; ``tolerance`` overrides the per-check error tolerances."""
    rs, as_, bs = random_triples(seed, count)
    out = []
    for c in CHECKS:
        measured = float(c.fn(rs, as_, bs))
        if c.kind == "min_value":
            tol = c.tolerance
            passed = measured >= tol
        else:
            tol = c.tolerance if tolerance is None else tolerance
            passed = measured <= tol
        out.append(CheckResult(c.name, c.identity, measured, tol, passed, c.kind))
    return out

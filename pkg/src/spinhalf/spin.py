"""Single spin-1/2 states, projection operators and Bloch geometry."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .linalg import ATOL

TWO_PI = 2.0 * math.pi
# cartesian input further than this from unit norm is rejected, not normalized
CARTESIAN_NORM_TOL = 1e-9


def _check_angles(theta: float, phi: float) -> None:
    if not (math.isfinite(theta) and math.isfinite(phi)):
        raise ValueError(f"non-finite angles ({theta!r}, {phi!r})")
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta={theta!r} outside [0, pi]")
    if not 0.0 <= phi < TWO_PI:
        raise ValueError(f"phi={phi!r} outside [0, 2*pi)")


def clamped_angle(u, v) -> float:
    """Angle between two unit vectors; the dot product is clamped to [-1, 1]."""
    c = float(np.dot(u, v))
    return math.acos(min(1.0, max(-1.0, c)))


@dataclass(frozen=True)
class Direction:
    """Unit vector on the sphere given by zenith ``theta`` and azimuth ``phi``.

    ``theta`` must lie in ``[0, pi]`` and ``phi`` in ``[0, 2*pi)``.
    """

    theta: float
    phi: float
    _xyz: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        theta, phi = float(self.theta), float(self.phi)
        _check_angles(theta, phi)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)
        st = math.sin(theta)
        xyz = np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])
        xyz.setflags(write=False)
        object.__setattr__(self, "_xyz", xyz)

    @property
    def cartesian(self) -> np.ndarray:
        return self._xyz

    @classmethod
    def from_cartesian(cls, v) -> "Direction":
        """Build a direction from a 3-vector.

        Vectors within ``1e-9`` of unit norm are normalized; anything else
        raises ``ValueError``.
        """
        vec = np.asarray(v, dtype=float)
        if vec.shape != (3,) or not np.all(np.isfinite(vec)):
            raise ValueError(f"expected a finite 3-vector, got {v!r}")
        n = float(np.linalg.norm(vec))
        if abs(n - 1.0) > CARTESIAN_NORM_TOL:
            raise ValueError(f"vector norm {n!r} is not 1")
        x, y, z = vec / n
        theta = math.atan2(math.hypot(x, y), z)
        phi = math.atan2(y, x) % TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        return cls(theta, phi)

    @classmethod
    def in_xz_plane(cls, angle: float) -> "Direction":
        """Direction ``(sin angle, 0, cos angle)``, measured from +z towards +x."""
        return cls.from_cartesian([math.sin(angle), 0.0, math.cos(angle)])

    def dot(self, other: "Direction") -> float:
        return float(np.dot(self._xyz, other._xyz))


Z = Direction(0.0, 0.0)
X = Direction(math.pi / 2, 0.0)
Y = Direction(math.pi / 2, math.pi / 2)


def random_directions(rng: np.random.Generator, n: int) -> list[Direction]:
    """``n`` directions drawn uniformly over the sphere."""
    theta, phi = random_angles(rng, n)
    return [Direction(t, p) for t, p in zip(theta, phi)]


def random_angles(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    cos_t = rng.uniform(-1.0, 1.0, n)
    theta = np.arccos(cos_t)
    phi = rng.uniform(0.0, TWO_PI, n)
    return theta, phi


@dataclass(frozen=True)
class SphericalTriad:
    """Orthonormal frame ``(r, theta_hat, phi_hat)`` attached to a direction."""

    r: np.ndarray
    theta_hat: np.ndarray
    phi_hat: np.ndarray


def spherical_triad(d: Direction) -> SphericalTriad:
    # phi_hat is the standard (-sin phi, cos phi, 0); the printed variant
    # is neither unit nor orthogonal to theta_hat for general angles
    ct, st = math.cos(d.theta), math.sin(d.theta)
    cp, sp = math.cos(d.phi), math.sin(d.phi)
    theta_hat = np.array([ct * cp, ct * sp, -st])
    phi_hat = np.array([-sp, cp, 0.0])
    for v in (theta_hat, phi_hat):
        v.setflags(write=False)
    return SphericalTriad(d.cartesian, theta_hat, phi_hat)


@dataclass(frozen=True, eq=False)
class Spinor:
    """Normalized two-component state in the ``(|+z>, |-z>)`` basis."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(linalg.as_complex(self.amplitudes, (2,)))
        n = linalg.norm(amps)
        if abs(n - 1.0) > ATOL:
            raise ValueError(f"spinor norm {n!r} is not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, v) -> "Spinor":
        amps = linalg.as_complex(v, (2,))
        n = linalg.norm(amps)
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amps / n)

    def overlap(self, other: "Spinor") -> complex:
        return linalg.inner(self.amplitudes, other.amplitudes)

    def same_ray(self, other: "Spinor", tol: float = ATOL) -> bool:
        """True when the two states differ only by a global phase."""
        return abs(abs(self.overlap(other)) - 1.0) <= tol


def _amps(s) -> np.ndarray:
    return s.amplitudes if isinstance(s, Spinor) else linalg.as_complex(s, (2,))


def sigma_dot(a: Direction) -> np.ndarray:
    """Spin projection operator ``sigma . a`` as a 2x2 matrix."""
    ax, ay, az = a.cartesian
    m = np.array([[az, ax - 1j * ay], [ax + 1j * ay, -az]], dtype=complex)
    m.setflags(write=False)
    return m


def spinor_plus(theta: float, phi: float) -> Spinor:
    """``|+r>``: spin up along the direction ``(theta, phi)``."""
    _check_angles(theta, phi)
    return Spinor(np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)]))


def spinor_minus(theta: float, phi: float) -> Spinor:
    """``|-r>``, orthogonal to :func:`spinor_plus` for the same angles."""
    _check_angles(theta, phi)
    return Spinor(np.array([-np.exp(-1j * phi) * math.sin(theta / 2), math.cos(theta / 2)]))


def eigenspinor(d: Direction, sign: int) -> Spinor:
    if sign == 1:
        return spinor_plus(d.theta, d.phi)
    if sign == -1:
        return spinor_minus(d.theta, d.phi)
    raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def rotation_matrix(theta: float, phi: float) -> np.ndarray:
    """Unitary whose columns are ``|+r>`` and ``|-r>``."""
    _check_angles(theta, phi)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    u = np.array([[c, -np.exp(-1j * phi) * s], [np.exp(1j * phi) * s, c]], dtype=complex)
    u.setflags(write=False)
    return u


def expectation_projection(s, a: Direction) -> float:
    """``<s| sigma . a |s>``, which is real for a Hermitian operator."""
    v = _amps(s)
    return linalg.sandwich(v, sigma_dot(a), v).real


def bloch_vector(s) -> np.ndarray:
    """Vector of Pauli expectation values ``(<sx>, <sy>, <sz>)``."""
    v = _amps(s)
    return np.array([linalg.sandwich(v, p, v).real for p in linalg.PAULI])


def off_diagonal(r: Direction, a: Direction) -> complex:
    """Matrix element ``<-r| sigma . a |+r>``."""
    return linalg.sandwich(
        spinor_minus(r.theta, r.phi).amplitudes,
        sigma_dot(a),
        spinor_plus(r.theta, r.phi).amplitudes,
    )


def off_diagonal_triad(r: Direction, a: Direction) -> complex:
    """Closed form ``exp(i phi) (theta_hat + i phi_hat) . a`` of :func:`off_diagonal`."""
    t = spherical_triad(r)
    av = a.cartesian
    return complex(np.exp(1j * r.phi) * (np.dot(t.theta_hat, av) + 1j * np.dot(t.phi_hat, av)))


def reflect_bloch(r: Direction, a: Direction) -> np.ndarray:
    """Bloch vector ``2 (r.a) a - r`` of the state ``(sigma . a)|+r>``."""
    rv, av = r.cartesian, a.cartesian
    return 2.0 * float(np.dot(rv, av)) * av - rv


def apply_projection(a: Direction, s) -> Spinor:
    """``(sigma . a)|s>``; unitary, and its own inverse."""
    return Spinor(linalg.matvec(sigma_dot(a), _amps(s)))


# Batched forms used by the vectorized sampling and quadrature paths.

def unit_vectors(theta, phi) -> np.ndarray:
    theta, phi = np.asarray(theta, float), np.asarray(phi, float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def eigenspinors_many(theta, phi, sign: int) -> np.ndarray:
    """Array of shape ``(n, 2)`` of ``|+r>`` (``sign=1``) or ``|-r>`` rows."""
    theta, phi = np.asarray(theta, float), np.asarray(phi, float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if sign == 1:
        return np.stack([c + 0j, np.exp(1j * phi) * s], axis=-1)
    if sign == -1:
        return np.stack([-np.exp(-1j * phi) * s, c + 0j], axis=-1)
    raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def sigma_dot_many(vectors) -> np.ndarray:
    """Stack of ``sigma . v`` matrices, shape ``(n, 2, 2)``, for rows of ``vectors``."""
    v = np.asarray(vectors, dtype=float)
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    out = np.empty(v.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = z
    out[..., 0, 1] = x - 1j * y
    out[..., 1, 0] = x + 1j * y
    out[..., 1, 1] = -z
    return out

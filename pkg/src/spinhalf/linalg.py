"""Small dense complex linear algebra for one and two spin-1/2 particles.

Vectors and matrices are plain ``numpy`` ``complex128`` arrays of shape
``(2,)``, ``(4,)``, ``(2, 2)`` and ``(4, 4)``.

Conventions used everywhere in the package:

* single-particle basis order is ``(|+z>, |-z>)``;
* two-particle kets use lexicographic tensor order
  ``(|++>, |+->, |-+>, |-->)``, i.e. particle 1 is the slow index;
* :func:`inner` conjugates its *left* argument (bra side), as in Dirac
  notation ``<u|v>``.

Every function returns a fresh, read-only array so values can be shared
between threads without copying.
"""
from __future__ import annotations

import numpy as np

ATOL = 1e-12

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

for _m in (I2, I4, *PAULI):
    _m.setflags(write=False)
del _m


def _frozen(x: np.ndarray) -> np.ndarray:
    x.setflags(write=False)
    return x


def as_complex(x, shape: tuple[int, ...]) -> np.ndarray:
    """Coerce ``x`` to a complex array of exactly ``shape``.

    Raises ``ValueError`` on a shape mismatch or non-finite entries.
    """
    arr = np.asarray(x, dtype=complex)
    if arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("non-finite component")
    return arr


def _square(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] not in (2, 4):
        raise ValueError(f"expected a 2x2 or 4x4 matrix, got shape {arr.shape}")
    return as_complex(arr, arr.shape)


def _vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.shape[0] not in (2, 4):
        raise ValueError(f"expected a 2- or 4-vector, got shape {arr.shape}")
    return as_complex(arr, arr.shape)


def tensor_mat(lhs, rhs) -> np.ndarray:
    """Kronecker product of two 2x2 matrices in the package tensor order."""
    a, b = as_complex(lhs, (2, 2)), as_complex(rhs, (2, 2))
    # (i, k) x (j, l) -> row 2i + j, column 2k + l
    return _frozen(np.multiply.outer(a, b).transpose(0, 2, 1, 3).reshape(4, 4))


def tensor_vec(lhs, rhs) -> np.ndarray:
    """Product ket ``|lhs>|rhs>`` as a 4-vector."""
    return _frozen(np.multiply.outer(as_complex(lhs, (2,)), as_complex(rhs, (2,))).reshape(4))


def inner(lhs, rhs) -> complex:
    """Dirac bracket ``<lhs|rhs>``; the left argument is conjugated."""
    u, v = _vector(lhs), _vector(rhs)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch {u.shape} vs {v.shape}")
    return complex(np.vdot(u, v))


def norm(v) -> float:
    return float(np.sqrt(inner(v, v).real))


def matvec(m, v) -> np.ndarray:
    mat, vec = _square(m), _vector(v)
    if mat.shape[1] != vec.shape[0]:
        raise ValueError(f"dimension mismatch {mat.shape} vs {vec.shape}")
    return _frozen(mat @ vec)


def matmul(a, b) -> np.ndarray:
    x, y = _square(a), _square(b)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch {x.shape} vs {y.shape}")
    return _frozen(x @ y)


def adjoint(m) -> np.ndarray:
    return _frozen(_square(m).conj().T.copy())


def outer(lhs, rhs) -> np.ndarray:
    """Operator ``|lhs><rhs|``."""
    u, v = _vector(lhs), _vector(rhs)
    return _frozen(np.outer(u, v.conj()))


def sandwich(bra, m, ket) -> complex:
    """Matrix element ``<bra|m|ket>``."""
    return inner(bra, matvec(m, ket))


def is_hermitian(m, tol: float = ATOL) -> bool:
    mat = _square(m)
    return bool(np.max(np.abs(mat - mat.conj().T)) <= tol)


def is_unitary(m, tol: float = ATOL) -> bool:
    mat = _square(m)
    eye = np.eye(mat.shape[0])
    return bool(np.max(np.abs(mat.conj().T @ mat - eye)) <= tol)


def max_abs_diff(x, y) -> float:
    return float(np.max(np.abs(np.asarray(x, dtype=complex) - np.asarray(y, dtype=complex))))

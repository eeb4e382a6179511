"""Dense complex linear algebra for the small (at most 4x4) matrices used here.

Matrices are plain ``numpy`` complex arrays. The eigensolver is a cyclic
complex Jacobi iteration so that every spectrum in the package comes from a
routine we control, with ``numpy.linalg`` reserved for cross-checks in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-10

ROUNDOFF_ULPS = 64

JACOBI_OFF_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class LinalgError(ArithmeticError):
    """A numerical routine failed on otherwise well-formed input."""


class ConvergenceError(LinalgError):
    """The Jacobi sweep cap was reached before the off-diagonal mass vanished."""


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending real eigenvalues and orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def from_pairs(rows: int, cols: int, entries: Iterable[tuple[float, float]]) -> np.ndarray:
    """Build a matrix from a row-major sequence of ``(re, im)`` pairs."""
    flat = [complex(re, im) for re, im in entries]
    if len(flat) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(flat)}")
    return as_matrix(np.array(flat, dtype=np.complex128).reshape(rows, cols))


def to_pairs(a) -> list[tuple[float, float]]:
    """Row-major ``(re, im)`` pairs; the inverse of :func:`from_pairs`."""
    m = as_matrix(a)
    return [(float(z.real), float(z.imag)) for z in m.ravel()]


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def tensor(a, b) -> np.ndarray:
    """Kronecker product ``a (x) b``."""
    a = as_matrix(a)
    b = as_matrix(b)
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.empty((ra * rb, ca * cb), dtype=np.complex128)
    for i in range(ra):
        for j in range(ca):
            out[i * rb:(i + 1) * rb, j * cb:(j + 1) * cb] = a[i, j] * b
    return out


def partial_trace(rho, keep: int) -> np.ndarray:
    """Reduced 2x2 matrix of qubit ``keep`` (1 or 2) of a 4x4 two-qubit operator.

    Qubit 1 is the left tensor factor, i.e. the basis is ``|q1 q2>``.
    """
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise ValueError(f"partial_trace needs a 4x4 matrix, got {rho.shape}")
    if keep not in (1, 2):
        raise ValueError(f"keep must be 1 or 2, got {keep!r}")
    r = rho.reshape(2, 2, 2, 2)  # r[i, j, k, l] = <ij| rho |kl>
    if keep == 1:
        return np.einsum("ijkj->ik", r)
    return np.einsum("ijil->jl", r)


def hermiticity_error(h) -> float:
    h = as_matrix(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def hermitian_eigen(h) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot ``a[p, q]`` with a
    diagonal unitary, then applies the real symmetric Jacobi rotation that
    annihilates it.

    Raises
    ------
    ValueError
        If ``h`` is not square or not Hermitian within ``HERMITIAN_TOL``.
    ConvergenceError
        If ``JACOBI_MAX_SWEEPS`` sweeps do not drive the off-diagonal
        Frobenius mass below ``JACOBI_OFF_TOL``.
    """
    a = as_matrix(h)
    n, ncols = a.shape
    if n != ncols:
        raise ValueError(f"matrix must be square, got {a.shape}")
    if hermiticity_error(a) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian")
    a = (a + a.conj().T) / 2
    v = np.eye(n, dtype=np.complex128)

    for _ in range(JACOBI_MAX_SWEEPS + 1):
        if _off_norm(a) < JACOBI_OFF_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                u = np.eye(n, dtype=np.complex128)
                u[p, p] = c
                u[q, q] = c * np.conj(phase)
                u[p, q] = s
                u[q, p] = -s * np.conj(phase)
                a = u.conj().T @ a @ u
                a[p, q] = a[q, p] = 0.0
                v = v @ u
    else:
        raise ConvergenceError(
            f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps "
            f"(off-diagonal mass {_off_norm(a):.3e})"
        )

    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(eigenvalues=w[order], eigenvectors=v[:, order])


def eigvalsh(h) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix."""
    return hermitian_eigen(h).eigenvalues


def clamp_spectrum(w: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Zero out roundoff negatives in ``[-tol, 0)``; reject anything below."""
    w = np.asarray(w, dtype=float)
    if w.size and w.min() < -tol:
        raise ValueError(f"matrix is not positive semidefinite (eigenvalue {w.min():.3e})")
    return np.where(w < 0.0, 0.0, w)


def drop_roundoff(w: np.ndarray) -> np.ndarray:
    """Zero eigenvalues indistinguishable from roundoff relative to the largest one.

    Square roots amplify such noise from ~1e-17 to ~1e-9, so it is removed
    before any ``sqrt`` of a spectrum.
    """
    w = np.asarray(w, dtype=float)
    if not w.size:
        return w
    floor = ROUNDOFF_ULPS * np.finfo(float).eps * max(float(np.max(np.abs(w))), 1e-300)
    return np.where(np.abs(w) <= floor, 0.0, w)


def mat_sqrt_psd(h) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix."""
    eig = hermitian_eigen(h)
    w = drop_roundoff(clamp_spectrum(eig.eigenvalues))
    v = eig.eigenvectors
    return (v * np.sqrt(w)) @ v.conj().T

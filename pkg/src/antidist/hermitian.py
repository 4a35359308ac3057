"""Dense Hermitian matrix routines.

Matrices are plain ``complex128`` numpy arrays. :func:`as_hermitian` is the
single entry point that validates and canonicalizes them; everything else in
this module assumes its output.

The eigensolver is a cyclic complex Jacobi method. For the small matrices in
this package (d up to a few dozen) it is fast enough and delivers
eigenvectors that are orthonormal to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

ASYMMETRY_TOL = 1e-12


class MalformedInputError(ValueError):
    """Input is not a finite, square, (numerically) Hermitian matrix."""


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Cholesky factorization failed."""


def as_hermitian(a, tol: float = ASYMMETRY_TOL) -> np.ndarray:
    """Return the canonical Hermitian form ``(a + a^H) / 2`` of ``a``.

    The result has exactly conjugate-symmetric entries and a real diagonal.
    Raises :class:`MalformedInputError` for non-square or non-finite input or
    when ``max|a - a^H|`` exceeds ``tol``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise MalformedInputError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise MalformedInputError("matrix has non-finite entries")
    asym = np.max(np.abs(a - a.conj().T))
    if asym > tol:
        raise MalformedInputError(f"matrix is not Hermitian (asymmetry {asym:.3e} > {tol:.1e})")
    h = 0.5 * (a + a.conj().T)
    # Exact symmetry: mirror the upper triangle.
    iu = np.triu_indices(h.shape[0], 1)
    h[(iu[1], iu[0])] = h[iu].conj()
    h[np.diag_indices(h.shape[0])] = h.diagonal().real
    return h


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # column k pairs with eigenvalues[k]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(a.diagonal())))


def hermitian_eigen(h, max_sweeps: int = 100) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each rotation first removes the phase of the pivot ``a[p, q]`` with a
    diagonal unitary, then applies the real symmetric Jacobi rotation that
    annihilates it. Sweeps continue until the off-diagonal Frobenius norm
    falls below machine precision relative to the whole matrix.
    """
    a = as_hermitian(h).copy()
    d = a.shape[0]
    v = np.eye(d, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return Spectrum(np.zeros(d), v)
    threshold = np.finfo(float).eps * scale

    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = complex(a[p, q])
                r = abs(apq)
                if r <= 1e-300 or r < 1e-3 * threshold / d:
                    continue
                phase = apq.conjugate() / r
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                tt = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(tt, 1.0)
                s = tt * c
                # G = diag(1, phase) @ [[c, s], [-s, c]] on the (p, q) plane,
                # phase = conj(a_pq)/|a_pq|;  A <- G^H A G, V <- V G
                g10 = -s * phase
                g11 = c * phase
                for m in (a, v):
                    cp, cq = m[:, p].copy(), m[:, q]
                    m[:, p] = c * cp + g10 * cq
                    m[:, q] = s * cp + g11 * cq
                rp, rq = a[p, :].copy(), a[q, :]
                a[p, :] = c * rp + g10.conjugate() * rq
                a[q, :] = s * rp + g11.conjugate() * rq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        if _off_norm(a) > threshold * 10:
            raise np.linalg.LinAlgError("Jacobi iteration did not converge")

    w = a.diagonal().real
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order].copy(), v[:, order])


def min_eigenvalue(h) -> float:
    return float(hermitian_eigen(h).eigenvalues[0])


def is_psd(h, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return min_eigenvalue(h) >= -tol


def trace(h) -> float:
    h = as_hermitian(h)
    return float(np.sum(h.diagonal().real))


def solve_hermitian_linear_system(h_spd, b) -> np.ndarray:
    """Solve ``h_spd @ x = b`` through a Cholesky factorization.

    ``h_spd`` may be real symmetric or complex Hermitian. Raises
    :class:`NotPositiveDefiniteError` when it is not positive definite.
    """
    h_spd = np.asarray(h_spd)
    try:
        factor = scipy.linalg.cho_factor(h_spd, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    except ValueError as exc:
        raise MalformedInputError(str(exc)) from exc
    return scipy.linalg.cho_solve(factor, b)

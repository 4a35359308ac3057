"""Small-matrix Hermitian kernels in extended precision.

Near the end of a barrier solve the slack matrices have eigenvalues of order
1/t next to eigenvalues of order 1, so forming ``rho - Y`` and inverting it in
double precision caps the attainable Newton stationarity at roughly
``eps * t``. These helpers carry the iterate, the slacks and their inverses
as numpy object arrays of ``gmpy2.mpc`` values. Call them inside
:func:`precision` so every operation uses the requested mantissa width.
"""

from __future__ import annotations

import contextlib

import gmpy2
import numpy as np

from .hermitian import NotPositiveDefiniteError


@contextlib.contextmanager
def precision(bits: int):
    with gmpy2.context(gmpy2.get_context(), precision=bits, real_prec=bits, imag_prec=bits):
        yield


def lift(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    out = np.empty(a.shape, dtype=object)
    for idx, z in np.ndenumerate(a):
        out[idx] = gmpy2.mpc(z)
    return out


def lower(a: np.ndarray) -> np.ndarray:
    return np.array([[complex(z) for z in row] for row in a], dtype=complex)


def eye(d: int) -> np.ndarray:
    return lift(np.eye(d))


def dagger(a: np.ndarray) -> np.ndarray:
    return np.array([[z.conjugate() for z in col] for col in a.T], dtype=object)


def cholesky(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a Hermitian positive definite object matrix."""
    d = a.shape[0]
    low = np.empty((d, d), dtype=object)
    zero = gmpy2.mpc(0)
    for j in range(d):
        s = a[j, j].real
        for k in range(j):
            s -= gmpy2.norm(low[j, k])
        if not s > 0:
            raise NotPositiveDefiniteError(f"leading minor {j + 1} is not positive")
        ljj = gmpy2.sqrt(s)
        low[j, j] = gmpy2.mpc(ljj)
        for i in range(j + 1, d):
            acc = a[i, j]
            for k in range(j):
                acc -= low[i, k] * low[j, k].conjugate()
            low[i, j] = acc / ljj
        for i in range(j):
            low[i, j] = zero
    return low


def logdet_from_cholesky(low: np.ndarray):
    return 2 * gmpy2.fsum([gmpy2.log(low[k, k].real) for k in range(low.shape[0])])


def tril_inverse(low: np.ndarray) -> np.ndarray:
    d = low.shape[0]
    inv = np.empty((d, d), dtype=object)
    zero = gmpy2.mpc(0)
    for j in range(d):
        for i in range(d):
            if i < j:
                inv[i, j] = zero
            elif i == j:
                inv[i, j] = 1 / low[i, i]
            else:
                acc = zero
                for k in range(j, i):
                    acc += low[i, k] * inv[k, j]
                inv[i, j] = -acc / low[i, i]
    return inv


def inverse_from_cholesky(low: np.ndarray) -> np.ndarray:
    """``(L L^H)^{-1} = L^{-H} L^{-1}``, with the result made exactly Hermitian."""
    linv = tril_inverse(low)
    out = dagger(linv) @ linv
    return hermitize(out)


def hermitize(a: np.ndarray) -> np.ndarray:
    d = a.shape[0]
    for i in range(d):
        a[i, i] = gmpy2.mpc(a[i, i].real)
        for j in range(i + 1, d):
            a[j, i] = a[i, j].conjugate()
    return a


def trace_real(a: np.ndarray):
    return gmpy2.fsum([a[k, k].real for k in range(a.shape[0])])


def frobenius(a: np.ndarray) -> float:
    return float(gmpy2.sqrt(gmpy2.fsum([gmpy2.norm(z) for z in a.flat])))

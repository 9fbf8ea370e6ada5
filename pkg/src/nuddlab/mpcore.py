"""Configurable-precision scalars and dense complex linear algebra.

All numerical work in this package runs on MPFR/MPC scalars (via gmpy2) at
a process-wide working precision expressed in decimal digits.  Matrices are
small (up to 64x64) and dense, stored as numpy object arrays of ``mpc``
values, so every operation here is exact arithmetic at the ambient
precision rather than machine floating point.

The eigensolver is a cyclic Jacobi iteration for Hermitian matrices; the
SVD is obtained from the eigendecomposition of ``A^dag A``.  Both are
simple and provably accurate at high precision for the matrix sizes this
package uses.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from typing import Iterable, NamedTuple

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

DEFAULT_DIGITS = 120
MIN_DIGITS = 30

_digits = DEFAULT_DIGITS


def _bits_for(digits: int) -> int:
    return int(math.ceil(digits * math.log2(10))) + 10


def set_precision(digits: int) -> int:
    """Set the ambient working precision (decimal digits); returns the old one."""
    if digits < MIN_DIGITS:
        raise ValueError(f"precision must be >= {MIN_DIGITS} digits, got {digits}")
    global _digits
    old = _digits
    _digits = int(digits)
    gmpy2.get_context().precision = _bits_for(_digits)
    return old


def get_precision() -> int:
    """Ambient working precision in decimal digits."""
    return _digits


@contextmanager
def precision(digits: int):
    """Context manager that runs a block at the given working precision."""
    old = set_precision(digits)
    try:
        yield
    finally:
        set_precision(old)


def tol(k: int) -> mpfr:
    """Tolerance 10**(-digits+k) at the ambient precision."""
    return mpfr(10) ** (k - _digits)


def real(x) -> mpfr:
    return mpfr(x)


def comp(re, im=0) -> mpc:
    return mpc(mpfr(re), mpfr(im))


def pi() -> mpfr:
    return gmpy2.const_pi()


def fmt(x, sig: int = 36) -> str:
    """Deterministic scientific-notation rendering of an mpfr value.

    gmpy2's __format__ is not reliable across format specs, so assemble the
    string from gmpy2.digits.  Used for CSV emission, where byte-identical
    output across runs and worker counts is part of the contract.
    """
    x = mpfr(x)
    if gmpy2.is_nan(x):
        return "nan"
    if x == 0:
        return "0." + "0" * (sig - 1) + "e+00"
    digs, exp, _ = gmpy2.digits(x, 10, sig)
    neg = digs.startswith("-")
    if neg:
        digs = digs[1:]
    e = exp - 1
    mant = digs[0] + "." + digs[1:]
    return ("-" if neg else "") + mant + ("e%+03d" % e)


# set up the default context at import time
set_precision(DEFAULT_DIGITS)


class CMatrix:
    """Dense complex matrix over the ambient-precision scalars.

    Entries live in a read-only numpy object array of ``mpc``; dimensions
    are fixed at construction.  ``hermitian`` is a caller-supplied tag used
    by the eigensolver to assert its precondition.
    """

    __slots__ = ("a", "rows", "cols", "hermitian")

    def __init__(self, data, hermitian: bool = False):
        if isinstance(data, CMatrix):
            arr = data.a.copy()
        else:
            arr = np.array(
                [[mpc(v) for v in row] for row in data], dtype=object
            )
        if arr.ndim != 2:
            raise ValueError("CMatrix requires a 2-D array of entries")
        arr.flags.writeable = False
        object.__setattr__(self, "a", arr)
        object.__setattr__(self, "rows", arr.shape[0])
        object.__setattr__(self, "cols", arr.shape[1])
        object.__setattr__(self, "hermitian", bool(hermitian))

    @staticmethod
    def _wrap(arr: np.ndarray, hermitian: bool = False) -> "CMatrix":
        m = object.__new__(CMatrix)
        arr.flags.writeable = False
        object.__setattr__(m, "a", arr)
        object.__setattr__(m, "rows", arr.shape[0])
        object.__setattr__(m, "cols", arr.shape[1])
        object.__setattr__(m, "hermitian", hermitian)
        return m

    def __getitem__(self, ij):
        return self.a[ij]

    def __matmul__(self, other: "CMatrix") -> "CMatrix":
        return matmul(self, other)

    def __add__(self, other: "CMatrix") -> "CMatrix":
        return CMatrix._wrap(self.a + other.a)

    def __sub__(self, other: "CMatrix") -> "CMatrix":
        return CMatrix._wrap(self.a - other.a)

    def __mul__(self, scalar) -> "CMatrix":
        return CMatrix._wrap(self.a * mpc(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "CMatrix":
        return CMatrix._wrap(-self.a)

    def dagger(self) -> "CMatrix":
        return CMatrix._wrap(np.array(
            [[self.a[j, i].conjugate() for j in range(self.rows)]
             for i in range(self.cols)], dtype=object), self.hermitian)

    def trace(self) -> mpc:
        if self.rows != self.cols:
            raise ValueError("trace of a non-square matrix")
        t = mpc(0)
        for i in range(self.rows):
            t += self.a[i, i]
        return t

    def maxabs(self) -> mpfr:
        m = mpfr(0)
        for v in self.a.flat:
            av = abs(v)
            if av > m:
                m = av
        return m

    def tagged_hermitian(self) -> "CMatrix":
        """Same matrix with the Hermitian tag set (caller asserts it)."""
        return CMatrix._wrap(self.a.copy(), hermitian=True)

    def __repr__(self):
        return f"CMatrix({self.rows}x{self.cols}, hermitian={self.hermitian})"


def zeros(rows: int, cols: int) -> CMatrix:
    z = mpc(0)
    return CMatrix._wrap(np.full((rows, cols), z, dtype=object))


def identity(n: int) -> CMatrix:
    arr = np.full((n, n), mpc(0), dtype=object)
    one = mpc(1)
    for i in range(n):
        arr[i, i] = one
    return CMatrix._wrap(arr, hermitian=True)


def from_rows(rows: Iterable[Iterable], hermitian: bool = False) -> CMatrix:
    return CMatrix(rows, hermitian=hermitian)


def matmul(a: CMatrix, b: CMatrix) -> CMatrix:
    """Exact matrix product at ambient precision."""
    if a.cols != b.rows:
        raise ValueError(
            f"matmul dimension mismatch: {a.rows}x{a.cols} @ {b.rows}x{b.cols}"
        )
    return CMatrix._wrap(a.a @ b.a)


def kron(a: CMatrix, b: CMatrix) -> CMatrix:
    """Kronecker product with a's index slowest."""
    return CMatrix._wrap(np.kron(a.a, b.a),
                         hermitian=a.hermitian and b.hermitian)


def partial_trace_system(u: CMatrix, dS: int, dB: int) -> CMatrix:
    """Trace out the (slowest-index) system factor of a dS*dB square matrix."""
    n = dS * dB
    if u.rows != n or u.cols != n:
        raise ValueError(f"expected a {n}x{n} matrix, got {u.rows}x{u.cols}")
    out = np.full((dB, dB), mpc(0), dtype=object)
    for s in range(dS):
        out = out + u.a[s * dB:(s + 1) * dB, s * dB:(s + 1) * dB]
    return CMatrix._wrap(out)


def _check_hermitian(h: CMatrix) -> mpfr:
    if h.rows != h.cols:
        raise ValueError("eigendecomposition requires a square matrix")
    hmax = h.maxabs()
    lim = tol(8) * max(hmax, mpfr(1))
    for i in range(h.rows):
        for j in range(i, h.cols):
            if abs(h.a[i, j] - h.a[j, i].conjugate()) > lim:
                raise ValueError(
                    f"matrix is not Hermitian at ({i},{j}) within tolerance"
                )
    return hmax


def hermitian_eig(h: CMatrix) -> tuple[list[mpfr], CMatrix]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, V) with columns of V the eigenvectors,
    iterating sweeps until every off-diagonal magnitude is below
    10**(-digits+4) * max|H|.
    """
    hmax = _check_hermitian(h)
    n = h.rows
    A = np.array([[mpc(v) for v in row] for row in h.a], dtype=object)
    V = np.full((n, n), mpc(0), dtype=object)
    for i in range(n):
        V[i, i] = mpc(1)
    if hmax == 0:
        return [mpfr(0)] * n, CMatrix._wrap(V)

    thresh = tol(4) * hmax
    half = mpfr(1) / 2
    for _sweep in range(200):
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = A[p, q]
                m = abs(g)
                if m <= thresh:
                    continue
                alpha = mpfr(A[p, p].real)
                beta = mpfr(A[q, q].real)
                theta = gmpy2.atan2(2 * m, beta - alpha) * half
                c = gmpy2.cos(theta)
                s = gmpy2.sin(theta)
                u = g / m  # e^{i phi}
                su = s * u
                suc = s * u.conjugate()
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - suc * colq
                A[:, q] = su * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - su * rowq
                A[q, :] = suc * rowp + c * rowq
                # exact forms for the rotated 2x2 block keep A Hermitian
                cs2 = 2 * c * s * m
                app = c * c * alpha - cs2 + s * s * beta
                aqq = s * s * alpha + cs2 + c * c * beta
                A[p, p] = mpc(app)
                A[q, q] = mpc(aqq)
                A[p, q] = mpc(0)
                A[q, p] = mpc(0)
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - suc * vq
                V[:, q] = su * vp + c * vq
        off = mpfr(0)
        for p in range(n - 1):
            for q in range(p + 1, n):
                m = abs(A[p, q])
                if m > off:
                    off = m
        if off <= thresh:
            break
    else:
        raise ArithmeticError("Jacobi eigensolver failed to converge")

    lam = [mpfr(A[i, i].real) for i in range(n)]
    order = sorted(range(n), key=lambda i: lam[i])
    lam_sorted = [lam[i] for i in order]
    V_sorted = np.empty((n, n), dtype=object)
    for new, old in enumerate(order):
        V_sorted[:, new] = V[:, old]
    return lam_sorted, CMatrix._wrap(V_sorted)


def singular_values(a: CMatrix) -> list[mpfr]:
    """Singular values (nonincreasing), via the eigenvalues of A^dag A."""
    ata = matmul(a.dagger(), a)
    lam, _ = hermitian_eig(ata.tagged_hermitian())
    zero = mpfr(0)
    svals = [gmpy2.sqrt(v) if v > 0 else zero for v in lam]
    svals.reverse()
    return svals


class Norms(NamedTuple):
    frobenius: mpfr
    nuclear: mpfr
    spectral: mpfr


def frobenius_norm(a: CMatrix) -> mpfr:
    acc = mpfr(0)
    for v in a.a.flat:
        acc += gmpy2.norm(mpc(v))  # |v|^2
    return gmpy2.sqrt(acc)


def norms(a: CMatrix) -> Norms:
    """Frobenius, nuclear (sum of singular values) and spectral norms."""
    fro = frobenius_norm(a)
    sv = singular_values(a)
    nuc = mpfr(0)
    for v in sv:
        nuc += v
    spec = sv[0] if sv else mpfr(0)
    return Norms(fro, nuc, spec)

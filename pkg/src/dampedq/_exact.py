"""Scalar and matrix helpers shared by the exact (Fraction) and float paths."""

from fractions import Fraction
from numbers import Rational
import math

import numpy as np


def is_exact(*values):
    """True if every value is an int or a Fraction (bools excluded)."""
    return all(isinstance(v, Rational) and not isinstance(v, bool) for v in values)


def to_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, np.integer):
        return Fraction(int(v))
    return Fraction(v)


def exact_sqrt(q):
    """Square root of a nonnegative rational, or None if it is irrational."""
    q = to_fraction(q)
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def as_matrix(data, exact=None):
    """Coerce nested data to a square array.

    Exact inputs (ints/Fractions only) become object arrays of Fractions,
    everything else becomes complex128.
    """
    arr = np.asarray(data, dtype=object)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if exact is None:
        exact = all(is_exact(v) for v in arr.flat)
    if exact:
        out = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            out[idx] = to_fraction(v)
        return out
    return np.asarray([[complex(v) for v in row] for row in arr.tolist()], dtype=complex)


def zeros(n, exact):
    if exact:
        out = np.empty((n, n), dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros((n, n), dtype=complex)


def identity(n, exact):
    out = zeros(n, exact)
    for i in range(n):
        out[i, i] = Fraction(1) if exact else 1.0
    return out


def is_object(m):
    return m.dtype == object


def inverse(m):
    """Matrix inverse; Gauss-Jordan with exact pivots for object arrays.

    Returns None for a singular matrix.
    """
    n = m.shape[0]
    if not is_object(m):
        if n == 0:
            return m.copy()
        if not np.any(m) or np.linalg.cond(m) > 1e13:
            return None
        return np.linalg.inv(m)
    work = np.concatenate([m.copy(), identity(n, True)], axis=1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r, col] != 0), None)
        if pivot is None:
            return None
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
        work[col] = work[col] / work[col, col]
        for r in range(n):
            if r != col and work[r, col] != 0:
                work[r] = work[r] - work[r, col] * work[col]
    return work[:, n:]


def max_abs(m):
    """Largest entry magnitude; exact zero stays an exact Fraction."""
    if m.size == 0:
        return Fraction(0)
    if is_object(m):
        return max(abs(v) for v in m.flat)
    return float(np.abs(m).max())


def to_complex(m):
    if is_object(m):
        return np.asarray([[complex(v) for v in row] for row in m], dtype=complex)
    return np.asarray(m, dtype=complex)


def complex_pair(z):
    """[re, im] for JSON output."""
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_pairs(m):
    return [[complex_pair(v) for v in row] for row in to_complex(m)]


def matrix_from_pairs(rows):
    return np.asarray([[complex(re, im) for re, im in row] for row in rows], dtype=complex)

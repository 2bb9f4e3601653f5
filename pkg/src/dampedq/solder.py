"""Quadratic Lagrangians and the soldering of chiral doublets.

A :class:`QuadraticLagrangian` in ``n`` variables is

    L = 1/2 xdot.M.xdot + x.A.xdot - 1/2 x.K.x

with ``M``, ``K`` symmetric and ``A`` antisymmetric.  A symmetric part of ``A``
multiplies ``x_i xdot_j + x_j xdot_i = d/dt(x_i x_j)`` and is dropped on
construction, so two Lagrangians that differ by a total derivative of a
quadratic form compare equal coefficientwise.

Soldering fuses a doublet ``L+(y)``, ``L-(z)`` of opposite chirality into the
composite Lagrangian of the doubled oscillator in ``x = y - z``.  Both routes
are implemented as linear algebra on the coefficient blocks:

* auxiliary route: couple a gauge field ``B`` to the Euler-Lagrange currents,
  eliminate it through its algebraic equation of motion and read off the
  residual, which must depend on ``y - z`` only;
* direct route: substitute ``z = y - x`` and eliminate ``y``, which has no
  kinetic term once the chiral ``y ydot`` terms cancel.

Matrices hold ``Fraction`` objects when every input is rational and real, and
``complex128`` otherwise.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _exact
from .errors import (
    DegenerateSum,
    DimensionMismatch,
    GaugeDependence,
    KineticResidue,
    NonPhysical,
    NotFirstOrder,
)
from .params import DhoParams

# coefficient tolerance for the float path (scaled by the largest coefficient, floored at 1)
COEFF_TOL = 1e-12

METRIC = ((1, 0), (0, -1))
EPSILON = ((0, 1), (-1, 0))
SIGMA_X = ((0, 1), (1, 0))


def _const(rows, exact):
    return _exact.as_matrix(rows, exact=exact)


def _scaled(rows, c, exact):
    base = _const(rows, exact)
    return base * (_exact.to_fraction(c) if exact else complex(c))


@dataclass(frozen=True)
class QuadraticLagrangian:
    M: np.ndarray
    A: np.ndarray
    K: np.ndarray
    labels: tuple = field(default=None)

    def __post_init__(self):
        exact = all(_exact.is_exact(v) for m in (self.M, self.A, self.K) for v in np.asarray(m, dtype=object).flat)
        M = _exact.as_matrix(self.M, exact)
        A = _exact.as_matrix(self.A, exact)
        K = _exact.as_matrix(self.K, exact)
        if not (M.shape == A.shape == K.shape):
            raise DimensionMismatch(f"coefficient shapes differ: {M.shape}, {A.shape}, {K.shape}")
        half = Fraction(1, 2) if exact else 0.5
        M = (M + M.T) * half
        K = (K + K.T) * half
        A = (A - A.T) * half
        for arr in (M, A, K):
            arr.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "K", K)
        n = M.shape[0]
        labels = tuple(self.labels) if self.labels is not None else tuple(f"q{i + 1}" for i in range(n))
        if len(labels) != n:
            raise DimensionMismatch(f"{len(labels)} labels for {n} variables")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.M.shape[0]

    @property
    def exact(self):
        return _exact.is_object(self.M)

    @property
    def first_order(self):
        return not np.any(self.M != 0)

    def evaluate(self, x, xdot):
        """Value on configurations ``x``, ``xdot`` of shape ``(n,)`` or ``(T, n)``."""
        x = np.asarray(x)
        xdot = np.asarray(xdot)
        M, A, K = (_exact.to_complex(m) for m in (self.M, self.A, self.K))
        kin = 0.5 * np.einsum("...i,ij,...j->...", xdot, M, xdot)
        mix = np.einsum("...i,ij,...j->...", x, A, xdot)
        pot = 0.5 * np.einsum("...i,ij,...j->...", x, K, x)
        return kin + mix - pot

    def transformed(self, S, labels=None):
        """Pull back along the linear substitution ``x_old = S @ x_new``."""
        S = np.asarray(S, dtype=object if self.exact else complex)
        if S.shape[0] != self.n:
            raise DimensionMismatch(f"substitution has {S.shape[0]} rows for {self.n} variables")
        return QuadraticLagrangian(S.T @ self.M @ S, S.T @ self.A @ S, S.T @ self.K @ S, labels)

    def __add__(self, other):
        if other.n != self.n:
            raise DimensionMismatch(f"{self.n} vs {other.n} variables")
        return QuadraticLagrangian(self.M + other.M, self.A + other.A, self.K + other.K, self.labels)

    def __sub__(self, other):
        if other.n != self.n:
            raise DimensionMismatch(f"{self.n} vs {other.n} variables")
        return QuadraticLagrangian(self.M - other.M, self.A - other.A, self.K - other.K, self.labels)

    def conjugate(self):
        if self.exact:
            return self
        return QuadraticLagrangian(self.M.conj(), self.A.conj(), self.K.conj(), self.labels)

    def max_coefficient(self):
        return max(_exact.max_abs(m) for m in (self.M, self.A, self.K))

    def max_imag(self):
        if self.exact:
            return 0.0
        return float(max(np.abs(m.imag).max() for m in (self.M, self.A, self.K)))

    def to_dict(self):
        return {
            "n": self.n,
            "M": _exact.matrix_to_pairs(self.M),
            "A": _exact.matrix_to_pairs(self.A),
            "K": _exact.matrix_to_pairs(self.K),
            "labels": list(self.labels),
        }

    @classmethod
    def from_dict(cls, data):
        L = cls(
            _exact.matrix_from_pairs(data["M"]),
            _exact.matrix_from_pairs(data["A"]),
            _exact.matrix_from_pairs(data["K"]),
            data.get("labels"),
        )
        if L.n != data.get("n", L.n):
            raise DimensionMismatch(f"n={data['n']} but matrices are {L.n}x{L.n}")
        return L


def block_diag(*parts):
    """Direct sum of Lagrangians in disjoint variables."""
    exact = all(p.exact for p in parts)
    n = sum(p.n for p in parts)
    out = [_exact.zeros(n, exact) for _ in range(3)]
    labels = []
    i = 0
    for p in parts:
        for dst, src in zip(out, (p.M, p.A, p.K)):
            dst[i:i + p.n, i:i + p.n] = src
        labels.extend(p.labels)
        i += p.n
    return QuadraticLagrangian(*out, tuple(labels))


def composite_lagrangian(p):
    """Doubled-oscillator Lagrangian in hyperbolic coordinates ``(x1, x2)``.

    ``M = m g``, ``A = -(gamma/2) eps``, ``K = k g`` with ``g = diag(1, -1)``.
    """
    exact = p.exact
    half = Fraction(1, 2) if exact else 0.5
    return QuadraticLagrangian(
        _scaled(METRIC, p.m, exact),
        _scaled(EPSILON, -p.gamma * half, exact),
        _scaled(METRIC, p.k, exact),
        ("x1", "x2"),
    )


def physical_lagrangian(p):
    """Doubled-oscillator Lagrangian in the original ``(x, y)`` pair.

    ``L = m xdot ydot + gamma/2 (x ydot - xdot y) - k x y``.
    """
    exact = p.exact
    half = Fraction(1, 2) if exact else 0.5
    return QuadraticLagrangian(
        _scaled(SIGMA_X, p.m, exact),
        _scaled(EPSILON, p.gamma * half, exact),
        _scaled(SIGMA_X, p.k, exact),
        ("x", "y"),
    )


def hyperbolic_substitution(exact=False):
    """Matrix ``S`` with ``(x, y) = S @ (x1, x2)``."""
    if exact:
        raise ValueError("the hyperbolic substitution involves sqrt(2)")
    r = 1 / np.sqrt(2.0)
    return np.array([[r, r], [r, -r]], dtype=complex)


def chiral_lagrangian(sign, c):
    """Member of the doublet with chirality ``sign`` (+1 or -1).

    ``M = 0``, ``A = sign (Gamma/2) eps``, ``K = k_sign g``.  On the complex
    branch the minus member is the coefficientwise conjugate of the plus one.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    exact = c.exact
    half = Fraction(1, 2) if exact else 0.5
    k_sign = c.k_plus if sign > 0 else c.k_minus
    suffix = "+" if sign > 0 else "-"
    return QuadraticLagrangian(
        _exact.zeros(2, exact),
        _scaled(EPSILON, sign * c.Gamma * half, exact),
        _scaled(METRIC, k_sign, exact),
        (f"x1{suffix}", f"x2{suffix}"),
    )


def first_order_lagrangian(g, kappa):
    """``L+ = -i g x1 x2dot - kappa/2 (x1**2 - x2**2)`` before canonicalization.

    Differs from ``chiral_lagrangian(+1, ...)`` by ``-i g/2 d/dt(x1 x2)``.
    """
    A = np.array([[0, -1j * g], [0, 0]], dtype=complex)
    return QuadraticLagrangian(np.zeros((2, 2)), A, complex(kappa) * np.array(METRIC, dtype=complex), ("x1", "x2"))


def euler_lagrange_current(L, x, xdot):
    """Response ``dL/dx - d/dt dL/dxdot`` of a first-order Lagrangian: ``2 A xdot - K x``."""
    if not L.first_order:
        raise NotFirstOrder("current defined for Lagrangians without kinetic term")
    A, K = _exact.to_complex(L.A), _exact.to_complex(L.K)
    return 2 * np.asarray(xdot) @ A.T - np.asarray(x) @ K.T


def noether_current(L, state):
    """Current ``J_i = +-Gamma sigma_ij xdot_j - k+- x_i`` of a chiral Lagrangian.

    Computed as the metric-lowered Euler-Lagrange response ``g (2 A xdot - K x)``,
    which is the stated current for any chiral member since ``g eps = sigma``.
    Vanishes along solutions of the corresponding first-order flow.
    """
    if L.n != 2:
        raise DimensionMismatch("chiral currents are defined for two variables")
    x = np.array([state.x1, state.x2], dtype=complex)
    v = np.array([state.v1, state.v2], dtype=complex)
    return np.array(METRIC, dtype=complex) @ euler_lagrange_current(L, x, v)


def auxiliary_lagrangian(Lp, Lm):
    """``L(y, z, B) = L+(y) + L-(z) - B.(J+(y) + J-(z)) - 1/2 B.(K+ + K-).B``.

    Variables are ordered ``(y..., z..., B...)``.  The currents are the
    Euler-Lagrange responses ``J = 2 A xdot - K x``; for a chiral doublet the
    ``B B`` block is ``(k+ + k-) g``, the pseudo-Euclidean contraction that makes
    the sum invariant under ``y, z, B -> y + Lam, z + Lam, B + Lam``.
    """
    if Lp.n != Lm.n:
        raise DimensionMismatch(f"{Lp.n} vs {Lm.n} variables")
    if not (Lp.first_order and Lm.first_order):
        raise NotFirstOrder("soldering needs first-order (chiral) Lagrangians")
    n = Lp.n
    exact = Lp.exact and Lm.exact
    N = 3 * n
    M = _exact.zeros(N, exact)
    A = _exact.zeros(N, exact)
    K = _exact.zeros(N, exact)
    Y, Z, B = slice(0, n), slice(n, 2 * n), slice(2 * n, 3 * n)
    A[Y, Y], A[Z, Z] = Lp.A, Lm.A
    A[B, Y], A[B, Z] = -2 * Lp.A, -2 * Lm.A
    K[Y, Y], K[Z, Z] = Lp.K, Lm.K
    K[B, Y], K[Y, B] = -Lp.K, -Lp.K
    K[B, Z], K[Z, B] = -Lm.K, -Lm.K
    K[B, B] = Lp.K + Lm.K
    labels = [f"y{i + 1}" for i in range(n)] + [f"z{i + 1}" for i in range(n)] + [f"B{i + 1}" for i in range(n)]
    return QuadraticLagrangian(M, A, K, tuple(labels))


def eliminate(L, indices):
    """Integrate out variables that enter without time derivatives.

    The eliminated block ``q`` may couple to velocities of the kept block
    ``p`` (after moving ``p.A.qdot`` onto ``qdot``-free form by parts) but must
    have no kinetic term and no ``q qdot`` term.  With ``C = 2 A_qp`` the
    equation of motion ``C pdot - K_qp p - K_qq q = 0`` is solved for ``q``
    and substituted back.
    """
    idx = list(indices)
    keep = [i for i in range(L.n) if i not in idx]
    tol = _tol(L)
    if _exact.max_abs(L.M[np.ix_(idx, range(L.n))]) > tol:
        raise KineticResidue("eliminated variables carry a kinetic term")
    if _exact.max_abs(L.A[np.ix_(idx, idx)]) > tol:
        raise KineticResidue("eliminated variables keep a first-order self-coupling")
    C = 2 * L.A[np.ix_(idx, keep)]
    Kqp = L.K[np.ix_(idx, keep)]
    Kqq = L.K[np.ix_(idx, idx)]
    Kinv = _exact.inverse(Kqq)
    if Kinv is None:
        raise DegenerateSum("the potential block of the eliminated variables is singular")
    M = L.M[np.ix_(keep, keep)] + C.T @ Kinv @ C
    A = L.A[np.ix_(keep, keep)] - Kqp.T @ Kinv @ C
    K = L.K[np.ix_(keep, keep)] - Kqp.T @ Kinv @ Kqp
    return QuadraticLagrangian(M, A, K, tuple(L.labels[i] for i in keep))


def _tol(L):
    if L.exact:
        return 0
    return COEFF_TOL * max(1.0, float(L.max_coefficient()))


def _difference_substitution(n, exact):
    """``(y, z) = T @ (x, w)`` with ``y = w`` and ``z = w - x``."""
    T = _exact.zeros(2 * n, exact)
    one = Fraction(1) if exact else 1.0
    for i in range(n):
        T[i, n + i] = one
        T[n + i, i] = -one
        T[n + i, n + i] = one
    return T


@dataclass(frozen=True)
class SolderReport:
    residual_L: QuadraticLagrangian
    identified: DhoParams
    max_coefficient_deviation: object

    def to_dict(self):
        dev = self.max_coefficient_deviation
        return {
            "residual_L": self.residual_L.to_dict(),
            "identified": {"m": _num(self.identified.m), "gamma": _num(self.identified.gamma), "k": _num(self.identified.k)},
            "max_coefficient_deviation": _num(dev),
        }


def _num(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else float(v)
    return float(v)


def identify(residual):
    """Read ``(m, gamma, k)`` off a Lagrangian of composite form."""
    if residual.n != 2:
        raise DimensionMismatch("composite form has two variables")
    m, a01, k = residual.M[0, 0], residual.A[0, 1], residual.K[0, 0]
    gamma = -2 * a01
    if not residual.exact:
        scale = max(1.0, float(residual.max_coefficient()))
        if residual.max_imag() > COEFF_TOL * scale:
            raise NonPhysical(f"soldered coefficients carry imaginary part {residual.max_imag():.3e}")
        m, gamma, k = float(m.real), float(gamma.real), float(k.real)
    return DhoParams(m, gamma, k)


def _finish(residual):
    residual = QuadraticLagrangian(residual.M, residual.A, residual.K, ("x1", "x2"))
    identified = identify(residual)
    _, dev = equivalent_mod_total_derivative(residual, composite_lagrangian(identified))
    return SolderReport(residual, identified, dev)


def _check_doublet(Lp, Lm):
    if Lp.n != 2 or Lm.n != 2:
        raise DimensionMismatch("chiral doublet members have two variables")
    if not (Lp.first_order and Lm.first_order):
        raise NotFirstOrder("soldering needs first-order (chiral) Lagrangians")


def solder_auxiliary(Lp, Lm):
    """Solder through the gauge field ``B``; see :func:`auxiliary_lagrangian`."""
    _check_doublet(Lp, Lm)
    n = Lp.n
    L6 = auxiliary_lagrangian(Lp, Lm)
    Lyz = eliminate(L6, range(2 * n, 3 * n))
    Lxw = Lyz.transformed(_difference_substitution(n, Lyz.exact))
    W = list(range(n, 2 * n))
    tol = _tol(Lxw)
    leak = max(_exact.max_abs(m[np.ix_(W, range(2 * n))]) for m in (Lxw.M, Lxw.A, Lxw.K))
    if leak > tol:
        raise GaugeDependence(f"residual depends on y + z (coefficient {float(leak):.3e})")
    X = list(range(n))
    residual = QuadraticLagrangian(*(m[np.ix_(X, X)] for m in (Lxw.M, Lxw.A, Lxw.K)))
    return _finish(residual)


def solder_direct(Lp, Lm):
    """Solder by substituting ``z = y - x`` and eliminating ``y``."""
    _check_doublet(Lp, Lm)
    n = Lp.n
    Lyz = block_diag(Lp, Lm)
    Lxy = Lyz.transformed(_difference_substitution(n, Lyz.exact))
    residual = eliminate(Lxy, range(n, 2 * n))
    return _finish(residual)


def equivalent_mod_total_derivative(L1, L2, tol=COEFF_TOL):
    """Compare canonical coefficients.

    Returns ``(equal, deviation)`` where the deviation is the largest
    coefficient difference divided by ``max(1, largest coefficient)``; exact
    inputs give an exact deviation.
    """
    if L1.n != L2.n:
        raise DimensionMismatch(f"{L1.n} vs {L2.n} variables")
    exact = L1.exact and L2.exact
    diff = max(_exact.max_abs(a - b) for a, b in zip((L1.M, L1.A, L1.K), (L2.M, L2.A, L2.K)))
    scale = max(1, L1.max_coefficient(), L2.max_coefficient())
    if exact:
        dev = Fraction(diff) / Fraction(scale)
        return dev == 0 if tol == 0 else dev <= tol, dev
    dev = float(diff) / float(scale)
    return dev <= tol, dev


def su11_generator():
    return np.array(SIGMA_X, dtype=float)


def shift_invariance_residual(L, direction, lam, path, nodes):
    """Gauge-variation residual of ``L`` under ``X -> X + direction * lam(t)``.

    ``lam`` is a :class:`PolynomialPath` in ``k`` components and ``direction``
    an ``(L.n, k)`` embedding.  The variation's linear part
    ``X.a(t) + Xdot.b(t)`` is reduced by parts to ``X.(a - bdot)``; the
    quadratic part depends on ``t`` only.  Both pieces beyond total
    derivatives must vanish, so the return value is ``max_t |X(t).(a - bdot)(t)|``
    on the given path.
    """
    E = np.asarray(direction, dtype=complex)
    M, A, K = (_exact.to_complex(m) for m in (L.M, L.A, L.K))
    lam_v = lam.values(nodes) @ E.T
    lam_d = lam.derivative(1).values(nodes) @ E.T
    lam_dd = lam.derivative(2).values(nodes) @ E.T
    # a = A lamdot - K lam ; b = M lamdot - A lam ; a - bdot = 2 A lamdot - K lam - M lamddot
    g = lam_d @ (2 * A).T - lam_v @ K.T - lam_dd @ M.T
    X = path.values(nodes)
    return float(np.abs(np.einsum("ti,ti->t", X, g)).max())


@dataclass(frozen=True)
class PolynomialPath:
    """Vector polynomial ``x_i(t) = sum_k coeffs[i, k] t**k``."""

    coeffs: np.ndarray

    @classmethod
    def random(cls, rng, n, degree=6, scale=1.0, complex_=False):
        c = rng.uniform(-1, 1, size=(n, degree + 1))
        if complex_:
            c = c + 1j * rng.uniform(-1, 1, size=(n, degree + 1))
        return cls(scale * c / (degree + 1))

    @property
    def n(self):
        return self.coeffs.shape[0]

    def values(self, t):
        t = np.asarray(t, dtype=float)
        powers = t[:, None] ** np.arange(self.coeffs.shape[1])[None, :]
        return powers @ self.coeffs.T

    def derivative(self, order=1):
        c = self.coeffs
        for _ in range(order):
            if c.shape[1] == 1:
                c = np.zeros_like(c)
            else:
                c = c[:, 1:] * np.arange(1, c.shape[1])[None, :]
        return PolynomialPath(c)


def quadrature_nodes(npts=7):
    """Gauss-Legendre nodes and weights on ``[0, 1]``; exact to degree ``2 npts - 1``."""
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1), 0.5 * w


def action(L, path, npts=7):
    """Integral of ``L`` over ``t in [0, 1]`` along a polynomial path."""
    t, w = quadrature_nodes(npts)
    vals = L.evaluate(path.values(t), path.derivative().values(t))
    return complex(np.sum(w * vals))

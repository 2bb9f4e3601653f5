"""Hamiltonian side of the doubled oscillator.

Quadratic Hamiltonians are stored as a symmetric matrix ``H`` over canonical
coordinates ``z = (x_1..x_n, p_1..p_n)`` with value ``z^T H z / 2``.  Linear
maps ``z_new = T z_old`` are canonical when ``T B T^T = J``, where ``B`` is the
bracket matrix of the old coordinates (``J`` for ordinary phase space).

The composite Hamiltonian of the doubled oscillator splits into two complex
oscillators ``H_pm = p_pm**2/2 + omega_pm**2 x_pm**2/2`` with
``omega_pm = Omega +- i gamma/2m``.  The same ``H_+`` follows from a single
first-order chiral Lagrangian once its non-standard bracket
``{x_1, x_2} = -(i/g) eps_12`` is mapped to ``{x, p_x} = 1``.

Square roots of complex numbers use the principal branch.  Canonicity of every
map is checked rather than assumed.
"""

from dataclasses import dataclass, field
import cmath

import numpy as np

from . import _exact
from .errors import BranchInconsistency, DimensionMismatch, ZeroCoupling
from .params import frequencies
from .solder import EPSILON, composite_lagrangian

SYMPLECTIC_TOL = 1e-12


def symplectic_unit(n, exact=False):
    """``J = [[0, I], [-I, 0]]`` for ``n`` degrees of freedom."""
    J = _exact.zeros(2 * n, exact)
    one = _exact.identity(n, exact)
    J[:n, n:] = one
    J[n:, :n] = -one
    return J


def principal_sqrt(z):
    """Principal square root; a negative real gets a positive imaginary root."""
    z = complex(z)
    if z.imag == 0:
        z = complex(z.real, 0.0)  # drop a signed zero
    return cmath.sqrt(z)


@dataclass(frozen=True)
class QuadraticHamiltonian:
    H: np.ndarray
    labels: tuple = field(default=None)

    def __post_init__(self):
        H = np.asarray(self.H)
        exact = _exact.is_object(H) or all(_exact.is_exact(v) for v in np.asarray(H, dtype=object).flat)
        H = _exact.as_matrix(H, exact)
        if H.shape[0] % 2:
            raise DimensionMismatch(f"phase space dimension {H.shape[0]} is odd")
        H = (H + H.T) * (_exact.to_fraction(1) / 2 if exact else 0.5)
        H.setflags(write=False)
        object.__setattr__(self, "H", H)
        n = H.shape[0] // 2
        if self.labels is None:
            labels = tuple(f"x{i + 1}" for i in range(n)) + tuple(f"p{i + 1}" for i in range(n))
        else:
            labels = tuple(self.labels)
        if len(labels) != 2 * n:
            raise DimensionMismatch(f"{len(labels)} labels for {2 * n} coordinates")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.H.shape[0] // 2

    @property
    def exact(self):
        return _exact.is_object(self.H)

    def value(self, z):
        """``z^T H z / 2`` for ``z`` of shape ``(2n,)`` or ``(N, 2n)``."""
        H = _exact.to_complex(self.H)
        return 0.5 * np.einsum("...i,ij,...j->...", np.asarray(z), H, np.asarray(z))

    def generator(self):
        """``F = J H`` so that Hamilton's equations read ``z' = F z``."""
        return symplectic_unit(self.n, self.exact) @ self.H

    def transformed(self, T, labels=None):
        """Hamiltonian in the coordinates ``z_new = T z_old``."""
        T = np.asarray(T, dtype=object if self.exact else complex)
        if T.shape != self.H.shape:
            raise DimensionMismatch(f"map shape {T.shape} vs Hamiltonian {self.H.shape}")
        Ti = _exact.inverse(T)
        if Ti is None:
            raise ValueError("canonical map is singular")
        return QuadraticHamiltonian(Ti.T @ self.H @ Ti, labels)

    def block(self, index):
        """One-degree-of-freedom restriction to ``(x_index, p_index)``."""
        n = self.n
        idx = [index, n + index]
        return QuadraticHamiltonian(self.H[np.ix_(idx, idx)], (self.labels[index], self.labels[n + index]))

    def to_dict(self):
        return {"n": self.n, "H": _exact.matrix_to_pairs(self.H), "labels": list(self.labels)}

    @classmethod
    def from_dict(cls, data):
        return cls(_exact.matrix_from_pairs(data["H"]), data.get("labels"))


@dataclass(frozen=True)
class CanonicalMap:
    """Linear map ``z_new = T z_old``; ``source_bracket`` is the old bracket matrix."""

    T: np.ndarray
    source_bracket: np.ndarray = None
    labels: tuple = None

    def __post_init__(self):
        T = np.array(self.T, dtype=complex)
        if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] % 2:
            raise DimensionMismatch(f"map must be square of even size, got {T.shape}")
        B = symplectic_unit(T.shape[0] // 2) if self.source_bracket is None else self.source_bracket
        B = np.array(B, dtype=complex)
        if B.shape != T.shape:
            raise DimensionMismatch(f"bracket shape {B.shape} vs map {T.shape}")
        for arr in (T, B):
            arr.setflags(write=False)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "source_bracket", B)

    @property
    def n(self):
        return self.T.shape[0] // 2

    def target_bracket(self):
        return self.T @ self.source_bracket @ self.T.T

    def symplectic_residual(self):
        """``max |T B T^T - J|``."""
        return float(np.abs(self.target_bracket() - symplectic_unit(self.n)).max())

    def inverse(self):
        return np.linalg.inv(self.T)

    def to_dict(self):
        return {
            "n": self.n,
            "T": _exact.matrix_to_pairs(self.T),
            "source_bracket": _exact.matrix_to_pairs(self.source_bracket),
            "labels": list(self.labels) if self.labels is not None else None,
            "symplectic_residual": self.symplectic_residual(),
        }


def legendre(L):
    """Legendre transform of a quadratic Lagrangian with invertible ``M``.

    ``p = M xdot + A^T x`` and ``H = (p - A^T x) M^-1 (p - A^T x)/2 + x K x/2``.
    """
    Mi = _exact.inverse(L.M)
    if Mi is None:
        raise ValueError("kinetic matrix is singular; use first_order_hamiltonian for first-order forms")
    n = L.n
    H = _exact.zeros(2 * n, L.exact)
    H[:n, :n] = L.K + L.A @ Mi @ L.A.T
    H[:n, n:] = -L.A @ Mi
    H[n:, :n] = -Mi @ L.A.T
    H[n:, n:] = Mi
    labels = tuple(L.labels) + tuple(f"p_{lab}" for lab in L.labels)
    return QuadraticHamiltonian(H, labels)


def legendre_composite(p):
    """Composite Hamiltonian over ``(x1, x2, p1, p2)``.

    ``p1 = m x1' + gamma x2/2`` and ``p2 = -m x2' - gamma x1/2``; the kinetic
    term of ``x2`` keeps its negative sign.
    """
    return legendre(composite_lagrangian(p))


def euler_lagrange_generator(L):
    """``F`` of the Euler-Lagrange flow over ``(x, xdot)``: ``M x'' = 2A x' - K x``."""
    Mi = _exact.inverse(L.M)
    if Mi is None:
        raise ValueError("kinetic matrix is singular")
    n = L.n
    F = _exact.zeros(2 * n, L.exact)
    F[:n, n:] = _exact.identity(n, L.exact)
    F[n:, :n] = -Mi @ L.K
    F[n:, n:] = 2 * Mi @ L.A
    return F


def hamilton_el_residual(L):
    """Mismatch between Hamilton's equations and the Euler-Lagrange flow.

    With ``Q = [[I, 0], [A^T, M]]`` taking ``(x, xdot)`` to ``(x, p)`` the two
    generators must satisfy ``J H Q = Q F``.  Exact inputs give an exact zero.
    """
    n = L.n
    Q = _exact.zeros(2 * n, L.exact)
    Q[:n, :n] = _exact.identity(n, L.exact)
    Q[n:, :n] = L.A.T
    Q[n:, n:] = L.M
    diff = legendre(L).generator() @ Q - Q @ euler_lagrange_generator(L)
    return _exact.max_abs(diff)


def canonical_map_ct(p):
    """Complex canonical map ``(x1, x2, p1, p2) -> (x+, x-, p+, p-)``.

    ``x_pm = sqrt(m Omega / 2 w_pm) x1 +- i sqrt(1 / 2 m Omega w_pm) p2`` and
    ``p_pm = sqrt(w_pm / 2 m Omega) p1 +- i sqrt(m Omega w_pm / 2) x2``.
    """
    f = frequencies(p)
    m, Om = float(p.m), f.Omega
    T = np.zeros((4, 4), dtype=complex)
    for row, (w, sign) in enumerate(((f.omega_plus, 1), (f.omega_minus, -1))):
        T[row, 0] = principal_sqrt(m * Om / (2 * w))
        T[row, 3] = sign * 1j * principal_sqrt(1 / (2 * m * Om * w))
        T[2 + row, 2] = principal_sqrt(w / (2 * m * Om))
        T[2 + row, 1] = sign * 1j * principal_sqrt(m * Om * w / 2)
    cmap = CanonicalMap(T, labels=("x+", "x-", "p+", "p-"))
    res = cmap.symplectic_residual()
    if res > SYMPLECTIC_TOL:
        raise BranchInconsistency(f"map is not canonical: residual {res:.3e}")
    return cmap


def diagonalized_composite(p):
    """Composite Hamiltonian expressed in ``(x+, x-, p+, p-)``."""
    cmap = canonical_map_ct(p)
    return legendre_composite(p.as_float()).transformed(cmap.T, cmap.labels), cmap


def split_hamiltonian(p):
    """``(H+, H-)`` with ``H_pm = p_pm**2/2 + omega_pm**2 x_pm**2/2``."""
    Hd, _ = diagonalized_composite(p)
    return Hd.block(0), Hd.block(1)


def off_block_residual(Hd):
    """Largest coefficient coupling ``(x+, p+)`` to ``(x-, p-)``."""
    plus, minus = [0, 2], [1, 3]
    return float(np.abs(_exact.to_complex(Hd.H)[np.ix_(plus, minus)]).max())


@dataclass(frozen=True)
class DiagonalizationReport:
    off_block: float
    value_identity: float
    conjugate_pairing: float
    frequency_match: float
    symplectic: float

    def to_dict(self):
        return dict(self.__dict__)


def diagonalization_report(p, npoints=1000, seed=0):
    """Residuals of the split of the composite Hamiltonian.

    ``value_identity`` compares ``H(z)`` with ``H+(Tz) + H-(Tz)`` at random
    complex phase points of unit scale.
    """
    Hd, cmap = diagonalized_composite(p)
    Hp, Hm = Hd.block(0), Hd.block(1)
    f = frequencies(p)
    H = legendre_composite(p.as_float())
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((npoints, 4)) + 1j * rng.standard_normal((npoints, 4))
    w = z @ cmap.T.T
    split = Hp.value(w[:, [0, 2]]) + Hm.value(w[:, [1, 3]])
    expected = [np.diag([f.omega_plus**2, 1]), np.diag([f.omega_minus**2, 1])]
    match = max(float(np.abs(B.H - E).max()) for B, E in zip((Hp, Hm), expected))
    return DiagonalizationReport(
        off_block=off_block_residual(Hd),
        value_identity=float(np.abs(H.value(z) - split).max()),
        conjugate_pairing=float(np.abs(Hp.H.conj() - Hm.H).max()),
        frequency_match=match,
        symplectic=cmap.symplectic_residual(),
    )


def first_order_hamiltonian(g, kappa):
    """Hamiltonian and bracket of the first-order chiral system.

    Returns ``(H, B)``: ``H`` is the matrix of ``kappa (x1**2 - x2**2)/2`` and
    ``B = -(i/g) eps`` is the bracket ``{x_i, x_j}``.  The flow is ``z' = B H z``.
    """
    if not g > 0:
        raise ValueError("g must be positive")
    kappa = complex(kappa)
    H = np.array([[kappa, 0], [0, -kappa]], dtype=complex)
    B = -1j / g * np.array(EPSILON, dtype=complex)
    return H, B


def bracket_generator(H, B):
    return np.asarray(B) @ np.asarray(H)


def map_tn2(g, kappa):
    """Canonical map from the chiral pair ``(x1, x2)`` to ``(x, p_x)``.

    ``x1 = (i / sqrt(-kappa)) p_x`` and ``x2 = (sqrt(-kappa) / g) x``.  The
    transformed Hamiltonian is ``p_x**2/2 + (kappa/g)**2 x**2/2``.
    """
    kappa = complex(kappa)
    if kappa == 0:
        raise ZeroCoupling("kappa = 0")
    if not g > 0:
        raise ValueError("g must be positive")
    r = principal_sqrt(-kappa)
    S = np.array([[0, 1j / r], [r / g, 0]], dtype=complex)  # old = S @ new
    _, B = first_order_hamiltonian(g, kappa)
    cmap = CanonicalMap(np.linalg.inv(S), B, labels=("x", "p_x"))
    res = cmap.symplectic_residual()
    if res > SYMPLECTIC_TOL:
        raise BranchInconsistency(f"map is not canonical: residual {res:.3e}")
    return cmap


def first_order_route(g, kappa):
    """One-dof Hamiltonian obtained by applying :func:`map_tn2`."""
    H, _ = first_order_hamiltonian(g, kappa)
    cmap = map_tn2(g, kappa)
    return QuadraticHamiltonian(H, ("x1", "x2")).transformed(cmap.T, cmap.labels)

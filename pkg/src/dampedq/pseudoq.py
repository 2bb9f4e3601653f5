"""Truncated Fock-space quantization of the complex-frequency oscillator.

For ``H = p**2/2 + omega**2 x**2/2`` with complex ``omega`` the ladder pair

    a  = sqrt(omega/2) (x + i p / omega),
    a~ = sqrt(omega/2) (x - i p / omega)

obeys ``[a, a~] = 1`` with ``a~`` the pseudo-hermitian adjoint of ``a`` (not its
hermitian adjoint).  In the Fock basis built on ``a`` (``FockOfOmega``), ``a`` is the
standard lowering matrix and ``a~`` its transpose, so ``H = omega (N + 1/2)``
is diagonal.  To make diagonalization nontrivial the same ``H`` is also built
in the Fock basis of a real reference frequency (``FockOfReference``), where it
is a dense complex symmetric matrix.

``eta`` is the antilinear map ``v -> U conj(v)`` with ``U = 1`` in either basis.
It satisfies ``eta x eta^-1 = x^dagger``, ``eta p eta^-1 = -p^dagger`` and
hence ``eta H eta^-1 = H^dagger``.  These relations are verified on the
matrices, not assumed.

Truncation to ``D`` levels breaks ``[a, a~] = 1`` in the top level only.
Physics assertions are made for ``n <= D/4``.
"""

from dataclasses import dataclass
from enum import Enum
import csv
import math

import numpy as np
import scipy.linalg
import sympy

from .errors import (
    BadFrequency,
    DefectivePair,
    DimensionMismatch,
    PairingAmbiguity,
    TruncationContaminated,
    VerificationFailed,
)
from .params import frequencies

DEFAULT_DIM = 64
PAIRING_TOL = 1e-9
DEFECT_TOL = 1e-13
ETA_TOL = 1e-12


class Basis(str, Enum):
    FOCK_OF_OMEGA = "FockOfOmega"
    FOCK_OF_REFERENCE = "FockOfReference"


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    basis_tag: Basis

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] < 2:
            raise DimensionMismatch(f"need a square matrix with D >= 2, got {e.shape}")
        if not np.all(np.isfinite(e)):
            raise ValueError("operator entries must be finite")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "basis_tag", Basis(self.basis_tag))

    @property
    def D(self):
        return self.entries.shape[0]

    @property
    def dagger(self):
        return self.entries.conj().T

    def _check(self, other):
        if other.basis_tag is not self.basis_tag or other.D != self.D:
            raise DimensionMismatch(f"{self.basis_tag.value}/{self.D} vs {other.basis_tag.value}/{other.D}")

    def __matmul__(self, other):
        self._check(other)
        return OperatorMatrix(self.entries @ other.entries, self.basis_tag)


@dataclass(frozen=True)
class AntilinearOp:
    """``v -> U conj(v)``."""

    U: np.ndarray

    def __post_init__(self):
        U = np.array(self.U, dtype=complex)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise DimensionMismatch(f"U must be square, got {U.shape}")
        if np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() > ETA_TOL:
            raise VerificationFailed("U is not unitary")
        U.setflags(write=False)
        object.__setattr__(self, "U", U)

    @property
    def D(self):
        return self.U.shape[0]

    def apply(self, v):
        return self.U @ np.conj(v)

    def conjugate_operator(self, O):
        """``eta O eta^-1`` as a matrix: ``U conj(O) U^dagger``."""
        return self.U @ np.conj(O) @ self.U.conj().T

    def square(self):
        """Matrix of the linear map ``eta**2``."""
        return self.U @ self.U.conj()


def _check_omega(omega, D):
    omega = complex(omega)
    if not omega.real > 0:
        raise BadFrequency(f"Re(omega) = {omega.real} must be positive")
    if D < 2:
        raise DimensionMismatch(f"D = {D} must be at least 2")
    return omega


def lowering_matrix(D):
    return np.diag(np.sqrt(np.arange(1, D, dtype=float)), k=1).astype(complex)


def build_ladder(omega, D=DEFAULT_DIM):
    """``(a, a~)`` in the Fock basis of ``omega``."""
    _check_omega(omega, D)
    a = lowering_matrix(D)
    return OperatorMatrix(a, Basis.FOCK_OF_OMEGA), OperatorMatrix(a.T, Basis.FOCK_OF_OMEGA)


def position_momentum(omega, a, at):
    """``x = (a + a~)/sqrt(2 omega)``, ``p = -i sqrt(omega/2) (a - a~)``."""
    omega = complex(omega)
    x = (a.entries + at.entries) / np.sqrt(2 * omega)
    p = -1j * np.sqrt(omega / 2) * (a.entries - at.entries)
    return OperatorMatrix(x, a.basis_tag), OperatorMatrix(p, a.basis_tag)


def number_and_hamiltonian(omega, D=DEFAULT_DIM):
    """``N = diag(0..D-1)`` and ``H = omega (N + 1/2)`` in the Fock basis of ``omega``.

    ``N`` is written down directly; :func:`ladder_algebra_residuals` compares it
    with ``a~ a``.
    """
    omega = _check_omega(omega, D)
    n = np.arange(D, dtype=float)
    N = OperatorMatrix(np.diag(n), Basis.FOCK_OF_OMEGA)
    H = OperatorMatrix(np.diag(omega * (n + 0.5)), Basis.FOCK_OF_OMEGA)
    return N, H


def ladder_algebra_residuals(D=DEFAULT_DIM):
    """Float residuals of ``a~ a = N``, ``[N, a] = -a``, ``[N, a~] = a~``, ``[a, a~] = 1``.

    The canonical commutator is checked on the leading ``D - 1`` levels.
    """
    a, at = build_ladder(1.0, D)
    N, _ = number_and_hamiltonian(1.0, D)
    A, At, Nm = a.entries, at.entries, N.entries
    comm = A @ At - At @ A
    return {
        "number": float(np.abs(At @ A - Nm).max()),
        "lower": float(np.abs(Nm @ A - A @ Nm + A).max()),
        "raise": float(np.abs(Nm @ At - At @ Nm - At).max()),
        "canonical": float(np.abs(comm[: D - 1, : D - 1] - np.eye(D - 1)).max()),
    }


def exact_ladder_algebra(D=DEFAULT_DIM):
    """Exact ladder identities with symbolic ``sqrt(n)`` entries.

    Returns a dict of sympy matrices that must all be zero:
    ``a~ a - N``, ``[N, a] + a``, ``[N, a~] - a~`` and ``[a, a~] - 1`` on the
    leading ``D - 1`` levels; the last key ``truncation`` holds the single
    top-level entry of ``[a, a~] - 1`` (equal to ``-D``).
    """
    a = sympy.SparseMatrix(D, D, {(i, i + 1): sympy.sqrt(i + 1) for i in range(D - 1)})
    at = a.T
    N = at * a
    comm = a * at - at * a - sympy.eye(D)
    lead = comm[: D - 1, : D - 1]
    return {
        "number": N - sympy.diag(*range(D)),
        "lower": N * a - a * N + a,
        "raise": N * at - at * N - at,
        "canonical": sympy.SparseMatrix(lead),
        "truncation": comm[D - 1, D - 1],
    }


def eta_operator(D=DEFAULT_DIM, omega=1 + 1j, basis=Basis.FOCK_OF_OMEGA):
    """Complex conjugation in the chosen Fock basis, verified against ``x`` and ``p``.

    In ``FockOfReference`` the check uses the reference frequency ``|omega|``.
    """
    eta = AntilinearOp(np.eye(D))
    basis = Basis(basis)
    if basis is Basis.FOCK_OF_OMEGA:
        x, p = position_momentum(omega, *build_ladder(omega, D))
    else:
        x, p = reference_position_momentum(abs(complex(omega)), D)
    dx = np.abs(eta.conjugate_operator(x.entries) - x.dagger).max()
    dp = np.abs(eta.conjugate_operator(p.entries) + p.dagger).max()
    if max(dx, dp) > ETA_TOL:
        raise VerificationFailed(f"eta x eta^-1 - x^dag = {dx:.3e}, eta p eta^-1 + p^dag = {dp:.3e}")
    return eta


def pseudo_hermiticity_residual(H, eta, leading=None):
    """Spectral norm of ``H^dagger - eta H eta^-1``, optionally on the leading block."""
    Hm = H.entries if isinstance(H, OperatorMatrix) else np.asarray(H, dtype=complex)
    if Hm.shape != eta.U.shape:
        raise DimensionMismatch(f"H is {Hm.shape}, eta acts on {eta.U.shape}")
    diff = Hm.conj().T - eta.conjugate_operator(Hm)
    if leading is not None:
        diff = diff[:leading, :leading]
    return float(np.linalg.norm(diff, 2))


def reference_position_momentum(omega_ref, D=DEFAULT_DIM):
    """Hermitian ``x``, ``p`` in the Fock basis of a real frequency."""
    if not omega_ref > 0:
        raise BadFrequency(f"reference frequency {omega_ref} must be positive")
    a, at = build_ladder(omega_ref, D)
    x, p = position_momentum(omega_ref, a, at)
    return (
        OperatorMatrix(x.entries.real, Basis.FOCK_OF_REFERENCE),
        OperatorMatrix(1j * p.entries.imag, Basis.FOCK_OF_REFERENCE),
    )


def fock_matrix_hamiltonian(omega, omega_ref=None, D=DEFAULT_DIM):
    """``p**2/2 + omega**2 x**2/2`` in the Fock basis of ``omega_ref`` (default ``|omega|``).

    The result is complex symmetric; it is non-hermitian when ``Im omega**2 != 0``.
    """
    omega = _check_omega(omega, D)
    if omega_ref is None:
        omega_ref = abs(omega)
    x, p = reference_position_momentum(omega_ref, D)
    X, P = x.entries, p.entries
    H = P @ P / 2 + omega**2 * (X @ X) / 2
    return OperatorMatrix((H + H.T) / 2, Basis.FOCK_OF_REFERENCE)


def reference_ladder(omega, omega_ref=None, D=DEFAULT_DIM):
    """``(a, a~)`` of frequency ``omega`` expressed in the reference basis; ``a~ = a^T``."""
    omega = _check_omega(omega, D)
    if omega_ref is None:
        omega_ref = abs(omega)
    x, p = reference_position_momentum(omega_ref, D)
    a = np.sqrt(omega / 2) * (x.entries + 1j * p.entries / omega)
    return OperatorMatrix(a, Basis.FOCK_OF_REFERENCE), OperatorMatrix(a.T, Basis.FOCK_OF_REFERENCE)


@dataclass(frozen=True)
class BiorthogonalSystem:
    """Right eigenvectors ``psi`` and left partners ``phi`` (columns), ``<phi_n|psi_m> = delta``."""

    eigenvalues: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    basis_tag: Basis = Basis.FOCK_OF_REFERENCE

    def __post_init__(self):
        for name in ("eigenvalues", "psi", "phi"):
            arr = np.array(getattr(self, name), dtype=complex)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def D(self):
        return self.psi.shape[0]

    def overlap(self, modes=None):
        """``<phi_n|psi_m>`` over the retained modes."""
        idx = slice(None) if modes is None else slice(0, modes)
        return self.phi[:, idx].conj().T @ self.psi[:, idx]

    def biorthonormality_residual(self, modes=None):
        G = self.overlap(modes)
        return float(np.abs(G - np.eye(G.shape[0])).max())

    def mode_residuals(self, modes=None):
        """Per-mode ``max_m |<phi_n|psi_m> - delta_nm|`` over the retained modes."""
        G = self.overlap(modes)
        return np.abs(G - np.eye(G.shape[0])).max(axis=1)

    def completeness_residual(self):
        R = self.psi @ self.phi.conj().T
        return float(np.linalg.norm(R - np.eye(self.D), 2))

    def eta_deviation(self, eta, modes=None):
        """``max_n min_theta |eta phi_n - e^{i theta} psi_n| / |psi_n|``."""
        k = self.D if modes is None else modes
        worst = 0.0
        for n in range(k):
            v = eta.apply(self.phi[:, n])
            w = self.psi[:, n]
            ov = np.vdot(w, v)
            phase = ov / abs(ov) if ov != 0 else 1.0
            worst = max(worst, np.linalg.norm(v - phase * w) / np.linalg.norm(w))
        return float(worst)

    def to_dict(self, modes=None):
        k = self.D if modes is None else modes
        pairs = lambda M: [[[float(z.real), float(z.imag)] for z in col] for col in M[:, :k].T]
        return {
            "D": self.D,
            "basis": self.basis_tag.value,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues[:k]],
            "psi": pairs(self.psi),
            "phi": pairs(self.phi),
            "biorthonormality_residual": self.biorthonormality_residual(k),
            "completeness_residual": self.completeness_residual(),
        }


def spectral_order(eigenvalues):
    """Indices sorting by modulus, ties broken by argument."""
    lam = np.asarray(eigenvalues)
    return np.lexsort((np.round(np.angle(lam), 12), np.round(np.abs(lam), 12)))


def _fix_phase(v):
    j = int(np.argmax(np.abs(v)))
    return v * (abs(v[j]) / v[j])


def biorthogonal_diagonalize(H):
    """Right/left eigen-decomposition of a diagonalizable matrix.

    Left vectors come from the same LAPACK call as the right ones, so each
    ``phi_n`` solves ``H^dagger phi = conj(lambda) phi`` with the matching
    eigenvalue.  Each ``psi_n`` gets its largest component real positive; the
    pair is then scaled so that ``<phi_n|psi_n> = 1`` with ``|phi_n| = |psi_n|``.
    """
    Hm = H.entries if isinstance(H, OperatorMatrix) else np.asarray(H, dtype=complex)
    tag = H.basis_tag if isinstance(H, OperatorMatrix) else Basis.FOCK_OF_REFERENCE
    lam, vl, vr = scipy.linalg.eig(Hm, left=True, right=True)
    order = spectral_order(lam)
    lam, vl, vr = lam[order], vl[:, order], vr[:, order]
    gaps = np.abs(lam[:, None] - lam[None, :]) + np.diag(np.full(lam.size, np.inf))
    if lam.size > 1 and gaps.min() < PAIRING_TOL * max(1.0, np.abs(lam).max()):
        i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
        raise PairingAmbiguity(f"eigenvalues {lam[i]:.6g} and {lam[j]:.6g} cannot be paired")
    psi = np.empty_like(vr)
    phi = np.empty_like(vl)
    for n in range(lam.size):
        r = _fix_phase(vr[:, n] / np.linalg.norm(vr[:, n]))
        l = vl[:, n] / np.linalg.norm(vl[:, n])
        t = np.vdot(l, r)
        if abs(t) < DEFECT_TOL:
            raise DefectivePair(f"left/right overlap {abs(t):.3e} for eigenvalue {lam[n]:.6g}")
        psi[:, n] = r / math.sqrt(abs(t))
        phi[:, n] = l * (math.sqrt(abs(t)) / np.conj(t))
    return BiorthogonalSystem(lam, psi, phi, tag)


@dataclass(frozen=True)
class LadderReport:
    """``a|psi_n> = c|psi_{n-1}>`` and ``<phi_n|a~ = d<phi_{n-1}|``."""

    n: int
    c: complex
    d: complex

    @property
    def conjugacy_residual(self):
        return abs(self.d - self.c.conjugate())

    @property
    def norm_residual(self):
        return abs(abs(self.c) ** 2 - self.n)

    def to_dict(self):
        return {
            "n": self.n,
            "c": [self.c.real, self.c.imag],
            "d": [self.d.real, self.d.imag],
            "conjugacy_residual": self.conjugacy_residual,
            "norm_residual": self.norm_residual,
        }


def _eta_gauge(sys, n, eta):
    """Rescale mode ``n`` by a phase so that ``eta phi_n = psi_n`` (biorthonormality kept)."""
    psi, phi = sys.psi[:, n], sys.phi[:, n]
    rho = np.vdot(psi, eta.apply(phi)) / np.vdot(psi, psi)
    s = np.sqrt(rho)
    return psi * s, phi / np.conj(s)


def ladder_matrix_elements(sys, a, atilde, n, eta=None):
    """``c = <phi_{n-1}|a|psi_n>`` and ``d = <phi_n|a~|psi_{n-1}>``.

    Modes are first rephased so that ``eta phi = psi``.  The rephasing is a
    pure phase, so ``|c|`` does not depend on it.
    """
    D = sys.D
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > D // 4:
        raise TruncationContaminated(f"n = {n} exceeds D/4 = {D // 4}")
    if eta is None:
        eta = AntilinearOp(np.eye(D))
    psi_n, phi_n = _eta_gauge(sys, n, eta)
    psi_m, phi_m = _eta_gauge(sys, n - 1, eta)
    A, At = a.entries, atilde.entries
    c = complex(np.vdot(phi_m, A @ psi_n))
    d = complex(np.vdot(phi_n, At @ psi_m))
    return LadderReport(n, c, d)


def ground_state_annihilation(sys, a):
    """``|a psi_0| / |psi_0|``."""
    psi0 = sys.psi[:, 0]
    return float(np.linalg.norm(a.entries @ psi0) / np.linalg.norm(psi0))


def composite_spectrum(p, n, m):
    """``omega_+ (n + 1/2) + omega_- (m + 1/2) = Omega (n + m + 1) + i (gamma/2m)(n - m)``."""
    if n < 0 or m < 0 or int(n) != n or int(m) != m:
        raise ValueError("quantum numbers must be nonnegative integers")
    f = frequencies(p)
    return complex(f.Omega * (n + m + 1), float(p.gamma) / (2 * float(p.m)) * (n - m))


def spectrum_rows(sys, modes):
    res = sys.mode_residuals(modes)
    return [(n, float(sys.eigenvalues[n].real), float(sys.eigenvalues[n].imag), float(res[n])) for n in range(modes)]


def write_spectrum_csv(sys, modes, fh):
    """Columns ``n, re, im, biorth_residual``."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["n", "re", "im", "biorth_residual"])
    for n, re, im, r in spectrum_rows(sys, modes):
        writer.writerow([n, repr(re), repr(im), f"{r:.6e}"])

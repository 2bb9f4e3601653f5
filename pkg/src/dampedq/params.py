"""Damped-oscillator parameters and the chiral-doublet couplings that solder into them.

Two parameter sets describe the same doubled system:

* the physical triple ``(m, gamma, k)`` of ``m x'' + gamma x' + k x = 0``;
* the doublet couplings ``(Gamma, k_plus, k_minus)`` of the two first-order
  Lagrangians of opposite chirality.

The couplings map to the physical triple through

    m = -Gamma**2 / (k+ + k-),  gamma = Gamma (k+ - k-) / (k+ + k-),
    k = k+ k- / (k+ + k-).

Real couplings only reach overdamped motion (R < 1).  Underdamped motion needs
``k+ = kappa``, ``k- = conj(kappa)`` and ``Gamma = -i g`` with ``g > 0``.

The inverse map is unique on each side of critical damping:

* underdamped: ``g = 2 m Omega``, ``kappa = 2 m Omega**2 + i gamma Omega``;
* overdamped: ``s = 4k - gamma**2/m``, ``Gamma = sqrt(gamma**2 - 4 k m)``,
  ``d = gamma s / Gamma``, ``k+- = (s +- d) / 2``.

For the overdamped branch, ``k+ + k- = s`` and ``k+ - k- = d`` follow from the
forward map once ``Gamma`` is fixed by ``m``.  Since ``m = -Gamma**2 / s``,
``Gamma`` cannot be rescaled with ``k+-`` held proportional; the inverse has no
free scale.

Inputs made only of ``int``/``Fraction`` are processed exactly on the real
branch.  The overdamped inverse stays exact when ``gamma**2 - 4 k m`` is the
square of a rational and falls back to floats otherwise.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import math

from ._exact import exact_sqrt, is_exact, to_fraction
from .errors import (
    CriticalDamping,
    DegenerateCouplings,
    NonPhysical,
    NotOscillatory,
)

# imaginary residue tolerated when a complex-branch map returns real parameters
IMAG_TOL = 1e-12


class RegimeKind(str, Enum):
    OVERDAMPED = "Overdamped"
    CRITICAL = "Critical"
    UNDERDAMPED = "Underdamped"


class ChiralRegime(str, Enum):
    REAL_OVERDAMPED = "RealOverdamped"
    COMPLEX_UNDERDAMPED = "ComplexUnderdamped"


@dataclass(frozen=True)
class DhoParams:
    """Mass, friction coefficient and spring constant."""

    m: object
    gamma: object
    k: object

    def __post_init__(self):
        for name in ("m", "gamma", "k"):
            v = getattr(self, name)
            if isinstance(v, complex) or not math.isfinite(float(v)):
                raise NonPhysical(f"{name}={v!r} is not a finite real number")
        if not (self.m > 0 and self.k > 0 and self.gamma >= 0):
            raise NonPhysical(
                f"need m > 0, k > 0, gamma >= 0; got m={self.m}, gamma={self.gamma}, k={self.k}"
            )

    @property
    def exact(self):
        return is_exact(self.m, self.gamma, self.k)

    def astuple(self):
        return (self.m, self.gamma, self.k)

    def as_float(self):
        return DhoParams(float(self.m), float(self.gamma), float(self.k))


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    R: object  # math.inf when gamma == 0


@dataclass(frozen=True)
class ChiralParams:
    """Doublet couplings.

    Structural invariants are enforced on construction: a real-branch set has
    no imaginary parts; a complex-branch set has ``k_minus == conj(k_plus)`` and
    ``Gamma == -i g`` with ``g > 0``.  The sign conditions that make the soldered
    parameters physical (``Gamma > 0``, ``k+ k- < 0``, ``k+ + k- < 0``) are
    reported by :meth:`is_physical` and enforced by :func:`chiral_to_physical`.
    """

    Gamma: object
    k_plus: object
    k_minus: object
    regime_tag: ChiralRegime

    def __post_init__(self):
        if self.regime_tag is ChiralRegime.REAL_OVERDAMPED:
            for name in ("Gamma", "k_plus", "k_minus"):
                v = getattr(self, name)
                if isinstance(v, complex):
                    if v.imag != 0:
                        raise ValueError(f"real branch needs real {name}, got {v!r}")
                    object.__setattr__(self, name, v.real)
        else:
            Gamma, kp, km = complex(self.Gamma), complex(self.k_plus), complex(self.k_minus)
            if km != kp.conjugate():
                raise ValueError("complex branch needs k_minus == conj(k_plus)")
            if Gamma.real != 0 or not -Gamma.imag > 0:
                raise ValueError("complex branch needs Gamma = -i g with g > 0")
            object.__setattr__(self, "Gamma", Gamma)
            object.__setattr__(self, "k_plus", kp)
            object.__setattr__(self, "k_minus", km)

    @classmethod
    def real(cls, Gamma, k_plus, k_minus):
        return cls(Gamma, k_plus, k_minus, ChiralRegime.REAL_OVERDAMPED)

    @classmethod
    def complex(cls, g, kappa):
        kappa = complex(kappa)
        return cls(-1j * g, kappa, kappa.conjugate(), ChiralRegime.COMPLEX_UNDERDAMPED)

    @property
    def is_complex(self):
        return self.regime_tag is ChiralRegime.COMPLEX_UNDERDAMPED

    @property
    def g(self):
        if not self.is_complex:
            raise AttributeError("g is defined on the complex branch only")
        return -self.Gamma.imag

    @property
    def kappa(self):
        if not self.is_complex:
            raise AttributeError("kappa is defined on the complex branch only")
        return self.k_plus

    @property
    def exact(self):
        return not self.is_complex and is_exact(self.Gamma, self.k_plus, self.k_minus)

    def is_physical(self):
        if self.is_complex:
            return self.kappa.real > 0 and self.kappa.imag >= 0
        kp, km = self.k_plus, self.k_minus
        return self.Gamma > 0 and kp * km < 0 and kp + km < 0 and kp < km


@dataclass(frozen=True)
class DerivedFrequencies:
    Omega: float
    omega_plus: complex
    omega_minus: complex


def classify(p):
    """Damping ratio ``R = k / (gamma**2 / 4m)`` and the regime it selects."""
    four_mk = 4 * p.m * p.k
    g2 = p.gamma * p.gamma
    if g2 == 0:
        return Regime(RegimeKind.UNDERDAMPED, math.inf)
    R = Fraction(four_mk) / Fraction(g2) if p.exact else four_mk / g2
    if four_mk == g2:
        kind = RegimeKind.CRITICAL
    elif four_mk > g2:
        kind = RegimeKind.UNDERDAMPED
    else:
        kind = RegimeKind.OVERDAMPED
    return Regime(kind, R)


def _real_part(name, z, scale):
    if isinstance(z, complex):
        if abs(z.imag) > IMAG_TOL * max(1.0, abs(scale)):
            raise NonPhysical(f"{name} has imaginary part {z.imag:.3e}")
        return z.real
    return z


def chiral_to_physical(c):
    """Solder the doublet couplings into ``(m, gamma, k)``."""
    Gamma, kp, km = c.Gamma, c.k_plus, c.k_minus
    if c.exact:
        Gamma, kp, km = (to_fraction(v) for v in (Gamma, kp, km))
    s = kp + km
    if s == 0:
        raise NonPhysical("k_plus + k_minus = 0: the soldered mass diverges")
    m = -Gamma * Gamma / s
    gamma = Gamma * (kp - km) / s
    k = kp * km / s
    if c.is_complex:
        scale = max(abs(m), abs(gamma), abs(k))
        m, gamma, k = (_real_part(n, v, scale) for n, v in (("m", m), ("gamma", gamma), ("k", k)))
    if not (m > 0 and k > 0 and gamma >= 0):
        raise NonPhysical(f"couplings give m={m}, gamma={gamma}, k={k}")
    return DhoParams(m, gamma, k)


def physical_to_chiral(p):
    """Unique doublet couplings that solder back to ``p``."""
    regime = classify(p)
    if regime.kind is RegimeKind.CRITICAL:
        raise CriticalDamping("R = 1: both branches of the identification degenerate")
    m, gamma, k = (to_fraction(v) for v in p.astuple()) if p.exact else p.astuple()
    if regime.kind is RegimeKind.UNDERDAMPED:
        Omega = _omega(p)
        g = 2 * m * Omega
        kappa = complex(2 * m * Omega * Omega, gamma * Omega)
        return ChiralParams.complex(g, kappa)
    s = 4 * k - gamma * gamma / m
    disc = gamma * gamma - 4 * k * m
    Gamma = exact_sqrt(disc) if p.exact else None
    if Gamma is None:
        s, gamma, disc = float(s), float(gamma), float(disc)
        Gamma = math.sqrt(disc)
    d = gamma * s / Gamma
    return ChiralParams.real(Gamma, (s + d) / 2, (s - d) / 2)


def _omega(p):
    # Omega**2 = (k - gamma**2 / 4m) / m, written to avoid cancellation when gamma is small
    w2 = (4 * p.m * p.k - p.gamma * p.gamma) / (4 * p.m * p.m)
    return math.sqrt(float(w2))


def frequencies(p):
    """``Omega`` and the complex pair ``omega_pm = Omega +- i gamma / 2m``."""
    if classify(p).kind is not RegimeKind.UNDERDAMPED:
        raise NotOscillatory(f"R = {classify(p).R}: motion is not oscillatory")
    Omega = _omega(p)
    decay = float(p.gamma) / (2 * float(p.m))
    return DerivedFrequencies(Omega, complex(Omega, decay), complex(Omega, -decay))


def ratio_from_chiral(c):
    """Damping ratio computed directly from the couplings."""
    if c.is_complex:
        k1, k2 = c.kappa.real, c.kappa.imag
        if k2 == 0:
            raise DegenerateCouplings("Im kappa = 0")
        return 1 + (k1 / k2) ** 2
    kp, km = c.k_plus, c.k_minus
    if c.exact:
        kp, km = to_fraction(kp), to_fraction(km)
    if kp == km:
        raise DegenerateCouplings("k_plus = k_minus")
    return 1 - (kp + km) ** 2 / (kp - km) ** 2


def parse_number(text):
    """Parse a CLI literal as an exact rational when possible, else a float."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        return float(text)


def as_exact(p):
    """DhoParams with Fraction fields (floats converted exactly)."""
    return DhoParams(*(to_fraction(v) for v in p.astuple()))


__all__ = [
    "ChiralParams",
    "ChiralRegime",
    "DerivedFrequencies",
    "DhoParams",
    "Regime",
    "RegimeKind",
    "as_exact",
    "chiral_to_physical",
    "classify",
    "frequencies",
    "physical_to_chiral",
    "ratio_from_chiral",
]

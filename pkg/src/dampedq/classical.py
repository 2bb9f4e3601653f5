"""Classical dynamics of the doubled oscillator and of its chiral constituents.

States live in hyperbolic coordinates ``x1 = (x + y)/sqrt(2)``,
``x2 = (x - y)/sqrt(2)`` where ``x`` is the damped coordinate and ``y`` its
time-reversed partner.  All states are complex: the closed-form solutions
``x = A exp(-gamma t/2m) exp(i Omega t)`` and ``y = A exp(gamma t/2m) exp(-i Omega t)``
are intrinsically complex, and a real trajectory is recovered as the real
part of a complex one (the equations of motion have real coefficients).

Every system integrated here is linear with constant coefficients,
``z' = F z``.  The integrator is classical fixed-step RK4, which for such a
system is exactly one multiplication by the stability polynomial
``I + hF + (hF)^2/2 + (hF)^3/6 + (hF)^4/24`` per step.  Each step is repeated
as two half steps and the difference is the local error estimate.
"""

from dataclasses import dataclass
import csv
import math

import numpy as np

from .errors import NotOscillatory, StepSizeTooLarge
from .params import RegimeKind, classify, frequencies

SQRT2 = math.sqrt(2.0)

DEFAULT_STEP = 1e-3
# per-step local error bound, relative to max(1, |z|)
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class PhaseState:
    """Hyperbolic coordinates with optional velocities."""

    x1: complex
    x2: complex
    v1: complex = None
    v2: complex = None

    def __post_init__(self):
        for name in ("x1", "x2", "v1", "v2"):
            v = getattr(self, name)
            if v is not None and not np.isfinite(complex(v)):
                raise ValueError(f"{name} is not finite")

    @property
    def has_velocities(self):
        return self.v1 is not None and self.v2 is not None

    @classmethod
    def from_physical(cls, x, y, vx=None, vy=None):
        x1, x2 = physical_to_hyperbolic(x, y)
        if vx is None or vy is None:
            return cls(x1, x2)
        v1, v2 = physical_to_hyperbolic(vx, vy)
        return cls(x1, x2, v1, v2)

    def as_array(self):
        vals = [self.x1, self.x2]
        if self.has_velocities:
            vals += [self.v1, self.v2]
        return np.array(vals, dtype=complex)


def hyperbolic_to_physical(s):
    """``(x, y)`` from a hyperbolic state."""
    return (s.x1 + s.x2) / SQRT2, (s.x1 - s.x2) / SQRT2


def physical_to_hyperbolic(x, y):
    return (x + y) / SQRT2, (x - y) / SQRT2


class Trajectory:
    """Sampled states; ``z[i]`` holds ``(x1, x2[, v1, v2])`` at ``times[i]``."""

    def __init__(self, times, z):
        times = np.array(times, dtype=float)
        z = np.array(z, dtype=complex)
        if times.ndim != 1 or z.shape[0] != times.shape[0]:
            raise ValueError("times and states must have the same length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        times.setflags(write=False)
        z.setflags(write=False)
        self._times = times
        self._z = z

    @property
    def times(self):
        return self._times

    @property
    def z(self):
        return self._z

    def __len__(self):
        return len(self._times)

    @property
    def x1(self):
        return self._z[:, 0]

    @property
    def x2(self):
        return self._z[:, 1]

    @property
    def x(self):
        return (self.x1 + self.x2) / SQRT2

    @property
    def y(self):
        return (self.x1 - self.x2) / SQRT2

    @property
    def states(self):
        return [PhaseState(*row) for row in self._z]

    def to_csv(self, fh):
        """Columns ``t`` then real/imaginary parts of ``x1, x2, x, y``."""
        writer = csv.writer(fh, lineterminator="\n")
        names = ("x1", "x2", "x", "y")
        writer.writerow(["t"] + [f"{part}_{n}" for n in names for part in ("re", "im")])
        cols = (self.x1, self.x2, self.x, self.y)
        for i, t in enumerate(self._times):
            row = [repr(float(t))]
            for c in cols:
                row += [repr(float(c[i].real)), repr(float(c[i].imag))]
            writer.writerow(row)


def rk4_step(f, t, z, h):
    """One classical Runge-Kutta step for ``z' = f(t, z)``."""
    k1 = f(t, z)
    k2 = f(t + h / 2, z + h / 2 * k1)
    k3 = f(t + h / 2, z + h / 2 * k2)
    k4 = f(t + h, z + h * k3)
    return z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_propagator(F, h):
    """RK4 update matrix of the linear system ``z' = F z`` for step ``h``."""
    hF = h * np.asarray(F, dtype=complex)
    out = np.eye(hF.shape[0], dtype=complex)
    term = out.copy()
    for n in range(1, 5):
        term = term @ hF / n
        out = out + term
    return out


def integrate_linear(F, z0, t_grid, max_step=DEFAULT_STEP, tol=DEFAULT_TOL):
    """Integrate ``z' = F z`` from ``z0`` at ``t_grid[0]``; one state per grid time.

    Raises StepSizeTooLarge when a step's half-step estimate exceeds
    ``tol * max(1, |z|)``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a nonempty 1-D sequence")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    z = np.array(z0, dtype=complex)
    out = np.empty((t_grid.size, z.size), dtype=complex)
    out[0] = z
    cache = {}
    for i in range(1, t_grid.size):
        span = t_grid[i] - t_grid[i - 1]
        nsub = max(1, math.ceil(span / max_step - 1e-9))
        h = span / nsub
        if h not in cache:
            P = rk4_propagator(F, h)
            Ph = rk4_propagator(F, h / 2)
            cache[h] = (P, Ph @ Ph)
        P, P2 = cache[h]
        for _ in range(nsub):
            full = P @ z
            err = np.abs(full - P2 @ z).max()
            if err > tol * max(1.0, np.abs(full).max()):
                raise StepSizeTooLarge(
                    f"local error estimate {err:.3e} at t={t_grid[i - 1]:.6g} with step {h:.3e}"
                )
            z = full
        out[i] = z
    return out


def step_residual(F, traj):
    """Largest one-step defect of a sampled trajectory of ``z' = F z``.

    Each consecutive pair of samples is compared against one RK4 step across
    the gap; the defect is scaled by ``max(1, |z|)``.
    """
    z = traj.z
    worst = 0.0
    for i in range(len(traj) - 1):
        h = traj.times[i + 1] - traj.times[i]
        pred = rk4_propagator(F, h) @ z[i]
        worst = max(worst, np.abs(z[i + 1] - pred).max() / max(1.0, np.abs(z[i + 1]).max()))
    return float(worst)


def doubled_generator(p):
    """``F`` for ``(x1, x2, v1, v2)`` under ``m x'' + gamma x' + k x = 0`` and its reverse.

    In hyperbolic coordinates the pair becomes
    ``m x1'' + gamma x2' + k x1 = 0`` and ``m x2'' + gamma x1' + k x2 = 0``.
    """
    m, gamma, k = (float(v) for v in p.astuple())
    return np.array(
        [
            [0, 0, 1, 0],
            [0, 0, 0, 1],
            [-k / m, 0, 0, -gamma / m],
            [0, -k / m, -gamma / m, 0],
        ],
        dtype=complex,
    )


def integrate_doubled(p, init, t_grid, max_step=DEFAULT_STEP, tol=DEFAULT_TOL):
    """Integrate the damped oscillator together with its time-reversed image."""
    if not init.has_velocities:
        raise ValueError("the doubled system is second order; init needs velocities")
    z = integrate_linear(doubled_generator(p), init.as_array(), t_grid, max_step, tol)
    return Trajectory(t_grid, z)


def analytic_solution(p, A, t):
    """Closed-form forward/backward pair ``(x(t), y(t))``; ``x y = A**2``."""
    f = frequencies(p)
    t = np.asarray(t, dtype=float)
    decay = f.omega_plus.imag
    x = A * np.exp(-decay * t) * np.exp(1j * f.Omega * t)
    y = A * np.exp(decay * t) * np.exp(-1j * f.Omega * t)
    return x, y


def analytic_initial_state(p, A=1.0):
    """State at ``t = 0`` on the closed-form solution with amplitude ``A``."""
    f = frequencies(p)
    lam = 1j * f.omega_plus  # x' = lam x and y' = -lam y, lam = -gamma/2m + i Omega
    return PhaseState.from_physical(A, A, A * lam, -A * lam)


def time_reversed(traj):
    """Swap forward and backward channels and run time backwards.

    ``x~(s) = y(T - s)``, ``y~(s) = x(T - s)``; in hyperbolic coordinates this
    is ``(x1, x2, v1, v2) -> (x1, -x2, -v1, v2)`` at the mirrored time.
    """
    t = traj.times
    s = (t[-1] - t)[::-1]
    z = traj.z[::-1].copy()
    z[:, 1] *= -1
    if z.shape[1] == 4:
        z[:, 2] *= -1
    return Trajectory(s, z)


def chiral_generator(g, kappa, sign=1):
    """``F`` of the first-order flow of a chiral constituent.

    ``sign=+1``: ``i g x2' = -kappa x1``, ``i g x1' = -kappa x2``.
    ``sign=-1`` is the complex conjugate flow with ``kappa*``.
    """
    if not g > 0:
        raise ValueError("g must be positive")
    rate = 1j * complex(kappa) / g
    if sign < 0:
        rate = rate.conjugate()
    return np.array([[0, rate], [rate, 0]], dtype=complex)


def chiral_flow(g, kappa, init, t_grid, sign=1, max_step=DEFAULT_STEP, tol=DEFAULT_TOL):
    """Integrate a chiral constituent.

    ``u = x1 + x2`` evolves as ``exp(i kappa t / g)`` and ``v = x1 - x2`` as
    ``exp(-i kappa t / g)``: with ``kappa = kappa1 + i kappa2`` the first decays
    and the second grows at rate ``kappa2 / g``.
    """
    z0 = np.array([init.x1, init.x2], dtype=complex)
    z = integrate_linear(chiral_generator(g, kappa, sign), z0, t_grid, max_step, tol)
    return Trajectory(t_grid, z)


def chiral_velocities(g, kappa, traj, sign=1):
    """Velocities along a chiral trajectory, from its generator."""
    F = chiral_generator(g, kappa, sign)
    return traj.z[:, :2] @ F.T


def noether_charge(Gamma, s, sign=1):
    """SU(1,1) charge ``+-(Gamma/2)(x1**2 - x2**2)``."""
    return sign * Gamma / 2 * (s.x1 * s.x1 - s.x2 * s.x2)


def _unit_path(rng, n, degree):
    from .solder import PolynomialPath

    path = PolynomialPath.random(rng, n, degree)
    t = np.linspace(0.0, 1.0, 65)
    scale = max(np.abs(path.values(t)).max(), np.abs(path.derivative().values(t)).max())
    return PolynomialPath(path.coeffs / scale), t


def su11_invariance_residual(L, theta, seed=0, degree=6):
    """Largest change of ``L`` on a random path under ``x -> (1 + theta sigma) x``.

    The path is a degree-``degree`` polynomial on ``[0, 1]`` scaled so that
    ``|x|, |xdot| <= 1``.  A linear time-independent map sends the canonical
    (antisymmetric) ``A`` to an antisymmetric matrix, so the pointwise change
    already has no total-derivative part.  For an invariant ``L`` the change is
    ``O(theta**2)``.
    """
    if L.n != 2:
        raise ValueError("the SU(1,1) action is defined on two variables")
    rng = np.random.default_rng(seed)
    path, t = _unit_path(rng, 2, degree)
    x = path.values(t)
    v = path.derivative().values(t)
    S = np.eye(2) + theta * np.array([[0.0, 1.0], [1.0, 0.0]])
    moved = L.evaluate(x @ S.T, v @ S.T)
    return float(np.abs(moved - L.evaluate(x, v)).max())


def composite_energy(p, traj):
    """Legendre-transformed composite Hamiltonian along a doubled trajectory."""
    m, gamma, k = (float(v) for v in p.astuple())
    x1, x2 = traj.z[:, 0], traj.z[:, 1]
    v1, v2 = traj.z[:, 2], traj.z[:, 3]
    p1 = m * v1 + gamma / 2 * x2
    p2 = -m * v2 - gamma / 2 * x1
    return (
        (p1 - gamma / 2 * x2) ** 2 / (2 * m)
        + k / 2 * x1**2
        - (p2 + gamma / 2 * x1) ** 2 / (2 * m)
        - k / 2 * x2**2
    )


def require_underdamped(p):
    if classify(p).kind is not RegimeKind.UNDERDAMPED:
        raise NotOscillatory(f"R = {classify(p).R}: motion is not oscillatory")

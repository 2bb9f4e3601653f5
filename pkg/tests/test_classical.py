import io
import math

import numpy as np
import pytest
import sympy

from dampedq import classical as cl
from dampedq import solder
from dampedq.errors import NotOscillatory, StepSizeTooLarge
from dampedq.hamiltonian import legendre_composite
from dampedq.params import ChiralParams, DhoParams, chiral_to_physical

ANCHOR = DhoParams(0.5, 1.0, 1.0)
R2 = math.sqrt(2)


@pytest.mark.parametrize(
    "x1, x2, x, y",
    [(R2, 0, 1, 1), (0, R2, 1, -1), (1, 1, R2, 0)],
)
def test_hyperbolic_examples(x1, x2, x, y):
    got = cl.hyperbolic_to_physical(cl.PhaseState(x1, x2))
    assert got == pytest.approx((x, y), abs=1e-15)
    back = cl.physical_to_hyperbolic(*got)
    assert back == pytest.approx((x1, x2), abs=1e-15)


def test_phase_state_rejects_nonfinite():
    with pytest.raises(ValueError):
        cl.PhaseState(float("inf"), 0)


def test_trajectory_invariants():
    with pytest.raises(ValueError):
        cl.Trajectory([0, 0], np.zeros((2, 2)))
    with pytest.raises(ValueError):
        cl.Trajectory([0, 1], np.zeros((3, 2)))
    tr = cl.Trajectory([0, 1], np.zeros((2, 2)))
    with pytest.raises(ValueError):
        tr.z[0, 0] = 1


def test_rk4_propagator_matches_stagewise_rk4():
    rng = np.random.default_rng(0)
    F = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    z = rng.standard_normal(4) + 0j
    h = 0.01
    a = cl.rk4_propagator(F, h) @ z
    b = cl.rk4_step(lambda t, v: F @ v, 0.0, z, h)
    assert np.abs(a - b).max() < 1e-15


def test_rk4_fourth_order():
    F = np.array([[0, 1], [-1, 0]], dtype=complex)
    z0 = np.array([1, 0], dtype=complex)
    errs = []
    for h in (0.1, 0.05):
        z = cl.integrate_linear(F, z0, [0.0, 1.0], max_step=h, tol=1.0)[-1]
        errs.append(abs(z[0] - math.cos(1.0)))
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.1)


def test_integrate_doubled_anchor_at_pi():
    t = np.linspace(0, math.pi, 3142)
    tr = cl.integrate_doubled(ANCHOR, cl.PhaseState.from_physical(1, 1, -1 + 1j, 1 - 1j), t)
    assert abs(tr.x[-1] + math.exp(-math.pi)) < 1e-10
    assert abs(tr.y[-1] + math.exp(math.pi)) < 1e-8


def test_undamped_period():
    p = DhoParams(1.0, 0.0, 1.0)
    t = np.linspace(0, 2 * math.pi, 6284)
    tr = cl.integrate_doubled(p, cl.PhaseState.from_physical(1, 1, 0, 0), t)
    assert abs(tr.x[-1] - 1) < 1e-10


def test_y_channel_grows():
    t = np.linspace(0, 4, 401)
    tr = cl.integrate_doubled(ANCHOR, cl.analytic_initial_state(ANCHOR), t)
    assert np.allclose(np.abs(tr.y), np.exp(t), rtol=1e-10)


def test_integrate_needs_velocities():
    with pytest.raises(ValueError):
        cl.integrate_doubled(ANCHOR, cl.PhaseState(1, 0), [0, 1])


def test_step_size_too_large():
    with pytest.raises(StepSizeTooLarge):
        cl.integrate_doubled(ANCHOR, cl.analytic_initial_state(ANCHOR), [0, 1], max_step=1.0)


def test_overdamped_integrates():
    p = DhoParams(1.0, 3.0, 2.0)
    t = np.linspace(0, 3, 301)
    # x = e^{-t} solves x'' + 3x' + 2x = 0, y = e^{t} the reversed equation
    tr = cl.integrate_doubled(p, cl.PhaseState.from_physical(1, 1, -1, 1), t)
    assert np.allclose(tr.x, np.exp(-t), atol=1e-10)
    assert np.allclose(tr.y, np.exp(t), rtol=1e-10)


def test_analytic_examples():
    assert cl.analytic_solution(ANCHOR, 1.0, 0.0) == pytest.approx((1, 1))
    x, y = cl.analytic_solution(ANCHOR, 1.0, math.pi)
    assert x == pytest.approx(-math.exp(-math.pi), abs=1e-15)
    assert y == pytest.approx(-math.exp(math.pi), rel=1e-14)
    x, y = cl.analytic_solution(ANCHOR, 1.0, 3.7)
    assert abs(x * y - 1) < 1e-14
    with pytest.raises(NotOscillatory):
        cl.analytic_solution(DhoParams(1, 3, 2), 1.0, 0.0)


def test_analytic_solves_equations_symbolically():
    m, g, k, t, A = sympy.symbols("m gamma k t A", positive=True)
    Om = sympy.sqrt((k - g**2 / (4 * m)) / m)
    x = A * sympy.exp(-g * t / (2 * m)) * sympy.exp(sympy.I * Om * t)
    y = A * sympy.exp(g * t / (2 * m)) * sympy.exp(-sympy.I * Om * t)
    assert sympy.simplify(m * x.diff(t, 2) + g * x.diff(t) + k * x) == 0
    assert sympy.simplify(m * y.diff(t, 2) - g * y.diff(t) + k * y) == 0


def test_chiral_flow_anchor():
    t = np.linspace(0, math.pi, 3142)
    tr = cl.chiral_flow(1.0, 1 + 1j, cl.PhaseState(1, 0), t)
    u, v = tr.x1[-1] + tr.x2[-1], tr.x1[-1] - tr.x2[-1]
    assert abs(u + math.exp(-math.pi)) < 1e-10
    assert abs(v + math.exp(math.pi)) < 1e-8


def test_chiral_flow_real_kappa_keeps_modulus():
    t = np.linspace(0, 5, 501)
    tr = cl.chiral_flow(2.0, 1.5, cl.PhaseState(0.3, 0.8), t)
    u = tr.x1 + tr.x2
    assert np.abs(np.abs(u) - abs(u[0])).max() < 1e-10


def test_chiral_flow_matches_analytic_solution():
    g, kappa = 1.3, 0.9 + 0.4j
    p = chiral_to_physical(ChiralParams.complex(g, kappa))
    t = np.linspace(0, 3, 301)
    # x(0) = y(0) = A means x1(0) = sqrt(2) A, x2(0) = 0
    tr = cl.chiral_flow(g, kappa, cl.PhaseState(R2, 0), t)
    x, y = cl.analytic_solution(p, 1.0, t)
    # chiral flow gives u = x1 + x2 = sqrt(2) x and v = x1 - x2 = sqrt(2) y
    assert np.allclose((tr.x1 + tr.x2) / R2, x, atol=1e-10)
    assert np.allclose((tr.x1 - tr.x2) / R2, y, rtol=1e-10)


def test_minus_member_reproduces_same_solutions():
    # L- flow with the conjugate initial data is the complex conjugate of the L+ flow
    t = np.linspace(0, 2, 201)
    plus = cl.chiral_flow(1.0, 1 + 1j, cl.PhaseState(1 + 0.5j, 0.2j), t, sign=1)
    minus = cl.chiral_flow(1.0, 1 + 1j, cl.PhaseState(1 - 0.5j, -0.2j), t, sign=-1)
    assert np.allclose(plus.z.conj(), minus.z, atol=1e-12)


def test_noether_examples():
    assert cl.noether_charge(1, cl.PhaseState(1, 1)) == 0
    assert cl.noether_charge(1, cl.PhaseState(2, 0)) == 2
    assert cl.noether_charge(1, cl.PhaseState(2, 0), -1) == -2


@pytest.mark.parametrize("sign", [1, -1])
def test_noether_conserved(sign):
    t = np.linspace(0, 5, 5001)
    tr = cl.chiral_flow(1.0, 1 + 1j, cl.PhaseState(0.7, 0.2 + 0.1j), t, sign=sign)
    q = cl.noether_charge(-1j, tr, sign)
    assert np.abs(q - q[0]).max() < 1e-8


def test_su11_residual_examples():
    Lc = solder.composite_lagrangian(DhoParams(1.0, 3.0, 2.0))
    Lp = solder.chiral_lagrangian(+1, ChiralParams.real(1.0, -2.0, 1.0))
    assert cl.su11_invariance_residual(Lc, 1e-4) < 1e-7
    assert cl.su11_invariance_residual(Lp, 1e-4) < 1e-7
    assert cl.su11_invariance_residual(Lc, 0.0) == 0.0


def test_su11_residual_is_second_order():
    L = solder.composite_lagrangian(DhoParams(1.0, 3.0, 2.0))
    r1, r2 = cl.su11_invariance_residual(L, 1e-2), cl.su11_invariance_residual(L, 2e-2)
    assert r2 / r1 == pytest.approx(4, rel=1e-6)


def test_su11_symbolic_expansion():
    # under x -> (1 + theta sigma) x the composite form changes by exactly -theta^2 L
    th, m, g, k = sympy.symbols("theta m gamma k")
    x1, x2, v1, v2 = sympy.symbols("x1 x2 v1 v2")

    def L(a, b, va, vb):
        return m / 2 * (va**2 - vb**2) - g / 2 * (a * vb - b * va) - k / 2 * (a**2 - b**2)

    base = L(x1, x2, v1, v2)
    moved = L(x1 + th * x2, x2 + th * x1, v1 + th * v2, v2 + th * v1)
    assert sympy.expand(moved - base + th**2 * base) == 0


def test_duality_reversed_trajectory_is_a_solution():
    t = np.linspace(0, 10, 10001)
    tr = cl.integrate_doubled(ANCHOR, cl.analytic_initial_state(ANCHOR), t)
    rev = cl.time_reversed(tr)
    F = cl.doubled_generator(ANCHOR)
    assert cl.step_residual(F, rev) < 1e-8
    assert cl.step_residual(F, tr) < 1e-8


def test_composite_energy_conserved():
    t = np.linspace(0, 5, 5001)
    tr = cl.integrate_doubled(ANCHOR, cl.PhaseState.from_physical(1, 0.5, 0.2, -0.3), t)
    E = cl.composite_energy(ANCHOR, tr)
    assert np.abs(E - E[0]).max() < 1e-8
    # same value from the Hamiltonian matrix
    H = legendre_composite(ANCHOR)
    x1, x2, v1, v2 = tr.z[0]
    z = np.array([x1, x2, 0.5 * v1 + 0.5 * x2, -0.5 * v2 - 0.5 * x1])
    assert H.value(z) == pytest.approx(E[0], abs=1e-14)


def test_csv_export():
    tr = cl.Trajectory([0.0, 0.5], [[1, 0], [0.5j, 0.25]])
    buf = io.StringIO()
    tr.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,re_x1,im_x1,re_x2,im_x2,re_x,im_x,re_y,im_y"
    assert len(lines) == 3
    assert lines[1].split(",")[:3] == ["0.0", "1.0", "0.0"]

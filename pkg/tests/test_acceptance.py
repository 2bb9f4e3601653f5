"""Acceptance criteria, one test per criterion (criterion 7 split into parts).

Each test prints a ``[PASS]``/``[FAIL]`` line; the lines are also collected and
shown in the terminal summary (see conftest.py).  Run directly with
``python3 tests/test_acceptance.py`` for the lines alone.
"""

import math
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from dampedq import checks, classical, hamiltonian, pseudoq, solder
from dampedq.params import ChiralParams, DhoParams, chiral_to_physical, physical_to_chiral

pytestmark = pytest.mark.acceptance

RESULTS = []


def report(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


ANCHOR = DhoParams(0.5, 1.0, 1.0)


def test_c1_parameter_round_trip():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        for p in (checks.random_underdamped(rng), checks.random_overdamped(rng)):
            back = chiral_to_physical(physical_to_chiral(p))
            worst = max(worst, *(abs(a - b) / abs(b) for a, b in zip(back.astuple(), p.astuple())))
    exact = True
    for _ in range(1000):
        c = checks.random_rational_doublet(rng)
        p = chiral_to_physical(c)
        exact &= p.exact and chiral_to_physical(physical_to_chiral(p)) == p
        exact &= physical_to_chiral(p) == c
    report("C1 parameter round trip", worst < 1e-12 and exact, f"max rel err {worst:.2e} (< 1e-12), rational exact={exact}")


def test_c2_solder_route_equivalence():
    rng = np.random.default_rng(2)
    worst = max(checks.solder_routes_residual(checks.random_float_doublet(rng)) for _ in range(1000))
    c = ChiralParams.real(1, -2, 1)
    Lp, Lm = solder.chiral_lagrangian(+1, c), solder.chiral_lagrangian(-1, c)
    aux, direct = solder.solder_auxiliary(Lp, Lm), solder.solder_direct(Lp, Lm)
    anchor = (
        aux.identified.astuple() == (1, 3, 2)
        and direct.identified.astuple() == (1, 3, 2)
        and all(isinstance(v, Fraction) or isinstance(v, int) for v in aux.identified.astuple())
        and aux.max_coefficient_deviation == 0
        and direct.max_coefficient_deviation == 0
    )
    report(
        "C2 soldering route equivalence",
        worst < 1e-12 and anchor,
        f"max coefficient deviation {worst:.2e} (< 1e-12), anchor (1,3,2) exact={anchor}",
    )


def _anchor_run(A=1.0):
    t = np.linspace(0.0, 10.0, 10001)
    traj = classical.integrate_doubled(ANCHOR, classical.analytic_initial_state(ANCHOR, A), t, max_step=1e-3)
    x, y = classical.analytic_solution(ANCHOR, A, t)
    return t, traj, x, y


def test_c3_classical_dynamics():
    t, traj, x, y = _anchor_run()
    scaled = max(
        float((np.abs(traj.x - x) / np.maximum(1.0, np.abs(x))).max()),
        float((np.abs(traj.y - y) / np.maximum(1.0, np.abs(y))).max()),
    )
    c = physical_to_chiral(ANCHOR)
    t5 = np.linspace(0.0, 5.0, 5001)
    drift = 0.0
    for sign in (+1, -1):
        flow = classical.chiral_flow(c.g, c.kappa, classical.PhaseState(0.3 + 0.1j, 0.7 - 0.2j), t5, sign=sign)
        q = classical.noether_charge(c.Gamma, flow, sign)
        drift = max(drift, float(np.abs(q - q[0]).max()))
    prod = float(np.abs(x * y - 1.0).max())
    ok = scaled < 1e-8 and drift < 1e-8 and prod < 1e-10
    report(
        "C3 classical dynamics",
        ok,
        f"RK4 deviation scaled by max(1,|exact|) {scaled:.2e} (< 1e-8), "
        f"Noether drift {drift:.2e} (< 1e-8), x*y drift {prod:.2e} (< 1e-10)",
    )


def test_c3b_classical_dynamics_absolute_deviation():
    # literal reading: unscaled deviation, dominated by the growing y channel (|y| up to e^10)
    t, traj, x, y = _anchor_run()
    dx = float(np.abs(traj.x - x).max())
    dy = float(np.abs(traj.y - y).max())
    report("C3b classical dynamics, absolute deviation", max(dx, dy) < 1e-8, f"|dx| {dx:.2e}, |dy| {dy:.2e} (< 1e-8)")


def test_c4_canonicity_and_diagonalization():
    rng = np.random.default_rng(4)
    sym = off = conj = 0.0
    for _ in range(100):
        p = checks.random_underdamped(rng)
        sym = max(sym, hamiltonian.canonical_map_ct(p).symplectic_residual())
        Hd, _ = hamiltonian.diagonalized_composite(p)
        off = max(off, hamiltonian.off_block_residual(Hd))
        Hp, Hm = Hd.block(0), Hd.block(1)
        conj = max(conj, float(np.abs(Hp.H.conj() - Hm.H).max()))
    ok = sym < 1e-12 and off < 1e-12 and conj < 1e-14
    report(
        "C4 canonicity and diagonalization",
        ok,
        f"symplectic {sym:.2e} (< 1e-12), off-block {off:.2e} (< 1e-12), conjugacy {conj:.2e} (< 1e-14)",
    )


def test_c5_route_consistency():
    rng = np.random.default_rng(5)
    worst = 0.0
    for p in [ANCHOR] + [checks.random_underdamped(rng) for _ in range(100)]:
        c = physical_to_chiral(p)
        Hp, _ = hamiltonian.split_hamiltonian(p)
        worst = max(worst, float(np.abs(hamiltonian.first_order_route(c.g, c.kappa).H - Hp.H).max()))
    report("C5 route consistency", worst < 1e-12, f"max coefficient difference {worst:.2e} (< 1e-12)")


def test_c6_pseudo_hermitian_algebra():
    D = 64
    ex = pseudoq.exact_ladder_algebra(D)
    exact = ex["lower"].is_zero_matrix and ex["raise"].is_zero_matrix
    omega = 1 + 1j
    _, Hd = pseudoq.number_and_hamiltonian(omega, D)
    r_diag = pseudoq.pseudo_hermiticity_residual(Hd, pseudoq.eta_operator(D, omega))
    Hr = pseudoq.fock_matrix_hamiltonian(omega, abs(omega), D)
    eta_r = pseudoq.eta_operator(D, omega, pseudoq.Basis.FOCK_OF_REFERENCE)
    r_ref = pseudoq.pseudo_hermiticity_residual(Hr, eta_r, leading=D - 1)
    eps = np.finfo(float).eps * np.linalg.norm(Hd.entries, 2)
    ok = exact and r_diag <= eps and r_ref < 1e-10
    report(
        "C6 pseudo-hermitian algebra",
        ok,
        f"[N,a]+a=0 and [N,a~]-a~=0 exactly at D=64: {exact}, "
        f"diagonal H residual {r_diag:.2e} (machine precision), reference H residual {r_ref:.2e} (< 1e-10)",
    )


@pytest.fixture(scope="module")
def spectrum64():
    D = 64
    omega = 1 + 1j
    H = pseudoq.fock_matrix_hamiltonian(omega, math.sqrt(2), D)
    return omega, D, pseudoq.biorthogonal_diagonalize(H)


def test_c7a_low_eigenvalues(spectrum64):
    omega, D, sys_ = spectrum64
    err = np.abs(sys_.eigenvalues[:16] - omega * (np.arange(16) + 0.5))
    bad = [n for n in range(16) if err[n] >= 1e-6]
    report("C7a eigenvalues n=0..15 at D=64", not bad, f"max |lambda_n - (1+i)(n+1/2)| {err.max():.2e} (< 1e-6); failing n={bad}")


def test_c7b_convergence_oracle_d128():
    omega = 1 + 1j
    sys_ = pseudoq.biorthogonal_diagonalize(pseudoq.fock_matrix_hamiltonian(omega, math.sqrt(2), 128))
    err = float(np.abs(sys_.eigenvalues[:16] - omega * (np.arange(16) + 0.5)).max())
    report("C7b eigenvalues n=0..15 at D=128 (oracle)", err < 1e-6, f"max deviation {err:.2e} (< 1e-6)")


def test_c7c_biorthonormality(spectrum64):
    _, _, sys_ = spectrum64
    r = sys_.biorthonormality_residual(16)
    report("C7c biorthonormality on n=0..15", r < 1e-8, f"max |<phi_n|psi_m> - delta| {r:.2e} (< 1e-8)")


def test_c7d_eta_maps_left_to_right(spectrum64):
    omega, D, sys_ = spectrum64
    eta = pseudoq.eta_operator(D, omega, pseudoq.Basis.FOCK_OF_REFERENCE)
    dev = sys_.eta_deviation(eta, 16)
    report("C7d eta phi_n = psi_n up to phase", dev < 1e-6, f"max deviation {dev:.2e} (< 1e-6)")


def test_c7e_ladder_norms(spectrum64):
    omega, D, sys_ = spectrum64
    a, at = pseudoq.reference_ladder(omega, math.sqrt(2), D)
    eta = pseudoq.eta_operator(D, omega, pseudoq.Basis.FOCK_OF_REFERENCE)
    reps = [pseudoq.ladder_matrix_elements(sys_, a, at, n, eta) for n in range(1, 16)]
    res = [r.norm_residual for r in reps]
    conj = max(r.conjugacy_residual for r in reps)
    bad = [r.n for r in reps if r.norm_residual >= 1e-6]
    report(
        "C7e |c|^2 = n for n=1..15",
        not bad,
        f"max ||c|^2 - n| {max(res):.2e} (< 1e-6); failing n={bad}; max |d - c*| {conj:.2e}",
    )


def test_c7f_ground_state_annihilated(spectrum64):
    omega, D, sys_ = spectrum64
    a, _ = pseudoq.reference_ladder(omega, math.sqrt(2), D)
    r = pseudoq.ground_state_annihilation(sys_, a)
    report("C7f |a psi_0| vanishes", r < 1e-8, f"|a psi_0| / |psi_0| {r:.2e} (< 1e-8)")


def test_c8_composite_spectrum():
    rng = np.random.default_rng(8)
    ok = True
    for _ in range(1000):
        p = checks.random_underdamped(rng)
        n, m = (int(v) for v in rng.integers(0, 30, size=2))
        z = pseudoq.composite_spectrum(p, n, m)
        ok &= (z.imag == 0) == (n == m)
        ok &= z.imag == p.gamma / (2 * p.m) * (n - m)
    z10 = pseudoq.composite_spectrum(ANCHOR, 1, 0)
    z00 = pseudoq.composite_spectrum(ANCHOR, 0, 0)
    ok &= z10 == 2 + 1j and z00 == 1
    report("C8 composite spectrum identity", ok, f"real iff n=m, Im exact; anchor n=1,m=0 -> {z10}, n=m=0 -> {z00}")


def test_c9_cli_determinism(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"report{i}.json"
        proc = subprocess.run(
            [sys.executable, "-m", "dampedq", "checks", "--seed", "7", "-o", str(path)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    same = outs[0] == outs[1]
    report("C9 CLI determinism", same, f"two `checks --seed 7` runs byte-identical: {same} ({len(outs[0])} bytes)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))

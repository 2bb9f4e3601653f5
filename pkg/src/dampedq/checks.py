"""Cross-module invariant suites behind the ``checks`` command.

Each suite draws its own generator from ``(seed, suite name)`` and returns the
largest residual it saw.  Suites run one after another; the report is
assembled at the end and serialized with sorted keys and fixed float
formatting, so equal seeds give byte-identical output.
"""

from fractions import Fraction
import json
import math
import zlib

import numpy as np

from . import classical, hamiltonian, pseudoq, solder
from .params import (
    ChiralParams,
    DhoParams,
    chiral_to_physical,
    physical_to_chiral,
)

ALGEBRAIC_DRAWS = 1000
INTEGRATION_DRAWS = 100


def _rng(seed, name):
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def random_underdamped(rng):
    m, k = rng.uniform(0.2, 5.0, size=2)
    R = rng.uniform(1.05, 20.0)
    return DhoParams(float(m), float(math.sqrt(4 * m * k / R)), float(k))


def random_overdamped(rng):
    m, k = rng.uniform(0.2, 5.0, size=2)
    R = rng.uniform(0.05, 0.95)
    return DhoParams(float(m), float(math.sqrt(4 * m * k / R)), float(k))


def random_rational_doublet(rng):
    """Physical real-branch couplings: ``Gamma > 0``, ``k- > 0``, ``k+ < -k-``."""
    Gamma = Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 10)))
    km = Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 10)))
    kp = -km - Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 10)))
    return ChiralParams.real(Gamma, kp, km)


def random_float_doublet(rng):
    if rng.random() < 0.5:
        km = float(rng.uniform(0.1, 5.0))
        return ChiralParams.real(float(rng.uniform(0.1, 5.0)), -km - float(rng.uniform(0.1, 5.0)), km)
    return ChiralParams.complex(float(rng.uniform(0.1, 5.0)), complex(*rng.uniform(0.1, 5.0, size=2)))


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def suite_param_roundtrip(seed, draws=ALGEBRAIC_DRAWS):
    rng = _rng(seed, "param_roundtrip")
    worst = 0.0
    exact_ok = True
    for _ in range(draws):
        for p in (random_underdamped(rng), random_overdamped(rng)):
            back = chiral_to_physical(physical_to_chiral(p))
            worst = max(worst, *(_rel(a, b) for a, b in zip(back.astuple(), p.astuple())))
        c = random_rational_doublet(rng)
        p = chiral_to_physical(c)
        c2 = physical_to_chiral(p)
        exact_ok &= p.exact and (c2.Gamma, c2.k_plus, c2.k_minus) == (c.Gamma, c.k_plus, c.k_minus)
        exact_ok &= chiral_to_physical(c2) == p
    return {"max_residual": worst, "tolerance": 1e-12, "exact_rational": bool(exact_ok), "draws": draws}


def solder_routes_residual(c):
    Lp, Lm = solder.chiral_lagrangian(+1, c), solder.chiral_lagrangian(-1, c)
    aux = solder.solder_auxiliary(Lp, Lm).residual_L
    direct = solder.solder_direct(Lp, Lm).residual_L
    target = solder.composite_lagrangian(chiral_to_physical(c))
    return max(
        float(solder.equivalent_mod_total_derivative(aux, direct)[1]),
        float(solder.equivalent_mod_total_derivative(aux, target)[1]),
    )


def suite_solder_routes(seed, draws=ALGEBRAIC_DRAWS):
    rng = _rng(seed, "solder_routes")
    worst = max(solder_routes_residual(random_float_doublet(rng)) for _ in range(draws))
    anchor = solder.solder_direct(*(solder.chiral_lagrangian(s, ChiralParams.real(1, -2, 1)) for s in (1, -1)))
    return {
        "max_residual": worst,
        "tolerance": 1e-12,
        "anchor_exact": anchor.identified == DhoParams(1, 3, 2),
        "draws": draws,
    }


def suite_classical(seed, draws=INTEGRATION_DRAWS):
    rng = _rng(seed, "classical")
    t = np.linspace(0.0, 2.0, 201)
    worst = worst_charge = worst_prod = 0.0
    for _ in range(draws):
        p = random_underdamped(rng)
        A = complex(*rng.uniform(-1, 1, size=2))
        traj = classical.integrate_doubled(p, classical.analytic_initial_state(p, A), t)
        x, y = classical.analytic_solution(p, A, t)
        scale = np.maximum(1.0, np.abs(y))
        worst = max(worst, float((np.abs(traj.x - x) / scale).max()), float((np.abs(traj.y - y) / scale).max()))
        worst_prod = max(worst_prod, float(np.abs(x * y - A * A).max()))
        c = physical_to_chiral(p)
        init = classical.PhaseState(*(complex(*rng.uniform(-1, 1, size=2)) for _ in range(2)))
        flow = classical.chiral_flow(c.g, c.kappa, init, t)
        charges = classical.noether_charge(c.Gamma, flow, +1)
        worst_charge = max(worst_charge, float(np.abs(charges - charges[0]).max()) / max(1.0, abs(charges[0])))
    return {
        "max_residual": max(worst, worst_charge),
        "trajectory_residual": worst,
        "charge_drift": worst_charge,
        "product_drift": worst_prod,
        "tolerance": 1e-8,
        "draws": draws,
    }


def suite_canonicity(seed, draws=ALGEBRAIC_DRAWS):
    rng = _rng(seed, "canonicity")
    sym = off = conj = ident = route = 0.0
    for _ in range(draws):
        p = random_underdamped(rng)
        rep = hamiltonian.diagonalization_report(p, npoints=10, seed=0)
        sym = max(sym, rep.symplectic)
        off = max(off, rep.off_block)
        conj = max(conj, rep.conjugate_pairing)
        ident = max(ident, rep.value_identity)
        c = physical_to_chiral(p)
        Hp, _ = hamiltonian.split_hamiltonian(p)
        H1 = hamiltonian.first_order_route(c.g, c.kappa)
        route = max(route, float(np.abs(H1.H - Hp.H).max()))
    return {
        "max_residual": max(sym, off),
        "symplectic": sym,
        "off_block": off,
        "conjugate_pairing": conj,
        "value_identity": ident,
        "route_consistency": route,
        "tolerance": 1e-12,
        "draws": draws,
    }


def suite_pseudoq(seed, D=pseudoq.DEFAULT_DIM):
    ex = pseudoq.exact_ladder_algebra(D)
    exact_ok = all(ex[k].is_zero_matrix for k in ("number", "lower", "raise", "canonical"))
    omega = 1 + 1j
    _, Hd = pseudoq.number_and_hamiltonian(omega, D)
    eta = pseudoq.eta_operator(D, omega)
    Hr = pseudoq.fock_matrix_hamiltonian(omega, abs(omega), D)
    eta_r = pseudoq.eta_operator(D, omega, pseudoq.Basis.FOCK_OF_REFERENCE)
    sys = pseudoq.biorthogonal_diagonalize(Hr)
    modes = D // 4
    expected = omega * (np.arange(modes) + 0.5)
    return {
        "max_residual": max(
            pseudoq.pseudo_hermiticity_residual(Hd, eta),
            pseudoq.pseudo_hermiticity_residual(Hr, eta_r, leading=D - 1),
        ),
        "exact_ladder_algebra": bool(exact_ok),
        "spectrum_deviation": float(np.abs(sys.eigenvalues[:modes] - expected).max()),
        "biorthonormality": sys.biorthonormality_residual(modes),
        "tolerance": 1e-10,
        "dimension": D,
    }


def suite_composite_spectrum(seed, draws=ALGEBRAIC_DRAWS):
    rng = _rng(seed, "composite_spectrum")
    worst = 0.0
    real_iff = True
    for _ in range(draws):
        p = random_underdamped(rng)
        n, m = (int(v) for v in rng.integers(0, 20, size=2))
        z = pseudoq.composite_spectrum(p, n, m)
        worst = max(worst, abs(z.imag - p.gamma / (2 * p.m) * (n - m)))
        real_iff &= (z.imag == 0) == (n == m)
    anchor = pseudoq.composite_spectrum(DhoParams(0.5, 1.0, 1.0), 1, 0)
    return {
        "max_residual": worst,
        "real_iff_equal": bool(real_iff),
        "anchor": [anchor.real, anchor.imag],
        "tolerance": 0.0,
        "draws": draws,
    }


SUITES = {
    "param_roundtrip": suite_param_roundtrip,
    "solder_routes": suite_solder_routes,
    "classical": suite_classical,
    "canonicity": suite_canonicity,
    "pseudoq": suite_pseudoq,
    "composite_spectrum": suite_composite_spectrum,
}

_FLAGS = {
    "param_roundtrip": ("exact_rational",),
    "solder_routes": ("anchor_exact",),
    "pseudoq": ("exact_ladder_algebra",),
    "composite_spectrum": ("real_iff_equal",),
}


def run_checks(seed=0, suites=None):
    report = {}
    for name in suites or SUITES:
        res = SUITES[name](seed)
        ok = res["max_residual"] <= res["tolerance"] and all(res[f] for f in _FLAGS.get(name, ()))
        res["pass"] = bool(ok)
        report[name] = res
    return {"seed": seed, "suites": report, "all_pass": all(r["pass"] for r in report.values())}


def _fmt(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float):
        return "%.6e" % obj
    if isinstance(obj, dict):
        return {k: _fmt(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fmt(v) for v in obj]
    return _fmt(float(obj))


def report_json(report):
    """Deterministic serialization: sorted keys, floats as ``%.6e`` strings."""
    return json.dumps(_fmt(report), sort_keys=True, indent=2) + "\n"

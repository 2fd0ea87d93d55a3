import math

import numpy as np
import pytest

from varosc import (
    BasisConfig,
    ClosedFormBranchError,
    ConvergenceError,
    PolynomialPotential,
    assemble_hamiltonian,
    asym_demo,
    from_double_well,
    from_quartic,
    pms_omega_quartic_closed_form,
    pms_optimize,
    trace,
    trace_scan,
)

from oracles import golden_min


def quartic_trace_formula(omega, mu2, g, N):
    return (N * N / 4.0) * (omega + mu2 / omega) + g * N * (1 + 2 * N * N) / (4.0 * omega**2)


# ------------------------------------------------------------------- trace

def test_sho_trace_is_level_sum():
    pot = PolynomialPotential((0.0, 0.0, 0.5))  # m = 1
    val = trace(pot, BasisConfig(dim=3, omega=1.0))
    assert val == pytest.approx(0.5 + 1.5 + 2.5, rel=1e-15)


def test_quartic_trace_closed_formula_both_signs():
    rng = np.random.default_rng(5)
    for sign in (1, -1):
        for _ in range(6):
            omega = float(rng.uniform(0.2, 20.0))
            g = float(rng.uniform(0.01, 2000.0))
            N = int(rng.integers(1, 40))
            pot = from_quartic(1.0, g, sign)
            got = trace(pot, BasisConfig(dim=N, omega=omega))
            want = quartic_trace_formula(omega, sign * 1.0, g, N)
            assert got == pytest.approx(want, rel=1e-13)


def test_trace_matches_assembled_hamiltonian():
    rng = np.random.default_rng(17)
    for _ in range(12):
        degree = int(rng.choice([2, 4, 6, 8]))
        coeffs = list(rng.normal(size=degree)) + [float(rng.uniform(0.1, 5.0))]
        pot = PolynomialPotential(tuple(coeffs))
        cfg = BasisConfig(
            dim=int(rng.integers(1, 31)),
            omega=float(rng.uniform(0.1, 20.0)),
            sigma=float(rng.uniform(-2.0, 2.0)),
            center=int(rng.integers(0, 4)),
        )
        diag_path = trace(pot, cfg)
        matrix_path = float(np.trace(assemble_hamiltonian(pot, cfg).entries))
        assert diag_path == pytest.approx(matrix_path, rel=1e-12)


# ------------------------------------------------------------- closed form

def test_closed_form_double_well_benchmark():
    # frozen from the golden-section oracle on the trace (N=10, g=1000, mu=-1)
    omega = pms_omega_quartic_closed_form(-1.0, 1000.0, 10)
    assert omega == pytest.approx(34.246692861173514, rel=1e-12)


def test_closed_form_matches_numeric_minimum_on_grid():
    from scipy.optimize import brentq

    for mu2 in (1.0, -1.0):
        for g in (1.0, 10.0, 1000.0):
            for N in (2, 10, 50):
                closed = pms_omega_quartic_closed_form(mu2, g, N)
                f = lambda lw: quartic_trace_formula(math.exp(lw), mu2, g, N)
                # golden section brackets the minimum; a derivative root-find
                # sharpens it past the sqrt(eps) floor of value-only search
                coarse = golden_min(f, math.log(closed) - 2.0, math.log(closed) + 2.0)
                h = 1e-6

                def dtrace(w):
                    return (quartic_trace_formula(w * (1 + h), mu2, g, N)
                            - quartic_trace_formula(w * (1 - h), mu2, g, N))

                lo, hi = 0.5 * math.exp(coarse), 2.0 * math.exp(coarse)
                numeric = brentq(dtrace, lo, hi, xtol=1e-13, rtol=1e-14)
                assert abs(closed - numeric) / numeric <= 1e-8


def test_closed_form_is_stationary():
    for mu2, g, N in ((1.0, 1000.0, 100), (-1.0 / 24.0, 1.0 / 2400.0, 80)):
        omega = pms_omega_quartic_closed_form(mu2, g, N)
        h = 1e-6 * omega
        f = lambda w: quartic_trace_formula(w, mu2, g, N)
        deriv = (f(omega + h) - f(omega - h)) / (2 * h)
        assert abs(omega * deriv) <= 1e-9 * abs(f(omega))


def test_closed_form_massless_limit():
    g, N = 7.0, 12
    omega = pms_omega_quartic_closed_form(0.0, g, N)
    assert omega == pytest.approx((2.0 * g * (1 + 2 * N * N) / N) ** (1.0 / 3.0), rel=1e-14)


def test_closed_form_signals_complex_branch():
    # 27 g^2 (1+2N^2)^2 < N^2 mu^3: large positive mass, tiny coupling
    with pytest.raises(ClosedFormBranchError):
        pms_omega_quartic_closed_form(1.0, 1e-9, 2)


def test_closed_form_rejects_bad_inputs():
    with pytest.raises(ValueError):
        pms_omega_quartic_closed_form(1.0, -1.0, 10)
    with pytest.raises(ValueError):
        pms_omega_quartic_closed_form(1.0, 1.0, 0)


# ---------------------------------------------------------------- optimize

def test_sho_optimum_is_oscillator_frequency():
    for m in (0.5, 1.0, 3.0):
        pot = PolynomialPotential((0.0, 0.0, m * m / 2.0))
        res = pms_optimize(pot, 8)
        assert res.omega == pytest.approx(m, rel=1e-9)
        assert res.sigma == 0.0


def test_sho_limit_of_weak_coupling():
    pot = from_quartic(1.0, 1e-9, 1)
    res = pms_optimize(pot, 6)
    assert abs(res.omega - 1.0) <= 1e-6


def test_optimum_matches_closed_form_for_quartic():
    for pot, mu2 in ((from_quartic(1.0, 1000.0), 1.0),
                     (from_double_well(0.01, 5.0), -1.0 / 24.0)):
        g = pot.coeffs[4]
        for N in (10, 80):
            res = pms_optimize(pot, N)
            closed = pms_omega_quartic_closed_form(mu2, g, N)
            assert res.omega == pytest.approx(closed, rel=1e-9)


def test_stationarity_residual_invariant():
    for pot, kwargs in ((from_quartic(1.0, 1000.0), {}),
                        (asym_demo(), {"optimize_sigma": True}),
                        (from_double_well(0.01, 5.0), {})):
        res = pms_optimize(pot, 12, **kwargs)
        assert res.stationarity_residual <= 1e-7 * max(abs(res.trace_value), 1.0)


def test_symmetric_potentials_keep_zero_shift():
    for pot in (from_quartic(1.0, 1000.0), from_double_well(0.01, 5.0)):
        res = pms_optimize(pot, 10, optimize_sigma=True)
        assert abs(res.sigma) <= 1e-6


def test_asymmetric_quartic_benchmark_small_block():
    # benchmark two-parameter optimum; the quoted digits belong to the block
    # of 11 basis functions (indices 0..10)
    res = pms_optimize(asym_demo(), 11, optimize_sigma=True)
    assert res.sigma == pytest.approx(-3.889, abs=5e-3)
    assert res.omega == pytest.approx(31.179, abs=5e-2)


def test_asymmetric_quartic_benchmark_large_block():
    res = pms_optimize(asym_demo(), 41, optimize_sigma=True)
    assert res.sigma == pytest.approx(-3.583, abs=5e-3)
    assert res.omega == pytest.approx(27.431, abs=5e-2)


def test_optimize_is_deterministic():
    a = pms_optimize(asym_demo(), 10, optimize_sigma=True)
    b = pms_optimize(asym_demo(), 10, optimize_sigma=True)
    assert (a.omega, a.sigma, a.trace_value) == (b.omega, b.sigma, b.trace_value)


def test_initial_guess_is_honored():
    res = pms_optimize(from_quartic(1.0, 1000.0), 10, init=(30.0, 0.0))
    assert res.omega == pytest.approx(pms_omega_quartic_closed_form(1.0, 1000.0, 10),
                                      rel=1e-9)
    with pytest.raises(ValueError):
        pms_optimize(from_quartic(1.0, 1000.0), 10, init=(-1.0, 0.0))


def test_unbracketed_minimum_raises():
    # optimal frequency ~ (2 g (1+2N^2)/N)^(1/3) >> grid ceiling
    with pytest.raises(ConvergenceError):
        pms_optimize(from_quartic(1.0, 1e30), 10)


def test_trace_scan_values():
    pot = from_quartic(1.0, 1000.0)
    omegas = np.logspace(0, 2, 7)
    vals = trace_scan(pot, 10, omegas)
    for w, v in zip(omegas, vals):
        assert v == pytest.approx(trace(pot, BasisConfig(dim=10, omega=w)) / 10.0,
                                  rel=1e-15)

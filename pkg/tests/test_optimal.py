import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpaopt.errors import EmptyDecomposition, GridMismatch, PerturbativeWarning, UnnormalizedCoefficients, UnsupportedMode, ZeroKernel
from tpaopt.grid import reference_grid, uniform_grid
from tpaopt.model import SinglePath, make_system
from tpaopt.optimal import (
    PulsePair,
    analytic_norm,
    classical_optimal,
    coefficient_prob,
    enhancement,
    enhancement_from_values,
    fixed_point_residual,
    optimize,
    quantum_optimal,
    transition_prob_classical,
    transition_prob_quantum,
)
from tpaopt.response import build_kernel
from tpaopt.schmidt import decompose


def _alternating_max(kernel, iters=400, seed=0):
    """Maximize |<T, A1 x A2>|^2 over unit pulses by alternating projections."""
    rng = np.random.default_rng(seed)
    T = kernel.values
    wa, wb = kernel.grid_a.weights, kernel.grid_b.weights
    a2 = rng.normal(size=len(wb)) + 1j * rng.normal(size=len(wb))
    for _ in range(iters):
        a1 = np.conj(T @ (wb * a2))
        a1 /= math.sqrt(wa @ np.abs(a1) ** 2)
        a2 = np.conj((wa * a1) @ T)
        a2 /= math.sqrt(wb @ np.abs(a2) ** 2)
    return abs((wa * a1) @ T @ (wb * a2)) ** 2


def test_classical_optimum_matches_independent_maximizer(detuned_small):
    k, sd = detuned_small
    p = classical_optimal(sd, 1.0)
    assert transition_prob_classical(k, p) == pytest.approx(_alternating_max(k), rel=1e-8)


@pytest.mark.parametrize("N", [1.0, 3.0, 0.25])
def test_classical_probability_and_norms(detuned_small, N):
    k, sd = detuned_small
    p = classical_optimal(sd, N)
    n1, n2 = p.norms()
    assert n1 == pytest.approx(N, rel=1e-8) and n2 == pytest.approx(N, rel=1e-8)
    assert transition_prob_classical(k, p) == pytest.approx(N**2 * sd.r[0] ** 2, rel=1e-6)


def test_second_mode_gives_second_coefficient(detuned_small):
    k, sd = detuned_small
    p = classical_optimal(sd, 2.0, mode_index=1)
    assert transition_prob_classical(k, p) == pytest.approx(4.0 * sd.r[1] ** 2, rel=1e-6)


def test_zero_pulses_give_zero(detuned_small):
    k, _ = detuned_small
    z = np.zeros(len(k.grid_a), dtype=complex)
    assert transition_prob_classical(k, PulsePair(z, z, 1.0, k.grid_a, k.grid_b)) == 0.0


def test_symmetric_pulses_identical(detuned_small):
    _, sd = detuned_small
    p = classical_optimal(sd)
    assert np.allclose(p.a1, p.a2, atol=1e-8 * np.abs(p.a1).max())


def test_harmonic_pulse_is_lorentzian(harmonic_small):
    k, sd = harmonic_small
    p = classical_optimal(sd)
    lor = 1 / np.abs(k.grid_a.nodes + 1j)
    lor /= math.sqrt(k.grid_a.integrate(lor**2))
    assert np.abs(p.a1) == pytest.approx(lor, rel=1e-2)


def test_harmonic_state_is_product_of_pulses(harmonic_small):
    k, sd = harmonic_small
    p = classical_optimal(sd)
    s = quantum_optimal(k)
    prod = np.outer(p.a1, p.a2) / p.photon_number
    assert np.max(np.abs(s.amplitude - prod)) < 1e-6 * np.abs(prod).max()


def test_quantum_state_normalization(detuned_small):
    k, sd = detuned_small
    s = quantum_optimal(k)
    assert s.norm() == pytest.approx(1.0, rel=1e-10)
    assert transition_prob_quantum(k, s) == pytest.approx(s.norm_constant, rel=1e-10)
    assert s.norm_constant == pytest.approx(sd.sum_r2, rel=1e-10)


@pytest.mark.parametrize("gamma_f,expect", [(2.0, math.pi**2), (0.5, 4 * math.pi**2)])
def test_norm_constant_values(gamma_f, expect):
    # closed form 2 pi^2 / gamma_f in natural units
    s = make_system(gamma_f, 0.0)
    k = build_kernel(s, reference_grid(s, 401))
    assert quantum_optimal(k).norm_constant == pytest.approx(expect, rel=2e-2)
    assert analytic_norm(s) == pytest.approx(expect, rel=1e-14)


def test_enhancement_formula(detuned_small):
    k, sd = detuned_small
    p = classical_optimal(sd)
    ratio = transition_prob_quantum(k, quantum_optimal(k)) / transition_prob_classical(k, p)
    assert enhancement(sd) == pytest.approx(ratio, rel=1e-8)
    assert enhancement_from_values(np.array([2.0, 1.0, 1.0])) == pytest.approx(1.5)


def test_detuned_enhancement_independent_discretization(detuned_system):
    # wide uniform grid, unrelated to the graded reference layout
    g = uniform_grid(2.5, 60.0, 1201)
    sd = decompose(build_kernel(detuned_system, g))
    assert enhancement(sd) == pytest.approx(2.399, rel=1e-2)


def test_fixed_point_residuals(detuned_small):
    k, sd = detuned_small
    p = classical_optimal(sd)
    res, lam = fixed_point_residual(k, p, with_multiplier=True)
    assert res < 1e-10
    assert np.isfinite(lam)
    assert fixed_point_residual(k, quantum_optimal(k)) < 1e-10
    # a non-optimal pulse pair is far from the fixed point
    assert fixed_point_residual(k, classical_optimal(sd, mode_index=3)) < 1e-8
    rng = np.random.default_rng(1)
    a = rng.normal(size=len(k.grid_a)) + 0j
    assert fixed_point_residual(k, PulsePair(a, a, 1.0, k.grid_a, k.grid_b)) > 1e-2


def test_grid_mismatch(detuned_small, detuned_system):
    k, sd = detuned_small
    other = build_kernel(detuned_system, reference_grid(detuned_system, 101))
    with pytest.raises(GridMismatch):
        transition_prob_classical(other, classical_optimal(sd))
    with pytest.raises(GridMismatch):
        transition_prob_quantum(other, quantum_optimal(k))


def test_errors():
    zero = build_kernel(make_system(1.0, 0.0, mu_ef=0.0), uniform_grid(0.0, 5.0, 11))
    with pytest.raises(ZeroKernel):
        quantum_optimal(zero)
    with pytest.raises(EmptyDecomposition):
        classical_optimal(decompose(zero))
    with pytest.raises(UnsupportedMode):
        analytic_norm(make_system(1.0, 0.0, coupling_mode=SinglePath()))


def test_coefficient_prob_validation(detuned_small):
    _, sd = detuned_small
    with pytest.raises(UnnormalizedCoefficients):
        coefficient_prob(sd, [1.0, 1.0], [1.0, 0.0])
    with pytest.raises(UnnormalizedCoefficients):
        coefficient_prob(sd, [0.7, 0.7], mixed=True)
    assert coefficient_prob(sd, [1.0], [1.0], N=2.0) == pytest.approx(4 * sd.r[0] ** 2)
    assert coefficient_prob(sd, [0.5, 0.5], mixed=True) == pytest.approx(0.5 * (sd.r[0] ** 2 + sd.r[1] ** 2))


@settings(max_examples=100, deadline=None)
@given(
    c=st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=1, max_size=8),
    d=st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=1, max_size=8),
    N=st.floats(0.1, 10),
)
def test_coherent_coefficients_never_beat_optimum(detuned_small, c, d, N):
    _, sd = detuned_small
    m = max(len(c), len(d))
    c = np.pad(np.array(c), (0, m - len(c)))
    d = np.pad(np.array(d), (0, m - len(d)))
    if np.linalg.norm(c) < 1e-6 or np.linalg.norm(d) < 1e-6:
        return
    c, d = c / np.linalg.norm(c), d / np.linalg.norm(d)
    assert coefficient_prob(sd, c, d, N) <= N**2 * sd.r[0] ** 2 * (1 + 1e-12)


@settings(max_examples=50, deadline=None)
@given(p=st.lists(st.floats(0, 1), min_size=1, max_size=8))
def test_mixtures_never_beat_optimum(detuned_small, p):
    _, sd = detuned_small
    p = np.array(p)
    if p.sum() <= 1e-6:
        return
    p = p / p.sum()
    assert coefficient_prob(sd, p, mixed=True) <= sd.r[0] ** 2 * (1 + 1e-12)


def test_optimize_summary(detuned_system):
    weak = make_system(0.5, 5.0, mu_ge=0.01, mu_ef=0.01)
    k = build_kernel(weak, reference_grid(weak, 201))
    sd = decompose(k)
    res = optimize(k, sd, N=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        summary = res.summary()
    assert summary["E"] == pytest.approx(res.pf_quantum / res.pf_classical, rel=1e-8)
    assert summary["rank"] == sd.rank


def test_perturbative_warning(detuned_small):
    k, sd = detuned_small
    with pytest.warns(PerturbativeWarning):
        optimize(k, sd, N=1.0).summary()  # unit coupling gives p_f of order 1

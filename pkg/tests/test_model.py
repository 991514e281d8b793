import math

import pytest

from tpaopt.errors import ConfigError, NegativeDipole, NonPositiveLinewidth
from tpaopt.model import SinglePath, Symmetric, TwoAtom, from_detunings, from_rubidium, make_system


def test_defaults_and_derived_quantities():
    s = make_system(0.5, 5.0, mu_ge=2.0, mu_ef=3.0, field_norm=0.5)
    assert s.delta_small == pytest.approx(-1.5)
    assert s.coupling == pytest.approx(2.0 * 3.0 * 0.25)
    assert isinstance(s.coupling_mode, Symmetric)
    assert not s.is_harmonic
    assert make_system(2.0, 0.0).is_harmonic


def test_from_detunings_round_trip():
    s = from_detunings(3.0, 1.25)
    assert s.delta_cap == 3.0
    assert s.gamma_f == pytest.approx(3.25)
    assert s.delta_small == pytest.approx(1.25)


@pytest.mark.parametrize("gamma_f", [0.0, -0.1, -3.0])
def test_nonpositive_linewidth_rejected(gamma_f):
    with pytest.raises(NonPositiveLinewidth) as exc:
        make_system(gamma_f, 0.0)
    assert isinstance(exc.value, ConfigError)
    assert "-2" in str(exc.value)


def test_delta_small_bound_rejected():
    with pytest.raises(NonPositiveLinewidth):
        from_detunings(0.0, -2.0)


@pytest.mark.parametrize("kw", [{"mu_ge": -1.0}, {"mu_ef": -0.5}])
def test_negative_dipole_rejected(kw):
    with pytest.raises(NegativeDipole):
        make_system(1.0, 0.0, **kw)


def test_rubidium_matches_independent_unit_conversion():
    # Delta = (omega_f - 2 omega_e) tau_e, gamma_f = tau_e / tau_f
    c = 299_792_458.0
    w_ge = 2 * math.pi * c / 780e-9
    w_ef = 2 * math.pi * c / 776e-9
    tau_e, tau_f = 26e-9, 232e-9
    s = from_rubidium()
    assert s.delta_cap == pytest.approx((w_ef - w_ge) * tau_e, rel=1e-12)
    assert s.gamma_f == pytest.approx(tau_e / tau_f, rel=1e-12)
    assert s.omega_e_abs == pytest.approx(w_ge, rel=1e-12)
    assert s.delta_cap == pytest.approx(3.2365e5, rel=1e-4)


def test_modes_are_named_and_hashable():
    assert {Symmetric().name, SinglePath().name, TwoAtom().name} == {"symmetric", "single_path", "two_atom"}
    s = make_system(1.0, 0.0, coupling_mode=TwoAtom(gamma_e2=2.0, delta_atoms=1.0))
    d = s.as_dict()
    assert d["gamma_f"] == 1.0
    hash(s)

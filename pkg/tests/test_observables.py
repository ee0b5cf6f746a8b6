import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config import Settings
from dynamics import integrate
from errors import ModelError, UnphysicalWidthError, UnsupportedModelError
from models import ClassicalState, ErmakovState, Model, ModelFamily, PhysicalConstants
from observables import (
    ck_uncertainty_product,
    energy_contribution,
    ermakov_invariant,
    expanding_hamiltonian,
    invariant_drift,
    invariant_series,
    uncertainties,
)

FAST = Settings(output_stride=1)


class TestErmakovInvariant:
    @pytest.mark.parametrize("family", list(ModelFamily))
    def test_vanishes_at_rest(self, family, make_model):
        gamma = 0.0 if family is ModelFamily.CONSERVATIVE else 0.4
        model = make_model(family, gamma=gamma)
        value = ermakov_invariant(model, 1.3, ClassicalState(0.0, 0.0), ErmakovState(0.8, 0.2))
        assert value.value == 0.0
        assert value.model_tag is family

    @pytest.mark.parametrize("t", [0.0, 0.7, 2.5, 9.1])
    def test_closed_orbit(self, t, make_model):
        model = make_model(ModelFamily.CONSERVATIVE)
        value = ermakov_invariant(model, t, ClassicalState(math.cos(t), -math.sin(t)), ErmakovState(1.0, 0.0))
        assert value.value == pytest.approx(0.5)

    def test_lognlse_run_conserves_invariant(self, make_model, make_state):
        model = make_model(ModelFamily.LOG_NLSE, gamma=0.5)
        run = integrate(model, make_state(0.2 + 1.1j, 1.0, -0.5), 10.0, 1e-2, settings=FAST)
        assert invariant_drift(invariant_series(run)) < 1e-6


class TestUncertainties:
    def test_ground_state(self, make_model):
        record = uncertainties(make_model(ModelFamily.CONSERVATIVE), 1j)
        assert (record.var_x, record.var_p, record.corr, record.sr_lhs) == pytest.approx((0.5, 0.5, 0.0, 0.25))

    def test_correlated_state(self, make_model):
        record = uncertainties(make_model(ModelFamily.CONSERVATIVE), 1 + 1j)
        assert record.var_x == pytest.approx(0.5)
        assert record.var_p == pytest.approx(1.0)
        assert record.corr == pytest.approx(0.5)
        assert record.u_product == pytest.approx(0.5)

    @settings(max_examples=1000)
    @given(
        log_im=st.floats(-3, 3, exclude_min=True, exclude_max=True),
        ratio=st.floats(-3, 3),
        mass=st.floats(0.1, 10),
        hbar=st.floats(0.1, 10),
    )
    def test_schroedinger_robertson_equality(self, log_im, ratio, mass, hbar):
        im = 10.0 ** log_im
        model = Model(ModelFamily.CONSERVATIVE, PhysicalConstants(mass, hbar))
        record = uncertainties(model, complex(ratio * im, im))
        bound = hbar * hbar / 4
        assert abs(record.sr_lhs - bound) / bound < 1e-12
        assert record.u_product >= bound * (1 - 1e-12)

    def test_unphysical(self, make_model):
        with pytest.raises(UnphysicalWidthError):
            uncertainties(make_model(ModelFamily.CONSERVATIVE), 1.0)


class TestEnergy:
    def test_ground_state_energy(self, make_model):
        assert energy_contribution(make_model(ModelFamily.CONSERVATIVE), 1j, 1.0) == pytest.approx(0.5)

    def test_free_spread(self, make_model):
        assert energy_contribution(make_model(ModelFamily.CONSERVATIVE), 1j, 0.0) == pytest.approx(0.25)

    def test_formula_with_constants(self):
        model = Model(ModelFamily.CONSERVATIVE, PhysicalConstants(2.0, 0.5))
        c = 0.6 + 1.7j
        expected = 0.5 / 4 / 1.7 * (0.36 + 1.7 ** 2 + 0.8 ** 2)
        assert energy_contribution(model, c, 0.8) == pytest.approx(expected)


class TestCaldirolaKanaiProduct:
    def test_undamped_equals_physical_product(self, make_model, make_state):
        model = make_model(ModelFamily.CALDIROLA_KANAI, gamma=0.0)
        run = integrate(model, make_state(0.3 + 2j), 5.0, 1e-2, settings=FAST)
        physical = [uncertainties(model, c).u_product for c in run.c]
        assert ck_uncertainty_product(run) == pytest.approx(physical, rel=1e-12)

    def test_canonical_product_drops_below_bound(self, make_model, make_state):
        gamma = 0.5
        ck = integrate(make_model(ModelFamily.CALDIROLA_KANAI, gamma=gamma), make_state(1j, 1.0, 0.0), 20.0, 1e-2,
                       settings=FAST, error_control=False)
        nl_model = make_model(ModelFamily.LOG_NLSE, gamma=gamma)
        nl = integrate(nl_model, make_state(1j, 1.0, 0.0), 20.0, 1e-2, settings=FAST, error_control=False)
        assert ck_uncertainty_product(ck)[-1] < 0.25
        assert min(uncertainties(nl_model, c).u_product for c in nl.c) >= 0.25 - 1e-12

    def test_needs_ck_run(self, make_model, make_state):
        run = integrate(make_model(ModelFamily.LOG_NLSE, gamma=0.5), make_state(1j), 1.0, 0.1, settings=FAST)
        with pytest.raises(UnsupportedModelError):
            ck_uncertainty_product(run)

    def test_gamma_must_match(self, make_model, make_state):
        run = integrate(make_model(ModelFamily.CALDIROLA_KANAI, gamma=0.5), make_state(1j), 1.0, 0.1, settings=FAST)
        with pytest.raises(ModelError):
            ck_uncertainty_product(run, gamma=0.2)


class TestExpandingHamiltonian:
    @pytest.mark.parametrize("eta,eta_dot", [(1.0, 0.0), (0.0, 0.7)])
    def test_constant_and_equal_to_initial_energy(self, eta, eta_dot, make_model, make_state):
        gamma = 0.5
        model = make_model(ModelFamily.EXPANDING, gamma=gamma)
        run = integrate(model, make_state(1j + gamma / 2, eta, eta_dot), 10.0, 1e-2, settings=FAST)
        energy0 = 0.5 * (eta_dot ** 2 + eta ** 2)
        values = [expanding_hamiltonian(model, s.classical, s.t) for s in run.states]
        assert values[0] == pytest.approx(energy0, rel=1e-14)
        assert max(abs(v - energy0) for v in values) < 1e-8


class TestDrift:
    def test_relative(self):
        assert invariant_drift(np.array([2.0, 2.002, 1.999])) == pytest.approx(1e-3)

    def test_zero_invariant_uses_floor(self):
        assert invariant_drift(np.zeros(4)) == 0.0

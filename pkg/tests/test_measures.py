import math

import numpy as np
import pytest

from conftest import partial_transpose_negativity, wootters_concurrence
from massbath import (
    AssumptionViolatedError,
    FrozenDynamicsError,
    GklsCoefficients,
    LambdaSingularError,
    XState,
    build_rate_matrix,
    closed_form_concurrence,
    closed_form_negativity,
    closed_form_state,
    closed_form_trajectory,
    concurrence,
    detect_events,
    eigen_trajectory,
    entanglement,
    lifetime,
    lifetime_by_bisection,
    negativity,
    random_xstate,
    spatial_factor,
    sudden_death_condition,
    to_product_basis,
    vacuum_coefficients,
    FieldBathConfig,
)


def random_ge_coherent_state(rng):
    """Random X state with coh_as = 0 (closed-form measure precondition)."""
    g, a, s, e = rng.dirichlet(np.ones(4))
    magnitude = math.sqrt(g * e) * rng.random()
    phase = np.exp(2j * math.pi * rng.random())
    return XState(g, a, s, e, coh_ge=magnitude * phase)


class TestConcurrence:
    def test_product_state(self):
        assert concurrence(XState.excited()) == 0.0
        assert concurrence(XState.ground()) == 0.0

    def test_maximally_entangled(self):
        value = entanglement(XState.antisymmetric())
        assert value.k1 == pytest.approx(1.0)
        assert value.concurrence == pytest.approx(1.0)
        bell = entanglement(XState.bell_ge())
        assert bell.k2 == pytest.approx(1.0)
        assert bell.concurrence == pytest.approx(1.0)

    def test_separable_mixture(self):
        value = entanglement(XState(0.5, 0.0, 0.0, 0.5))
        assert value.concurrence == 0.0
        assert value.k1 == pytest.approx(-1.0)

    def test_wootters_oracle(self, rng):
        worst = 0.0
        for _ in range(500):
            state = random_xstate(rng)
            worst = max(
                worst,
                abs(concurrence(state) - wootters_concurrence(to_product_basis(state))),
            )
        assert worst < 1e-10


class TestNegativity:
    def test_maximally_entangled(self):
        assert negativity(XState.antisymmetric()) == pytest.approx(1.0)
        assert negativity(XState.bell_ge()) == pytest.approx(1.0)

    def test_partial_transpose_oracle(self, rng):
        worst = 0.0
        for _ in range(500):
            state = random_xstate(rng)
            worst = max(
                worst,
                abs(
                    negativity(state)
                    - partial_transpose_negativity(to_product_basis(state))
                ),
            )
        assert worst < 1e-10

    def test_bounds(self, rng):
        for _ in range(500):
            value = entanglement(random_xstate(rng))
            assert 0.0 <= value.concurrence <= 1.0
            assert 0.0 <= value.negativity <= 1.0

    def test_pure_states_match_concurrence(self, rng):
        for _ in range(300):
            state = random_xstate(rng, pure=True)
            assert abs(concurrence(state) - negativity(state)) < 1e-12


class TestClosedFormMeasures:
    def test_reduces_to_state_terms_at_unit_xi(self, rng):
        for _ in range(50):
            state = random_ge_coherent_state(rng)
            value = entanglement(state)
            k1, k2 = closed_form_concurrence(state, 0.3, 1.0)
            n1, n2 = closed_form_negativity(state, 0.3, 1.0)
            assert k1 == pytest.approx(value.k1, abs=1e-13)
            assert k2 == pytest.approx(value.k2, abs=1e-13)
            assert n1 == pytest.approx(value.n1, abs=1e-13)
            assert n2 == pytest.approx(value.n2, abs=1e-13)

    def test_excited_independent_baths_never_entangles(self):
        for xi in np.linspace(0.01, 1.0, 40):
            k1, k2 = closed_form_concurrence(XState.excited(), 0.0, xi)
            assert k1 == pytest.approx(-2.0 * xi * (1.0 - xi), abs=1e-12)
            assert k2 == pytest.approx(xi * (2.0 * xi - 2.0), abs=1e-12)
            assert max(0.0, k1, k2) == 0.0

    def test_matches_propagate_then_measure(self, rng):
        worst_k = worst_n = 0.0
        for _ in range(400):
            state = random_ge_coherent_state(rng)
            lam = rng.uniform(-0.95, 0.95)
            xi = rng.uniform(0.01, 1.0)
            value = entanglement(closed_form_state(state, lam, xi))
            k1, k2 = closed_form_concurrence(state, lam, xi)
            n1, n2 = closed_form_negativity(state, lam, xi)
            worst_k = max(worst_k, abs(k1 - value.k1), abs(k2 - value.k2))
            worst_n = max(worst_n, abs(n1 - value.n1), abs(n2 - value.n2))
        assert worst_k < 1e-12
        assert worst_n < 1e-12

    def test_pure_initial_measures_agree_at_start(self, rng):
        for _ in range(100):
            state = random_xstate(rng, pure=True)
            if abs(state.coh_as) > 0.0:
                continue  # closed form requires the G-E block
            k1, k2 = closed_form_concurrence(state, 0.2, 1.0)
            n1, n2 = closed_form_negativity(state, 0.2, 1.0)
            conc = max(0.0, k1, k2)
            neg = max(0.0, -2.0 * n1) + max(0.0, -2.0 * n2)
            assert abs(conc - neg) < 1e-12

    def test_requires_vanishing_as_coherence(self):
        state = XState(0.0, 0.5, 0.5, 0.0, coh_as=0.3)
        with pytest.raises(AssumptionViolatedError):
            closed_form_concurrence(state, 0.0, 0.5)

    def test_singular_band_rejected(self):
        with pytest.raises(LambdaSingularError):
            closed_form_negativity(XState.excited(), 1.0 - 1e-9, 0.5)


class TestSuddenDeath:
    def test_examples(self):
        assert sudden_death_condition(e=0.5, g=0.0, a=0.5, s=0.0) is True
        assert sudden_death_condition(e=0.0, g=0.0, a=1.0, s=0.0) is False
        assert sudden_death_condition(e=1.0, g=0.0, a=0.0, s=0.0) is False

    def test_validates_simplex(self):
        with pytest.raises(ValueError):
            sudden_death_condition(0.5, 0.5, 0.5, 0.5)

    def test_predicts_finite_root(self, rng):
        # finite death time (by root-finding) occurs iff the condition holds
        for _ in range(10_000):
            g, a, s, e = rng.dirichlet(np.ones(4))
            expected = sudden_death_condition(e, g, a, s)
            root = lifetime_by_bisection(e, g, a, s, 1.0, 1.0)
            assert (0.0 < root < math.inf) == expected


class TestLifetime:
    def test_reference_value(self):
        value = lifetime(e=0.5, g=0.0, a=0.5, s=0.0, gray=1.0, g0=1.0)
        assert value == pytest.approx(0.23206672112596227, rel=1e-12)

    def test_matches_bisection(self, rng):
        count = 0
        worst = 0.0
        while count < 200:
            g, a, s, e = rng.dirichlet(np.ones(4))
            if not sudden_death_condition(e, g, a, s):
                continue
            count += 1
            formula = lifetime(e, g, a, s, 1.0, 1.0)
            oracle = lifetime_by_bisection(e, g, a, s, 1.0, 1.0)
            worst = max(worst, abs(formula - oracle) / oracle)
        assert worst < 1e-10

    def test_gray_factor_rescales_exactly(self):
        base = lifetime(0.5, 0.0, 0.5, 0.0, gray=1.0, g0=1.0)
        assert lifetime(0.5, 0.0, 0.5, 0.0, gray=0.5, g0=1.0) == 2.0 * base

    def test_asymptotic_decay_is_infinite(self):
        assert lifetime(e=0.0, g=0.0, a=1.0, s=0.0, gray=1.0, g0=1.0) == math.inf

    def test_never_entangled_is_zero(self):
        assert lifetime(e=1.0, g=0.0, a=0.0, s=0.0, gray=1.0, g0=1.0) == 0.0
        assert lifetime(e=1.0, g=0.0, a=0.0, s=0.0, gray=0.0, g0=1.0) == 0.0

    def test_frozen_entangled_raises(self):
        with pytest.raises(FrozenDynamicsError):
            lifetime(e=0.5, g=0.0, a=0.5, s=0.0, gray=0.0, g0=1.0)


class TestDetectEvents:
    def test_frozen_dynamics_has_no_events(self):
        rates = build_rate_matrix(
            vacuum_coefficients(FieldBathConfig.from_ratios(1.5, 1.0))
        )
        bell = XState.bell_ge()
        traj = eigen_trajectory(bell, rates, np.linspace(0.0, 100.0, 50))
        events = detect_events(traj, "concurrence")
        assert events.birth_times == ()
        assert events.death_times == ()
        assert events.final_value == pytest.approx(1.0)

    def test_single_death_matches_lifetime(self):
        initial = XState.diagonal(e=0.5, g=0.0, a=0.5, s=0.0)
        rates = build_rate_matrix(GklsCoefficients(0.25, 0.25, 0.0, 0.0))
        traj = eigen_trajectory(initial, rates, np.linspace(0.0, 5.0, 120))
        events = detect_events(traj, "concurrence")
        assert len(events.death_times) == 1
        assert events.birth_times == ()
        assert events.death_times[0] == pytest.approx(
            lifetime(0.5, 0.0, 0.5, 0.0, 1.0, 1.0), abs=1e-6
        )

    def test_birth_at_subwavelength_separation(self):
        lam = spatial_factor(1.0, 0.5, 1.0)
        traj = closed_form_trajectory(
            XState.excited(), lam, 1.0, 1.0, np.linspace(0.0, 15.0, 400)
        )
        events = detect_events(traj, "concurrence")
        assert len(events.birth_times) >= 1
        assert events.final_value > 0.0

    def test_threshold_crossings(self):
        initial = XState.diagonal(e=0.5, g=0.0, a=0.5, s=0.0)
        rates = build_rate_matrix(GklsCoefficients(0.25, 0.25, 0.0, 0.0))
        traj = eigen_trajectory(initial, rates, np.linspace(0.0, 5.0, 200))
        events = detect_events(traj, "concurrence", threshold=0.05)
        assert len(events.death_times) == 1
        crossing = traj.evaluate(events.death_times[0])
        assert concurrence(crossing) == pytest.approx(0.05, abs=1e-6)

    def test_rejects_negative_threshold(self):
        rates = build_rate_matrix(GklsCoefficients(0.25, 0.25, 0.0, 0.0))
        traj = eigen_trajectory(XState.excited(), rates, np.linspace(0.0, 1.0, 5))
        with pytest.raises(ValueError):
            detect_events(traj, "concurrence", threshold=-0.1)
        with pytest.raises(ValueError):
            detect_events(traj, "fidelity")

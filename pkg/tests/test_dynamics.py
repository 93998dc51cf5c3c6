"""
Tests for the nonlinear term, the integrating-factor stepper and run helpers.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqg.dynamics import (
    BlowUpError,
    GalerkinLevel,
    InitialData,
    Stepper,
    StepperConfig,
    TrajectoryState,
    UnsplittableError,
    evolve,
    galerkin_rhs,
    nonlinear_term,
    split_initial_data,
    step,
    trajectory,
    two_trajectory_gap,
)
from aqg.spectral import (
    DissipationParams,
    GridSpec,
    SpectralField,
    dissipation_symbol,
    forward_transform,
    friedrichs_project,
    inverse_transform,
    random_bandlimited,
    sobolev_norm,
    two_thirds_mask,
)

from oracles import advection_by_convolution

P = DissipationParams(0.3, 0.7)
seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def grad_norm(f):
    return sobolev_norm(f, 1.0, homogeneous=True)


class TestNonlinearTerm:
    def test_matches_convolution_oracle(self):
        g = GridSpec(16, 16)
        th = random_bandlimited(g, 11)
        keep = two_thirds_mask(g)
        ref = advection_by_convolution(th, keep)
        got = nonlinear_term(th)
        expected = np.zeros(g.shape, complex)
        for (k1, k2), v in ref.items():
            expected[k1 % g.n1, k2 % g.n2] = v
        assert np.max(np.abs(got.coeffs - expected)) < 1e-14

    @given(seed=seeds)
    @settings(max_examples=20, deadline=None)
    def test_skew_symmetry(self, seed):
        th = random_bandlimited(GridSpec(32, 32), seed)
        val = abs(nonlinear_term(th).inner(th))
        assert val / (sobolev_norm(th) * grad_norm(th)) < 1e-13

    def test_flux_form_agrees(self):
        g = GridSpec(32, 32)
        st_ = Stepper(g, P, StepperConfig(dt=1e-3))
        th = st_.half(random_bandlimited(g, 2))
        a, b = st_.advection(th), st_.flux_divergence(th)
        assert np.max(np.abs(a - b)) < 1e-13 * np.max(np.abs(a))

    def test_shear_mode_is_steady(self):
        """A function of x1 alone advects itself by a velocity along x2: no self-interaction."""
        g = GridSpec(16, 16)
        x1, x2 = g.coordinates()
        th = forward_transform(np.cos(x1) + 0.3 * np.sin(2 * x1) + 0 * x2, g)
        assert np.max(np.abs(nonlinear_term(th).coeffs)) < 1e-15

    def test_undealiased_matches_on_narrow_band(self):
        g = GridSpec(32, 32)
        th = random_bandlimited(g, 3, kmax=4)
        np.testing.assert_allclose(nonlinear_term(th, dealias=False).coeffs,
                                   nonlinear_term(th).coeffs, atol=1e-14)

    def test_output_is_real_field(self):
        out = nonlinear_term(random_bandlimited(GridSpec(32, 16), 5))
        assert out.hermitian_defect() < 1e-15
        inverse_transform(out)


class TestStepper:
    def test_linear_flow_is_exact_semigroup(self):
        g = GridSpec(32, 32)
        th = random_bandlimited(g, 1)
        cfg = StepperConfig(dt=0.01, linear_only=True)
        out = evolve(th, P, cfg, 0.5).theta
        expected = np.exp(-0.5 * dissipation_symbol(g.xi1, g.xi2, P)) * th.coeffs
        assert np.max(np.abs(out.coeffs - expected)) < 1e-15

    def test_rhs_of_linear_part(self):
        g = GridSpec(16, 16)
        x1, x2 = g.coordinates()
        th = forward_transform(np.cos(x1 + x2), g)
        rhs = galerkin_rhs(TrajectoryState(0.0, th), DissipationParams(0.5, 0.5))
        # single oblique mode: A = 2 and the self-advection of a plane wave vanishes
        np.testing.assert_allclose(rhs.coeffs, -2.0 * th.coeffs, atol=1e-15)

    def test_deterministic(self):
        th = random_bandlimited(GridSpec(32, 32), 8, amplitude=2.0)
        cfg = StepperConfig(dt=2e-3)
        a = evolve(th, P, cfg, 0.1).theta.coeffs
        b = evolve(th, P, cfg, 0.1).theta.coeffs
        np.testing.assert_array_equal(a, b)

    def test_step_matches_evolve(self):
        th = random_bandlimited(GridSpec(16, 16), 4)
        cfg = StepperConfig(dt=1e-2)
        s = TrajectoryState(0.0, th)
        for _ in range(3):
            s = step(s, P, cfg)
        assert s.t == pytest.approx(0.03)
        np.testing.assert_array_equal(s.theta.coeffs, evolve(th, P, cfg, 0.03).theta.coeffs)

    def test_galerkin_level_preserved_exactly(self):
        g = GridSpec(32, 32)
        th = friedrichs_project(random_bandlimited(g, 6, amplitude=3.0), 5.0)
        lvl = GalerkinLevel(5.0)
        for state in trajectory(th, P, StepperConfig(dt=1e-2), 0.5, 10, lvl):
            assert np.all(state.theta.coeffs[g.xi_abs >= 5.0] == 0)

    def test_galerkin_radius_beyond_grid(self):
        with pytest.raises(ValueError, match="galerkin"):
            GalerkinLevel(1e3).check(GridSpec(16, 16))

    def test_sampling_times(self):
        th = random_bandlimited(GridSpec(16, 16), 0)
        ts = [s.t for s in trajectory(th, P, StepperConfig(dt=0.01), 0.1, sample_every=5)]
        assert ts == pytest.approx([0.0, 0.05, 0.1])

    def test_nonfinite_state_raises(self):
        g = GridSpec(16, 16)
        c = random_bandlimited(g, 0).coeffs.copy()
        c[1, 1] = c[-1, -1] = np.nan
        with pytest.raises(BlowUpError):
            evolve(SpectralField(g, c), P, StepperConfig(dt=0.01), 0.02)

    def test_ceiling_raises_with_state(self):
        th = random_bandlimited(GridSpec(16, 16), 0)
        with pytest.raises(BlowUpError) as info:
            list(trajectory(th, P, StepperConfig(dt=0.01), 0.1, ceiling_factor=0.5))
        assert info.value.state is not None
        assert info.value.t > 0

    @pytest.mark.parametrize("kw", [dict(dt=0.0), dict(dt=1e-3, scheme="euler"), dict(dt=1e-3, dealias="half")])
    def test_config_validation(self, kw):
        with pytest.raises(ValueError):
            StepperConfig(**kw)

    def test_short_horizon_rejected(self):
        with pytest.raises(ValueError):
            trajectory(random_bandlimited(GridSpec(16, 16), 0), P, StepperConfig(dt=0.1), 0.01)


class TestInitialData:
    def test_plane_wave(self):
        g = GridSpec(16, 16)
        x1, x2 = g.coordinates()
        th = InitialData("plane-wave", amplitude=2.0, k1=1, k2=2).build(g)
        np.testing.assert_allclose(inverse_transform(th), 2 * np.cos(x1 + 2 * x2), atol=1e-14)

    def test_gaussian_matches_periodised_sum(self):
        g = GridSpec(64, 64)
        w = 0.4
        x1, x2 = g.coordinates()
        ref = np.zeros(g.shape)
        for m1 in range(-2, 3):
            for m2 in range(-2, 3):
                r2 = (x1 - np.pi + 2 * np.pi * m1) ** 2 + (x2 - np.pi + 2 * np.pi * m2) ** 2
                ref += np.exp(-r2 / (2 * w ** 2))
        ref -= ref.mean()
        th = InitialData("gaussian-bump", width=w).build(g)
        np.testing.assert_allclose(inverse_transform(th), ref, atol=1e-10)

    def test_hdot_rescaling(self):
        g = GridSpec(32, 32)
        th = InitialData("random-bandlimited", seed=3, hdot_norm=0.01).build(g, s=1.4)
        assert sobolev_norm(th, 1.4, homogeneous=True) == pytest.approx(0.01, rel=1e-14)
        with pytest.raises(ValueError):
            InitialData("random-bandlimited", hdot_norm=0.01).build(g)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            InitialData("vortex")


class TestSplit:
    @given(seed=seeds, eps=st.floats(1e-6, 1.0))
    @settings(max_examples=20, deadline=None)
    def test_tail_below_eps_and_radius_minimal(self, seed, eps):
        g = GridSpec(32, 32)
        th = random_bandlimited(g, seed, slope=2.0)
        radius, low, high = split_initial_data(th, eps, 1.4)
        assert sobolev_norm(high, 1.4, homogeneous=True) < eps
        np.testing.assert_array_equal((low + high).coeffs, th.coeffs)
        smaller = g.xi_abs[(g.xi_abs > 0) & (g.xi_abs < radius)]
        if smaller.size:
            r = smaller.max()
            tail = th - friedrichs_project(th, r)
            assert sobolev_norm(tail, 1.4, homogeneous=True) >= eps * (1 - 1e-12)

    def test_bad_eps(self):
        th = random_bandlimited(GridSpec(16, 16), 0)
        with pytest.raises(ValueError):
            split_initial_data(th, 0.0, 1.0)

    def test_unsplittable_error_is_value_error(self):
        assert issubclass(UnsplittableError, ValueError)


class TestTwinRuns:
    def test_identical_data_zero_gap(self):
        th = random_bandlimited(GridSpec(16, 16), 2, amplitude=0.1)
        gs = two_trajectory_gap(th, th, P, StepperConfig(dt=0.01), 0.2, 5)
        assert np.all(gs.gap == 0.0)
        assert gs.fitted_rate() == 0.0

    def test_envelope_contains_gap(self):
        g = GridSpec(16, 16)
        th = random_bandlimited(g, 2, amplitude=0.5)
        dth = random_bandlimited(g, 3) * 1e-6
        gs = two_trajectory_gap(th + dth, th, P, StepperConfig(dt=0.01), 0.5, 5)
        c = gs.fitted_rate()
        assert np.all(gs.gap <= gs.envelope(c) * (1 + 1e-12))
        assert np.all(np.diff(gs.forcing) > 0)

"""
Tests for the inequality lab: exact products, explicit-constant checks and ratio reports.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqg.inequalities import (
    AliasingError,
    PreconditionError,
    check_anisotropic_bound,
    check_commutator,
    check_embedding,
    check_interpolation,
    check_product_estimate,
    check_riesz_bound,
    check_symbol_bound,
    exact_product,
    lattice_sweep,
    lp_norm,
    sample_fields,
    symbol_constant,
)
from aqg.spectral import (
    DissipationParams,
    GridSpec,
    SpectralField,
    forward_transform,
    random_bandlimited,
    resample,
)

from oracles import product_by_convolution

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
G = GridSpec(24, 24)


def cosine(g, k1=1, k2=0):
    x1, x2 = g.coordinates()
    return forward_transform(np.cos(k1 * x1 + k2 * x2), g).without_mean()


class TestExactProduct:
    def test_matches_convolution(self):
        f, h = random_bandlimited(G, 1), random_bandlimited(G, 2, kmax=5)
        got = exact_product(f, h)
        ref = product_by_convolution(f, h)
        big = got.grid
        expected = np.zeros(big.shape, complex)
        for (k1, k2), v in ref.items():
            expected[k1 % big.n1, k2 % big.n2] += v
        assert np.max(np.abs(got.coeffs - expected)) < 1e-15

    def test_padded_grid_size(self):
        assert exact_product(random_bandlimited(G, 0), random_bandlimited(G, 0)).grid.shape == (36, 36)

    def test_rejects_out_of_band(self):
        f = random_bandlimited(G, 0, kmax=11)
        with pytest.raises(AliasingError):
            exact_product(f, f)


class TestSymbolBound:
    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    @pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
    def test_no_violations_on_lattice(self, alpha, beta):
        p = DissipationParams(alpha, beta)
        rep = check_symbol_bound(p, *lattice_sweep(16))
        assert not rep.violated
        assert rep.extra["empirical_constant"] <= symbol_constant(p)

    def test_constant(self):
        assert symbol_constant(DissipationParams(0.25, 0.5)) == pytest.approx(4.0)

    @given(x1=st.floats(-1e3, 1e3), x2=st.floats(-1e3, 1e3), alpha=st.floats(0.05, 0.95),
           beta=st.floats(0.05, 0.95))
    def test_holds_off_lattice(self, x1, x2, alpha, beta):
        assert not check_symbol_bound(DissipationParams(alpha, beta), [x1], [x2]).violated

    def test_origin_counts_as_equality(self):
        rep = check_symbol_bound(DissipationParams(0.5, 0.5), [0.0], [0.0])
        assert rep.max_ratio == 0.0


class TestAnisotropicBound:
    @given(seed=seeds)
    @settings(max_examples=30, deadline=None)
    def test_constant_one(self, seed):
        rep = check_anisotropic_bound(sample_fields(G, 3, seed), DissipationParams(0.3, 0.7), 1.4, 0.0)
        assert not rep.violated

    def test_preconditions(self):
        f = random_bandlimited(G, 0)
        with pytest.raises(PreconditionError):
            check_anisotropic_bound(f, DissipationParams(0.7, 0.3), 1.4, 0.0)
        with pytest.raises(PreconditionError):
            check_anisotropic_bound(f, DissipationParams(0.3, 0.7), 1.0, 1.3)


class TestInterpolation:
    def test_single_shell_equality(self):
        g = GridSpec(16, 16)
        c = np.zeros(g.shape, complex)
        # every mode on the circle |k| = 5
        c[3, 4], c[-3, -4] = 1 + 2j, 1 - 2j
        c[-3, 4] = c[3, -4] = 0.5
        c[5, 0] = c[-5, 0] = 0.25
        f = SpectralField(g, c)
        rep = check_interpolation(f, 0.3, 2.1, 0.4)
        assert rep.extra["equalities"] == 1

    @given(seed=seeds, s1=st.floats(-1, 3), s2=st.floats(-1, 3), t=st.floats(0, 1))
    @settings(max_examples=40, deadline=None)
    def test_inequality(self, seed, s1, s2, t):
        rep = check_interpolation(random_bandlimited(G, seed), s1, s2, t)
        assert not rep.violated

    def test_t_range(self):
        with pytest.raises(PreconditionError):
            check_interpolation(random_bandlimited(G, 0), 0.0, 1.0, 1.5)


class TestImplicitConstants:
    def test_product_single_mode_closed_form(self):
        """cos x1 squared: ||cos^2||_{Hdot^0} / ||cos||^2 = sqrt(2)/(4 pi)."""
        f = cosine(G)
        rep = check_product_estimate((f, f), 0.4, 0.6)
        assert rep.max_ratio == pytest.approx(np.sqrt(2) / (4 * np.pi), rel=1e-13)
        assert rep.verdict == "bounded"

    def test_embedding_cos4_quadrature(self):
        rep = check_embedding(cosine(G), 0.5)
        assert rep.max_ratio == pytest.approx((1.5 * np.pi ** 2) ** 0.25 / (np.pi * np.sqrt(2)), rel=1e-13)
        assert rep.parameters["p"] == 4.0

    def test_riesz_isometry_in_l2(self):
        rep = check_riesz_bound(sample_fields(G, 10), 2)
        np.testing.assert_allclose(rep.ratios, 1.0, rtol=1e-13)
        assert not rep.violated

    def test_riesz_l4_bounded(self):
        rep = check_riesz_bound(sample_fields(G, 10), 4)
        assert rep.verdict == "bounded" and rep.constant is None

    def test_commutator_finite(self):
        fs = sample_fields(G, 6)
        rep = check_commutator(list(zip(fs, fs[::-1])), 1.4, 0.3)
        assert rep.verdict == "bounded" and np.all(np.isfinite(rep.ratios))

    def test_commutator_constant_function_commutes(self):
        g = random_bandlimited(G, 4)
        zero = SpectralField.zeros(G)
        assert check_commutator((zero, g), 1.4, 0.3).max_ratio == 0.0

    @pytest.mark.parametrize("fn,args", [
        (check_commutator, (1.0, 0.3)),
        (check_product_estimate, (1.0, 0.5)),
        (check_embedding, (1.0,)),
        (check_riesz_bound, (3,)),
    ])
    def test_preconditions(self, fn, args):
        f = random_bandlimited(G, 0)
        data = (f, f) if fn in (check_commutator, check_product_estimate) else f
        with pytest.raises(PreconditionError):
            fn(data, *args)

    def test_embedding_needs_mean_zero(self):
        c = random_bandlimited(G, 0).coeffs.copy()
        c[0, 0] = 1.0
        with pytest.raises(PreconditionError):
            check_embedding(SpectralField(G, c), 0.5)


class TestHelpers:
    def test_lp_norm_constant(self):
        g = GridSpec(8, 8, l1=2.0, l2=3.0)
        assert lp_norm(np.full(g.shape, 2.0), g, 3) == pytest.approx(2.0 * 6.0 ** (1 / 3))

    def test_lp_norm_vector(self):
        g = GridSpec(8, 8)
        v = np.stack([np.full(g.shape, 3.0), np.full(g.shape, 4.0)])
        assert lp_norm(v, g, 2) == pytest.approx(5.0 * 2 * np.pi)

    def test_sample_fields_reproducible(self):
        a, b = sample_fields(G, 4, seed=3), sample_fields(G, 4, seed=3)
        for f, h in zip(a, b):
            np.testing.assert_array_equal(f.coeffs, h.coeffs)
            exact_product(f, h)

    def test_report_dict(self):
        d = check_interpolation(sample_fields(G, 5), 0.0, 2.0, 0.5).to_dict()
        assert d["lemma"] == "interpolation" and d["samples"] == 5
        assert set(d["quantiles"]) == {"p50", "p95", "max"}
        assert "equalities" in d


class TestRefinement:
    """Band-limited inputs make every ratio independent of the grid they live on."""

    @pytest.mark.parametrize("check,args,pairs", [
        (check_commutator, (1.4, 0.3), True),
        (check_product_estimate, (0.3, 0.7), True),
        (check_anisotropic_bound, (DissipationParams(0.3, 0.7), 1.4, 0.0), False),
        (check_interpolation, (0.0, 2.0, 0.4), False),
    ])
    def test_ratios_stable_under_refinement(self, check, args, pairs):
        fs = sample_fields(G, 6, seed=5)
        fine = GridSpec(48, 48)
        coarse_data = list(zip(fs, fs[::-1])) if pairs else fs
        fine_fs = [resample(f, fine) for f in fs]
        fine_data = list(zip(fine_fs, fine_fs[::-1])) if pairs else fine_fs
        a = check(coarse_data, *args).ratios
        b = check(fine_data, *args).ratios
        np.testing.assert_allclose(a, b, rtol=1e-12)

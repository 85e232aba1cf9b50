"""Catalog tests: the monotone functions, their filters and coefficients.

Oracles are the direct textbook formulas evaluated with math/mpmath,
independent of the package's stable evaluation paths.
"""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gibbsqfi import families as fam

GRID = np.concatenate(
    [np.logspace(-3, 3, 41), [0.5, 0.9, 0.999, 1.0, 1.001, 2.0, math.e]]
)


def f_oracle(label, x):
    """Direct closed-form evaluation, valid away from x = 1."""
    if label == "har":
        return 2 * x / (1 + x)
    if label == "bures":
        return (1 + x) / 2
    if label == "bkm":
        return (x - 1) / math.log(x)
    if label == "mc":
        return ((x - 1) / math.log(x)) ** 2 * 2 / (1 + x)
    if label == "geometric":
        return math.sqrt(x)
    raise KeyError(label)


def wyd_oracle(alpha, x):
    return alpha * (1 - alpha) * (x - 1) ** 2 / ((x ** alpha - 1) * (x ** (1 - alpha) - 1))


def pdiff_oracle(p, x):
    return (p - 1) / p * (x ** p - 1) / (x ** (p - 1) - 1)


NAMED = [fam.HAR, fam.BURES, fam.BKM, fam.MC, fam.GEOMETRIC]
PARAMETRIC = [fam.wyd(0.3), fam.wyd(0.5), fam.power_difference(1.5), fam.power_difference(-0.4)]
ALL_SINGLE = NAMED + PARAMETRIC


class TestEvalF:
    def test_named_against_direct_formulas(self):
        for family in NAMED:
            for x in GRID:
                if abs(x - 1.0) < 1e-6:
                    continue
                assert fam.eval_f(family, x) == pytest.approx(
                    f_oracle(family.kind, x), rel=1e-13
                )

    def test_parametric_against_direct_formulas(self):
        for x in GRID:
            if abs(x - 1.0) < 1e-6:
                continue
            assert fam.eval_f(fam.wyd(0.3), x) == pytest.approx(wyd_oracle(0.3, x), rel=1e-12)
            assert fam.eval_f(fam.power_difference(1.5), x) == pytest.approx(
                pdiff_oracle(1.5, x), rel=1e-12
            )

    def test_normalization_exact(self):
        for family in ALL_SINGLE:
            assert fam.eval_f(family, 1.0) == 1.0

    def test_bures_at_three(self):
        assert fam.eval_f(fam.BURES, 3.0) == pytest.approx(2.0, rel=1e-15)

    def test_mc_at_e(self):
        # (e-1)^2 * 2 / (1+e), frozen from a 40-digit evaluation
        assert fam.eval_f(fam.MC, math.e) == pytest.approx(1.5880950278780514, rel=1e-13)

    def test_removable_singularity_stability(self):
        # mpmath limits at x = 1 +/- 1e-9
        for family in [fam.BKM, fam.MC, fam.wyd(0.3), fam.power_difference(1.5)]:
            for eps in (1e-9, -1e-9):
                x = 1.0 + eps
                with mpmath.workdps(40):
                    if family.kind == "bkm":
                        ref = (mpmath.mpf(x) - 1) / mpmath.log(x)
                    elif family.kind == "mc":
                        ref = ((mpmath.mpf(x) - 1) / mpmath.log(x)) ** 2 * 2 / (1 + mpmath.mpf(x))
                    elif family.kind == "wyd":
                        a = mpmath.mpf(family.param)
                        xx = mpmath.mpf(x)
                        ref = a * (1 - a) * (xx - 1) ** 2 / ((xx ** a - 1) * (xx ** (1 - a) - 1))
                    else:
                        p = mpmath.mpf(family.param)
                        xx = mpmath.mpf(x)
                        ref = (p - 1) / p * (xx ** p - 1) / (xx ** (p - 1) - 1)
                assert fam.eval_f(family, x) == pytest.approx(float(ref), rel=1e-12)

    def test_domain_error(self):
        for bad in (0.0, -1.0):
            with pytest.raises(ValueError):
                fam.eval_f(fam.BKM, bad)

    def test_power_difference_special_points(self):
        for x in GRID:
            assert fam.eval_f(fam.power_difference(2.0), x) == pytest.approx(
                fam.eval_f(fam.BURES, x), rel=1e-12
            )
            assert fam.eval_f(fam.power_difference(-1.0), x) == pytest.approx(
                fam.eval_f(fam.HAR, x), rel=1e-12
            )
            assert fam.eval_f(fam.power_difference(0.5), x) == pytest.approx(
                fam.eval_f(fam.GEOMETRIC, x), rel=1e-12
            )
            assert fam.eval_f(fam.power_difference(1.0), x) == pytest.approx(
                fam.eval_f(fam.BKM, x), rel=1e-12
            )

    def test_extreme_wyd_approaches_bkm(self):
        # g_WYD(a) -> 1 as a -> 0 or 1, so f approaches the BKM function
        xs = np.logspace(-1, 1, 11)
        for alpha in (1e-4, 1.0 - 1e-4):
            ratio = fam.eval_f(fam.wyd(alpha), xs) / fam.eval_f(fam.BKM, xs)
            assert np.allclose(ratio, 1.0, rtol=2e-4)
        # and the symmetry alpha <-> 1 - alpha is exact
        assert np.allclose(
            fam.eval_f(fam.wyd(1e-4), xs), fam.eval_f(fam.wyd(1.0 - 1e-4), xs), rtol=1e-13
        )

    def test_pdiff_near_integer_exponents(self):
        xs = np.logspace(-1, 1, 11)
        near_one = fam.power_difference(1.0 - 1e-12)
        assert np.allclose(fam.eval_f(near_one, xs), fam.eval_f(fam.BKM, xs), rtol=1e-9)

    def test_power_difference_between_geometric_and_bures(self):
        xs = np.logspace(-2, 2, 25)
        for p in (0.5, 0.9, 1.3, 1.7, 2.0):
            fp = fam.eval_f(fam.power_difference(p), xs)
            assert np.all(fp >= fam.eval_f(fam.GEOMETRIC, xs) - 1e-12 * np.abs(fp))
            assert np.all(fp <= fam.eval_f(fam.BURES, xs) + 1e-12 * np.abs(fp))

    @settings(max_examples=200, deadline=None)
    @given(
        x=st.floats(min_value=1e-3, max_value=1e3),
        idx=st.integers(min_value=0, max_value=len(ALL_SINGLE) - 1),
    )
    def test_symmetry_property(self, x, idx):
        family = ALL_SINGLE[idx]
        f_x = fam.eval_f(family, x)
        assert fam.eval_f(family, 1.0 / x) == pytest.approx(f_x / x, rel=1e-11)


class TestFAtZero:
    def test_named_limits(self):
        assert fam.eval_f_at_zero(fam.BURES) == 0.5
        assert fam.eval_f_at_zero(fam.BKM) == 0.0
        assert fam.eval_f_at_zero(fam.HAR) == 0.0
        assert fam.eval_f_at_zero(fam.MC) == 0.0
        assert fam.eval_f_at_zero(fam.GEOMETRIC) == 0.0

    def test_wyd_limit_against_small_argument(self):
        # alpha(1 - alpha); f(1e-8) = 0.2500500025 at alpha = 1/2
        assert fam.eval_f_at_zero(fam.wyd(0.5)) == pytest.approx(0.25, abs=0)
        assert fam.eval_f(fam.wyd(0.5), 1e-8) == pytest.approx(0.2500500025, rel=1e-9)
        for alpha in (0.1, 0.3, 0.7):
            limit = fam.eval_f_at_zero(fam.wyd(alpha))
            assert limit == pytest.approx(alpha * (1 - alpha), rel=1e-15)
            # convergence to the limit goes as x^min(a, 1-a)
            assert fam.eval_f(fam.wyd(alpha), 1e-60) == pytest.approx(limit, rel=1e-3)

    def test_power_difference_limits(self):
        assert fam.eval_f_at_zero(fam.power_difference(2.0)) == pytest.approx(0.5)
        assert fam.eval_f_at_zero(fam.power_difference(1.5)) == pytest.approx(1.0 / 3.0)
        assert fam.eval_f_at_zero(fam.power_difference(0.7)) == 0.0
        assert fam.eval_f_at_zero(fam.power_difference(-1.0)) == 0.0


class TestEvalC:
    def test_bures_harmonic_mean(self):
        assert fam.eval_c(fam.BURES, 0.3, 0.7) == pytest.approx(2.0, rel=1e-14)

    def test_equal_arguments(self):
        assert fam.eval_c(fam.BKM, 0.5, 0.5) == pytest.approx(2.0, rel=1e-14)
        for family in ALL_SINGLE:
            assert fam.eval_c(family, 0.25, 0.25) == pytest.approx(4.0, rel=1e-13)

    def test_bkm_on_qubit_weights(self):
        # ln(rho1/rho2)/(rho1 - rho2) for the splitting-1 Gibbs weights
        assert fam.eval_c(fam.BKM, 0.7310585786300049, 0.2689414213699951) == pytest.approx(
            2.163953413738653, rel=1e-12
        )

    def test_domain_error(self):
        with pytest.raises(ValueError):
            fam.eval_c(fam.BKM, -0.1, 0.5)

    @settings(max_examples=200, deadline=None)
    @given(
        x=st.floats(min_value=1e-6, max_value=1e6),
        y=st.floats(min_value=1e-6, max_value=1e6),
        t=st.floats(min_value=1e-3, max_value=1e3),
        idx=st.integers(min_value=0, max_value=len(ALL_SINGLE) - 1),
    )
    def test_symmetry_and_homogeneity(self, x, y, t, idx):
        family = ALL_SINGLE[idx]
        c = fam.eval_c(family, x, y)
        assert fam.eval_c(family, y, x) == pytest.approx(c, rel=1e-11)
        assert fam.eval_c(family, t * x, t * y) == pytest.approx(c / t, rel=1e-11)


def g_oracle(label, x):
    """Hyperbolic closed forms quoted for the named filters."""
    if x == 0:
        return 1.0
    if label == "har":
        return math.sinh(2 * x) / (2 * x)
    if label == "bures":
        return math.tanh(x) / x
    if label == "bkm":
        return 1.0
    if label == "mc":
        return x / math.tanh(x)
    if label == "geometric":
        return math.sinh(x) / x
    raise KeyError(label)


class TestEvalG:
    def test_named_closed_forms(self):
        xs = np.linspace(-6.0, 6.0, 41)
        for family in NAMED:
            for x in xs:
                assert fam.eval_g(family, x) == pytest.approx(
                    g_oracle(family.kind, x), rel=1e-13
                )

    def test_bkm_is_one(self):
        assert fam.eval_g(fam.BKM, 0.7) == 1.0

    def test_removable_zero(self):
        assert fam.eval_g(fam.MC, 0.0) == 1.0
        for family in ALL_SINGLE:
            assert fam.eval_g(family, 0.0) == 1.0

    def test_bures_value(self):
        assert fam.eval_g(fam.BURES, 0.5) == pytest.approx(math.tanh(0.5) / 0.5, rel=1e-14)

    def test_wy_equals_half_angle_form(self):
        xs = np.linspace(-4, 4, 17)
        for x in xs:
            if x == 0:
                continue
            assert fam.eval_g(fam.WY, x) == pytest.approx(
                math.tanh(x / 2) / (x / 2), rel=1e-13
            )

    def test_defining_identity_with_f(self):
        # g_f(x) = (e^{2x} - 1)/(2x f(e^{2x})) ties the filters back to f
        xs = [-5.0, -1.3, -0.2, 0.2, 0.8, 2.5, 5.0]
        for family in ALL_SINGLE:
            for x in xs:
                direct = math.expm1(2 * x) / (2 * x * fam.eval_f(family, math.exp(2 * x)))
                assert fam.eval_g(family, x) == pytest.approx(direct, rel=1e-11)

    def test_even_on_wide_range(self):
        xs = np.linspace(1e-8, 20.0, 101)
        for family in ALL_SINGLE:
            left = fam.eval_g(family, -xs)
            right = fam.eval_g(family, xs)
            assert np.allclose(left, right, rtol=1e-13, atol=0.0)

    def test_large_argument_no_overflow(self):
        # beyond sinh overflow the log path takes over and stays finite
        val = fam.eval_g(fam.GEOMETRIC, 500.0)
        assert math.isfinite(val) and val > 1e200
        assert fam.eval_g(fam.BURES, 800.0) == pytest.approx(1.0 / 800.0, rel=1e-10)

    def test_ordering_inside_crossover(self):
        # g_B <= g_WY <= 1 <= g_G <= g_MC <= g_Har, with the G <= MC link
        # valid only below the sinh^2 x = x^2 cosh x crossover
        xs = np.linspace(0.01, 2.6, 40)
        gb = fam.eval_g(fam.BURES, xs)
        gwy = fam.eval_g(fam.WY, xs)
        gg = fam.eval_g(fam.GEOMETRIC, xs)
        gmc = fam.eval_g(fam.MC, xs)
        gh = fam.eval_g(fam.HAR, xs)
        assert np.all(gb <= gwy + 1e-15)
        assert np.all(gwy <= 1.0 + 1e-15)
        assert np.all(1.0 <= gg + 1e-15)
        assert np.all(gg <= gmc + 1e-15)
        assert np.all(gmc <= gh + 1e-15)

    def test_global_links_beyond_crossover(self):
        xs = np.linspace(3.0, 12.0, 10)
        assert np.all(fam.eval_g(fam.MC, xs) <= fam.eval_g(fam.HAR, xs))
        assert np.all(fam.eval_g(fam.GEOMETRIC, xs) <= fam.eval_g(fam.HAR, xs))
        # the printed G <= MC ordering genuinely reverses out here
        assert np.all(fam.eval_g(fam.GEOMETRIC, xs) > fam.eval_g(fam.MC, xs))

    def test_mc_bures_product_is_one(self):
        xs = np.linspace(-8, 8, 33)
        prod = fam.eval_g(fam.MC, xs) * fam.eval_g(fam.BURES, xs)
        assert np.allclose(prod, 1.0, rtol=1e-13)

    def test_pair_product_identity(self):
        xs = np.linspace(-4, 4, 21)
        for d in (0.0, 0.3, 0.7, 1.2, 1.5):
            lo, hi = fam.half_pair(d).members
            prod = fam.eval_g(lo, xs) * fam.eval_g(hi, xs)
            assert np.allclose(prod, fam.eval_g(fam.GEOMETRIC, xs) ** 2, rtol=1e-12)


class TestEvalGHat:
    def test_mc_hat_is_exactly_one(self):
        assert fam.eval_g_hat(fam.MC, 1.3) == 1.0
        xs = np.linspace(-10, 10, 21)
        assert np.allclose(fam.eval_g_hat(fam.MC, xs), 1.0, rtol=0, atol=0)

    def test_bkm_hat(self):
        assert fam.eval_g_hat(fam.BKM, 0.5) == pytest.approx(math.tanh(0.5) / 0.5, rel=1e-14)

    def test_value_at_zero(self):
        for family in ALL_SINGLE:
            assert fam.eval_g_hat(family, 0.0) == 1.0

    def test_hat_is_g_times_tanh_factor(self):
        xs = [-3.0, -0.7, 0.4, 1.9]
        for family in ALL_SINGLE:
            for x in xs:
                expected = fam.eval_g(family, x) * math.tanh(x) / x
                assert fam.eval_g_hat(family, x) == pytest.approx(expected, rel=1e-12)


class TestTaylorCoeffs:
    def test_bkm_vanishes(self):
        assert fam.taylor_coeffs(fam.BKM, "g", 3) == [0.0, 0.0, 0.0]

    def test_mc_leading(self):
        assert fam.taylor_coeffs(fam.MC, "g", 1) == pytest.approx([1.0 / 3.0], rel=1e-14)

    def test_bures_leading_two(self):
        assert fam.taylor_coeffs(fam.BURES, "g", 2) == pytest.approx(
            [-1.0 / 3.0, 2.0 / 15.0], rel=1e-14
        )

    def test_against_finite_difference_oracle(self):
        # mpmath numerical differentiation of the defining expression
        for family in [fam.wyd(0.3), fam.power_difference(1.3), fam.HAR]:
            for kind in ("g", "g_hat"):
                coeffs = fam.taylor_coeffs(family, kind, 4)
                with mpmath.workdps(40):
                    def g_mp(x):
                        if x == 0:
                            return mpmath.mpf(1)
                        y = mpmath.exp(2 * x)
                        if family.kind == "wyd":
                            a = mpmath.mpf(family.param)
                            f = a * (1 - a) * (y - 1) ** 2 / ((y ** a - 1) * (y ** (1 - a) - 1))
                        elif family.kind == "pdiff":
                            p = mpmath.mpf(family.param)
                            f = (p - 1) / p * (y ** p - 1) / (y ** (p - 1) - 1)
                        else:
                            f = 2 * y / (y + 1)
                        g = (y - 1) / (2 * x * f)
                        if kind == "g_hat":
                            g = g * mpmath.tanh(x) / x
                        return g

                    series = mpmath.taylor(g_mp, 0, 8)
                ref = [float(series[2 * l]) for l in range(1, 5)]
                assert coeffs == pytest.approx(ref, rel=1e-8, abs=1e-10)

    def test_series_reproduces_g_below_half(self):
        xs = np.linspace(-0.5, 0.5, 21)
        for family in ALL_SINGLE:
            coeffs = fam.taylor_coeffs(family, "g", 12)
            approx = np.ones_like(xs)
            for l, a in enumerate(coeffs, start=1):
                approx += a * xs ** (2 * l)
            assert np.allclose(approx, fam.eval_g(family, xs), rtol=1e-9, atol=1e-12)

    def test_argument_errors(self):
        with pytest.raises(ValueError):
            fam.taylor_coeffs(fam.MC, "g", 0)
        with pytest.raises(ValueError):
            fam.taylor_coeffs(fam.MC, "nope", 2)


class TestSeriesRadius:
    def test_radii(self):
        assert fam.g_series_radius(fam.BURES) == pytest.approx(math.pi / 2)
        assert fam.g_series_radius(fam.WY) == pytest.approx(math.pi)
        assert fam.g_series_radius(fam.MC) == pytest.approx(math.pi)
        assert fam.g_series_radius(fam.BKM) == math.inf
        assert fam.g_series_radius(fam.HAR) == math.inf
        assert fam.g_series_radius(fam.GEOMETRIC) == math.inf
        assert fam.g_series_radius(fam.power_difference(0.75)) == pytest.approx(math.pi / 0.75)
        assert fam.g_series_radius(fam.power_difference(1.0)) == math.inf

    def test_hat_radii(self):
        assert fam.g_hat_series_radius(fam.MC) == math.inf
        assert fam.g_hat_series_radius(fam.HAR) == math.inf
        assert fam.g_hat_series_radius(fam.BKM) == pytest.approx(math.pi / 2)
        assert fam.g_hat_series_radius(fam.BURES) == pytest.approx(math.pi / 2)


class TestVerifyStandard:
    def test_named_families_pass(self):
        grid = np.logspace(-1, 1, 30)
        for family in NAMED:
            assert fam.verify_standard(family, grid).passed

    def test_wyd_on_log_grid(self):
        report = fam.verify_standard(fam.wyd(0.3), np.logspace(-3, 3, 60))
        assert report.passed

    def test_pdiff_two_equals_bures(self):
        grid = np.logspace(-2, 2, 40)
        report = fam.verify_standard(fam.power_difference(2.0), grid)
        assert report.passed
        assert np.allclose(
            fam.eval_f(fam.power_difference(2.0), grid),
            fam.eval_f(fam.BURES, grid),
            rtol=1e-13,
        )

    def test_empty_grid_error(self):
        with pytest.raises(ValueError):
            fam.verify_standard(fam.BKM, [])


class TestIdentifiers:
    def test_round_trip(self):
        for text in ["har", "bures", "bkm", "mc", "geometric", "wyd:0.3", "pdiff:1.5", "pair:0.5"]:
            assert fam.parse_family(text).label == text

    def test_parse_errors(self):
        with pytest.raises(ValueError):
            fam.parse_family("frobnicate")
        with pytest.raises(ValueError):
            fam.parse_family("wyd:nope")
        with pytest.raises(ValueError):
            fam.parse_family("wyd:1.5")

    def test_family_validation(self):
        with pytest.raises(ValueError):
            fam.MonotoneFamily("wyd", 0.0)
        with pytest.raises(ValueError):
            fam.power_difference(2.5)
        with pytest.raises(ValueError):
            fam.half_pair(-0.1)
        with pytest.raises(ValueError):
            fam.MonotoneFamily("har", 0.3)

    def test_pair_members(self):
        lo, hi = fam.half_pair(0.25).members
        assert (lo.kind, lo.param) == ("pdiff", 0.25)
        assert (hi.kind, hi.param) == ("pdiff", 0.75)
        with pytest.raises(ValueError):
            fam.eval_f(fam.half_pair(0.25), 2.0)
        with pytest.raises(ValueError):
            fam.eval_g(fam.half_pair(0.25), 1.0)
        with pytest.raises(ValueError):
            fam.BKM.members

"""Lattice Green function: Bessel route, Fourier oracle, d = 1 closed form."""

import itertools
import math

import numpy as np
import pytest

from latgreen import (
    AccuracyError,
    DivergenceError,
    DomainError,
    GreenParams,
    QuadratureConfig,
    UnsupportedError,
    green_bessel,
    green_d1_closed,
    green_fourier_oracle,
    mass,
)

# pinned during development from the agreement of the Bessel and Fourier
# routes (they match to ~1e-9; the Bessel route alone is stable to ~1e-14)
WATSON_D3 = 1.5163860591519778


def sorted_box_points(d, box):
    pts = set()
    for c in itertools.product(range(-box, box + 1), repeat=d):
        pts.add(tuple(sorted(abs(v) for v in c)))
    return sorted(pts)


class TestGreenParams:
    def test_validation(self):
        with pytest.raises(DomainError):
            GreenParams(0, 1.0, 1.0)
        with pytest.raises(DomainError):
            GreenParams(2, -0.5, 1.0)
        with pytest.raises(DomainError):
            GreenParams(2, 1.0, 0.0)

    def test_divergence_gate(self):
        with pytest.raises(DivergenceError):
            GreenParams(2, 0.0, 1.0).check_finite()
        with pytest.raises(DivergenceError):
            GreenParams(3, 0.0, 1.5).check_finite()
        GreenParams(3, 0.0, 1.0).check_finite()


class TestGreenBessel:
    def test_d1_origin(self):
        gv = green_bessel(GreenParams(1, 1.0, 1.0), [0])
        assert gv.value == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-11)

    def test_d1_offset(self):
        gv = green_bessel(GreenParams(1, 1.0, 1.0), [2])
        want = (2.0 + math.sqrt(3.0)) ** -2 / math.sqrt(3.0)
        assert gv.value == pytest.approx(want, rel=1e-11)

    def test_massless_d3_origin(self):
        gv = green_bessel(GreenParams(3, 0.0, 1.0), [0, 0, 0])
        assert gv.value == pytest.approx(WATSON_D3, rel=1e-9)

    def test_symmetry_is_exact(self):
        p = GreenParams(3, 0.7, 1.5)
        a = green_bessel(p, (2, 1, 0))
        b = green_bessel(p, (0, -1, -2))
        assert a.value == b.value
        assert a.log_value == b.log_value

    def test_log_value_consistency(self):
        gv = green_bessel(GreenParams(2, 0.4, 1.0), [3, 1])
        assert math.exp(gv.log_value) == pytest.approx(gv.value, rel=1e-12)

    def test_error_estimate_within_tolerance(self):
        cfg = QuadratureConfig(rel_tol=1e-9)
        gv = green_bessel(GreenParams(3, 0.5, 1.0), [2, 1, 1], cfg)
        assert gv.est_error <= 1e-9 * gv.value

    def test_deep_decay_stays_in_log_space(self):
        gv = green_bessel(GreenParams(1, 2.0, 1.0), [400])
        m = mass(1, 2.0)
        assert gv.value == 0.0  # below the linear floor
        assert gv.log_value == pytest.approx(
            -m * 400 - math.log(math.sinh(m)), rel=1e-11
        )

    def test_divergent_parameters_raise(self):
        with pytest.raises(DivergenceError):
            green_bessel(GreenParams(2, 0.0, 1.0), [1, 0])

    def test_non_integer_point_rejected(self):
        with pytest.raises(DomainError):
            green_bessel(GreenParams(2, 1.0, 1.0), [0.5, 1.0])

    def test_monotone_decreasing_in_killing(self):
        for x in ([0, 0], [2, 1]):
            vals = [
                green_bessel(GreenParams(2, a, 1.0), x).value
                for a in (0.1, 0.3, 0.8, 2.0)
            ]
            assert np.all(np.diff(vals) < 0.0)


class TestClosedFormD1:
    def test_first_exponent(self):
        gv = green_d1_closed(1.0, 1, 0)
        assert gv.value == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-14)
        m = mass(1, 0.7)
        gv = green_d1_closed(0.7, 1, 5)
        assert gv.value == pytest.approx(
            math.exp(-5.0 * m) / math.sinh(m), rel=1e-13
        )

    def test_second_exponent_origin(self):
        # (1/3)(1 + (2 - sqrt(3))/sqrt(3)) at unit killing
        gv = green_d1_closed(1.0, 2, 0)
        want = (1.0 + (2.0 - math.sqrt(3.0)) / math.sqrt(3.0)) / 3.0
        assert gv.value == pytest.approx(want, rel=1e-14)
        assert gv.value == pytest.approx(0.3849002, rel=1e-7)

    def test_second_exponent_matches_formula(self):
        a, x = 0.6, 7
        m = mass(1, a)
        sh = math.sinh(m)
        want = (
            x
            * math.exp(-m * x)
            / sh**2
            * (1.0 + (1.0 + math.exp(-m) / sh) / x)
        )
        assert green_d1_closed(a, 2, x).value == pytest.approx(want, rel=1e-13)

    @pytest.mark.parametrize("q", [1, 2, 3])
    @pytest.mark.parametrize("a", [0.1, 0.5, 1.0, 2.0])
    def test_matches_bessel_route(self, q, a):
        for x in (0, 1, 3, 11, 20):
            gb = green_bessel(GreenParams(1, a, q), [x])
            gc = green_d1_closed(a, q, x)
            assert gb.value == pytest.approx(gc.value, rel=1e-10)

    def test_rejects_non_integer_exponent(self):
        with pytest.raises(UnsupportedError):
            green_d1_closed(1.0, 1.5, 0)
        with pytest.raises(DomainError):
            green_d1_closed(0.0, 1, 0)


class TestFourierOracle:
    def test_origin_d2(self):
        p = GreenParams(2, 1.0, 1.0)
        gb = green_bessel(p, [0, 0])
        gf = green_fourier_oracle(p, [0, 0])
        assert gf.value == pytest.approx(gb.value, rel=1e-8)

    def test_d1_second_exponent_closed_form(self):
        gf = green_fourier_oracle(GreenParams(1, 0.5, 2.0), [3])
        gc = green_d1_closed(0.5, 2, 3)
        assert gf.value == pytest.approx(gc.value, rel=1e-10)

    def test_non_integer_exponent_d3(self):
        p = GreenParams(3, 0.3, 1.5)
        gb = green_bessel(p, [1, 1, 0])
        gf = green_fourier_oracle(p, [1, 1, 0])
        assert gf.value == pytest.approx(gb.value, rel=1e-8)

    def test_massless_watson(self):
        gf = green_fourier_oracle(GreenParams(3, 0.0, 1.0), [0, 0, 0])
        assert gf.value == pytest.approx(WATSON_D3, rel=1e-6)

    def test_far_point_deep_decay(self):
        # the shifted-contour path: value ~ 1e-11, still 1e-8-accurate
        p = GreenParams(3, 1.0, 0.5)
        gb = green_bessel(p, [5, 5, 5])
        gf = green_fourier_oracle(p, [5, 5, 5])
        assert gf.value == pytest.approx(gb.value, rel=1e-8)

    def test_dimension_cap(self):
        with pytest.raises(UnsupportedError):
            green_fourier_oracle(GreenParams(4, 1.0, 1.0), [0, 0, 0, 0])

    def test_divergent_parameters(self):
        with pytest.raises(DivergenceError):
            green_fourier_oracle(GreenParams(2, 0.0, 1.0), [1, 0])

    def test_coarse_grid_raises(self):
        with pytest.raises((AccuracyError, DomainError)):
            green_fourier_oracle(GreenParams(1, 0.05, 1.0), [5], grid_n=64)


class TestCrossOracle:
    @pytest.mark.parametrize("d", [1, 2])
    def test_low_dimensions(self, d):
        pts = sorted_box_points(d, 5)
        for q in (0.5, 1.0, 2.0):
            for a in (0.0, 0.2, 1.0):
                if a == 0.0 and d <= 2.0 * q:
                    continue
                p = GreenParams(d, a, q)
                for x in pts:
                    gb = green_bessel(p, x)
                    gf = green_fourier_oracle(p, x)
                    assert gf.value == pytest.approx(gb.value, rel=1e-8), (
                        d, q, a, x,
                    )

    def test_three_dimensional_sample(self):
        # the full box-5 grid runs in the acceptance suite; spot-check here
        pts = [(0, 0, 0), (1, 0, 0), (2, 1, 1), (3, 3, 0), (5, 4, 2)]
        for q, a in ((0.5, 0.2), (1.0, 1.0), (2.0, 0.2), (1.0, 0.0)):
            p = GreenParams(3, a, q)
            for x in pts:
                gb = green_bessel(p, x)
                gf = green_fourier_oracle(p, x)
                assert gf.value == pytest.approx(gb.value, rel=1e-8)


class TestStructuralIdentities:
    def test_convolution_identity(self):
        # the second power is the lattice self-convolution of the first
        a = 0.5
        ys = np.arange(-200, 201)
        for x in (0, 2, 7):
            total = sum(
                green_d1_closed(a, 1, abs(y)).value
                * green_d1_closed(a, 1, abs(x - y)).value
                for y in ys
            )
            assert green_d1_closed(a, 2, x).value == pytest.approx(total, rel=1e-9)

    @pytest.mark.parametrize(
        "d,a", [(1, 0.2), (1, 1.0), (2, 0.2), (2, 1.0), (3, 0.2), (3, 1.0), (3, 0.0)]
    )
    def test_submultiplicative_across_points(self, d, a):
        box = 4
        cache = {}

        def val(pt):
            key = tuple(sorted(abs(int(c)) for c in pt))
            if key not in cache:
                cache[key] = green_bessel(GreenParams(d, a, 1.0), key).value
            return cache[key]

        origin = val((0,) * d)
        pts = list(itertools.product(range(-box, box + 1), repeat=d))
        rng = np.random.default_rng(17)
        if d >= 3:  # full pair set is ~0.5M; a fixed random subset suffices
            idx = rng.integers(0, len(pts), size=(4000, 2))
            pairs = [(pts[i], pts[j]) for i, j in idx]
        else:
            pairs = [(x, y) for x in pts for y in pts]
        for x, y in pairs:
            lhs = origin * val(x)
            rhs = val(y) * val(tuple(np.subtract(x, y)))
            assert lhs >= rhs * (1.0 - 1e-9)


class TestQuadratureFailure:
    def test_node_budget_exhaustion_carries_best_estimate(self):
        cfg = QuadratureConfig(max_nodes=64, rel_tol=1e-12)
        with pytest.raises(AccuracyError) as exc:
            green_bessel(GreenParams(3, 0.5, 1.0), [2, 1, 1], cfg)
        assert "nodes" in str(exc.value)


class TestTransformChoice:
    def test_transforms_agree(self):
        # both semi-infinite transforms are valid for the Bessel-route
        # integrand; results must agree to quadrature tolerance
        p = GreenParams(2, 0.6, 1.5)
        log_cfg = QuadratureConfig(transform="log_substitution", rel_tol=1e-11)
        de_cfg = QuadratureConfig(transform="double_exponential", rel_tol=1e-11)
        a = green_bessel(p, [2, 1], log_cfg)
        b = green_bessel(p, [2, 1], de_cfg)
        assert b.value == pytest.approx(a.value, rel=1e-9)

    def test_unknown_transform_rejected(self):
        from latgreen import ConfigError

        with pytest.raises(ConfigError):
            QuadratureConfig(transform="legendre")


class TestSymmetryProperties:
    @pytest.mark.parametrize("perm", [(0, 1, 2), (2, 0, 1), (1, 2, 0)])
    def test_permutation_invariance(self, perm):
        p = GreenParams(3, 0.4, 1.0)
        x = [3, 1, 0]
        base = green_bessel(p, x)
        permuted = green_bessel(p, [x[i] for i in perm])
        assert permuted.value == base.value

    def test_sign_flip_invariance_fourier(self):
        p = GreenParams(2, 0.5, 1.0)
        a = green_fourier_oracle(p, [2, -1])
        b = green_fourier_oracle(p, [-2, 1])
        assert a.value == b.value


class TestHighPrecisionReferee:
    @pytest.mark.parametrize(
        "d,a,q,x",
        [
            (2, 0.5, 1.5, (1, 1)),
            (3, 0.0, 1.0, (0, 0, 0)),
            (5, 0.0, 2.0, (1, 0, 0, 0, 0)),
        ],
    )
    def test_against_multiprecision_quadrature(self, d, a, q, x):
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 30

        def integrand(t):
            acc = t ** (q - 1) * mp.exp(-a * a * t)
            for xj in x:
                acc *= mp.besseli(abs(xj), t / mp.mpf(d)) * mp.exp(-t / mp.mpf(d))
            return acc

        want = float(mp.quad(integrand, [0, 1, 10, 100, mp.inf]) / mp.gamma(q))
        got = green_bessel(GreenParams(d, a, q), list(x)).value
        assert got == pytest.approx(want, rel=1e-12)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affinespheres.errors import DomainError, ZeroDivisor
from affinespheres.split_algebra import (
    Jet,
    SplitScalar,
    SplitVec3,
    extend_analytic,
    inv,
    mul,
)

finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


class TestSplitScalar:
    def test_j_squared_is_one(self):
        j = SplitScalar(0.0, 1.0)
        assert mul(j, j) == SplitScalar(1.0, 0.0)

    def test_zero_divisor_product(self):
        out = mul(SplitScalar(1.0, 1.0), SplitScalar(1.0, -1.0))
        assert out == SplitScalar(0.0, 0.0)

    def test_conjugate_product(self):
        assert mul(SplitScalar(2.0, 1.0), SplitScalar(2.0, -1.0)) == SplitScalar(3.0, 0.0)

    def test_inv_conjugate_over_modulus(self):
        out = inv(SplitScalar(2.0, 1.0))
        assert out == SplitScalar(2.0 / 3.0, -1.0 / 3.0)

    def test_inv_identity(self):
        assert inv(SplitScalar(1.0, 0.0)) == SplitScalar(1.0, 0.0)

    def test_inv_null_raises(self):
        with pytest.raises(ZeroDivisor):
            inv(SplitScalar(1.0, 1.0))

    @given(finite, finite)
    def test_null_cartesian_round_trip(self, u, v):
        z = SplitScalar.from_null(u, v)
        assert z.re == pytest.approx((u + v) / 2.0, abs=1e-12)
        assert z.im == pytest.approx((u - v) / 2.0, abs=1e-12)
        back = SplitScalar(z.re, z.im)
        assert back.u == pytest.approx(u, rel=1e-15, abs=1e-12)
        assert back.v == pytest.approx(v, rel=1e-15, abs=1e-12)

    @given(finite, finite, finite, finite)
    def test_null_product_law(self, a_re, a_im, b_re, b_im):
        a = SplitScalar(a_re, a_im)
        b = SplitScalar(b_re, b_im)
        ab = a * b
        assert ab.u == pytest.approx(a.u * b.u, rel=1e-12, abs=1e-9)
        assert ab.v == pytest.approx(a.v * b.v, rel=1e-12, abs=1e-9)

    @given(finite, finite)
    def test_mul_inv_is_one(self, re, im):
        z = SplitScalar(re, im)
        if z.is_null() or abs(z.modulus) < 1e-6:
            return
        w = z * z.inv()
        assert w.re == pytest.approx(1.0, abs=1e-9)
        assert w.im == pytest.approx(0.0, abs=1e-9)

    def test_division_and_power(self):
        z = SplitScalar(2.0, 1.0)
        assert (z / z).re == pytest.approx(1.0)
        assert z**3 == z * z * z
        zi = z**-1
        assert zi == z.inv()


class TestExtendAnalytic:
    def test_cos_matches_addition_formula(self):
        s, t = 0.7, -0.4
        z = SplitScalar(s, t)
        out = extend_analytic(math.cos, z)
        assert out.re == pytest.approx((math.cos(s + t) + math.cos(s - t)) / 2, abs=1e-15)
        assert out.im == pytest.approx((math.cos(s + t) - math.cos(s - t)) / 2, abs=1e-15)

    def test_exp_on_imaginary_axis(self):
        t = 0.83
        out = extend_analytic(math.exp, SplitScalar(0.0, t))
        assert out.re == pytest.approx(math.cosh(t), abs=1e-15)
        assert out.im == pytest.approx(math.sinh(t), abs=1e-15)

    def test_identity_extension(self):
        z = SplitScalar(1.25, -0.5)
        assert extend_analytic(lambda x: x, z) == z

    def test_restriction_to_real_axis(self, rng):
        for s in rng.uniform(-10, 10, size=1000):
            out = extend_analytic(math.sin, SplitScalar(float(s), 0.0))
            assert out.im == 0.0
            assert out.re == math.sin(s)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            extend_analytic(math.log, SplitScalar(0.5, 1.0))  # v = -0.5 < 0

    def test_polynomial_extension_equals_horner(self, rng):
        for _ in range(50):
            deg = int(rng.integers(0, 7))
            coeffs = rng.uniform(-2, 2, size=deg + 1)
            z = SplitScalar(float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))

            def poly(x, c=coeffs):
                acc = 0.0
                for ck in c[::-1]:
                    acc = acc * x + ck
                return acc

            ext = extend_analytic(poly, z)
            horner = SplitScalar(0.0, 0.0)
            for ck in coeffs[::-1]:
                horner = horner * z + SplitScalar(float(ck), 0.0)
            assert ext.re == pytest.approx(horner.re, abs=1e-12)
            assert ext.im == pytest.approx(horner.im, abs=1e-12)


class TestSplitVec3:
    def test_conj_componentwise_and_involutive(self):
        w = SplitVec3(SplitScalar(1, 2), SplitScalar(-3, 0.5), SplitScalar(0, 1))
        c = w.conj()
        assert c.x == SplitScalar(1, -2)
        assert c.conj() == w


class TestJet:
    def test_constant_jet(self):
        j = Jet.constant(3.5, order=4)
        assert j.value == 3.5
        assert np.all(j.coeffs[1:] == 0.0)

    def test_leibniz_rule_on_polynomials(self, rng):
        # (f*g) jet coefficients must satisfy the Cauchy/Leibniz convolution
        for _ in range(20):
            s0 = float(rng.uniform(-1, 1))
            x = Jet.variable(s0, order=4)
            f = 1.5 + 2.0 * x - x * x * x
            g = -0.5 + x * x
            prod = f * g
            # reference: expand (f*g) as a single polynomial in the variable jet
            ref = (
                -0.75
                - 1.0 * x
                + 1.5 * x * x
                + 2.5 * x * x * x
                - x ** 5
            )
            np.testing.assert_allclose(prod.coeffs, ref.coeffs, atol=1e-12)

    def test_jet_derivatives_match_fd_of_previous_order(self):
        # k-th derivative from jets vs central difference of the (k-1)-th,
        # each evaluated by jets: O(h^2) agreement, h = 1e-4
        h = 1e-4

        def fn(s: float) -> Jet:
            x = Jet.variable(s, order=4)
            return (x.sin() * x.cosh() + 1.0) / (2.0 + x.cos()) + (0.3 * x).exp()

        for s0 in (-1.2, 0.0, 0.7, 2.4):
            jet = fn(s0)
            for k in range(1, 5):
                lo = fn(s0 - h).derivative(k - 1)
                hi = fn(s0 + h).derivative(k - 1)
                fd = (hi - lo) / (2 * h)
                exact = jet.derivative(k)
                assert fd == pytest.approx(exact, rel=1e-6, abs=1e-6)

    def test_division_and_transcendental(self):
        x = Jet.variable(0.5, order=4)
        expr = (x.exp() * x.sin()) / x.cosh()
        recon = expr * x.cosh()
        ref = x.exp() * x.sin()
        np.testing.assert_allclose(recon.coeffs, ref.coeffs, atol=1e-13)

    def test_log_domain_error(self):
        with pytest.raises(DomainError):
            Jet.variable(-1.0).log()

    def test_zero_divisor(self):
        with pytest.raises(ZeroDivisor):
            Jet.constant(1.0) / Jet.constant(0.0)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from floqtunnel.airyfn import SERIES_RADIUS, X_MAX, airy, airy_scaled

# Extended-precision series oracle values (mpmath, 40 digits), frozen.
AI0 = 0.3550280538878172392600632
BI0 = 0.6149266274460007351509224
AI_M5 = 0.3507610090241143197880163
BI_M5 = -0.1383691349016005768500292
AIP_M5 = 0.3271928185544431367948787
BIP_M5 = 0.7784117730018992460944232
AI_10 = 1.104753255289868593355021e-10


def ai_by_quadrature(z: float) -> float:
    """Independent oracle: rotated-contour integral representation of Ai.

    Ai(z) = (1/pi) Im[ w * int_0^inf exp(-r^3/3 - z r w) dr ],  w = e^{i pi/3};
    the rotation makes the integrand decay like exp(-r^3/3).
    """
    w = complex(math.cos(math.pi / 3), math.sin(math.pi / 3))

    def integrand(r, part):
        val = np.exp(-(r**3) / 3.0 - z * r * w) * w
        return val.real if part == 0 else val.imag

    im, _ = quad(lambda r: integrand(r, 1), 0.0, 30.0, limit=400)
    return im / math.pi


class TestOracleValues:
    def test_at_zero(self):
        v = airy(0.0)
        assert v.ai == pytest.approx(AI0, rel=1e-12)
        assert v.bi == pytest.approx(BI0, rel=1e-12)

    def test_frozen_point_minus5(self):
        v = airy(-5.0)
        assert v.ai == pytest.approx(AI_M5, rel=1e-10)
        assert v.bi == pytest.approx(BI_M5, rel=1e-10)
        assert v.ai_prime == pytest.approx(AIP_M5, rel=1e-10)
        assert v.bi_prime == pytest.approx(BIP_M5, rel=1e-10)

    def test_decaying_tail(self):
        assert airy(10.0).ai == pytest.approx(AI_10, rel=1e-10)

    @pytest.mark.parametrize("x", [-5.0, -1.0, 0.0, 2.0])
    def test_against_quadrature_oracle(self, x):
        assert airy(x).ai == pytest.approx(ai_by_quadrature(x), abs=1e-9)

    def test_against_extended_precision_grid(self):
        mpmath = pytest.importorskip("mpmath")
        mpmath.mp.dps = 30
        xs = np.linspace(-20.0, 20.0, 241)
        v = airy(xs)
        for i, x in enumerate(xs):
            ref = [float(mpmath.airyai(x)), float(mpmath.airybi(x)),
                   float(mpmath.airyai(x, 1)), float(mpmath.airybi(x, 1))]
            env = math.hypot(ref[0], ref[1]) if x < 0 else None
            envp = math.hypot(ref[2], ref[3]) if x < 0 else None
            for mine, exact, scale in [
                (v.ai[i], ref[0], env),
                (v.bi[i], ref[1], env),
                (v.ai_prime[i], ref[2], envp),
                (v.bi_prime[i], ref[3], envp),
            ]:
                if scale is None:
                    assert mine == pytest.approx(exact, rel=1e-10)
                else:
                    assert abs(mine - exact) <= 1e-10 * scale


class TestWronskian:
    def test_dense_grid(self):
        xs = np.linspace(-20.0, 20.0, 1000)
        w = airy(xs).wronskian()
        assert np.abs(w * math.pi - 1.0).max() <= 1e-10

    @given(x=st.floats(-20.0, 20.0))
    @settings(max_examples=80, deadline=None)
    def test_pointwise(self, x):
        w = airy(x).wronskian()
        assert abs(w * math.pi - 1.0) <= 1e-10


class TestCrossovers:
    @pytest.mark.parametrize("c", [SERIES_RADIUS, -SERIES_RADIUS, 8.0, -7.5])
    def test_continuity(self, c):
        eps = 1e-11
        lo, hi = airy(c - eps), airy(c + eps)
        for a, b in [(lo.ai, hi.ai), (lo.bi, hi.bi),
                     (lo.ai_prime, hi.ai_prime), (lo.bi_prime, hi.bi_prime)]:
            assert a == pytest.approx(b, rel=1e-9, abs=1e-300)


class TestShape:
    def test_ai_positive_decreasing(self):
        xs = np.linspace(0.0, 30.0, 400)
        ai = airy(xs).ai
        assert np.all(ai > 0)
        assert np.all(np.diff(ai) < 0)

    def test_bi_positive_increasing(self):
        xs = np.linspace(0.0, 30.0, 400)
        bi = airy(xs).bi
        assert np.all(bi > 0)
        assert np.all(np.diff(bi) > 0)


class TestScaled:
    def test_identity_at_zero(self):
        a, b = airy(0.0), airy_scaled(0.0)
        assert (a.ai, a.bi, a.ai_prime, a.bi_prime) == (b.ai, b.bi, b.ai_prime, b.bi_prime)

    def test_finite_far_beyond_overflow(self):
        v = airy_scaled(100.0)
        assert all(map(math.isfinite, [v.ai, v.bi, v.ai_prime, v.bi_prime]))
        v = airy_scaled(5000.0)
        assert all(map(math.isfinite, [v.ai, v.bi, v.ai_prime, v.bi_prime]))

    def test_unscaling_matches_plain(self):
        x = 10.0
        zeta = (2.0 / 3.0) * x**1.5
        s, p = airy_scaled(x), airy(x)
        assert s.ai * math.exp(-zeta) == pytest.approx(p.ai, rel=1e-9)
        assert s.bi * math.exp(zeta) == pytest.approx(p.bi, rel=1e-9)
        assert s.ai_prime * math.exp(-zeta) == pytest.approx(p.ai_prime, rel=1e-9)
        assert s.bi_prime * math.exp(zeta) == pytest.approx(p.bi_prime, rel=1e-9)

    @given(x=st.floats(0.1, 30.0))
    @settings(max_examples=60, deadline=None)
    def test_unscaling_property(self, x):
        zeta = (2.0 / 3.0) * x**1.5
        s, p = airy_scaled(x), airy(x)
        assert s.bi * math.exp(zeta) == pytest.approx(p.bi, rel=1e-9)

    def test_overflow_guard(self):
        with pytest.raises(OverflowError):
            airy(X_MAX + 1.0)
        airy_scaled(X_MAX + 1.0)  # must not raise

    def test_negative_side_unscaled(self):
        a, b = airy(-9.0), airy_scaled(-9.0)
        assert a.ai == b.ai and a.bi == b.bi

"""Gauss norm, primitive division, untilt and theta tests."""

import random
from fractions import Fraction as F

import pytest

from perfprism.errors import GuardInsufficient, InputError, NotPrimitive
from perfprism.perfbase import SeriesRing
from perfprism.period import (GaussNorm, SharpRoundtrip, UntiltRing, gauss_norm,
                              is_primitive, primitive_divide, sharp_roundtrip,
                              theta, theta_teichmuller, untilt_generator)
from perfprism.witt import (WittTrunc, strict_value, teichmuller, witt_add,
                            witt_mul, witt_sub)


def tring(p, a=1, kmax=24):
    return SeriesRing(p=p, a=a, var="t", kmax=kmax)


def random_plus_series(ring, rng, K=1, window=(0, 3), nterms=3):
    f = ring.field
    denom = ring.p ** K
    pool = [F(n, denom) for n in range(0, int(window[1]) * denom)]
    terms = {e: rng.choice(list(f.elements())) for e in rng.sample(pool, nterms)}
    return ring.series(terms, K=K, window=window)


def random_witt(ring, rng, plen=3, window=(0, 3)):
    digits = {}
    for n in range(plen):
        if rng.random() < 0.7:
            s = random_plus_series(ring, rng, window=window)
            if not s.is_zero():
                digits[n] = s
    return WittTrunc(ring, 0, plen, digits)


class TestGaussNorm:
    def test_single_teichmuller_term(self):
        ring = tring(3)
        x = teichmuller(ring.var_power(2, window=(0, 5)), plen=3)
        for r in (F(1), F(1, 2), F(3)):
            assert gauss_norm(x, r).logval == 2 * r

    def test_p_times_unit(self):
        ring = tring(3)
        x = teichmuller(ring.one(window=(0, 2)), plen=3).p_shift(1)
        assert gauss_norm(x, F(7, 3)).logval == 1

    def test_log_convexity_on_grid(self):
        rng = random.Random(20)
        ring = tring(2, a=2)
        grid = [F(1, 2), F(1), F(3, 2), F(2), F(5, 2)]
        for _ in range(50):
            x = random_witt(ring, rng)
            if x.is_zero():
                continue
            w = [gauss_norm(x, r).logval for r in grid]
            for i in range(1, len(grid) - 1):
                # -w is convex in r: midpoint inequality with exact rationals
                assert 2 * w[i] >= w[i - 1] + w[i + 1]

    def test_power_multiplicative(self):
        rng = random.Random(22)
        ring = tring(2, a=2)
        lam = GaussNorm(F(4, 3))
        for _ in range(30):
            x = random_witt(ring, rng)
            if x.is_zero():
                continue
            assert lam(witt_mul(x, x)).logval == 2 * lam(x).logval

    def test_multiplicative_on_single_terms(self):
        ring = tring(3)
        x = teichmuller(ring.var_power(F(1, 3), window=(0, 2)), plen=4).p_shift(1)
        y = teichmuller(ring.var_power(2, window=(0, 4)), plen=4).p_shift(2)
        r = F(5, 7)
        assert gauss_norm(witt_mul(x, y), r).logval == \
            gauss_norm(x, r).logval + gauss_norm(y, r).logval


class TestPrimitive:
    def test_p_is_primitive(self):
        ring = tring(2)
        z = WittTrunc.integer(ring, 1, plen=3, window=(0, 2)).p_shift(1)
        wit = is_primitive(z)
        assert wit.primitive and wit.v_digit0.zero

    def test_teichmuller_is_not(self):
        ring = tring(2)
        z = teichmuller(ring.var_power(1, window=(0, 2)), plen=3)
        assert not is_primitive(z).primitive

    def test_p_minus_t_odd_p_digits(self):
        ring = tring(3)
        z = untilt_generator(ring, plen=4)
        wit = is_primitive(z)
        assert wit.primitive
        # digits are exactly (-t, 1): no carries for odd p
        assert z.digit(0) == ring.series({1: 2}, window=(0, 2))
        assert z.digit(1) == ring.one(window=(0, 2))

    def test_p_minus_t_even(self):
        ring = tring(2)
        z = untilt_generator(ring, plen=4)
        wit = is_primitive(z)
        assert wit.primitive
        assert z.digit(0) == ring.var_power(1, window=(0, 2))


class TestPrimitiveDivide:
    def test_divide_p_by_generator(self):
        for p in (2, 3):
            ring = tring(p)
            z = untilt_generator(ring, plen=4)
            x = WittTrunc.integer(ring, 1, plen=4, window=(0, 2)).p_shift(1)
            w, y, cert = primitive_divide(x, z)
            assert w == WittTrunc.integer(ring, 1, plen=4, window=(0, 2))
            assert sorted(y.digits) == [0]
            assert y.digit(0) == ring.var_power(1, window=(0, 2))

    def test_divide_z_by_z(self):
        ring = tring(3)
        z = untilt_generator(ring, plen=4)
        w, y, cert = primitive_divide(z, z)
        assert y.is_zero()
        assert w == WittTrunc.integer(ring, 1, plen=4, window=(0, 2))

    def test_divide_t_squared(self):
        ring = tring(2)
        z = untilt_generator(ring, plen=4, window=(0, 8))
        x = teichmuller(ring.var_power(2, window=(0, 8)), plen=4)
        w, y, cert = primitive_divide(x, z)
        # exact identity on the truncation
        delta = witt_sub(witt_sub(x, witt_mul(w, z)), y)
        assert _vanishes_on_window(delta, F(8))
        vy0 = y.digit(0).valuation()
        for n in range(1, y.n_hi):
            vn = y.digit(n).valuation()
            assert vn.zero or vn.v >= vy0.v

    def test_nonprimitive_rejected(self):
        ring = tring(2)
        z = teichmuller(ring.var_power(1, window=(0, 2)), plen=3)
        x = teichmuller(ring.one(window=(0, 2)), plen=3)
        with pytest.raises(NotPrimitive):
            primitive_divide(x, z)

    def test_mode_b_certificate(self):
        rng = random.Random(5)
        ring = tring(2)
        z = untilt_generator(ring, plen=4, window=(0, 8))
        for _ in range(10):
            x = random_witt(ring, rng, plen=4, window=(0, 8))
            if x.is_zero():
                continue
            w, y, cert = primitive_divide(x, z, mode="b", eps_val=F(2), m=1)
            assert cert.mode == "b"
            assert cert.mode_b_digit1_ok and cert.mode_b_tail_ok
            delta = witt_sub(witt_sub(x, witt_mul(w, z)), y)
            assert _vanishes_on_window(delta, F(8))


def _vanishes_on_window(x: WittTrunc, hi: F) -> bool:
    for d in x.digits.values():
        v = d.val_exponent()
        if v is not None and v < hi:
            return False
    return True


class TestUntiltRing:
    def test_u_power_folding(self):
        R = UntiltRing(2, 1, 4, 2)
        p_elem = R.from_u_power(R.dim)
        assert p_elem.vec[0] == R.base(2)
        assert (R.from_u_power(1) ** 4) == R.from_u_power(4)

    def test_valuation_and_inverse(self):
        R = UntiltRing(2, 2, 4, 2)
        x = R.from_u_power(3)
        assert x.u_valuation() == F(3, 4)
        u = R.one + R.from_u_power(1)
        assert (u * u.inverse()) == R.one

    def test_ring_is_free_of_rank_pK(self):
        R = UntiltRing(3, 1, 2, 1)
        assert R.dim == 3
        x = R.element([(0, 1), (1, 1), (2, 1)])
        y = x * x
        # (1+u+u^2)^2 = 1+2u+3u^2+2u^3+u^4 = (1+2p) + (2+p)u + 3u^2
        assert y.vec[0] == R.base(1 + 2 * 3)
        assert y.vec[1] == R.base(2 + 3)
        assert y.vec[2] == R.base(3)


class TestTheta:
    def test_theta_of_t_is_p(self):
        ring = tring(2)
        x = teichmuller(ring.var_power(1, window=(0, 4)), plen=4)
        v = theta(x, M=4, K=2, guard=5)
        R = UntiltRing(2, 1, 4, 2)
        assert v == R.from_u_power(R.dim)

    def test_theta_kills_generator(self):
        for p in (2, 3):
            ring = tring(p)
            z = untilt_generator(ring, plen=4, window=(0, 6))
            v = theta(z, M=3, K=1, guard=5)
            assert v.is_zero()

    def test_theta_against_division_normal_form(self):
        # two computation paths: theta(x) and theta(y) for x = w z + y
        ring = tring(2)
        z = untilt_generator(ring, plen=3, window=(0, 8))
        x = teichmuller(ring.series({0: 1, 1: 1}, window=(0, 8)), plen=3)
        w, y, _ = primitive_divide(x, z)
        tx = theta(x, M=3, K=2, guard=5)
        ty = theta(y, M=3, K=2, guard=5)
        assert tx == ty
        # and mod p it matches the naive digit reduction of 1 + t
        assert tx.reduce_mod_u() == ring.field.one

    def test_theta_is_ring_hom_randomized(self):
        rng = random.Random(9)
        ring = tring(2, a=2)
        for _ in range(15):
            x = random_witt(ring, rng, plen=3, window=(0, 2))
            y = random_witt(ring, rng, plen=3, window=(0, 2))
            tx = theta(x, M=3, K=1, guard=5)
            ty = theta(y, M=3, K=1, guard=5)
            ts = theta(witt_add(x, y), M=3, K=1, guard=5)
            tm = theta(witt_mul(x, y), M=3, K=1, guard=5)
            assert ts == tx + ty
            assert tm == tx * ty

    def test_quotient_identity(self):
        # reduction of theta([z]) mod u equals reduction of z mod t
        rng = random.Random(14)
        ring = tring(3, a=1)
        for _ in range(10):
            zbar = random_plus_series(ring, rng, K=1, window=(0, 2))
            v = theta_teichmuller(zbar, UntiltRing(3, 1, 3, 1), guard=4)
            assert v.reduce_mod_u() == zbar.constant_coeff()


class TestSharpRoundtrip:
    def test_t_sequence(self):
        ring = tring(2)
        t = ring.var_power(1, window=(0, 2))
        out = sharp_roundtrip(t, depth=2, M=4, K=2, guard=5)
        R = UntiltRing(2, 1, 4, 2)
        assert out.sequence[0] == R.from_u_power(4)   # p
        assert out.sequence[1] == R.from_u_power(2)   # p^(1/2)
        assert out.sequence[2] == R.from_u_power(1)   # p^(1/4)
        assert out.compatible
        assert out.reconstructed == t

    def test_zero(self):
        ring = tring(2)
        out = sharp_roundtrip(ring.zero(window=(0, 1)), depth=1, M=3, K=1)
        assert all(v.is_zero() for v in out.sequence)
        assert out.reconstructed.is_zero()

    def test_random_roundtrip(self):
        rng = random.Random(33)
        ring = tring(2, a=2)
        for _ in range(10):
            x = random_plus_series(ring, rng, K=2, window=(0, 4))
            out = sharp_roundtrip(x, depth=2, M=4, K=2, guard=6)
            assert out.compatible
            assert out.reconstructed == x.with_window(0, 4)

    def test_depth_bound(self):
        ring = tring(2)
        with pytest.raises(InputError):
            sharp_roundtrip(ring.one(window=(0, 1)), depth=3, M=3, K=2)

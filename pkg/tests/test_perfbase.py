"""Base-ring tests: finite fields, perfect series arithmetic, Frobenius, norms."""

import random
from fractions import Fraction

import pytest

from perfprism.errors import DenominatorOverflow, NotAUnit, WindowMismatch
from perfprism.perfbase import Fq, PerfSeries, SeriesRing, frobenius, series_arith, tnorm


F = Fraction


def cyclotomic_ring(p, a=1, kmax=24):
    return SeriesRing(p=p, a=a, var="pi", scale=Fraction(p, p - 1), kmax=kmax)


def random_series(ring, rng, K=2, window=(0, 4), nterms=4):
    p = ring.p
    field = ring.field
    denom = p ** K
    lo, hi = Fraction(window[0]), Fraction(window[1])
    pool = [Fraction(n, denom) for n in range(int(lo * denom), int(hi * denom))]
    terms = {}
    for e in rng.sample(pool, min(nterms, len(pool))):
        c = rng.randrange(field.q)
        coeffs = []
        for _ in range(field.a):
            coeffs.append(c % p)
            c //= p
        terms[e] = field(tuple(coeffs))
    return ring.series(terms, K=K, window=window)


class TestFq:
    def test_f4_modulus_and_field_axioms(self):
        f4 = Fq(2, 2)
        assert f4.modulus == (1, 1, 1)  # X^2 + X + 1
        els = list(f4.elements())
        assert len(els) == 4
        for x in els:
            assert x ** 4 == x  # x^q = x
            for y in els:
                for z in els:
                    assert (x + y) * z == x * z + y * z

    def test_inverse_and_frobenius_bijective(self):
        for (p, a) in [(2, 2), (3, 2), (5, 1), (2, 3)]:
            f = Fq(p, a)
            seen = set()
            for x in f.elements():
                if x:
                    assert x * x.inverse() == f.one
                y = x.frobenius()
                assert y == x ** p
                assert y.frobenius(-1) == x
                seen.add(y.coeffs)
            assert len(seen) == f.q  # Frobenius is a bijection

    def test_trace_is_fp_linear(self):
        f9 = Fq(3, 2)
        for x in f9.elements():
            for y in f9.elements():
                assert (x + y).trace() == (x.trace() + y.trace()) % 3


class TestSeriesArith:
    def test_char2_cancellation(self):
        ring = SeriesRing(p=2)
        t = ring.var_power(1, window=(0, 4))
        assert (t + t).is_zero()

    def test_geometric_inverse(self):
        ring = SeriesRing(p=2)
        x = ring.series({0: 1, 1: 1}, window=(0, 6))  # 1 + t
        inv = series_arith(x, x, "inv")
        expect = ring.series({n: 1 for n in range(6)}, window=(0, 6))
        assert inv == expect
        assert (x * inv).with_window(0, 6) == ring.one(window=(0, 6))

    def test_fractional_exponent_addition(self):
        p = 3
        ring = SeriesRing(p=p)
        a = ring.var_power(F(1, p), window=(0, 2))
        b = ring.var_power(1 - F(1, p), window=(0, 2))
        assert a * b == ring.var_power(1, window=(0, 2))

    def test_window_mismatch_raises(self):
        r1 = SeriesRing(p=2)
        with pytest.raises(WindowMismatch):
            r1.var_power(1, window=(0, 2)) + r1.var_power(1, window=(3, 5))

    def test_inv_of_zero_leading_is_not_a_unit(self):
        ring = SeriesRing(p=2)
        with pytest.raises(NotAUnit):
            ring.zero(window=(0, 4)).inverse()

    def test_ring_axioms_randomized(self):
        rng = random.Random(7)
        ring = SeriesRing(p=3, a=2)
        for _ in range(40):
            x = random_series(ring, rng)
            y = random_series(ring, rng)
            z = random_series(ring, rng)
            assert x + y == y + x
            assert (x + y) + z == x + (y + z)
            assert x * y == y * x
            assert (x * y) * z == x * (y * z)
            assert x * (y + z) == x * y + x * z
            assert (x - x).is_zero()


class TestFrobenius:
    def test_monomial_power(self):
        ring = SeriesRing(p=5)
        t = ring.var_power(1, window=(0, 30))
        assert frobenius(t, 1) == ring.var_power(5, window=(0, 150))

    def test_inverse_frobenius_binomial(self):
        # (1 + pi)^(1/p) = 1 + pi^(1/p) in characteristic p
        for p in (2, 3):
            ring = cyclotomic_ring(p)
            x = ring.series({0: 1, 1: 1}, window=(0, 4))
            y = frobenius(x, -1)
            assert y == ring.series({0: 1, F(1, p): 1}, window=(0, F(4, p)))

    def test_constant_coefficient_powers(self):
        ring = SeriesRing(p=2, a=2)
        g = ring.field.gen()
        x = ring.series({0: g}, window=(0, 2))
        assert frobenius(x, 1).constant_coeff() == g ** 2

    def test_roundtrip_and_endomorphism(self):
        rng = random.Random(3)
        ring = SeriesRing(p=2, a=2, kmax=8)
        for _ in range(30):
            x = random_series(ring, rng)
            y = random_series(ring, rng)
            assert frobenius(frobenius(x, -1), 1) == x
            assert frobenius(x + y, 1) == frobenius(x, 1) + frobenius(y, 1)
            assert frobenius(x * y, 1) == frobenius(x, 1) * frobenius(y, 1)

    def test_denominator_overflow(self):
        ring = SeriesRing(p=2, kmax=2)
        t = ring.var_power(F(1, 4), window=(0, 1))
        with pytest.raises(DenominatorOverflow):
            frobenius(t, -1)


class TestTnorm:
    def test_cyclotomic_normalization(self):
        # v(pi) = p/(p-1) in the cyclotomic normalization
        for p in (2, 3, 5):
            ring = cyclotomic_ring(p)
            pi = ring.var_power(1, window=(0, 3))
            assert tnorm(pi).v == F(p, p - 1)

    def test_standard_normalization(self):
        ring = SeriesRing(p=2)
        assert tnorm(ring.var_power(1, window=(0, 3))).v == 1

    def test_zero_flag(self):
        ring = SeriesRing(p=2)
        v = tnorm(ring.zero(window=(0, 5)))
        assert v.zero and v.v == 5

    def test_multiplicativity_exhaustive_small_supports(self):
        # DERIVED oracle: v(xy) = v(x) + v(y) checked over all one/two-term
        # units with exponents in (1/2)Z within [0, 2).
        ring = SeriesRing(p=2)
        field = ring.field
        exps = [F(n, 2) for n in range(0, 4)]
        units = []
        for e in exps:
            units.append(ring.series({e: 1}, window=(0, 4)))
            for e2 in exps:
                if e2 > e:
                    units.append(ring.series({e: 1, e2: 1}, window=(0, 4)))
        for x in units:
            for y in units:
                assert tnorm(x * y).v == tnorm(x).v + tnorm(y).v

    def test_ultrametric_inequality(self):
        rng = random.Random(11)
        ring = SeriesRing(p=3)
        for _ in range(60):
            x = random_series(ring, rng)
            y = random_series(ring, rng)
            if x.is_zero() or y.is_zero() or (x + y).is_zero():
                continue
            vx, vy, vs = tnorm(x).v, tnorm(y).v, tnorm(x + y).v
            assert vs >= min(vx, vy)
            if vx != vy:
                assert vs == min(vx, vy)


class TestCanonicalForm:
    def test_no_zero_coeffs_and_minimal_denominator(self):
        ring = SeriesRing(p=2)
        x = ring.series({F(1, 2): 1}, K=3, window=(0, 2))
        assert x.K == 1  # K reduced from 3 to the minimal 1
        y = ring.series({1: 1, 2: 0}, window=(0, 4))
        assert list(y.c.values()) == [ring.field.one]

    def test_equality_is_structural(self):
        ring = SeriesRing(p=2)
        a = ring.series({1: 1}, K=0, window=(0, 4))
        b = ring.series({1: 1}, K=2, window=(0, 4))
        assert a == b and hash(a) == hash(b)

"""Truncated unramified p-adic arithmetic: Z_q / p^L with exact Frobenius.

Z_q is realized as (Z/p^L)[X]/(m(X)) where m is the same modulus polynomial
as the residue field F_q = F_p[X]/(m).  Because the extension is unramified,
the valuation of an element is the minimum p-adic valuation of its
coefficient vector, computed exactly (capped at L).

The arithmetic Frobenius sigma is the unique ring automorphism lifting
x -> x^p on the residue field; it is computed once per ring by Newton
iteration on the modulus and is exact mod p^L.  Teichmueller lifts are
computed by iterating x -> x^q, which stabilizes after L steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .perfbase import Fq, FqElem, FqField


@lru_cache(maxsize=None)
def Zq(p: int, a: int, L: int) -> "ZqRing":
    return ZqRing(p, a, L)


class ZqRing:
    """Z_{p^a} truncated at p-adic precision L."""

    def __init__(self, p: int, a: int, L: int):
        if L < 1:
            raise ValueError("precision L must be >= 1")
        self.p = p
        self.a = a
        self.L = L
        self.pL = p ** L
        self.residue_field: FqField = Fq(p, a)
        self.modulus = tuple(int(c) for c in self.residue_field.modulus)
        self.zero = ZqElem(self, (0,) * a)
        self.one = ZqElem(self, tuple([1] + [0] * (a - 1)))
        self._frob_powers: tuple["ZqElem", ...] | None = None

    def __call__(self, v) -> "ZqElem":
        if isinstance(v, ZqElem):
            if v.ring is not self:
                raise ValueError("element of a different ring")
            return v
        if isinstance(v, int):
            return ZqElem(self, tuple([v % self.pL] + [0] * (self.a - 1)))
        if isinstance(v, FqElem):
            return ZqElem(self, tuple(list(v.lift_vector())))
        vv = tuple(int(x) % self.pL for x in v)
        if len(vv) > self.a:
            raise ValueError("coefficient vector too long")
        return ZqElem(self, vv + (0,) * (self.a - len(vv)))

    def gen(self) -> "ZqElem":
        if self.a == 1:
            return self.one
        return self(tuple([0, 1]))

    def elements(self):
        total = self.pL ** self.a
        for idx in range(total):
            coeffs = []
            v = idx
            for _ in range(self.a):
                coeffs.append(v % self.pL)
                v //= self.pL
            yield self(tuple(coeffs))

    # -- modulus reduction -------------------------------------------------

    def _reduce_poly(self, raw: list[int]) -> tuple[int, ...]:
        """Reduce an integer polynomial mod (m(X), p^L)."""
        a, pL, m = self.a, self.pL, self.modulus
        raw = [c % pL for c in raw]
        for j in range(len(raw) - 1, a - 1, -1):
            c = raw[j]
            if c:
                raw[j] = 0
                # X^j = X^(j-a) * (X^a) and X^a = -(m_0 + ... + m_{a-1}X^{a-1})
                for i in range(a):
                    raw[j - a + i] = (raw[j - a + i] - c * m[i]) % pL
        return tuple(raw[:a] + [0] * (a - len(raw)))

    # -- Frobenius ----------------------------------------------------------

    def _frobenius_image_of_gen(self) -> tuple["ZqElem", ...]:
        """Powers (gen_sigma^0 .. gen_sigma^{a-1}) of sigma(X).

        sigma(X) is the unique root of m congruent to X^p mod p, found by
        Newton iteration; the derivative m'(X^p) is a unit because m is
        separable mod p.
        """
        if self._frob_powers is not None:
            return self._frob_powers
        a = self.a
        if a == 1:
            self._frob_powers = (self.one,)
            return self._frob_powers
        r = self.gen() ** self.p
        mprime = [(i * c) % self.pL for i, c in enumerate(self.modulus)][1:]
        for _ in range(self.L.bit_length() + 1):
            m_r = self._eval_int_poly(self.modulus, r)
            mp_r = self._eval_int_poly(tuple(mprime), r)
            r = r - m_r * mp_r.inverse()
        assert self._eval_int_poly(self.modulus, r).is_zero()
        powers = [self.one]
        for _ in range(1, a):
            powers.append(powers[-1] * r)
        self._frob_powers = tuple(powers)
        return self._frob_powers

    def _eval_int_poly(self, coeffs, x: "ZqElem") -> "ZqElem":
        acc = self.zero
        for c in reversed(coeffs):
            acc = acc * x + self(int(c))
        return acc

    def teichmuller(self, c: FqElem) -> "ZqElem":
        """Multiplicative lift of a residue-field element."""
        if c.field is not self.residue_field:
            raise ValueError("residue element of a different field")
        x = self(c)
        q = self.residue_field.q
        for _ in range(self.L):
            x = x ** q
        return x

    def __repr__(self):
        return f"Zq({self.p},{self.a})/p^{self.L}"


@dataclass(frozen=True)
class ZqElem:
    ring: ZqRing
    coeffs: tuple[int, ...]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other: "ZqElem") -> "ZqElem":
        pL = self.ring.pL
        return ZqElem(self.ring, tuple((x + y) % pL for x, y in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "ZqElem":
        pL = self.ring.pL
        return ZqElem(self.ring, tuple((-x) % pL for x in self.coeffs))

    def __sub__(self, other: "ZqElem") -> "ZqElem":
        return self + (-other)

    def __mul__(self, other: "ZqElem") -> "ZqElem":
        a = self.ring.a
        raw = [0] * (2 * a - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    if y:
                        raw[i + j] += x * y
        return ZqElem(self.ring, self.ring._reduce_poly(raw))

    def __pow__(self, n: int) -> "ZqElem":
        if n < 0:
            return self.inverse() ** (-n)
        acc, base = self.ring.one, self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def vp(self) -> int:
        """p-adic valuation, capped at the precision L."""
        if self.is_zero():
            return self.ring.L
        p = self.ring.p
        best = self.ring.L
        for c in self.coeffs:
            if c:
                v = 0
                while c % p == 0:
                    c //= p
                    v += 1
                best = min(best, v)
        return best

    def is_unit(self) -> bool:
        return self.vp() == 0

    def divide_exact_p(self, k: int) -> "ZqElem":
        """Divide by p^k; requires p^k | every coefficient.

        The result is only determined mod p^(L-k); the top digits are
        therefore zero-filled, which is the canonical choice here.
        """
        pk = self.ring.p ** k
        if any(c % pk for c in self.coeffs):
            raise ValueError("not divisible by p^k")
        return ZqElem(self.ring, tuple((c // pk) % self.ring.pL for c in self.coeffs))

    def inverse(self) -> "ZqElem":
        """Newton inversion from the residue-field inverse."""
        if not self.is_unit():
            raise ZeroDivisionError("not a unit in Z_q/p^L")
        res = self.reduce()
        x = self.ring(res.inverse())
        two = self.ring(2)
        for _ in range(self.ring.L.bit_length() + 1):
            x = x * (two - self * x)
        assert (self * x) == self.ring.one
        return x

    def frobenius(self, k: int = 1) -> "ZqElem":
        """Arithmetic Frobenius sigma^k (exact automorphism; sigma^a = id)."""
        a = self.ring.a
        k %= a
        if k == 0:
            return self
        powers = self.ring._frobenius_image_of_gen()
        out = self
        for _ in range(k):
            acc = self.ring.zero
            for i, c in enumerate(out.coeffs):
                if c:
                    acc = acc + powers[i] * self.ring(c)
            out = acc
        return out

    def reduce(self) -> FqElem:
        """Reduction mod p to the residue field."""
        p = self.ring.p
        return self.ring.residue_field(tuple(c % p for c in self.coeffs))

    def __repr__(self):
        if self.ring.a == 1:
            return f"{self.coeffs[0]} (mod {self.ring.p}^{self.ring.L})"
        return f"{list(self.coeffs)} (mod {self.ring.p}^{self.ring.L})"

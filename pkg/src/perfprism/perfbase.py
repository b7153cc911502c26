"""Exact arithmetic in finite fields and truncated perfect Laurent series.

Two element types live here:

* ``FqElem`` -- elements of F_q = F_p[X]/(m(X)), q = p^a, with the q-power
  Frobenius an exact bijection.
* ``PerfSeries`` -- finite F_q-linear combinations of monomials ``t^e`` with
  exponents in p^(-K) Z restricted to a half-open window [lo, hi).  The
  p-power Frobenius scales exponents and is exactly invertible up to a
  configured denominator bound.

Every element is immutable; binary operations require matching ring data and
truncate their result to the intersection of the operand windows.  The
declared semantics is "exact for the represented truncation": an element *is*
its finite term list, and the window records where that list is faithful.

A ring may declare a valuation ``scale`` for its variable.  The standard
normalization is scale 1 (v(t) = 1); the cyclotomic normalization uses
scale p/(p-1) so that v(pi) = p/(p-1) holds literally.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable


# ---------------------------------------------------------------------------
# F_p[X] helpers (coefficient tuples, constant term first)
# ---------------------------------------------------------------------------

def _poly_trim(c: tuple[int, ...]) -> tuple[int, ...]:
    n = len(c)
    while n > 0 and c[n - 1] == 0:
        n -= 1
    return c[:n]


def _poly_add(a: tuple[int, ...], b: tuple[int, ...], p: int) -> tuple[int, ...]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return _poly_trim(tuple(out))


def _poly_mul(a: tuple[int, ...], b: tuple[int, ...], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = (out[i + j] + x * y) % p
    return _poly_trim(tuple(out))


def _poly_divmod(a: tuple[int, ...], b: tuple[int, ...], p: int):
    """Euclidean division in F_p[X]; b must be nonzero."""
    a = list(a)
    db, dbl = len(b) - 1, b[-1]
    inv_lead = pow(dbl, -1, p)
    q = [0] * max(0, len(a) - db)
    while len(_poly_trim(tuple(a))) - 1 >= db and any(a):
        da = len(_poly_trim(tuple(a))) - 1
        if da < db:
            break
        coeff = (a[da] * inv_lead) % p
        q[da - db] = coeff
        for i in range(db + 1):
            a[da - db + i] = (a[da - db + i] - coeff * b[i]) % p
    return _poly_trim(tuple(q)), _poly_trim(tuple(a))


def _poly_is_irreducible(m: tuple[int, ...], p: int) -> bool:
    """Trial division by all monic polynomials of degree <= deg(m)/2."""
    deg = len(m) - 1
    if deg <= 0:
        return False
    if deg == 1:
        return True

    def monics(d: int) -> Iterable[tuple[int, ...]]:
        total = p ** d
        for idx in range(total):
            coeffs = []
            v = idx
            for _ in range(d):
                coeffs.append(v % p)
                v //= p
            yield tuple(coeffs) + (1,)

    for d in range(1, deg // 2 + 1):
        for g in monics(d):
            _, r = _poly_divmod(m, g, p)
            if not r:
                return False
    return True


@lru_cache(maxsize=None)
def _find_modulus(p: int, a: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree a over F_p (lexicographic)."""
    if a == 1:
        return (0, 1)
    total = p ** a
    for idx in range(total):
        coeffs = []
        v = idx
        for _ in range(a):
            coeffs.append(v % p)
            v //= p
        m = tuple(coeffs) + (1,)
        if _poly_is_irreducible(m, p):
            return m
    raise AssertionError("no irreducible polynomial found")


# ---------------------------------------------------------------------------
# Finite fields
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def Fq(p: int, a: int = 1, modulus: tuple[int, ...] | None = None) -> "FqField":
    return FqField(p, a, modulus)


class FqField:
    """The field F_{p^a} realized as F_p[X]/(m(X)).

    Do not instantiate directly; use the cached constructor :func:`Fq` so
    that element parents compare by identity.
    """

    def __init__(self, p: int, a: int, modulus: tuple[int, ...] | None = None):
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"p = {p} is not prime")
        self.p = p
        self.a = a
        self.q = p ** a
        self.modulus = modulus if modulus is not None else _find_modulus(p, a)
        if len(self.modulus) - 1 != a:
            raise ValueError("modulus degree does not match a")
        # reduction table for X^j, j = a .. 2a-2
        red = {}
        cur = _poly_trim(tuple((-c) % p for c in self.modulus[:-1]))  # X^a
        red[a] = cur
        for j in range(a + 1, 2 * a - 1):
            cur = _poly_trim(tuple([0] + list(cur)))
            if len(cur) > a:
                hi = cur[a] if len(cur) > a else 0
                cur = _poly_add(cur[:a], _scale(red[a], hi, p), p)
            red[j] = cur
        self._red = red
        self.zero = FqElem(self, ())
        self.one = FqElem(self, (1,))

    def __call__(self, v) -> "FqElem":
        if isinstance(v, FqElem):
            if v.field is not self:
                raise ValueError("element of a different field")
            return v
        if isinstance(v, int):
            return FqElem(self, _poly_trim((v % self.p,)))
        return FqElem(self, _poly_trim(tuple(x % self.p for x in v)))

    def gen(self) -> "FqElem":
        return self(tuple([0, 1])) if self.a > 1 else self(1)

    def elements(self) -> Iterable["FqElem"]:
        for idx in range(self.q):
            coeffs = []
            v = idx
            for _ in range(self.a):
                coeffs.append(v % self.p)
                v //= self.p
            yield self(tuple(coeffs))

    def __repr__(self):
        return f"Fq({self.p},{self.a})"


def _scale(c: tuple[int, ...], k: int, p: int) -> tuple[int, ...]:
    return _poly_trim(tuple((x * k) % p for x in c))


@dataclass(frozen=True)
class FqElem:
    field: FqField
    coeffs: tuple[int, ...]

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other: "FqElem") -> "FqElem":
        return FqElem(self.field, _poly_add(self.coeffs, other.coeffs, self.field.p))

    def __neg__(self) -> "FqElem":
        p = self.field.p
        return FqElem(self.field, _poly_trim(tuple((-x) % p for x in self.coeffs)))

    def __sub__(self, other: "FqElem") -> "FqElem":
        return self + (-other)

    def __mul__(self, other: "FqElem") -> "FqElem":
        f = self.field
        raw = _poly_mul(self.coeffs, other.coeffs, f.p)
        if len(raw) <= f.a:
            return FqElem(f, raw)
        acc = _poly_trim(raw[: f.a])
        for j in range(f.a, len(raw)):
            if raw[j]:
                acc = _poly_add(acc, _scale(f._red[j], raw[j], f.p), f.p)
        return FqElem(f, acc)

    def inverse(self) -> "FqElem":
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero in F_q")
        # extended Euclid in F_p[X]
        p, m = self.field.p, self.field.modulus
        r0, r1 = m, self.coeffs
        s0, s1 = (), (1,)
        while r1:
            q, r = _poly_divmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_add(s0, _scale(_poly_mul(q, s1, p), p - 1, p), p)
        lead_inv = pow(r0[-1], -1, p)
        inv = _scale(s0, lead_inv, p)
        _, inv = _poly_divmod(inv, m, p)
        return FqElem(self.field, inv)

    def __pow__(self, n: int) -> "FqElem":
        if n < 0:
            return self.inverse() ** (-n)
        res, base = self.field.one, self
        while n:
            if n & 1:
                res = res * base
            base = base * base
            n >>= 1
        return res

    def frobenius(self, k: int = 1) -> "FqElem":
        """x -> x^(p^k); negative k applies the exact inverse."""
        a = self.field.a
        k %= a
        return self ** (self.field.p ** k) if k else self

    def trace(self) -> int:
        """Absolute trace to F_p, returned as an int."""
        t = self.field.zero
        x = self
        for _ in range(self.field.a):
            t = t + x
            x = x.frobenius()
        return t.coeffs[0] if t.coeffs else 0

    def lift_vector(self) -> tuple[int, ...]:
        """Coefficient vector padded to length a."""
        return self.coeffs + (0,) * (self.field.a - len(self.coeffs))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        if len(self.coeffs) == 1:
            return str(self.coeffs[0])
        return "+".join(
            f"{c}X^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c
        )


# ---------------------------------------------------------------------------
# Ring descriptors for perfect series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesRing:
    """Ring data for PerfSeries: coefficient field, variable, normalization.

    ``scale`` is the declared valuation of the variable; exponent e has
    valuation e * scale.  ``kmax`` bounds the denominator exponent reachable
    by inverse Frobenius.
    """

    p: int
    a: int = 1
    var: str = "t"
    scale: Fraction = Fraction(1)
    kmax: int = 24

    @property
    def field(self) -> FqField:
        return Fq(self.p, self.a)

    def series(self, terms, K: int = 0, window=None) -> "PerfSeries":
        """Build a series from {exponent: coefficient} with Fraction exponents."""
        items = {}
        kk = K
        for e, c in dict(terms).items():
            e = Fraction(e)
            den = e.denominator
            k = 0
            while den > 1:
                if den % self.p:
                    raise ValueError(f"exponent {e} has non-p-power denominator")
                den //= self.p
                k += 1
            kk = max(kk, k)
        field = self.field
        for e, c in dict(terms).items():
            e = Fraction(e)
            c = field(c) if not isinstance(c, FqElem) else c
            if c:
                items[int(e * self.p ** kk)] = c
        if window is None:
            if items:
                exps = [Fraction(n, self.p ** kk) for n in items]
                window = (min(exps), max(exps) + 1)
            else:
                window = (Fraction(0), Fraction(1))
        return PerfSeries(self, kk, Fraction(window[0]), Fraction(window[1]), items)._canonical()

    def zero(self, window=(0, 1), K: int = 0) -> "PerfSeries":
        return PerfSeries(self, K, Fraction(window[0]), Fraction(window[1]), {})

    def one(self, window=(0, 1)) -> "PerfSeries":
        return self.series({0: 1}, window=window)

    def var_power(self, e, window=None) -> "PerfSeries":
        return self.series({Fraction(e): 1}, window=window)


@dataclass(frozen=True)
class Valuation:
    """Exact valuation datum: norm is p^(-v); zero flags 'zero to precision'."""

    v: Fraction
    zero: bool = False

    def __lt__(self, other):
        return (self.v, self.zero) < (other.v, other.zero)


# ---------------------------------------------------------------------------
# Perfect series elements
# ---------------------------------------------------------------------------

class PerfSeries:
    """Finite-support element of F_q((t^(1/p^oo))) at a precision window.

    Internally the support is a dict {n: FqElem} where n is the exponent
    scaled by p^K (an integer).  Canonical form strips zero coefficients and
    minimizes K, so equality of canonical forms is structural equality.
    """

    __slots__ = ("ring", "K", "lo", "hi", "c")

    def __init__(self, ring: SeriesRing, K: int, lo: Fraction, hi: Fraction,
                 c: dict[int, FqElem]):
        self.ring = ring
        self.K = K
        self.lo = lo
        self.hi = hi
        self.c = c

    # -- construction helpers ------------------------------------------------

    def _canonical(self) -> "PerfSeries":
        c = {n: v for n, v in self.c.items() if v}
        K = self.K
        p = self.ring.p
        while K > 0 and all(n % p == 0 for n in c):
            c = {n // p: v for n, v in c.items()}
            K -= 1
        scale = self.ring.p ** K
        c = {n: v for n, v in c.items()
             if self.lo * scale <= n and n < self.hi * scale}
        return PerfSeries(self.ring, K, self.lo, self.hi, c)

    def with_window(self, lo, hi) -> "PerfSeries":
        return PerfSeries(self.ring, self.K, Fraction(lo), Fraction(hi),
                          dict(self.c))._canonical()

    def _at_K(self, K: int) -> dict[int, FqElem]:
        if K < self.K:
            raise ValueError("cannot lower denominator exponent")
        f = self.ring.p ** (K - self.K)
        return {n * f: v for n, v in self.c.items()}

    def _common(self, other: "PerfSeries"):
        if self.ring != other.ring:
            from .errors import WindowMismatch
            raise WindowMismatch("series over different rings")
        K = max(self.K, other.K)
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if hi <= lo:
            from .errors import WindowMismatch
            raise WindowMismatch(f"empty window intersection [{lo},{hi})")
        return K, lo, hi

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.c

    def support(self) -> list[Fraction]:
        s = self.ring.p ** self.K
        return sorted(Fraction(n, s) for n in self.c)

    def coeff(self, e) -> FqElem:
        e = Fraction(e)
        n = e * self.ring.p ** self.K
        if n.denominator != 1:
            return self.ring.field.zero
        return self.c.get(int(n), self.ring.field.zero)

    def val_exponent(self) -> Fraction | None:
        """Minimal exponent of the support, or None for zero."""
        if not self.c:
            return None
        return Fraction(min(self.c), self.ring.p ** self.K)

    def constant_coeff(self) -> FqElem:
        return self.c.get(0, self.ring.field.zero)

    def is_constant(self) -> bool:
        return all(n == 0 for n in self.c)

    def __eq__(self, other):
        if not isinstance(other, PerfSeries):
            return NotImplemented
        a, b = self._canonical(), other._canonical()
        return (a.ring, a.K, a.c) == (b.ring, b.K, b.c)

    def __hash__(self):
        a = self._canonical()
        return hash((a.ring, a.K, tuple(sorted(a.c.items(), key=lambda t: t[0]))))

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "PerfSeries") -> "PerfSeries":
        K, lo, hi = self._common(other)
        c = self._at_K(K)
        for n, v in other._at_K(K).items():
            w = c.get(n)
            c[n] = v if w is None else w + v
        return PerfSeries(self.ring, K, lo, hi, c)._canonical()

    def hull_add(self, other: "PerfSeries") -> "PerfSeries":
        """Sum on the window hull: no term of either operand is dropped.

        Used by layers that treat series as exact finite data (Witt digits,
        tower actions); the user-facing ``series_arith`` keeps the
        intersection semantics instead.
        """
        if self.ring != other.ring:
            from .errors import WindowMismatch
            raise WindowMismatch("series over different rings")
        K = max(self.K, other.K)
        c = self._at_K(K)
        for n, v in other._at_K(K).items():
            w = c.get(n)
            c[n] = v if w is None else w + v
        return PerfSeries(self.ring, K, min(self.lo, other.lo),
                          max(self.hi, other.hi), c)._canonical()

    def wide_mul(self, other: "PerfSeries") -> "PerfSeries":
        """Product on the summed window [lo1+lo2, hi1+hi2): exact, no drops."""
        if self.ring != other.ring:
            from .errors import WindowMismatch
            raise WindowMismatch("series over different rings")
        K = max(self.K, other.K)
        a, b = self._at_K(K), other._at_K(K)
        if len(a) > len(b):
            a, b = b, a
        c: dict[int, FqElem] = {}
        for n1, v1 in a.items():
            for n2, v2 in b.items():
                n = n1 + n2
                w = c.get(n)
                prod = v1 * v2
                c[n] = prod if w is None else w + prod
        return PerfSeries(self.ring, K, self.lo + other.lo,
                          self.hi + other.hi, c)._canonical()

    def wide_pow(self, e: int) -> "PerfSeries":
        if e < 0:
            raise ValueError("wide_pow needs a nonnegative exponent")
        if e == 0:
            return self.ring.one(window=(min(self.lo, 0), max(self.hi, 1)))
        acc = None
        base = self
        while e:
            if e & 1:
                acc = base if acc is None else acc.wide_mul(base)
            e >>= 1
            if e:
                base = base.wide_mul(base)
        return acc

    def __neg__(self) -> "PerfSeries":
        return PerfSeries(self.ring, self.K, self.lo, self.hi,
                          {n: -v for n, v in self.c.items()})

    def __sub__(self, other: "PerfSeries") -> "PerfSeries":
        return self + (-other)

    def __mul__(self, other: "PerfSeries") -> "PerfSeries":
        K, lo, hi = self._common(other)
        a, b = self._at_K(K), other._at_K(K)
        if len(a) > len(b):
            a, b = b, a
        c: dict[int, FqElem] = {}
        for n1, v1 in a.items():
            for n2, v2 in b.items():
                n = n1 + n2
                w = c.get(n)
                prod = v1 * v2
                c[n] = prod if w is None else w + prod
        return PerfSeries(self.ring, K, lo, hi, c)._canonical()

    def scalar_mul(self, s: FqElem) -> "PerfSeries":
        return PerfSeries(self.ring, self.K, self.lo, self.hi,
                          {n: v * s for n, v in self.c.items()})._canonical()

    def monomial_shift(self, e, coeff=None) -> "PerfSeries":
        """Multiply by coeff * t^e without window truncation of the shift."""
        e = Fraction(e)
        K = self.K
        while (e * self.ring.p ** K).denominator != 1:
            K += 1
        step = int(e * self.ring.p ** K)
        c = {n + step: v for n, v in self._at_K(K).items()}
        if coeff is not None:
            c = {n: v * coeff for n, v in c.items()}
        return PerfSeries(self.ring, K, self.lo + e, self.hi + e, c)._canonical()

    def inverse(self) -> "PerfSeries":
        """Geometric-series inverse; leading coefficient must be nonzero.

        The result window is [-v, -v + width) where v is the valuation of the
        leading term and width the operand's window width, so that
        x * inverse(x) == 1 holds through exponent (width - v) + v = width.
        """
        from .errors import NotAUnit
        if not self.c:
            raise NotAUnit("inverse of zero series")
        v = self.val_exponent()
        lead = self.coeff(v)
        width = self.hi - self.lo
        wlo, whi = -v, -v + width
        # y = lead^-1 t^-v;  r = 1 - x*y has positive valuation
        y = self.ring.series({-v: lead.inverse()}, window=(wlo, whi))
        one = self.ring.one(window=(0, width))
        xs = self.with_window(self.lo, self.lo + width)
        r = one - (xs * y).with_window(0, width)
        acc = one
        term = r
        while not term.is_zero():
            acc = acc + term
            term = (term * r).with_window(0, width)
        return (y * acc.with_window(0, width)).with_window(wlo, whi)

    def __pow__(self, n: int) -> "PerfSeries":
        if n < 0:
            return self.inverse() ** (-n)
        base = self
        acc = None
        while n:
            if n & 1:
                acc = base if acc is None else acc * base
            n >>= 1
            if n:
                base = base * base
        if acc is None:
            w = self._canonical()
            return self.ring.one(window=(w.lo, w.hi))
        return acc

    # -- Frobenius and valuation ---------------------------------------------

    def frobenius(self, k: int = 1) -> "PerfSeries":
        """Exponents scaled by p^k and coefficients raised to p^k (exact)."""
        from .errors import DenominatorOverflow
        if k == 0:
            return self
        p = self.ring.p
        if k > 0:
            K2 = max(self.K - k, 0)
            f = p ** (k - (self.K - K2))
            c = {n * f: v.frobenius(k) for n, v in self.c.items()}
            return PerfSeries(self.ring, K2, self.lo * p ** k, self.hi * p ** k,
                              c)._canonical()
        j = -k
        K2 = self.K + j
        if K2 > self.ring.kmax:
            raise DenominatorOverflow(
                f"denominator exponent {K2} exceeds bound {self.ring.kmax}")
        c = {n: v.frobenius(k) for n, v in self.c.items()}
        return PerfSeries(self.ring, K2, self.lo / p ** j, self.hi / p ** j,
                          c)._canonical()

    def valuation(self) -> Valuation:
        """Scaled valuation; flags zero-at-precision with v = hi * scale."""
        v = self.val_exponent()
        if v is None:
            return Valuation(self.hi * self.ring.scale, zero=True)
        return Valuation(v * self.ring.scale)

    def __repr__(self):
        if not self.c:
            return f"0[{self.lo},{self.hi})"
        s = self.ring.p ** self.K
        terms = []
        for n in sorted(self.c):
            e = Fraction(n, s)
            terms.append(f"({self.c[n]})*{self.ring.var}^{e}")
        return " + ".join(terms) + f" [{self.lo},{self.hi})"


# ---------------------------------------------------------------------------
# Module-level operations (spec surface)
# ---------------------------------------------------------------------------

def series_arith(x: PerfSeries, y: PerfSeries, op: str) -> PerfSeries:
    """Binary arithmetic with shared-ring checking; op in {add, mul, inv}.

    For ``inv`` the second operand is ignored and x must have a nonzero
    leading term.
    """
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inverse()
    raise ValueError(f"unknown op {op!r}")


def frobenius(x: PerfSeries, k: int) -> PerfSeries:
    return x.frobenius(k)


def tnorm(x: PerfSeries) -> Valuation:
    return x.valuation()


# ---------------------------------------------------------------------------
# Toric series: Laurent polynomials in d variables over a PerfSeries ring
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ToricRing:
    """d toric variables with p-power-denominator exponents over a base ring.

    Coefficients are PerfSeries over ``base`` (the pi-variable ring).  The
    per-variable exponent window is [lo, hi) in each coordinate; radii are
    fixed to 1 so the norm of an element is the max coefficient norm.
    """

    base: SeriesRing
    d: int
    lo: Fraction
    hi: Fraction
    ktmax: int = 16

    def series(self, terms, Kt: int = 0) -> "ToricSeries":
        kk = Kt
        p = self.base.p
        norm = {}
        for ev, c in dict(terms).items():
            ev = tuple(Fraction(e) for e in ev)
            for e in ev:
                den = e.denominator
                k = 0
                while den > 1:
                    den //= p
                    k += 1
                kk = max(kk, k)
        for ev, c in dict(terms).items():
            ev = tuple(Fraction(e) for e in ev)
            key = tuple(int(e * p ** kk) for e in ev)
            if not c.is_zero():
                norm[key] = c
        return ToricSeries(self, kk, norm)._canonical()

    def zero(self) -> "ToricSeries":
        return ToricSeries(self, 0, {})

    def one(self, window=(0, 1)) -> "ToricSeries":
        return self.series({(0,) * self.d: self.base.one(window=window)})


class ToricSeries:
    """Finite-support map from exponent vectors to PerfSeries coefficients."""

    __slots__ = ("ring", "Kt", "c")

    def __init__(self, ring: ToricRing, Kt: int, c: dict[tuple[int, ...], PerfSeries]):
        self.ring = ring
        self.Kt = Kt
        self.c = c

    def _canonical(self) -> "ToricSeries":
        c = {k: v for k, v in self.c.items() if not v.is_zero()}
        Kt = self.Kt
        p = self.ring.base.p
        while Kt > 0 and all(all(n % p == 0 for n in k) for k in c):
            c = {tuple(n // p for n in k): v for k, v in c.items()}
            Kt -= 1
        s = p ** Kt
        c = {k: v for k, v in c.items()
             if all(self.ring.lo * s <= n < self.ring.hi * s for n in k)}
        return ToricSeries(self.ring, Kt, c)

    def _at_K(self, Kt: int):
        f = self.ring.base.p ** (Kt - self.Kt)
        return {tuple(n * f for n in k): v for k, v in self.c.items()}

    def is_zero(self) -> bool:
        return not self.c

    def support(self) -> list[tuple[Fraction, ...]]:
        s = self.ring.base.p ** self.Kt
        return sorted(tuple(Fraction(n, s) for n in k) for k in self.c)

    def coeff(self, ev) -> PerfSeries:
        ev = tuple(Fraction(e) for e in ev)
        s = self.ring.base.p ** self.Kt
        key = tuple(e * s for e in ev)
        if any(x.denominator != 1 for x in key):
            return self.ring.base.zero()
        return self.c.get(tuple(int(x) for x in key), self.ring.base.zero())

    def __eq__(self, other):
        if not isinstance(other, ToricSeries):
            return NotImplemented
        a, b = self._canonical(), other._canonical()
        return a.ring == b.ring and a.Kt == b.Kt and a.c == b.c

    def __add__(self, other: "ToricSeries") -> "ToricSeries":
        Kt = max(self.Kt, other.Kt)
        c = self._at_K(Kt)
        for k, v in other._at_K(Kt).items():
            c[k] = v if k not in c else c[k] + v
        return ToricSeries(self.ring, Kt, c)._canonical()

    def __neg__(self) -> "ToricSeries":
        return ToricSeries(self.ring, self.Kt, {k: -v for k, v in self.c.items()})

    def __sub__(self, other: "ToricSeries") -> "ToricSeries":
        return self + (-other)

    def __mul__(self, other: "ToricSeries") -> "ToricSeries":
        Kt = max(self.Kt, other.Kt)
        a, b = self._at_K(Kt), other._at_K(Kt)
        if len(a) > len(b):
            a, b = b, a
        c: dict[tuple[int, ...], PerfSeries] = {}
        for k1, v1 in a.items():
            for k2, v2 in b.items():
                k = tuple(x + y for x, y in zip(k1, k2))
                prod = v1 * v2
                c[k] = prod if k not in c else c[k] + prod
        return ToricSeries(self.ring, Kt, c)._canonical()

    def coeff_map(self, f) -> "ToricSeries":
        """Apply f to every coefficient (used for Frobenius and Gamma actions)."""
        return ToricSeries(self.ring, self.Kt,
                           {k: f(k, v) for k, v in self.c.items()})._canonical()

    def frobenius(self, k: int = 1) -> "ToricSeries":
        p = self.ring.base.p
        if k >= 0:
            Kt2 = max(self.Kt - k, 0)
            f = p ** (k - (self.Kt - Kt2))
            c = {tuple(n * f for n in key): v.frobenius(k) for key, v in self.c.items()}
            return ToricSeries(self.ring, Kt2, c)._canonical()
        j = -k
        Kt2 = self.Kt + j
        if Kt2 > self.ring.ktmax:
            from .errors import DenominatorOverflow
            raise DenominatorOverflow("toric denominator bound exceeded")
        c = {key: v.frobenius(k) for key, v in self.c.items()}
        return ToricSeries(self.ring, Kt2, c)._canonical()

    def valuation(self) -> Valuation:
        """Min coefficient valuation over all terms (radii fixed to 1)."""
        if not self.c:
            return Valuation(self.ring.base.scale * 0 + Fraction(10 ** 9), zero=True)
        vals = [v.valuation() for v in self.c.values()]
        return min(vals, key=lambda w: w.v)

    def __repr__(self):
        if not self.c:
            return "0(toric)"
        s = self.ring.base.p ** self.Kt
        parts = []
        for k in sorted(self.c):
            ev = tuple(Fraction(n, s) for n in k)
            parts.append(f"[{self.c[k]!r}]*T^{ev}")
        return " + ".join(parts)

"""Truncated generalized Witt vectors in Teichmueller-series form.

An element is stored as a finite sum  sum_n p^n [y_n]  with y_n a PerfSeries
over a perfect coefficient ring and n ranging over a digit window
[n_lo, n_lo + plen).  Negative n_lo models integral Robba-slice truncations
with the same arithmetic core.

Addition carries are driven by the universal law

    [x] + [y] = [x + y] + sum_{k>=1} p^k [P_k(x, y)],

where P_k is a polynomial in x^(1/p^k), y^(1/p^k) over F_p, homogeneous of
total degree 1.  The P_k are obtained from the integer Witt addition
polynomials S_k (computed once per (p, L) by exact ghost expansion over Z and
cached): P_k = (S_k mod p)^(1/p^k), with the root taken termwise in the
perfect coefficient ring.

The ghost map is the independent arithmetic oracle.  On elements with
constant digits it lands in Z_q/p^L; the n-th ghost component is computed
from Teichmueller-lifted Witt coordinates and is canonical modulo p^(n+1)
(the truncation cannot pin it down further).  The digitwise strict lift
``strict_value`` realizes the ring isomorphism W_L(F_q) = Z_q/p^L and is an
exact oracle mod p^L.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (DenominatorOverflow, NoConvergence, NonConstantCoefficients,
                     WindowMismatch)
from .perfbase import PerfSeries, SeriesRing
from .zq import Zq, ZqElem, ZqRing


# ---------------------------------------------------------------------------
# Universal addition laws
# ---------------------------------------------------------------------------

def _conv(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_pow(c: list[int], e: int) -> list[int]:
    acc = None
    base = c
    while e:
        if e & 1:
            acc = base if acc is None else _conv(acc, base)
        e >>= 1
        if e:
            base = _conv(base, base)
    return acc if acc is not None else [1]


def _integer_addition_polys(p: int, L: int) -> list[list[int]]:
    """Witt addition polynomials S_0..S_{L-1} for [x] + [y] over Z.

    S_n is homogeneous of degree p^n and is returned as the coefficient list
    of x^i y^(p^n - i) indexed by i.  Defining property (ghost expansion):
        sum_{m<=n} p^m S_m^(p^(n-m)) = x^(p^n) + y^(p^n).
    """
    polys: list[list[int]] = [[1, 1]]  # S_0 = y + x
    for n in range(1, L):
        deg = p ** n
        acc = [0] * (deg + 1)
        acc[0] += 1      # y^(p^n)
        acc[deg] += 1    # x^(p^n)
        for m in range(n):
            power = _poly_pow(polys[m], p ** (n - m))
            pm = p ** m
            for i, c in enumerate(power):
                acc[i] -= pm * c
        pn = p ** n
        for i, c in enumerate(acc):
            if c % pn:
                raise AssertionError("ghost expansion not divisible by p^n")
            acc[i] = c // pn
        polys.append(acc)
    return polys


@dataclass(frozen=True)
class UniversalLaw:
    """Mod-p carry polynomials for a fixed (p, L).

    ``carries[k]`` is a sparse dict {i: c} representing
    sum_i c * x^(i/p^k) y^((p^k - i)/p^k) after the termwise p^k-th root;
    evaluation raises exact roots via inverse Frobenius.
    """

    p: int
    L: int
    carries: tuple[dict[int, int], ...]

    def eval_carry(self, k: int, x: PerfSeries, y: PerfSeries) -> PerfSeries:
        """P_k(x, y) evaluated in the perfect coefficient ring."""
        ring = x.ring
        field = ring.field
        deg = self.p ** k
        sparse = self.carries[k]
        acc = None
        xpow: dict[int, PerfSeries] = {}
        ypow: dict[int, PerfSeries] = {}

        # Digits are exact finite data: evaluate on widened windows so that
        # no term is dropped before the p^k-th root is taken.
        def power(base: PerfSeries, cache: dict[int, PerfSeries], e: int) -> PerfSeries:
            if e not in cache:
                cache[e] = base.wide_pow(e)
            return cache[e]

        for i, c in sparse.items():
            term = None
            if i:
                term = power(x, xpow, i)
            if deg - i:
                yterm = power(y, ypow, deg - i)
                term = yterm if term is None else term.wide_mul(yterm)
            term = term.scalar_mul(field(c))
            acc = term if acc is None else acc.hull_add(term)
        if acc is None:
            lo, hi = min(x.lo, y.lo), max(x.hi, y.hi)
            return ring.zero(window=(lo, hi))
        return acc.frobenius(-k)


_LAW_CACHE: dict[tuple[int, int], UniversalLaw] = {}


def universal_laws(p: int, L: int) -> UniversalLaw:
    """Carry polynomials for (p, L), cached in memory and optionally on disk.

    Set PERFPRISM_CACHE to a directory to persist the integer expansion
    across processes.
    """
    key = (p, L)
    if key in _LAW_CACHE:
        return _LAW_CACHE[key]
    cache_dir = os.environ.get("PERFPRISM_CACHE")
    path = None
    if cache_dir:
        path = os.path.join(cache_dir, f"witt-law-p{p}-L{L}.json")
        if os.path.exists(path):
            with open(path) as fh:
                data = json.load(fh)
            law = UniversalLaw(p, L, tuple(
                {int(i): c for i, c in d.items()} for d in data["carries"]))
            _LAW_CACHE[key] = law
            return law
    polys = _integer_addition_polys(p, L)
    carries = []
    for n, poly in enumerate(polys):
        sparse = {i: c % p for i, c in enumerate(poly) if c % p}
        if n == 0:
            sparse = {}  # degree-0 carry is the plain sum, handled directly
        carries.append(sparse)
    law = UniversalLaw(p, L, tuple(carries))
    _LAW_CACHE[key] = law
    if path:
        os.makedirs(cache_dir, exist_ok=True)
        with open(path, "w") as fh:
            json.dump({"p": p, "L": L,
                       "carries": [{str(i): c for i, c in d.items()} for d in law.carries]},
                      fh)
    return law


# ---------------------------------------------------------------------------
# WittTrunc
# ---------------------------------------------------------------------------

class WittTrunc:
    """sum_{n in [n_lo, n_lo+plen)} p^n [y_n] with PerfSeries digits."""

    __slots__ = ("ring", "n_lo", "plen", "digits")

    def __init__(self, ring: SeriesRing, n_lo: int, plen: int,
                 digits: dict[int, PerfSeries]):
        self.ring = ring
        self.n_lo = n_lo
        self.plen = plen
        self.digits = {n: d for n, d in digits.items() if not d.is_zero()}

    @property
    def n_hi(self) -> int:
        return self.n_lo + self.plen

    def digit(self, n: int) -> PerfSeries:
        d = self.digits.get(n)
        if d is not None:
            return d
        return self._zero_component()

    def _zero_component(self) -> PerfSeries:
        for d in self.digits.values():
            return d.ring.zero(window=(d.lo, d.hi))
        return self.ring.zero()

    def is_zero(self) -> bool:
        return not self.digits

    def __eq__(self, other):
        if not isinstance(other, WittTrunc):
            return NotImplemented
        return self.ring == other.ring and self.digits == other.digits

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.digits.items(), key=lambda t: t[0]))))

    def _require_compatible(self, other: "WittTrunc"):
        if self.ring != other.ring:
            raise WindowMismatch("Witt operands over different coefficient rings")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(ring: SeriesRing, n_lo: int = 0, plen: int = 4) -> "WittTrunc":
        return WittTrunc(ring, n_lo, plen, {})

    @staticmethod
    def from_teichmuller(x: PerfSeries, plen: int = 4, n_lo: int = 0) -> "WittTrunc":
        return WittTrunc(x.ring, n_lo, plen, {0: x} if not x.is_zero() else {})

    @staticmethod
    def integer(ring: SeriesRing, value: int, plen: int = 4,
                window=(0, 1)) -> "WittTrunc":
        """The image of an ordinary integer, built by repeated addition.

        Integer digits are constants and hence exactly known; their windows
        are widened back to the requested target after the carry cascade.
        """
        one = WittTrunc.from_teichmuller(ring.one(window=window), plen=plen)
        if value == 0:
            return WittTrunc.zero(ring, 0, plen)
        acc = WittTrunc.zero(ring, 0, plen)
        neg = value < 0
        for _ in range(abs(value)):
            acc = witt_add(acc, one)
        if neg:
            acc = witt_neg(acc)
        return acc.assert_component_windows(window[0], window[1])

    def assert_component_windows(self, lo, hi) -> "WittTrunc":
        """Declare every digit faithful on [lo, hi).

        Only sound when the caller knows the digits exactly (constants,
        monomials, freshly constructed data); windows are metadata and this
        asserts knowledge rather than computing it.
        """
        digits = {n: d.with_window(lo, hi) for n, d in self.digits.items()}
        return WittTrunc(self.ring, self.n_lo, self.plen, digits)

    def p_shift(self, j: int) -> "WittTrunc":
        """Multiply by p^j: digit indices shift by j, truncating at the top."""
        digits = {n + j: d for n, d in self.digits.items() if n + j < self.n_hi}
        return WittTrunc(self.ring, self.n_lo, self.plen, digits)

    def shift_down(self) -> "WittTrunc":
        """(x - [x_0]) / p at the digit level: digit n+1 becomes digit n."""
        digits = {n - 1: d for n, d in self.digits.items() if n >= self.n_lo + 1}
        return WittTrunc(self.ring, self.n_lo, self.plen, digits)

    def truncate_digits(self, n_lo: int, plen: int) -> "WittTrunc":
        digits = {n: d for n, d in self.digits.items() if n_lo <= n < n_lo + plen}
        return WittTrunc(self.ring, n_lo, plen, digits)

    def __repr__(self):
        if not self.digits:
            return f"W0[{self.n_lo}:{self.n_hi}]"
        parts = [f"p^{n}[{self.digits[n]!r}]" for n in sorted(self.digits)]
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Arithmetic via carry cascade
# ---------------------------------------------------------------------------

def _cascade(ring: SeriesRing, n_lo: int, n_hi: int,
             buckets: dict[int, list[PerfSeries]], law: UniversalLaw) -> WittTrunc:
    """Combine Teichmueller terms level by level using the universal law."""
    for n in sorted(list(buckets)):
        if n < n_lo or n >= n_hi:
            buckets.pop(n, None)
    n = n_lo
    while n < n_hi:
        bucket = buckets.get(n, [])
        while len(bucket) >= 2:
            x = bucket.pop()
            y = bucket.pop()
            if x.is_zero():
                bucket.append(y)
                continue
            if y.is_zero():
                bucket.append(x)
                continue
            s = x.hull_add(y)
            bucket.append(s)
            for k in range(1, n_hi - n):
                carry = law.eval_carry(k, x, y)
                if not carry.is_zero():
                    buckets.setdefault(n + k, []).append(carry)
        if bucket and bucket[0].is_zero():
            bucket.clear()
        n += 1
    digits = {}
    for n, bucket in buckets.items():
        if bucket and not bucket[0].is_zero() and n_lo <= n < n_hi:
            digits[n] = bucket[0]
    return WittTrunc(ring, n_lo, n_hi - n_lo, digits)


def _law_for(x: WittTrunc, span: int) -> UniversalLaw:
    return universal_laws(x.ring.p, max(span, 1))


def witt_add(x: WittTrunc, y: WittTrunc) -> WittTrunc:
    x._require_compatible(y)
    n_lo = max(x.n_lo, y.n_lo)
    n_hi = min(x.n_hi, y.n_hi)
    if n_hi <= n_lo:
        raise WindowMismatch("empty digit window intersection")
    law = _law_for(x, n_hi - n_lo)
    buckets: dict[int, list[PerfSeries]] = {}
    for n, d in x.digits.items():
        if n_lo <= n < n_hi:
            buckets.setdefault(n, []).append(d)
    for n, d in y.digits.items():
        if n_lo <= n < n_hi:
            buckets.setdefault(n, []).append(d)
    return _cascade(x.ring, n_lo, n_hi, buckets, law)


def witt_mul(x: WittTrunc, y: WittTrunc) -> WittTrunc:
    x._require_compatible(y)
    n_lo = x.n_lo + y.n_lo
    n_hi = min(x.n_hi + y.n_lo, y.n_hi + x.n_lo)
    law = _law_for(x, n_hi - n_lo)
    buckets: dict[int, list[PerfSeries]] = {}
    for m, xm in x.digits.items():
        for n, yn in y.digits.items():
            if n_lo <= m + n < n_hi:
                buckets.setdefault(m + n, []).append(xm.wide_mul(yn))
    return _cascade(x.ring, n_lo, n_hi, buckets, law)


@lru_cache(maxsize=None)
def _minus_one_digits(ring: SeriesRing, plen: int, lo: Fraction, hi: Fraction):
    """-1 as a Witt vector: [-1] for odd p; sum_n p^n [1] for p = 2."""
    one = ring.one(window=(lo, hi))
    if ring.p != 2:
        return ((0, one.scalar_mul(-ring.field.one)),)
    return tuple((n, one) for n in range(plen))


def witt_neg(x: WittTrunc) -> WittTrunc:
    if x.is_zero():
        return x
    comp = next(iter(x.digits.values()))
    digits = dict(_minus_one_digits(x.ring, x.plen + max(0, -x.n_lo),
                                    comp.lo, comp.hi))
    minus_one = WittTrunc(x.ring, 0, x.plen + max(0, -x.n_lo), digits)
    return witt_mul(minus_one, x).truncate_digits(x.n_lo, x.plen)


def witt_sub(x: WittTrunc, y: WittTrunc) -> WittTrunc:
    return witt_add(x, witt_neg(y))


def witt_arith(x: WittTrunc, y: WittTrunc, op: str) -> WittTrunc:
    if op == "add":
        return witt_add(x, y)
    if op == "mul":
        return witt_mul(x, y)
    if op == "neg":
        return witt_neg(x)
    raise ValueError(f"unknown op {op!r}")


def teichmuller(x: PerfSeries, plen: int = 4) -> WittTrunc:
    return WittTrunc.from_teichmuller(x, plen=plen)


def witt_frobenius(x: WittTrunc, k: int) -> WittTrunc:
    """Digitwise p^k-power Frobenius; bijective on representable data."""
    digits = {n: d.frobenius(k) for n, d in x.digits.items()}
    return WittTrunc(x.ring, x.n_lo, x.plen, digits)


def witt_inverse(u: WittTrunc, plen: int | None = None) -> WittTrunc:
    """Inverse of a unit (digit 0 must be a unit series) by Newton iteration."""
    from .errors import NotAUnit
    plen = plen if plen is not None else u.plen
    if u.n_lo > 0 or 0 not in u.digits:
        raise NotAUnit("digit 0 missing; not a unit of the integral ring")
    d0 = u.digits[0]
    x = WittTrunc.from_teichmuller(d0.inverse(), plen=plen)
    two = WittTrunc.integer(u.ring, 2, plen=plen, window=(d0.lo, d0.hi))
    steps = max(1, plen).bit_length() + 1
    for _ in range(steps):
        x = witt_mul(x, witt_sub(two, witt_mul(u, x)))
    return x


# ---------------------------------------------------------------------------
# Ghost oracle
# ---------------------------------------------------------------------------

def _constant_digit(d: PerfSeries):
    if not d.is_constant():
        raise NonConstantCoefficients(
            "ghost components require constant coefficients")
    return d.constant_coeff()


def ghost(x: WittTrunc, L: int | None = None) -> list[ZqElem]:
    """Ghost vector (w^(0), ..., w^(L-1)) in Z_q/p^L for constant digits.

    w^(n) = sum_{m<=n} p^m a_m^(p^(n-m)) with a_m the Teichmueller lift of
    the m-th Witt coordinate y_m^(p^m).  Component n is canonical modulo
    p^(n+1); use :func:`ghost_equal` for truncation-aware comparison and
    :func:`strict_value` for the exact mod-p^L isomorphism.
    """
    if x.n_lo < 0:
        raise NonConstantCoefficients("ghost requires a nonnegative digit window")
    L = L if L is not None else x.plen
    ring = Zq(x.ring.p, x.ring.a, L)
    coords: dict[int, ZqElem] = {}
    for n, d in x.digits.items():
        c = _constant_digit(d)
        coords[n] = ring.teichmuller(c ** (x.ring.p ** n))
    out = []
    for n in range(L):
        acc = ring.zero
        for m, am in coords.items():
            if m <= n:
                acc = acc + ring(x.ring.p) ** m * am ** (x.ring.p ** (n - m))
        out.append(acc)
    return out


def ghost_equal(g1: list[ZqElem], g2: list[ZqElem]) -> bool:
    """Componentwise comparison at the canonical modulus p^min(n+1, L)."""
    if len(g1) != len(g2):
        return False
    for n, (a, b) in enumerate(zip(g1, g2)):
        if (a - b).vp() < min(n + 1, a.ring.L):
            return False
    return True


def strict_value(x: WittTrunc, L: int | None = None) -> ZqElem:
    """The strict-ring isomorphism W_L(F_q) -> Z_q/p^L: sum p^n tau(y_n).

    This is an exact ring isomorphism mod p^L and serves as the
    full-strength arithmetic oracle for constant-digit elements.
    """
    if x.n_lo < 0:
        raise NonConstantCoefficients("strict value requires nonnegative digits")
    L = L if L is not None else x.plen
    ring = Zq(x.ring.p, x.ring.a, L)
    acc = ring.zero
    for n, d in x.digits.items():
        c = _constant_digit(d)
        acc = acc + ring(x.ring.p) ** n * ring.teichmuller(c)
    return acc


def witt_coordinates(x: WittTrunc) -> list[PerfSeries]:
    """Witt coordinates (a_n): a_n = y_n^(p^n) for perfect coefficients."""
    out = []
    for n in range(x.n_lo, x.n_hi):
        out.append(x.digit(n).frobenius(n))
    return out


def teich_digits_from_coordinates(ring: SeriesRing, coords: list[PerfSeries],
                                  n_lo: int = 0) -> WittTrunc:
    """Inverse conversion: digit y_n = a_n^(p^-n)."""
    digits = {}
    for i, a in enumerate(coords):
        n = n_lo + i
        if not a.is_zero():
            digits[n] = a.frobenius(-n) if n else a
    return WittTrunc(ring, n_lo, len(coords), digits)


# ---------------------------------------------------------------------------
# Newton projector iteration
# ---------------------------------------------------------------------------

def projector_lift(V, tol: Fraction, norm, ring_ops, max_iter: int = 64):
    """Quadratically convergent idempotent correction W <- 3W^2 - 2W^3.

    ``V`` is a square matrix (list of lists) over any commutative coefficient
    object; ``norm`` maps a matrix to a comparable nonnegative value (0 only
    for the zero matrix at precision); ``ring_ops`` provides mat_mul/mat_sub/
    scalar_int so the iteration stays representation-agnostic.

    Returns (W, defect_trace) with norm(W^2 - W) <= tol; the defect sequence
    is strictly decreasing, else NoConvergence is raised after one step.
    """
    mat_mul, mat_sub, scalar_int = ring_ops

    def defect(W):
        return norm(mat_sub(mat_mul(W, W), W))

    W = V
    d = defect(W)
    trace = [d]
    if d <= tol:
        return W, trace
    for _ in range(max_iter):
        W2 = mat_mul(W, W)
        W3 = mat_mul(W2, W)
        W = mat_sub(scalar_int(3, W2), scalar_int(2, W3))
        d_new = defect(W)
        trace.append(d_new)
        if d_new <= tol:
            return W, trace
        if not d_new < d:
            raise NoConvergence(
                f"projector defect did not decrease: {d} -> {d_new}")
        d = d_new
    raise NoConvergence("projector iteration exceeded max_iter")

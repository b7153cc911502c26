"""Gauss norms, primitive division, and the concrete tilting pair.

The implemented untilt is A = Z_q[p^(1/p^oo)] truncated at p-adic precision
M and denominator exponent K, realized as (Z_q/p^M)[u]/(u^(p^K) - p).  Its
tilt is the perfect series ring F_q[[t^(1/p^oo)]] at truncation, with the
kernel of theta generated by the primitive element z = p - [t].

theta is evaluated per Teichmueller term by the root trick

    theta([y]) = lim_k (naive(y^(1/p^k)))^(p^k),

where ``naive`` substitutes u^(e p^K) for t^e and Teichmueller-lifts the
coefficients.  Two consecutive guard levels must agree exactly at target
precision; this is the acceptance certificate for the computed value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (GuardInsufficient, InputError, InsufficientPrecision,
                     NotPrimitive, PrecisionExhausted)
from .perfbase import FqElem, PerfSeries, SeriesRing, Valuation
from .witt import (WittTrunc, teichmuller, witt_add, witt_inverse, witt_mul,
                   witt_neg, witt_sub)
from .zq import Zq, ZqElem, ZqRing


# ---------------------------------------------------------------------------
# Gauss norms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussValue:
    """Exact log-valuation of a Gauss norm: the norm itself is p^(-logval).

    ``hidden`` is set when a term beyond some component window could exceed
    the computed maximum, i.e. the value is only certified on the stored
    representation.
    """

    logval: Fraction
    zero: bool = False
    hidden: bool = False

    def norm_exponent(self) -> Fraction:
        return -self.logval


@dataclass(frozen=True)
class GaussNorm:
    """The power-multiplicative norm weighting digit n by p^(-n) and the
    component norm by the radius exponent r > 0."""

    r: Fraction

    def __call__(self, x: WittTrunc) -> GaussValue:
        return gauss_norm(x, self.r)


def gauss_norm(x: WittTrunc, r) -> GaussValue:
    """max_n p^(-n) * alpha(y_n)^r as an exact rational log-valuation.

    Returns logval = min_n (n + r * v(y_n)); smaller logval means larger
    norm.  Flags ``hidden`` when a window edge could hide a larger term.
    """
    r = Fraction(r)
    if r <= 0:
        raise InputError("Gauss norm radius must be positive")
    scale = x.ring.scale
    best = None
    for n, d in x.digits.items():
        v = d.valuation()
        cand = n + r * v.v
        if best is None or cand < best:
            best = cand
    hidden = False
    win_his = [d.hi for d in x.digits.values()]
    default_hi = min(win_his) if win_his else None
    for n in range(x.n_lo, x.n_hi):
        d = x.digits.get(n)
        hi = d.hi if d is not None else default_hi
        if hi is None:
            continue
        edge = n + r * hi * scale
        if best is not None and edge < best:
            hidden = True
    if best is None:
        hi = default_hi if default_hi is not None else Fraction(0)
        return GaussValue(x.n_hi + r * hi * scale, zero=True, hidden=hidden)
    return GaussValue(best, hidden=hidden)


# ---------------------------------------------------------------------------
# Fontaine-primitive elements and division
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimitiveWitness:
    primitive: bool
    v_digit0: Valuation
    v_digit1: Valuation


def is_primitive(z: WittTrunc) -> PrimitiveWitness:
    """z = sum p^n [z_n] is primitive iff v(z_0) > 0 and z_1 is a unit.

    Digit 1 must be representable; all digits must lie in the plus ring
    (nonnegative component valuations).
    """
    if not (z.n_lo <= 0 and 1 < z.n_hi):
        raise InsufficientPrecision("digits 0 and 1 must be representable")
    for n, d in z.digits.items():
        v = d.val_exponent()
        if v is not None and v < 0:
            raise InputError(f"digit {n} leaves the plus ring (valuation {v})")
    v0 = z.digit(0).valuation()
    v1 = z.digit(1).valuation()
    ok = (v0.zero or v0.v > 0) and (not v1.zero and v1.v == 0)
    return PrimitiveWitness(ok, v0, v1)


def _min_component_val(x: WittTrunc) -> Fraction | None:
    vals = [d.valuation() for d in x.digits.values()]
    vals = [v.v for v in vals if not v.zero]
    return min(vals) if vals else None


@dataclass(frozen=True)
class DivisionCertificate:
    mode: str
    iterations: int
    v_y0: Valuation
    mode_b_digit1_ok: bool | None = None
    mode_b_tail_ok: bool | None = None


def primitive_divide(x: WittTrunc, z: WittTrunc, mode: str = "a",
                     eps_val: Fraction | None = None, m: int | None = None,
                     max_iter: int | None = None):
    """Division with primitive remainder: x = w*z + y at the truncation.

    Mode "a": the remainder satisfies alpha(y_0) >= alpha(y_n) for n > 0.
    Mode "b" additionally runs N + m extra steps, where N is chosen so that
    alpha(z_0)^N * sup_n alpha(y_{0,n}) < p^(-eps_val), and certifies

        v(y_1) >= min(eps_val, (p^-1 + ... + p^-m) v(z_0) + v(y_0))
        v(y_n) >= min(eps_val, v(y_0))

    at the t-adic point.  Iterates are truncated to the common component
    window, so the identity x = w*z + y holds exactly on that truncation.
    """
    wit = is_primitive(z)
    if not wit.primitive:
        raise NotPrimitive(f"divisor is not primitive: {wit}")
    if mode not in ("a", "b"):
        raise InputError("mode must be 'a' or 'b'")
    if mode == "b" and (eps_val is None or m is None):
        raise InputError("mode b needs eps_val and m")

    ring = x.ring
    p = ring.p
    # target component window: intersection of the operands' component hulls
    los = [d.lo for d in list(x.digits.values()) + list(z.digits.values())]
    his = [d.hi for d in list(x.digits.values()) + list(z.digits.values())]
    w_lo, w_hi = (max(min(los), Fraction(0)) if los else Fraction(0)), min(his)
    n_hi = min(x.n_hi, z.n_hi)

    def trunc(t: WittTrunc) -> WittTrunc:
        digits = {}
        for n, d in t.digits.items():
            if n < n_hi:
                dd = d.with_window(w_lo, w_hi)
                if not dd.is_zero():
                    digits[n] = dd
        return WittTrunc(ring, t.n_lo, n_hi - t.n_lo, digits)

    v0 = wit.v_digit0.v * 1  # scaled valuation of z_0; > 0
    u = z.shift_down()
    u_inv = witt_inverse(u, plen=n_hi)

    # iteration budget: each failed step raises the sup-valuation by v(z_0)
    sup0 = _min_component_val(x)
    span = (w_hi * ring.scale) - (sup0 if sup0 is not None else Fraction(0))
    budget = int(span / v0) + n_hi + 4

    steps_b = 0
    if mode == "b":
        start = _min_component_val(x) or Fraction(0)
        N = 0
        while N * v0 + start < eps_val:
            N += 1
        steps_b = N + m
        budget += steps_b

    if max_iter is not None:
        budget = max_iter

    def mode_a_ok(y: WittTrunc) -> bool:
        if y.is_zero():
            return True
        vy0 = y.digit(0).valuation()
        if vy0.zero:
            return False
        return all(y.digit(n).valuation().v >= vy0.v or y.digit(n).valuation().zero
                   for n in range(1, y.n_hi))

    w = WittTrunc.zero(ring, 0, n_hi)
    y = trunc(x)
    l = 0
    while l <= budget:
        if mode_a_ok(y) and (mode == "a" or l >= steps_b):
            cert = _certify(y, v0, mode, eps_val, m, l, ring)
            return trunc(w), y, cert
        w = trunc(witt_add(w, witt_mul(u_inv, y.shift_down())))
        y = trunc(witt_sub(x, witt_mul(w, z)))
        l += 1
    raise PrecisionExhausted(
        f"remainder condition not certified within {budget} iterations")


def _certify(y: WittTrunc, v0: Fraction, mode: str, eps_val, m, l, ring):
    vy0 = y.digit(0).valuation()
    if mode == "a":
        return DivisionCertificate("a", l, vy0)
    geom = sum(Fraction(1, ring.p ** i) for i in range(1, m + 1))
    bound1 = min(eps_val, geom * v0 + vy0.v)
    v1 = y.digit(1).valuation()
    d1_ok = v1.zero or v1.v >= bound1
    tail_ok = True
    for n in range(1, y.n_hi):
        vn = y.digit(n).valuation()
        if not vn.zero and vn.v < min(eps_val, vy0.v):
            tail_ok = False
    return DivisionCertificate("b", l, vy0, d1_ok, tail_ok)


# ---------------------------------------------------------------------------
# The untilt ring (Z_q/p^M)[u]/(u^(p^K) - p)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def UntiltRing(p: int, a: int, M: int, K: int) -> "_UntiltRing":
    return _UntiltRing(p, a, M, K)


class _UntiltRing:
    """Free rank-p^K module over Z_q/p^M with u^(p^K) = p.

    Elements are sparse maps {u-exponent: Z_q/p^M coefficient} with
    exponents in [0, p^K); sparsity keeps guard-level computations (where
    the rank is p^(K+guard)) affordable.
    """

    def __init__(self, p: int, a: int, M: int, K: int):
        self.p = p
        self.a = a
        self.M = M
        self.K = K
        self.dim = p ** K
        self.base: ZqRing = Zq(p, a, M)
        self.zero = UntiltElem(self, {})
        self.one = UntiltElem(self, {0: self.base.one})

    def from_u_power(self, i: int, c: ZqElem | None = None) -> "UntiltElem":
        """c * u^i with folding u^(p^K) -> p."""
        c = c if c is not None else self.base.one
        q, r = divmod(i, self.dim)
        val = c * self.base(self.p) ** q
        return UntiltElem(self, {r: val} if not val.is_zero() else {})

    def element(self, pairs) -> "UntiltElem":
        acc = self.zero
        for i, c in pairs:
            acc = acc + self.from_u_power(i, self.base(c))
        return acc

    def __repr__(self):
        return f"Zq({self.p},{self.a})[u]/(u^{self.dim}-p) mod p^{self.M}"


class UntiltElem:
    __slots__ = ("ring", "c")

    def __init__(self, ring: _UntiltRing, c: dict[int, ZqElem]):
        self.ring = ring
        self.c = {i: v for i, v in c.items() if not v.is_zero()}

    def is_zero(self) -> bool:
        return not self.c

    def __eq__(self, other):
        if not isinstance(other, UntiltElem):
            return NotImplemented
        return self.ring is other.ring and self.c == other.c

    def __hash__(self):
        return hash((id(self.ring), tuple(sorted((i, v.coeffs) for i, v in self.c.items()))))

    def __add__(self, other: "UntiltElem") -> "UntiltElem":
        c = dict(self.c)
        for i, v in other.c.items():
            w = c.get(i)
            c[i] = v if w is None else w + v
        return UntiltElem(self.ring, c)

    def __neg__(self) -> "UntiltElem":
        return UntiltElem(self.ring, {i: -v for i, v in self.c.items()})

    def __sub__(self, other: "UntiltElem") -> "UntiltElem":
        return self + (-other)

    def __mul__(self, other: "UntiltElem") -> "UntiltElem":
        R = self.ring
        n = R.dim
        pel = R.base(R.p)
        c: dict[int, ZqElem] = {}
        for i, a in self.c.items():
            for j, b in other.c.items():
                k = i + j
                v = a * b
                if k >= n:
                    k -= n
                    v = v * pel
                w = c.get(k)
                c[k] = v if w is None else w + v
        return UntiltElem(R, c)

    def __pow__(self, e: int) -> "UntiltElem":
        acc, base = self.ring.one, self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def u_valuation(self) -> Fraction | None:
        """v with v(p) = 1, v(u) = 1/p^K; None when zero at precision."""
        best = None
        for i, v in self.c.items():
            cand = v.vp() + Fraction(i, self.ring.dim)
            if best is None or cand < best:
                best = cand
        return best

    def inverse(self) -> "UntiltElem":
        if self.u_valuation() != 0:
            raise ZeroDivisionError("not a unit of the untilt ring")
        c_inv = self.c[0].inverse()
        lead = UntiltElem(self.ring, {0: c_inv})
        n = self.ring.one - lead * self
        acc, term = self.ring.one, n
        while not term.is_zero():
            acc = acc + term
            term = term * n
        return lead * acc

    def coeff(self, i: int) -> ZqElem:
        return self.c.get(i, self.ring.base.zero)

    def reduce_mod_u(self) -> FqElem:
        return self.coeff(0).reduce()

    def reduce_mod_p(self) -> dict[int, FqElem]:
        """Sparse digit map of the reduction into F_q[u]/(u^(p^K))."""
        out = {}
        for i, v in self.c.items():
            r = v.reduce()
            if r:
                out[i] = r
        return out

    def lift_to(self, K2: int) -> "UntiltElem":
        """Embed into the ring with denominator exponent K2 >= K."""
        R2 = UntiltRing(self.ring.p, self.ring.a, self.ring.M, K2)
        f = R2.dim // self.ring.dim
        return UntiltElem(R2, {i * f: R2.base(tuple(v.coeffs))
                               for i, v in self.c.items()})

    def extract_to(self, K2: int) -> "UntiltElem":
        """Inverse of lift_to: requires support on multiples of p^(K-K2)."""
        R2 = UntiltRing(self.ring.p, self.ring.a, self.ring.M, K2)
        f = self.ring.dim // R2.dim
        c = {}
        for i, v in self.c.items():
            if i % f:
                raise PrecisionExhausted(
                    "untilt element does not descend to the smaller ring")
            c[i // f] = R2.base(tuple(v.coeffs))
        return UntiltElem(R2, c)

    def __repr__(self):
        terms = [f"({self.c[i]!r})u^{i}" for i in sorted(self.c)]
        return " + ".join(terms) if terms else "0(untilt)"


# ---------------------------------------------------------------------------
# theta and the sharp map
# ---------------------------------------------------------------------------

def _naive_substitute(y: PerfSeries, R: _UntiltRing) -> UntiltElem:
    """sum_e tau(c_e) u^(e p^K); requires exponents in p^(-K) Z, >= 0."""
    acc = R.zero
    pK = R.dim
    for e in y.support():
        if e < 0:
            raise InputError("theta requires plus-ring components")
        i = e * pK
        if i.denominator != 1:
            raise InsufficientPrecision(
                f"exponent {e} not representable at denominator {R.K}")
        acc = acc + R.from_u_power(int(i), R.base.teichmuller(y.coeff(e)))
    return acc


def theta_teichmuller(y: PerfSeries, R: _UntiltRing, guard: int) -> UntiltElem:
    """theta([y]) by the root trick at a fixed guard level."""
    if y.is_zero():
        return R.zero
    big = UntiltRing(R.p, R.a, R.M, R.K + guard)
    root = y.frobenius(-guard)
    val = _naive_substitute(root, big) ** (R.p ** guard)
    return val.extract_to(R.K)


def theta(x: WittTrunc, M: int, K: int, guard: int = 6) -> UntiltElem:
    """theta(sum p^n [y_n]) = sum p^n theta([y_n]) with a guard certificate.

    The value is computed at guard levels ``guard`` and ``guard + 1``;
    disagreement at target precision raises GuardInsufficient.
    """
    ring = x.ring
    if x.n_lo < 0:
        raise InputError("theta is defined on the integral ring")
    R = UntiltRing(ring.p, ring.a, M, K)
    out = []
    for g in (guard, guard + 1):
        acc = R.zero
        for n, d in x.digits.items():
            if n >= M * R.dim:
                continue
            acc = acc + R.from_u_power(n * R.dim) * theta_teichmuller(d, R, g)
        out.append(acc)
    if out[0] != out[1]:
        raise GuardInsufficient(
            f"guard levels {guard} and {guard + 1} disagree at precision p^{M}")
    return out[0]


@dataclass(frozen=True)
class SharpRoundtrip:
    sequence: tuple[UntiltElem, ...]
    compatible: bool
    reconstructed: PerfSeries


def sharp_roundtrip(x: PerfSeries, depth: int, M: int, K: int,
                    guard: int = 6) -> SharpRoundtrip:
    """Compute (theta([x^(1/p^j)]))_{j<=depth}, check y_{j+1}^p = y_j, and
    reconstruct x from the sequence.

    Reconstruction uses the identity A/(p) = (tilt)/(t): the mod-p digit
    vector of y_depth is read as the truncation of x^(1/p^depth) below
    exponent 1, then Frobenius recovers x below exponent p^depth (capped by
    the window).
    """
    if depth > K:
        raise InputError("depth must not exceed the denominator exponent K")
    ring = x.ring
    R = UntiltRing(ring.p, ring.a, M, K)
    seq = []
    for j in range(depth + 1):
        seq.append(theta_teichmuller(x.frobenius(-j), R, guard))
    ok = all((seq[j + 1] ** ring.p) == seq[j] for j in range(depth))
    digits = seq[depth].reduce_mod_p()
    terms = {}
    for i, c in enumerate(digits):
        if c:
            terms[Fraction(i, R.dim)] = c
    rec = ring.series(terms, K=K, window=(0, 1)) if terms else ring.zero(window=(0, 1))
    rec = rec.frobenius(depth)
    cap = min(x.hi, Fraction(ring.p ** depth))
    rec = rec.with_window(0, cap)
    return SharpRoundtrip(tuple(seq), ok, rec)


def untilt_generator(ring: SeriesRing, plen: int, window=(0, 2)) -> WittTrunc:
    """The primitive element p - [t] generating ker(theta)."""
    t = ring.var_power(1, window=window)
    pw = WittTrunc.integer(ring, 1, plen=plen, window=window).p_shift(1)
    return witt_sub(pw, teichmuller(t, plen=plen))

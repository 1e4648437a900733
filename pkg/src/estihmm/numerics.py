"""Numeric carriers for products and ratios of probabilities.

Two backends are provided.  :class:`LogBackend` stores every quantity as a
:class:`SignedLogValue` (sign plus natural log of the magnitude) and is the
default: the decoder only multiplies, divides and compares non-negative
probabilities, so it never needs sums and never underflows.  The
:class:`RationalBackend` uses :class:`fractions.Fraction` and is exact; it is
what the oracle-equivalence tests run on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Iterable


class SignedLogValue:
    """A real number stored as ``sign * exp(logmag)``.

    Zero is ``sign == 0`` (its ``logmag`` is meaningless and kept at 0.0), so
    no ``-inf`` ever enters a computation and comparisons stay NaN-free.
    """

    __slots__ = ("sign", "logmag")

    def __init__(self, sign: int, logmag: float = 0.0):
        if sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {sign!r}")
        if sign and not math.isfinite(logmag):
            raise ValueError(f"logmag must be finite, got {logmag!r}")
        self.sign = sign
        self.logmag = float(logmag) if sign else 0.0

    @classmethod
    def from_real(cls, x) -> SignedLogValue:
        if isinstance(x, SignedLogValue):
            return x
        if x == 0:
            return ZERO
        if isinstance(x, Fraction):
            # log of numerator/denominator separately so tiny exact values
            # do not round to 0.0 first
            lm = math.log(abs(x.numerator)) - math.log(x.denominator)
        else:
            lm = math.log(abs(float(x)))
        return cls(1 if x > 0 else -1, lm)

    def __float__(self) -> float:
        return self.sign * math.exp(self.logmag) if self.sign else 0.0

    def is_zero(self) -> bool:
        return self.sign == 0

    def __mul__(self, other: SignedLogValue) -> SignedLogValue:
        if not isinstance(other, SignedLogValue):
            other = SignedLogValue.from_real(other)
        if self.sign == 0 or other.sign == 0:
            return ZERO
        return SignedLogValue(self.sign * other.sign, self.logmag + other.logmag)

    __rmul__ = __mul__

    def __truediv__(self, other: SignedLogValue) -> SignedLogValue:
        if not isinstance(other, SignedLogValue):
            other = SignedLogValue.from_real(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLogValue")
        if self.sign == 0:
            return ZERO
        return SignedLogValue(self.sign * other.sign, self.logmag - other.logmag)

    def __neg__(self) -> SignedLogValue:
        return SignedLogValue(-self.sign, self.logmag) if self.sign else ZERO

    def __add__(self, other: SignedLogValue) -> SignedLogValue:
        if not isinstance(other, SignedLogValue):
            other = SignedLogValue.from_real(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.logmag >= other.logmag else (other, self)
        d = small.logmag - big.logmag
        if big.sign == small.sign:
            return SignedLogValue(big.sign, big.logmag + math.log1p(math.exp(d)))
        if d == 0.0:
            return ZERO
        return SignedLogValue(big.sign, big.logmag + math.log1p(-math.exp(d)))

    __radd__ = __add__

    def __sub__(self, other: SignedLogValue) -> SignedLogValue:
        if not isinstance(other, SignedLogValue):
            other = SignedLogValue.from_real(other)
        return self + (-other)

    def __eq__(self, other) -> bool:
        if isinstance(other, SignedLogValue):
            return self.sign == other.sign and self.logmag == other.logmag
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.sign, self.logmag))

    def __repr__(self) -> str:
        if self.sign == 0:
            return "SignedLogValue(0)"
        return f"SignedLogValue({self.sign:+d}, {self.logmag!r})"


ZERO = SignedLogValue(0)
ONE = SignedLogValue(1, 0.0)


@dataclass(frozen=True)
class ComparePolicy:
    """Tie policy for log-domain comparisons.

    Two log-magnitudes ``la`` and ``lb`` are treated as equal when
    ``|la - lb| <= tie_tolerance * max(1, |la|, |lb|)``.  The scaling keeps the
    tolerance meaningful for long chains, where logs reach several hundred and
    accumulated rounding grows with them.  ``tie_tolerance = 0`` is exact
    floating comparison.
    """

    tie_tolerance: float = 0.0

    def __post_init__(self):
        if not self.tie_tolerance >= 0:
            raise ValueError(f"tie tolerance must be >= 0, got {self.tie_tolerance!r}")

    def logs_tied(self, la: float, lb: float) -> bool:
        tau = self.tie_tolerance
        if tau == 0:
            return la == lb
        return abs(la - lb) <= tau * max(1.0, abs(la), abs(lb))


EXACT = ComparePolicy(0.0)
FLOAT_WORKLOAD = ComparePolicy(1e-12)


def compare(a: SignedLogValue, b: SignedLogValue, policy: ComparePolicy = EXACT) -> int:
    """Three-way comparison of two signed log values: -1, 0 or 1."""
    if a.sign != b.sign:
        return 1 if a.sign > b.sign else -1
    if a.sign == 0 or policy.logs_tied(a.logmag, b.logmag):
        return 0
    if a.logmag > b.logmag:
        return a.sign
    return -a.sign


def compare_geq(a: SignedLogValue, b: SignedLogValue, policy: ComparePolicy = EXACT) -> bool:
    """``a >= b`` under sign-then-magnitude ordering, ties within tolerance."""
    return compare(a, b, policy) >= 0


def signed_product(lower, upper, x):
    """The signed product ``lower*max(0,x) + upper*min(0,x)``.

    This is the lower prevision of ``x`` scaled by an uncertain non-negative
    factor known to lie in ``[lower, upper]``.  Works on plain reals and on
    :class:`SignedLogValue` (in which case ``lower``/``upper`` may be reals).
    """
    if isinstance(x, SignedLogValue):
        if x.sign > 0:
            return SignedLogValue.from_real(lower) * x
        if x.sign < 0:
            return SignedLogValue.from_real(upper) * x
        return ZERO
    if x > 0:
        return lower * x
    if x < 0:
        return upper * x
    return x * 0


def signed_product2(m_lower, m_upper, n_lower, n_upper, x):
    """Two-factor signed product: ``m_l*n_l*max(0,x) + m_u*n_u*min(0,x)``."""
    if isinstance(x, SignedLogValue):
        if x.sign > 0:
            return SignedLogValue.from_real(m_lower) * SignedLogValue.from_real(n_lower) * x
        if x.sign < 0:
            return SignedLogValue.from_real(m_upper) * SignedLogValue.from_real(n_upper) * x
        return ZERO
    if x > 0:
        return m_lower * n_lower * x
    if x < 0:
        return m_upper * n_upper * x
    return x * 0


class LogBackend:
    """Default backend: :class:`SignedLogValue` arithmetic with a tie policy."""

    name = "log"

    def __init__(self, policy: ComparePolicy | float = EXACT):
        if not isinstance(policy, ComparePolicy):
            policy = ComparePolicy(float(policy))
        self.policy = policy
        self.zero = ZERO
        self.one = ONE

    def lift(self, p) -> SignedLogValue:
        return SignedLogValue.from_real(p)

    def cmp(self, a: SignedLogValue, b: SignedLogValue) -> int:
        return compare(a, b, self.policy)

    def geq(self, a: SignedLogValue, b: SignedLogValue) -> bool:
        return compare(a, b, self.policy) >= 0

    def is_zero(self, a: SignedLogValue) -> bool:
        return a.sign == 0

    def sign(self, a: SignedLogValue) -> int:
        return a.sign

    def maximum(self, values: Iterable[SignedLogValue]) -> SignedLogValue:
        best = None
        for v in values:
            if best is None or compare(v, best) > 0:
                best = v
        return ZERO if best is None else best

    def minimum(self, values: Iterable[SignedLogValue]) -> SignedLogValue:
        best = None
        for v in values:
            if best is None or compare(v, best) < 0:
                best = v
        return ZERO if best is None else best

    def __repr__(self) -> str:
        return f"LogBackend(tau={self.policy.tie_tolerance!r})"


class RationalBackend:
    """Exact backend on :class:`fractions.Fraction`.

    Floats are converted exactly (binary value, not decimal repr); ties are
    exact equalities, so there is no tolerance to configure.
    """

    name = "rational"

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def lift(self, p) -> Fraction:
        if isinstance(p, Fraction):
            return p
        if isinstance(p, (int, float)) or isinstance(p, Real):
            return Fraction(p)
        raise TypeError(f"cannot lift {p!r} to a rational")

    def cmp(self, a: Fraction, b: Fraction) -> int:
        return (a > b) - (a < b)

    def geq(self, a: Fraction, b: Fraction) -> bool:
        return a >= b

    def is_zero(self, a: Fraction) -> bool:
        return a == 0

    def sign(self, a: Fraction) -> int:
        return (a > 0) - (a < 0)

    def maximum(self, values: Iterable[Fraction]) -> Fraction:
        return max(values, default=self.zero)

    def minimum(self, values: Iterable[Fraction]) -> Fraction:
        return min(values, default=self.zero)

    def __repr__(self) -> str:
        return "RationalBackend()"


def make_backend(kind="log", tau: float = 0.0):
    """Resolve a backend from a name (``"log"``/``"rational"``) or instance."""
    if isinstance(kind, (LogBackend, RationalBackend)):
        return kind
    if kind == "log":
        return LogBackend(ComparePolicy(tau))
    if kind == "rational":
        return RationalBackend()
    raise ValueError(f"unknown backend {kind!r}; expected 'log' or 'rational'")


def resolve_backend(backend="log", policy: ComparePolicy | float | None = None):
    """Backend from a name or instance; ``policy`` applies to a named log backend."""
    if isinstance(backend, (LogBackend, RationalBackend)):
        return backend
    if backend == "log":
        return LogBackend(EXACT if policy is None else policy)
    return make_backend(backend)

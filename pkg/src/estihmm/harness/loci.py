"""Lines in the (p, q) square where two length-2 binary sequences tie.

For a precise binary chain of length two, every joint mass is a constant
times one of ``p``, ``1-p``, ``q``, ``1-q``.  Equating two of them gives a
line ``a*p + b*q + c = 0``; coefficients are kept as exact fractions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

SEQUENCES = ("00", "01", "10", "11")


def exact(v) -> Fraction:
    """Exact rational for ``v``; floats go through their shortest decimal repr."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(repr(float(v)))


def _transition_factor(x1: str, x2: str) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients ``(of p, of q, constant)`` of P(x2 | x1)."""
    if x1 == "0":
        return (Fraction(1), Fraction(0), Fraction(0)) if x2 == "0" else (Fraction(-1), Fraction(0), Fraction(1))
    return (Fraction(0), Fraction(1), Fraction(0)) if x2 == "0" else (Fraction(0), Fraction(-1), Fraction(1))


def mass_form(m, r, s, obs: str, seq: str) -> tuple[Fraction, tuple[Fraction, Fraction, Fraction]]:
    """Joint mass of ``seq`` and ``obs`` as ``const * (a*p + b*q + c)``."""
    m, r, s = exact(m), exact(r), exact(s)
    first = m if seq[0] == "0" else 1 - m

    def emit(x, o):
        p0 = r if x == "0" else s
        return p0 if o == "0" else 1 - p0

    const = first * emit(seq[0], obs[0]) * emit(seq[1], obs[1])
    return const, _transition_factor(seq[0], seq[1])


def joint_mass(m, r, s, p, q, obs: str, seq: str) -> Fraction:
    const, (a, b, c) = mass_form(m, r, s, obs, seq)
    return const * (a * exact(p) + b * exact(q) + c)


def _fmt_frac(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class Locus:
    """Where the masses of ``pair[0]`` and ``pair[1]`` coincide.

    ``kind`` is one of ``"p"`` (vertical line), ``"q"`` (horizontal or sloped
    line solved for q), ``"identical"`` (equal everywhere) or ``"empty"``
    (never equal).  ``note`` flags a mass that vanishes identically.
    """

    pair: tuple[str, str]
    a: Fraction
    b: Fraction
    c: Fraction
    kind: str
    note: str = ""

    @property
    def text(self) -> str:
        if self.kind == "identical":
            return "equal everywhere"
        if self.kind == "empty":
            return "never equal"
        if self.kind == "p":
            return f"p = {_fmt_frac(-self.c / self.a)}"
        slope, icept = -self.a / self.b, -self.c / self.b
        if slope == 0:
            return f"q = {_fmt_frac(icept)}"
        term = "p" if slope == 1 else f"{_fmt_frac(slope)}*p"
        if icept == 0:
            return f"q = {term}"
        sign = "+" if icept > 0 else "-"
        return f"q = {term} {sign} {_fmt_frac(abs(icept))}"

    @property
    def p_const(self) -> Fraction | None:
        return -self.c / self.a if self.kind == "p" else None

    @property
    def q_of_p(self):
        """``(slope, intercept)`` of q as a function of p, for q-kind loci."""
        if self.kind != "q":
            return None
        return -self.a / self.b, -self.c / self.b

    def contains(self, p, q) -> bool:
        return self.a * exact(p) + self.b * exact(q) + self.c == 0

    def segment(self) -> tuple | None:
        """Endpoints of the part of the line inside the unit square."""
        if self.kind in ("identical", "empty"):
            return None
        pts = set()
        zero, one = Fraction(0), Fraction(1)
        if self.b != 0:
            for p in (zero, one):
                q = -(self.a * p + self.c) / self.b
                if zero <= q <= one:
                    pts.add((p, q))
        if self.a != 0:
            for q in (zero, one):
                p = -(self.b * q + self.c) / self.a
                if zero <= p <= one:
                    pts.add((p, q))
        if not pts:
            return None
        pts = sorted(pts)
        return pts[0], pts[-1]


@dataclass(frozen=True)
class LociSet:
    loci: tuple[Locus, ...]

    def __iter__(self):
        return iter(self.loci)

    def __len__(self) -> int:
        return len(self.loci)

    def get(self, x: str, y: str) -> Locus:
        for loc in self.loci:
            if set(loc.pair) == {x, y}:
                return loc
        raise KeyError((x, y))

    def lines(self) -> list[str]:
        out = []
        for loc in self.loci:
            line = f"{loc.pair[0]}-{loc.pair[1]}: {loc.text}"
            if loc.note:
                line += f"  ({loc.note})"
            out.append(line)
        return out


def indifference_loci(m, r, s, obs: str) -> LociSet:
    """All six tie loci for a binary chain of length two."""
    if len(obs) != 2 or any(o not in "01" for o in obs):
        raise ValueError(f"obs must be two binary symbols, got {obs!r}")
    forms = {seq: mass_form(m, r, s, obs, seq) for seq in SEQUENCES}
    loci = []
    for x, y in itertools.combinations(SEQUENCES, 2):
        cx, (ax, bx, kx) = forms[x]
        cy, (ay, by, ky) = forms[y]
        a, b, c = cx * ax - cy * ay, cx * bx - cy * by, cx * kx - cy * ky
        notes = [f"mass of {z} is identically 0" for z, cz in ((x, cx), (y, cy)) if cz == 0]
        if a == 0 and b == 0:
            kind = "identical" if c == 0 else "empty"
        elif b == 0:
            kind = "p"
        else:
            kind = "q"
        loci.append(Locus((x, y), a, b, c, kind, "; ".join(notes)))
    return LociSet(tuple(loci))

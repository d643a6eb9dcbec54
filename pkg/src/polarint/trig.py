"""Trigonometric polynomials in one angle and the four standard T-families.

A standard separable potential has angular part S = T'(theta) where T is a
ratio of trigonometric polynomials; the denominator is built from the
LCC-visible slots of the leading term with a family-specific weight and
sign pattern, the numerator carries free constants.  The same family table
drives both the nullspace solver and the potential constructors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .jetfield import Const, Cos, FieldExpr, Quot, Sin, VAR_U

__all__ = ["TrigPoly", "FAMILIES", "TFamily", "family_denominator", "numerator_labels"]


class TrigPoly:
    """sum over s of a_s cos(s t) + b_s sin(s t), stored as {s: (a, b)}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        for s, (a, b) in (coeffs or {}).items():
            if a != 0.0 or b != 0.0:
                self.coeffs[int(s)] = (float(a), float(b))

    def add(self, s: int, a: float = 0.0, b: float = 0.0) -> "TrigPoly":
        ca, cb = self.coeffs.get(s, (0.0, 0.0))
        out = dict(self.coeffs)
        out[s] = (ca + a, cb + b)
        return TrigPoly(out)

    def deriv(self) -> "TrigPoly":
        out = {}
        for s, (a, b) in self.coeffs.items():
            if s:
                out[s] = (s * b, -s * a)
        return TrigPoly(out)

    def __call__(self, t: float) -> float:
        return sum(
            a * math.cos(s * t) + b * math.sin(s * t) for s, (a, b) in self.coeffs.items()
        )

    def to_field(self) -> FieldExpr:
        terms = []
        for s in sorted(self.coeffs):
            a, b = self.coeffs[s]
            if s == 0:
                if a:
                    terms.append(Const(a))
                continue
            arg = Const(float(s)) * VAR_U
            if a:
                terms.append(Const(a) * Cos(arg))
            if b:
                terms.append(Const(b) * Sin(arg))
        if not terms:
            return Const(0.0)
        expr = terms[0]
        for t_ in terms[1:]:
            expr = expr + t_
        return expr

    def __bool__(self):
        return bool(self.coeffs)

    def max_amplitude(self) -> float:
        return sum(math.hypot(a, b) for a, b in self.coeffs.values())


@dataclass(frozen=True)
class TFamily:
    """One of the four standard angular families.

    ``n_parity``: required parity of N.  ``radial``: the radial kind the
    family pairs with.  ``s_parity``: parity of the harmonics appearing in
    both numerator and denominator.  ``weighted``: whether denominator
    terms carry the extra factor s with the swapped (sin, -cos) pattern.
    ``numerator_top``: highest numerator harmonic as offset from N.
    ``has_constant``: whether the numerator includes a free constant.
    """

    name: str
    n_parity: int
    radial: str
    s_parity: int
    weighted: bool
    numerator_top: int
    has_constant: bool


FAMILIES = {
    f.name: f
    for f in (
        # even N, deformed Kepler; odd harmonics, plain +cos/+sin denominator
        TFamily("kepler", 0, "kepler", 1, False, -1, True),
        # even N, deformed oscillator; even harmonics, s-weighted denominator
        TFamily("oscillator", 0, "oscillator", 0, True, 0, True),
        # odd N, vanishing radial part, odd harmonics, s-weighted denominator
        TFamily("scalefree_odd", 1, "zero", 1, True, 0, False),
        # odd N, vanishing radial part, even harmonics, plain denominator;
        # the printed trailing additive constant is pure gauge in S = T'
        TFamily("scalefree_even", 1, "zero", 0, False, -1, True),
    )
}


def family_denominator(family: TFamily, spec) -> TrigPoly:
    """Denominator trig polynomial from the LCC-visible (s, k) slots."""
    N = spec.N
    den = TrigPoly()
    for (s, k, comp, v) in spec.populated():
        if not (N - 1 <= s + 2 * k <= N):
            continue
        if s == 0 or s % 2 != family.s_parity % 2:
            continue
        if family.weighted:
            # s * (B2 cos - B1 sin)
            if comp == 1:
                den = den.add(s, b=-s * v)
            else:
                den = den.add(s, a=s * v)
        else:
            # B1 cos + B2 sin
            if comp == 1:
                den = den.add(s, a=v)
            else:
                den = den.add(s, b=v)
    return den


def numerator_labels(family: TFamily, N: int):
    """Free numerator constants as (kind, s) labels in a fixed order."""
    labels = []
    if family.has_constant:
        labels.append(("const", 0))
    start = 1 if family.s_parity == 1 else 2
    for s in range(start, N + family.numerator_top + 1, 2):
        labels.append(("cos", s))
        labels.append(("sin", s))
    return labels


def numerator_basis(label) -> TrigPoly:
    kind, s = label
    if kind == "const":
        return TrigPoly({0: (1.0, 0.0)})
    if kind == "cos":
        return TrigPoly({s: (1.0, 0.0)})
    return TrigPoly({s: (0.0, 1.0)})


def ratio_derivative_field(num: TrigPoly, den: TrigPoly) -> FieldExpr:
    """d/dt [num/den] as an evaluable field, via the quotient rule."""
    n, d = num.to_field(), den.to_field()
    dn, dd = num.deriv().to_field(), den.deriv().to_field()
    return Quot(dn * d - n * dd, d * d)

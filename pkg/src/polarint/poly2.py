"""Minimal exact bivariate polynomials as coefficient dictionaries.

Used by the compatibility-condition assembly, where coefficient weights
must be differentiated and evaluated exactly (on floats or on jets).
"""

from __future__ import annotations

import math

__all__ = ["Poly2"]


class Poly2:
    """Polynomial sum of c * x^a y^b stored as {(a, b): c}."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: float(v) for k, v in (terms or {}).items() if v != 0.0}

    @classmethod
    def monomial(cls, a: int, b: int, c: float = 1.0) -> "Poly2":
        return cls({(a, b): c})

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: "Poly2") -> "Poly2":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0.0) + v
        return Poly2(out)

    def __mul__(self, other):
        if isinstance(other, Poly2):
            out: dict = {}
            for (a1, b1), c1 in self.terms.items():
                for (a2, b2), c2 in other.terms.items():
                    k = (a1 + a2, b1 + b2)
                    out[k] = out.get(k, 0.0) + c1 * c2
            return Poly2(out)
        return Poly2({k: v * other for k, v in self.terms.items()})

    __rmul__ = __mul__

    def scaled(self, c: float) -> "Poly2":
        return Poly2({k: v * c for k, v in self.terms.items()})

    def diff(self, i: int, j: int) -> "Poly2":
        out = {}
        for (a, b), c in self.terms.items():
            if a >= i and b >= j:
                f = (math.factorial(a) // math.factorial(a - i)) * (
                    math.factorial(b) // math.factorial(b - j)
                )
                out[(a - i, b - j)] = out.get((a - i, b - j), 0.0) + c * f
        return Poly2(out)

    def __call__(self, x, y):
        """Evaluate; works on floats or on any type with + * ** (jets)."""
        total = 0.0
        for (a, b), c in self.terms.items():
            term = c
            if a:
                term = term * x ** a
            if b:
                term = term * y ** b
            total = total + term
        return total

    @property
    def degree(self) -> int:
        return max((a + b for a, b in self.terms), default=0)

    def __repr__(self):
        return f"Poly2({self.terms!r})"

    def __eq__(self, other):
        return isinstance(other, Poly2) and self.terms == other.terms

"""Phase-space points, momentum polynomials and the classical Poisson bracket.

Observables are polynomials in (p_x, p_y) whose coefficients are scalar
fields over configuration space.  The bracket is built lazily: coefficient
fields of a bracket are new DAG nodes referencing derivatives of the input
coefficients, never expanded symbolically.  Cartesian (x, y) is the
canonical chart; polar quantities are derived on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .jetfield import (
    Const,
    Deriv,
    DomainError,
    FieldExpr,
    PolarAngle,
    Prod,
    Sum,
    VAR_U,
    VAR_V,
    substitute,
)

__all__ = [
    "PhasePoint",
    "MomentumPolynomial",
    "poisson",
    "hamiltonian_of",
    "x_of",
    "angular_to_cartesian",
    "lz",
]


@dataclass(frozen=True)
class PhasePoint:
    """A point of phase space in Cartesian coordinates (dimensionless units)."""

    x: float
    y: float
    px: float
    py: float

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def theta(self) -> float:
        return math.atan2(self.y, self.x)

    @property
    def p_r(self) -> float:
        r = self.r
        if r <= 0.0:
            raise ValueError("polar momenta undefined at the origin")
        return (self.x * self.px + self.y * self.py) / r

    @property
    def l_z(self) -> float:
        return self.x * self.py - self.y * self.px

    @classmethod
    def from_polar(cls, r: float, theta: float, p_r: float, l_z: float) -> "PhasePoint":
        if r <= 0.0:
            raise ValueError("require r > 0")
        c, s = math.cos(theta), math.sin(theta)
        return cls(
            x=r * c,
            y=r * s,
            px=c * p_r - s / r * l_z,
            py=s * p_r + c / r * l_z,
        )


class MomentumPolynomial:
    """Polynomial in (p_x, p_y) with FieldExpr coefficients over (x, y).

    Absent exponent pairs are semantically zero.  Instances are immutable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = {
            (int(i), int(j)): (c if isinstance(c, FieldExpr) else Const(float(c)))
            for (i, j), c in dict(coeffs).items()
        }

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.coeffs), default=0)

    def evaluate(self, pt: PhasePoint) -> float:
        """Sum of coeff_ij(x, y) * px^i * py^j."""
        memo: dict = {}
        total = 0.0
        for (i, j), c in self.coeffs.items():
            total += c._dual(pt.x, pt.y, memo)[0] * pt.px ** i * pt.py ** j
        return total

    def coefficient_of(self, i: int, j: int, pt_config) -> float:
        """Value of the (i, j) coefficient field at a configuration point."""
        c = self.coeffs.get((int(i), int(j)))
        if c is None:
            return 0.0
        return c(pt_config[0], pt_config[1])

    def coefficient_expr(self, i: int, j: int) -> FieldExpr:
        return self.coeffs.get((int(i), int(j)), Const(0.0))

    def __add__(self, other: "MomentumPolynomial") -> "MomentumPolynomial":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = Sum((out[k], c)) if k in out else c
        return MomentumPolynomial(out)

    def __mul__(self, other) -> "MomentumPolynomial":
        if isinstance(other, MomentumPolynomial):
            out: dict = {}
            for (i1, j1), c1 in self.coeffs.items():
                for (i2, j2), c2 in other.coeffs.items():
                    k = (i1 + i2, j1 + j2)
                    term = Prod(c1, c2)
                    out[k] = Sum((out[k], term)) if k in out else term
            return MomentumPolynomial(out)
        factor = Const(float(other))
        return MomentumPolynomial(
            {k: Prod(factor, c) for k, c in self.coeffs.items()}
        )

    __rmul__ = __mul__

    def __sub__(self, other: "MomentumPolynomial") -> "MomentumPolynomial":
        return self + (other * -1.0)

    def map_coeffs(self, fn) -> "MomentumPolynomial":
        return MomentumPolynomial({k: fn(c) for k, c in self.coeffs.items()})


def _d_config(obs: MomentumPolynomial, axis: int) -> MomentumPolynomial:
    i, j = (1, 0) if axis == 0 else (0, 1)
    return MomentumPolynomial({k: Deriv(c, i, j) for k, c in obs.coeffs.items()})


def _d_momentum(obs: MomentumPolynomial, axis: int) -> MomentumPolynomial:
    out = {}
    for (i, j), c in obs.coeffs.items():
        if axis == 0 and i > 0:
            out[(i - 1, j)] = Prod(Const(float(i)), c)
        elif axis == 1 and j > 0:
            out[(i, j - 1)] = Prod(Const(float(j)), c)
    return MomentumPolynomial(out)


def poisson(F: MomentumPolynomial, G: MomentumPolynomial) -> MomentumPolynomial:
    """Canonical bracket {F, G} = sum_q dF/dq dG/dp_q - dF/dp_q dG/dq.

    The result has degree at most deg F + deg G - 1; its coefficients are
    lazy DAG nodes over the inputs' coefficient fields.
    """
    out = MomentumPolynomial({})
    for axis in (0, 1):
        out = out + _d_config(F, axis) * _d_momentum(G, axis)
        out = out - _d_momentum(F, axis) * _d_config(G, axis)
    return out


def lz() -> MomentumPolynomial:
    """Angular momentum L_z = x p_y - y p_x."""
    return MomentumPolynomial({(0, 1): VAR_U, (1, 0): Prod(Const(-1.0), VAR_V)})


def angular_to_cartesian(S: FieldExpr) -> FieldExpr:
    """Render a function of theta alone as a field over (x, y).

    The angular argument is computed with the two-argument arctangent,
    range (-pi, pi].  S must be 2 pi periodic; this is asserted by sampling
    where the expression is evaluable.
    """
    checked = 0
    for t in (-2.9, -1.3, 0.4, 1.7, 2.8):
        try:
            a, b = S(t), S(t + 2 * math.pi)
        except DomainError:
            continue
        checked += 1
        if abs(a - b) > 1e-8 * max(1.0, abs(a)):
            raise ValueError(f"angular field is not 2 pi periodic at theta={t}")
    return substitute(S, {VAR_U: PolarAngle(VAR_U, VAR_V)})


def x_of(S: FieldExpr) -> MomentumPolynomial:
    """Second-order integral L_z^2 + 2 S(theta) of a polar-separable system.

    S is a field in one variable (the angle).  The L_z^2 part is expanded
    into Cartesian momentum monomials; S lands on the constant slot through
    the polar angle of (x, y).
    """
    s_cart = angular_to_cartesian(S)
    return MomentumPolynomial(
        {
            (2, 0): Prod(VAR_V, VAR_V),
            (1, 1): Prod(Const(-2.0), Prod(VAR_U, VAR_V)),
            (0, 2): Prod(VAR_U, VAR_U),
            (0, 0): Prod(Const(2.0), s_cart),
        }
    )


def hamiltonian_of(V) -> MomentumPolynomial:
    """H = (p_x^2 + p_y^2)/2 + V(x, y) for a classical potential.

    ``V`` is a PotentialSpec (anything exposing ``cartesian_field()``), or a
    plain FieldExpr over Cartesian position, or None for free motion.
    """
    coeffs = {(2, 0): Const(0.5), (0, 2): Const(0.5)}
    if V is not None:
        field = V.cartesian_field() if hasattr(V, "cartesian_field") else V
        coeffs[(0, 0)] = field
    return MomentumPolynomial(coeffs)

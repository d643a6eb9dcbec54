"""Radial profiles R(r) admitted by the workbench, as evaluable fields."""

from __future__ import annotations

from dataclasses import dataclass

from .jetfield import Const, FieldExpr, Pow, Sqrt, VAR_U

__all__ = ["RadialPart", "radial_field"]


@dataclass(frozen=True)
class RadialPart:
    """Tagged radial component of a separable potential.

    kind: one of 'zero', 'kepler' (a/r), 'oscillator' (b r^2),
    'onofri' (sqrt(a^2 r^2 + d)/r^2) or 'custom'.
    """

    kind: str
    a: float = 0.0
    b: float = 0.0
    d: float = 0.0
    expr: FieldExpr | None = None

    KINDS = ("zero", "kepler", "oscillator", "onofri", "custom")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown radial kind {self.kind!r}")
        if self.kind == "custom" and self.expr is None:
            raise ValueError("custom radial part needs an expression")

    def field(self) -> FieldExpr:
        """R as a field in one variable (the radius)."""
        return radial_field(self)

    def __call__(self, r: float) -> float:
        return self.field()(r)

    def params(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "kepler":
            out["a"] = self.a
        elif self.kind == "oscillator":
            out["b"] = self.b
        elif self.kind == "onofri":
            out["a"] = self.a
            out["d"] = self.d
        return out


def radial_field(radial: RadialPart) -> FieldExpr:
    r = VAR_U
    if radial.kind == "zero":
        return Const(0.0)
    if radial.kind == "kepler":
        return Const(radial.a) / r
    if radial.kind == "oscillator":
        return Const(radial.b) * r * r
    if radial.kind == "onofri":
        return Sqrt(Const(radial.a ** 2) * r * r + Const(radial.d)) / (r * r)
    return radial.expr


def zero() -> RadialPart:
    return RadialPart("zero")


def kepler(a: float) -> RadialPart:
    return RadialPart("kepler", a=float(a))


def oscillator(b: float) -> RadialPart:
    return RadialPart("oscillator", b=float(b))


def onofri(a: float, d: float) -> RadialPart:
    return RadialPart("onofri", a=float(a), d=float(d))


def custom(expr: FieldExpr) -> RadialPart:
    return RadialPart("custom", expr=expr)

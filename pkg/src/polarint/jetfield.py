"""Truncated bivariate Taylor arithmetic (jets) and differentiable scalar fields.

A ``Jet2`` carries the Taylor coefficients of a smooth function of two
variables at a base point, up to a fixed total order.  Pushing jets through
an expression DAG yields every partial derivative of the composite function
exact to roundoff, which is what the compatibility-condition and dynamics
layers consume.  ``FieldExpr`` is the expression DAG; it evaluates on plain
floats, on first-order dual numbers (for forces) and on jets of any order
up to ``K_MAX``.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

K_MAX = 12

__all__ = [
    "K_MAX",
    "Jet2",
    "FieldExpr",
    "Const",
    "Var",
    "VAR_U",
    "VAR_V",
    "PolarAngle",
    "Tabulated",
    "Deriv",
    "const",
    "jet_eval",
    "deriv_at",
    "fourier_project",
    "load_angular_table",
    "DomainError",
    "EvaluationError",
]


class EvaluationError(ValueError):
    """Raised when an expression cannot be evaluated at the given argument."""


class DomainError(EvaluationError):
    """Argument outside the valid domain of a tabulated node."""


@lru_cache(maxsize=None)
def _tail_mask(order: int) -> np.ndarray:
    i = np.arange(order + 1)
    return (i[:, None] + i[None, :]) > order


class Jet2:
    """Truncated Taylor expansion of a scalar function of two variables.

    ``c[i, j]`` is the Taylor coefficient of ``(u - u0)^i (v - v0)^j``,
    i.e. the partial derivative ``d^(i+j) f / du^i dv^j`` divided by
    ``i! j!``.  Entries with ``i + j > order`` are identically zero.
    Instances are immutable by convention; arithmetic returns new jets.
    """

    __slots__ = ("order", "c", "base")

    def __init__(self, order: int, c: np.ndarray | None = None, base=(0.0, 0.0)):
        if order < 0 or order > K_MAX:
            raise ValueError(f"jet order must be in [0, {K_MAX}], got {order}")
        self.order = order
        if c is None:
            c = np.zeros((order + 1, order + 1))
        self.c = c
        self.base = base

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, value: float, order: int, base=(0.0, 0.0)) -> "Jet2":
        j = cls(order, base=base)
        j.c[0, 0] = value
        return j

    @classmethod
    def variable(cls, value: float, index: int, order: int, base=(0.0, 0.0)) -> "Jet2":
        """Jet of the coordinate function u (index 0) or v (index 1)."""
        j = cls(order, base=base)
        j.c[0, 0] = value
        if order >= 1:
            if index == 0:
                j.c[1, 0] = 1.0
            else:
                j.c[0, 1] = 1.0
        return j

    # -- accessors -----------------------------------------------------

    @property
    def value(self) -> float:
        return float(self.c[0, 0])

    def deriv(self, i: int, j: int) -> float:
        """Partial derivative d^(i+j)/du^i dv^j at the base point."""
        if i + j > self.order:
            raise ValueError(f"derivative order ({i},{j}) exceeds jet order {self.order}")
        return float(self.c[i, j]) * math.factorial(i) * math.factorial(j)

    def __repr__(self):
        return f"Jet2(order={self.order}, value={self.value!r})"

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            if other.order != self.order:
                raise ValueError("jet orders differ")
            return other
        return Jet2.constant(float(other), self.order, self.base)

    def __add__(self, other):
        other = self._coerce(other)
        return Jet2(self.order, self.c + other.c, self.base)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(self.order, -self.c, self.base)

    def __sub__(self, other):
        other = self._coerce(other)
        return Jet2(self.order, self.c - other.c, self.base)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.order, self.c * float(other), self.base)
        if other.order != self.order:
            raise ValueError("jet orders differ")
        K = self.order
        out = np.zeros((K + 1, K + 1))
        a = self.c
        b = other.c
        for i in range(K + 1):
            row = a[i]
            for j in range(K + 1 - i):
                aij = row[j]
                if aij != 0.0:
                    out[i:, j:] += aij * b[: K + 1 - i, : K + 1 - j]
        out[_tail_mask(K)] = 0.0
        return Jet2(K, out, self.base)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.order, self.c / float(other), self.base)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        return self.power(p)

    # -- composition with univariate functions ------------------------

    def compose(self, outer_coeffs: np.ndarray) -> "Jet2":
        """Compose with a univariate Taylor series taken at this jet's value.

        ``outer_coeffs[m]`` is the m-th Taylor coefficient of the outer
        function expanded around ``self.value``.
        """
        K = self.order
        u = Jet2(K, self.c.copy(), self.base)
        u.c[0, 0] = 0.0
        acc = Jet2.constant(float(outer_coeffs[K]), K, self.base)
        for m in range(K - 1, -1, -1):
            acc = acc * u
            acc.c[0, 0] += outer_coeffs[m]
        return acc

    def reciprocal(self) -> "Jet2":
        v = self.value
        if v == 0.0:
            raise EvaluationError("division by a jet with zero value")
        coeffs = np.array([(-1.0) ** m / v ** (m + 1) for m in range(self.order + 1)])
        return self.compose(coeffs)

    def sin(self) -> "Jet2":
        v = self.value
        coeffs = np.array(
            [math.sin(v + m * math.pi / 2) / math.factorial(m) for m in range(self.order + 1)]
        )
        return self.compose(coeffs)

    def cos(self) -> "Jet2":
        v = self.value
        coeffs = np.array(
            [math.cos(v + m * math.pi / 2) / math.factorial(m) for m in range(self.order + 1)]
        )
        return self.compose(coeffs)

    def sqrt(self) -> "Jet2":
        return self.power(0.5)

    def power(self, p) -> "Jet2":
        """Real power.  Integer exponents work for any base; fractional
        exponents require a strictly positive base value."""
        if float(p) == int(p):
            return self._int_power(int(p))
        v = self.value
        if v <= 0.0:
            raise EvaluationError(f"fractional power of non-positive base {v}")
        coeffs = np.empty(self.order + 1)
        coeffs[0] = v ** float(p)
        fac = 1.0
        for m in range(1, self.order + 1):
            fac *= (p - (m - 1)) / m
            coeffs[m] = fac * v ** (p - m)
        return self.compose(coeffs)

    def _int_power(self, p: int) -> "Jet2":
        if p < 0:
            return self.reciprocal()._int_power(-p)
        result = Jet2.constant(1.0, self.order, self.base)
        base = self
        while p:
            if p & 1:
                result = result * base
            base = base * base if p > 1 else base
            p >>= 1
        return result

    def atan_zero_base(self) -> "Jet2":
        """arctan of a jet whose value is zero (series around 0)."""
        if self.value != 0.0:
            raise ValueError("atan_zero_base requires zero constant term")
        coeffs = np.zeros(self.order + 1)
        for m in range(1, self.order + 1, 2):
            coeffs[m] = (-1.0) ** ((m - 1) // 2) / m
        return self.compose(coeffs)


# ---------------------------------------------------------------------------
# Expression DAG
# ---------------------------------------------------------------------------


class FieldExpr:
    """A node of a differentiable scalar-field expression over two formal
    variables.  Nodes are immutable; sharing subtrees is encouraged."""

    def __add__(self, other):
        return Sum((self, _as_expr(other)))

    def __radd__(self, other):
        return Sum((_as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, Prod(Const(-1.0), _as_expr(other))))

    def __rsub__(self, other):
        return Sum((_as_expr(other), Prod(Const(-1.0), self)))

    def __mul__(self, other):
        return Prod(self, _as_expr(other))

    def __rmul__(self, other):
        return Prod(_as_expr(other), self)

    def __truediv__(self, other):
        return Quot(self, _as_expr(other))

    def __rtruediv__(self, other):
        return Quot(_as_expr(other), self)

    def __pow__(self, p):
        return Pow(self, float(p))

    def __neg__(self):
        return Prod(Const(-1.0), self)

    # children() is used by generic tree walks (substitution, audits)
    def children(self):
        return ()

    def _jet(self, ju, jv, memo):
        raise NotImplementedError

    def _dual(self, x, y, memo):
        """(value, d/du, d/dv) at plain floats; first-order fast path."""
        raise NotImplementedError

    def eval_jet(self, ju: Jet2, jv: Jet2) -> Jet2:
        return self._jet(ju, jv, {})

    def __call__(self, u: float, v: float = 0.0) -> float:
        return self._dual(float(u), float(v), {})[0]

    def grad(self, u: float, v: float = 0.0):
        return self._dual(float(u), float(v), {})


def _as_expr(x) -> FieldExpr:
    if isinstance(x, FieldExpr):
        return x
    return Const(float(x))


def _memoized(method):
    # _jet passes are keyed by (node, order) so that Deriv nodes, which
    # re-enter the walk at a raised order, still share child evaluations
    def wrapper(self, a, b, memo):
        key = (id(self), a.order) if isinstance(a, Jet2) else id(self)
        hit = memo.get(key)
        if hit is None:
            hit = method(self, a, b, memo)
            memo[key] = hit
        return hit

    return wrapper


class Const(FieldExpr):
    __slots__ = ("v",)

    def __init__(self, v: float):
        self.v = float(v)

    def _jet(self, ju, jv, memo):
        return Jet2.constant(self.v, ju.order, ju.base)

    def _dual(self, x, y, memo):
        return (self.v, 0.0, 0.0)


class Var(FieldExpr):
    __slots__ = ("index",)

    def __init__(self, index: int):
        if index not in (0, 1):
            raise ValueError("variable index must be 0 or 1")
        self.index = index

    def _jet(self, ju, jv, memo):
        return ju if self.index == 0 else jv

    def _dual(self, x, y, memo):
        if self.index == 0:
            return (x, 1.0, 0.0)
        return (y, 0.0, 1.0)


VAR_U = Var(0)
VAR_V = Var(1)


class Sum(FieldExpr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        flat = []
        for t in terms:
            if isinstance(t, Sum):
                flat.extend(t.terms)
            else:
                flat.append(t)
        self.terms = tuple(flat)

    def children(self):
        return self.terms

    @_memoized
    def _jet(self, ju, jv, memo):
        acc = self.terms[0]._jet(ju, jv, memo)
        for t in self.terms[1:]:
            acc = acc + t._jet(ju, jv, memo)
        return acc

    @_memoized
    def _dual(self, x, y, memo):
        v = vx = vy = 0.0
        for t in self.terms:
            a, b, c = t._dual(x, y, memo)
            v += a
            vx += b
            vy += c
        return (v, vx, vy)


class Prod(FieldExpr):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b

    def children(self):
        return (self.a, self.b)

    @_memoized
    def _jet(self, ju, jv, memo):
        return self.a._jet(ju, jv, memo) * self.b._jet(ju, jv, memo)

    @_memoized
    def _dual(self, x, y, memo):
        av, ax, ay = self.a._dual(x, y, memo)
        bv, bx, by = self.b._dual(x, y, memo)
        return (av * bv, ax * bv + av * bx, ay * bv + av * by)


class Quot(FieldExpr):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b

    def children(self):
        return (self.a, self.b)

    @_memoized
    def _jet(self, ju, jv, memo):
        return self.a._jet(ju, jv, memo) / self.b._jet(ju, jv, memo)

    @_memoized
    def _dual(self, x, y, memo):
        av, ax, ay = self.a._dual(x, y, memo)
        bv, bx, by = self.b._dual(x, y, memo)
        if bv == 0.0:
            raise EvaluationError("division by zero in quotient node")
        inv = 1.0 / bv
        v = av * inv
        return (v, (ax - v * bx) * inv, (ay - v * by) * inv)


class Pow(FieldExpr):
    __slots__ = ("a", "p")

    def __init__(self, a, p: float):
        self.a = a
        self.p = float(p)

    def children(self):
        return (self.a,)

    @_memoized
    def _jet(self, ju, jv, memo):
        return self.a._jet(ju, jv, memo).power(self.p)

    @_memoized
    def _dual(self, x, y, memo):
        av, ax, ay = self.a._dual(x, y, memo)
        p = self.p
        if p == int(p):
            v = av ** int(p)
            dv = int(p) * av ** (int(p) - 1) if p != 0 else 0.0
        else:
            if av <= 0.0:
                raise EvaluationError(f"fractional power of non-positive base {av}")
            v = av ** p
            dv = p * av ** (p - 1.0)
        return (v, dv * ax, dv * ay)


class Sin(FieldExpr):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    def children(self):
        return (self.a,)

    @_memoized
    def _jet(self, ju, jv, memo):
        return self.a._jet(ju, jv, memo).sin()

    @_memoized
    def _dual(self, x, y, memo):
        av, ax, ay = self.a._dual(x, y, memo)
        s, c = math.sin(av), math.cos(av)
        return (s, c * ax, c * ay)


class Cos(FieldExpr):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    def children(self):
        return (self.a,)

    @_memoized
    def _jet(self, ju, jv, memo):
        return self.a._jet(ju, jv, memo).cos()

    @_memoized
    def _dual(self, x, y, memo):
        av, ax, ay = self.a._dual(x, y, memo)
        s, c = math.sin(av), math.cos(av)
        return (c, -s * ax, -s * ay)


class Sqrt(FieldExpr):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    def children(self):
        return (self.a,)

    @_memoized
    def _jet(self, ju, jv, memo):
        return self.a._jet(ju, jv, memo).sqrt()

    @_memoized
    def _dual(self, x, y, memo):
        av, ax, ay = self.a._dual(x, y, memo)
        if av <= 0.0:
            raise EvaluationError(f"sqrt of non-positive value {av}")
        v = math.sqrt(av)
        d = 0.5 / v
        return (v, d * ax, d * ay)


class PolarAngle(FieldExpr):
    """atan2(b, a) of two child expressions.

    Not in the minimal node catalogue, but required to render angular
    fields S(theta) as functions of Cartesian position.  The jet rule
    expands theta = theta0 + arctan((b a0 - a b0)/(a a0 + b b0)), whose
    argument has zero constant term, so no branch issues arise locally.
    """

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a  # x-like child
        self.b = b  # y-like child

    def children(self):
        return (self.a, self.b)

    @_memoized
    def _jet(self, ju, jv, memo):
        A = self.a._jet(ju, jv, memo)
        B = self.b._jet(ju, jv, memo)
        a0, b0 = A.value, B.value
        if a0 == 0.0 and b0 == 0.0:
            raise EvaluationError("polar angle undefined at the origin")
        th0 = math.atan2(b0, a0)
        w = (B * a0 - A * b0) / (A * a0 + B * b0)
        w.c[0, 0] = 0.0  # exact zero by construction; clear roundoff
        out = w.atan_zero_base()
        out.c[0, 0] = th0
        return out

    @_memoized
    def _dual(self, x, y, memo):
        av, ax, ay = self.a._dual(x, y, memo)
        bv, bx, by = self.b._dual(x, y, memo)
        r2 = av * av + bv * bv
        if r2 == 0.0:
            raise EvaluationError("polar angle undefined at the origin")
        v = math.atan2(bv, av)
        return (v, (av * bx - bv * ax) / r2, (av * by - bv * ay) / r2)


class Tabulated(FieldExpr):
    """Cubic-spline interpolant applied to a child expression.

    Derivative orders above 2 are refused: exotic angular profiles enter
    the Hamiltonian only through S(theta) and S'(theta).
    """

    MAX_DERIV = 2

    __slots__ = ("spline", "child", "lo", "hi", "periodic", "period")

    def __init__(self, abscissa, values, child: FieldExpr, periodic: bool = False):
        abscissa = np.asarray(abscissa, dtype=float)
        values = np.asarray(values, dtype=float)
        if abscissa.ndim != 1 or abscissa.size < 4:
            raise ValueError("tabulated node needs at least 4 samples")
        if np.any(np.diff(abscissa) <= 0):
            raise ValueError("tabulated abscissa must be strictly increasing")
        if periodic and abs(values[0] - values[-1]) > 1e-8 * max(1.0, np.max(np.abs(values))):
            raise ValueError("periodic table endpoints disagree")
        bc = "periodic" if periodic else "natural"
        if periodic:
            values = values.copy()
            values[-1] = values[0]
        self.spline = CubicSpline(abscissa, values, bc_type=bc)
        self.child = child
        self.lo = float(abscissa[0])
        self.hi = float(abscissa[-1])
        self.periodic = periodic
        self.period = self.hi - self.lo

    def children(self):
        return (self.child,)

    @property
    def domain(self):
        return (self.lo, self.hi)

    def _wrap(self, t: float) -> float:
        if self.periodic:
            return self.lo + (t - self.lo) % self.period
        if t < self.lo or t > self.hi:
            raise DomainError(
                f"tabulated node evaluated at {t}, outside [{self.lo}, {self.hi}]"
            )
        return t

    @_memoized
    def _jet(self, ju, jv, memo):
        if ju.order > self.MAX_DERIV:
            raise EvaluationError(
                f"tabulated node refuses derivative order {ju.order} > {self.MAX_DERIV}"
            )
        T = self.child._jet(ju, jv, memo)
        t0 = self._wrap(T.value)
        coeffs = np.array(
            [self.spline(t0, nu) / math.factorial(nu) for nu in range(ju.order + 1)]
        )
        return T.compose(coeffs)

    @_memoized
    def _dual(self, x, y, memo):
        tv, tx, ty = self.child._dual(x, y, memo)
        t0 = self._wrap(tv)
        v = float(self.spline(t0))
        d = float(self.spline(t0, 1))
        return (v, d * tx, d * ty)


class Deriv(FieldExpr):
    """Lazy partial derivative d^(i+j) child / du^i dv^j.

    Evaluation raises the jet order of the child by (i + j) and shifts
    the coefficient table; nothing is expanded symbolically.
    """

    __slots__ = ("child", "i", "j")

    def __init__(self, child: FieldExpr, i: int, j: int):
        if isinstance(child, Deriv):
            i, j, child = i + child.i, j + child.j, child.child
        self.child = child
        self.i = i
        self.j = j

    def children(self):
        return (self.child,)

    @_memoized
    def _jet(self, ju, jv, memo):
        # re-enters the walk at a raised order; the shared memo is keyed
        # by (node, order), so sibling Deriv nodes reuse child jets
        K = ju.order
        i, j = self.i, self.j
        Kc = K + i + j
        if Kc > K_MAX:
            raise EvaluationError(f"derivative ({i},{j}) overflows K_MAX on a jet of order {K}")
        u0, v0 = ju.c[0, 0], jv.c[0, 0]
        if not _is_variable_jet(ju, 0) or not _is_variable_jet(jv, 1):
            raise EvaluationError("Deriv nodes evaluate only on coordinate jets")
        juc = Jet2.variable(u0, 0, Kc, ju.base)
        jvc = Jet2.variable(v0, 1, Kc, jv.base)
        inner = self.child._jet(juc, jvc, memo)
        out = Jet2(K, base=ju.base)
        for a in range(K + 1):
            for b in range(K + 1 - a):
                out.c[a, b] = inner.c[a + i, b + j] * (
                    math.comb(a + i, i) * math.comb(b + j, j)
                ) * math.factorial(i) * math.factorial(j)
        return out

    @_memoized
    def _dual(self, x, y, memo):
        i, j = self.i, self.j
        base = (x, y)
        ju = Jet2.variable(x, 0, i + j + 1, base)
        jv = Jet2.variable(y, 1, i + j + 1, base)
        jet = self.child._jet(ju, jv, memo)
        return (
            jet.deriv(i, j),
            jet.deriv(i + 1, j),
            jet.deriv(i, j + 1),
        )


def _is_variable_jet(j: Jet2, index: int) -> bool:
    if j.order == 0:
        return True
    probe = j.c.copy()
    probe[0, 0] = 0.0
    if index == 0:
        probe[1, 0] -= 1.0
    else:
        probe[0, 1] -= 1.0
    return not np.any(probe)


def const(v: float) -> Const:
    return Const(v)


def substitute(expr: FieldExpr, mapping: dict) -> FieldExpr:
    """Rebuild a DAG with selected nodes replaced (keyed by identity)."""
    memo: dict[int, FieldExpr] = {}

    def rec(node):
        for k, v in mapping.items():
            if node is k:
                return v
        hit = memo.get(id(node))
        if hit is not None:
            return hit
        kids = node.children()
        if not kids:
            out = node
        else:
            new_kids = tuple(rec(c) for c in kids)
            if all(a is b for a, b in zip(new_kids, kids)):
                out = node
            elif isinstance(node, Sum):
                out = Sum(new_kids)
            elif isinstance(node, Prod):
                out = Prod(*new_kids)
            elif isinstance(node, Quot):
                out = Quot(*new_kids)
            elif isinstance(node, Pow):
                out = Pow(new_kids[0], node.p)
            elif isinstance(node, Sin):
                out = Sin(new_kids[0])
            elif isinstance(node, Cos):
                out = Cos(new_kids[0])
            elif isinstance(node, Sqrt):
                out = Sqrt(new_kids[0])
            elif isinstance(node, PolarAngle):
                out = PolarAngle(*new_kids)
            elif isinstance(node, Deriv):
                out = Deriv(new_kids[0], node.i, node.j)
            elif isinstance(node, Tabulated):
                out = object.__new__(Tabulated)
                out.spline = node.spline
                out.child = new_kids[0]
                out.lo, out.hi = node.lo, node.hi
                out.periodic, out.period = node.periodic, node.period
            else:
                raise TypeError(f"cannot substitute inside {type(node).__name__}")
        memo[id(node)] = out
        return out

    return rec(expr)


# ---------------------------------------------------------------------------
# Module operations
# ---------------------------------------------------------------------------


def jet_eval(f: FieldExpr, point, order: int) -> Jet2:
    """Taylor coefficients of ``f`` at ``point`` up to total ``order``."""
    if order > K_MAX:
        raise ValueError(f"order {order} exceeds K_MAX = {K_MAX}")
    u0, v0 = float(point[0]), float(point[1])
    base = (u0, v0)
    ju = Jet2.variable(u0, 0, order, base)
    jv = Jet2.variable(v0, 1, order, base)
    return f._jet(ju, jv, {})


def deriv_at(f: FieldExpr, point, multi_index) -> float:
    """Partial derivative of ``f`` at ``point`` for the given (i, j)."""
    i, j = int(multi_index[0]), int(multi_index[1])
    jet = jet_eval(f, point, i + j)
    return jet.deriv(i, j)


def fourier_project(g, harmonic: int, kind: str, nodes: int = 64) -> float:
    """(1/pi) * integral over [0, 2pi) of g(theta) * trig(s theta).

    Uniform trapezoid quadrature on a periodic integrand, exact for
    trigonometric polynomials of degree below ``nodes/2``.  For s = 0 and
    kind 'cos' this returns twice the mean of g, consistent with the same
    1/pi normalisation.
    """
    s = int(harmonic)
    if s < 0:
        raise ValueError("harmonic must be non-negative")
    if kind not in ("sin", "cos"):
        raise ValueError("kind must be 'sin' or 'cos'")
    if nodes < 2 * s + 1:
        raise ValueError(f"need at least {2 * s + 1} quadrature nodes for harmonic {s}")
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    try:
        vals = np.array([float(g(t)) for t in theta])
    except EvaluationError:
        raise
    trig = np.sin(s * theta) if kind == "sin" else np.cos(s * theta)
    return float(2.0 / nodes * np.sum(vals * trig))


def load_angular_table(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column CSV ``theta,value`` with strictly increasing theta."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "theta,value":
            raise ValueError(f"expected header 'theta,value', got {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    theta, values = data[:, 0], data[:, 1]
    if np.any(np.diff(theta) <= 0):
        raise ValueError("theta column must be strictly increasing")
    return theta, values

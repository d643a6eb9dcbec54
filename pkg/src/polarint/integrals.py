"""Leading terms of Nth-order integrals: bases, classification, reductions.

The degree-N part of a polynomial integral is parametrised either by the
(N+1)(N+2)/2 constants A[q, m, n] multiplying L_z^q p_x^m p_y^n, or by the
polar constants B1/B2[q, s, k] multiplying L_z^q P^(s+2k) cos/sin(s Phi).
Both index sets are keyed here by the free pairs: (m, n) with q = N-m-n on
the A side, (s, k) with q = N-s-2k on the B side.

The change of basis is block-diagonal in the power of L_z and exact: each
momentum-degree-d block is expanded over monomials p_x^m p_y^(d-m) with
integer coefficients and inverted once in rational arithmetic.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .jetfield import Const, FieldExpr, Prod, Sum, VAR_U, VAR_V
from .observables import MomentumPolynomial

N_MAX = 8

__all__ = [
    "N_MAX",
    "LeadingTermSpec",
    "PolarLeadingSpec",
    "build_leading_cartesian",
    "a_to_b",
    "b_to_a",
    "split_I_II",
    "classify",
    "singlet_reduce",
]


def _check_order(N: int):
    if not (1 <= N <= N_MAX):
        raise ValueError(f"order N must be in [1, {N_MAX}], got {N}")


@dataclass(frozen=True)
class LeadingTermSpec:
    """Constants A[N-m-n, m, n] of the leading term, keyed by (m, n)."""

    N: int
    A: dict = field(default_factory=dict)

    def __post_init__(self):
        _check_order(self.N)
        clean = {}
        for (m, n), v in self.A.items():
            m, n = int(m), int(n)
            if m < 0 or n < 0 or m + n > self.N:
                raise ValueError(f"A slot (m={m}, n={n}) outside 0 <= m+n <= {self.N}")
            if v != 0.0:
                clean[(m, n)] = float(v)
        object.__setattr__(self, "A", clean)

    @property
    def slot_count(self) -> int:
        return (self.N + 1) * (self.N + 2) // 2

    def to_json(self) -> str:
        return json.dumps(
            {"N": self.N, "A": [[m, n, v] for (m, n), v in sorted(self.A.items())]}
        )

    @classmethod
    def from_json(cls, text: str) -> "LeadingTermSpec":
        d = json.loads(text)
        return cls(N=int(d["N"]), A={(int(m), int(n)): float(v) for m, n, v in d["A"]})


@dataclass(frozen=True)
class PolarLeadingSpec:
    """Polar constants B1/B2[N-s-2k, s, k], keyed by (s, k); B2 needs s > 0."""

    N: int
    B1: dict = field(default_factory=dict)
    B2: dict = field(default_factory=dict)

    def __post_init__(self):
        _check_order(self.N)
        for name, table, smin in (("B1", self.B1, 0), ("B2", self.B2, 1)):
            clean = {}
            for (s, k), v in table.items():
                s, k = int(s), int(k)
                if s < smin or k < 0 or s + 2 * k > self.N:
                    raise ValueError(f"{name} slot (s={s}, k={k}) invalid for N={self.N}")
                if v != 0.0:
                    clean[(s, k)] = float(v)
            object.__setattr__(self, name, clean)

    @staticmethod
    def slots(N: int):
        """All (s, k, comp) triples, comp 1 for the cos row, 2 for sin."""
        out = []
        for s in range(N + 1):
            for k in range((N - s) // 2 + 1):
                out.append((s, k, 1))
                if s > 0:
                    out.append((s, k, 2))
        return out

    @property
    def slot_count(self) -> int:
        return (self.N + 1) * (self.N + 2) // 2

    def get(self, s: int, k: int, comp: int) -> float:
        table = self.B1 if comp == 1 else self.B2
        return table.get((s, k), 0.0)

    def populated(self):
        for (s, k), v in self.B1.items():
            yield (s, k, 1, v)
        for (s, k), v in self.B2.items():
            yield (s, k, 2, v)

    def to_json(self) -> str:
        return json.dumps(
            {
                "N": self.N,
                "B1": [[s, k, v] for (s, k), v in sorted(self.B1.items())],
                "B2": [[s, k, v] for (s, k), v in sorted(self.B2.items())],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PolarLeadingSpec":
        d = json.loads(text)
        return cls(
            N=int(d["N"]),
            B1={(int(s), int(k)): float(v) for s, k, v in d["B1"]},
            B2={(int(s), int(k)): float(v) for s, k, v in d["B2"]},
        )


# ---------------------------------------------------------------------------
# Exact momentum-block expansion
# ---------------------------------------------------------------------------
#
# For fixed momentum degree d the B-side basis functions are
#   u_{s,1} = (px^2+py^2)^k Re[(px+ipy)^s],  u_{s,2} = ... Im[...],  s+2k = d,
# and the A-side basis is the monomials px^m py^(d-m).  The integer matrix
# E_d maps B-block coefficients to monomial coefficients; E_d^{-1} is cached
# in rational arithmetic.

_block_lock = threading.Lock()
_block_cache: dict = {}


def _bslots_of_degree(d: int):
    out = []
    for s in range(d, -1, -2):
        k = (d - s) // 2
        out.append((s, k, 1))
        if s > 0:
            out.append((s, k, 2))
    return out


def _expand_b_slot(s: int, k: int, comp: int) -> dict:
    """Monomial coefficients of (p^2)^k * Re/Im[(px + i py)^s] over px^m py^t."""
    out: dict = {}
    for a in range(k + 1):
        ca = math.comb(k, a)
        for t in range(s + 1):
            if comp == 1 and t % 2 == 0:
                c = math.comb(s, t) * (-1) ** (t // 2)
            elif comp == 2 and t % 2 == 1:
                c = math.comb(s, t) * (-1) ** ((t - 1) // 2)
            else:
                continue
            key = (2 * (k - a) + s - t, 2 * a + t)
            out[key] = out.get(key, 0) + ca * c
    return out


def _degree_block(d: int):
    """(slots, E, Einv): E[m][col] over monomials px^m py^(d-m), exact."""
    with _block_lock:
        hit = _block_cache.get(d)
        if hit is not None:
            return hit
    slots = _bslots_of_degree(d)
    n = d + 1
    E = [[Fraction(0)] * n for _ in range(n)]
    for col, (s, k, comp) in enumerate(slots):
        for (m, t), c in _expand_b_slot(s, k, comp).items():
            E[m][col] = Fraction(c)
    Einv = _fraction_inverse(E)
    with _block_lock:
        _block_cache[d] = (slots, E, Einv)
    return slots, E, Einv


def _fraction_inverse(M):
    n = len(M)
    aug = [row[:] + [Fraction(int(i == r)) for i in range(n)] for r, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def b_to_a(spec: PolarLeadingSpec) -> LeadingTermSpec:
    """Exact expansion of the polar basis into L_z^q p_x^m p_y^n monomials."""
    A: dict = {}
    for (s, k, comp, v) in spec.populated():
        for (m, t), c in _expand_b_slot(s, k, comp).items():
            key = (m, t)
            A[key] = A.get(key, 0.0) + v * c
    return LeadingTermSpec(N=spec.N, A=A)


def a_to_b(spec: LeadingTermSpec) -> PolarLeadingSpec:
    """Inverse of :func:`b_to_a`; exact block solve per momentum degree."""
    B1: dict = {}
    B2: dict = {}
    by_degree: dict = {}
    for (m, n), v in spec.A.items():
        by_degree.setdefault(m + n, {})[m] = by_degree.setdefault(m + n, {}).get(m, 0.0) + v
    for d, mono in by_degree.items():
        slots, _E, Einv = _degree_block(d)
        for col, (s, k, comp) in enumerate(slots):
            acc = 0.0
            for m, v in mono.items():
                f = Einv[col][m]
                if f:
                    acc += v * float(f)
            if acc != 0.0:
                if comp == 1:
                    B1[(s, k)] = B1.get((s, k), 0.0) + acc
                else:
                    B2[(s, k)] = B2.get((s, k), 0.0) + acc
    return PolarLeadingSpec(N=spec.N, B1=B1, B2=B2)


# ---------------------------------------------------------------------------
# Construction as a momentum polynomial
# ---------------------------------------------------------------------------


def leading_coefficient_polys(spec: LeadingTermSpec) -> dict:
    """Coefficient polynomials over (x, y) of each momentum monomial.

    Returns {(i, j): {(a, b): coeff}} with i + j = N, expanding every
    L_z^q factor binomially.  Exact integer combinatorics times the A values.
    """
    N = spec.N
    out: dict = {}
    for (m, n), v in spec.A.items():
        q = N - m - n
        for t in range(q + 1):
            c = v * math.comb(q, t) * (-1) ** t
            key = (m + t, n + q - t)          # momentum exponents
            mono = (q - t, t)                  # x^(q-t) y^t
            slot = out.setdefault(key, {})
            slot[mono] = slot.get(mono, 0.0) + c
    return {k: {mk: mv for mk, mv in p.items() if mv != 0.0} for k, p in out.items()}


def _poly_to_field(poly: dict) -> FieldExpr:
    terms = []
    for (a, b), c in sorted(poly.items()):
        e: FieldExpr = Const(c)
        for _ in range(a):
            e = Prod(e, VAR_U)
        for _ in range(b):
            e = Prod(e, VAR_V)
        terms.append(e)
    if not terms:
        return Const(0.0)
    return terms[0] if len(terms) == 1 else Sum(tuple(terms))


def build_leading_cartesian(spec: LeadingTermSpec) -> MomentumPolynomial:
    """The leading term as a momentum polynomial, homogeneous of degree N."""
    polys = leading_coefficient_polys(spec)
    return MomentumPolynomial({k: _poly_to_field(p) for k, p in polys.items()})


def build_leading_polar(spec: PolarLeadingSpec) -> MomentumPolynomial:
    return build_leading_cartesian(b_to_a(spec))


# ---------------------------------------------------------------------------
# Splits, classification, singlet reduction
# ---------------------------------------------------------------------------


def split_I_II(spec: PolarLeadingSpec):
    """Split into the part seen by the linear compatibility condition
    (slots with N-1 <= s+2k <= N) and the complementary part (s+2k <= N-2)."""
    N = spec.N

    def pick(table, lo, hi):
        return {sk: v for sk, v in table.items() if lo <= sk[0] + 2 * sk[1] <= hi}

    part_I = PolarLeadingSpec(N=N, B1=pick(spec.B1, N - 1, N), B2=pick(spec.B2, N - 1, N))
    part_II = PolarLeadingSpec(N=N, B1=pick(spec.B1, 0, N - 2), B2=pick(spec.B2, 0, N - 2))
    return part_I, part_II


@dataclass(frozen=True)
class Classification:
    N: int
    weights: dict            # beta -> list of (s, k, comp)
    parity: dict             # (s, k, comp) -> 0 or 1, parity of N - 2k
    exotic: bool             # True when the LCC-visible part vanishes


def classify(spec: PolarLeadingSpec) -> Classification:
    """Group populated slots by scaling weight beta = s + 2k and parity.

    Under dilation with R = 0 each subclass scales as sigma^(-beta); the
    parity entry records (N - 2k) mod 2 per slot.  The exotic flag is set
    when no slot survives in the split's first part.
    """
    weights: dict = {}
    parity: dict = {}
    for (s, k, comp, _v) in spec.populated():
        beta = s + 2 * k
        weights.setdefault(beta, []).append((s, k, comp))
        parity[(s, k, comp)] = (spec.N - 2 * k) % 2
    part_I, _ = split_I_II(spec)
    exotic = not (part_I.B1 or part_I.B2)
    return Classification(N=spec.N, weights=weights, parity=parity, exotic=exotic)


def singlet_reduce(spec: PolarLeadingSpec):
    """Cancel the s = 0 sector by subtracting powers of the second-order
    integral and the Hamiltonian.

    Returns (reduced, corrections) with corrections[(i, j)] = a_ij such
    that Y - sum a_ij X^i H^j has no singlet slots at leading order: the
    slot L_z^(N-2k) P^(2k) is matched by i = (N-2k)/2, j = k with
    a_ij = 2^k B1[0, k].  Only even N reduces this way; odd N is deferred
    to numerical dependence detection.
    """
    N = spec.N
    if N % 2 != 0:
        raise ValueError("singlet reduction applies to even N only")
    corrections: dict = {}
    B1 = dict(spec.B1)
    for (s, k), v in list(B1.items()):
        if s == 0 and v != 0.0:
            corrections[((N - 2 * k) // 2, k)] = 2.0 ** k * v
            del B1[(s, k)]
    reduced = PolarLeadingSpec(N=N, B1=B1, B2=dict(spec.B2))
    return reduced, corrections

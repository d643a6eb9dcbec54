"""Linear compatibility condition machinery and nullspace solvers.

The compatibility condition is a linear PDE of order N on the potential
whose coefficients are determined by the leading term of the candidate
integral.  It is assembled here as a finite linear combination

    LCC(x, y) = sum over (a, b) of  W[a, b](x, y) * d^(a+b) V / dx^a dy^b

with exact polynomial weights W obtained from the f-polynomials by the
Leibniz rule.  This single Cartesian assembly also powers the polar
evaluator (through coordinate-change jets) and the radial extraction
(multiply by r^(N+2), differentiate twice along the ray, project on
sin/cos harmonics), so there is one source of truth for the PDE.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .integrals import LeadingTermSpec, PolarLeadingSpec, b_to_a, split_I_II
from .jetfield import (
    Const,
    FieldExpr,
    Jet2,
    PolarAngle,
    Pow,
    Sqrt,
    VAR_U,
    VAR_V,
    jet_eval,
    substitute,
)
from .poly2 import Poly2
from .radial import RadialPart
from . import trig

R_MIN = 1e-6
SV_RTOL = 1e-8
GAP_FACTOR = 1e2
ZERO_MATRIX_RTOL = 1e-10

__all__ = [
    "f_polys",
    "lcc_weights",
    "lcc_cartesian",
    "lcc_cartesian_with_scale",
    "lcc_polar",
    "radial_residuals",
    "RadialResidualSystem",
    "assemble_radial_system",
    "admissible_b_space",
    "standard_angular_nullspace",
    "NullspaceReport",
    "AngularNullspaceReport",
    "AmbiguousRankError",
]


class AmbiguousRankError(RuntimeError):
    """Rank decision had a singular-value gap below the mandatory factor."""

    def __init__(self, message, singular_values):
        super().__init__(message)
        self.singular_values = np.asarray(singular_values)


# ---------------------------------------------------------------------------
# f-polynomials and LCC weights
# ---------------------------------------------------------------------------


def f_polys(spec: LeadingTermSpec) -> list[Poly2]:
    """The N+1 potential-independent polynomials entering the LCC.

    f_j(x, y) = sum over n <= N-j, m <= j of
        binom(N-m-n, j-m) A[m, n] x^(N-j-n) (-y)^(j-m),
    equal to the coefficient of p_x^j p_y^(N-j) in the expanded leading term.
    """
    N = spec.N
    out = []
    for j in range(N + 1):
        terms: dict = {}
        for (m, n), v in spec.A.items():
            if n > N - j or m > j:
                continue
            c = math.comb(N - m - n, j - m) * v * (-1.0) ** (j - m)
            if c != 0.0:
                key = (N - j - n, j - m)
                terms[key] = terms.get(key, 0.0) + c
        out.append(Poly2(terms))
    return out


def lcc_weights(spec: LeadingTermSpec) -> dict:
    """Exact polynomial weights of each V-derivative slot in the LCC.

    Returns {(a, b): Poly2} with 1 <= a + b <= N, from the Leibniz
    expansion of the N-1 outer derivatives.
    """
    N = spec.N
    fs = f_polys(spec)
    weights: dict = {}

    def accumulate(p: Poly2, ao: int, bo: int, vslot, sign: float):
        for i in range(ao + 1):
            ci = math.comb(ao, i)
            for l in range(bo + 1):
                dp = p.diff(i, l)
                if not dp:
                    continue
                c = sign * ci * math.comb(bo, l)
                key = (vslot[0] + ao - i, vslot[1] + bo - l)
                cur = weights.get(key)
                add = dp.scaled(c)
                weights[key] = cur + add if cur is not None else add

    for j in range(N):
        sign = (-1.0) ** j
        ao, bo = N - 1 - j, j
        accumulate(fs[j + 1].scaled(j + 1.0), ao, bo, (1, 0), sign)
        accumulate(fs[j].scaled(N - j * 1.0), ao, bo, (0, 1), sign)
    return {k: p for k, p in weights.items() if p}


def _combine(weights: dict, vderiv, point) -> tuple[float, float]:
    """Contract weights against V-derivative values; returns (value, scale)."""
    x0, y0 = point
    total = 0.0
    scale = 0.0
    for (a, b), p in weights.items():
        term = p(x0, y0) * vderiv(a, b)
        total += term
        scale = max(scale, abs(term))
    return total, scale


def lcc_cartesian_with_scale(spec: LeadingTermSpec, V: FieldExpr, point) -> tuple[float, float]:
    """LCC residual at a point plus the max intermediate term magnitude."""
    weights = lcc_weights(spec)
    jet = jet_eval(V, point, spec.N)
    return _combine(weights, jet.deriv, tuple(point))


def lcc_cartesian(spec: LeadingTermSpec, V: FieldExpr, point) -> float:
    """Linear compatibility residual for a potential given over (x, y)."""
    return lcc_cartesian_with_scale(spec, V, point)[0]


# ---------------------------------------------------------------------------
# Polar evaluation through coordinate-change jets
# ---------------------------------------------------------------------------


def separable_polar_field(R: RadialPart | FieldExpr, S: FieldExpr | None) -> FieldExpr:
    """V(r, theta) = R(r) + S(theta)/r^2 over the polar chart (u=r, v=theta)."""
    Rf = R.field() if isinstance(R, RadialPart) else R
    parts = [Rf]
    if S is not None:
        s_theta = substitute(S, {VAR_U: VAR_V})
        parts.append(s_theta / (VAR_U * VAR_U))
    expr = parts[0]
    for p in parts[1:]:
        expr = expr + p
    return expr


_RADIUS = Sqrt(VAR_U * VAR_U + VAR_V * VAR_V)
_ANGLE = PolarAngle(VAR_U, VAR_V)


def separable_cartesian_field(R: RadialPart | FieldExpr, S: FieldExpr | None) -> FieldExpr:
    """The same separable potential rendered over Cartesian (x, y)."""
    vp = separable_polar_field(R, S)
    return substitute(vp, {VAR_U: _RADIUS, VAR_V: _ANGLE})


def _polar_chart_jet(vp: FieldExpr, r: float, theta: float, order: int) -> Jet2:
    """Cartesian-derivative jet of a polar-chart field at (r cos t, r sin t).

    Evaluates the field on the jets of r(x, y) and theta(x, y); a different
    computational path from the Cartesian evaluator, used for cross-checks.
    """
    x0, y0 = r * math.cos(theta), r * math.sin(theta)
    base = (x0, y0)
    ju = Jet2.variable(x0, 0, order, base)
    jv = Jet2.variable(y0, 1, order, base)
    memo: dict = {}
    r_jet = _RADIUS._jet(ju, jv, memo)
    t_jet = _ANGLE._jet(ju, jv, memo)
    return vp._jet(r_jet, t_jet, {})


def lcc_polar(
    spec: LeadingTermSpec,
    R: RadialPart | FieldExpr,
    S: FieldExpr | None,
    point,
    with_scale: bool = False,
):
    """LCC residual for the separable potential at polar point (r, theta).

    Computed as the Cartesian condition evaluated through coordinate-change
    jets, never from a transcribed polar formula.
    """
    r, theta = float(point[0]), float(point[1])
    if r <= R_MIN:
        raise ValueError(f"require r > {R_MIN}")
    vp = separable_polar_field(R, S)
    jet = _polar_chart_jet(vp, r, theta, spec.N)
    weights = lcc_weights(spec)
    x0, y0 = r * math.cos(theta), r * math.sin(theta)
    value, scale = _combine(weights, jet.deriv, (x0, y0))
    return (value, scale) if with_scale else value


# ---------------------------------------------------------------------------
# Radial extraction: d^2/dr^2 [ r^(N+2) LCC ] and harmonic separation
# ---------------------------------------------------------------------------


def _tjet_mul(a, b):
    return (
        a[0] * b[0],
        a[0] * b[1] + a[1] * b[0],
        a[0] * b[2] + a[1] * b[1] + a[2] * b[0],
    )


def _radial_second_derivative(weights: dict, vjet: Jet2, N: int, r: float, theta: float):
    """(d^2/dr^2)[r^(N+2) LCC] at one polar point, with a term scale.

    The potential enters through its Cartesian jet of order N+2 at the
    point; r-derivatives are directional derivatives along (cos t, sin t),
    carried on truncated order-2 jets in the ray parameter.
    """
    c, s = math.cos(theta), math.sin(theta)
    x0, y0 = r * c, r * s
    L0 = L1 = L2 = 0.0
    scale = 0.0
    dv = vjet.deriv
    for (a, b), p in weights.items():
        d0 = dv(a, b)
        d1 = c * dv(a + 1, b) + s * dv(a, b + 1)
        d2 = c * c * dv(a + 2, b) + 2 * c * s * dv(a + 1, b + 1) + s * s * dv(a, b + 2)
        v = (d0, d1, d2 / 2.0)
        p0 = p(x0, y0)
        p1 = c * p.diff(1, 0)(x0, y0) + s * p.diff(0, 1)(x0, y0)
        p2 = (
            c * c * p.diff(2, 0)(x0, y0)
            + 2 * c * s * p.diff(1, 1)(x0, y0)
            + s * s * p.diff(0, 2)(x0, y0)
        )
        t = _tjet_mul((p0, p1, p2 / 2.0), v)
        L0 += t[0]
        L1 += t[1]
        L2 += t[2]
        scale = max(scale, abs(t[0]), abs(t[1]), abs(t[2]))
    rp = (
        r ** (N + 2),
        (N + 2.0) * r ** (N + 1),
        math.comb(N + 2, 2) * float(r ** N),
    )
    g2 = 2.0 * (rp[0] * L2 + rp[1] * L1 + rp[2] * L0)
    scale = scale * max(rp)
    return g2, scale


def _default_probe() -> FieldExpr:
    t = VAR_U
    from .jetfield import Cos, Sin

    return Cos(t) + Const(0.5) * Sin(Const(3.0) * t) + Const(0.25)


def quadrature_nodes(N: int) -> np.ndarray:
    """Uniform theta grid; 4N + 8 nodes oversample every harmonic needed."""
    M = 4 * N + 8
    return 2.0 * np.pi * np.arange(M) / M


def _harmonic_rows(values: np.ndarray, thetas: np.ndarray, N: int) -> np.ndarray:
    M = len(thetas)
    rows = np.empty(2 * N)
    for s in range(1, N + 1):
        rows[2 * (s - 1)] = 2.0 / M * np.sum(values * np.cos(s * thetas))
        rows[2 * (s - 1) + 1] = 2.0 / M * np.sum(values * np.sin(s * thetas))
    return rows


def radial_residuals(
    spec: PolarLeadingSpec,
    R: RadialPart | FieldExpr,
    r: float,
    probe_S: FieldExpr | None = None,
    with_scale: bool = False,
):
    """The 2N harmonic residuals of the twice-differentiated radial equation.

    Multiplies the polar LCC by r^(N+2), differentiates twice along the
    radius (which eliminates the angular part; any smooth probe_S gives the
    same result to roundoff) and projects on sin/cos of s theta, s = 1..N.
    """
    if r <= R_MIN:
        raise ValueError(f"require r > {R_MIN}")
    N = spec.N
    if probe_S is None:
        probe_S = _default_probe()
    weights = lcc_weights(b_to_a(spec))
    vp = separable_polar_field(R, probe_S)
    thetas = quadrature_nodes(N)
    g2 = np.empty(len(thetas))
    scale = 0.0
    for i, th in enumerate(thetas):
        vjet = _polar_chart_jet(vp, r, th, N + 2)
        g2[i], sc = _radial_second_derivative(weights, vjet, N, r, float(th))
        scale = max(scale, sc)
    rows = _harmonic_rows(g2, thetas, N)
    return (rows, scale) if with_scale else rows


# ---------------------------------------------------------------------------
# Residual system over the B-slot space
# ---------------------------------------------------------------------------


@dataclass
class RadialResidualSystem:
    """Stacked harmonic residual rows, linear in the B coefficients.

    Rows run over (radius, harmonic, sin/cos); columns over the probed
    slots.  ``scale`` is the largest intermediate assembly term, the
    reference for relative tolerances.
    """

    N: int
    radial: RadialPart
    radii: np.ndarray
    columns: list            # (s, k, comp) triples
    matrix: np.ndarray
    scale: float
    singular_values: np.ndarray = field(default=None)

    def svd(self):
        if self.singular_values is None:
            self.singular_values = np.linalg.svd(self.matrix, compute_uv=False)
        return self.singular_values

    def to_json(self) -> str:
        sv = self.svd()
        return json.dumps(
            {
                "N": self.N,
                "radial": self.radial.params(),
                "radii": list(self.radii),
                "columns": [list(c) for c in self.columns],
                "scale": self.scale,
                "spectrum": list(sv),
                "sv_rtol": SV_RTOL,
                "gap_factor": GAP_FACTOR,
            }
        )


def assemble_radial_system(
    N: int,
    radial: RadialPart,
    radii=None,
    probe_S: FieldExpr | None = None,
    include_singlets: bool = False,
    map_fn=map,
) -> RadialResidualSystem:
    """Column-by-column unit-coefficient probe of the radial residuals.

    The potential jet at each grid node is shared across columns, which
    makes the assembly linear-time in the number of slots.  ``map_fn``
    may be any order-preserving parallel map; row order is deterministic.
    """
    if radii is None:
        radii = np.geomspace(0.5, 4.0, 16)
    radii = np.asarray(radii, dtype=float)
    if probe_S is None:
        probe_S = _default_probe()
    columns = [
        (s, k, comp)
        for (s, k, comp) in PolarLeadingSpec.slots(N)
        if include_singlets or s > 0
    ]
    weight_tables = []
    for (s, k, comp) in columns:
        unit = PolarLeadingSpec(
            N=N,
            B1={(s, k): 1.0} if comp == 1 else {},
            B2={(s, k): 1.0} if comp == 2 else {},
        )
        weight_tables.append(lcc_weights(b_to_a(unit)))
    thetas = quadrature_nodes(N)
    vp = separable_polar_field(radial, probe_S)

    def rows_for_radius(r):
        vjets = [_polar_chart_jet(vp, float(r), float(th), N + 2) for th in thetas]
        block = np.empty((2 * N, len(columns)))
        scale = 0.0
        for ci, weights in enumerate(weight_tables):
            g2 = np.empty(len(thetas))
            for ti, th in enumerate(thetas):
                g2[ti], sc = _radial_second_derivative(
                    weights, vjets[ti], N, float(r), float(th)
                )
                scale = max(scale, sc)
            block[:, ci] = _harmonic_rows(g2, thetas, N)
        return block, scale

    blocks = list(map_fn(rows_for_radius, radii))
    matrix = np.vstack([b for b, _ in blocks])
    scale = max(s for _, s in blocks)
    return RadialResidualSystem(
        N=N, radial=radial, radii=radii, columns=columns, matrix=matrix, scale=scale
    )


@dataclass
class NullspaceReport:
    """Numerical nullspace of a residual matrix with its rank diagnostics."""

    columns: list
    basis: np.ndarray          # (dim, ncols), orthonormal rows
    singular_values: np.ndarray
    scale: float
    dimension: int
    gap: float
    matrix_zero: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "columns": [list(c) for c in self.columns],
                "dimension": self.dimension,
                "gap": self.gap,
                "matrix_zero": self.matrix_zero,
                "scale": self.scale,
                "spectrum": list(self.singular_values),
                "basis": [list(row) for row in self.basis],
            }
        )


def _nullspace_from_matrix(matrix, columns, scale) -> NullspaceReport:
    ncols = matrix.shape[1]
    entry_max = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    if entry_max < ZERO_MATRIX_RTOL * max(scale, 1.0):
        # every probe annihilated the residuals: the whole space is null
        return NullspaceReport(
            columns=columns,
            basis=np.eye(ncols),
            singular_values=np.zeros(min(matrix.shape)),
            scale=scale,
            dimension=ncols,
            gap=math.inf,
            matrix_zero=True,
        )
    u, sv, vt = np.linalg.svd(matrix)  # vt is (ncols, ncols)
    smax = sv[0]
    thresh = SV_RTOL * smax
    small = int(np.sum(sv < thresh))
    dim = small + max(0, ncols - len(sv))
    if dim == 0:
        gap = sv[-1] / thresh
    elif small == 0:
        gap = math.inf  # purely structural nullspace (wide matrix)
    else:
        kept = sv[sv >= thresh]
        largest_null = sv[len(sv) - small]
        gap = (kept[-1] / largest_null) if (kept.size and largest_null > 0) else math.inf
    if gap < GAP_FACTOR:
        raise AmbiguousRankError(
            f"singular-value gap {gap:.3g} below mandatory factor {GAP_FACTOR}",
            sv,
        )
    basis = vt[ncols - dim:] if dim else np.zeros((0, ncols))
    return NullspaceReport(
        columns=columns,
        basis=basis,
        singular_values=sv,
        scale=scale,
        dimension=dim,
        gap=float(gap),
        matrix_zero=False,
    )


def admissible_b_space(
    N: int,
    radial: RadialPart,
    radii=None,
    probe_S: FieldExpr | None = None,
    include_singlets: bool = False,
    map_fn=map,
) -> NullspaceReport:
    """Orthonormal basis of leading-term coefficient sets compatible with
    the twice-differentiated radial equations for the given R(r).

    Singlet (s = 0) slots are excluded by default: they are the leading
    terms of products of the Hamiltonian and the second-order integral, so
    they satisfy the conditions for every separable potential and carry no
    information about R.
    """
    system = assemble_radial_system(
        N, radial, radii=radii, probe_S=probe_S,
        include_singlets=include_singlets, map_fn=map_fn,
    )
    report = _nullspace_from_matrix(system.matrix, system.columns, system.scale)
    return report


# ---------------------------------------------------------------------------
# Standard angular nullspace (families of T = numerator/denominator)
# ---------------------------------------------------------------------------


@dataclass
class AngularNullspaceReport:
    family: str
    labels: list               # numerator constant labels
    basis: np.ndarray
    singular_values: np.ndarray
    dimension: int
    gap: float
    matrix_zero: bool
    scale: float
    source_norm: float         # LCC of the radial part alone on the grid
    source_solvable: bool      # whether columns can cancel the source
    grid: list

    def reconstruct_S(self, coeffs, spec: PolarLeadingSpec) -> FieldExpr:
        fam = trig.FAMILIES[self.family]
        den = trig.family_denominator(fam, spec)
        num = trig.TrigPoly()
        for c, label in zip(coeffs, self.labels):
            basis = trig.numerator_basis(label)
            for s, (a, b) in basis.coeffs.items():
                num = num.add(s, a=c * a, b=c * b)
        return trig.ratio_derivative_field(num, den)


def standard_angular_nullspace(
    spec: PolarLeadingSpec,
    family: str,
    radial_coeff: float = 1.0,
    n_theta: int = 24,
    radii=(0.7, 1.0, 1.5, 2.1),
    rng=None,
) -> AngularNullspaceReport:
    """Admissible numerator constants of the family's angular profile.

    The LCC residual of V = R + T'/r^2 is linear in the numerator
    constants of T once the leading spec (hence the denominator) is fixed;
    this samples the residual on an (r, theta) grid, assembles the linear
    map by unit probes and returns its numerical nullspace.  The residual
    of the radial part alone (the inhomogeneous term) is reported with a
    solvability flag rather than silently mixed in.
    """
    fam = trig.FAMILIES.get(family)
    if fam is None:
        raise ValueError(f"unknown family {family!r}; options: {sorted(trig.FAMILIES)}")
    if spec.N % 2 != fam.n_parity:
        raise ValueError(f"family {family!r} applies to N with parity {fam.n_parity}")
    part_I, _ = split_I_II(spec)
    if not (part_I.B1 or part_I.B2):
        raise ValueError("spec has no LCC-visible slots; use the exotic machinery")
    den = trig.family_denominator(fam, spec)
    if not den:
        raise ValueError("family denominator is identically zero for this spec")

    radial = {
        "kepler": RadialPart("kepler", a=radial_coeff),
        "oscillator": RadialPart("oscillator", b=radial_coeff),
        "zero": RadialPart("zero"),
    }[fam.radial]

    # theta nodes clear of denominator zeros
    den_amp = den.max_amplitude()
    if rng is None:
        rng = np.random.default_rng(0)
    thetas = []
    attempts = 0
    while len(thetas) < n_theta:
        t = float(rng.uniform(0.05, 2 * math.pi - 0.05))
        if abs(den(t)) > 0.25 * den_amp:
            thetas.append(t)
        attempts += 1
        if attempts > 200 * n_theta:
            raise ValueError("could not sample theta nodes away from denominator zeros")
    grid = [(float(r), t) for r in radii for t in thetas]

    aspec = b_to_a(spec)
    labels = trig.numerator_labels(fam, spec.N)
    columns = np.empty((len(grid), len(labels)))
    scale = 0.0
    for ci, label in enumerate(labels):
        S = trig.ratio_derivative_field(trig.numerator_basis(label), den)
        for gi, (r, t) in enumerate(grid):
            v, sc = lcc_polar(aspec, RadialPart("zero"), S, (r, t), with_scale=True)
            columns[gi, ci] = v
            scale = max(scale, sc)
    source = np.empty(len(grid))
    for gi, (r, t) in enumerate(grid):
        v, sc = lcc_polar(aspec, radial, None, (r, t), with_scale=True)
        source[gi] = v
        scale = max(scale, sc)

    report = _nullspace_from_matrix(columns, labels, scale)
    source_norm = float(np.max(np.abs(source)))
    if source_norm < ZERO_MATRIX_RTOL * max(scale, 1.0):
        solvable = True
    else:
        sol, *_ = np.linalg.lstsq(columns, -source, rcond=None)
        resid = float(np.max(np.abs(columns @ sol + source)))
        solvable = resid < 1e-8 * max(scale, 1.0)
    return AngularNullspaceReport(
        family=family,
        labels=labels,
        basis=report.basis,
        singular_values=report.singular_values,
        dimension=report.dimension,
        gap=report.gap,
        matrix_zero=report.matrix_zero,
        scale=scale,
        source_norm=source_norm,
        source_solvable=solvable,
        grid=grid,
    )

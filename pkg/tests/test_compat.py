import math

import numpy as np
import pytest

from polarint.compat import (
    AmbiguousRankError,
    admissible_b_space,
    assemble_radial_system,
    f_polys,
    lcc_cartesian,
    lcc_cartesian_with_scale,
    lcc_polar,
    lcc_weights,
    radial_residuals,
    separable_cartesian_field,
    standard_angular_nullspace,
)
from polarint.integrals import (
    LeadingTermSpec,
    PolarLeadingSpec,
    a_to_b,
    b_to_a,
    leading_coefficient_polys,
)
from polarint.jetfield import Const, Cos, Sin, VAR_U
from polarint.radial import RadialPart
from polarint.poly2 import Poly2


def random_a_spec(rng, N):
    A = {}
    for m in range(N + 1):
        for n in range(N + 1 - m):
            if rng.uniform() < 0.6:
                A[(m, n)] = float(rng.uniform(-1, 1))
    if not A:
        A[(0, 0)] = 1.0
    return LeadingTermSpec(N=N, A=A)


def random_trig_S(rng, top=3):
    expr = Const(float(rng.uniform(-0.5, 0.5)))
    for s in range(1, top + 1):
        expr = expr + Const(float(rng.uniform(-1, 1))) * Cos(Const(float(s)) * VAR_U)
        expr = expr + Const(float(rng.uniform(-1, 1))) * Sin(Const(float(s)) * VAR_U)
    return expr


# --- f polynomials ---------------------------------------------------------


def monomial_extraction_oracle(spec):
    """Independent oracle: coefficient of p_x^j p_y^(N-j) in the expanded
    leading term, via the generic monomial expansion."""
    polys = leading_coefficient_polys(spec)
    N = spec.N
    return [Poly2(polys.get((j, N - j), {})) for j in range(N + 1)]


def test_f_polys_lz_squared():
    spec = LeadingTermSpec(N=2, A={(0, 0): 1.0})
    fs = f_polys(spec)
    assert fs[0] == Poly2({(2, 0): 1.0})
    assert fs[1] == Poly2({(1, 1): -2.0})
    assert fs[2] == Poly2({(0, 2): 1.0})


def test_f_polys_pure_momentum():
    spec = LeadingTermSpec(N=2, A={(2, 0): 1.0})  # p_x^2
    fs = f_polys(spec)
    assert fs[0] == Poly2() and fs[1] == Poly2()
    assert fs[2] == Poly2({(0, 0): 1.0})


def test_f_polys_zero_spec():
    spec = LeadingTermSpec(N=3, A={})
    assert all(not f for f in f_polys(spec))


def test_f_polys_against_monomial_oracle():
    rng = np.random.default_rng(0)
    for N in range(1, 7):
        for _ in range(50):
            spec = random_a_spec(rng, N)
            got = f_polys(spec)
            want = monomial_extraction_oracle(spec)
            for g, w in zip(got, want):
                keys = set(g.terms) | set(w.terms)
                for k in keys:
                    assert g.terms.get(k, 0.0) == pytest.approx(
                        w.terms.get(k, 0.0), abs=1e-12
                    )


# --- Cartesian LCC ---------------------------------------------------------


def test_lcc_constant_potential_vanishes():
    rng = np.random.default_rng(1)
    spec = random_a_spec(rng, 4)
    V = Const(3.7)
    for _ in range(5):
        pt = tuple(rng.uniform(0.4, 1.5, size=2))
        assert lcc_cartesian(spec, V, pt) == 0.0


def test_lcc_linear_in_potential():
    rng = np.random.default_rng(2)
    spec = random_a_spec(rng, 3)
    S1, S2 = random_trig_S(rng), random_trig_S(rng)
    V1 = separable_cartesian_field(RadialPart("oscillator", b=0.5), S1)
    V2 = separable_cartesian_field(RadialPart("kepler", a=-1.0), S2)
    lam = 1.6180339887
    V12 = V1 + Const(lam) * V2
    for _ in range(10):
        r = rng.uniform(0.6, 1.8)
        t = rng.uniform(0, 2 * math.pi)
        pt = (r * math.cos(t), r * math.sin(t))
        a, sa = lcc_cartesian_with_scale(spec, V1, pt)
        b, _ = lcc_cartesian_with_scale(spec, V2, pt)
        c, sc = lcc_cartesian_with_scale(spec, V12, pt)
        assert c == pytest.approx(a + lam * b, rel=1e-10, abs=1e-10 * max(sa, sc, 1.0))


def test_exotic_vanishing_theorem():
    """LCC vanishes identically for scale-free potentials when the
    LCC-visible part of the leading term is empty."""
    rng = np.random.default_rng(3)
    for N in (3, 4, 5, 6):
        # random spec supported on s + 2k <= N - 2 only (non-singlet slots)
        B1, B2 = {}, {}
        for (s, k, comp) in PolarLeadingSpec.slots(N):
            if s == 0 or s + 2 * k > N - 2:
                continue
            v = float(rng.uniform(-1, 1))
            (B1 if comp == 1 else B2)[(s, k)] = v
        spec = b_to_a(PolarLeadingSpec(N=N, B1=B1, B2=B2))
        for _ in range(3):
            S = random_trig_S(rng)
            V = separable_cartesian_field(RadialPart("zero"), S)
            for _ in range(10):
                r = rng.uniform(0.5, 2.0)
                t = rng.uniform(0, 2 * math.pi)
                pt = (r * math.cos(t), r * math.sin(t))
                v, scale = lcc_cartesian_with_scale(spec, V, pt)
                assert abs(v) < 1e-9 * max(scale, 1.0)


def test_standard_spec_does_not_vanish():
    spec = b_to_a(PolarLeadingSpec(N=4, B1={(4, 0): 1.0}))
    rng = np.random.default_rng(4)
    S = random_trig_S(rng)
    V = separable_cartesian_field(RadialPart("oscillator", b=1.0), S)
    vals = []
    for _ in range(10):
        r = rng.uniform(0.6, 1.6)
        t = rng.uniform(0, 2 * math.pi)
        pt = (r * math.cos(t), r * math.sin(t))
        v, scale = lcc_cartesian_with_scale(spec, V, pt)
        vals.append(abs(v) / max(scale, 1.0))
    assert max(vals) > 1e-3


# --- polar evaluation ------------------------------------------------------


def test_polar_matches_cartesian():
    rng = np.random.default_rng(5)
    for _ in range(50):
        N = int(rng.integers(2, 5))
        spec = random_a_spec(rng, N)
        S = random_trig_S(rng, top=2)
        R = RadialPart("oscillator", b=float(rng.uniform(0.2, 1.0)))
        r = float(rng.uniform(0.5, 2.0))
        t = float(rng.uniform(0, 2 * math.pi))
        v_pol, scale = lcc_polar(spec, R, S, (r, t), with_scale=True)
        V = separable_cartesian_field(R, S)
        v_cart = lcc_cartesian(spec, V, (r * math.cos(t), r * math.sin(t)))
        assert v_pol == pytest.approx(v_cart, rel=1e-8, abs=1e-8 * max(scale, 1.0))


def test_polar_zero_potential():
    spec = LeadingTermSpec(N=3, A={(0, 0): 1.0})
    assert lcc_polar(spec, RadialPart("zero"), Const(0.0), (1.0, 0.3)) == 0.0


def test_polar_rejects_small_radius():
    spec = LeadingTermSpec(N=2, A={(0, 0): 1.0})
    with pytest.raises(ValueError):
        lcc_polar(spec, RadialPart("zero"), Const(0.0), (1e-9, 0.0))


# --- radial residuals ------------------------------------------------------


def test_radial_residuals_zero_spec():
    spec = PolarLeadingSpec(N=3, B1={})
    rows = radial_residuals(spec, RadialPart("oscillator", b=1.0), 1.2)
    assert np.allclose(rows, 0.0)


def test_radial_probe_independence():
    rng = np.random.default_rng(6)
    N = 4
    spec = a_to_b(random_a_spec(rng, N))
    R = RadialPart("onofri", a=1.0, d=1.0)
    probe1 = Const(0.0)
    probe2 = Cos(Const(3.0) * VAR_U)
    r1, s1 = radial_residuals(spec, R, 1.3, probe1, with_scale=True)
    r2, s2 = radial_residuals(spec, R, 1.3, probe2, with_scale=True)
    assert np.max(np.abs(r1 - r2)) < 1e-8 * max(s1, s2)


def test_onofri_radial_breaks_residuals():
    rng = np.random.default_rng(7)
    N = 4
    spec = a_to_b(random_a_spec(rng, N))
    R = RadialPart("onofri", a=1.0, d=1.0)
    worst = 0.0
    for r in np.geomspace(0.6, 3.0, 6):
        rows, scale = radial_residuals(spec, R, float(r), with_scale=True)
        worst = max(worst, np.max(np.abs(rows)) / max(scale, 1.0))
    assert worst > 1e-4


# --- admissible B space ----------------------------------------------------


@pytest.mark.parametrize(
    "radial,expect",
    [
        (RadialPart("oscillator", b=1.0), "partial"),
        (RadialPart("kepler", a=1.0), "full"),
        (RadialPart("zero"), "full"),
        (RadialPart("onofri", a=1.0, d=1.0), "none"),
    ],
)
def test_admissible_b_space_n4(radial, expect):
    report = admissible_b_space(4, radial)
    ncols = len(report.columns)
    if expect == "full":
        assert report.matrix_zero and report.dimension == ncols
    elif expect == "none":
        assert report.dimension == 0 and report.gap >= 1e2
    else:
        assert 1 <= report.dimension < ncols
        assert report.gap >= 1e2


def test_admissible_b_space_n2_oscillator_contains_doublet():
    report = admissible_b_space(2, RadialPart("oscillator", b=1.0))
    # the (2, 0) doublet generates the deformed-oscillator family at N=2
    idx1 = report.columns.index((2, 0, 1))
    idx2 = report.columns.index((2, 0, 2))
    for idx in (idx1, idx2):
        e = np.zeros(len(report.columns))
        e[idx] = 1.0
        proj = report.basis.T @ (report.basis @ e)
        assert np.linalg.norm(proj - e) < 1e-8


def test_singlet_columns_null_for_any_radial():
    report = admissible_b_space(
        4, RadialPart("onofri", a=1.0, d=1.0), include_singlets=True
    )
    for k in (0, 1, 2):
        idx = report.columns.index((0, k, 1))
        e = np.zeros(len(report.columns))
        e[idx] = 1.0
        proj = report.basis.T @ (report.basis @ e)
        assert np.linalg.norm(proj - e) < 1e-7


def test_radial_system_json():
    system = assemble_radial_system(2, RadialPart("oscillator", b=1.0))
    import json

    d = json.loads(system.to_json())
    assert d["N"] == 2 and len(d["spectrum"]) > 0 and d["radial"]["kind"] == "oscillator"


def test_parallel_map_contract():
    system_serial = assemble_radial_system(2, RadialPart("oscillator", b=1.0))
    calls = []

    def tracking_map(fn, xs):
        out = [fn(x) for x in xs]
        calls.append(len(out))
        return out

    system_mapped = assemble_radial_system(
        2, RadialPart("oscillator", b=1.0), map_fn=tracking_map
    )
    assert calls and np.array_equal(system_serial.matrix, system_mapped.matrix)


# --- standard angular nullspace --------------------------------------------


def test_angular_nullspace_n2_oscillator_matches_ttw():
    # denominator sin(2 theta) comes from B1[2, 0] = -1/2
    spec = PolarLeadingSpec(N=2, B1={(2, 0): -0.5})
    report = standard_angular_nullspace(spec, "oscillator", radial_coeff=1.0)
    assert report.dimension >= 1
    # target: alpha/cos^2 + beta/sin^2 with alpha=0.3, beta=0.2
    alpha, beta = 0.3, 0.2
    target = np.zeros(len(report.labels))
    target[report.labels.index(("const", 0))] = alpha - beta
    target[report.labels.index(("cos", 2))] = -(alpha + beta)
    unit = target / np.linalg.norm(target)
    proj = report.basis.T @ (report.basis @ unit)
    assert np.linalg.norm(proj - unit) < 1e-6
    S = report.reconstruct_S(proj * np.linalg.norm(target), spec)
    # compare against the closed form on a pole-free window
    for t in np.linspace(0.3, 1.2, 15):
        want = alpha / math.cos(t) ** 2 + beta / math.sin(t) ** 2
        assert S(float(t)) == pytest.approx(want, rel=1e-6)


def test_angular_nullspace_n4_kepler():
    spec = PolarLeadingSpec(N=4, B1={(1, 1): 1.0, (3, 0): 0.5}, B2={(3, 0): -0.25})
    report = standard_angular_nullspace(spec, "kepler", radial_coeff=1.0)
    assert report.dimension >= 1
    assert report.gap >= 1e2


def test_angular_nullspace_rejects_empty_spec():
    spec = PolarLeadingSpec(N=4, B1={(2, 0): 1.0})  # exotic: no visible slots
    with pytest.raises(ValueError):
        standard_angular_nullspace(spec, "oscillator")


def test_angular_nullspace_family_validation():
    spec = PolarLeadingSpec(N=4, B1={(4, 0): 1.0})
    with pytest.raises(ValueError):
        standard_angular_nullspace(spec, "scalefree_odd")  # wrong N parity
    with pytest.raises(ValueError):
        standard_angular_nullspace(spec, "no_such_family")

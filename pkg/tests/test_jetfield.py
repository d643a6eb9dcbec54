import math

import numpy as np
import pytest

from polarint.jetfield import (
    Const,
    Cos,
    DomainError,
    EvaluationError,
    Jet2,
    PolarAngle,
    Pow,
    Quot,
    Sin,
    Sqrt,
    Tabulated,
    VAR_U,
    VAR_V,
    deriv_at,
    fourier_project,
    jet_eval,
    load_angular_table,
)

X, Y = VAR_U, VAR_V


def _central(f, point, i, j, h):
    if i > 0:
        return (
            _central(f, (point[0] + h, point[1]), i - 1, j, h)
            - _central(f, (point[0] - h, point[1]), i - 1, j, h)
        ) / (2 * h)
    if j > 0:
        return (
            _central(f, (point[0], point[1] + h), i, j - 1, h)
            - _central(f, (point[0], point[1] - h), i, j - 1, h)
        ) / (2 * h)
    return f(*point)


def fd_partial(f, point, i, j, h=2e-2):
    """Finite-difference oracle for d^(i+j) f / du^i dv^j.

    Iterated central differences with two Richardson levels; the error is
    O(h^6), which makes the oracle exact to roundoff on low-degree
    polynomials and ~1e-7 accurate on the smooth test functions used here.
    """
    d1 = _central(f, point, i, j, h)
    d2 = _central(f, point, i, j, h / 2)
    d4 = _central(f, point, i, j, h / 4)
    r1 = (4 * d2 - d1) / 3
    r2 = (4 * d4 - d2) / 3
    return (16 * r2 - r1) / 15


def random_poly(rng, deg):
    expr = Const(0.0)
    coeffs = {}
    for a in range(deg + 1):
        for b in range(deg + 1 - a):
            c = rng.uniform(-2, 2)
            coeffs[(a, b)] = c
            expr = expr + Const(c) * X ** a * Y ** b
    def direct(u, v):
        return sum(c * u ** a * v ** b for (a, b), c in coeffs.items())
    return expr, direct


def test_jet_bilinear_monomial():
    j = jet_eval(X * Y, (1.0, 2.0), 2)
    assert j.c[0, 0] == 2.0
    assert j.c[1, 0] == 2.0
    assert j.c[0, 1] == 1.0
    assert j.c[1, 1] == 1.0
    assert j.c[2, 0] == 0.0 and j.c[0, 2] == 0.0


def test_jet_sine_series():
    j = jet_eval(Sin(X), (0.0, 0.0), 3)
    assert j.c[0, 0] == pytest.approx(0.0, abs=1e-15)
    assert j.c[1, 0] == pytest.approx(1.0, rel=1e-14)
    assert j.c[2, 0] == pytest.approx(0.0, abs=1e-15)
    assert j.c[3, 0] == pytest.approx(-1.0 / 6.0, rel=1e-14)


def test_jet_matches_fd_on_random_polynomials():
    rng = np.random.default_rng(7)
    for _ in range(20):
        expr, direct = random_poly(rng, 4)
        pt = tuple(float(q) for q in rng.uniform(-1.5, 1.5, size=2))
        jet = jet_eval(expr, pt, 4)
        for i in range(5):
            for j in range(5 - i):
                want = fd_partial(direct, pt, i, j, h=0.4)
                got = jet.deriv(i, j)
                assert got == pytest.approx(want, rel=1e-6, abs=1e-6)


def test_deriv_at_examples():
    assert deriv_at(X ** 2 * Y, (0.3, -0.7), (2, 1)) == pytest.approx(2.0, rel=1e-12)
    assert deriv_at(X ** 2 + Y ** 2, (3.0, 4.0), (1, 0)) == pytest.approx(6.0, rel=1e-12)
    f = (X + Y) ** 5
    want = fd_partial(lambda u, v: (u + v) ** 5, (0.0, 0.0), 3, 2, h=0.25)
    assert deriv_at(f, (0.0, 0.0), (3, 2)) == pytest.approx(want, rel=1e-6)
    # analytic value: 5! * C(5,3)-style mixed partial of (u+v)^5 is 5! = 120... times
    # nothing else; d^5/du^3 dv^2 (u+v)^5 = 5! = 120
    assert deriv_at(f, (0.0, 0.0), (3, 2)) == pytest.approx(120.0, rel=1e-12)


def test_jet_product_rule_random_pairs():
    rng = np.random.default_rng(11)
    for _ in range(100):
        f, _ = random_poly(rng, 2)
        g, _ = random_poly(rng, 3)
        order = int(rng.integers(1, 7))
        pt = tuple(rng.uniform(-1, 1, size=2))
        jf = jet_eval(f, pt, order)
        jg = jet_eval(g, pt, order)
        jfg = jet_eval(f * g, pt, order)
        prod = jf * jg
        scale = max(np.max(np.abs(prod.c)), 1.0)
        assert np.max(np.abs(jfg.c - prod.c)) < 1e-10 * scale


def test_chain_consistency_sin_of_square():
    rng = np.random.default_rng(3)
    f = Sin(X * X)
    for _ in range(10):
        pt = (float(rng.uniform(-1.2, 1.2)), 0.0)
        for i in (1, 2, 3):
            want = fd_partial(lambda u, v: math.sin(u * u), pt, i, 0)
            assert deriv_at(f, pt, (i, 0)) == pytest.approx(want, rel=1e-6, abs=1e-6)


def test_quotient_and_power_jets():
    f = Quot(Const(1.0), Const(1.0) + X * X)
    j = jet_eval(f, (0.0, 0.0), 6)
    # 1/(1+u^2) = 1 - u^2 + u^4 - u^6
    assert j.c[0, 0] == pytest.approx(1.0)
    assert j.c[2, 0] == pytest.approx(-1.0)
    assert j.c[4, 0] == pytest.approx(1.0)
    assert j.c[6, 0] == pytest.approx(-1.0)
    g = Pow(X, 2.5)
    assert deriv_at(g, (2.0, 0.0), (1, 0)) == pytest.approx(2.5 * 2.0 ** 1.5, rel=1e-12)


def test_negative_fractional_power_raises():
    with pytest.raises(EvaluationError):
        jet_eval(Pow(X, 0.5), (-1.0, 0.0), 2)
    with pytest.raises(EvaluationError):
        jet_eval(Sqrt(X), (-4.0, 0.0), 1)


def test_division_by_zero_raises():
    with pytest.raises(EvaluationError):
        jet_eval(Quot(Const(1.0), X), (0.0, 0.0), 1)


def test_polar_angle_jet():
    th = PolarAngle(X, Y)
    pt = (0.8, -1.3)
    r2 = pt[0] ** 2 + pt[1] ** 2
    j = jet_eval(th, pt, 3)
    assert j.value == pytest.approx(math.atan2(pt[1], pt[0]), rel=1e-14)
    assert j.deriv(1, 0) == pytest.approx(-pt[1] / r2, rel=1e-12)
    assert j.deriv(0, 1) == pytest.approx(pt[0] / r2, rel=1e-12)
    want = fd_partial(lambda u, v: math.atan2(v, u), pt, 2, 1)
    assert j.deriv(2, 1) == pytest.approx(want, rel=1e-5, abs=1e-5)


def test_fourier_orthogonality():
    g3 = lambda t: math.cos(3 * t)
    assert fourier_project(g3, 3, "cos") == pytest.approx(1.0, abs=1e-13)
    assert fourier_project(g3, 2, "cos") == pytest.approx(0.0, abs=1e-13)
    assert fourier_project(lambda t: 1.0, 0, "cos") == pytest.approx(2.0, abs=1e-13)


def test_fourier_product_to_sum():
    # (2 + cos t) sin 5t = 2 sin 5t + (1/2)(sin 6t + sin 4t)
    g = lambda t: (2.0 + math.cos(t)) * math.sin(5 * t)
    assert fourier_project(g, 4, "sin") == pytest.approx(0.5, abs=1e-12)
    assert fourier_project(g, 5, "sin") == pytest.approx(2.0, abs=1e-12)
    assert fourier_project(g, 6, "sin") == pytest.approx(0.5, abs=1e-12)
    assert fourier_project(g, 4, "cos") == pytest.approx(0.0, abs=1e-12)


def test_fourier_exactness_random_trig_polys():
    rng = np.random.default_rng(23)
    nodes = 32
    dmax = nodes // 2 - 1
    for _ in range(10):
        deg = int(rng.integers(1, dmax - 6))
        cs = rng.uniform(-1, 1, size=(deg + 1, 2))
        def g(t, cs=cs, deg=deg):
            return sum(cs[s][0] * math.cos(s * t) + cs[s][1] * math.sin(s * t)
                       for s in range(deg + 1))
        s_probe = int(rng.integers(0, deg + 1))
        want_cos = cs[s_probe][0] * (2.0 if s_probe == 0 else 1.0)
        assert fourier_project(g, s_probe, "cos", nodes) == pytest.approx(want_cos, abs=1e-13)
        if s_probe > 0:
            assert fourier_project(g, s_probe, "sin", nodes) == pytest.approx(
                cs[s_probe][1], abs=1e-13
            )


def test_tabulated_matches_smooth_function():
    t = np.linspace(0, 2 * np.pi, 257)
    vals = np.sin(2 * t) + 0.3 * np.cos(t)
    tab = Tabulated(t, vals, X, periodic=True)
    for tv in (0.4, 2.0, 5.5):
        assert tab(tv) == pytest.approx(math.sin(2 * tv) + 0.3 * math.cos(tv), abs=5e-8)
        j = jet_eval(tab, (tv, 0.0), 2)
        assert j.deriv(1, 0) == pytest.approx(2 * math.cos(2 * tv) - 0.3 * math.sin(tv), abs=5e-6)


def test_tabulated_refuses_high_order_and_out_of_domain():
    t = np.linspace(0.5, 1.5, 33)
    tab = Tabulated(t, np.sin(t), X)
    with pytest.raises(EvaluationError):
        jet_eval(tab, (1.0, 0.0), 3)
    with pytest.raises(DomainError):
        tab(2.0)


def test_angular_table_csv_roundtrip(tmp_path):
    p = tmp_path / "tab.csv"
    t = np.linspace(0, 2 * np.pi, 65)
    v = np.cos(t)
    with open(p, "w") as fh:
        fh.write("theta,value\n")
        for a, b in zip(t, v):
            fh.write(f"{float(a)!r},{float(b)!r}\n")
    t2, v2 = load_angular_table(p)
    assert np.array_equal(t, t2) and np.array_equal(v, v2)
    with open(p, "w") as fh:
        fh.write("angle,value\n0,1\n")
    with pytest.raises(ValueError):
        load_angular_table(p)

import math

import numpy as np
import pytest

from polarint.jetfield import Const, Cos, Sin, VAR_U, VAR_V, Sqrt
from polarint.observables import (
    MomentumPolynomial,
    PhasePoint,
    angular_to_cartesian,
    hamiltonian_of,
    lz,
    poisson,
    x_of,
)

X, Y = VAR_U, VAR_V


def random_phase_points(rng, n, rmin=0.3, rmax=2.5):
    pts = []
    while len(pts) < n:
        x, y = rng.uniform(-rmax, rmax, size=2)
        if rmin < math.hypot(x, y) < rmax:
            px, py = rng.uniform(-1.5, 1.5, size=2)
            pts.append(PhasePoint(float(x), float(y), float(px), float(py)))
    return pts


def random_observable(rng, deg=2):
    """Random momentum polynomial with polynomial coefficient fields."""
    coeffs = {}
    for i in range(deg + 1):
        for j in range(deg + 1 - i):
            if rng.uniform() < 0.4:
                continue
            c = Const(float(rng.uniform(-1, 1)))
            expr = c
            for _ in range(int(rng.integers(0, 3))):
                expr = expr * (X if rng.uniform() < 0.5 else Y)
            coeffs[(i, j)] = expr
    if not coeffs:
        coeffs[(0, 0)] = Const(1.0)
    return MomentumPolynomial(coeffs)


def eval_obs(obs, pt):
    return obs.evaluate(pt)


def test_polar_roundtrip():
    rng = np.random.default_rng(5)
    for _ in range(50):
        pt = random_phase_points(rng, 1)[0]
        back = PhasePoint.from_polar(pt.r, pt.theta, pt.p_r, pt.l_z)
        for a, b in zip((pt.x, pt.y, pt.px, pt.py), (back.x, back.y, back.px, back.py)):
            assert a == pytest.approx(b, abs=1e-12)


def test_evaluate_lz():
    pt = PhasePoint(1.0, 0.0, 0.0, 2.0)
    assert lz().evaluate(pt) == pytest.approx(2.0)


def test_evaluate_kinetic():
    p2 = MomentumPolynomial({(2, 0): 1.0, (0, 2): 1.0})
    assert p2.evaluate(PhasePoint(0.1, 0.0, 3.0, 4.0)) == pytest.approx(25.0)


def test_evaluate_x_integral():
    S = Sin(X) * Sin(X)  # sin^2(theta)
    Xobs = x_of(S)
    pt = PhasePoint(0.0, 1.0, 1.0, 0.0)
    # L_z = -1, theta = pi/2 -> 1 + 2 = 3
    assert Xobs.evaluate(pt) == pytest.approx(3.0, rel=1e-12)


def test_bracket_hand_example():
    F = MomentumPolynomial({(0, 1): X})  # x p_y
    G = MomentumPolynomial({(1, 0): Y})  # y p_x
    B = poisson(F, G)  # y p_y - x p_x
    rng = np.random.default_rng(0)
    for pt in random_phase_points(rng, 20):
        want = pt.y * pt.py - pt.x * pt.px
        assert B.evaluate(pt) == pytest.approx(want, rel=1e-12, abs=1e-12)
    assert B.degree <= F.degree + G.degree - 1


def test_x_commutes_with_separable_h():
    # V = R(r) + S(theta)/r^2 with the same S in X
    S = Sin(X) * Sin(X) + Const(0.25) * Cos(X)
    r2 = VAR_U * VAR_U + VAR_V * VAR_V
    V = r2 + angular_to_cartesian(S) / r2
    H = hamiltonian_of(V)
    Xobs = x_of(S)
    B = poisson(Xobs, H)
    rng = np.random.default_rng(1)
    pts = random_phase_points(rng, 100)
    scale = max(abs(H.evaluate(p)) * abs(Xobs.evaluate(p)) for p in pts)
    for pt in pts:
        assert abs(B.evaluate(pt)) < 1e-10 * max(scale, 1.0)


def test_lz_commutes_with_radial_h():
    r2 = VAR_U * VAR_U + VAR_V * VAR_V
    V = r2 + Const(0.3) / Sqrt(r2)
    H = hamiltonian_of(V)
    B = poisson(lz(), H)
    rng = np.random.default_rng(2)
    for pt in random_phase_points(rng, 50):
        assert abs(B.evaluate(pt)) < 1e-11


def test_coefficient_of():
    F = MomentumPolynomial({(0, 1): X})
    G = MomentumPolynomial({(1, 0): Y})
    B = poisson(F, G)
    assert B.coefficient_of(0, 1, (0.7, -0.4)) == pytest.approx(-0.4)
    assert B.coefficient_of(1, 0, (0.7, -0.4)) == pytest.approx(-0.7)
    S = Sin(X) * Sin(X)
    Xobs = x_of(S)
    assert Xobs.coefficient_of(2, 0, (1.2, 0.5)) == pytest.approx(0.25)  # y^2
    assert Xobs.coefficient_of(5, 5, (1.0, 1.0)) == 0.0


def test_hamiltonian_of_examples():
    H0 = hamiltonian_of(None)
    assert H0.evaluate(PhasePoint(0.0, 0.0, 3.0, 4.0)) == pytest.approx(12.5)
    assert H0.degree == 2


def test_bracket_algebra_properties():
    """Bilinearity, antisymmetry, Leibniz and Jacobi at random points."""
    rng = np.random.default_rng(42)
    pts = random_phase_points(rng, 10)
    for _ in range(25):
        F = random_observable(rng)
        G = random_observable(rng)
        K = random_observable(rng)
        FG = poisson(F, G)
        GF = poisson(G, F)
        leib_l = poisson(F, G * K)
        leib_r = poisson(F, G) * K + G * poisson(F, K)
        jac = (
            poisson(F, poisson(G, K))
            + poisson(G, poisson(K, F))
            + poisson(K, poisson(F, G))
        )
        for pt in pts:
            a, b = FG.evaluate(pt), GF.evaluate(pt)
            scale = max(abs(a), abs(b), 1.0)
            assert abs(a + b) < 1e-9 * scale
            la, lb = leib_l.evaluate(pt), leib_r.evaluate(pt)
            assert abs(la - lb) < 1e-9 * max(abs(la), abs(lb), 1.0)
            assert abs(jac.evaluate(pt)) < 1e-9 * max(
                abs(poisson(F, poisson(G, K)).evaluate(pt)), 1.0
            )


def test_bracket_matches_finite_difference_flow():
    """evaluate(poisson(F, G)) against the directional FD estimate."""
    rng = np.random.default_rng(9)
    h = 1e-5
    for _ in range(20):
        F = random_observable(rng)
        G = random_observable(rng)
        B = poisson(F, G)
        pt = random_phase_points(rng, 1)[0]

        def dF(which, eps):
            if which == "x":
                return F.evaluate(PhasePoint(pt.x + eps, pt.y, pt.px, pt.py))
            if which == "y":
                return F.evaluate(PhasePoint(pt.x, pt.y + eps, pt.px, pt.py))
            if which == "px":
                return F.evaluate(PhasePoint(pt.x, pt.y, pt.px + eps, pt.py))
            return F.evaluate(PhasePoint(pt.x, pt.y, pt.px, pt.py + eps))

        def dG(which, eps):
            if which == "x":
                return G.evaluate(PhasePoint(pt.x + eps, pt.y, pt.px, pt.py))
            if which == "y":
                return G.evaluate(PhasePoint(pt.x, pt.y + eps, pt.px, pt.py))
            if which == "px":
                return G.evaluate(PhasePoint(pt.x, pt.y, pt.px + eps, pt.py))
            return G.evaluate(PhasePoint(pt.x, pt.y, pt.px, pt.py + eps))

        want = 0.0
        for q, pq in (("x", "px"), ("y", "py")):
            fq = (dF(q, h) - dF(q, -h)) / (2 * h)
            gq = (dG(q, h) - dG(q, -h)) / (2 * h)
            fp = (dF(pq, h) - dF(pq, -h)) / (2 * h)
            gp = (dG(pq, h) - dG(pq, -h)) / (2 * h)
            want += fq * gp - fp * gq
        got = B.evaluate(pt)
        assert got == pytest.approx(want, rel=1e-5, abs=1e-5)


def test_angular_field_must_be_periodic():
    with pytest.raises(ValueError):
        angular_to_cartesian(X)  # theta itself is not periodic

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from eikcrit import (
    BivariateSeries, PreconditionError, detect_resonances, series_residual,
    solve_saddle_series,
)

SQRT2 = np.sqrt(2.0)


def brute_force_series(h_terms, a, b, N):
    """Independent oracle: symbolic expansion + degree-by-degree linsolve."""
    x, y = sp.symbols("x y")
    h = sum(sp.Rational(0) + c * x ** m * y ** n for m, n, c in h_terms)
    z = a / 2 * x ** 2 - b / 2 * y ** 2
    for d in range(3, N + 1):
        unknowns = sp.symbols(f"c0:{d + 1}")
        zd = z + sum(unknowns[m] * x ** m * y ** (d - m) for m in range(d + 1))
        res = sp.expand(sp.diff(zd, x) ** 2 + sp.diff(zd, y) ** 2 - h)
        eqs = []
        poly = sp.Poly(res, x, y)
        for (m, n), coef in poly.terms():
            if m + n == d:
                eqs.append(coef)
        sol = sp.solve(eqs, unknowns, dict=True)
        assert sol, f"no solution at degree {d}"
        zd = zd.subs(sol[0])
        # drop any leftover free symbols (resonant coefficients) at 0
        zd = zd.subs({u: 0 for u in unknowns})
        z = sp.expand(zd)
    poly = sp.Poly(z, x, y)
    out = np.zeros((N + 1, N + 1))
    for (m, n), coef in poly.terms():
        if m + n <= N:
            out[m, n] = float(coef)
    return out


# --- series arithmetic ---------------------------------------------------

def test_product_and_truncation():
    s = BivariateSeries.from_terms(4, [(1, 0, 2.0), (0, 1, 3.0)])
    sq = s * s
    assert sq[2, 0] == 4.0
    assert sq[1, 1] == 12.0
    assert sq[0, 2] == 9.0
    assert sq.N == 4


def test_derivatives():
    s = BivariateSeries.from_terms(5, [(3, 2, 7.0)])
    assert s.diff_x()[2, 2] == 21.0
    assert s.diff_y()[3, 1] == 14.0


def test_truncation_drops_high_degrees():
    s = BivariateSeries.from_terms(6, [(3, 3, 1.0), (1, 1, 1.0)])
    t = s.truncate(4)
    assert t[3, 3] == 0.0
    assert t[1, 1] == 1.0


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3),
                          st.floats(-2, 2)), max_size=6),
       st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3),
                          st.floats(-2, 2)), max_size=6))
@settings(max_examples=50, deadline=None)
def test_product_matches_pointwise_eval(t1, t2):
    s1 = BivariateSeries.from_terms(12, t1)
    s2 = BivariateSeries.from_terms(12, t2)
    x, y = 0.37, -0.21
    # all products have total degree <= 12, so no truncation loss
    assert (s1 * s2).eval(x, y) == pytest.approx(
        s1.eval(x, y) * s2.eval(x, y), abs=1e-9)


def test_json_round_trip():
    s = BivariateSeries.from_terms(5, [(2, 0, 0.5), (0, 2, -1 / 3), (3, 1, 2.0)])
    assert BivariateSeries.from_json(s.to_json()) == s


def test_csv_round_trip(tmp_path):
    s = BivariateSeries.from_terms(5, [(2, 0, 0.5), (1, 3, np.pi)])
    path = tmp_path / "series.csv"
    s.write_csv(path)
    assert BivariateSeries.read_csv(path, 5) == s


# --- resonances ----------------------------------------------------------

def test_detect_resonances_equal_rates():
    assert detect_resonances(1.0, 1.0, 6) == [(2, 2), (3, 3)]


def test_detect_resonances_irrational_ratio_empty():
    assert detect_resonances(1.0, SQRT2, 12) == []


def test_detect_resonances_rational_ratio():
    # a=2, b=3: m*2 = n*3 at (3,2) and (6,4)
    assert detect_resonances(2.0, 3.0, 10) == [(3, 2), (6, 4)]


# --- the recursion -------------------------------------------------------

def test_cubic_coefficient_closed_form():
    # h = x^2 + 2 y^2 + x^3: z_30 = 1 / (2 * 3 * a) = 1/6 for a=1
    N = 12
    h = BivariateSeries.from_terms(N, [(2, 0, 1.0), (0, 2, 2.0), (3, 0, 1.0)])
    z, report = solve_saddle_series(h, 1.0, SQRT2, N=N)
    assert z[3, 0] == pytest.approx(1 / 6, abs=1e-12)
    assert not report.nonexistence
    assert series_residual(z, h, N).max_abs() < 1e-9


def test_agrees_with_symbolic_oracle():
    h_terms = [(2, 0, 1.0), (0, 2, 2.0), (3, 0, 1.0), (2, 1, 0.5)]
    N = 6
    h = BivariateSeries.from_terms(N, h_terms)
    z, _ = solve_saddle_series(h, 1.0, SQRT2, N=N)
    ref = brute_force_series(h_terms, 1.0, SQRT2, N)
    np.testing.assert_allclose(z.coeffs, ref, atol=1e-9)


def test_concave_branch_sign():
    N = 6
    h = BivariateSeries.from_terms(N, [(2, 0, 1.0), (0, 2, 2.0), (3, 0, 1.0)])
    z, _ = solve_saddle_series(h, 1.0, SQRT2, sign=-1, N=N)
    assert z[2, 0] == pytest.approx(-0.5)
    assert z[0, 2] == pytest.approx(SQRT2 / 2)
    assert series_residual(z, h, N).max_abs() < 1e-10


@pytest.mark.parametrize("c", [1.0, -1.0, 0.1, -0.1])
def test_obstruction_value(c):
    # h = x^2 + y^2 + c x^2 y^2 with a = b = 1: obstruction at (2,2) equals c
    N = 6
    h = BivariateSeries.from_terms(N, [(2, 0, 1.0), (0, 2, 1.0), (2, 2, c)])
    z, report = solve_saddle_series(h, 1.0, 1.0, N=N)
    entry = report.at(2, 2)
    assert entry is not None
    assert report.nonexistence
    assert not entry.free_coefficient
    assert entry.obstruction == pytest.approx(c, abs=1e-10)


def test_resonance_with_vanishing_rhs_leaves_coefficient_free():
    # pure model data: every resonant right-hand side vanishes
    N = 8
    h = BivariateSeries.from_terms(N, [(2, 0, 1.0), (0, 2, 1.0)])
    z, report = solve_saddle_series(h, 1.0, 1.0, N=N)
    assert not report.nonexistence
    assert all(e.free_coefficient for e in report.entries)
    assert series_residual(z, h, N).max_abs() < 1e-12


def test_wrong_quadratic_part_rejected():
    h = BivariateSeries.from_terms(4, [(2, 0, 2.0), (0, 2, 2.0)])
    with pytest.raises(PreconditionError):
        solve_saddle_series(h, 1.0, SQRT2)


@given(st.floats(0.4, 2.5), st.floats(0.4, 2.5), st.floats(-1, 1),
       st.floats(-1, 1))
@settings(max_examples=25, deadline=None)
def test_residual_vanishes_for_nonresonant_random_cubics(a, b, c30, c21):
    if detect_resonances(a, b, 8, tol=1e-6):
        return
    N = 8
    h = BivariateSeries.from_terms(
        N, [(2, 0, a * a), (0, 2, b * b), (3, 0, c30), (2, 1, c21)])
    z, report = solve_saddle_series(h, a, b, N=N)
    assert not report.nonexistence
    # near-resonant gaps amplify coefficients, so bound the residual
    # relative to the solution magnitude, not absolutely
    scale = max(1.0, z.max_abs()) ** 2
    assert series_residual(z, h, N).max_abs() < 1e-11 * scale

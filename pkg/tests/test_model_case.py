import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eikcrit import (
    ModelQuadratic, Monomial, PreconditionError, SmoothBump, Table, Zero,
    eval_E, model_saddle_on_base_grid, model_saddle_surface,
    predicted_regularity, psi_model,
)
from eikcrit.model_case import (
    assemble_point, model_gamma, model_linear_flow, saddle_components,
    w_coordinates,
)

SQRT2 = np.sqrt(2.0)


def test_w_coordinates_invert_assemble():
    a, b = 1.3, 0.7
    w = np.array([0.2, -0.1, 0.05, 0.3])
    np.testing.assert_allclose(
        w_coordinates(a, b, assemble_point(a, b, *w)), w, atol=1e-14)


def test_gamma_lies_on_cone():
    a, b = 1.0, SQRT2
    spec = ModelQuadratic(a, b)
    phi = Monomial(0.5, 3)
    for branch in ("+", "-"):
        for s in np.linspace(-0.5, 0.5, 21):
            assert abs(spec.value(model_gamma(a, b, phi, branch, s))) < 1e-14


def test_psi_model_scaling():
    a, b = 1.0, SQRT2
    phi = Monomial(1.0, 5)
    s = 0.2
    assert psi_model(a, b, phi, "+")(s) == pytest.approx(
        -(a * a) / (b * b) * phi(s))
    assert psi_model(a, b, phi, "-")(s) == pytest.approx(
        (a * a) / (b * b) * phi(s))


def test_linear_flow_is_exact_solution():
    a, b = 1.0, SQRT2
    P = np.array([0.1, -0.2, 0.3, 0.05])
    # d/dt of the flow equals the field (x'=p, y'=q, p'=a^2 x, q'=b^2 y)
    dt = 1e-6
    plus = model_linear_flow(a, b, P, dt)
    minus = model_linear_flow(a, b, P, -dt)
    deriv = (plus - minus) / (2 * dt)
    spec = ModelQuadratic(a, b)
    np.testing.assert_allclose(deriv, spec.field(P), atol=1e-8)


def test_flow_preserves_the_data_curve_family():
    """Flowing gamma(s) stays on the saddle surface: its (w3, w4) components
    obey the closed form at the flowed (u, v)."""
    a, b = 1.0, SQRT2
    phi = Monomial(1.0, 5)
    for s in (0.1, -0.2, 0.3):
        for t in (-0.7, 0.4, 1.1):
            branch = "+" if True else "-"
            start = model_gamma(a, b, phi, "+", s)
            end = model_linear_flow(a, b, start, t)
            w = w_coordinates(a, b, end)
            w3, w4 = saddle_components(a, b, phi, phi, w[0], w[1])
            assert w[2] == pytest.approx(w3, abs=1e-12)
            assert w[3] == pytest.approx(w4, abs=1e-12)


def test_saddle_components_branch_selection():
    a, b = 1.0, SQRT2
    phi_p = Monomial(1.0, 3)
    phi_m = Monomial(2.0, 3)
    w3_pp, _ = saddle_components(a, b, phi_p, phi_m, 0.2, 0.3)
    w3_pm, _ = saddle_components(a, b, phi_p, phi_m, 0.2, -0.3)
    s = 0.2 ** (b / (a + b)) * 0.3 ** (a / (a + b))
    assert w3_pp == pytest.approx(phi_p(s) * s / 0.2)
    assert w3_pm == pytest.approx(phi_m(s) * s / 0.2)


def test_axis_closure():
    a, b = 1.0, SQRT2
    phi = Monomial(1.0, 3)
    assert saddle_components(a, b, phi, phi, 0.0, 0.4) == (0.0, 0.0)
    assert saddle_components(a, b, phi, phi, 0.4, 0.0) == (0.0, 0.0)


def test_surface_lies_on_cone():
    a, b = 1.0, SQRT2
    spec = ModelQuadratic(a, b)
    g = np.linspace(-0.4, 0.4, 17)
    surf = model_saddle_surface(a, b, Monomial(1.0, 5), Zero(), g, g)
    assert surf.record_residual(spec) < 1e-10


def test_zero_data_gives_mixed_plane():
    # phi = 0: the surface is the plane p = a x, q = -b y
    a, b = 1.0, SQRT2
    g = np.linspace(-0.4, 0.4, 9)
    surf = model_saddle_surface(a, b, Zero(), Zero(), g, g)
    np.testing.assert_allclose(surf.p, a * surf.x, atol=1e-14)
    np.testing.assert_allclose(surf.q, -b * surf.y, atol=1e-14)


def test_base_grid_inversion():
    a, b = 1.0, SQRT2
    phi = Monomial(1.0, 5)
    g = np.linspace(-0.3, 0.3, 13)
    surf = model_saddle_on_base_grid(a, b, phi, phi, g, g)
    np.testing.assert_allclose(surf.x, g[:, None] * np.ones_like(g), atol=1e-12)
    np.testing.assert_allclose(surf.y, np.ones_like(g)[:, None] * g, atol=1e-12)
    assert surf.record_residual(ModelQuadratic(a, b)) < 1e-12


@given(st.floats(0.3, 2.0), st.floats(0.3, 2.0), st.integers(1, 9))
@settings(max_examples=60, deadline=None)
def test_predicted_regularity_formula(a, b, l):
    n = predicted_regularity(a, b, l)
    val = (l + 1) * min(a, b) / (a + b)
    assert n == int(np.ceil(val)) - 1
    assert n >= 0


def test_predicted_regularity_examples():
    assert predicted_regularity(1.0, SQRT2, 5) == 2
    assert predicted_regularity(1.0, 1.0, 3) == 1
    assert predicted_regularity(1.0, 1.0, np.inf) == np.inf


def test_data_function_orders():
    assert Zero().order == np.inf
    assert Monomial(2.0, 3).order == 3
    assert SmoothBump(1.0, 0.5, 0.2).order == np.inf
    with pytest.raises(PreconditionError):
        SmoothBump(1.0, 0.1, 0.2)          # support touches the origin
    with pytest.raises(PreconditionError):
        Monomial(1.0, 0.5)                 # vanishing order below 1


def test_monomial_extensions():
    odd = Monomial(1.0, 2, extension="odd")
    even = Monomial(1.0, 2, extension="even")
    assert odd(-0.5) == -0.25
    assert even(-0.5) == 0.25


def test_table_requires_origin_sample_and_order():
    s = np.linspace(-1, 1, 11)
    tab = Table(s, s ** 3, order=3)
    assert tab(0.5) == pytest.approx(0.125, abs=1e-3)
    with pytest.raises(PreconditionError):
        Table(s + 0.05, (s + 0.05) ** 3, order=3)


def test_eval_E_quadrant_and_magnitude():
    phi = Monomial(1.0, 5)
    alpha, beta = 0.4, 0.6
    assert eval_E(phi, alpha, beta, -0.1, 0.2) == 0.0
    assert eval_E(phi, alpha, beta, 0.1, 0.0) == 0.0
    u, v = 0.3, 0.2
    t = u ** alpha * v ** beta
    assert eval_E(phi, alpha, beta, u, v) == pytest.approx(
        u ** (alpha - 1) * v ** beta * t ** 5)


def test_regularity_warning_metadata():
    a, b = 1.0, SQRT2
    g = np.linspace(-0.3, 0.3, 7)
    low = model_saddle_surface(a, b, Monomial(1.0, 1), Monomial(1.0, 1), g, g)
    high = model_saddle_surface(a, b, Monomial(1.0, 9), Monomial(1.0, 9), g, g)
    assert low.metadata["regularity_warning"] is True
    assert high.metadata["regularity_warning"] is False

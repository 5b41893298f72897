"""Norm calculus on the discrete measure: modular, Luxemburg norm, duality.

The bisection in luxemburg_norm returns the upper bracket endpoint at a
relative width of 1e-12, so every inequality below is asserted with a
1e-9 relative slack unless the construction makes it exact.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vexspec import (
    conjugate,
    constant_exponent,
    exponent_field,
    holder_constant,
    luxemburg_norm,
    modular,
)

SLACK = 1e-9


@st.composite
def cell_data(draw, max_cells=48, with_second=False):
    """Random (u, p, vol) on a 1D or 2D cell layout, amplitudes around 1."""
    if draw(st.booleans()):
        shape = (draw(st.integers(2, max_cells)),)
    else:
        shape = (draw(st.integers(2, 12)), draw(st.integers(2, 12)))
    n = int(np.prod(shape))
    seed = draw(st.integers(0, 2**32 - 1))
    r = np.random.default_rng(seed)
    amp = 10.0 ** draw(st.floats(-2.0, 2.0))
    u = amp * r.standard_normal(shape)
    lo = draw(st.floats(1.05, 3.0))
    width = draw(st.floats(0.0, 2.0))
    p = exponent_field(lo + width * r.random(shape))
    vol = draw(st.floats(1e-3, 2.0))
    if with_second:
        return u, amp * r.standard_normal(shape), p, vol
    return u, p, vol


@given(cell_data())
@settings(max_examples=200, deadline=None)
def test_unit_ball_trichotomy(data):
    # the norm and the modular sit on the same side of 1
    u, p, vol = data
    r = modular(u, p, vol)
    norm = luxemburg_norm(u, p, vol).norm
    if r < 1.0 - SLACK:
        assert norm <= 1.0 + SLACK
    if r > 1.0 + SLACK:
        assert norm >= 1.0 - SLACK
    if norm > 1.0 + SLACK:
        assert r >= 1.0 - SLACK


@given(cell_data())
@settings(max_examples=200, deadline=None)
def test_power_bracket_between_norm_and_modular(data):
    u, p, vol = data
    r = modular(u, p, vol)
    norm = luxemburg_norm(u, p, vol).norm
    if norm == 0.0:
        assert r == 0.0
        return
    if norm <= 1.0:
        assert norm**p.hi <= r * (1.0 + SLACK)
        assert r <= norm**p.lo * (1.0 + SLACK)
    else:
        assert norm**p.lo <= r * (1.0 + SLACK)
        assert r <= norm**p.hi * (1.0 + SLACK)


@given(cell_data())
@settings(max_examples=200, deadline=None)
def test_normalized_function_has_unit_modular(data):
    u, p, vol = data
    res = luxemburg_norm(u, p, vol)
    if res.norm == 0.0:
        return
    r = modular(u / res.norm, p, vol)
    # the returned endpoint always satisfies the defining inequality exactly
    assert r <= 1.0
    assert r >= 1.0 - 1e-10


@given(cell_data())
@settings(max_examples=200, deadline=None)
def test_modular_root_brackets_norm(data):
    u, p, vol = data
    r = modular(u, p, vol)
    norm = luxemburg_norm(u, p, vol).norm
    if r == 0.0:
        assert norm == 0.0
        return
    lo = min(r ** (1.0 / p.lo), r ** (1.0 / p.hi))
    hi = max(r ** (1.0 / p.lo), r ** (1.0 / p.hi))
    assert lo * (1.0 - SLACK) <= norm <= hi * (1.0 + SLACK)


@given(cell_data(with_second=True))
@settings(max_examples=200, deadline=None)
def test_holder_inequality(data):
    u, v, p, vol = data
    pairing = float(np.sum(np.abs(u * v)) * vol)
    nu = luxemburg_norm(u, p, vol).norm
    nv = luxemburg_norm(v, conjugate(p), vol).norm
    assert pairing <= holder_constant(p) * nu * nv * (1.0 + SLACK) + 1e-300


@given(cell_data(), st.floats(-1e3, 1e3))
@settings(max_examples=150, deadline=None)
def test_norm_homogeneity(data, t):
    u, p, vol = data
    base = luxemburg_norm(u, p, vol).norm
    scaled = luxemburg_norm(t * u, p, vol).norm
    assert scaled == pytest.approx(abs(t) * base, rel=1e-9, abs=1e-12)


@given(cell_data())
@settings(max_examples=100, deadline=None)
def test_constant_exponent_closed_form(data):
    u, p, vol = data
    c = 0.5 * (p.lo + p.hi)
    pc = constant_exponent(c, u.shape)
    expected = float(np.sum(np.abs(u) ** c) * vol) ** (1.0 / c)
    got = luxemburg_norm(u, pc, vol).norm
    assert got == pytest.approx(expected, rel=1e-10, abs=1e-15)


def test_luxemburg_against_scalar_root_finder(rng):
    """Independent oracle: brentq on a loop-computed modular of u/s."""
    from scipy.optimize import brentq

    u = rng.standard_normal(40) * 3.0
    p = exponent_field(1.5 + np.linspace(0.0, 1.0, 40))
    vol = 1.0 / 40

    def loop_modular(scale):
        total = 0.0
        for i in range(40):
            total += abs(u[i] / scale) ** p.values[i] * vol
        return total - 1.0

    root = brentq(loop_modular, 1e-8, 1e8, xtol=1e-14, rtol=1e-14)
    got = luxemburg_norm(u, p, vol).norm
    assert got == pytest.approx(root, rel=1e-10)


def test_zero_function_norm():
    p = constant_exponent(2.0, (7,))
    res = luxemburg_norm(np.zeros(7), p, 0.1)
    assert res.norm == 0.0 and res.iterations == 0


def test_modular_additivity_in_cells(rng):
    """The modular is a plain weighted sum, so it splits over any partition."""
    u = rng.standard_normal(30)
    p = exponent_field(1.2 + rng.random(30))
    vol = 0.05
    whole = modular(u, p, vol)
    parts = modular(u[:11], exponent_field(p.values[:11]), vol) + modular(
        u[11:], exponent_field(p.values[11:]), vol
    )
    assert whole == pytest.approx(parts, rel=1e-14)


def test_conjugate_exponent_identity(rng):
    p = exponent_field(1.1 + 3.0 * rng.random(25))
    pc = conjugate(p)
    assert np.allclose(1.0 / p.values + 1.0 / pc.values, 1.0, rtol=0, atol=1e-14)
    back = conjugate(pc)
    assert np.allclose(back.values, p.values, rtol=1e-12)


def test_product_exponent(rng):
    from vexspec import product_exponent

    a = exponent_field(1.2 + rng.random(9))
    b = exponent_field(1.5 + rng.random(9))
    prod = product_exponent(a, b)
    assert np.array_equal(prod.values, a.values * b.values)
    with pytest.raises(ValueError, match="mismatch"):
        product_exponent(a, exponent_field(np.full(8, 2.0)))


def test_holder_constant_range(rng):
    for _ in range(20):
        p = exponent_field(1.05 + 4.0 * rng.random(12))
        c = holder_constant(p)
        assert 1.0 <= c < 2.0
    assert holder_constant(constant_exponent(3.0, (5,))) == pytest.approx(1.0, abs=1e-14)


def test_exponent_field_validation():
    with pytest.raises(ValueError, match="exceed 1"):
        exponent_field([2.0, 1.0, 3.0])
    with pytest.raises(ValueError, match="at least one cell"):
        exponent_field([])
    with pytest.raises(ValueError, match="finite"):
        exponent_field([2.0, np.inf])
    f = exponent_field([[2.0, 2.5], [3.0, 2.2]])
    assert f.lo == 2.0 and f.hi == 3.0 and not f.is_constant
    assert constant_exponent(2.0, (4, 4)).is_constant


def test_norm_input_validation():
    p = constant_exponent(2.0, (5,))
    with pytest.raises(ValueError, match="mismatch"):
        modular(np.ones(4), p, 0.1)
    with pytest.raises(ValueError, match="mismatch"):
        modular(np.ones(5), p, np.ones(4))
    with pytest.raises(ValueError, match="finite"):
        luxemburg_norm(np.array([1.0, np.nan, 0.0, 0.0, 0.0]), p, 0.1)
    with pytest.raises(ValueError, match="tol"):
        luxemburg_norm(np.ones(5), p, 0.1, tol=0.0)

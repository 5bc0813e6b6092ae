"""Potential families: shapes, moments, closed forms, spec round-trips."""

import json
import math

import numpy as np
import pytest

from levdens import (Delta, DomainError, InvalidParameterError, from_spec,
                     closed_form_amplitudes, load_spec_file, make_composite,
                     make_delta, make_free, make_gaussian, make_poschl_teller,
                     make_sampled, make_sech_well, make_square_well,
                     moment_integrals)

SAMPLE_XS = np.linspace(-8.0, 8.0, 161)
SAMPLE_PAIRS = np.column_stack(
    [SAMPLE_XS, -3.0 * np.exp(-((SAMPLE_XS - 0.5) ** 2))])

# every pointwise kind (the delta is symbolic and tested separately)
POINTWISE = [
    make_poschl_teller(1),
    make_poschl_teller(2),
    make_sech_well(3.5),
    make_square_well(-1.0, 1.0),
    make_gaussian(-2.0, 0.0, 1.0),
    make_composite([make_gaussian(-2.5, -1.5, 0.8),
                    make_gaussian(-1.0, 2.0, 1.3)]),
    make_free(),
    make_sampled(SAMPLE_PAIRS),
]

_ids = lambda p: p.kind


@pytest.mark.parametrize("p", POINTWISE, ids=_ids)
def test_support_contains_potential(p):
    # outside the declared radius the potential is negligible
    R = p.support_radius
    for x in (R, -R, R + 1.0, -R - 3.0):
        assert abs(float(p.evaluate(np.array([x]))[0])) <= 1.1e-10


@pytest.mark.parametrize("p", POINTWISE, ids=_ids)
def test_evaluate_vectorized(p):
    xs = np.linspace(-2.0, 2.0, 7)
    vals = p.evaluate(xs)
    assert vals.shape == xs.shape
    assert vals[3] == float(p.evaluate(np.array([xs[3]]))[0])


def test_pt_moments_exact():
    # integral of -l(l+1) sech^2 x is -2 l(l+1)
    assert make_poschl_teller(1).moment0 == pytest.approx(-4.0, rel=1e-12)
    assert make_poschl_teller(2).moment0 == pytest.approx(-12.0, rel=1e-12)


def test_moment_values():
    assert make_square_well(-1.0, 1.0).moment0 == pytest.approx(-2.0)
    g = make_gaussian(-2.0, 0.5, 1.0)
    assert g.moment0 == pytest.approx(-2.0 * math.sqrt(2.0 * math.pi))
    # admissibility moment: integral of (1 + x^2)|u|
    assert g.moment2 == pytest.approx(
        2.0 * math.sqrt(2.0 * math.pi) * (1.0 + 0.25 + 1.0), rel=1e-12)


@pytest.mark.parametrize("p", POINTWISE, ids=_ids)
def test_moment_integrals_match_closed_forms(p):
    m0, m2 = moment_integrals(p)
    assert m0 == pytest.approx(p.moment0, rel=1e-7, abs=1e-9)
    assert m2 == pytest.approx(p.moment2, rel=1e-7, abs=1e-9)


def test_sampled_moment_of_shifted_gaussian():
    p = make_sampled(SAMPLE_PAIRS)
    assert p.moment0 == pytest.approx(-3.0 * math.sqrt(math.pi), rel=1e-6)


def test_pt1_closed_form():
    p = make_poschl_teller(1)
    t, b = closed_form_amplitudes(p, 1.0)
    # t(k) = (ik - 1)/(ik + 1): at k = 1 this is exactly i
    assert t == pytest.approx(1j, abs=1e-15)
    assert b == pytest.approx(0.0, abs=1e-15)


def test_pt2_has_no_closed_form():
    assert closed_form_amplitudes(make_poschl_teller(2), 1.0) is None


def test_delta_closed_form():
    p = make_delta(-2.0)
    t, b = closed_form_amplitudes(p, 1.0)
    # b = g/(2ik - g), t = 1 + b
    assert b == pytest.approx(-2.0 / (2.0j + 2.0), abs=1e-15)
    assert t == pytest.approx(1.0 + b, abs=1e-15)
    assert abs(t) ** 2 + abs(b) ** 2 == pytest.approx(1.0, abs=1e-15)


def test_closed_form_requires_positive_k():
    with pytest.raises(DomainError):
        closed_form_amplitudes(make_delta(-2.0), 0.0)


def test_no_closed_form_for_gaussian():
    assert closed_form_amplitudes(make_gaussian(-2.0), 1.0) is None


def test_delta_is_symbolic():
    d = make_delta(-2.0)
    with pytest.raises(DomainError):
        d.evaluate(np.array([0.0]))
    with pytest.raises(DomainError):
        moment_integrals(d)
    assert d.moment0 == -2.0
    assert d.moment2 == 2.0


def test_delta_surrogate_preserves_weight():
    d = make_delta(-2.0)
    s = d.surrogate()
    assert s.moment0 == pytest.approx(d.moment0, rel=1e-12)
    assert 2.0 * s.half_width <= 1e-3


@pytest.mark.parametrize("p", POINTWISE, ids=_ids)
def test_spec_round_trip(p):
    q = from_spec(p.to_spec())
    xs = np.linspace(-3.0, 3.0, 11)
    np.testing.assert_allclose(q.evaluate(xs), p.evaluate(xs), atol=1e-12)
    assert q.support_radius == pytest.approx(p.support_radius)


def test_delta_spec_round_trip():
    q = from_spec(make_delta(-2.0).to_spec())
    assert isinstance(q, Delta) and q.g == -2.0


def test_spec_file_round_trip(tmp_path):
    path = tmp_path / "pot.json"
    path.write_text(json.dumps(make_square_well(-6.0, 1.5).to_spec()))
    p = load_spec_file(path)
    assert p.kind == "square-well"
    assert float(p.evaluate(np.array([0.0]))[0]) == pytest.approx(-6.0)


def test_invalid_parameters_rejected():
    with pytest.raises(InvalidParameterError):
        make_poschl_teller(0)
    with pytest.raises(InvalidParameterError):
        make_square_well(-1.0, -0.5)
    with pytest.raises(InvalidParameterError):
        make_gaussian(-1.0, 0.0, 0.0)
    with pytest.raises(InvalidParameterError):
        make_sech_well(-1.0)
    with pytest.raises(InvalidParameterError):
        make_sampled([[0.0, 1.0], [1.0, 2.0]])  # too few samples
    with pytest.raises(InvalidParameterError):
        make_delta(0.0)


def test_composite_rejects_non_analytic_terms():
    with pytest.raises(InvalidParameterError):
        make_composite([make_delta(-1.0)])
    with pytest.raises(InvalidParameterError):
        make_composite([make_composite([make_gaussian(-1.0)])])


def test_bad_spec_rejected():
    with pytest.raises(InvalidParameterError):
        from_spec({"kind": "no_such_kind"})
    with pytest.raises(InvalidParameterError):
        from_spec({"kind": "delta", "g": -2.0, "bogus": 1})
    with pytest.raises(InvalidParameterError):
        from_spec(["not", "a", "mapping"])


def test_free_potential_is_zero():
    p = make_free()
    assert p.kind == "free"
    assert np.all(p.evaluate(np.linspace(-5, 5, 101)) == 0.0)
    assert p.moment0 == 0.0

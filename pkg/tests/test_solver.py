"""Scattering solver against closed forms and structural identities."""

import cmath

import numpy as np
import pytest

from levdens import (DomainError, build_grid, closed_form_amplitudes,
                     make_delta, make_free, make_gaussian, make_poschl_teller,
                     make_sampled, make_sech_well, make_square_well,
                     solve_both, solve_direct, solve_wavefunction, solve_zurdo,
                     wronskian_residual)
from levdens.solver import integrate_values


def square_well_amplitudes(depth, a, k):
    """Transfer-matrix closed form for u = depth on (-a, a), zero outside."""
    q = cmath.sqrt(k * k - depth)
    c, s = cmath.cos(2 * q * a), cmath.sin(2 * q * a)
    t = cmath.exp(-2j * k * a) / (c - 0.5j * (k / q + q / k) * s)
    b = t * 0.5j * (q / k - k / q) * s
    return t, b


def test_free_is_transparent():
    sol = solve_direct(make_free(), 1.3)
    assert sol.t == pytest.approx(1.0, abs=1e-6)
    assert sol.b == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("k", [0.05, 0.5, 1.0, 5.0, 20.0])
def test_pt1_matches_closed_form(k):
    p = make_poschl_teller(1)
    t_exact, _ = closed_form_amplitudes(p, k)
    sol = solve_direct(p, k)
    assert sol.t == pytest.approx(t_exact, abs=5e-6)
    assert abs(sol.b) < 5e-6  # reflectionless


@pytest.mark.parametrize("k", [0.1, 0.7, 2.0, 10.0])
@pytest.mark.parametrize("depth,a", [(-1.0, 1.0), (-6.0, 1.5), (2.5, 0.8)])
def test_square_well_matches_transfer_matrix(depth, a, k):
    t_exact, b_exact = square_well_amplitudes(depth, a, k)
    sol = solve_direct(make_square_well(depth, a), k)
    assert sol.t == pytest.approx(t_exact, abs=2e-6)
    assert sol.b == pytest.approx(b_exact, abs=2e-6)


@pytest.mark.parametrize("k", [0.3, 1.0, 4.0])
def test_delta_surrogate_matches_closed_form(k):
    d = make_delta(-2.0)
    t_exact, b_exact = closed_form_amplitudes(d, k)
    sol = solve_direct(d, k)  # solver substitutes the narrow surrogate
    # the finite surrogate width costs O(g^2 w^2), a few 1e-4 here
    assert sol.t == pytest.approx(t_exact, abs=1e-3)
    assert sol.b == pytest.approx(b_exact, abs=1e-3)


POTS = [
    make_poschl_teller(1),
    make_sech_well(3.5),
    make_square_well(-6.0, 1.5),
    make_gaussian(-2.0, 0.0, 1.0),
    make_gaussian(3.0, 0.7, 0.5),
]


@pytest.mark.parametrize("k", [0.05, 0.9, 7.0])
@pytest.mark.parametrize("p", POTS, ids=lambda p: p.kind)
def test_unitarity_and_reciprocity(p, k):
    d, z = solve_both(p, k)
    # flux conservation per channel
    assert abs(d.t) ** 2 + abs(d.b) ** 2 == pytest.approx(1.0, abs=1e-6)
    assert abs(z.t_z) ** 2 + abs(z.b_z) ** 2 == pytest.approx(1.0, abs=1e-6)
    # transmission is direction-independent
    assert d.t == pytest.approx(z.t_z, abs=1e-6)


def test_asymmetric_potential_reflections_differ_in_phase_only():
    p = make_gaussian(-2.0, center=1.2, width=0.8)
    d, z = solve_both(p, 1.1)
    assert abs(d.b) == pytest.approx(abs(z.b_z), abs=1e-6)
    assert d.b != pytest.approx(z.b_z, abs=1e-3)


def test_refinement_converged():
    # halving the step must not move the amplitudes at this accuracy
    p = make_gaussian(-2.0, 0.0, 1.0)
    s1 = solve_direct(p, 1.0)
    s2 = solve_direct(p, 1.0, refine=2)
    assert s1.t == pytest.approx(s2.t, abs=1e-6)
    assert s1.b == pytest.approx(s2.b, abs=1e-6)


def test_threshold_wavefunction_pt1():
    # k -> 0 limit of the normalized direct wave is -tanh(x)
    x, psi = solve_wavefunction(make_poschl_teller(1), 1e-4)
    inside = np.abs(x) <= 5.0
    assert np.max(np.abs(psi[inside] - (-np.tanh(x[inside])))) < 1e-2


def test_pt1_wavefunction_at_origin():
    x, psi = solve_wavefunction(make_poschl_teller(1), 1.0)
    i0 = int(np.argmin(np.abs(x)))
    assert x[i0] == pytest.approx(0.0, abs=1e-12)
    # closed form: psi(0) = (1 + i)/2 at k = 1
    assert psi[i0] == pytest.approx(0.5 + 0.5j, abs=1e-5)


def test_grid_structure():
    p = make_square_well(-1.0, 1.0)
    g = build_grid(p, 2.0)
    assert g.x[0] == -g.L and g.x[-1] == g.L
    assert np.all(np.diff(g.x) > 0)
    # regions split at the well edges
    edges = {r.x0 for r in g.regions} | {r.x1 for r in g.regions}
    assert any(abs(e - 1.0) < 1e-12 for e in edges)
    assert any(abs(e + 1.0) < 1e-12 for e in edges)
    for r in g.regions:
        assert r.n % 2 == 0  # Simpson-ready


def test_grid_snaps_and_box_override():
    p = make_gaussian(-1.0, 0.0, 1.0)
    g = build_grid(p, 1.0, L_box=30.0, snaps=(-25.0, 25.0))
    assert g.L == pytest.approx(30.0)
    edges = {r.x0 for r in g.regions}
    assert any(abs(e + 25.0) < 1e-12 for e in edges)


def test_bad_arguments_rejected():
    p = make_gaussian(-1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        solve_direct(p, 0.0)
    with pytest.raises(DomainError):
        solve_direct(p, -1.0)
    with pytest.raises(DomainError):
        # box too small to hold the tail windows
        build_grid(p, 1.0, L_box=p.support_radius + 1.0)
    with pytest.raises(DomainError):
        build_grid(p, 1.0, snaps=(1e9,))


def test_integrate_values_requires_aligned_bounds():
    p = make_square_well(-1.0, 1.0)
    g = build_grid(p, 1.0)
    ones = np.ones_like(g.x)
    assert integrate_values(g, ones) == pytest.approx(2.0 * g.L, rel=1e-12)
    assert integrate_values(g, ones, -1.0, 1.0) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        integrate_values(g, ones, -0.123456, 0.5)


@pytest.mark.parametrize("p", [make_poschl_teller(1),
                               make_square_well(-6.0, 1.5),
                               make_gaussian(-2.0, 0.7, 0.9)],
                         ids=lambda p: p.kind)
def test_wronskian_identity(p):
    # independent structural check tying psi, t, b, and the grid together
    assert wronskian_residual(p, 1.3) < 1e-4


def test_sampled_potential_scatters_like_its_source():
    xs = np.linspace(-8.0, 8.0, 401)
    src = make_gaussian(-2.0, 0.0, 1.0)
    p = make_sampled(np.column_stack([xs, src.evaluate(xs)]))
    s_src = solve_direct(src, 1.0)
    s_smp = solve_direct(p, 1.0)
    assert s_smp.t == pytest.approx(s_src.t, abs=1e-5)
    assert s_smp.b == pytest.approx(s_src.b, abs=1e-5)


def test_zurdo_mirror_symmetry():
    # for an even potential the two channels are exact mirrors
    p = make_square_well(-6.0, 1.5)
    d = solve_direct(p, 0.8)
    z = solve_zurdo(p, 0.8)
    assert d.b == pytest.approx(z.b_z, abs=1e-9)

"""Relative spectral density, three ways, and their cross-checks.

The density of continuum states relative to free space can be computed:

  1. spatially: integrate |psi_k|^2 - 1 over a box [-L, L] (box_density);
     the result oscillates in L through a sin(phi_r + 2kL) term and is
     not meant to converge pointwise as L grows,
  2. from the finite-box identity that relates that integral to phase
     derivatives and the reflection amplitude (finite_L_identity_residual
     measures how well both sides agree), and
  3. in the large-box limit, where only the transmission-phase
     derivative survives plus a delta spike at k = 0 carrying pi * b(0)
     (density_from_phase).

reflection_tail_integral probes the mechanism behind the spike: the
oscillatory reflection term, integrated over k, concentrates all its
weight near k = 0 as the box grows and tends to pi * b(0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import sici

from .errors import DomainError, InvalidParameterError
from .potentials import Potential, closed_form_amplitudes
from .smatrix import PHASE_FLOOR, PhaseCurve, _principal
from .solver import build_grid, integrate_values, solve_direct

#: relative k-step for local phase derivatives
_DK_LOCAL = 1e-3
#: oscillation sampling for the tail integral, points per 2*pi period
_TAIL_SAMPLES_PER_PERIOD = 24


@dataclass(frozen=True)
class SpectralDensity:
    """Smooth density on a k-grid plus the symbolic delta-spike weight.

    The spike at k = 0 is never discretized; its coefficient
    delta_weight = pi * b0 enters sums analytically.
    """

    k_grid: np.ndarray
    rho_smooth: np.ndarray
    delta_weight: float
    b0: float
    moment0: float


def density_from_phase(curve: PhaseCurve, b0: float) -> SpectralDensity:
    """Large-box density: derivative of the transmission phase.

    b0 is the classified zero-k reflection amplitude (-1 or 0); see
    classify_b0 in the levinson module.
    """
    if b0 not in (-1.0, 0.0, -1, 0):
        raise InvalidParameterError(f"b0 must be -1 or 0 after classification, got {b0}")
    rho = np.gradient(curve.phi_t, curve.k_grid, edge_order=2)
    return SpectralDensity(k_grid=curve.k_grid, rho_smooth=rho,
                           delta_weight=np.pi * float(b0), b0=float(b0),
                           moment0=curve.moment0)


def box_density(p: Potential, k: float, L: float) -> float:
    """Integral of |psi_k|^2 - 1 over [-L, L] for the direct channel.

    The box edges land exactly on quadrature nodes; the integration box
    of the solve extends beyond L so the matching window never overlaps
    the density box.
    """
    radius = p.support_radius
    if L <= radius:
        raise DomainError(f"box half-width {L} must exceed the support radius {radius}")
    lam = 2.0 * np.pi / k
    L_solve = max(L + 2.0 * lam, radius + 5.0 * lam)
    grid = build_grid(p, k, L_box=L_solve, snaps=(-L, L))
    sol = solve_direct(p, k, grid=grid)
    return integrate_values(grid, np.abs(sol.psi) ** 2 - 1.0, -L, L)


def _local_phase_data(p: Potential, k: float):
    """Amplitudes at k and centered phase derivatives from a 3-point stencil."""
    dk = _DK_LOCAL * max(k, 0.1)
    if k - dk <= 0:
        dk = 0.5 * k
    sols = [solve_direct(p, kk) for kk in (k - dk, k, k + dk)]
    t_lo, t_mid, t_hi = (s.t for s in sols)
    b_lo, b_mid, b_hi = (s.b for s in sols)
    dphi_t = _principal(np.angle(t_hi) - np.angle(t_lo)) / (2.0 * dk)
    dphi_r = _principal(np.angle(b_hi) - np.angle(b_lo)) / (2.0 * dk)
    return t_mid, b_mid, float(dphi_t), float(dphi_r)


def finite_L_identity_residual(p: Potential, k: float, L: float,
                               phase_floor: float = PHASE_FLOOR) -> float:
    """Mismatch of the finite-box density identity at one (k, L).

    Both sides carry the leading 2L volume term; after it cancels, the
    identity states

        2k * (box_density + 2L) = 4kL + 2k dphi_t/dk
            + 2k |b|^2 (dphi_r/dk - dphi_t/dk) + 2|b| sin(phi_r + 2kL)

    with everything from the direct channel.  Below the phase floor,
    the reflection terms (each carrying a power of |b|) are dropped.
    """
    lhs = 2.0 * k * (box_density(p, k, L) + 2.0 * L)
    _, b_mid, dphi_t, dphi_r = _local_phase_data(p, k)
    rhs = 4.0 * k * L + 2.0 * k * dphi_t
    mag = abs(b_mid)
    if mag >= phase_floor:
        phi_r = np.angle(b_mid)
        rhs += 2.0 * k * mag ** 2 * (dphi_r - dphi_t)
        rhs += 2.0 * mag * np.sin(phi_r + 2.0 * k * L)
    return abs(lhs - rhs)


def _amplitude_spline(p: Potential, k_lo: float, k_hi: float, channel: str,
                      curve: Optional[PhaseCurve] = None):
    """Cubic interpolant of b(k) (or its mirror) on [k_lo, k_hi]."""
    if closed_form_amplitudes(p, 0.5 * (k_lo + k_hi)) is not None:
        ks = np.geomspace(k_lo, k_hi, 600)
        amps = np.array([closed_form_amplitudes(p, kk)[1] for kk in ks])
        return CubicSpline(ks, amps)
    if curve is not None:
        sel = (curve.k_grid >= k_lo) & (curve.k_grid <= k_hi)
        if sel.sum() >= 200:
            ks = curve.k_grid[sel]
            amps = (curve.b if channel == "direct" else curve.b_z)[sel]
            return CubicSpline(ks, amps)
    ks = np.geomspace(k_lo, k_hi, 400)
    if channel == "direct":
        amps = np.array([solve_direct(p, kk).b for kk in ks])
    else:
        from .solver import solve_zurdo
        amps = np.array([solve_zurdo(p, kk).b_z for kk in ks])
    return CubicSpline(ks, amps)


def reflection_tail_integral(p: Potential, L: float, k_cut: float,
                             curve: Optional[PhaseCurve] = None,
                             k_lo: float = 1e-3) -> float:
    """Oscillatory reflection integral over both channels.

    Evaluates  sum over channels of  int_0^k_cut Im[b(k) e^{2ikL}] / k dk
    (the two channels realize the even extension to negative k).  The
    substitution k' = 2kL turns the integrand into a unit-rate
    oscillation times the slowly varying amplitude, handled by dense
    trapezoid sampling; the [0, k_lo) head, where amplitudes are not
    solved, is completed analytically as b(0) Si(2 k_lo L) using the
    extrapolated zero-k reflection amplitude.  The result approaches
    pi * b(0) as L grows.
    """
    if L <= p.support_radius:
        raise DomainError(f"L = {L} must exceed the support radius {p.support_radius}")
    if not 0 < k_lo < k_cut:
        raise InvalidParameterError(f"need 0 < k_lo < k_cut, got {k_lo}, {k_cut}")
    total = 0.0
    for channel in ("direct", "zurdo"):
        spline = _amplitude_spline(p, k_lo, k_cut, channel, curve)
        # completion over [0, k_lo): b(k) ~ b(0) real, Im[b e^{ik'}] ~ b0 sin k'
        probe = np.linspace(k_lo, min(5.0 * k_lo, k_cut), 5)
        b0_fit = np.polyfit(probe, np.real(spline(probe)), 2)
        b0_est = float(np.polyval(b0_fit, 0.0))
        total += b0_est * float(sici(2.0 * k_lo * L)[0])
        # oscillation-aware body: k' = 2kL runs at unit rate
        kp_lo, kp_hi = 2.0 * k_lo * L, 2.0 * k_cut * L
        n = max(int((kp_hi - kp_lo) / (2.0 * np.pi) * _TAIL_SAMPLES_PER_PERIOD), 64)
        kp = np.linspace(kp_lo, kp_hi, n)
        ks = kp / (2.0 * L)
        integrand = np.imag(spline(ks) * np.exp(1j * kp)) / kp
        total += float(np.trapezoid(integrand, kp))
    return total

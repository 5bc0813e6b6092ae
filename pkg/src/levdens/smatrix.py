"""S-matrix assembly and continuous phase curves over a wavenumber grid.

The 2x2 scattering matrix at one k collects both channels' amplitudes as

    S = [[t, b_z], [b, t_z]]

and is unitary for real potentials; time reversal forces t = t_z.  The
phase curve tracks the transmission phase arg t(k) continuously across
the grid, resolving the 2*pi branch by (a) nearest-branch continuation
from the top of the grid downward and (b) anchoring the absolute branch
at k_max to the weak-coupling estimate arg t ~ -m0/(2k), m0 = integral
of u.  That estimate is also what makes "the phase at infinity" finite:
the anchored curve has arg t -> 0 as k -> infinity by construction, so
bound-state counting reads off phi_t(0+) alone.

Reflection phases carry less structure but more hazards: |b| can pass
through zero inside the band (transmission resonances), where arg b
genuinely jumps by pi.  Points with |b| below a floor are marked
undefined (NaN), and the curve records the segment breaks so that
derivative consumers never difference across a branch jump.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backend
from .errors import AccuracyError, InvalidParameterError, UnwrapError
from .potentials import Potential
from .solver import MATCH_TOL, UNITARITY_TOL, solve_both

DEFAULT_K_MIN = 1e-3
DEFAULT_K_MAX = 50.0
DEFAULT_N_K = 400
#: |b| below this has no usable phase
PHASE_FLOOR = 1e-4
#: wrapped adjacent-point jumps above this fraction of pi trigger grid refinement
_ALIAS_FRACTION = 0.9
_MAX_REFINE_ROUNDS = 6
#: slack on the weak-coupling anchor check at k_max (relative + absolute)
BORN_CHECK_REL = 0.4
BORN_CHECK_ABS = 2e-2


def default_k_grid(k_min: float = DEFAULT_K_MIN, k_max: float = DEFAULT_K_MAX,
                   n_k: int = DEFAULT_N_K) -> np.ndarray:
    """Geometric grid: resolves k -> 0 and the large-k tail with equal care."""
    if not (0 < k_min < k_max):
        raise InvalidParameterError(f"need 0 < k_min < k_max, got {k_min}, {k_max}")
    if n_k < 16:
        raise InvalidParameterError(f"n_k must be at least 16, got {n_k}")
    return np.geomspace(k_min, k_max, n_k)


@dataclass(frozen=True)
class SMatrix:
    """One-k scattering matrix with its unitarity diagnostic."""

    k: float
    entries: np.ndarray
    unitarity_residual: float
    degraded: bool

    @property
    def t(self) -> complex:
        return self.entries[0, 0]

    @property
    def b(self) -> complex:
        return self.entries[1, 0]

    @property
    def b_z(self) -> complex:
        return self.entries[0, 1]

    @property
    def t_z(self) -> complex:
        return self.entries[1, 1]

    @property
    def det(self) -> complex:
        return self.t * self.t_z - self.b * self.b_z


def assemble(sol_direct, sol_zurdo, unitarity_tol: float = UNITARITY_TOL) -> SMatrix:
    """Combine the two channel solves at one k into an S-matrix.

    A unitarity residual above 10x tolerance flags the result degraded
    rather than failing: the caller decides whether to refine.
    """
    if sol_direct.t is None or sol_zurdo.t_z is None:
        raise InvalidParameterError("assemble needs a direct and a zurdo solution")
    if abs(sol_direct.k - sol_zurdo.k) > 1e-12 * max(1.0, abs(sol_direct.k)):
        raise InvalidParameterError(
            f"channel solutions at different k: {sol_direct.k} vs {sol_zurdo.k}")
    entries = np.array([[sol_direct.t, sol_zurdo.b_z],
                        [sol_direct.b, sol_zurdo.t_z]])
    gram = entries.conj().T @ entries
    residual = float(np.max(np.abs(gram - np.eye(2))))
    return SMatrix(k=sol_direct.k, entries=entries,
                   unitarity_residual=residual,
                   degraded=residual > 10.0 * unitarity_tol)


@dataclass(frozen=True)
class PhaseCurve:
    """Amplitudes and unwrapped phases on an ascending k-grid.

    phi_r / phi_r_z are NaN where the reflection amplitude is below the
    phase floor; *_breaks list index pairs (i, i+1) where the phase
    branch jumps inside an otherwise-defined run, so derivatives must
    not straddle them.
    """

    k_grid: np.ndarray
    phi_t: np.ndarray
    phi_r: np.ndarray
    phi_r_z: np.ndarray
    phi_t_0: float
    phi_t_inf: float
    t: np.ndarray
    b: np.ndarray
    t_z: np.ndarray
    b_z: np.ndarray
    unitarity: np.ndarray
    time_reversal: np.ndarray
    det_residual: np.ndarray
    match_residual: float
    moment0: float
    born_phase: float
    phi_r_breaks: tuple
    phi_r_z_breaks: tuple
    degraded_count: int

    @property
    def k_max(self) -> float:
        return float(self.k_grid[-1])


def _principal(d):
    return (d + np.pi) % (2.0 * np.pi) - np.pi


def _unwrap_descending(raw: np.ndarray) -> np.ndarray:
    # continuity is established from the top of the grid downward
    return np.unwrap(raw[::-1])[::-1]


def _alias_pairs(raw: np.ndarray, defined: Optional[np.ndarray] = None):
    """Adjacent index pairs whose wrapped phase jump is suspiciously large."""
    jumps = np.abs(_principal(np.diff(raw)))
    bad = jumps > _ALIAS_FRACTION * np.pi
    if defined is not None:
        bad &= defined[:-1] & defined[1:]
    return set(np.nonzero(bad)[0])


def _segment_phases(ks, amps, floor, forced_breaks):
    """Per-run unwrapped arg(amps); NaN below floor; returns (phases, breaks)."""
    n = ks.size
    phases = np.full(n, np.nan)
    defined = np.abs(amps) >= floor
    breaks = []
    i = 0
    while i < n:
        if not defined[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and defined[j + 1] and j not in forced_breaks:
            j += 1
        phases[i:j + 1] = _unwrap_descending(np.angle(amps[i:j + 1]))
        if j + 1 < n and defined[j + 1] and j in forced_breaks:
            breaks.append(j)
        i = j + 1
    return phases, tuple(breaks)


def build_phase_curve(p: Potential, k_grid: Optional[np.ndarray] = None, *,
                      phase_floor: float = PHASE_FLOOR,
                      unitarity_tol: float = UNITARITY_TOL) -> PhaseCurve:
    """Solve both channels across the grid and unwrap the phases.

    The grid refines itself adaptively: any adjacent pair whose wrapped
    phase jump approaches pi gets a geometric midpoint inserted and
    re-solved, until the unwrap is unambiguous or the round limit hits.
    Transmission-phase ambiguity after the limit is fatal (UnwrapError);
    leftover reflection-phase jumps become recorded segment breaks,
    since those occur legitimately at zeros of b.
    """
    if k_grid is None:
        k_grid = default_k_grid()
    ks = np.asarray(k_grid, dtype=float)
    if ks.ndim != 1 or ks.size < 2 or not np.all(np.diff(ks) > 0) or ks[0] <= 0:
        raise InvalidParameterError("k_grid must be ascending positive, size >= 2")

    sols = {}

    def solve_at(k):
        return solve_both(p, float(k))

    def merge(new_ks):
        for k, pair in zip(new_ks, backend.parallel_map(solve_at, new_ks)):
            sols[float(k)] = pair

    merge(ks)
    r_breaks_d = r_breaks_z = set()
    for round_no in range(_MAX_REFINE_ROUNDS + 1):
        t_arr = np.array([sols[k][0].t for k in ks])
        b_arr = np.array([sols[k][0].b for k in ks])
        bz_arr = np.array([sols[k][1].b_z for k in ks])
        bad_t = _alias_pairs(np.angle(t_arr))
        bad_r_d = _alias_pairs(np.angle(b_arr), np.abs(b_arr) >= phase_floor)
        bad_r_z = _alias_pairs(np.angle(bz_arr), np.abs(bz_arr) >= phase_floor)
        bad = bad_t | bad_r_d | bad_r_z
        if not bad:
            r_breaks_d = r_breaks_z = set()
            break
        if round_no == _MAX_REFINE_ROUNDS:
            if bad_t:
                raise UnwrapError(
                    "transmission phase cannot be unwrapped: adjacent jump "
                    f"near pi persists after {round_no} refinement rounds "
                    f"around k = {ks[min(bad_t)]:.6g}")
            r_breaks_d, r_breaks_z = bad_r_d, bad_r_z
            break
        mids = np.array(sorted(np.sqrt(ks[i] * ks[i + 1]) for i in bad))
        merge(mids)
        ks = np.sort(np.concatenate([ks, mids]))

    tz_arr = np.array([sols[k][1].t_z for k in ks])
    matrices = [assemble(sols[k][0], sols[k][1], unitarity_tol) for k in ks]
    unitarity = np.array([m.unitarity_residual for m in matrices])
    time_reversal = np.abs(t_arr - tz_arr)
    match_worst = max(max(sols[k][0].match_residual, sols[k][1].match_residual)
                      for k in ks)

    # absolute branch: anchor arg t at k_max to the weak-coupling tail
    born = -p.moment0 / (2.0 * ks[-1])
    phi_t = _unwrap_descending(np.angle(t_arr))
    phi_t += 2.0 * np.pi * np.round((born - phi_t[-1]) / (2.0 * np.pi))
    tail_err = abs(phi_t[-1] - born)
    if tail_err > BORN_CHECK_REL * abs(born) + BORN_CHECK_ABS:
        raise AccuracyError(
            f"transmission phase at k_max={ks[-1]:.4g} is {phi_t[-1]:.4g}, "
            f"far from the weak-coupling estimate {born:.4g}; "
            "extend the grid or distrust the branch anchor",
            residual=tail_err)

    phi_r, breaks_d = _segment_phases(ks, b_arr, phase_floor, r_breaks_d)
    phi_r_z, breaks_z = _segment_phases(ks, bz_arr, phase_floor, r_breaks_z)

    n_fit = min(5, ks.size)
    coeffs = np.polyfit(ks[:n_fit], phi_t[:n_fit], 2)
    phi_t_0 = float(np.polyval(coeffs, 0.0))

    det = t_arr * tz_arr - b_arr * bz_arr
    det_residual = np.abs(det - np.exp(2j * phi_t))

    return PhaseCurve(
        k_grid=ks, phi_t=phi_t, phi_r=phi_r, phi_r_z=phi_r_z,
        phi_t_0=phi_t_0, phi_t_inf=0.0,
        t=t_arr, b=b_arr, t_z=tz_arr, b_z=bz_arr,
        unitarity=unitarity, time_reversal=time_reversal,
        det_residual=det_residual, match_residual=match_worst,
        moment0=p.moment0, born_phase=born,
        phi_r_breaks=breaks_d, phi_r_z_breaks=breaks_z,
        degraded_count=int(sum(m.degraded for m in matrices)))


def det_winding(curve: PhaseCurve) -> float:
    """Winding of det S along the k-line, from the determinant samples.

    Accumulates the continuous argument of det S across the grid (its
    own unwrap, independent of phi_t), fixes the absolute branch at
    k_max where arg det -> 2 * arg t -> twice the weak-coupling phase,
    extrapolates to k = 0+, and returns the full swing over the line in
    units of 2*pi.  Equals the bound-state count plus half the zero-k
    reflection amplitude for consistent curves.
    """
    det = curve.t * curve.t_z - curve.b * curve.b_z
    theta = _unwrap_descending(np.angle(det))
    anchor = 2.0 * curve.born_phase
    theta += 2.0 * np.pi * np.round((anchor - theta[-1]) / (2.0 * np.pi))
    n_fit = min(5, curve.k_grid.size)
    coeffs = np.polyfit(curve.k_grid[:n_fit], theta[:n_fit], 2)
    theta_0 = float(np.polyval(coeffs, 0.0))
    # the tail beyond k_max unwinds the anchor value to zero analytically
    return theta_0 / (2.0 * np.pi)

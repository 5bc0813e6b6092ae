"""Built-in verification suite: the package checking itself end to end.

Each criterion exercises one pillar (closed-form densities, sum rules,
the contact-interaction family, counting over a varied potential set,
unitarity, determinant winding, the finite-box identity, weak-coupling
tails, the oscillatory-tail limit, the criticality sweep, threshold
wavefunctions) and reports pass/fail with a one-line detail.  The CLI
`verify` command and the test suite both run these same functions, so
there is exactly one definition of "working".
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import backend
from .levinson import classify_b0, count_bound_states_oracle, levinson_verdict
from .levinson import sum_rule_integral
from .potentials import (closed_form_amplitudes, from_spec, make_delta,
                         make_poschl_teller, make_sech_well, make_square_well)
from .smatrix import build_phase_curve, default_k_grid
from .spectral import (density_from_phase, finite_L_identity_residual,
                       reflection_tail_integral)
from .solver import solve_direct


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str
    elapsed: float


#: the twelve-potential counting set: varied wells, shapes, asymmetries
COUNTING_SET = (
    ("sech-well-2", {"kind": "sech-well", "strength": 2.0}),
    ("sech-well-6", {"kind": "sech-well", "strength": 6.0}),
    ("sech-well-3.5", {"kind": "sech-well", "strength": 3.5}),
    ("square-well-shallow", {"kind": "square-well", "depth": -1.0, "half_width": 1.0}),
    ("square-well-deep", {"kind": "square-well", "depth": -6.0, "half_width": 1.5}),
    ("gaussian-moderate", {"kind": "gaussian", "amplitude": -2.0, "center": 0.0, "width": 1.0}),
    ("gaussian-deep", {"kind": "gaussian", "amplitude": -8.0, "center": 0.0, "width": 0.8}),
    ("asym-double-a", {"kind": "composite", "terms": [
        {"kind": "gaussian", "amplitude": -2.5, "center": -1.5, "width": 0.8},
        {"kind": "gaussian", "amplitude": -1.0, "center": 2.0, "width": 1.3}]}),
    ("asym-double-b", {"kind": "composite", "terms": [
        {"kind": "gaussian", "amplitude": -3.0, "center": -2.0, "width": 0.7},
        {"kind": "gaussian", "amplitude": -1.5, "center": 1.0, "width": 0.6}]}),
    ("asym-double-c", {"kind": "composite", "terms": [
        {"kind": "gaussian", "amplitude": -1.2, "center": -1.0, "width": 0.9},
        {"kind": "gaussian", "amplitude": -0.8, "center": 1.8, "width": 1.1}]}),
    ("barrier-well", {"kind": "composite", "terms": [
        {"kind": "gaussian", "amplitude": 1.5, "center": 0.0, "width": 0.6},
        {"kind": "gaussian", "amplitude": -5.0, "center": 0.0, "width": 1.0}]}),
    ("sampled-well", {"kind": "sampled", "samples": [
        [float(x), float(-3.0 * np.exp(-(x - 0.5) ** 2))]
        for x in np.linspace(-8.0, 8.0, 161)]}),
)


class _Context:
    """Caches phase curves and verdicts shared between criteria."""

    def __init__(self):
        self._curves = {}
        self._verdicts = {}

    def curve(self, key, p, k_grid=None):
        if key not in self._curves:
            self._curves[key] = build_phase_curve(p, k_grid)
        return self._curves[key]

    def verdict(self, key, p):
        if key not in self._verdicts:
            curve = self.curve(key, p)
            self._verdicts[key] = levinson_verdict(p, curve=curve)
        return self._verdicts[key]


def _crit_reflectionless_density(ctx) -> tuple:
    t0 = time.time()
    p = make_poschl_teller(1)
    curve = ctx.curve("pt1-band", p, default_k_grid(1e-2, 20.0, 400))
    density = density_from_phase(curve, 0.0)
    err = float(np.max(np.abs(density.rho_smooth
                              + 2.0 / (curve.k_grid ** 2 + 1.0))))
    elapsed = time.time() - t0
    ok = err < 1e-3 and elapsed < 10.0
    return ok, f"max density error {err:.2e} (tol 1e-3), {elapsed:.1f}s (limit 10s)"


def _crit_reflectionless_sum_rule(ctx) -> tuple:
    p = make_poschl_teller(1)
    report = ctx.verdict("pt1", p)
    curve = ctx.curve("pt1", p)
    total = sum_rule_integral(density_from_phase(curve, report.b0))
    err = abs(total + 2.0 * np.pi)
    ok = err < 0.05 and report.verdict == "pass" and report.n_oracle == 1
    return ok, (f"sum rule {total:.4f} vs {-2 * np.pi:.4f} (tol 0.05), "
                f"count {report.n_oracle}, verdict {report.verdict}")


def _crit_contact_family(ctx) -> tuple:
    worst_amp = worst_rho = 0.0
    counts_ok = True
    for g in (-2.0, 2.0, -0.5, 0.5):
        p = make_delta(g)
        curve = ctx.curve(f"delta{g:+g}", p)
        closed = np.array([closed_form_amplitudes(p, k) for k in curve.k_grid])
        worst_amp = max(worst_amp,
                        float(np.max(np.abs(curve.t - closed[:, 0]))),
                        float(np.max(np.abs(curve.b - closed[:, 1]))))
        density = density_from_phase(curve, -1.0)
        rho_exact = 2.0 * g / (g * g + 4.0 * curve.k_grid ** 2)
        worst_rho = max(worst_rho,
                        float(np.max(np.abs(density.rho_smooth - rho_exact))))
        report = ctx.verdict(f"delta{g:+g}", p)
        expected = 1 if g < 0 else 0
        counts_ok &= (report.n_oracle == expected
                      and round(report.n_levinson) == expected)
    ok = worst_amp < 1e-3 and worst_rho < 1e-3 and counts_ok
    return ok, (f"surrogate amplitude err {worst_amp:.2e}, density err "
                f"{worst_rho:.2e} (tol 1e-3), counts exact: {counts_ok}")


def _crit_counting_set(ctx) -> tuple:
    t0 = time.time()
    worst = 0.0
    failures = []
    for name, spec in COUNTING_SET:
        report = ctx.verdict(name, from_spec(spec))
        worst = max(worst, report.deviation)
        if report.verdict != "pass" or report.deviation >= 0.05:
            failures.append(f"{name}: n={report.n_levinson:.3f} "
                            f"oracle={report.n_oracle}")
    elapsed = time.time() - t0
    ok = not failures and elapsed < 120.0
    detail = (f"12 potentials, worst integer deviation {worst:.3f} "
              f"(tol 0.05), {elapsed:.0f}s (limit 120s)")
    if failures:
        detail += "; FAILED " + "; ".join(failures)
    return ok, detail


_UNITARITY_KEYS = ("pt1", "delta-2", "delta+0.5", "square-well-shallow",
                   "gaussian-moderate", "asym-double-a")
_UNITARITY_POTS = {
    "pt1": lambda: make_poschl_teller(1),
    "delta-2": lambda: make_delta(-2.0),
    "delta+0.5": lambda: make_delta(0.5),
    "square-well-shallow": lambda: from_spec(dict(COUNTING_SET[3][1])),
    "gaussian-moderate": lambda: from_spec(dict(COUNTING_SET[5][1])),
    "asym-double-a": lambda: from_spec(dict(COUNTING_SET[7][1])),
}


def _crit_unitarity(ctx) -> tuple:
    worst_u = worst_tr = 0.0
    for key in _UNITARITY_KEYS:
        curve = ctx.curve(key, _UNITARITY_POTS[key]())
        worst_u = max(worst_u, float(np.max(curve.unitarity)))
        worst_tr = max(worst_tr, float(np.max(curve.time_reversal)))
    ok = worst_u < 1e-6 and worst_tr < 1e-6
    return ok, (f"max |S S^dag - 1| = {worst_u:.2e}, max |t - t_z| = "
                f"{worst_tr:.2e} over {len(_UNITARITY_KEYS)} fixtures (tol 1e-6)")


def _crit_determinant_winding(ctx) -> tuple:
    worst_det = worst_wind = 0.0
    for key in _UNITARITY_KEYS:
        curve = ctx.curve(key, _UNITARITY_POTS[key]())
        report = ctx.verdict(key, _UNITARITY_POTS[key]())
        worst_det = max(worst_det, float(np.max(curve.det_residual)))
        worst_wind = max(worst_wind,
                         abs(report.winding - (report.n_levinson + report.b0 / 2.0)))
    ok = worst_det < 1e-5 and worst_wind <= 0.02
    return ok, (f"max |det S - e^(2i phi_t)| = {worst_det:.2e} (tol 1e-5), "
                f"winding deviation {worst_wind:.3f} (tol 0.02)")


_LATTICE_POTS = (
    ("pt1", lambda: make_poschl_teller(1)),
    ("delta-2", lambda: make_delta(-2.0)),
    ("square-well", lambda: make_square_well(-1.0, 1.0)),
    ("gaussian", lambda: from_spec(dict(COUNTING_SET[5][1]))),
    ("asym-double", lambda: from_spec(dict(COUNTING_SET[7][1]))),
)


def _crit_finite_box_identity(ctx) -> tuple:
    ks = np.geomspace(0.2, 3.0, 10)
    Ls = np.linspace(14.0, 32.0, 10)
    worst = 0.0
    worst_at = ""
    for name, maker in _LATTICE_POTS:
        p = maker()
        points = [(k, L) for k in ks for L in Ls]
        residuals = backend.parallel_map(
            lambda pt: finite_L_identity_residual(p, pt[0], pt[1]), points)
        idx = int(np.argmax(residuals))
        if residuals[idx] > worst:
            worst = float(residuals[idx])
            worst_at = f"{name} k={points[idx][0]:.2f} L={points[idx][1]:.0f}"
    ok = worst < 1e-2
    return ok, (f"worst residual {worst:.2e} at {worst_at} over "
                f"{len(_LATTICE_POTS)}x100 lattice points (tol 1e-2)")


def _crit_weak_coupling_tail(ctx) -> tuple:
    ratios = []
    for key in _UNITARITY_KEYS:
        p = _UNITARITY_POTS[key]()
        if p.moment0 == 0.0:
            continue
        curve = ctx.curve(key, p)
        density = density_from_phase(curve, ctx.verdict(key, p).b0)
        k_max = curve.k_max
        ratios.append(float(curve.phi_t[-1] * (-2.0 * k_max) / p.moment0))
        ratios.append(float(density.rho_smooth[-1] * 2.0 * k_max ** 2 / p.moment0))
    lo, hi = min(ratios), max(ratios)
    ok = lo >= 0.8 and hi <= 1.2
    return ok, (f"phase and density tail ratios in [{lo:.3f}, {hi:.3f}] "
                f"(required [0.8, 1.2], {len(ratios)} ratios)")


def _crit_oscillatory_tail(ctx) -> tuple:
    results = []
    delta = make_delta(-2.0)
    for L in (50.0, 100.0, 200.0):
        results.append((f"delta L={L:.0f}", reflection_tail_integral(delta, L, 10.0), -np.pi))
    sqw = make_square_well(-1.0, 1.0)
    b0, _ = classify_b0(sqw)
    results.append(("square-well L=200",
                    reflection_tail_integral(sqw, 200.0, 10.0), np.pi * b0))
    final = [(n, v, tgt) for n, v, tgt in results if "200" in n]
    worst = max(abs(v - tgt) / np.pi for _, v, tgt in final)
    ok = worst <= 0.05
    return ok, (f"worst relative error {worst:.3f} of pi*b(0) at L=200 "
                f"(tol 0.05); delta sequence "
                + " -> ".join(f"{v:.3f}" for _, v, _ in results[:3]))


def _crit_criticality_sweep(ctx) -> tuple:
    t0 = time.time()
    lams = np.array([i / 20.0 for i in range(10, 131)])
    criticals = []
    counts = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for lam in lams:
            p = make_sech_well(float(lam))
            b0, _ = classify_b0(p)
            if b0 == 0.0:
                criticals.append(float(lam))
            counts[float(lam)] = count_bound_states_oracle(p)
    flips_ok = criticals == [2.0, 6.0]
    inc_ok = (counts[2.05] == counts[1.95] + 1
              and counts[6.05] == counts[5.95] + 1)
    mono_ok = all(counts[a] <= counts[b]
                  for a, b in zip(lams[:-1], lams[1:]))
    ok = flips_ok and inc_ok and mono_ok
    return ok, (f"critical at {criticals} (expect [2.0, 6.0]); counts "
                f"{counts[1.95]}->{counts[2.05]} across 2, "
                f"{counts[5.95]}->{counts[6.05]} across 6; "
                f"monotone {mono_ok}; {time.time() - t0:.0f}s")


def _crit_threshold_wavefunction(ctx) -> tuple:
    sol = solve_direct(make_poschl_teller(1), 1e-4)
    sel = np.abs(sol.x) <= 5.0
    target = -np.tanh(sol.x[sel])
    phase = np.exp(1j * np.angle(np.vdot(sol.psi[sel], target)))
    err = float(np.max(np.abs(sol.psi[sel] * phase - target)))
    ok = err <= 1e-2
    return ok, f"max |psi - (-tanh x)| = {err:.2e} after phase alignment (tol 1e-2)"


#: (name, function, included in --fast)
CRITERIA = (
    ("reflectionless-density", _crit_reflectionless_density, True),
    ("reflectionless-sum-rule", _crit_reflectionless_sum_rule, True),
    ("contact-family", _crit_contact_family, True),
    ("counting-set-of-12", _crit_counting_set, False),
    ("unitarity-time-reversal", _crit_unitarity, True),
    ("determinant-winding", _crit_determinant_winding, True),
    ("finite-box-identity", _crit_finite_box_identity, False),
    ("weak-coupling-tail", _crit_weak_coupling_tail, True),
    ("oscillatory-tail-limit", _crit_oscillatory_tail, True),
    ("criticality-sweep", _crit_criticality_sweep, False),
    ("threshold-wavefunction", _crit_threshold_wavefunction, True),
)


def run_criterion(name: str, ctx=None) -> CriterionResult:
    fns = {n: f for n, f, _ in CRITERIA}
    if name not in fns:
        raise KeyError(f"unknown criterion {name!r}")
    if ctx is None:
        ctx = _Context()
    t0 = time.time()
    try:
        passed, detail = fns[name](ctx)
    except Exception as exc:  # a crashed criterion is a failed criterion
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CriterionResult(name=name, passed=passed, detail=detail,
                           elapsed=time.time() - t0)


def run_all(fast: bool = False):
    """Run the suite (or the fast subset); returns a list of results."""
    ctx = _Context()
    results = []
    for name, _, in_fast in CRITERIA:
        if fast and not in_fast:
            continue
        results.append(run_criterion(name, ctx))
    return results

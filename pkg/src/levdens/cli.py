"""Command-line front end.

Four subcommands: `scatter` writes the amplitude/phase table for a
potential, `density` the spectral-density table plus a JSON sidecar,
`levinson` the counting report as JSON, and `verify` runs the built-in
acceptance suite.  Outputs are deterministic: full-precision floats,
no timestamps, computation finished before any file is opened.

Exit codes: 0 on success (for `levinson`, a passing verdict; for
`verify`, all criteria green), 2 for a failed verdict/criterion, 1 for
errors (bad arguments, solver failures).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .acceptance import run_all
from .errors import LevdensError
from .levinson import ROUND_TOL, classify_b0, levinson_verdict
from .potentials import Potential, from_spec, load_spec_file
from .smatrix import PHASE_FLOOR, default_k_grid
from .solver import MATCH_TOL, UNITARITY_TOL
from .spectral import (box_density, density_from_phase,
                       finite_L_identity_residual)

_FIXTURES = {
    "free": {"kind": "free"},
    "poschl-teller": {"kind": "poschl-teller", "l": 1},
    "delta": {"kind": "delta", "g": -2.0},
    "square-well": {"kind": "square-well", "depth": -1.0, "half_width": 1.0},
    "gaussian": {"kind": "gaussian", "amplitude": -2.0, "center": 0.0, "width": 1.0},
    "asym-double-gaussian": {"kind": "composite", "terms": [
        {"kind": "gaussian", "amplitude": -2.5, "center": -1.5, "width": 0.8},
        {"kind": "gaussian", "amplitude": -1.0, "center": 2.0, "width": 1.3}]},
}


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters of one CLI run."""

    potential: Potential
    label: str
    k_min: float = 1e-3
    k_max: float = 50.0
    n_k: int = 400
    L_boxes: tuple = (30.0, 40.0)
    out_dir: Path = field(default_factory=lambda: Path("."))

    def __post_init__(self):
        if not (self.k_min > 0):
            raise LevdensError(f"k_min must be positive, got {self.k_min}")
        if not (self.k_min < self.k_max):
            raise LevdensError(
                f"k_min must be below k_max, got {self.k_min} >= {self.k_max}")
        if self.n_k < 16:
            raise LevdensError(f"n_k must be at least 16, got {self.n_k}")

    def k_grid(self):
        return default_k_grid(self.k_min, self.k_max, self.n_k)


def _add_common(sub):
    sub.add_argument("--potential", choices=sorted(_FIXTURES),
                     help="built-in fixture name")
    sub.add_argument("--spec", type=Path, help="JSON potential spec file")
    sub.add_argument("--l", type=int, help="well index for poschl-teller")
    sub.add_argument("--g", type=float, help="coupling for delta")
    sub.add_argument("--k-min", type=float, default=1e-3)
    sub.add_argument("--k-max", type=float, default=50.0)
    sub.add_argument("--n-k", type=int, default=400)
    sub.add_argument("--out", type=Path, default=Path("."),
                     help="output directory (created if missing)")


def _config(args, default_L=(30.0, 40.0)) -> RunConfig:
    if (args.potential is None) == (args.spec is None):
        raise LevdensError("choose exactly one of --potential or --spec")
    if args.spec is not None:
        p = load_spec_file(args.spec)
        label = args.spec.stem
    else:
        spec = dict(_FIXTURES[args.potential])
        if args.l is not None:
            if args.potential != "poschl-teller":
                raise LevdensError("--l only applies to poschl-teller")
            spec["l"] = args.l
        if args.g is not None:
            if args.potential != "delta":
                raise LevdensError("--g only applies to delta")
            spec["g"] = args.g
        p = from_spec(spec)
        label = args.potential
    Ls = tuple(getattr(args, "L", None) or default_L)
    return RunConfig(potential=p, label=label, k_min=args.k_min,
                     k_max=args.k_max, n_k=args.n_k, L_boxes=Ls,
                     out_dir=args.out)


def _fmt(x) -> str:
    if isinstance(x, float) and np.isnan(x):
        return "nan"
    return f"{x:.17g}"


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _provenance(cfg: RunConfig) -> dict:
    return {
        "version": __version__,
        "potential": cfg.potential.to_spec(),
        "k_min": cfg.k_min, "k_max": cfg.k_max, "n_k": cfg.n_k,
        "tolerances": {"unitarity": UNITARITY_TOL, "match": MATCH_TOL,
                       "phase_floor": PHASE_FLOOR, "round": ROUND_TOL},
    }


def cmd_scatter(cfg: RunConfig) -> int:
    from .smatrix import build_phase_curve
    curve = build_phase_curve(cfg.potential, cfg.k_grid())
    rows = zip(curve.k_grid, curve.t.real, curve.t.imag, curve.b.real,
               curve.b.imag, np.abs(curve.t) ** 2, np.abs(curve.b) ** 2,
               curve.phi_t, curve.phi_r, curve.phi_r_z, curve.det_residual)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out = cfg.out_dir / f"scatter_{cfg.label}.csv"
    _write_csv(out, ["k", "re_t", "im_t", "re_b", "im_b", "abs_t_sq",
                     "abs_b_sq", "phi_t", "phi_r", "phi_r_z", "det_residual"],
               rows)
    print(f"wrote {out}")
    print(f"max unitarity residual {np.max(curve.unitarity):.3e}, "
          f"max |t - t_z| {np.max(curve.time_reversal):.3e}, "
          f"degraded points {curve.degraded_count}")
    return 0


def cmd_density(cfg: RunConfig) -> int:
    from . import backend
    from .smatrix import build_phase_curve
    curve = build_phase_curve(cfg.potential, cfg.k_grid())
    b0, _ = classify_b0(cfg.potential)
    density = density_from_phase(curve, b0)
    L1, L2 = cfg.L_boxes[0], cfg.L_boxes[-1]

    def per_k(k):
        return (box_density(cfg.potential, k, L1),
                box_density(cfg.potential, k, L2),
                finite_L_identity_residual(cfg.potential, k, L1))

    per = backend.parallel_map(per_k, curve.k_grid)
    rows = [(k, rho, bx1, bx2, res)
            for k, rho, (bx1, bx2, res)
            in zip(curve.k_grid, density.rho_smooth, per)]
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out = cfg.out_dir / f"density_{cfg.label}.csv"
    _write_csv(out, ["k", "rho_smooth", f"rho_box_L{L1:g}",
                     f"rho_box_L{L2:g}", "identity_residual"], rows)
    sidecar = cfg.out_dir / f"density_{cfg.label}.json"
    payload = _provenance(cfg)
    payload.update({"delta_weight": density.delta_weight, "b0": density.b0,
                    "moment0": density.moment0,
                    "L_boxes": [L1, L2],
                    "max_identity_residual": max(r[-1] for r in per)})
    sidecar.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out} and {sidecar}")
    return 0


def cmd_levinson(cfg: RunConfig) -> int:
    report = levinson_verdict(cfg.potential, cfg.k_grid())
    payload = _provenance(cfg)
    payload.update({
        "delta_phi": report.delta_phi, "b0": report.b0,
        "n_levinson": report.n_levinson, "n_oracle": report.n_oracle,
        "resonance": report.resonance, "verdict": report.verdict,
        "deviation": report.deviation, "round_tol": report.round_tol,
        "winding": report.winding,
        "max_unitarity": report.max_unitarity,
        "max_det_residual": report.max_det_residual,
        "match_residual": report.match_residual,
    })
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out = cfg.out_dir / f"levinson_{cfg.label}.json"
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")
    print(f"n_levinson = {report.n_levinson:.4f}, n_oracle = "
          f"{report.n_oracle}, b0 = {report.b0:g}, verdict: {report.verdict}")
    return 0 if report.verdict == "pass" else 2


def cmd_verify(fast: bool) -> int:
    results = run_all(fast=fast)
    width = max(len(r.name) for r in results)
    all_ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        all_ok &= r.passed
        print(f"{r.name:<{width}}  {status}  [{r.elapsed:6.1f}s]  {r.detail}")
    total = sum(r.elapsed for r in results)
    print(f"{'overall':<{width}}  {'PASS' if all_ok else 'FAIL'}  "
          f"[{total:6.1f}s]  {sum(r.passed for r in results)}/{len(results)} criteria")
    return 0 if all_ok else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="levdens",
        description="1D scattering, spectral density, and bound-state counting")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("scatter", help="amplitude/phase table over a k-grid")
    _add_common(s)

    s = subs.add_parser("density", help="spectral density table + sidecar")
    _add_common(s)
    s.add_argument("--L", type=float, action="append",
                   help="box half-width for the spatial-density columns "
                        "(give twice; default 30 and 40)")

    s = subs.add_parser("levinson", help="bound-state counting report")
    _add_common(s)

    s = subs.add_parser("verify", help="run the built-in acceptance suite")
    s.add_argument("--fast", action="store_true", help="quick subset (< 30 s)")

    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.fast)
        cfg = _config(args)
        if args.command == "scatter":
            return cmd_scatter(cfg)
        if args.command == "density":
            return cmd_density(cfg)
        return cmd_levinson(cfg)
    except LevdensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

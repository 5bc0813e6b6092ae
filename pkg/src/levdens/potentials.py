"""Local 1D potentials and their admissibility data.

Units: hbar = 2m = 1, so the stationary scattering problem reads
psi''(x) + k^2 psi(x) = u(x) psi(x) with energy E = k^2 and u in units of
inverse length squared.  Every potential carries the data the solver and
the sum-rule machinery need:

* ``support_radius``: R with |u(x)| <= SUPPORT_EPS for |x| >= R,
* ``moment0``: integral of u (the Born-tail coefficient),
* ``moment2``: integral of (1+x^2)|u| (finite iff the potential is
  admissible for scattering theory),
* discontinuity ``breakpoints`` and an interior ``feature_scale`` so the
  integration grid can resolve the shape,
* optional closed-form amplitudes for the two exactly solvable fixtures.

The delta potential is symbolic: it has exact amplitudes and a
narrow-square-well surrogate, but no pointwise values.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .errors import AccuracyError, DomainError, InvalidParameterError

SUPPORT_EPS = 1e-10
DELTA_SURROGATE_WIDTH = 1e-3

_QUAD_TOL = 1e-11


def _sech2(x):
    # 4 e^{-2|x|} / (1 + e^{-2|x|})^2, overflow-free for any x
    e = np.exp(-2.0 * np.abs(x))
    return 4.0 * e / (1.0 + e) ** 2


class Potential:
    """Base class; concrete kinds are the frozen dataclasses below."""

    #: interior discontinuities the grid must snap to (positions)
    breakpoints: tuple = ()
    #: smallest interior length scale; inf when the shape is featureless
    feature_scale: float = math.inf

    def evaluate(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.evaluate(x)

    @property
    def kind(self) -> str:
        raise NotImplementedError

    @property
    def support_radius(self) -> float:
        raise NotImplementedError

    @property
    def moment0(self) -> float:
        raise NotImplementedError

    @property
    def moment2(self) -> float:
        raise NotImplementedError

    def closed_form_amplitudes(self, k):
        """Exact (t, b) at wavenumber k, or None when no closed form exists."""
        if k <= 0:
            raise DomainError("closed-form amplitudes require k > 0")
        return None

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class SechWell(Potential):
    """u(x) = -strength / cosh^2(x); reflectionless when strength = l(l+1)."""

    strength: float

    def __post_init__(self):
        if not (self.strength > 0 and math.isfinite(self.strength)):
            raise InvalidParameterError("sech-well strength must be positive and finite")

    @property
    def kind(self):
        return "sech-well"

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        return -self.strength * _sech2(x)

    @cached_property
    def support_radius(self):
        return math.acosh(math.sqrt(self.strength / SUPPORT_EPS))

    @property
    def moment0(self):
        return -2.0 * self.strength

    @property
    def moment2(self):
        return self.strength * (2.0 + math.pi**2 / 6.0)

    feature_scale = 1.0

    def to_spec(self):
        return {"kind": "sech-well", "strength": self.strength}


@dataclass(frozen=True)
class PoschlTeller(SechWell):
    """The reflectionless family u(x) = -l(l+1)/cosh^2(x)."""

    ell: int = 0

    def __init__(self, ell):
        if not (isinstance(ell, (int, np.integer)) and ell >= 1):
            raise InvalidParameterError("Poschl-Teller level must be an integer >= 1")
        object.__setattr__(self, "ell", int(ell))
        object.__setattr__(self, "strength", float(ell * (ell + 1)))

    @property
    def kind(self):
        return "poschl-teller"

    def closed_form_amplitudes(self, k):
        super().closed_form_amplitudes(k)
        if self.ell != 1:
            return None
        # t(k) = (ik - 1)/(ik + 1); no reflected wave at any k
        ik = 1j * k
        return (ik - 1.0) / (ik + 1.0), 0.0 + 0.0j

    def to_spec(self):
        return {"kind": "poschl-teller", "l": self.ell}


@dataclass(frozen=True)
class Delta(Potential):
    """u(x) = g delta(x), handled symbolically (no pointwise values)."""

    g: float

    def __post_init__(self):
        if self.g == 0 or not math.isfinite(self.g):
            raise InvalidParameterError(
                "delta coupling must be nonzero; build the free potential as make_free()"
            )

    @property
    def kind(self):
        return "delta"

    def evaluate(self, x):
        raise DomainError(
            "delta potential is symbolic; use surrogate() for a sampled stand-in"
        )

    @property
    def support_radius(self):
        return 0.5 * DELTA_SURROGATE_WIDTH

    @property
    def moment0(self):
        return self.g

    @property
    def moment2(self):
        return abs(self.g)

    def closed_form_amplitudes(self, k):
        super().closed_form_amplitudes(k)
        b = self.g / (2j * k - self.g)
        return 1.0 + b, b

    def surrogate(self, width: float = DELTA_SURROGATE_WIDTH) -> "SquareWell":
        """Square well of the same integral: depth g/width over [-w/2, w/2]."""
        if width <= 0:
            raise InvalidParameterError("surrogate width must be positive")
        return SquareWell(depth=self.g / width, half_width=0.5 * width)

    def to_spec(self):
        return {"kind": "delta", "g": self.g}


@dataclass(frozen=True)
class SquareWell(Potential):
    """u(x) = depth for |x| < half_width, 0 outside (edges belong outside)."""

    depth: float
    half_width: float

    def __post_init__(self):
        if self.half_width <= 0 or not math.isfinite(self.half_width):
            raise InvalidParameterError("square-well half_width must be positive")
        if self.depth == 0 or not math.isfinite(self.depth):
            raise InvalidParameterError("square-well depth must be nonzero and finite")

    @property
    def kind(self):
        return "square-well"

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) < self.half_width, self.depth, 0.0)

    @property
    def support_radius(self):
        return self.half_width

    @property
    def moment0(self):
        return 2.0 * self.half_width * self.depth

    @property
    def moment2(self):
        a = self.half_width
        return abs(self.depth) * (2.0 * a + (2.0 / 3.0) * a**3)

    @property
    def breakpoints(self):
        return (-self.half_width, self.half_width)

    def to_spec(self):
        return {"kind": "square-well", "depth": self.depth, "half_width": self.half_width}


@dataclass(frozen=True)
class Gaussian(Potential):
    """u(x) = amplitude * exp(-(x-center)^2 / (2 width^2))."""

    amplitude: float
    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.width <= 0 or not math.isfinite(self.width):
            raise InvalidParameterError("gaussian width must be positive")
        if self.amplitude == 0 or not math.isfinite(self.amplitude):
            raise InvalidParameterError("gaussian amplitude must be nonzero and finite")
        if not math.isfinite(self.center):
            raise InvalidParameterError("gaussian center must be finite")

    @property
    def kind(self):
        return "gaussian"

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.center) / self.width
        return self.amplitude * np.exp(-0.5 * z**2)

    @cached_property
    def support_radius(self):
        if abs(self.amplitude) <= SUPPORT_EPS:
            return 0.0
        reach = self.width * math.sqrt(2.0 * math.log(abs(self.amplitude) / SUPPORT_EPS))
        return abs(self.center) + reach

    @property
    def moment0(self):
        return self.amplitude * self.width * math.sqrt(2.0 * math.pi)

    @property
    def moment2(self):
        scale = abs(self.amplitude) * self.width * math.sqrt(2.0 * math.pi)
        return scale * (1.0 + self.center**2 + self.width**2)

    @property
    def feature_scale(self):
        return self.width

    def to_spec(self):
        return {
            "kind": "gaussian",
            "amplitude": self.amplitude,
            "center": self.center,
            "width": self.width,
        }


@dataclass(frozen=True)
class Composite(Potential):
    """Sum of analytic terms; the empty composite is the free potential.

    Terms need not share any symmetry: asymmetric multi-Gaussian wells are
    the canonical stress test for the two-channel machinery.
    """

    terms: tuple

    def __init__(self, terms=()):
        terms = tuple(terms)
        for t in terms:
            if isinstance(t, (Delta, Sampled, Composite)):
                raise InvalidParameterError(
                    "composite terms must be analytic potentials (no delta/sampled/nested)"
                )
            if not isinstance(t, Potential):
                raise InvalidParameterError(f"not a potential term: {t!r}")
        object.__setattr__(self, "terms", terms)

    @property
    def kind(self):
        return "free" if not self.terms else "composite"

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for t in self.terms:
            out = out + t.evaluate(x)
        return out

    @property
    def support_radius(self):
        return max((t.support_radius for t in self.terms), default=0.0)

    @property
    def moment0(self):
        return sum(t.moment0 for t in self.terms)

    @cached_property
    def moment2(self):
        # |sum of terms| has no closed form; integrate numerically
        if not self.terms:
            return 0.0
        return moment_integrals(self)[1]

    @property
    def breakpoints(self):
        pts = [b for t in self.terms for b in t.breakpoints]
        return tuple(sorted(set(pts)))

    @property
    def feature_scale(self):
        return min((t.feature_scale for t in self.terms), default=math.inf)

    def to_spec(self):
        if not self.terms:
            return {"kind": "free"}
        return {"kind": "composite", "terms": [t.to_spec() for t in self.terms]}


@dataclass(frozen=True)
class Sampled(Potential):
    """Potential given by samples, cubic-interpolated; zero outside the range."""

    xs: np.ndarray
    us: np.ndarray

    def __init__(self, xs, us):
        xs = np.asarray(xs, dtype=float)
        us = np.asarray(us, dtype=float)
        if xs.ndim != 1 or xs.shape != us.shape or xs.size < 4:
            raise InvalidParameterError("need >= 4 sample pairs of equal length")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(us))):
            raise InvalidParameterError("samples must be finite")
        if np.any(np.diff(xs) <= 0):
            raise InvalidParameterError("sample positions must be strictly increasing")
        xs = xs.copy()
        us = us.copy()
        xs.setflags(write=False)
        us.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "us", us)

    @property
    def kind(self):
        return "sampled"

    @cached_property
    def _spline(self):
        return CubicSpline(self.xs, self.us)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.xs[0]) & (x <= self.xs[-1])
        out = np.zeros_like(x)
        if np.any(inside):
            out[inside] = self._spline(x[inside])
        return out

    @property
    def support_radius(self):
        return max(abs(self.xs[0]), abs(self.xs[-1]))

    @cached_property
    def _moments(self):
        return moment_integrals(self)

    @property
    def moment0(self):
        return self._moments[0]

    @property
    def moment2(self):
        return self._moments[1]

    @property
    def breakpoints(self):
        # interpolation ends where the potential drops to zero
        return (float(self.xs[0]), float(self.xs[-1]))

    @property
    def feature_scale(self):
        return float(np.min(np.diff(self.xs)))

    def to_spec(self):
        return {"kind": "sampled", "samples": [[float(x), float(u)] for x, u in zip(self.xs, self.us)]}

    def __eq__(self, other):
        if not isinstance(other, Sampled):
            return NotImplemented
        return np.array_equal(self.xs, other.xs) and np.array_equal(self.us, other.us)

    def __hash__(self):
        return hash((self.xs.tobytes(), self.us.tobytes()))


# ---------------------------------------------------------------------------
# constructors

def make_poschl_teller(ell: int) -> PoschlTeller:
    return PoschlTeller(ell)


def make_sech_well(strength: float) -> SechWell:
    return SechWell(float(strength))


def make_delta(g: float) -> Delta:
    return Delta(float(g))


def make_square_well(depth: float, half_width: float) -> SquareWell:
    return SquareWell(float(depth), float(half_width))


def make_gaussian(amplitude: float, center: float = 0.0, width: float = 1.0) -> Gaussian:
    return Gaussian(float(amplitude), float(center), float(width))


def make_composite(terms) -> Composite:
    return Composite(tuple(terms))


def make_free() -> Composite:
    return Composite(())


def make_sampled(samples) -> Sampled:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidParameterError("samples must be [[x, u], ...] pairs")
    return Sampled(arr[:, 0], arr[:, 1])


# ---------------------------------------------------------------------------
# operations

def moment_integrals(p: Potential) -> tuple:
    """(integral of u, integral of (1+x^2)|u|) by adaptive quadrature.

    The second integral is the admissibility check: scattering theory for
    u needs it finite.  Raises AccuracyError when the quadrature cannot
    reach tolerance; the Delta kind is excluded (its moments are (g, |g|)
    by definition).
    """
    if isinstance(p, Delta):
        raise DomainError("delta moments are definitional: (g, |g|)")
    radius = p.support_radius
    if radius == 0.0:
        return 0.0, 0.0
    interior = [b for b in p.breakpoints if -radius < b < radius]

    def run(f):
        # the returned error estimate is checked below, so the roundoff
        # warning at this tight tolerance carries no extra information
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(
                f, -radius, radius, points=interior or None,
                epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200,
            )
        return val, err

    m0, e0 = run(lambda x: float(p.evaluate(x)))
    m2, e2 = run(lambda x: (1.0 + x * x) * abs(float(p.evaluate(x))))
    scale = max(1.0, abs(m0), abs(m2))
    if max(e0, e2) > 1e-8 * scale:
        raise AccuracyError(
            "moment quadrature did not converge", residual=max(e0, e2)
        )
    return m0, m2


def closed_form_amplitudes(p: Potential, k: float):
    """Exact (t, b) for the solvable fixtures; None when unavailable."""
    return p.closed_form_amplitudes(k)


# ---------------------------------------------------------------------------
# spec files

_BUILTIN_DEFAULTS = {
    "free": {},
    "poschl-teller": {"l": 1},
    "delta": {"g": -2.0},
    "square-well": {"depth": -1.0, "half_width": 1.0},
    "gaussian": {"amplitude": -1.0, "center": 0.0, "width": 1.0},
    "asym-double-gaussian": {},
}


def from_spec(spec: dict) -> Potential:
    """Build a potential from its spec mapping ({"kind": ..., params...})."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidParameterError("potential spec must be a mapping with a 'kind' key")
    kind = spec["kind"]
    params = {k: v for k, v in spec.items() if k != "kind"}
    try:
        if kind == "free":
            _expect_keys(params, set())
            return make_free()
        if kind == "poschl-teller":
            _expect_keys(params, {"l"})
            return make_poschl_teller(params.get("l", 1))
        if kind == "sech-well":
            _expect_keys(params, {"strength"})
            return make_sech_well(params["strength"])
        if kind == "delta":
            _expect_keys(params, {"g"})
            return make_delta(params["g"])
        if kind == "square-well":
            _expect_keys(params, {"depth", "half_width"})
            return make_square_well(params.get("depth", -1.0), params.get("half_width", 1.0))
        if kind == "gaussian":
            _expect_keys(params, {"amplitude", "center", "width"})
            return make_gaussian(
                params.get("amplitude", -1.0),
                params.get("center", 0.0),
                params.get("width", 1.0),
            )
        if kind == "composite":
            _expect_keys(params, {"terms"})
            return make_composite(from_spec(t) for t in params.get("terms", []))
        if kind == "sampled":
            _expect_keys(params, {"samples"})
            return make_sampled(params["samples"])
        if kind == "asym-double-gaussian":
            # built-in asymmetric fixture: two offset Gaussian wells
            _expect_keys(params, set())
            return make_composite(
                [make_gaussian(-2.5, -1.5, 0.8), make_gaussian(-1.0, 2.0, 1.3)]
            )
    except KeyError as exc:
        raise InvalidParameterError(f"spec for kind {kind!r} missing {exc}") from exc
    raise InvalidParameterError(f"unknown potential kind {kind!r}")


def _expect_keys(params, allowed):
    extra = set(params) - allowed
    if extra:
        raise InvalidParameterError(f"unexpected spec keys: {sorted(extra)}")


def load_spec_file(path) -> Potential:
    with open(path, "r", encoding="utf-8") as fh:
        return from_spec(json.load(fh))

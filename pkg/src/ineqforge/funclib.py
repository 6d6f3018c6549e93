"""Parametric families of positive test functions ``f`` and weights ``h``.

Every object here is immutable and evaluates vectorised over numpy arrays.
Positivity and monotonicity are verified on grids rather than proven; the
class predicates and theorem oracles re-check whatever they rely on.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParams, NonPositive, OutOfDomain

FUNCTION_FAMILIES = ("exponential", "power", "exp_log_square", "constant", "affine_exp", "tabulated")
WEIGHT_FAMILIES = ("identity", "power", "reciprocal", "constant", "convex_mix")

DOMAIN_TOL = 1e-12
POSITIVITY_GRID = 256
MONOTONE_GRID = 1025
DEFAULT_CLIP_EPSILON = 1e-3

_N_PARAMS = {
    "exponential": 2,
    "power": 1,
    "exp_log_square": 0,
    "constant": 1,
    "affine_exp": 2,
    "identity": 0,
    "reciprocal": 0,
    "convex_mix": 2,
}


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with ``lo < hi``."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InvalidParams(f"interval endpoints must be finite, got [{lo}, {hi}]")
        if not lo < hi:
            raise InvalidParams(f"interval needs lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def positive(self) -> bool:
        return self.lo > 0.0

    def contains(self, other: "Interval", tol: float = DOMAIN_TOL) -> bool:
        return other.lo >= self.lo - tol and other.hi <= self.hi + tol

    def grid(self, n: int) -> np.ndarray:
        return np.linspace(self.lo, self.hi, n)

    def as_list(self) -> list[float]:
        return [self.lo, self.hi]


def _check_count(family: str, params: tuple) -> None:
    expected = _N_PARAMS.get(family)
    if expected is not None and len(params) != expected:
        raise InvalidParams(f"{family} expects {expected} parameter(s), got {len(params)}")
    if not all(math.isfinite(p) for p in params):
        raise InvalidParams(f"{family} parameters must be finite, got {params}")


def _clip_to(x: np.ndarray, lo: float, hi: float, what: str) -> np.ndarray:
    if np.any(x < lo - DOMAIN_TOL) or np.any(x > hi + DOMAIN_TOL):
        bad = x[(x < lo - DOMAIN_TOL) | (x > hi + DOMAIN_TOL)]
        raise OutOfDomain(f"{what}: point {bad.flat[0]!r} outside [{lo}, {hi}]")
    return np.clip(x, lo, hi)


@dataclass(frozen=True)
class FunctionSpec:
    """A positive function from one of :data:`FUNCTION_FAMILIES` on a compact domain.

    Build instances with :func:`make_function`, which validates parameters
    and positivity. Calling it evaluates element-wise.
    """

    family: str
    params: tuple[float, ...]
    domain: Interval
    knots: tuple[float, ...] | None = None

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        xs = _clip_to(np.asarray(x, dtype=float), self.domain.lo, self.domain.hi, self.family)
        out = self._raw(xs)
        return float(out) if scalar else out

    def _raw(self, x: np.ndarray) -> np.ndarray:
        p = self.params
        fam = self.family
        if fam == "exponential":
            return p[0] * np.exp(p[1] * x)
        if fam == "power":
            return np.power(x, p[0])
        if fam == "exp_log_square":
            return np.exp(np.log(x) ** 2)
        if fam == "constant":
            return np.full_like(x, p[0], dtype=float)
        if fam == "affine_exp":
            return np.exp(p[0] * x + p[1])
        if fam == "tabulated":
            return np.interp(x, self.knots, p)
        raise InvalidParams(f"unknown function family {fam!r}")

    def to_dict(self) -> dict:
        d = {"family": self.family, "params": list(self.params), "domain": self.domain.as_list()}
        if self.knots is not None:
            d["knots"] = list(self.knots)
        return d

    def label(self) -> str:
        args = ",".join(f"{v:g}" for v in self.params) if self.family != "tabulated" else f"n={len(self.params)}"
        return f"{self.family}({args})@[{self.domain.lo:g},{self.domain.hi:g}]"


@dataclass(frozen=True)
class DerivedFunction:
    """Pointwise transform of another function, exempt from positivity.

    Used for ``log f``, which the class predicates accept anywhere a
    :class:`FunctionSpec` is accepted.
    """

    base: FunctionSpec
    name: str = "log"

    @property
    def domain(self) -> Interval:
        return self.base.domain

    def __call__(self, x):
        return np.log(self.base(x))


def log_of(f: FunctionSpec) -> DerivedFunction:
    return DerivedFunction(f, "log")


def make_function(
    family: str,
    params: Sequence[float] = (),
    domain: Interval | Sequence[float] = (0.0, 1.0),
    knots: Sequence[float] | None = None,
) -> FunctionSpec:
    """Validate and build a :class:`FunctionSpec`.

    For ``tabulated`` the params are sample values, placed at ``knots`` or
    at equally spaced knots spanning the domain, and interpolated linearly.

    Raises:
        InvalidParams: unknown family or parameters outside the family's range.
        NonPositive: a sample on the 256-point positivity grid is not > 0. The
            only exemption is the exact zero of ``x**p`` at ``x = 0``.
    """
    if family not in FUNCTION_FAMILIES:
        raise InvalidParams(f"unknown function family {family!r}")
    if not isinstance(domain, Interval):
        domain = Interval(*domain)
    params = tuple(float(v) for v in params)
    _check_count(family, params)
    knot_tuple = None

    if family == "exponential" and params[0] <= 0:
        raise InvalidParams("exponential family needs c > 0")
    elif family == "constant" and params[0] <= 0:
        raise InvalidParams("constant family needs c > 0")
    elif family == "power":
        p = params[0]
        if domain.lo < 0 and not float(p).is_integer():
            raise InvalidParams("power family with non-integer exponent needs a nonnegative domain")
        if p < 0 and domain.lo <= 0 <= domain.hi:
            raise InvalidParams("negative exponent is singular at 0")
    elif family == "exp_log_square" and domain.lo <= 0:
        raise InvalidParams("exp_log_square family needs a positive domain")
    elif family == "tabulated":
        if len(params) < 2:
            raise InvalidParams("tabulated family needs at least two samples")
        if knots is None:
            knot_tuple = tuple(np.linspace(domain.lo, domain.hi, len(params)).tolist())
        else:
            knot_tuple = tuple(float(k) for k in knots)
            if len(knot_tuple) != len(params):
                raise InvalidParams("knots and samples differ in length")
            if np.any(np.diff(knot_tuple) <= 0):
                raise InvalidParams("knots must be strictly increasing")
            if knot_tuple[0] > domain.lo + DOMAIN_TOL or knot_tuple[-1] < domain.hi - DOMAIN_TOL:
                raise InvalidParams("knots must span the domain")

    spec = FunctionSpec(family, params, domain, knot_tuple)
    xs = domain.grid(POSITIVITY_GRID)
    with np.errstate(all="ignore"):
        ys = spec._raw(xs)
    if not np.all(np.isfinite(ys)):
        raise NonPositive(f"{spec.label()} is not finite on its domain")
    bad = ys <= 0
    if family == "power":
        bad &= xs != 0.0
    if np.any(bad):
        raise NonPositive(f"{spec.label()} takes value {float(ys[bad][0])!r} at x={float(xs[bad][0])!r}")
    return spec


def eval_function(spec: FunctionSpec, x: float) -> float:
    """Scalar evaluation; raises :class:`OutOfDomain` beyond a 1e-12 margin."""
    return spec(float(x))


@dataclass(frozen=True)
class WeightSpec:
    """A nonnegative weight ``h`` evaluated on ``[t_min, 1]``.

    ``t_min`` is ``clip_epsilon`` for the singular reciprocal family and 0
    otherwise.
    """

    family: str
    params: tuple[float, ...] = ()
    clip_epsilon: float = DEFAULT_CLIP_EPSILON
    domain_j: Interval = Interval(0.0, 1.0)

    @property
    def singular(self) -> bool:
        return self.family == "reciprocal"

    @property
    def t_min(self) -> float:
        return self.clip_epsilon if self.singular else 0.0

    @property
    def t_interval(self) -> Interval:
        """Interval for the mixing parameter ``t`` in grids and ``dt`` integrals."""
        if self.singular:
            return Interval(self.clip_epsilon, 1.0 - self.clip_epsilon)
        return Interval(0.0, 1.0)

    def __call__(self, t):
        scalar = np.ndim(t) == 0
        ts = _clip_to(np.asarray(t, dtype=float), self.t_min, self.domain_j.hi, f"weight {self.family}")
        out = self._raw(ts)
        return float(out) if scalar else out

    def _raw(self, t: np.ndarray) -> np.ndarray:
        p = self.params
        fam = self.family
        if fam == "identity":
            return t.copy()
        if fam == "power":
            return np.power(t, p[0])
        if fam == "reciprocal":
            return 1.0 / t
        if fam == "constant":
            return np.full_like(t, p[0], dtype=float)
        if fam == "convex_mix":
            return p[0] * t + (1.0 - p[0]) * np.power(t, p[1])
        raise InvalidParams(f"unknown weight family {fam!r}")

    def to_dict(self) -> dict:
        return {"family": self.family, "params": list(self.params), "clipEpsilon": self.clip_epsilon}

    def label(self) -> str:
        return f"{self.family}({','.join(f'{v:g}' for v in self.params)})"


def make_weight(
    family: str,
    params: Sequence[float] = (),
    clip_epsilon: float = DEFAULT_CLIP_EPSILON,
    domain_j: Interval | Sequence[float] | None = None,
) -> WeightSpec:
    """Validate and build a :class:`WeightSpec`.

    Families: ``identity`` t, ``power`` t**s, ``reciprocal`` 1/t,
    ``constant`` kappa, ``convex_mix`` lam*t + (1-lam)*t**s with params
    ``(lam, s)``.
    """
    if family not in WEIGHT_FAMILIES:
        raise InvalidParams(f"unknown weight family {family!r}")
    params = tuple(float(v) for v in params)
    _check_count(family, params)
    clip_epsilon = float(clip_epsilon)
    if not 0.0 < clip_epsilon < 0.5:
        raise InvalidParams("clip_epsilon must lie in (0, 0.5)")
    if domain_j is None:
        domain_j = Interval(0.0, 1.0)
    elif not isinstance(domain_j, Interval):
        domain_j = Interval(*domain_j)
    if domain_j.lo > 0.0 or domain_j.hi < 1.0:
        raise InvalidParams("weight domain J must contain [0, 1]")

    if family == "power" and params[0] <= 0:
        raise InvalidParams("power weight needs s > 0")
    elif family == "constant" and params[0] <= 0:
        raise InvalidParams("constant weight needs kappa > 0")
    elif family == "convex_mix" and (not 0.0 <= params[0] <= 1.0 or params[1] <= 0):
        raise InvalidParams("convex_mix weight needs lam in [0, 1] and s > 0")

    w = WeightSpec(family, params, clip_epsilon, domain_j)
    vals = w(np.linspace(w.t_min, 1.0, POSITIVITY_GRID))
    if np.any(vals < 0) or not np.any(vals > 0):
        raise InvalidParams(f"weight {w.label()} must be nonnegative and not identically zero")
    return w


class Monotonicity(str, enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    NON_MONOTONE = "nonMonotone"


def check_monotone(spec, grid_n: int = MONOTONE_GRID) -> Monotonicity:
    """Classify monotonicity from consecutive differences on a uniform grid.

    Differences within 1e-12 count as ties and are compatible with both
    directions, so constants report ``INCREASING``.
    """
    if grid_n < 3:
        raise InvalidParams("grid_n must be at least 3")
    d = np.diff(spec(spec.domain.grid(grid_n)))
    if np.all(d >= -1e-12):
        return Monotonicity.INCREASING
    if np.all(d <= 1e-12):
        return Monotonicity.DECREASING
    return Monotonicity.NON_MONOTONE

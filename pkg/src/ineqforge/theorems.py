"""Inequality oracles: hypothesis checks plus quadrature of both sides.

Every oracle returns an :class:`InequalityReport` with ``margin = rhs - lhs``.
Both sides are computed even when a hypothesis fails, so near-miss regions
stay measurable. Integrals over the mixing parameter ``t`` use the weight's
clipped interval (``[eps, 1-eps]`` for the reciprocal weight), normalised by
its length so that a constant integrand integrates to itself.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .classes import (
    DEFAULT_GRID,
    ClassVerdict,
    GridSpec,
    check_h_convex,
    check_h_geom_convex,
    check_h_log_convex,
    check_h_multi_convex,
    check_monotone_verdict,
    check_superadditive,
    check_symmetric_half,
)
from .errors import DomainError, InvalidParams
from .funclib import DEFAULT_CLIP_EPSILON, MONOTONE_GRID, FunctionSpec, Interval, WeightSpec, make_weight
from .quadrature import DEFAULT_TOL, QuadResult, integrate, integrate_log

MARGIN_SLACK = 1e-6


class TheoremId(str, enum.Enum):
    HH101 = "HH101"
    SUPERADD_PRODUCT_A = "superaddProductA"
    SUPERADD_SQUARE_B = "superaddSquareB"
    COROLLARY_RECIPROCAL = "corollaryReciprocal"
    PRODUCT_SYMMETRIC_C = "productSymmetricC"
    YOUNG_SPLIT_D = "youngSplitD"
    YOUNG_POINTWISE_E = "youngPointwiseE"
    MIDPOINT = "midpoint"
    GEOM_PRODUCT = "geomProduct"
    GEOM_HOLDER = "geomHolder"
    MULTI_MEAN = "multiMean"


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    HYPOTHESIS_FAILED = "hypothesisFailed"


@dataclass(frozen=True)
class YoungParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and abs(self.alpha + self.beta - 1.0) <= 1e-12):
            raise InvalidParams(f"need alpha, beta > 0 with alpha + beta = 1, got {self.alpha}, {self.beta}")

    @classmethod
    def from_alpha(cls, alpha: float) -> "YoungParams":
        return cls(alpha, 1.0 - alpha)


@dataclass(frozen=True)
class HolderParams:
    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 1 and abs(1.0 / self.p + 1.0 / self.q - 1.0) <= 1e-12):
            raise InvalidParams(f"need p > 1 with 1/p + 1/q = 1, got {self.p}, {self.q}")

    @classmethod
    def from_p(cls, p: float) -> "HolderParams":
        return cls(p, p / (p - 1.0))


@dataclass(frozen=True)
class InequalityReport:
    theorem_id: TheoremId
    hypotheses: dict[str, ClassVerdict]
    lhs: float
    rhs: float
    margin: float
    quad_error: float
    verdict: Verdict
    extras: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        part = self.extras.get("part")
        return f"{self.theorem_id.value}({part})" if part else self.theorem_id.value

    def hypothesis_summary(self) -> str:
        return ";".join(f"{k}={v.status.value}" for k, v in self.hypotheses.items())

    def to_dict(self) -> dict:
        return {
            "theoremId": self.theorem_id.value,
            "verdict": self.verdict.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "quadError": self.quad_error,
            "hypotheses": {k: v.to_dict() for k, v in self.hypotheses.items()},
            "extras": self.extras,
        }


def _report(theorem_id, hypotheses, lhs, rhs, quad_error, extras=None) -> InequalityReport:
    margin = rhs - lhs
    if any(not v.holds for v in hypotheses.values()):
        verdict = Verdict.HYPOTHESIS_FAILED
    elif margin >= -(MARGIN_SLACK + 10.0 * quad_error):
        verdict = Verdict.HOLDS
    else:
        verdict = Verdict.VIOLATED
    return InequalityReport(TheoremId(theorem_id), hypotheses, float(lhs), float(rhs), float(margin),
                            float(quad_error), verdict, extras or {})


def _interval(iv, *funcs) -> Interval:
    if iv is None:
        iv = funcs[0].domain
    elif not isinstance(iv, Interval):
        iv = Interval(*iv)
    for f in funcs:
        if not f.domain.contains(iv):
            raise DomainError(f"interval [{iv.lo}, {iv.hi}] is not inside the domain of {f.label()}")
    return iv


def _positive(iv: Interval) -> None:
    if iv.lo <= 0:
        raise DomainError("geometric oracles need 0 < x < y")


def _t_integral(g: Callable, h: WeightSpec, tol: float) -> QuadResult:
    # mean over the clipped t-interval, so the unit measure survives clipping
    ti = h.t_interval
    r = integrate(g, ti, tol)
    return QuadResult(r.value / ti.width, r.error_estimate / ti.width, r.evaluations)


def check_hh(f: FunctionSpec, iv=None, tol: float = DEFAULT_TOL, grid: GridSpec = DEFAULT_GRID) -> InequalityReport:
    """Hermite-Hadamard chain ``f(mid) <= mean <= (f(a) + f(b)) / 2``.

    The reported sides belong to whichever half of the chain is tighter.
    """
    iv = _interval(iv, f)
    hyps = {"convex": check_h_convex(f, make_weight("identity"), grid)}
    q = integrate(f, iv, tol)
    mean, err = q.value / iv.width, q.error_estimate / iv.width
    mid = f(iv.midpoint)
    avg = 0.5 * (f(iv.lo) + f(iv.hi))
    lower, upper = mean - mid, avg - mean
    lhs, rhs = (mid, mean) if lower <= upper else (mean, avg)
    extras = {"midpoint": mid, "mean": mean, "endpointAverage": avg, "lowerMargin": lower, "upperMargin": upper}
    return _report(TheoremId.HH101, hyps, lhs, rhs, err, extras)


def _superadd_hyps(f, h, grid, monotone_grid):
    return {
        "hLogConvex": check_h_log_convex(f, h, grid),
        "monotone": check_monotone_verdict(f, monotone_grid),
        "superadditive": check_superadditive(h, grid),
    }


def _endpoint_power(f, h, iv) -> tuple[float, dict]:
    base = f(iv.lo) * f(iv.hi)
    return base ** h(1.0), {"productAtLeastOne": bool(base >= 1.0)}


def check_superadd_product(f, h, iv=None, tol=DEFAULT_TOL, grid=DEFAULT_GRID, monotone_grid=MONOTONE_GRID):
    """Mean of ``f(x) f(a+b-x)`` against ``(f(a) f(b))**h(1)``."""
    iv = _interval(iv, f)
    hyps = _superadd_hyps(f, h, grid, monotone_grid)
    s = iv.lo + iv.hi
    q = integrate(lambda x: f(x) * f(np.clip(s - x, iv.lo, iv.hi)), iv, tol)
    rhs, extras = _endpoint_power(f, h, iv)
    return _report(TheoremId.SUPERADD_PRODUCT_A, hyps, q.value / iv.width, rhs, q.error_estimate / iv.width, extras)


def check_superadd_square(f, h, iv=None, tol=DEFAULT_TOL, grid=DEFAULT_GRID, monotone_grid=MONOTONE_GRID):
    """Squared mean of ``f`` against ``(f(a) f(b))**h(1)``."""
    iv = _interval(iv, f)
    hyps = _superadd_hyps(f, h, grid, monotone_grid)
    q = integrate(f, iv, tol)
    mean, err = q.value / iv.width, q.error_estimate / iv.width
    rhs, extras = _endpoint_power(f, h, iv)
    return _report(TheoremId.SUPERADD_SQUARE_B, hyps, mean * mean, rhs, 2.0 * abs(mean) * err + err * err, extras)


def check_corollary_reciprocal(
    f, iv=None, tol=DEFAULT_TOL, grid=DEFAULT_GRID, monotone_grid=MONOTONE_GRID,
    clip_epsilon: float = DEFAULT_CLIP_EPSILON,
) -> tuple[InequalityReport, InequalityReport]:
    """Product and squared-mean bounds with ``h(t) = 1/t``, where ``h(1) = 1``.

    The reciprocal weight fails the superadditivity predicate, and that
    failure is carried in both reports along with a note.
    """
    h = make_weight("reciprocal", (), clip_epsilon)
    out = []
    for part, oracle in (("a", check_superadd_product), ("b", check_superadd_square)):
        r = oracle(f, h, iv, tol, grid, monotone_grid)
        extras = dict(r.extras, part=part)
        if not r.hypotheses["superadditive"].holds:
            extras["note"] = "reciprocal weight is not superadditive on the checked grid"
        out.append(_report(TheoremId.COROLLARY_RECIPROCAL, r.hypotheses, r.lhs, r.rhs, r.quad_error, extras))
    return out[0], out[1]


def check_product_symmetric(f, g, h, iv=None, tol=DEFAULT_TOL, grid=DEFAULT_GRID):
    """Mean of ``fg`` against the t-integral of ``[(fg)(a) (fg)(b)]**h(t)``."""
    iv = _interval(iv, f, g)
    hyps = {
        "hLogConvexF": check_h_log_convex(f, h, grid),
        "hLogConvexG": check_h_log_convex(g, h, grid),
        "symmetricHalf": check_symmetric_half(h, grid),
    }
    ql = integrate(lambda x: f(x) * g(x), iv, tol)
    c = f(iv.lo) * g(iv.lo) * f(iv.hi) * g(iv.hi)
    qr = _t_integral(lambda t: np.power(c, h(t)), h, tol)
    return _report(TheoremId.PRODUCT_SYMMETRIC_C, hyps, ql.value / iv.width, qr.value,
                   ql.error_estimate / iv.width + qr.error_estimate)


def _young_hyps(f, g, h, grid):
    return {"hLogConvexF": check_h_log_convex(f, h, grid), "hLogConvexG": check_h_log_convex(g, h, grid)}


def check_young_split(f, g, h, iv, yp: YoungParams, tol=DEFAULT_TOL, grid=DEFAULT_GRID):
    """Mean of ``fg`` against the Young split of the two weighted endpoint products."""
    iv = _interval(iv, f, g)
    hyps = _young_hyps(f, g, h, grid)
    fa, fb, ga, gb = f(iv.lo), f(iv.hi), g(iv.lo), g(iv.hi)
    a, b = yp.alpha, yp.beta

    def rhs(t):
        ht, hs = h(t), h(1.0 - t)
        return a * (fa**ht * fb**hs) ** (1.0 / a) + b * (ga**ht * gb**hs) ** (1.0 / b)

    ql = integrate(lambda x: f(x) * g(x), iv, tol)
    qr = _t_integral(rhs, h, tol)
    return _report(TheoremId.YOUNG_SPLIT_D, hyps, ql.value / iv.width, qr.value,
                   ql.error_estimate / iv.width + qr.error_estimate, {"alpha": a, "beta": b})


def check_young_pointwise(f, g, h, iv, yp: YoungParams, tol=DEFAULT_TOL, grid=DEFAULT_GRID):
    """Mean of ``fg`` against ``a [f(a)g(a)]**(h(t)/a) + b [f(b)g(b)]**(h(1-t)/b)`` integrated in t."""
    iv = _interval(iv, f, g)
    hyps = _young_hyps(f, g, h, grid)
    ca = f(iv.lo) * g(iv.lo)
    cb = f(iv.hi) * g(iv.hi)
    a, b = yp.alpha, yp.beta
    ql = integrate(lambda x: f(x) * g(x), iv, tol)
    qr = _t_integral(lambda t: a * ca ** (h(t) / a) + b * cb ** (h(1.0 - t) / b), h, tol)
    return _report(TheoremId.YOUNG_POINTWISE_E, hyps, ql.value / iv.width, qr.value,
                   ql.error_estimate / iv.width + qr.error_estimate, {"alpha": a, "beta": b})


def check_midpoint(f, h, iv, yp: YoungParams, tol=DEFAULT_TOL, grid=DEFAULT_GRID):
    """``f(mid)`` against ``a * mean(f**(h(1/2)/a)) + b * mean(f**(h(1/2)/b))``."""
    iv = _interval(iv, f)
    hyps = {"hLogConvex": check_h_log_convex(f, h, grid)}
    a, b = yp.alpha, yp.beta
    hh = h(0.5)
    qa = integrate(lambda x: f(x) ** (hh / a), iv, tol)
    qb = integrate(lambda x: f(x) ** (hh / b), iv, tol)
    rhs = (a * qa.value + b * qb.value) / iv.width
    err = (a * qa.error_estimate + b * qb.error_estimate) / iv.width
    return _report(TheoremId.MIDPOINT, hyps, f(iv.midpoint), rhs, err, {"alpha": a, "beta": b, "hHalf": hh})


def check_geom_product(f, h, iv=None, tol=DEFAULT_TOL, grid=DEFAULT_GRID):
    """Log-measure mean of ``f(g) f(xy/g)`` against the t-integral of ``[f(x)f(y)]**(h(t)+h(1-t))``."""
    iv = _interval(iv, f)
    _positive(iv)
    hyps = {"hGeomConvex": check_h_geom_convex(f, h, grid)}
    x, y = iv.lo, iv.hi
    span = math.log(y) - math.log(x)
    ql = integrate_log(lambda gm: f(gm) * f(np.clip(x * y / gm, x, y)), iv, tol)
    c = f(x) * f(y)
    qr = _t_integral(lambda t: np.power(c, h(t) + h(1.0 - t)), h, tol)
    return _report(TheoremId.GEOM_PRODUCT, hyps, ql.value / span, qr.value,
                   ql.error_estimate / span + qr.error_estimate)


def check_geom_holder(f, g, h, x: float, y: float, hp: HolderParams, tol=DEFAULT_TOL, grid=DEFAULT_GRID):
    """Double Hölder bound on the t-integral of ``f(x^t y^(1-t)) g(x^(1-t) y^t)``.

    The right side is a product of four t-integrals whose bases are the
    scalars ``f(x), g(y), f(y), g(x)``; only the exponents depend on t.
    """
    iv = _interval((x, y), f, g)
    _positive(iv)
    hyps = {"hGeomConvexF": check_h_geom_convex(f, h, grid), "hGeomConvexG": check_h_geom_convex(g, h, grid)}
    lx, ly = math.log(iv.lo), math.log(iv.hi)

    def lhs(t):
        u = np.clip(np.exp(t * lx + (1 - t) * ly), iv.lo, iv.hi)
        v = np.clip(np.exp((1 - t) * lx + t * ly), iv.lo, iv.hi)
        return f(u) * g(v)

    ql = integrate(lhs, Interval(0.0, 1.0), tol)
    p, q = hp.p, hp.q
    fx, fy, gx, gy = f(iv.lo), f(iv.hi), g(iv.lo), g(iv.hi)
    factors = [
        (lambda t: fx ** (p * p * h(t)), p * p),
        (lambda t: gy ** (p * q * h(t)), p * q),
        (lambda t: fy ** (p * q * h(1.0 - t)), p * q),
        (lambda t: gx ** (q * q * h(1.0 - t)), q * q),
    ]
    rhs, rel = 1.0, 0.0
    for integrand, k in factors:
        r = _t_integral(integrand, h, tol)
        rhs *= r.value ** (1.0 / k)
        rel += r.error_estimate / (k * abs(r.value))
    return _report(TheoremId.GEOM_HOLDER, hyps, ql.value, rhs, ql.error_estimate + rhs * rel, {"p": p, "q": q})


def check_multi_mean(f, h, iv=None, tol=DEFAULT_TOL, grid=DEFAULT_GRID):
    """Average of the log-measure and ordinary means of ``f`` against the t-integral of ``f(x)**h(t) f(y)**h(1-t)``."""
    iv = _interval(iv, f)
    _positive(iv)
    hyps = {"hMultiConvex": check_h_multi_convex(f, h, grid)}
    x, y = iv.lo, iv.hi
    span = math.log(y) - math.log(x)
    qg = integrate_log(f, iv, tol)
    qa = integrate(f, iv, tol)
    lhs = 0.5 * (qg.value / span + qa.value / iv.width)
    fx, fy = f(x), f(y)
    qr = _t_integral(lambda t: np.power(fx, h(t)) * np.power(fy, h(1.0 - t)), h, tol)
    err = 0.5 * (qg.error_estimate / span + qa.error_estimate / iv.width) + qr.error_estimate
    extras = {"logMean": qg.value / span, "arithmeticMean": qa.value / iv.width}
    return _report(TheoremId.MULTI_MEAN, hyps, lhs, qr.value, err, extras)


# which inputs each oracle consumes
THEOREM_INPUTS: dict[TheoremId, frozenset[str]] = {
    TheoremId.HH101: frozenset({"f"}),
    TheoremId.SUPERADD_PRODUCT_A: frozenset({"f", "h"}),
    TheoremId.SUPERADD_SQUARE_B: frozenset({"f", "h"}),
    TheoremId.COROLLARY_RECIPROCAL: frozenset({"f"}),
    TheoremId.PRODUCT_SYMMETRIC_C: frozenset({"f", "g", "h"}),
    TheoremId.YOUNG_SPLIT_D: frozenset({"f", "g", "h", "young"}),
    TheoremId.YOUNG_POINTWISE_E: frozenset({"f", "g", "h", "young"}),
    TheoremId.MIDPOINT: frozenset({"f", "h", "young"}),
    TheoremId.GEOM_PRODUCT: frozenset({"f", "h", "positive"}),
    TheoremId.GEOM_HOLDER: frozenset({"f", "g", "h", "holder", "positive"}),
    TheoremId.MULTI_MEAN: frozenset({"f", "h", "positive"}),
}


def run_oracle(
    theorem_id,
    f: FunctionSpec,
    *,
    g: FunctionSpec | None = None,
    h: WeightSpec | None = None,
    iv=None,
    young: YoungParams | None = None,
    holder: HolderParams | None = None,
    tol: float = DEFAULT_TOL,
    grid: GridSpec = DEFAULT_GRID,
    monotone_grid: int = MONOTONE_GRID,
) -> list[InequalityReport]:
    """Dispatch to the oracle for ``theorem_id``; returns one or two reports."""
    tid = TheoremId(theorem_id)
    needs = THEOREM_INPUTS[tid]
    for name, value in (("g", g), ("h", h), ("young", young), ("holder", holder)):
        if name in needs and value is None:
            raise InvalidParams(f"{tid.value} needs {name}")
    if tid is TheoremId.HH101:
        return [check_hh(f, iv, tol, grid)]
    if tid is TheoremId.SUPERADD_PRODUCT_A:
        return [check_superadd_product(f, h, iv, tol, grid, monotone_grid)]
    if tid is TheoremId.SUPERADD_SQUARE_B:
        return [check_superadd_square(f, h, iv, tol, grid, monotone_grid)]
    if tid is TheoremId.COROLLARY_RECIPROCAL:
        eps = h.clip_epsilon if h is not None else DEFAULT_CLIP_EPSILON
        return list(check_corollary_reciprocal(f, iv, tol, grid, monotone_grid, eps))
    if tid is TheoremId.PRODUCT_SYMMETRIC_C:
        return [check_product_symmetric(f, g, h, iv, tol, grid)]
    if tid is TheoremId.YOUNG_SPLIT_D:
        return [check_young_split(f, g, h, iv, young, tol, grid)]
    if tid is TheoremId.YOUNG_POINTWISE_E:
        return [check_young_pointwise(f, g, h, iv, young, tol, grid)]
    if tid is TheoremId.MIDPOINT:
        return [check_midpoint(f, h, iv, young, tol, grid)]
    if tid is TheoremId.GEOM_PRODUCT:
        return [check_geom_product(f, h, iv, tol, grid)]
    if tid is TheoremId.GEOM_HOLDER:
        iv = _interval(iv, f, g)
        return [check_geom_holder(f, g, h, iv.lo, iv.hi, holder, tol, grid)]
    return [check_multi_mean(f, h, iv, tol, grid)]

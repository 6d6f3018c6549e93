"""Sampling-based membership predicates for generalized convexity classes.

A predicate can refute membership but never prove it. Each one evaluates
the defining inequality on a tensor grid plus seeded uniform samples and
returns a :class:`ClassVerdict`. A sample counts as a violation only when
``lhs - rhs > 1e-9 * (1 + |rhs|)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InvalidParams
from .funclib import (
    MONOTONE_GRID,
    Interval,
    Monotonicity,
    WeightSpec,
    check_monotone,
    make_weight,
)

SLACK = 1e-9
WEIGHT_TOL = 1e-12


class Status(str, enum.Enum):
    HOLDS = "holdsOnGrid"
    VIOLATED = "violated"


@dataclass(frozen=True)
class GridSpec:
    """Sampling plan: ``n_points`` per axis, ``n_random`` seeded extra samples."""

    n_points: int = 33
    n_random: int = 10_000
    seed: int = 0
    n_lambda: int = 11

    def __post_init__(self):
        if self.n_points < 2 or self.n_random < 0 or self.n_lambda < 2:
            raise InvalidParams(f"bad grid {self}")


DEFAULT_GRID = GridSpec()
COARSE_GRID = GridSpec(n_points=9, n_random=256)


@dataclass(frozen=True)
class ClassVerdict:
    predicate: str
    status: Status
    max_violation: float
    witness: dict | None
    n_points: int
    seed: int
    n_samples: int
    detail: str = field(default="", compare=False)

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    def to_dict(self) -> dict:
        return {
            "predicate": self.predicate,
            "status": self.status.value,
            "maxViolation": self.max_violation,
            "witness": self.witness,
            "grid": {"nPoints": self.n_points, "seed": self.seed},
            "samples": self.n_samples,
            "detail": self.detail,
        }


def _slack(rhs: np.ndarray) -> np.ndarray:
    return SLACK * (1.0 + np.abs(rhs))


def _reduce(
    name: str,
    excess: np.ndarray,
    coords: dict[str, np.ndarray],
    lhs: np.ndarray,
    rhs: np.ndarray,
    grid: GridSpec,
    keys: Sequence[np.ndarray] | None = None,
    detail: str = "",
) -> ClassVerdict:
    """Collapse per-sample excesses into a verdict.

    The witness is chosen by exact comparison on ``keys`` (default: largest
    excess, then lexicographic coordinates), so the result does not depend
    on sample order. NaN excesses (e.g. ``inf - inf``) are ignored.
    """
    excess = np.where(np.isnan(excess), -np.inf, excess)
    n = int(excess.size)
    m = float(np.max(excess)) if n else -np.inf
    if not m > 0:
        return ClassVerdict(name, Status.HOLDS, m, None, grid.n_points, grid.seed, n, detail)
    bad = np.flatnonzero(excess > 0)
    if keys is None:
        keys = [-excess] + list(coords.values())
    # lexsort treats the last key as primary
    pick = bad[np.lexsort([k[bad] for k in reversed(keys)])[0]]
    witness = {k: float(v[pick]) for k, v in coords.items()}
    witness["lhs"] = float(lhs[pick])
    witness["rhs"] = float(rhs[pick])
    return ClassVerdict(name, Status.VIOLATED, m, witness, grid.n_points, grid.seed, n, detail)


def _rng(grid: GridSpec, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([grid.seed, stream]))


def _samples_xyt(domain: Interval, t_iv: Interval, grid: GridSpec):
    g = domain.grid(grid.n_points)
    tg = t_iv.grid(grid.n_points)
    X, Y, T = (a.ravel() for a in np.meshgrid(g, g, tg, indexing="ij"))
    # joint draws: a smaller n_random yields a prefix of a larger one
    r = _rng(grid, 0).uniform(size=(grid.n_random, 3))
    xr = domain.lo + domain.width * r[:, 0]
    yr = domain.lo + domain.width * r[:, 1]
    tr = t_iv.lo + t_iv.width * r[:, 2]
    return np.concatenate([X, xr]), np.concatenate([Y, yr]), np.concatenate([T, tr])


def _require_positive(f, name: str) -> None:
    if f.domain.lo <= 0:
        raise DomainError(f"{name} needs a positive domain, got [{f.domain.lo}, {f.domain.hi}]")


def _geometric_mean(x, y, t, domain: Interval):
    return np.clip(np.exp(t * np.log(x) + (1.0 - t) * np.log(y)), domain.lo, domain.hi)


def _weighted_product(f, h: WeightSpec, x, y, t):
    return np.power(f(x), h(t)) * np.power(f(y), h(1.0 - t))


def check_h_convex(f, h: WeightSpec, grid: GridSpec = DEFAULT_GRID) -> ClassVerdict:
    """Test ``f(tx+(1-t)y) <= h(t) f(x) + h(1-t) f(y)``."""
    x, y, t = _samples_xyt(f.domain, h.t_interval, grid)
    with np.errstate(all="ignore"):
        lhs = f(t * x + (1.0 - t) * y)
        rhs = h(t) * f(x) + h(1.0 - t) * f(y)
        excess = lhs - rhs - _slack(rhs)
    return _reduce("hConvex", excess, {"x": x, "y": y, "t": t}, lhs, rhs, grid)


def check_h_log_convex(f, h: WeightSpec, grid: GridSpec = DEFAULT_GRID) -> ClassVerdict:
    """Test ``f(tx+(1-t)y) <= f(x)**h(t) * f(y)**h(1-t)``."""
    x, y, t = _samples_xyt(f.domain, h.t_interval, grid)
    with np.errstate(all="ignore"):
        lhs = f(t * x + (1.0 - t) * y)
        rhs = _weighted_product(f, h, x, y, t)
        excess = lhs - rhs - _slack(rhs)
    return _reduce("hLogConvex", excess, {"x": x, "y": y, "t": t}, lhs, rhs, grid)


def check_h_geom_convex(f, h: WeightSpec, grid: GridSpec = DEFAULT_GRID) -> ClassVerdict:
    """Test ``f(x**t * y**(1-t)) <= f(x)**h(t) * f(y)**h(1-t)``; positive domains only."""
    _require_positive(f, "hGeomConvex")
    x, y, t = _samples_xyt(f.domain, h.t_interval, grid)
    with np.errstate(all="ignore"):
        lhs = f(_geometric_mean(x, y, t, f.domain))
        rhs = _weighted_product(f, h, x, y, t)
        excess = lhs - rhs - _slack(rhs)
    return _reduce("hGeomConvex", excess, {"x": x, "y": y, "t": t}, lhs, rhs, grid)


def check_h_multi_convex(
    f, h: WeightSpec, grid: GridSpec = DEFAULT_GRID, lam: float | None = None
) -> ClassVerdict:
    """Test ``lam f(G) + (1-lam) f(A) <= f(x)**h(t) * f(y)**h(1-t)``.

    ``G`` and ``A`` are the weighted geometric and arithmetic means of x, y.
    By default lam runs over ``grid.n_lambda`` points on [0, 1] (random
    samples draw their own lam). Passing ``lam`` pins it for every sample,
    which gives the lam=0 and lam=1 slices.
    """
    _require_positive(f, "hMultiConvex")
    x, y, t = _samples_xyt(f.domain, h.t_interval, grid)
    n_grid = x.size - grid.n_random
    if lam is None:
        lg = np.linspace(0.0, 1.0, grid.n_lambda)
        lr = _rng(grid, 1).uniform(0.0, 1.0, grid.n_random)
        L = np.concatenate([np.repeat(lg[None, :], n_grid, axis=0).ravel(), lr])
        rep = np.concatenate([np.repeat(np.arange(n_grid), grid.n_lambda), np.arange(n_grid, x.size)])
        x, y, t = x[rep], y[rep], t[rep]
    else:
        if not 0.0 <= lam <= 1.0:
            raise InvalidParams("lam must lie in [0, 1]")
        L = np.full(x.size, float(lam))
    with np.errstate(all="ignore"):
        lhs = L * f(_geometric_mean(x, y, t, f.domain)) + (1.0 - L) * f(t * x + (1.0 - t) * y)
        rhs = _weighted_product(f, h, x, y, t)
        excess = lhs - rhs - _slack(rhs)
    return _reduce("hMultiConvex", excess, {"x": x, "y": y, "t": t, "lam": L}, lhs, rhs, grid)


def _check_s(s: float) -> None:
    if not 0.0 < s <= 1.0:
        raise InvalidParams(f"s must lie in (0, 1], got {s}")


def check_s_log_convex_first(f, s: float, grid: GridSpec = DEFAULT_GRID) -> ClassVerdict:
    """First-sense s-log-convexity: ``f(ax+by) <= f(x)**(a**s) f(y)**(b**s)``, ``a**s + b**s = 1``.

    Pairs are parametrised as ``a = u**(1/s)``, ``b = (1-u)**(1/s)``. Since
    ``a + b <= 1`` the point ``ax+by`` can leave the domain; such samples
    are skipped.
    """
    _check_s(s)
    x, y, u = _samples_xyt(f.domain, Interval(0.0, 1.0), grid)
    alpha = np.power(u, 1.0 / s)
    beta = np.power(1.0 - u, 1.0 / s)
    z = alpha * x + beta * y
    d = f.domain
    ok = (z >= d.lo - 1e-12) & (z <= d.hi + 1e-12)
    x, y, u, z = x[ok], y[ok], u[ok], z[ok]
    with np.errstate(all="ignore"):
        lhs = f(z)
        rhs = np.power(f(x), u) * np.power(f(y), 1.0 - u)
        excess = lhs - rhs - _slack(rhs)
    return _reduce("sLogConvexFirst", excess, {"x": x, "y": y, "u": u}, lhs, rhs, grid, detail=f"s={s:g}")


def check_s_log_convex_second(f, s: float, grid: GridSpec = DEFAULT_GRID) -> ClassVerdict:
    _check_s(s)
    v = check_h_log_convex(f, make_weight("power", (s,)), grid)
    return _rename(v, "sLogConvexSecond", f"s={s:g}")


def check_geom_convex(f, grid: GridSpec = DEFAULT_GRID) -> ClassVerdict:
    return _rename(check_h_geom_convex(f, make_weight("identity"), grid), "geomConvex")


def check_s_geom_convex(f, s: float, grid: GridSpec = DEFAULT_GRID) -> ClassVerdict:
    _check_s(s)
    return _rename(check_h_geom_convex(f, make_weight("power", (s,)), grid), "sGeomConvex", f"s={s:g}")


def _rename(v: ClassVerdict, name: str, detail: str = "") -> ClassVerdict:
    return ClassVerdict(name, v.status, v.max_violation, v.witness, v.n_points, v.seed, v.n_samples, detail)


def check_superadditive(h: WeightSpec, grid: GridSpec = DEFAULT_GRID) -> ClassVerdict:
    """Test ``h(u+v) >= h(u) + h(v)`` on the triangle ``u, v >= t_min, u+v <= 1``.

    The triangle is swept by the sum ``u+v`` and the split fraction. When
    violated, the witness is the violating pair with the largest sum, then
    the most balanced split. Superadditivity is only ever used as
    ``h(t) + h(1-t) <= h(1)``, so this reports the pair that refutes that
    step directly. ``max_violation`` is still the overall maximum.
    """
    e = h.t_min
    sg = np.linspace(2.0 * e, 1.0, grid.n_points)
    wg = np.linspace(0.0, 1.0, grid.n_points)
    S, W = (a.ravel() for a in np.meshgrid(sg, wg, indexing="ij"))
    r = _rng(grid, 0).uniform(size=(grid.n_random, 2))
    S = np.concatenate([S, 2.0 * e + (1.0 - 2.0 * e) * r[:, 0]])
    W = np.concatenate([W, r[:, 1]])
    u = e + W * (S - 2.0 * e)
    v = e + (1.0 - W) * (S - 2.0 * e)
    s = np.minimum(u + v, 1.0)
    lhs = h(u) + h(v)
    rhs = h(s)
    excess = lhs - rhs - _slack(rhs)
    keys = [-s, np.abs(u - v), u]
    return _reduce("superadditive", excess, {"u": u, "v": v}, lhs, rhs, grid, keys=keys)


def _t_samples(h: WeightSpec, grid: GridSpec) -> np.ndarray:
    t_iv = h.t_interval
    tr = _rng(grid, 0).uniform(t_iv.lo, t_iv.hi, grid.n_random)
    return np.concatenate([t_iv.grid(grid.n_points), tr])


def check_symmetric_half(h: WeightSpec, grid: GridSpec = DEFAULT_GRID) -> ClassVerdict:
    """Test ``h(t) == h(1-t)`` within 1e-12 absolute."""
    t = _t_samples(h, grid)
    lhs, rhs = h(t), h(1.0 - t)
    excess = np.abs(lhs - rhs) - WEIGHT_TOL
    return _reduce("symmetricHalf", excess, {"t": t}, lhs, rhs, grid)


def check_partition_unity(h: WeightSpec, grid: GridSpec = DEFAULT_GRID) -> ClassVerdict:
    """Test ``h(t) + h(1-t) == 1`` within 1e-12 absolute."""
    t = _t_samples(h, grid)
    lhs = h(t) + h(1.0 - t)
    rhs = np.ones_like(lhs)
    excess = np.abs(lhs - 1.0) - WEIGHT_TOL
    return _reduce("partitionUnity", excess, {"t": t}, lhs, rhs, grid)


def check_monotone_verdict(f, grid_n: int = MONOTONE_GRID) -> ClassVerdict:
    """Monotonicity as a hypothesis verdict; ``detail`` carries the direction."""
    direction = check_monotone(f, grid_n)
    grid = GridSpec(n_points=grid_n, n_random=0)
    if direction is not Monotonicity.NON_MONOTONE:
        return ClassVerdict("monotone", Status.HOLDS, 0.0, None, grid_n, 0, grid_n, direction.value)
    xs = f.domain.grid(grid_n)
    d = np.diff(f(xs))
    up, down = int(np.argmax(d)), int(np.argmin(d))
    witness = {"xIncrease": float(xs[up]), "xDecrease": float(xs[down]), "lhs": float(d[up]), "rhs": float(d[down])}
    return ClassVerdict("monotone", Status.VIOLATED, float(min(d[up], -d[down])), witness, grid_n, 0, grid_n,
                        direction.value)


CLASS_PREDICATES = {
    "hConvex": check_h_convex,
    "hLogConvex": check_h_log_convex,
    "hGeomConvex": check_h_geom_convex,
    "hMultiConvex": check_h_multi_convex,
    "sLogConvexFirst": check_s_log_convex_first,
    "sLogConvexSecond": check_s_log_convex_second,
    "geomConvex": check_geom_convex,
    "sGeomConvex": check_s_geom_convex,
    "superadditive": check_superadditive,
    "symmetricHalf": check_symmetric_half,
    "partitionUnity": check_partition_unity,
    "monotone": check_monotone_verdict,
}

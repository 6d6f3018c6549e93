"""Adaptive quadrature with error estimates.

The engine is a breadth-first adaptive Simpson rule with Richardson
correction. It refines every unconverged panel at once so integrands are
evaluated on numpy arrays. After convergence a 15-point Gauss-Legendre rule
is applied to the final partition, and the disagreement between the two
rules feeds into the reported error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceeded, DomainError, IneqForgeError, NonFinite
from .funclib import Interval

DEFAULT_TOL = 1e-9
MAX_DEPTH = 50
MAX_EVALUATIONS = 1_000_000
INITIAL_PANELS = 4

_GL_X, _GL_W = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int


def _as_interval(iv) -> Interval:
    return iv if isinstance(iv, Interval) else Interval(*iv)


def _vectorized(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    state = {"array_ok": True}

    def call(x: np.ndarray) -> np.ndarray:
        if state["array_ok"]:
            try:
                y = np.asarray(f(x), dtype=float)
                if y.ndim == 0:
                    y = np.full(x.shape, float(y))
                if y.shape == x.shape:
                    return y
            except IneqForgeError:
                raise
            except (TypeError, ValueError):
                pass
            state["array_ok"] = False
        return np.fromiter((f(float(v)) for v in x), dtype=float, count=x.size)

    return call


def integrate(
    f: Callable,
    iv: Interval | Sequence[float],
    tol: float = DEFAULT_TOL,
    *,
    max_depth: int = MAX_DEPTH,
    max_evaluations: int = MAX_EVALUATIONS,
) -> QuadResult:
    """Integrate ``f`` over ``iv`` to absolute tolerance ``tol``.

    ``f`` may be vectorised (preferred) or scalar-only. The error estimate
    is the larger of the summed Richardson estimates and the gap to the
    Gauss-Legendre cross-check.

    Raises:
        NonFinite: ``f`` produced inf or nan.
        BudgetExceeded: more than ``max_evaluations`` samples were needed.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    iv = _as_interval(iv)
    a, b = iv.lo, iv.hi
    F = _vectorized(f)
    evaluations = 0

    def sample(x: np.ndarray) -> np.ndarray:
        nonlocal evaluations
        evaluations += x.size
        if evaluations > max_evaluations:
            raise BudgetExceeded(f"quadrature exceeded {max_evaluations} evaluations on [{a}, {b}]")
        with np.errstate(all="ignore"):
            y = F(x)
        if not np.all(np.isfinite(y)):
            raise NonFinite(f"integrand is not finite at x={x[~np.isfinite(y)][0]!r}")
        return y

    edges = np.linspace(a, b, INITIAL_PANELS + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    y = sample(np.concatenate([edges, mid]))
    flo, fhi, fm = y[:INITIAL_PANELS], y[1 : INITIAL_PANELS + 1], y[INITIAL_PANELS + 1 :]
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi)
    ptol = np.full(INITIAL_PANELS, tol / INITIAL_PANELS)
    depth = 0

    done_lo, done_hi, done_val, done_err = [], [], [], []
    while lo.size:
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        y = sample(np.concatenate([lm, rm]))
        flm, frm = y[: lo.size], y[lo.size :]
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fm)
        right = (hi - mid) / 6.0 * (fm + 4.0 * frm + fhi)
        refined = left + right
        rich = (refined - whole) / 15.0
        converged = np.abs(rich) <= ptol
        if depth >= max_depth:
            converged[:] = True
        done_lo.append(lo[converged])
        done_hi.append(hi[converged])
        done_val.append(refined[converged] + rich[converged])
        done_err.append(np.abs(rich[converged]))

        keep = ~converged
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        flo, fm, fhi = flo[keep], fm[keep], fhi[keep]
        lm, rm, flm, frm = lm[keep], rm[keep], flm[keep], frm[keep]
        left, right, ptol = left[keep], right[keep], ptol[keep]
        # children: [lo, mid] and [mid, hi]
        lo, mid, hi = np.concatenate([lo, mid]), np.concatenate([lm, rm]), np.concatenate([mid, hi])
        flo, fm, fhi = np.concatenate([flo, fm]), np.concatenate([flm, frm]), np.concatenate([fm, fhi])
        whole = np.concatenate([left, right])
        ptol = np.concatenate([ptol, ptol]) / 2.0
        depth += 1

    plo = np.concatenate(done_lo)
    phi = np.concatenate(done_hi)
    order = np.argsort(plo, kind="stable")
    simpson = math.fsum(np.concatenate(done_val)[order])
    richardson_err = math.fsum(np.concatenate(done_err)[order])

    half = 0.5 * (phi[order] - plo[order])
    centre = 0.5 * (phi[order] + plo[order])
    nodes = (centre[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    gl = sample(nodes).reshape(-1, _GL_X.size)
    gauss = math.fsum((half * (gl @ _GL_W)).tolist())

    return QuadResult(simpson, max(richardson_err, abs(simpson - gauss)), evaluations)


def integrate_log(f: Callable, iv: Interval | Sequence[float], tol: float = DEFAULT_TOL) -> QuadResult:
    """Integrate ``f(g) dg / g`` over a positive interval via ``u = ln g``."""
    iv = _as_interval(iv)
    if iv.lo <= 0:
        raise DomainError("logarithmic measure needs a positive interval")
    F = _vectorized(f)
    lo, hi = iv.lo, iv.hi

    def g(u):
        # exp(log(hi)) may overshoot hi by an ulp
        return F(np.clip(np.exp(u), lo, hi))

    return integrate(g, Interval(math.log(lo), math.log(hi)), tol)


def mean_value(f: Callable, iv: Interval | Sequence[float], tol: float = DEFAULT_TOL) -> float:
    iv = _as_interval(iv)
    return integrate(f, iv, tol).value / iv.width

"""Seeded counterexample search, parameter sweeps and replay.

Candidates are drawn from a counter-based Philox stream keyed by
``(seed, evaluation index)``. The draw for index ``i`` does not depend on
the budget, so extending the budget only appends candidates. The best
hypothesis-satisfying candidates are then polished by derivative-free
coordinate descent.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .classes import COARSE_GRID, DEFAULT_GRID, GridSpec
from .errors import IneqForgeError, InvalidParams
from .funclib import MONOTONE_GRID, FUNCTION_FAMILIES, WEIGHT_FAMILIES, Interval, make_function, make_weight
from .quadrature import DEFAULT_TOL
from .theorems import THEOREM_INPUTS, HolderParams, InequalityReport, TheoremId, Verdict, YoungParams, run_oracle

log = logging.getLogger(__name__)

SEARCH_MONOTONE_GRID = 65
REL_STEP_STOP = 1e-4


@dataclass(frozen=True)
class FunctionChoice:
    family: str
    params: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {"family": self.family, "params": list(self.params)}


@dataclass(frozen=True)
class WeightChoice:
    family: str
    params: tuple[float, ...] = ()
    clip_epsilon: float = 1e-3

    def to_dict(self) -> dict:
        return {"family": self.family, "params": list(self.params), "clipEpsilon": self.clip_epsilon}


@dataclass(frozen=True)
class OracleConfig:
    """Everything needed to rerun one oracle evaluation.

    The functions ``f`` and ``g`` live on ``interval``; tabulated samples
    sit on equally spaced knots across it.
    """

    theorem_id: TheoremId
    f: FunctionChoice
    interval: tuple[float, float]
    g: FunctionChoice | None = None
    h: WeightChoice | None = None
    alpha: float | None = None
    p: float | None = None
    tol: float = DEFAULT_TOL

    def build(self) -> dict:
        iv = Interval(*self.interval)
        kw = {"f": make_function(self.f.family, self.f.params, iv), "iv": iv}
        if self.g is not None:
            kw["g"] = make_function(self.g.family, self.g.params, iv)
        if self.h is not None:
            kw["h"] = make_weight(self.h.family, self.h.params, self.h.clip_epsilon)
        if self.alpha is not None:
            kw["young"] = YoungParams.from_alpha(self.alpha)
        if self.p is not None:
            kw["holder"] = HolderParams.from_p(self.p)
        return kw

    def evaluate(self, grid: GridSpec = DEFAULT_GRID, monotone_grid: int = MONOTONE_GRID,
                 tol: float | None = None) -> InequalityReport:
        """Run the oracle; for two-part theorems return the part with the smaller margin."""
        reports = run_oracle(self.theorem_id, tol=self.tol if tol is None else tol, grid=grid,
                             monotone_grid=monotone_grid, **self.build())
        return min(reports, key=lambda r: r.margin)

    def axes(self) -> dict[str, float]:
        out = {}
        for name, choice in (("f", self.f), ("g", self.g), ("h", self.h)):
            if choice is not None:
                out.update({f"{name}.{i}": v for i, v in enumerate(choice.params)})
        out["a"], out["b"] = self.interval
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.p is not None:
            out["p"] = self.p
        return out

    def with_axis(self, axis: str, value: float) -> "OracleConfig":
        if axis not in self.axes():
            raise InvalidParams(f"axis {axis!r} not in config; available: {sorted(self.axes())}")
        value = float(value)
        if axis == "a":
            return replace(self, interval=(value, self.interval[1]))
        if axis == "b":
            return replace(self, interval=(self.interval[0], value))
        if axis in ("alpha", "p"):
            return replace(self, **{axis: value})
        name, idx = axis.split(".")
        choice = getattr(self, name)
        params = list(choice.params)
        params[int(idx)] = value
        return replace(self, **{name: replace(choice, params=tuple(params))})

    def sort_key(self) -> tuple:
        parts = [self.theorem_id.value, self.f.family, self.f.params, self.interval]
        for c in (self.g, self.h):
            parts.append(("",) if c is None else (c.family, c.params))
        parts.append((self.alpha or 0.0, self.p or 0.0))
        return tuple(parts)

    def to_dict(self) -> dict:
        d = {"theoremId": self.theorem_id.value, "f": self.f.to_dict(), "interval": list(self.interval)}
        if self.g is not None:
            d["g"] = self.g.to_dict()
        if self.h is not None:
            d["h"] = self.h.to_dict()
        if self.alpha is not None:
            d["alpha"] = self.alpha
        if self.p is not None:
            d["p"] = self.p
        d["tol"] = self.tol
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "OracleConfig":
        def fn(x):
            return None if x is None else FunctionChoice(x["family"], tuple(float(v) for v in x.get("params", ())))

        h = d.get("h")
        return cls(
            theorem_id=TheoremId(d["theoremId"]),
            f=fn(d["f"]),
            interval=tuple(float(v) for v in d["interval"]),
            g=fn(d.get("g")),
            h=None if h is None else WeightChoice(h["family"], tuple(float(v) for v in h.get("params", ())),
                                                  float(h.get("clipEpsilon", 1e-3))),
            alpha=d.get("alpha"),
            p=d.get("p"),
            tol=float(d.get("tol", DEFAULT_TOL)),
        )


@dataclass(frozen=True)
class FamilyRange:
    """A family name plus one ``(lo, hi)`` range per parameter."""

    family: str
    ranges: tuple[tuple[float, float], ...] = ()
    clip_epsilon: float = 1e-3

    def __post_init__(self):
        for lo, hi in self.ranges:
            if not lo <= hi:
                raise InvalidParams(f"empty parameter range ({lo}, {hi}) for {self.family}")


@dataclass(frozen=True)
class SearchSpace:
    theorem_id: TheoremId
    function_families: tuple[FamilyRange, ...]
    weight_families: tuple[FamilyRange, ...] = (FamilyRange("identity"),)
    interval_range: tuple[float, float] = (0.0, 1.0)
    min_width: float = 0.05
    fixed_interval: bool = False
    alpha_range: tuple[float, float] = (0.05, 0.95)
    p_range: tuple[float, float] = (1.1, 4.0)
    budget: int = 1000
    seed: int = 0
    tol: float = DEFAULT_TOL
    grid: GridSpec = COARSE_GRID
    monotone_grid: int = SEARCH_MONOTONE_GRID
    refine_top: int = 5
    sweeps: int = 8

    def __post_init__(self):
        object.__setattr__(self, "theorem_id", TheoremId(self.theorem_id))
        if self.budget < 1:
            raise InvalidParams("budget must be at least 1")
        if not self.function_families:
            raise InvalidParams("need at least one function family")
        lo, hi = self.interval_range
        if not lo < hi:
            raise InvalidParams("interval range is empty")
        if not self.fixed_interval and hi - lo < self.min_width:
            raise InvalidParams("interval range narrower than min_width")
        if "positive" in self.needs and lo <= 0:
            raise InvalidParams(f"{self.theorem_id.value} needs a positive interval range")
        for fr in self.function_families:
            if fr.family not in FUNCTION_FAMILIES:
                raise InvalidParams(f"unknown function family {fr.family!r}")
        for wr in self.weight_families:
            if wr.family not in WEIGHT_FAMILIES:
                raise InvalidParams(f"unknown weight family {wr.family!r}")
        for r in (self.alpha_range, self.p_range):
            if not r[0] <= r[1]:
                raise InvalidParams("empty auxiliary range")

    @property
    def needs(self) -> frozenset[str]:
        return THEOREM_INPUTS[self.theorem_id]


@dataclass(frozen=True)
class SearchResult:
    best_margin: float
    best_config: OracleConfig
    hypothesis_status: dict[str, str]
    trace: tuple[tuple[int, float], ...]
    feasible: bool
    evaluations: int
    best_verdict: Verdict = field(default=Verdict.HOLDS)

    def to_dict(self) -> dict:
        return {
            "bestMargin": self.best_margin,
            "bestVerdict": self.best_verdict.value,
            "feasible": self.feasible,
            "evaluations": self.evaluations,
            "hypothesisStatus": self.hypothesis_status,
            "bestConfig": self.best_config.to_dict(),
            "trace": [list(t) for t in self.trace],
        }


def _stream(seed: int, index: int) -> np.random.Generator:
    key = int(seed) % (1 << 64)
    return np.random.Generator(np.random.Philox(key=key, counter=[0, index, 0, 0]))


def _draw_choice(rng, ranges: Sequence[FamilyRange]):
    fr = ranges[int(rng.integers(len(ranges)))]
    params = tuple(float(rng.uniform(lo, hi)) for lo, hi in fr.ranges)
    return fr, params


def sample_config(space: SearchSpace, index: int) -> OracleConfig:
    """Deterministic candidate number ``index`` of ``space``."""
    rng = _stream(space.seed, index)
    needs = space.needs
    fr, fp = _draw_choice(rng, space.function_families)
    g = h = alpha = p = None
    if "g" in needs:
        gr, gp = _draw_choice(rng, space.function_families)
        g = FunctionChoice(gr.family, gp)
    if "h" in needs:
        wr, wp = _draw_choice(rng, space.weight_families)
        h = WeightChoice(wr.family, wp, wr.clip_epsilon)
    lo, hi = space.interval_range
    if space.fixed_interval:
        iv = (lo, hi)
    else:
        w = space.min_width
        a = float(rng.uniform(lo, hi - w))
        iv = (a, float(rng.uniform(a + w, hi)))
    if "young" in needs:
        alpha = float(rng.uniform(*space.alpha_range))
    if "holder" in needs:
        p = float(rng.uniform(*space.p_range))
    return OracleConfig(space.theorem_id, FunctionChoice(fr.family, fp), iv, g, h, alpha, p, space.tol)


def _axis_bounds(space: SearchSpace, cfg: OracleConfig) -> dict[str, tuple[float, float]]:
    bounds = {}
    families = {fr.family: fr for fr in space.function_families}
    weights = {wr.family: wr for wr in space.weight_families}
    for name, choice, table in (("f", cfg.f, families), ("g", cfg.g, families), ("h", cfg.h, weights)):
        if choice is not None:
            for i, r in enumerate(table[choice.family].ranges):
                bounds[f"{name}.{i}"] = r
    if not space.fixed_interval:
        bounds["a"] = bounds["b"] = space.interval_range
    if cfg.alpha is not None:
        bounds["alpha"] = space.alpha_range
    if cfg.p is not None:
        bounds["p"] = space.p_range
    return {k: v for k, v in bounds.items() if v[1] > v[0]}


class _Evaluator:
    def __init__(self, space: SearchSpace):
        self.space = space
        self.count = 0

    def __call__(self, cfg: OracleConfig) -> InequalityReport | None:
        self.count += 1
        try:
            return cfg.evaluate(self.space.grid, self.space.monotone_grid)
        except IneqForgeError as exc:
            log.debug("candidate %s skipped: %s", cfg, exc)
            return None


def _feasible(r: InequalityReport) -> bool:
    return r.verdict is not Verdict.HYPOTHESIS_FAILED


def _refine(space, start: OracleConfig, start_margin: float, evaluate, on_feasible) -> None:
    bounds = _axis_bounds(space, start)
    step = {k: 0.25 * (hi - lo) for k, (lo, hi) in bounds.items()}
    cur, cur_margin = start, start_margin
    for _ in range(space.sweeps):
        improved = False
        for axis, (lo, hi) in bounds.items():
            for direction in (1.0, -1.0):
                v = float(np.clip(cur.axes()[axis] + direction * step[axis], lo, hi))
                if v == cur.axes()[axis]:
                    continue
                cand = cur.with_axis(axis, v)
                a, b = cand.interval
                if b - a < space.min_width:
                    continue
                r = evaluate(cand)
                if r is None or not _feasible(r):
                    continue
                on_feasible(cand, r)
                if r.margin < cur_margin:
                    cur, cur_margin, improved = cand, r.margin, True
                    break
        if not improved:
            step = {k: s / 2.0 for k, s in step.items()}
        if all(step[k] / (bounds[k][1] - bounds[k][0]) < REL_STEP_STOP for k in step):
            break


def search_violation(space: SearchSpace) -> SearchResult:
    """Minimise the margin over hypothesis-satisfying configurations.

    Uniform sampling of ``space.budget`` candidates is followed by coordinate
    descent from the ``refine_top`` best feasible ones. If no candidate is
    feasible the best infeasible margin is returned with ``feasible=False``.
    """
    evaluate = _Evaluator(space)
    scored: list[tuple[float, tuple, int, OracleConfig, InequalityReport]] = []
    best_infeasible = None
    trace: list[tuple[int, float]] = []
    best = None

    def on_feasible(cfg, r):
        nonlocal best
        key = (r.margin, cfg.sort_key())
        if best is None or key < best[0]:
            if best is None or r.margin < best[0][0]:
                trace.append((evaluate.count - 1, r.margin))
            best = (key, cfg, r)

    for i in range(space.budget):
        cfg = sample_config(space, i)
        r = evaluate(cfg)
        if r is None:
            continue
        if _feasible(r):
            scored.append((r.margin, cfg.sort_key(), i, cfg, r))
            on_feasible(cfg, r)
        elif best_infeasible is None or (r.margin, cfg.sort_key()) < best_infeasible[0]:
            best_infeasible = ((r.margin, cfg.sort_key()), cfg, r)

    if best is None:
        if best_infeasible is None:
            raise InvalidParams("no candidate in the search space could be evaluated")
        log.warning("no sampled configuration satisfied the hypotheses of %s", space.theorem_id.value)
        _, cfg, r = best_infeasible
        return SearchResult(r.margin, cfg, _status(r), (), False, evaluate.count, r.verdict)

    scored.sort(key=lambda s: (s[0], s[1]))
    for margin, _, _, cfg, _ in scored[: space.refine_top]:
        _refine(space, cfg, margin, evaluate, on_feasible)

    _, cfg, r = best
    return SearchResult(r.margin, cfg, _status(r), tuple(trace), True, evaluate.count, r.verdict)


def _status(r: InequalityReport) -> dict[str, str]:
    return {k: v.status.value for k, v in r.hypotheses.items()}


def replay(result: SearchResult, tol_factor: float = 10.0, grid: GridSpec = DEFAULT_GRID) -> InequalityReport:
    """Re-run the best configuration with ``tol / tol_factor`` and full-resolution hypotheses."""
    cfg = result.best_config
    return cfg.evaluate(grid, MONOTONE_GRID, tol=cfg.tol / tol_factor)


@dataclass(frozen=True)
class SweepRow:
    value: float
    margin: float
    verdict: Verdict
    report: InequalityReport


def sweep_margin(
    theorem_id,
    config: OracleConfig,
    axis: str,
    values: Sequence[float] | None = None,
    *,
    lo: float | None = None,
    hi: float | None = None,
    grid_n: int = 10,
    grid: GridSpec = DEFAULT_GRID,
) -> list[SweepRow]:
    """Evaluate the oracle while varying one named axis of ``config``.

    Either pass explicit ``values`` or a range ``lo..hi`` with ``grid_n``
    points. Rows come back ordered by parameter value.
    """
    config = replace(config, theorem_id=TheoremId(theorem_id))
    if axis not in config.axes():
        raise InvalidParams(f"axis {axis!r} not in config; available: {sorted(config.axes())}")
    if values is None:
        if lo is None or hi is None:
            raise InvalidParams("sweep needs values or lo/hi")
        values = np.linspace(lo, hi, grid_n)
    rows = []
    for v in sorted(float(x) for x in values):
        r = config.with_axis(axis, v).evaluate(grid)
        rows.append(SweepRow(v, r.margin, r.verdict, r))
    return rows

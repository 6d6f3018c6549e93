"""Command-line entry point.

One JSON document describes a run::

    {"command": "checkTheorem", "target": "HH101",
     "f": {"family": "power", "params": [2]}, "interval": [0, 2]}

Exit codes: 0 everything holds, 1 usage or I/O error, 2 some verdict is
violated, 3 only hypothesis failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .classes import CLASS_PREDICATES, ClassVerdict, GridSpec, Status
from .errors import EmptyReport, IneqForgeError, ParseError, ValidationError
from .funclib import FUNCTION_FAMILIES, WEIGHT_FAMILIES, Interval, make_function, make_weight
from .search import (
    FamilyRange,
    FunctionChoice,
    OracleConfig,
    SearchResult,
    SearchSpace,
    SweepRow,
    WeightChoice,
    replay,
    search_violation,
    sweep_margin,
)
from .theorems import THEOREM_INPUTS, InequalityReport, TheoremId, Verdict, run_oracle

COMMANDS = ("checkClass", "checkTheorem", "search", "sweep")
FORMATS = ("json", "csv")
SEED_ENV = "INEQFORGE_SEED"
CSV_COLUMNS = ["id", "verdict", "lhs", "rhs", "margin", "quadError", "hypothesisSummary"]

EXIT_OK, EXIT_ERROR, EXIT_VIOLATED, EXIT_HYPOTHESIS = 0, 1, 2, 3

_FUNCTION_CLASSES = {"hConvex", "hLogConvex", "hGeomConvex", "hMultiConvex", "sLogConvexFirst",
                     "sLogConvexSecond", "geomConvex", "sGeomConvex", "monotone"}
_WEIGHT_ARG = {"hConvex", "hLogConvex", "hGeomConvex", "hMultiConvex", "superadditive", "symmetricHalf",
               "partitionUnity"}
_S_ARG = {"sLogConvexFirst", "sLogConvexSecond", "sGeomConvex"}


@dataclass(frozen=True)
class RunConfig:
    command: str
    target: str
    f: FunctionChoice | None = None
    g: FunctionChoice | None = None
    h: WeightChoice | None = None
    interval: tuple[float, float] | None = None
    alpha: float | None = None
    p: float | None = None
    s: float | None = None
    tol: float = 1e-9
    grid: int = 33
    n_random: int = 10_000
    seed: int = 0
    output: str | None = None
    format: str = "json"
    search: dict | None = None
    sweep: dict | None = None

    @property
    def grid_spec(self) -> GridSpec:
        return GridSpec(n_points=self.grid, n_random=self.n_random, seed=self.seed)

    def oracle_config(self) -> OracleConfig:
        return OracleConfig(TheoremId(self.target), self.f, self.interval, self.g, self.h, self.alpha, self.p,
                            self.tol)

    def to_dict(self) -> dict:
        d = {}
        for fl in fields(self):
            v = getattr(self, fl.name)
            if v is None:
                continue
            if isinstance(v, (FunctionChoice, WeightChoice)):
                v = v.to_dict()
            elif isinstance(v, tuple):
                v = list(v)
            d[_camel(fl.name)] = v
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _camel(name: str) -> str:
    head, *rest = name.split("_")
    return head + "".join(w.title() for w in rest)


def _number(doc: dict, key: str, cast=float, default=None):
    if key not in doc or doc[key] is None:
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(key, "expected a number")
    if cast is int and float(v) != int(v):
        raise ValidationError(key, "expected an integer")
    return cast(v)


def _params(doc: dict, key: str) -> tuple[float, ...]:
    raw = doc.get("params", [])
    if not isinstance(raw, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
        raise ValidationError(f"{key}.params", "expected a list of numbers")
    return tuple(float(v) for v in raw)


def _function(doc, key: str) -> FunctionChoice | None:
    if doc is None:
        return None
    if not isinstance(doc, dict):
        raise ValidationError(key, "expected an object")
    if doc.get("family") not in FUNCTION_FAMILIES:
        raise ValidationError("family", f"unknown function family {doc.get('family')!r}")
    return FunctionChoice(doc["family"], _params(doc, key))


def _weight(doc, key: str = "h") -> WeightChoice | None:
    if doc is None:
        return None
    if not isinstance(doc, dict):
        raise ValidationError(key, "expected an object")
    if doc.get("family") not in WEIGHT_FAMILIES:
        raise ValidationError("family", f"unknown weight family {doc.get('family')!r}")
    return WeightChoice(doc["family"], _params(doc, key), _number(doc, "clipEpsilon", default=1e-3))


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run document, filling defaults.

    Raises:
        ParseError: malformed JSON, with line and column.
        ValidationError: a field is missing or invalid; ``.field`` names it.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ValidationError("document", "top level must be an object")

    command = doc.get("command")
    if command not in COMMANDS:
        raise ValidationError("command", f"expected one of {COMMANDS}")
    target = doc.get("target")
    valid_targets = CLASS_PREDICATES if command == "checkClass" else [t.value for t in TheoremId]
    if target not in valid_targets:
        raise ValidationError("target", f"unknown target {target!r} for {command}")

    interval = doc.get("interval")
    if interval is not None:
        if not (isinstance(interval, list) and len(interval) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in interval)
                and interval[0] < interval[1]):
            raise ValidationError("interval", "expected [lo, hi] with lo < hi")
        interval = (float(interval[0]), float(interval[1]))

    fmt = doc.get("format", "json")
    if fmt not in FORMATS:
        raise ValidationError("format", f"expected one of {FORMATS}")
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ValidationError("output", "expected a path string")

    cfg = RunConfig(
        command=command,
        target=target,
        f=_function(doc.get("f"), "f"),
        g=_function(doc.get("g"), "g"),
        h=_weight(doc.get("h")),
        interval=interval,
        alpha=_number(doc, "alpha"),
        p=_number(doc, "p"),
        s=_number(doc, "s"),
        tol=_number(doc, "tol", default=1e-9),
        grid=_number(doc, "grid", int, 33),
        n_random=_number(doc, "nRandom", int, 10_000),
        seed=_number(doc, "seed", int, 0),
        output=output,
        format=fmt,
        search=doc.get("search"),
        sweep=doc.get("sweep"),
    )
    if not cfg.tol > 0:
        raise ValidationError("tol", "must be positive")
    if cfg.grid < 2:
        raise ValidationError("grid", "need at least 2 points per axis")
    if cfg.n_random < 0:
        raise ValidationError("nRandom", "must be nonnegative")
    _validate_inputs(cfg)
    return cfg


def _validate_inputs(cfg: RunConfig) -> None:
    if cfg.command == "checkClass":
        needs = set()
        if cfg.target in _FUNCTION_CLASSES:
            needs |= {"f", "interval"}
        if cfg.target in _WEIGHT_ARG:
            needs.add("h")
        if cfg.target in _S_ARG:
            needs.add("s")
    elif cfg.command == "search":
        if not isinstance(cfg.search, dict):
            raise ValidationError("search", "search command needs a 'search' object")
        _search_space(cfg)
        return
    else:
        needs = set(THEOREM_INPUTS[TheoremId(cfg.target)]) | {"interval"}
        needs.discard("positive")
        needs = {"alpha" if n == "young" else "p" if n == "holder" else n for n in needs}
        if cfg.command == "sweep" and not isinstance(cfg.sweep, dict):
            raise ValidationError("sweep", "sweep command needs a 'sweep' object")
    for name in sorted(needs):
        if getattr(cfg, name) is None:
            raise ValidationError(name, f"required for {cfg.command} {cfg.target}")
    try:
        iv = Interval(*cfg.interval) if cfg.interval else None
        for choice in (cfg.f, cfg.g):
            if choice is not None and iv is not None:
                make_function(choice.family, choice.params, iv)
        if cfg.h is not None:
            make_weight(cfg.h.family, cfg.h.params, cfg.h.clip_epsilon)
    except IneqForgeError as exc:
        raise ValidationError("params", str(exc)) from None


def _pair(doc: dict, key: str, default):
    v = doc.get(key, default)
    if not (isinstance(v, list) or isinstance(v, tuple)) or len(v) != 2:
        raise ValidationError(f"search.{key}", "expected [lo, hi]")
    return (float(v[0]), float(v[1]))


def _search_space(cfg: RunConfig) -> SearchSpace:
    doc = cfg.search

    def families(key, allowed, default=None):
        raw = doc.get(key, default)
        if not isinstance(raw, list) or not raw:
            raise ValidationError(f"search.{key}", "expected a nonempty list")
        out = []
        for item in raw:
            if not isinstance(item, dict) or item.get("family") not in allowed:
                raise ValidationError("family", f"unknown family in search.{key}")
            ranges = tuple(_pair({"r": r}, "r", None) for r in item.get("ranges", []))
            out.append(FamilyRange(item["family"], ranges, float(item.get("clipEpsilon", 1e-3))))
        return tuple(out)

    try:
        return SearchSpace(
            theorem_id=TheoremId(cfg.target),
            function_families=families("functionFamilies", FUNCTION_FAMILIES),
            weight_families=families("weightFamilies", WEIGHT_FAMILIES, [{"family": "identity"}]),
            interval_range=_pair(doc, "intervalRange", [0.0, 1.0]),
            min_width=float(doc.get("minWidth", 0.05)),
            fixed_interval=bool(doc.get("fixedInterval", False)),
            alpha_range=_pair(doc, "alphaRange", [0.05, 0.95]),
            p_range=_pair(doc, "pRange", [1.1, 4.0]),
            budget=int(doc.get("budget", 1000)),
            seed=cfg.seed,
            tol=cfg.tol,
        )
    except ValidationError:
        raise
    except IneqForgeError as exc:
        raise ValidationError("search", str(exc)) from None


# --- execution -------------------------------------------------------------


@dataclass
class SearchOutcome:
    result: SearchResult
    replay: InequalityReport


@dataclass
class SweepOutcome:
    axis: str
    row: SweepRow
    extras: dict = field(default_factory=dict)


def execute(cfg: RunConfig) -> list:
    """Run the configured command and return its report entries."""
    grid = cfg.grid_spec
    if cfg.command == "checkClass":
        pred = CLASS_PREDICATES[cfg.target]
        args = []
        if cfg.target in _FUNCTION_CLASSES:
            args.append(make_function(cfg.f.family, cfg.f.params, Interval(*cfg.interval)))
        if cfg.target in _WEIGHT_ARG:
            args.append(make_weight(cfg.h.family, cfg.h.params, cfg.h.clip_epsilon))
        if cfg.target in _S_ARG:
            args.append(cfg.s)
        if cfg.target == "monotone":
            return [pred(*args)]
        return [pred(*args, grid)]
    if cfg.command == "checkTheorem":
        oc = cfg.oracle_config()
        return run_oracle(oc.theorem_id, tol=oc.tol, grid=grid, **oc.build())
    if cfg.command == "search":
        result = search_violation(_search_space(cfg))
        return [SearchOutcome(result, replay(result, grid=grid))]
    sw = cfg.sweep
    axis = sw.get("axis")
    try:
        if "values" in sw:
            rows = sweep_margin(cfg.target, cfg.oracle_config(), axis, sw["values"], grid=grid)
        else:
            lo, hi = sw["range"]
            rows = sweep_margin(cfg.target, cfg.oracle_config(), axis, lo=lo, hi=hi, grid_n=int(sw.get("n", 10)),
                                grid=grid)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, IneqForgeError):
            raise
        raise ValidationError("sweep", "expected {axis, values} or {axis, range: [lo, hi], n}") from None
    return [SweepOutcome(axis, r) for r in rows]


def _status_of(entry) -> str:
    if isinstance(entry, ClassVerdict):
        return "violated" if entry.status is Status.VIOLATED else "ok"
    if isinstance(entry, SearchOutcome):
        report = entry.replay
    elif isinstance(entry, SweepOutcome):
        report = entry.row.report
    else:
        report = entry
    return {Verdict.HOLDS: "ok", Verdict.VIOLATED: "violated", Verdict.HYPOTHESIS_FAILED: "hypothesis"}[report.verdict]


def exit_code(entries) -> int:
    statuses = {_status_of(e) for e in entries}
    if "violated" in statuses:
        return EXIT_VIOLATED
    if "hypothesis" in statuses:
        return EXIT_HYPOTHESIS
    return EXIT_OK


# --- reports ---------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return v
    try:
        x = float(v)
    except (TypeError, ValueError):
        return str(v)
    return x if math.isfinite(x) else repr(x)


def _entry_dict(entry) -> dict:
    if isinstance(entry, SearchOutcome):
        return {"search": entry.result.to_dict(), "replay": entry.replay.to_dict()}
    if isinstance(entry, SweepOutcome):
        return dict(entry.row.report.to_dict(), sweep={"axis": entry.axis, "value": entry.row.value})
    return entry.to_dict()


def _g9(v) -> str:
    return "" if v is None else f"{float(v):.9g}"


def _entry_row(entry) -> dict:
    if isinstance(entry, ClassVerdict):
        w = entry.witness or {}
        return {"id": entry.predicate, "verdict": entry.status.value, "lhs": _g9(w.get("lhs")),
                "rhs": _g9(w.get("rhs")), "margin": _g9(-entry.max_violation), "quadError": _g9(0.0),
                "hypothesisSummary": ""}
    if isinstance(entry, SearchOutcome):
        r = entry.replay
        row = _entry_row(r)
        row["id"] = f"search:{r.label}"
        return row
    if isinstance(entry, SweepOutcome):
        row = _entry_row(entry.row.report)
        row["paramValue"] = _g9(entry.row.value)
        return row
    return {"id": entry.label, "verdict": entry.verdict.value, "lhs": _g9(entry.lhs), "rhs": _g9(entry.rhs),
            "margin": _g9(entry.margin), "quadError": _g9(entry.quad_error),
            "hypothesisSummary": entry.hypothesis_summary()}


def render_report(entries, fmt: str) -> str:
    if not entries:
        raise EmptyReport("no report entries to emit")
    if fmt == "json":
        return json.dumps(_jsonable([_entry_dict(e) for e in entries]), indent=2) + "\n"
    if fmt != "csv":
        raise ValidationError("format", f"expected one of {FORMATS}")
    rows = [_entry_row(e) for e in entries]
    columns = CSV_COLUMNS + (["paramValue"] if any("paramValue" in r for r in rows) else [])
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def emit_report(entries, fmt: str, path: str | os.PathLike | None) -> None:
    """Write the rendered report to ``path`` atomically, or to stdout for ``None``/"-"."""
    text = render_report(entries, fmt)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(cfg: RunConfig) -> int:
    """Execute ``cfg``, write its report and return the exit status."""
    entries = execute(cfg)
    emit_report(entries, cfg.format, cfg.output)
    return exit_code(entries)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ineqforge", description="Verify and search for violations of "
                                 "generalized-convexity Hermite-Hadamard-type inequalities.")
    ap.add_argument("--config", required=True, help="JSON run document ('-' for stdin)")
    ap.add_argument("--output", help="report path (default: config 'output', else stdout)")
    ap.add_argument("--format", choices=FORMATS, help="report format (overrides config)")
    ap.add_argument("--seed", type=int, help=f"random seed (overrides config and ${SEED_ENV})")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = sys.stdin.read() if args.config == "-" else Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"ineqforge: cannot read config: {exc}", file=sys.stderr)
        return EXIT_ERROR
    seed = args.seed
    if seed is None and os.environ.get(SEED_ENV):
        try:
            seed = int(os.environ[SEED_ENV])
        except ValueError:
            print(f"ineqforge: ${SEED_ENV} must be an integer", file=sys.stderr)
            return EXIT_ERROR
    try:
        cfg = parse_config(text)
        overrides = {k: v for k, v in (("output", args.output), ("format", args.format), ("seed", seed))
                     if v is not None}
        if overrides:
            cfg = replace(cfg, **overrides)
        return run(cfg)
    except OSError as exc:
        print(f"ineqforge: I/O error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except IneqForgeError as exc:
        print(f"ineqforge: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Canned experiments that replay the main covering results at desk scale.

A spec is a list of independent cells. Each cell builds one grid, runs the
computations it asks for and yields one :class:`ResultRow`. Checks are pure
functions of the rows, so a saved results file can be re-checked later.
"""
from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Any, Optional

from . import certificates as certs
from .constructions import (
    construct_biregular,
    construct_square_threehalves,
    construct_standard,
    construct_wide,
    verify_cover,
)
from .errors import BudgetExceeded, GridCoverError
from .geometry import LineFamily, enumerate_lines, restricted_lines
from .grid import Grid, delta_genericity, generic_grid, named_grid, rectangular_grid, standard_grid
from .optimize import CoverInstance, phi, reference_bounds, solve_ilp

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "experiment", "kind", "n", "m", "seed", "k", "family", "phi", "ilp", "ilp_status",
    "cert_name", "cert_total", "constr_name", "constr_size", "trivial_lb", "trivial_ub",
    "ball_serra",
)


@dataclass(frozen=True)
class Cell:
    kind: str  # standard | rect | exponential | quadratic | generic
    n: int
    m: int
    k: int = 1
    seed: Optional[int] = None
    family: str = "full"
    want_phi: bool = True
    want_ilp: bool = False
    cert: Optional[str] = None
    constr: Optional[str] = None
    audit: bool = False


@dataclass(frozen=True)
class ExperimentSpec:
    id: str
    title: str
    cells: tuple[Cell, ...]
    budget_secs: float = 60.0
    node_limit: int = 10**6

    def __post_init__(self):
        if self.budget_secs <= 0 or self.node_limit <= 0:
            raise ValueError("budgets must be positive")


@dataclass
class ResultRow:
    experiment: str
    kind: str
    n: int
    m: int
    seed: Optional[int]
    k: int
    family: str
    phi: Optional[Fraction] = None
    ilp: Optional[int] = None
    ilp_status: str = "skipped"
    cert_name: Optional[str] = None
    cert_total: Optional[Fraction] = None
    constr_name: Optional[str] = None
    constr_size: Optional[int] = None
    trivial_lb: Optional[int] = None
    trivial_ub: Optional[int] = None
    ball_serra: Optional[int] = None
    extra: dict[str, Any] = field(default_factory=dict)


def build_grid(cell: Cell) -> Grid:
    if cell.kind == "standard":
        return standard_grid(cell.n)
    if cell.kind == "rect":
        return rectangular_grid(cell.n, cell.m)
    if cell.kind in ("exponential", "quadratic"):
        return named_grid(cell.kind, cell.n)
    if cell.kind == "generic":
        return generic_grid(cell.n, cell.m, cell.seed or 0)
    raise ValueError(f"unknown grid kind {cell.kind!r}")


def _family(g: Grid, which: str) -> LineFamily:
    return restricted_lines(g) if which == "restricted" else enumerate_lines(g)


def _build_construction(name: str, g: Grid, k: int):
    if name == "wide":
        return construct_wide(g, k)
    if name == "biregular":
        return construct_biregular(g, k)
    if name == "threehalves":
        return construct_square_threehalves(g, k)
    if name == "standard":
        return construct_standard(g.n, k)
    raise ValueError(f"unknown construction {name!r}")


def _best_warm_start(g: Grid, fam: LineFamily, k: int):
    """Smallest applicable construction whose lines all lie in ``fam``."""
    best = None
    for name in ("wide", "biregular", "threehalves", "standard"):
        if name == "standard" and not g.is_standard:
            continue
        try:
            c = _build_construction(name, g, k)
        except GridCoverError:
            continue
        if all(line in fam for line in c.entries) and (best is None or c.size < best.size):
            best = c
    return best


def _certificate(name: str, g: Grid):
    if name == "generic":
        return certs.weight_generic(g)
    if name == "square-claim":
        return certs.weight_square_claim(g)
    if name == "delta":
        return certs.weight_delta_generic(g, delta_genericity(g))
    if name == "standard":
        return certs.weight_standard(g.n, g)
    if name == "restricted":
        return certs.weight_restricted(g.n, g=g).weighting
    raise ValueError(f"unknown certificate {name!r}")


def run_cell(exp_id: str, cell: Cell, budget_secs: float, node_limit: int) -> ResultRow:
    g = build_grid(cell)
    rb = reference_bounds(g, cell.k)
    row = ResultRow(
        exp_id, cell.kind, g.n, g.m, cell.seed, cell.k, cell.family,
        trivial_lb=rb.trivial_lower, trivial_ub=rb.trivial_upper, ball_serra=rb.ball_serra,
    )
    need_family = cell.want_phi or cell.want_ilp or cell.cert or cell.audit
    fam = _family(g, cell.family) if need_family else None
    inst = CoverInstance(g, fam, cell.k) if fam is not None else None
    started = time.monotonic()

    if cell.want_phi:
        row.phi = phi(inst)
    if cell.constr:
        c = _build_construction(cell.constr, g, cell.k)
        if not verify_cover(g, c).valid:
            raise AssertionError(f"{cell.constr} construction is not a {cell.k}-cover")
        row.constr_name, row.constr_size = cell.constr, c.size
    if cell.cert:
        w = _certificate(cell.cert, g)
        check = certs.verify_weighting(g, fam, w)
        row.cert_name, row.cert_total = cell.cert, w.total
        row.extra["cert_feasible"] = check.feasible
        if cell.audit:
            report = certs.audit_weighting(g, w, fam if cell.family == "full" else None)
            row.extra["violations"] = len(report.check.violations)
            row.extra["violating_slopes"] = report.violating_slopes
            row.extra["y_eq_x_plus_1_violates"] = any(
                line.a == -1 and line.b == 1 for line, _ in report.check.violations
            )
    if cell.kind in ("exponential", "quadratic", "generic"):
        row.extra["delta"] = delta_genericity(g)
    if cell.want_ilp:
        remaining = max(budget_secs - (time.monotonic() - started), 1.0)
        res = solve_ilp(
            inst,
            warm_start=_best_warm_start(g, fam, cell.k),
            node_limit=node_limit,
            time_limit=remaining,
        )
        row.ilp, row.ilp_status = res.optimum, res.status
        row.extra["nodes"] = res.nodes_explored
        if not res.optimal:
            row.extra["ilp_lower_bound"] = res.lower_bound
    row.extra["seconds"] = round(time.monotonic() - started, 3)
    return row


def _run_one(args) -> ResultRow:
    exp_id, cell, budget, nodes = args
    try:
        return run_cell(exp_id, cell, budget, nodes)
    except (GridCoverError, AssertionError, ValueError) as exc:
        row = ResultRow(exp_id, cell.kind, cell.n, cell.m, cell.seed, cell.k, cell.family)
        row.ilp_status = "error"
        row.extra["error"] = f"{type(exc).__name__}: {exc}"
        return row


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> list[ResultRow]:
    """Rows in cell order; a failing or timed-out cell is recorded, not raised."""
    work = [(spec.id, c, spec.budget_secs, spec.node_limit) for c in spec.cells]
    if jobs <= 1:
        return [_run_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, work))


# -- the canned suite ---------------------------------------------------------


def _e1() -> tuple[Cell, ...]:
    cells = []
    for m in range(2, 5):
        for k in range(1, 5):
            base = (k - 1) * (m - 1) + 1
            for n in (base, base + 1):
                if n >= 2:
                    cells.append(Cell("rect", n, m, k, want_ilp=True, constr="wide"))
    return tuple(cells)


def _e2() -> tuple[Cell, ...]:
    cells = []
    for n in range(2, 7):
        for m in range(2, n + 1):
            k = (n + m - 2) // gcd(n - 1, m - 1)
            cells.append(
                Cell("generic", n, m, k, seed=1000 * n + m, want_ilp=True, cert="generic", constr="biregular")
            )
    return tuple(cells)


def _e3() -> tuple[Cell, ...]:
    cells = []
    for kind in ("standard", "exponential", "quadratic", "generic"):
        for n in (3, 4):
            for k in (1, 2, 3):
                seed = 7 if kind == "generic" else None
                cells.append(Cell(kind, n, n, k, seed=seed, want_ilp=True))
    return tuple(cells)


def _e4() -> tuple[Cell, ...]:
    cells = [Cell("standard", n, n, 1, cert="standard", constr="standard") for n in range(2, 9)]
    for n in range(2, 7):
        for k in range(1, 5):
            for fam in ("full", "restricted"):
                cells.append(
                    Cell("standard", n, n, k, family=fam, want_ilp=True, cert="standard", constr="standard")
                )
    return tuple(cells)


def _e5() -> tuple[Cell, ...]:
    return tuple(
        Cell(kind, n, n, 1, cert="delta", constr="threehalves")
        for kind in ("exponential", "quadratic")
        for n in range(3, 8)
    )


def _e6() -> tuple[Cell, ...]:
    return tuple(
        Cell("standard", n, n, 1, want_phi=False, cert="restricted", audit=True)
        for n in (5, 10, 13, 17, 20, 23, 27, 30, 31, 40)
    )


def experiment_suite() -> list[ExperimentSpec]:
    return [
        ExperimentSpec("E1", "wide-grid tightness", _e1()),
        ExperimentSpec("E2", "generic tightness", _e2()),
        ExperimentSpec("E3", "axis-bound gap", _e3()),
        ExperimentSpec("E4", "standard-grid bounds", _e4()),
        ExperimentSpec("E5", "delta-generic grids", _e5()),
        ExperimentSpec("E6", "slope-1 audit", _e6()),
    ]


def get_experiment(exp_id: str) -> ExperimentSpec:
    for spec in experiment_suite():
        if spec.id == exp_id.upper():
            return spec
    raise ValueError(f"unknown experiment {exp_id!r}")


# -- checks -----------------------------------------------------------------


def check_rows(rows: list[ResultRow]) -> list[str]:
    """Assertions of the suite; returns one message per failure."""
    failures = []
    pairs: dict[tuple, dict[str, ResultRow]] = {}
    for r in rows:
        tag = f"{r.experiment} {r.kind} {r.n}x{r.m} k={r.k} {r.family}"
        if r.ilp_status == "error":
            failures.append(f"{tag}: {r.extra.get('error')}")
            continue
        done = r.ilp_status == "optimal"
        if r.experiment == "E1" and done and r.ilp != r.k * (r.n - 1) + (r.m - 1):
            failures.append(f"{tag}: ilp {r.ilp} != k(n-1)+(m-1)")
        if r.experiment == "E2":
            want_phi = (r.n - 1) + Fraction((r.m - 1) ** 2, r.n + r.m - 2)
            if r.phi != want_phi:
                failures.append(f"{tag}: phi {r.phi} != {want_phi}")
            if done and (r.ilp != r.k * r.phi or r.constr_size != r.ilp):
                failures.append(f"{tag}: ilp {r.ilp}, k*phi {r.k * r.phi}, biregular {r.constr_size}")
        if r.experiment == "E4" and r.cert_total is not None and done:
            if not r.k * r.cert_total <= r.ilp <= r.constr_size:
                failures.append(f"{tag}: sandwich {r.k * r.cert_total} <= {r.ilp} <= {r.constr_size} fails")
            pairs.setdefault((r.n, r.k), {})[r.family] = r
        if r.cert_total is not None and r.extra.get("cert_feasible") is False and r.experiment != "E6":
            failures.append(f"{tag}: {r.cert_name} weighting infeasible")
        if r.cert_total is not None and r.phi is not None and r.extra.get("cert_feasible"):
            if r.cert_total > r.phi:
                failures.append(f"{tag}: certificate {r.cert_total} exceeds phi {r.phi}")
        if r.ilp is not None and done and r.phi is not None and r.ilp < r.k * r.phi:
            failures.append(f"{tag}: ilp below k*phi")
    for (n, k), fams in pairs.items():
        if "full" in fams and "restricted" in fams and fams["full"].ilp != fams["restricted"].ilp:
            failures.append(f"E4 n={n} k={k}: full {fams['full'].ilp} != restricted {fams['restricted'].ilp}")
    return failures


# -- exhaustive oracle ----------------------------------------------------------


def oracle_exhaustive_cov(
    g: Grid, fam: LineFamily, k: int, size_cap: int, node_budget: int = 5 * 10**6
) -> Optional[int]:
    """Minimum k-cover size over ``fam`` by plain enumeration, or None above the cap.

    Lines are decided in index order with multiplicities 0..k. A point must be
    fully covered once its last incident line has been decided, and the
    current total plus the largest remaining deficit must stay within the best
    size found. Shares nothing with the LP code.
    """
    npts = len(fam.points)
    nl = len(fam.lines)
    last_line = [-1] * npts
    for j, inc in enumerate(fam.incidence):
        for p in inc:
            last_line[p] = max(last_line[p], j)
    if any(v < 0 for v in last_line):
        return None
    closing = [[] for _ in range(nl)]
    for p, j in enumerate(last_line):
        closing[j].append(p)

    deficit = [k] * npts
    best = size_cap + 1
    nodes = 0

    def dfs(j: int, used: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded(f"oracle explored more than {node_budget} nodes")
        if used + max(0, max(deficit)) >= best:
            return
        if j == nl:
            best = used  # closing constraints left no positive deficit
            return
        inc = fam.incidence[j]
        need = max([0] + [deficit[p] for p in closing[j]])
        for mult in range(k, need - 1, -1):
            if used + mult >= best:
                continue
            for p in inc:
                deficit[p] -= mult
            dfs(j + 1, used + mult)
            for p in inc:
                deficit[p] += mult

    dfs(0, 0)
    return best if best <= size_cap else None


# -- persistence ----------------------------------------------------------------


def _cell_text(v) -> str:
    if v is None:
        return ""
    return str(v)


def _row_json(r: ResultRow) -> dict:
    out = {c: getattr(r, c) for c in CSV_COLUMNS}
    for key in ("phi", "cert_total"):
        if out[key] is not None:
            out[key] = str(out[key])
    out["extra"] = r.extra
    return out


_INT_COLS = {"n", "m", "seed", "k", "ilp", "constr_size", "trivial_lb", "trivial_ub", "ball_serra"}
_FRAC_COLS = {"phi", "cert_total"}


def _parse_value(col: str, v):
    if v is None or v == "":
        return None
    if col in _INT_COLS:
        return int(v)
    if col in _FRAC_COLS:
        return Fraction(v)
    return v


def export_results(rows: list[ResultRow], fmt: str, path) -> None:
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for r in rows:
                w.writerow([_cell_text(getattr(r, c)) for c in CSV_COLUMNS])
    elif fmt == "json":
        path.write_text(json.dumps([_row_json(r) for r in rows], indent=1), encoding="utf-8")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def load_results(path) -> list[ResultRow]:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        out = []
        for d in json.loads(text):
            extra = d.pop("extra", {})
            out.append(ResultRow(**{c: _parse_value(c, d.get(c)) for c in CSV_COLUMNS}, extra=extra))
        return out
    reader = csv.DictReader(text.splitlines())
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError("unexpected CSV header")
    return [ResultRow(**{c: _parse_value(c, d[c]) for c in CSV_COLUMNS}) for d in reader]

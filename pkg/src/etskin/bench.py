"""IK comparison campaigns over randomly generated reachable poses.

Problem ``i`` of a campaign is generated from ``SeedSequence([seed, i])``:
a uniform configuration within joint limits gives the goal pose, and the
same stream supplies the solver seed. Problems are therefore independent of
evaluation order and worker count, and every method sees identical problems
and identical restart configurations.
"""

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from etskin.ik import IKOptions, solve
from etskin.model import fkine, load_model

COLUMNS = (
    "method",
    "searches_allowed",
    "iter_allowed",
    "mean_iter",
    "median_iter",
    "infeasible_count",
    "infeasible_pct",
    "mean_searches",
    "max_searches",
)

# stop tolerance on E for campaigns; reproduces the all-zero restart block
BENCH_TOL = 1e-6

STANDARD_METHODS = (
    "NR",
    "GN",
    "NR-pinv",
    "GN-pinv",
    "LM-Wampler:1e-4",
    "LM-Wampler:1e-6",
    "LM-Chan:1.0",
    "LM-Chan:0.1",
    "LM-Sugihara:1e-3",
    "LM-Sugihara:1e-4",
)
STANDARD_BUDGETS = ((1, 500), (100, 30))


@dataclass
class BenchRow:
    method: str
    searches_allowed: int
    iter_allowed: int
    mean_iter: float
    median_iter: float
    infeasible_count: int
    infeasible_pct: float
    mean_searches: float
    max_searches: float


@dataclass
class BenchReport:
    model: str
    problems: int
    seed: int
    tol: float
    rows: list = field(default_factory=list)

    def row(self, method, searches=None):
        """Row for ``method`` (any spelling of its parameter) and search budget."""
        method = IKOptions.from_spec(method).label
        for r in self.rows:
            if r.method == method and (searches is None or r.searches_allowed == searches):
                return r
        raise KeyError(method)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
        return buf.getvalue()

    def to_json(self):
        doc = {
            "model": self.model,
            "problems": self.problems,
            "seed": self.seed,
            "tol": self.tol,
            "columns": list(COLUMNS),
            "rows": [{k: _json_num(v) for k, v in asdict(r).items()} for r in self.rows],
        }
        return json.dumps(doc, indent=2) + "\n"


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _json_num(v):
    if isinstance(v, float) and not np.isfinite(v):
        return None
    return v


def make_problem(ets, seed, index):
    """Goal pose and solver seed for problem ``index`` of a campaign."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    q = ets.random_q(rng)
    return fkine(ets, q), int(rng.integers(2**63))


def summarize(method, searches, iters, outcomes, problems):
    """Campaign statistics; iteration and search figures cover solved problems."""
    solved = [(it, s) for ok, it, s in outcomes if ok]
    fails = problems - len(solved)
    its = np.array([it for it, _ in solved], dtype=float)
    ss = np.array([s for _, s in solved], dtype=float)
    nan = float("nan")
    return BenchRow(
        method=method,
        searches_allowed=searches,
        iter_allowed=iters,
        mean_iter=float(its.mean()) if its.size else nan,
        median_iter=float(np.median(its)) if its.size else nan,
        infeasible_count=fails,
        infeasible_pct=100.0 * fails / problems,
        mean_searches=float(ss.mean()) if ss.size else nan,
        max_searches=float(ss.max()) if ss.size else nan,
    )


def _run_chunk(args):
    ets, specs, budgets, seed, tol, indices = args
    out = []
    for i in indices:
        goal, solver_seed = make_problem(ets, seed, i)
        per = []
        for spec in specs:
            for searches, iters in budgets:
                opts = IKOptions.from_spec(spec, max_searches=searches, max_iterations=iters,
                                           seed=solver_seed, tol=tol)
                r = solve(ets, goal, opts)
                per.append((r.success, r.iterations, r.searches))
        out.append(per)
    return out


def run_campaign(model, methods=STANDARD_METHODS, problems=1000, budgets=((1, 500),),
                 seed=0, tol=BENCH_TOL, workers=1):
    """Run every method under every ``(searches, iterations)`` budget.

    Rows come out grouped by budget, in the order of ``methods``.
    """
    ets = load_model(model)
    specs = [IKOptions.from_spec(m).label for m in methods]
    budgets = tuple((int(s), int(i)) for s, i in budgets)
    if problems < 1:
        raise ValueError("problems must be at least 1")
    if workers <= 1:
        results = _run_chunk((ets, specs, budgets, seed, tol, range(problems)))
    else:
        chunks = [range(k, problems, workers) for k in range(workers)]
        results = [None] * problems
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk, res in zip(chunks, pool.map(_run_chunk, [(ets, specs, budgets, seed, tol, c) for c in chunks])):
                for i, r in zip(chunk, res):
                    results[i] = r
    report = BenchReport(ets.name, problems, seed, tol)
    col = 0
    cells = {}
    for spec in specs:
        for b in budgets:
            cells[(spec, b)] = col
            col += 1
    for b in budgets:
        for spec in specs:
            c = cells[(spec, b)]
            report.rows.append(summarize(spec, b[0], b[1], [r[c] for r in results], problems))
    return report

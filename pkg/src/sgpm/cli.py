"""Command-line front end: ``telegraph solve|sweep|quadrature|nodes``.

Exit codes: 0 success, 2 usage error, 3 parse error, 4 numeric failure.
Failures print a JSON object ``{"error": {...}}`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from sgpm import problems
from sgpm.analysis import convergence_sweep, error_norms, fit_slope, timed_solve
from sgpm.expr import ExpressionError, parse_expression
from sgpm.gegenbauer import gauss_nodes, shift_nodeset
from sgpm.quadrature import build_optimal_smatrix, build_smatrix
from sgpm.telegraph import TelegraphProblem

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 2, 3, 4
CSV_COLUMNS = ["N", "Mt", "L_plus_1", "l1", "l2", "linf", "Linf", "rms", "seconds"]
NORM_KEYS = ["l1", "l2", "linf", "Linf", "rms"]
PROBLEM_KEYS = ("name", "beta1", "beta2", "l", "tau", "f", "g1", "g2", "h1", "h2", "exact")
_REQUIRED = ("beta1", "beta2", "f", "g1", "g2", "h1", "h2")


class UsageError(ValueError):
    pass


class ProblemFileError(ValueError):
    def __init__(self, message: str, line: int | None = None, offset: int | None = None, key: str | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.offset = offset
        self.key = key


@dataclass(frozen=True)
class ProblemSpec:
    """A registry example, or a custom problem whose fields are expression strings."""

    example: int | None = None
    custom: dict | None = None

    def __post_init__(self):
        if (self.example is None) == (self.custom is None):
            raise UsageError("a problem is either a registry example or a custom block")
        if self.example is not None and self.example not in problems.EXAMPLES:
            raise UsageError(f"unknown example {self.example}; choose from {sorted(problems.EXAMPLES)}")

    @property
    def problem_id(self) -> str:
        if self.example is not None:
            return f"example{self.example}"
        return self.custom.get("name", "custom")

    def build(self) -> TelegraphProblem:
        if self.example is not None:
            return problems.get_example(self.example)
        return build_custom(self.custom)

    def to_dict(self) -> dict:
        if self.example is not None:
            return {"example": self.example}
        return {"custom": dict(self.custom)}

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemSpec":
        if "example" in data:
            return cls(example=int(data["example"]))
        return cls(custom={str(k): str(v) for k, v in data["custom"].items()})


@dataclass(frozen=True)
class RunConfig:
    nx: int = 4
    nt: int = 4
    mt: int | None = None
    alpha: float = 0.0
    out: str | None = None
    format: str = "table"
    lattice: int = 100
    seed: int | None = None

    def __post_init__(self):
        if self.nx < 1 or self.nt < 1:
            raise UsageError("grid sizes must be at least 1")
        if self.mt is not None and self.mt < 1:
            raise UsageError("M_t must be at least 1")
        if not (self.alpha > -0.5 and math.isfinite(self.alpha)):
            raise UsageError(f"alpha must exceed -1/2, got {self.alpha}")
        if self.format not in ("table", "csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.lattice < 2:
            raise UsageError("lattice needs at least 2 points")

    @property
    def mt_value(self) -> int:
        return self.nt if self.mt is None else self.mt

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


def parse_problem_text(text: str, name: str = "custom") -> dict:
    """Read ``key = value`` lines into a custom problem block.

    Blank lines and lines starting with ``#`` are skipped.  Every value is kept
    as its source string and validated by :func:`build_custom`.
    """
    block: dict[str, str] = {"name": name}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ProblemFileError("expected 'key = value'", lineno)
        if key not in PROBLEM_KEYS:
            raise ProblemFileError(f"unknown key {key!r}", lineno)
        if key in block and key != "name":
            raise ProblemFileError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ProblemFileError(f"empty value for {key!r}", lineno)
        block[key] = value
        lines[key] = lineno
    missing = [k for k in _REQUIRED if k not in block]
    if missing:
        raise ProblemFileError(f"missing keys: {', '.join(missing)}")
    try:
        build_custom(block)
    except ProblemFileError as exc:
        raise ProblemFileError(exc.message, lines.get(exc.key), exc.offset, exc.key) from exc
    return block


def _field(block: dict, key: str):
    try:
        return parse_expression(block[key])
    except ExpressionError as exc:
        raise ProblemFileError(f"{key}: {exc.reason} at byte {exc.offset}", offset=exc.offset, key=key) from exc


def build_custom(block: dict) -> TelegraphProblem:
    def pick(key, use):
        try:
            return use(_field(block, key))
        except ExpressionError as exc:
            raise ProblemFileError(f"{key}: {exc.reason} at byte {exc.offset}", offset=exc.offset, key=key) from exc

    exact = None
    if "exact" in block:
        fn = _field(block, "exact")
        exact = fn.__call__
    f = _field(block, "f")
    return TelegraphProblem(
        beta1=pick("beta1", lambda e: e.constant()),
        beta2=pick("beta2", lambda e: e.constant()),
        f=f.__call__,
        g1=pick("g1", lambda e: e.of_x()),
        g2=pick("g2", lambda e: e.of_x()),
        h1=pick("h1", lambda e: e.of_t()),
        h2=pick("h2", lambda e: e.of_t()),
        l=pick("l", lambda e: e.constant()) if "l" in block else 1.0,
        tau=pick("tau", lambda e: e.constant()) if "tau" in block else 1.0,
        name=block.get("name", "custom"),
        exact=exact,
    )


def load_problem_file(path: str) -> ProblemSpec:
    text = Path(path).read_text(encoding="utf-8")
    return ProblemSpec(custom=parse_problem_text(text, name=Path(path).stem))


def _float(v: float | None):
    return None if v is None or not math.isfinite(v) else float(v)


def run_solve(spec: ProblemSpec, config: RunConfig) -> dict:
    """Solve once and return the JSON payload."""
    problem = spec.build()
    field_, _ = timed_solve(problem, config.nx, config.mt_value, config.alpha, nt=config.nt)
    report = error_norms(problem.exact, field_, config.lattice) if problem.exact is not None else None
    return {
        "config": config.to_dict(),
        "problem_id": spec.problem_id,
        "problem": spec.to_dict(),
        "norms": report.as_dict() if report else {k: None for k in NORM_KEYS},
        "timings": {k: field_.timings[k] for k in ("assemble_s", "solve_s", "total_s")},
        "L_plus_1": field_.disc.size,
        "alpha_stars": [float(a) for a in field_.disc.opt1.alphas],
    }


def run_sweep(spec: ProblemSpec, ns: list[int], config: RunConfig, mt: int | None = None,
              mt_cap: int | None = None, jobs: int = 1, repeat: int = 1) -> dict:
    """Convergence and timing sweep with ``N_x = N_t = N``.

    ``M_t`` is ``mt`` if given, else ``min(N, mt_cap)`` if given, else ``N``.
    ``seconds`` is the mean wall time over ``repeat`` solves.
    """
    problem = spec.build()

    def rule(n):
        if mt is not None:
            return mt
        return min(n, mt_cap) if mt_cap is not None else n

    result = convergence_sweep(problem, problem.exact, ns, rule, config.alpha, config.lattice, jobs)
    rows = []
    for row in result.rows:
        seconds = row.seconds
        if repeat > 1 and row.report is not None:
            extra = [timed_solve(problem, row.N, row.mt, config.alpha)[1] for _ in range(repeat - 1)]
            seconds = float(np.mean([seconds] + extra))
        norms = row.report.as_dict() if row.report else {k: None for k in NORM_KEYS}
        rows.append({"N": row.N, "Mt": row.mt, "L_plus_1": row.L_plus_1, **norms,
                     "seconds": _float(seconds), "alpha_stars": list(row.alpha_stars), "error": row.error})
    good = [r for r in rows if r["seconds"] is not None and r["error"] is None]
    time_slope = None
    if len(good) >= 2:
        time_slope = fit_slope([math.log(r["L_plus_1"]) for r in good], [math.log(r["seconds"]) for r in good])
    return {
        "config": config.to_dict(),
        "problem_id": spec.problem_id,
        "problem": spec.to_dict(),
        "rows": rows,
        "slope_log10_Linf_vs_N": result.slope,
        "slope_log_seconds_vs_log_L_plus_1": time_slope,
    }


def run_quadrature(kind: str, alpha: float, n: int, m: int, L: float, integrand: str,
                   nodes=None, upper_all: bool = False, antiderivative: str | None = None) -> dict:
    """Integrate ``integrand(x)`` from 0 to each upper limit with an S-matrix or an optimal S-matrix."""
    if not alpha > -0.5:
        raise UsageError(f"alpha must exceed -1/2, got {alpha}")
    if not L > 0:
        raise UsageError("L must be positive")
    fn = parse_expression(integrand).of_x()
    grid = shift_nodeset(gauss_nodes(alpha, n), L)
    if upper_all or nodes is None:
        upper = grid.nodes
    else:
        upper = np.asarray(nodes, dtype=float)
    if np.any(upper < 0) or np.any(upper > L):
        raise UsageError(f"upper limits must lie in [0, {L}]")
    out = {"kind": kind, "alpha": alpha, "L": L, "upper": upper.tolist()}
    if kind == "s":
        smat = build_smatrix(alpha, n, L, q=1, upper=upper)
        values = smat.entries @ fn(grid.nodes)
        out.update(n=n, nodes=grid.nodes.tolist(), weights=grid.weights.tolist(), rows=smat.entries.tolist())
    elif kind == "optimal":
        opt = build_optimal_smatrix(upper.size - 1, m, L, upper)
        values = np.einsum("ik,ik->i", opt.entries, fn(opt.adjoint_nodes))
        out.update(m=m, alpha_stars=opt.alphas.tolist(), adjoint_nodes=opt.adjoint_nodes.tolist(),
                   rows=opt.entries.tolist())
    else:
        raise UsageError(f"unknown quadrature kind {kind!r}")
    out["results"] = values.tolist()
    if antiderivative is not None:
        big = parse_expression(antiderivative).of_x()
        exact = big(upper) - big(0.0)
        out["exact"] = exact.tolist()
        out["errors"] = np.abs(values - exact).tolist()
    return out


def run_nodes(alpha: float, n: int, L: float) -> dict:
    if not alpha > -0.5:
        raise UsageError(f"alpha must exceed -1/2, got {alpha}")
    ns = shift_nodeset(gauss_nodes(alpha, n), L)
    return {"alpha": alpha, "n": n, "L": L, "nodes": ns.nodes.tolist(), "weights": ns.weights.tolist()}


def load_result(path: str) -> tuple[RunConfig, ProblemSpec]:
    """Rebuild the config and problem that produced a JSON result file."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return RunConfig.from_dict(data["config"]), ProblemSpec.from_dict(data["problem"])


# Formatting

def _num(v) -> str:
    return "-" if v is None else f"{v:.3e}"


def _table(headers: list[str], rows: list[list]) -> str:
    cells = [headers] + [[c if isinstance(c, str) else _num(c) if isinstance(c, float) or c is None else str(c)
                          for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _csv(headers: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    for row in rows:
        writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _solve_rows(payload: dict) -> list[list]:
    cfg = payload["config"]
    norms = payload["norms"]
    mt = cfg["mt"] if cfg["mt"] is not None else cfg["nt"]
    n = cfg["nx"] if cfg["nx"] == cfg["nt"] else f"{cfg['nx']}x{cfg['nt']}"
    return [[n, mt, payload["L_plus_1"], *[norms[k] for k in NORM_KEYS], payload["timings"]["total_s"]]]


def _sweep_rows(payload: dict) -> list[list]:
    return [[r[k] for k in CSV_COLUMNS] for r in payload["rows"]]


def render(command: str, payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    if command in ("solve", "sweep"):
        rows = _solve_rows(payload) if command == "solve" else _sweep_rows(payload)
        if fmt == "csv":
            return _csv(CSV_COLUMNS, rows)
        text = f"problem: {payload['problem_id']}  alpha: {payload['config']['alpha']}\n"
        text += _table(["N", "M_t", "L+1", "l1", "l2", "linf", "E_inf", "rms", "seconds"], rows)
        if command == "sweep":
            text += f"slope of log10 E_inf vs N: {_num(payload['slope_log10_Linf_vs_N'])}\n"
            text += f"slope of log seconds vs log(L+1): {_num(payload['slope_log_seconds_vs_log_L_plus_1'])}\n"
        elif payload["alpha_stars"]:
            text += "alpha*: " + " ".join(f"{a:.6f}" for a in payload["alpha_stars"]) + "\n"
        return text
    if command == "nodes":
        rows = [[i, x, w] for i, (x, w) in enumerate(zip(payload["nodes"], payload["weights"]))]
        headers = ["k", "node", "weight"]
    else:
        headers = ["i", "upper", "result"]
        rows = [[i, u, r] for i, (u, r) in enumerate(zip(payload["upper"], payload["results"]))]
        if "alpha_stars" in payload:
            headers.insert(2, "alpha*")
            for row, a in zip(rows, payload["alpha_stars"]):
                row.insert(2, a)
        if "errors" in payload:
            headers.append("error")
            for row, e in zip(rows, payload["errors"]):
                row.append(e)
    if fmt == "csv":
        return _csv(headers, rows)
    fmt_rows = [[c if isinstance(c, int) else f"{c:.16g}" for c in row] for row in rows]
    return _table(headers, fmt_rows)


# Argument handling

def _add_problem_args(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--example", type=int, choices=sorted(problems.EXAMPLES))
    src.add_argument("--problem", metavar="FILE", help="key = value problem file")
    src.add_argument("--replay", metavar="JSON", help="rerun the configuration stored in a result file")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--format", choices=["table", "csv", "json"], default="table")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--lattice", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help="reserved; recorded but unused")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="telegraph", description="Shifted Gegenbauer collocation for the telegraph equation.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one problem")
    _add_problem_args(solve)
    solve.add_argument("--n", type=int, help="sets both N_x and N_t")
    solve.add_argument("--nx", type=int)
    solve.add_argument("--nt", type=int)
    solve.add_argument("--mt", type=int)
    _add_common(solve)

    sweep = sub.add_parser("sweep", help="convergence and timing sweep")
    _add_problem_args(sweep)
    grid = sweep.add_mutually_exclusive_group()
    grid.add_argument("--n", type=int, nargs="+", help="list of N values")
    grid.add_argument("--range", type=int, nargs=3, metavar=("START", "STOP", "STEP"), help="N from START to STOP inclusive")
    sweep.add_argument("--mt", type=int, help="fixed M_t for every row")
    sweep.add_argument("--mt-cap", type=int, help="M_t = min(N, cap)")
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.add_argument("--repeat", type=int, default=1, help="timing runs averaged per row")
    _add_common(sweep)

    quad = sub.add_parser("quadrature", help="inspect an S-matrix or optimal S-matrix")
    quad.add_argument("--kind", choices=["s", "optimal"], default="s")
    quad.add_argument("--n", type=int, default=4)
    quad.add_argument("--m", type=int, default=4)
    quad.add_argument("--L", type=float, default=1.0)
    quad.add_argument("--nodes", type=float, nargs="+", help="upper limits of integration")
    quad.add_argument("--upper-all", action="store_true", help="use every Gauss node as an upper limit")
    quad.add_argument("--integrand", default="1")
    quad.add_argument("--antiderivative", help="exact antiderivative in x, for error reporting")
    quad.add_argument("--alpha", type=float, default=0.0)
    quad.add_argument("--format", choices=["table", "csv", "json"], default="table")
    quad.add_argument("--out", metavar="PATH")

    nodes = sub.add_parser("nodes", help="print shifted Gauss nodes and weights")
    nodes.add_argument("--n", type=int, default=4)
    nodes.add_argument("--alpha", type=float, default=0.0)
    nodes.add_argument("--L", type=float, default=1.0)
    nodes.add_argument("--format", choices=["table", "csv", "json"], default="table")
    nodes.add_argument("--out", metavar="PATH")
    return parser


def _spec_from_args(args) -> ProblemSpec:
    if args.problem:
        return load_problem_file(args.problem)
    return ProblemSpec(example=args.example if args.example is not None else 1)


def _config_from_args(args, nx: int, nt: int, mt: int | None) -> RunConfig:
    return RunConfig(nx=nx, nt=nt, mt=mt, alpha=args.alpha, out=args.out, format=args.format,
                     lattice=args.lattice, seed=args.seed)


def _dispatch(args) -> tuple[dict, str, int]:
    if args.command == "solve":
        if args.replay:
            config, spec = load_result(args.replay)
            config = replace(config, format=args.format, out=args.out)
        else:
            spec = _spec_from_args(args)
            n = args.n if args.n is not None else 4
            config = _config_from_args(args, args.nx or n, args.nt or n, args.mt)
        return run_solve(spec, config), config.format, EXIT_OK
    if args.command == "sweep":
        if args.replay:
            _, spec = load_result(args.replay)
        else:
            spec = _spec_from_args(args)
        if args.range:
            start, stop, step = args.range
            if step < 1:
                raise UsageError("STEP must be positive")
            ns = list(range(start, stop + 1, step))
        else:
            ns = args.n or [4, 6, 8]
        if not ns or min(ns) < 1:
            raise UsageError("N values must be at least 1")
        if args.jobs < 1 or args.repeat < 1:
            raise UsageError("--jobs and --repeat must be positive")
        if args.mt_cap is not None and args.mt_cap < 1:
            raise UsageError("--mt-cap must be at least 1")
        config = _config_from_args(args, ns[0], ns[0], args.mt)
        payload = run_sweep(spec, ns, config, args.mt, args.mt_cap, args.jobs, args.repeat)
        ok = any(r["error"] is None for r in payload["rows"])
        return payload, args.format, EXIT_OK if ok else EXIT_NUMERIC
    if args.command == "quadrature":
        if args.n < 0 or args.m < 0:
            raise UsageError("--n and --m must be nonnegative")
        payload = run_quadrature(args.kind, args.alpha, args.n, args.m, args.L, args.integrand,
                                 args.nodes, args.upper_all, args.antiderivative)
        return payload, args.format, EXIT_OK
    if args.n < 0 or not args.L > 0:
        raise UsageError("need --n >= 0 and --L > 0")
    return run_nodes(args.alpha, args.n, args.L), args.format, EXIT_OK


def _error(kind: str, message: str, code: int, **extra) -> int:
    sys.stderr.write(json.dumps({"error": {"kind": kind, "message": message, "exit_code": code, **extra}}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        payload, fmt, code = _dispatch(args)
    except UsageError as exc:
        return _error("usage", str(exc), EXIT_USAGE)
    except ExpressionError as exc:
        return _error("parse", exc.reason, EXIT_PARSE, offset=exc.offset, source=exc.source)
    except ProblemFileError as exc:
        return _error("parse", str(exc), EXIT_PARSE, line=exc.line, offset=exc.offset)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        return _error("usage", f"cannot read input: {exc}", EXIT_USAGE)
    except (ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        return _error("numeric", str(exc), EXIT_NUMERIC)
    text = render(args.command, payload, fmt)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

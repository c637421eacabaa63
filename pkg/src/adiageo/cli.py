"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 domain error, 3 usage error.

    adiageo eval --model gho --quantity metric --set Y=0,Z=1 --sweep X=1:2:3 --action 1
    adiageo verify --suite gamma-beta
    adiageo series --target W
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geometry import DomainError, MetricTensor, ParameterPoint, matrix_rank
from .models import MODELS
from .quantum import (QUARTIC_NAMES, QuantumLevel, gho_berry, gho_quantum_metric, gholin_berry,
                      gholin_quantum_metric, quartic_point, quartic_quantum_metric_closed)
from .series import pipeline_dump, quartic_pipeline
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2, 3
QUANTITIES = ("metric", "connection", "curvature", "det", "rank")
MODEL_NAMES = ("gho", "gholin", "quartic")
THREADS_ENV = "ADIAGEO_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v) -> str:
    """17 significant digits, lowercase exponent."""
    return f"{float(v) + 0.0:.16e}"  # + 0.0 folds -0.0 into 0.0


# --- grid specification -----------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    names: tuple
    axes: tuple  # one tuple of values per parameter, model order
    action: float = 1.0
    level: int = 0
    hbar: float = 1.0

    def points(self):
        """Row-major over the axes (last parameter varies fastest)."""
        return list(itertools.product(*self.axes))


def _parse_sets(items) -> dict:
    out = {}
    for item in items or ():
        for part in item.split(","):
            if "=" not in part:
                raise UsageError(f"--set expects name=value, got {part!r}")
            name, val = part.split("=", 1)
            try:
                out[name.strip()] = float(val)
            except ValueError:
                raise UsageError(f"--set {name}: not a number: {val!r}") from None
    return out


def _parse_sweeps(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"--sweep expects name=min:max:count, got {item!r}")
        name, spec = item.split("=", 1)
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"--sweep expects name=min:max:count, got {item!r}")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError(f"--sweep {name}: malformed range {spec!r}") from None
        if count < 1:
            raise UsageError(f"--sweep {name}: count must be at least 1")
        out[name.strip()] = tuple(float(v) for v in np.linspace(lo, hi, count))
    return out


def build_grid(names, sets: dict, sweeps: dict, action, level, hbar) -> GridSpec:
    unknown = sorted((set(sets) | set(sweeps)) - set(names))
    if unknown:
        raise UsageError(f"unknown parameter(s) {', '.join(unknown)}; expected {', '.join(names)}")
    both = sorted(set(sets) & set(sweeps))
    if both:
        raise UsageError(f"parameter(s) both set and swept: {', '.join(both)}")
    if not sweeps:
        raise UsageError("at least one --sweep is required")
    missing = [n for n in names if n not in sets and n not in sweeps]
    if missing:
        raise UsageError(f"missing value for {', '.join(missing)}")
    if level < 0:
        raise UsageError("--level must be nonnegative")
    if not hbar > 0:
        raise UsageError("--hbar must be positive")
    axes = tuple(sweeps[n] if n in sweeps else (sets[n],) for n in names)
    return GridSpec(tuple(names), axes, action, level, hbar)


# --- evaluation ---------------------------------------------------------------

def _make_point(model: str, names, values) -> ParameterPoint:
    if model == "quartic":
        return quartic_point(*values)
    return MODELS[model].point(values)


def _classical(model: str, grid: GridSpec, x: ParameterPoint, quantity: str):
    if model == "quartic":
        if quantity in ("connection", "curvature"):
            raise UsageError("quartic model offers metric, det and rank only")
        g = quartic_pipeline(3).metric_matrix(grid.action, *(float(v) for v in x.values))
        return MetricTensor(g, x, grid.action)
    m = MODELS[model]
    if quantity in ("connection", "curvature"):
        A, F = m.hannay(grid.action, x)
        return A if quantity == "connection" else F
    return m.metric_closed(grid.action, x)


def _quantum(model: str, grid: GridSpec, x: ParameterPoint, quantity: str):
    lvl = QuantumLevel(grid.level, grid.hbar)
    if model == "quartic":
        if grid.level != 0:
            raise UsageError("quartic quantum side offers the ground state (n=0) only")
        if quantity in ("connection", "curvature"):
            raise UsageError("quartic model offers metric, det and rank only")
        return quartic_quantum_metric_closed(x, grid.hbar)
    metric, berry = ((gho_quantum_metric, gho_berry) if model == "gho"
                     else (gholin_quantum_metric, gholin_berry))
    if quantity in ("connection", "curvature"):
        A, F = berry(lvl, x)
        return A if quantity == "connection" else F
    return metric(lvl, x)


def _components(quantity: str, obj, base: int):
    """``(label, i, j, value)`` in lexicographic component order."""
    if quantity == "metric":
        g = obj.as_float()
        n = g.shape[0]
        return [(f"g_{i + base}{j + base}", i + base, j + base, g[i, j])
                for i in range(n) for j in range(i, n)]
    if quantity == "connection":
        a = np.asarray(obj.components, dtype=float)
        return [(f"A_{i + base}", i + base, None, a[i]) for i in range(a.size)]
    if quantity == "curvature":
        f = np.asarray(obj.components, dtype=float)
        n = f.shape[0]
        return [(f"F_{i + base}{j + base}", i + base, j + base, f[i, j])
                for i in range(n) for j in range(i + 1, n)]
    if quantity == "det":
        return [("det", None, None, obj.determinant())]
    return [("rank", None, None, matrix_rank(obj))]


def evaluate_point(model, quantity, side, grid: GridSpec, values):
    x = _make_point(model, grid.names, values)
    obj = (_classical if side == "classical" else _quantum)(model, grid, x, quantity)
    base = MODELS[model].index_base if model in MODELS else 1
    return [(values, *c) for c in _components(quantity, obj, base)]


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _value_str(label, v) -> str:
    return str(int(v)) if label == "rank" else fmt(v)


def _index_str(i) -> str:
    return "" if i is None else str(i)


def render_csv(names, rows) -> str:
    lines = [",".join([f"param:{n}" for n in names] + ["quantity", "i", "j", "value"])]
    for values, label, i, j, v in rows:
        lines.append(",".join([fmt(p) for p in values]
                              + [label, _index_str(i), _index_str(j), _value_str(label, v)]))
    return "\n".join(lines) + "\n"


def render_json(names, rows) -> str:
    objs = []
    for values, label, i, j, v in rows:
        fields = [f'"param:{n}": {fmt(p)}' for n, p in zip(names, values)]
        fields += [f'"quantity": "{label}"',
                   f'"i": {"null" if i is None else i}',
                   f'"j": {"null" if j is None else j}',
                   f'"value": {_value_str(label, v)}']
        objs.append("  {" + ", ".join(fields) + "}")
    return "[\n" + ",\n".join(objs) + "\n]\n" if objs else "[]\n"


def cmd_eval(args) -> int:
    names = QUARTIC_NAMES if args.model == "quartic" else MODELS[args.model].names
    grid = build_grid(names, _parse_sets(args.set), _parse_sweeps(args.sweep),
                      args.action, args.level, args.hbar)
    points = grid.points()
    for values in points:
        try:
            _make_point(args.model, names, values)
        except DomainError as exc:
            where = ",".join(f"{n}={v:g}" for n, v in zip(names, values))
            print(f"domain error at grid point {where}: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
    if args.side == "classical" and not args.action > 0:
        raise UsageError("--action must be positive")
    job = lambda v: evaluate_point(args.model, args.quantity, args.side, grid, v)
    workers = _threads()
    if workers == 1:
        chunks = [job(v) for v in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(job, points))  # map keeps submission order
    rows = [r for chunk in chunks for r in chunk]
    out = render_csv(names, rows) if args.format == "csv" else render_json(names, rows)
    sys.stdout.write(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, args.seed)
    for c in checks:
        print(c.line(), file=sys.stderr)
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed", file=sys.stderr)
    return EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_series(args) -> int:
    sys.stdout.write(pipeline_dump(args.target))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="adiageo", description="Parameter-space metrics, connections and curvatures.")
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate a quantity over a parameter grid")
    ev.add_argument("--model", required=True, choices=MODEL_NAMES)
    ev.add_argument("--quantity", required=True, choices=QUANTITIES)
    ev.add_argument("--set", action="append", metavar="NAME=VALUE[,NAME=VALUE]")
    ev.add_argument("--sweep", action="append", metavar="NAME=MIN:MAX:COUNT")
    ev.add_argument("--action", type=float, default=1.0, help="action I (classical side)")
    ev.add_argument("--level", type=int, default=0, help="quantum level n")
    ev.add_argument("--hbar", type=float, default=1.0)
    ev.add_argument("--side", choices=("classical", "quantum"), default="classical")
    ev.add_argument("--format", choices=("csv", "json"), default="csv")
    ev.set_defaults(func=cmd_eval)

    ve = sub.add_parser("verify", help="run verification suites")
    ve.add_argument("--suite", required=True, choices=tuple(SUITES) + ("all",))
    ve.add_argument("--seed", type=int, default=20240611)
    ve.set_defaults(func=cmd_verify)

    se = sub.add_parser("series", help="dump quartic perturbation series as JSON")
    se.add_argument("--target", required=True, choices=("W", "G", "metric"))
    se.add_argument("--format", choices=("json",), default="json")
    se.set_defaults(func=cmd_series)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"adiageo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

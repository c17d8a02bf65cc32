"""Command-line front end.

Every command writes CSV or JSON to ``--out`` (default stdout).  Floats are
written with 17 significant digits in CSV and as ``repr`` in JSON, so runs
with the same arguments produce byte-identical output.  Invalid arguments
exit with status 2 and an error object on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import catalog
from .classify import classify_direction, indicatrix, parameter_map, scan_circle
from .lagrangian import Branch, LagrangianSpec, finsler_function, lagrangian_value, lagrangian_values, sign_class
from .metric import CLOSED_FORM_FAMILIES, cartan_at, metric_at
from .quartic import load_quartic

COMMANDS = ("eval", "metric", "classify", "scan", "map", "indicatrix", "fresnel", "reproduce")


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated vector: {text!r}") from None


def _pair(text: str) -> tuple[float, float]:
    v = _vector(text)
    if v.size != 2:
        raise argparse.ArgumentTypeError(f"expected two numbers, got {text!r}")
    return float(v[0]), float(v[1])


def _grid(text: str) -> tuple[int, int]:
    parts = text.lower().replace("x", ",").split(",")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
    return (vals[0], vals[0]) if len(vals) == 1 else (vals[0], vals[1])


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--preset", help="preset name, e.g. power_sum, ee(100), uniaxial(2,3,1)")
    src.add_argument("--quartic", metavar="PATH", help="quartic JSON literal")
    common.add_argument("--branch", choices=[b.value for b in Branch], default="signed")
    common.add_argument("--k", type=_positive, help="parameter for ee / el / ll presets")
    common.add_argument("--tol", type=_positive, default=1e-9)
    common.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="json")

    p = _Parser(prog="quartic-finsler", description="Finsler structures from quartic forms.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("eval", parents=[common], help="Q, L, F and sign class at a vector")
    s.add_argument("--v", type=_vector)
    s.add_argument("--slice", type=_vector, metavar="X0,X1,N",
                   help="tabulate Q and the three Lagrangian branches along v = (1, x)")

    s = sub.add_parser("metric", parents=[common], help="Finsler metric at a direction")
    s.add_argument("--v", type=_vector, required=True)
    s.add_argument("--cartan", action="store_true", help="include the Cartan tensor")

    s = sub.add_parser("classify", parents=[common], help="set label of a direction")
    s.add_argument("--v", type=_vector, required=True)

    s = sub.add_parser("scan", parents=[common], help="classify the unit circle")
    s.add_argument("--resolution", type=int, default=360)

    s = sub.add_parser("map", parents=[common], help="determinant sign over (k, angle)")
    s.add_argument("--grid", type=_grid, default=(64, 64))
    s.add_argument("--k-range", type=_pair, default=(1.0, 50.0))
    s.add_argument("--angle-range", type=_pair, default=(0.0, math.pi / 2))

    s = sub.add_parser("indicatrix", parents=[common], help="points of L(v) = level")
    s.add_argument("--level", type=float, default=1.0, choices=(1.0, -1.0))
    s.add_argument("--resolution", type=int, default=720)

    s = sub.add_parser("fresnel", parents=[common], help="Fresnel quartic of a medium")
    s.add_argument("--q", type=_vector)

    s = sub.add_parser("reproduce", parents=[common], help="run the reference-result suite")
    return p


# -- formatting -------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=1, sort_keys=True) + "\n"


def dumps_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _write(text: str, out) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def format_map(m, fmt: str = "csv") -> str:
    """Serialise a classification or parameter map; rows are k-major, then angle."""
    rows = list(m.rows())
    if not rows:
        raise ValueError("map is empty")
    return dumps_csv(m.columns, rows) if fmt == "csv" else dumps_json(m.to_json())


def emit_map(m, fmt: str = "csv", out=None) -> str:
    """Write :func:`format_map` output to ``out`` (stdout when ``None``)."""
    text = format_map(m, fmt)
    _write(text, out)
    return text


# -- commands -------------------------------------------------------------------

def _spec(args) -> LagrangianSpec:
    if args.quartic:
        M = load_quartic(args.quartic)
    else:
        M = catalog.preset_quartic(args.preset or "euclid_square", args.k)
    return LagrangianSpec(M, Branch.parse(args.branch))


def _need_dim(spec, v):
    if v is None:
        raise ConfigError("--v is required")
    if v.size != spec.dim:
        raise ConfigError(f"--v has {v.size} components, quartic has dimension {spec.dim}")


def _cmd_eval(args):
    spec = _spec(args)
    if args.slice is not None:
        x0, x1, n = args.slice
        xs = np.linspace(x0, x1, int(n))
        V = np.stack([np.ones_like(xs), xs], axis=1)
        if spec.dim != 2:
            raise ConfigError("--slice needs a two-dimensional quartic")
        cols = ["x", "Q"] + [b.value for b in Branch]
        Q = spec.quartic.eval_many(V)
        table = [Q] + [lagrangian_values(spec.with_branch(b), V) for b in Branch]
        rows = [(x, *(float(t[i]) for t in table)) for i, x in enumerate(xs)]
        if args.format == "csv":
            return dumps_csv(cols, rows)
        return dumps_json({"columns": cols, "rows": rows})
    _need_dim(spec, args.v)
    q = spec.quartic.eval(args.v)
    doc = {"v": args.v, "Q": q, "L": lagrangian_value(spec, args.v),
           "F": finsler_function(spec, args.v), "branch": spec.branch.value,
           "sign": sign_class(spec, args.v, args.tol).value if np.any(args.v) else None}
    if args.format == "csv":
        return dumps_csv(["Q", "L", "F", "sign"], [(doc["Q"], doc["L"], doc["F"], doc["sign"])])
    return dumps_json(doc)


def _cmd_metric(args):
    spec = _spec(args)
    _need_dim(spec, args.v)
    ms = metric_at(spec, args.v, args.tol)
    doc = ms.to_json()
    if args.cartan and ms.defined:
        doc["cartan"] = cartan_at(spec, args.v, args.tol).C
    if args.format == "csv":
        n = spec.dim
        cols = [f"f{i}{j}" for i in range(n) for j in range(n)] + ["det", "defined"]
        f = doc["f"] or [math.nan] * n * n
        return dumps_csv(cols, [(*f, doc["det"] if ms.defined else math.nan, ms.defined)])
    return dumps_json(doc)


def _cmd_classify(args):
    spec = _spec(args)
    _need_dim(spec, args.v)
    lab = classify_direction(spec, args.v, args.tol)
    doc = lab.to_json()
    if args.format == "csv":
        return dumps_csv(["sign", "differentiable", "metric", "sets"],
                         [(doc["sign"], doc["differentiable"], doc["metric"], "".join(doc["sets"]))])
    return dumps_json(doc)


def _cmd_scan(args):
    spec = _spec(args)
    if spec.dim != 2:
        raise ConfigError("scan needs a two-dimensional quartic")
    return format_map(scan_circle(spec, args.resolution, args.tol), args.format)


def _cmd_map(args):
    name = catalog.parse_preset(args.preset or "ee").name if not args.quartic else None
    if name not in CLOSED_FORM_FAMILIES:
        raise ConfigError(f"map needs one of the presets {', '.join(CLOSED_FORM_FAMILIES)}")
    return format_map(parameter_map(name, args.k_range, args.angle_range, args.grid), args.format)


def _cmd_indicatrix(args):
    spec = _spec(args)
    ind = indicatrix(spec, args.level, args.resolution)
    if args.format == "csv":
        rows = [(i, a, p[0], p[1]) for i, arc in enumerate(ind.arcs)
                for a, p in zip(arc.angles, arc.points)]
        return dumps_csv(["arc", "angle", "x", "y"], rows)
    return dumps_json({"level": ind.level, "note": ind.note,
                       "arcs": [{"convexity": a.convexity, "angles": a.angles, "points": a.points}
                                for a in ind.arcs]})


def _cmd_fresnel(args):
    from .premetric import fresnel_tensor
    from .quartic import SymQuadric

    G = fresnel_tensor(catalog.preset_chi(args.preset or "vacuum"))
    doc = {"medium": catalog.parse_preset(args.preset or "vacuum").label, "quartic": G.quartic.to_json()}
    if args.q is not None:
        if args.q.size != 4:
            raise ConfigError("--q needs four components (omega, q1, q2, q3)")
        doc["q"] = args.q
        doc["G"] = G(args.q)
        m = SymQuadric.diag(1.0, -1.0, -1.0, -1.0)(args.q)
        doc["ratio_to_minkowski_squared"] = doc["G"] / m**2 if m != 0 else None
    if args.format == "csv":
        return dumps_csv(["G"], [(doc.get("G", math.nan),)])
    return dumps_json(doc)


def _cmd_reproduce(args):
    from .reproduce import run_all

    summary = run_all()
    if args.format == "csv":
        text = dumps_csv(["name", "passed"], [(i["name"], i["passed"]) for i in summary["items"]])
    else:
        text = dumps_json(summary)
    return text, (0 if summary["passed"] else 1)


_DISPATCH = {
    "eval": _cmd_eval,
    "metric": _cmd_metric,
    "classify": _cmd_classify,
    "scan": _cmd_scan,
    "map": _cmd_map,
    "indicatrix": _cmd_indicatrix,
    "fresnel": _cmd_fresnel,
    "reproduce": _cmd_reproduce,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        result = _DISPATCH[args.command](args)
        text, status = result if isinstance(result, tuple) else (result, 0)
        _write(text, args.out)
        return status
    except (ConfigError, ValueError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 2


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

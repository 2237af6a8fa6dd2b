"""Command-line front end: evaluate the product functional, run the family
optimizers and exponent sweeps, check measure bounds, reproduce the reference
constant table, and print the degenerate product sequence.

Domains and seminorms come in as JSON (inline on the flag, or a file path);
reports go out as canonical JSON (sorted keys, floats in %.12e so emitted
bytes survive a parse/re-serialize round trip) or CSV for tabular commands.

Exit codes: 0 success, 1 failed reproduction row, 2 bad input, 3 solver
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .closed_forms import (
    kj_sequence_value,
    lambda_rank1_ellipsoid,
    m_tilde_q_ellipsoid,
    q_threshold_ellipsoid,
    rank1_box,
    t_max_ellipsoid,
    torsion_euclid_ellipsoid,
    torsion_quadratic_ball,
    torsion_rank1_ellipsoid,
)
from .errors import DegenerateSeminormError, InputError, MeshError, SolverError
from .fem import SolverConfig
from .functional import eval_F, optimize_quadratic, optimize_rank1, q_sweep, verify_bounds
from .geometry import BoxD, Polygon2D, domain_from_json, domain_to_json
from .seminorms import Rank1Seminorm, seminorm_from_json, seminorm_to_json
from .slicing import solve_rank1

__all__ = ["main", "canonical_json"]


def canonical_json(obj) -> str:
    """Serialize with sorted keys and %.12e floats.

    The format is a fixed point of parse-then-serialize: every float that
    comes back from json.loads of the output prints to the same 13
    significant digits again.
    """
    out: list = []

    def emit(v):
        if v is None:
            out.append("null")
        elif isinstance(v, (bool, np.bool_)):
            out.append("true" if v else "false")
        elif isinstance(v, (int, np.integer)):
            out.append(str(int(v)))
        elif isinstance(v, (float, np.floating)):
            f = float(v)
            if not math.isfinite(f):
                raise InputError("reports must not contain non-finite numbers")
            out.append(format(f, ".12e"))
        elif isinstance(v, str):
            out.append(json.dumps(v))
        elif isinstance(v, dict):
            out.append("{")
            for i, k in enumerate(sorted(v)):
                if i:
                    out.append(", ")
                out.append(json.dumps(str(k)))
                out.append(": ")
                emit(v[k])
            out.append("}")
        elif isinstance(v, (list, tuple)):
            out.append("[")
            for i, x in enumerate(v):
                if i:
                    out.append(", ")
                emit(x)
            out.append("]")
        elif isinstance(v, np.ndarray):
            emit(v.tolist())
        else:
            raise InputError(f"cannot serialize {type(v).__name__}")

    emit(obj)
    out.append("\n")
    return "".join(out)


def _load_json_arg(text: str, label: str) -> dict:
    """Inline JSON when the argument starts with '{', else a file path."""
    if text.lstrip().startswith("{"):
        return json.loads(text)
    try:
        raw = Path(text).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {label} file '{text}': {exc}") from exc
    return json.loads(raw)


def _parse_q_grid(spec: str) -> list:
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError("q grid must look like a:b:step")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError as exc:
        raise InputError(f"q grid fields must be numbers: {exc}") from exc
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(step)):
        raise InputError("q grid fields must be finite")
    if step <= 0 or b < a:
        raise InputError("q grid needs step > 0 and b >= a")
    qs = []
    i = 0
    while True:
        v = a + i * step
        if v > b + 1e-12 * max(1.0, abs(b)):
            break
        qs.append(v)
        i += 1
    return qs


def _parse_n_list(spec: str) -> list:
    try:
        ns = [int(p) for p in spec.split(",") if p.strip()]
    except ValueError as exc:
        raise InputError(f"--n must be a comma list of integers: {exc}") from exc
    if not ns or any(n < 1 for n in ns):
        raise InputError("--n entries must be positive integers")
    return ns


def _solver_cfg(args) -> SolverConfig | None:
    """None when no override was given, so optimizers pick their defaults."""
    h = getattr(args, "h", None)
    richardson = bool(getattr(args, "richardson", False))
    if h is None and not richardson:
        return None
    base = SolverConfig()
    return SolverConfig(target_h=base.target_h if h is None else h, richardson=richardson)


def _cmd_eval(args) -> tuple:
    domain = domain_from_json(_load_json_arg(args.domain, "domain"))
    H = seminorm_from_json(_load_json_arg(args.seminorm, "seminorm"))
    if args.format != "json":
        raise InputError("eval reports are JSON only")
    cfg = _solver_cfg(args) or SolverConfig()
    fv = eval_F(domain, H, args.q, cfg)
    report = {
        "command": "eval",
        "q": fv.q,
        "lambda": fv.lambda_,
        "torsion": fv.torsion,
        "value": fv.value,
        "error_estimate": fv.error_estimate,
        "lambda_provenance": fv.lambda_provenance,
        "torsion_provenance": fv.torsion_provenance,
        "seminorm": seminorm_to_json(fv.seminorm),
        "domain": domain_to_json(domain),
    }
    return canonical_json(report), 0


def _cmd_optimize(args) -> tuple:
    domain = domain_from_json(_load_json_arg(args.domain, "domain"))
    if args.format != "json":
        raise InputError("optimize reports are JSON only")
    if args.seminorm_class == "rank1":
        rep = optimize_rank1(domain, args.q, args.mode)
    else:
        rep = optimize_quadratic(domain, args.q, args.mode, _solver_cfg(args))
    report = {
        "command": "optimize",
        "mode": rep.mode,
        "seminorm_class": rep.seminorm_class,
        "q": float(args.q),
        "theta": rep.theta,
        "alpha": rep.alpha,
        "value": rep.value,
        "boundary_flag": rep.boundary_flag,
        "evaluations": len(rep.trace),
        "lambda": rep.best.lambda_,
        "torsion": rep.best.torsion,
        "error_estimate": rep.best.error_estimate,
        "lambda_provenance": rep.best.lambda_provenance,
        "torsion_provenance": rep.best.torsion_provenance,
        "seminorm": seminorm_to_json(rep.best.seminorm),
        "domain": domain_to_json(domain),
    }
    return canonical_json(report), 0


def _sweep_csv(sweep) -> str:
    lines = ["q,theta,alpha,value,boundary_flag"]
    for q, rep in zip(sweep.qs, sweep.reports):
        alpha = "" if rep.alpha is None else format(rep.alpha, ".12e")
        lines.append(
            f"{q:.12e},{rep.theta:.12e},{alpha},{rep.value:.12e},"
            f"{'true' if rep.boundary_flag else 'false'}"
        )
    return "\n".join(lines) + "\n"


def _cmd_sweep(args) -> tuple:
    domain = domain_from_json(_load_json_arg(args.domain, "domain"))
    qs = _parse_q_grid(args.q_grid)
    sweep = q_sweep(domain, qs, args.mode, args.seminorm_class, _solver_cfg(args))
    if args.format == "csv":
        return _sweep_csv(sweep), 0
    report = {
        "command": "sweep",
        "mode": args.mode,
        "seminorm_class": args.seminorm_class,
        "qs": list(sweep.qs),
        "threshold_bracket": None if sweep.threshold_bracket is None else list(sweep.threshold_bracket),
        "empirical_threshold": sweep.empirical_threshold,
        "reports": [
            {
                "q": q,
                "theta": rep.theta,
                "alpha": rep.alpha,
                "value": rep.value,
                "boundary_flag": rep.boundary_flag,
                "lambda": rep.best.lambda_,
                "torsion": rep.best.torsion,
                "lambda_provenance": rep.best.lambda_provenance,
                "torsion_provenance": rep.best.torsion_provenance,
            }
            for q, rep in zip(sweep.qs, sweep.reports)
        ],
        "domain": domain_to_json(domain),
    }
    return canonical_json(report), 0


def _cmd_bounds(args) -> tuple:
    domain = domain_from_json(_load_json_arg(args.domain, "domain"))
    H = seminorm_from_json(_load_json_arg(args.seminorm, "seminorm"))
    if args.format != "json":
        raise InputError("bounds reports are JSON only")
    cfg = _solver_cfg(args) or SolverConfig()
    br = verify_bounds(domain, H, cfg)
    report = {
        "command": "bounds",
        "measure": br.measure,
        "lambda": br.lambda_,
        "torsion": br.torsion,
        "product": br.product,
        "lambda_provenance": br.lambda_provenance,
        "torsion_provenance": br.torsion_provenance,
        "checks": [
            {
                "name": c.name,
                "lhs": c.lhs,
                "rhs": c.rhs,
                "satisfied": c.satisfied,
                "note": c.note,
            }
            for c in br.checks
        ],
        "seminorm": seminorm_to_json(H),
        "domain": domain_to_json(domain),
    }
    return canonical_json(report), 0


def _reproduce_rows() -> list:
    """(name, computed, expected, label) for every pinned reference value."""
    tri = Polygon2D([(0, 0), (1, 0), (0, 1)])
    square = Polygon2D([(0, 0), (1, 0), (1, 1), (0, 1)])
    box = BoxD([(0.0, 1.0), (0.0, 2.0)])
    s = math.sqrt(0.5)
    sq = solve_rank1(square, Rank1Seminorm([0.0, 1.0]))
    box_lam, box_tor = rank1_box(box, axis=1)
    kj = math.pi**2 / (4.0 * math.sqrt(3.0))

    rows = [
        ("triangle v=(0,1) T", solve_rank1(tri, Rank1Seminorm([0.0, 1.0])).torsion, 1.0 / 48.0, "1/48"),
        ("triangle v=(1,1)/sqrt(2) T", solve_rank1(tri, Rank1Seminorm([s, s])).torsion, 1.0 / 96.0, "1/96"),
        ("square |xi_2| lambda", sq.lambda_, math.pi**2, "pi^2"),
        ("square |xi_2| T", sq.torsion, 1.0 / 12.0, "1/12"),
        ("box (0,1)x(0,2) e_2 lambda", box_lam, math.pi**2 / 4.0, "pi^2/4"),
        ("box (0,1)x(0,2) e_2 T", box_tor, 2.0 / 3.0, "2/3"),
        ("ellipse (2,1) e_1 lambda", lambda_rank1_ellipsoid([2.0, 1.0], [1.0, 0.0]), math.pi**2 / 16.0, "pi^2/16"),
        ("ellipse (2,1) e_1 T", torsion_rank1_ellipsoid([2.0, 1.0], [1.0, 0.0]), 2.0 * math.pi, "2*pi"),
        ("ellipse (2,1) e_2 lambda", lambda_rank1_ellipsoid([2.0, 1.0], [0.0, 1.0]), math.pi**2 / 4.0, "pi^2/4"),
        ("ellipse (2,1) e_2 T", torsion_rank1_ellipsoid([2.0, 1.0], [0.0, 1.0]), math.pi / 2.0, "pi/2"),
        ("ellipse (2,1) T_max", t_max_ellipsoid([2.0, 1.0]), 2.0 * math.pi, "2*pi"),
        ("disc euclidean T", torsion_euclid_ellipsoid([1.0, 1.0]), math.pi / 8.0, "pi/8"),
        ("ball quadratic alphas=(1,1/2) T", torsion_quadratic_ball([1.0, 0.5]), math.pi / 5.0, "pi/5"),
        ("m_tilde disc q=0", m_tilde_q_ellipsoid([1.0, 1.0], 0.0)[0], math.pi**2 / 4.0, "pi^2/4"),
        ("m_tilde disc q=1", m_tilde_q_ellipsoid([1.0, 1.0], 1.0)[0], math.pi**3 / 16.0, "pi^3/16"),
        ("q_E (1,1)", q_threshold_ellipsoid([1.0, 1.0]), 2.0, "2"),
        ("q_E (2,1)", q_threshold_ellipsoid([2.0, 1.0]), 1.0 + math.log(2.0) / math.log(1.25), "1+log(2)/log(5/4)"),
        ("KJ sequence d=2 k=1 q=1/2 n=1", kj_sequence_value(2, 1, 0.5, 1), kj, "pi^2/(4*sqrt(3))"),
        ("KJ sequence d=2 k=1 q=1/2 n=10", kj_sequence_value(2, 1, 0.5, 10), kj / 10.0, "pi^2/(4*sqrt(3))/10"),
        ("KJ sequence d=2 k=1 q=1/2 n=100", kj_sequence_value(2, 1, 0.5, 100), kj / 100.0, "pi^2/(4*sqrt(3))/100"),
    ]
    return rows


def _cmd_reproduce(args) -> tuple:
    lines = []
    all_pass = True
    for name, computed, expected, label in _reproduce_rows():
        ok = abs(computed - expected) <= 1e-10 * max(1.0, abs(expected))
        all_pass = all_pass and ok
        lines.append(f"{name}: computed {computed:.8f} expected {label} {'PASS' if ok else 'FAIL'}")
    return "\n".join(lines) + "\n", 0 if all_pass else 1


def _cmd_kj_demo(args) -> tuple:
    ns = _parse_n_list(args.n)
    rows = [(n, kj_sequence_value(args.d, args.k, args.q, n)) for n in ns]
    if args.format == "json":
        report = {
            "command": "kj-demo",
            "d": args.d,
            "k": args.k,
            "q": args.q,
            "rows": [{"n": n, "value": v} for n, v in rows],
        }
        return canonical_json(report), 0
    lines = ["n,value"] + [f"{n},{v:.12e}" for n, v in rows]
    return "\n".join(lines) + "\n", 0


_SPEC_KEYS = {
    "domain": "domain",
    "seminorm": "seminorm",
    "q": "q",
    "q_grid": "q_grid",
    "q-grid": "q_grid",
    "mode": "mode",
    "class": "seminorm_class",
    "seminorm_class": "seminorm_class",
    "h": "h",
    "richardson": "richardson",
    "out": "out",
    "format": "format",
    "d": "d",
    "k": "k",
    "n": "n",
}


def _apply_spec_file(args) -> None:
    """Fill flags that were not given explicitly from a JSON run spec."""
    if getattr(args, "spec", None) is None:
        return
    obj = _load_json_arg(args.spec, "spec")
    if not isinstance(obj, dict):
        raise InputError("run spec must be a JSON object")
    cmd = obj.pop("command", None)
    if cmd is not None and cmd != args.command:
        raise InputError(f"spec file is for command '{cmd}', not '{args.command}'")
    for key, value in obj.items():
        attr = _SPEC_KEYS.get(key)
        if attr is None:
            raise InputError(f"unknown run spec field '{key}'")
        if not hasattr(args, attr):
            raise InputError(f"field '{key}' does not apply to '{args.command}'")
        current = getattr(args, attr)
        if current is None or current is False:
            if attr in ("domain", "seminorm") and isinstance(value, dict):
                value = json.dumps(value)
            setattr(args, attr, value)


def _add_common(p, *, domain=False, seminorm=False, fmt="json") -> None:
    if domain:
        p.add_argument("--domain", help="domain JSON (inline or file path)")
    if seminorm:
        p.add_argument("--seminorm", help="seminorm JSON (inline or file path)")
    p.add_argument("--h", type=float, default=None, help="FEM target mesh size override")
    p.add_argument("--richardson", action="store_true", help="extrapolate from a nested mesh pair")
    p.add_argument("--out", default=None, help="also write the report to this path")
    p.add_argument("--format", choices=("json", "csv"), default=fmt)
    p.add_argument("--spec", default=None, help="JSON file of run parameters; explicit flags win")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anisospec",
        description="Anisotropic eigenvalue/torsion products on polygons, boxes and ellipsoids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate lambda_H * T_H^q for one seminorm")
    _add_common(p, domain=True, seminorm=True)
    p.add_argument("--q", type=float, default=None, help="torsion exponent")

    p = sub.add_parser("optimize", help="optimize the product over a seminorm family")
    _add_common(p, domain=True)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--mode", choices=("min", "max"), default="min")
    p.add_argument("--class", dest="seminorm_class", choices=("rank1", "quadratic"), default="quadratic")

    p = sub.add_parser("sweep", help="optimize over a grid of exponents and bracket the boundary flip")
    _add_common(p, domain=True, fmt="csv")
    p.add_argument("--q-grid", dest="q_grid", default=None, help="a:b:step, inclusive")
    p.add_argument("--mode", choices=("min", "max"), default="min")
    p.add_argument("--class", dest="seminorm_class", choices=("rank1", "quadratic"), default="quadratic")

    p = sub.add_parser("bounds", help="check the product against its measure bounds")
    _add_common(p, domain=True, seminorm=True)

    p = sub.add_parser("reproduce", help="recompute the pinned reference constants")
    p.add_argument("--out", default=None)

    p = sub.add_parser("kj-demo", help="print the degenerate product sequence over n")
    p.add_argument("--d", type=int, default=2, help="ambient dimension")
    p.add_argument("--k", type=int, default=1, help="kernel codimension")
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--n", default="1,10,100", help="comma list of sequence indices")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="csv")

    return parser


_HANDLERS = {
    "eval": _cmd_eval,
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
    "bounds": _cmd_bounds,
    "reproduce": _cmd_reproduce,
    "kj-demo": _cmd_kj_demo,
}


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            flag = "--" + name.replace("_", "-")
            raise InputError(f"{args.command} needs {flag}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _apply_spec_file(args)
        if args.command in ("eval",):
            _require(args, "domain", "seminorm", "q")
        elif args.command == "optimize":
            _require(args, "domain", "q")
        elif args.command == "sweep":
            _require(args, "domain", "q_grid")
        elif args.command == "bounds":
            _require(args, "domain", "seminorm")
        text, code = _HANDLERS[args.command](args)
    except (InputError, DegenerateSeminormError, json.JSONDecodeError, ValueError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2
    except (SolverError, MeshError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 3
    sys.stdout.write(text)
    if args.out is not None:
        Path(args.out).write_text(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

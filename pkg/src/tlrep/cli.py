"""Command-line front end.

Every command prints one JSON document (``{"meta": ..., "result": ...}``) on
stdout or to ``--out`` and a short summary on stderr.  Exit status is 0 on
success, 1 when a verification verdict fails and 2 for bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from importlib import metadata

import numpy as np

from . import braid, catalog, jwtower, qsu2, scanner, tlcore
from .densec import Tolerance, matrix_from_dict
from .errors import TLRepError

TOL_ENV = "TLREP_TOL"


# -- JSON output --------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, complex):
        return _fmt([x.real, x.imag])
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    return _fmt(obj)


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


# -- argument helpers ---------------------------------------------------------

def _scalar(text: str):
    t = text.strip()
    if t.lower() in ("true", "false"):
        return t.lower() == "true"
    for conv in (int, float):
        try:
            return conv(t)
        except ValueError:
            pass
    try:
        return complex(t.replace("i", "j"))
    except ValueError:
        return t


def _params(args) -> dict:
    out = {}
    for item in args.param or []:
        if "=" not in item:
            raise ValueError(f"--param expects k=v, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _scalar(v)
    for name in ("q", "zeta", "s"):
        val = getattr(args, name, None)
        if val is not None:
            out[name] = _scalar(str(val))
    return out


def _tol(args) -> Tolerance:
    return Tolerance(abs=args.tol)


def _entry(args) -> catalog.CatalogEntry:
    return catalog.build(args.catalog, **_params(args))


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _load_t(args) -> tuple[np.ndarray, int, tlcore.CoeffSet | None]:
    """T from ``--catalog``, ``--t`` (matrix file) or ``--coeffs`` (CoeffSet file)."""
    if args.catalog:
        e = _entry(args)
        return e.t, e.n, e.cs
    if getattr(args, "t", None):
        t = matrix_from_dict(_load_json(args.t))
        n = int(round(math.sqrt(t.shape[0])))
        if n * n != t.shape[0]:
            raise ValueError("T must be n^2 x n^2")
        return t, n, None
    if getattr(args, "coeffs", None):
        cs = tlcore.CoeffSet.from_dict(_load_json(args.coeffs))
        t, _ = tlcore.tl_matrix(cs, _tol(args))
        return t, cs.n, cs
    raise ValueError("give one of --catalog, --t or --coeffs")


# -- commands -----------------------------------------------------------------

def cmd_verify(args):
    t, n, cs = _load_t(args)
    tol = _tol(args)
    v = tlcore.check_axioms(t, n, tol)
    res = {"verdict": v.to_dict(), "n": n}
    if cs is not None:
        w = tlcore.w_criterion(cs, tol)
        tc = tlcore.trace_criterion(cs, tol)
        res["w_criterion"] = {"q_value": w.q_value, "residual": w.residual, "pass": w.passed}
        res["trace_criterion"] = {"lhs": tc.lhs, "rhs": tc.rhs, "q_if_pass": tc.q_if_pass,
                                  "holds": tc.holds()}
    return res, v.passed, f"verify: {v.status}, Q = {v.q_value:.12g}"


def cmd_catalog(args):
    if args.action == "list":
        return {"ids": catalog.list_ids()}, True, f"{len(catalog.REGISTRY)} catalog families"
    if not args.id:
        raise ValueError("catalog build needs an id")
    e = catalog.build(args.id, **_params(args))
    return e.to_dict(), True, f"built {e.id}: n={e.n}, r={e.r}, Q={e.expected_q:.12g}"


def _scan_common(args, fn, what):
    if args.sweep:
        hits = fn(args.spin, sweep=True, q_range=(args.q_min, args.q_max), grid=args.grid)
    else:
        if args.q is None:
            raise ValueError("give --q or --sweep")
        hits = fn(args.spin, qsu2.QContext(float(args.q)))
    out = []
    for h in hits:
        d = h.to_dict()
        if len(h.labels) == 2:
            d["family"] = qsu2.pair_family(*h.labels)
        out.append(d)
    return {"spin": args.spin, "hits": out}, True, f"{what}: {len(out)} hit(s)"


def cmd_scan_vectors(args):
    return _scan_common(args, qsu2.scan_vectors, "scan-vectors")


def cmd_scan_pairs(args):
    return _scan_common(args, qsu2.scan_pairs, "scan-pairs")


def _basis(arg: str):
    if arg.startswith("cg:"):
        s, q = arg[3:].split(",")
        mats, labels = scanner.cg_scan_basis(float(s), float(q))
        return mats, labels
    data = _load_json(arg)
    mats = data["vs"] if isinstance(data, dict) else data
    return [matrix_from_dict(m) for m in mats], None


def cmd_scan_subsets(args):
    mats, labels = _basis(args.basis)
    cfg = scanner.ScanConfig(tuple(mats), max_rank=args.max_rank,
                             include_high_ranks=args.high_ranks, tol=_tol(args),
                             parallelism=args.jobs,
                             labels=tuple(labels) if labels else None)
    hits = scanner.scan(cfg)
    rep = scanner.scan_report(hits, cfg)
    return ({"hits": [h.to_dict(cfg.labels) for h in hits], "report": rep}, True,
            f"scan-subsets: {len(hits)} hit(s) over ranks {cfg.rank_list()}")


def cmd_jw(args):
    rep = jwtower.jw_report(args.n, args.r, args.n_max, args.q)
    res = rep.to_dict()
    res["closed_form_residual"] = jwtower.closed_form_residual(args.n, args.r, args.n_max)
    return res, True, f"jw: allowed Q = {rep.allowed_q}"


def cmd_ybe(args):
    t, n, _ = _load_t(args)
    fam = braid.make_family(t, n, _tol(args))
    rep = braid.ybe_report(fam)
    rep["q_root"] = [fam.q_root.real, fam.q_root.imag]
    rep["Q"] = fam.q_cap
    ok = rep["max_residual"] <= args.tol
    return rep, ok, f"ybe: {fam.branch} branch, max residual {rep['max_residual']:.3e}"


def cmd_bounds(args):
    t, n, cs = _load_t(args)
    tol = _tol(args)
    v = tlcore.check_axioms(t, n, tol)
    if cs is None:
        cs = tlcore.coeffset_from_projection(t / v.q_value, n) if v.q_value > 0 else None
    if not v.passed or cs is None:
        return {"verdict": v.to_dict()}, False, "bounds: input is not a verified solution"
    rep = tlcore.bound_suite(cs, v)
    res = rep.to_dict()
    res["all_satisfied"] = rep.all_satisfied
    return res, rep.all_satisfied, f"bounds: all satisfied = {rep.all_satisfied}"


COMMANDS = {
    "verify": cmd_verify,
    "catalog": cmd_catalog,
    "scan-vectors": cmd_scan_vectors,
    "scan-pairs": cmd_scan_pairs,
    "scan-subsets": cmd_scan_subsets,
    "scan": cmd_scan_subsets,
    "jw": cmd_jw,
    "ybe": cmd_ybe,
    "bounds": cmd_bounds,
}


def _default_tol() -> float:
    env = os.environ.get(TOL_ENV)
    if env is None:
        return 1e-9
    try:
        val = float(env)
    except ValueError:
        raise SystemExit(f"{TOL_ENV} must be a number, got {env!r}") from None
    return val


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--tol", type=float, default=None,
                        help=f"absolute tolerance (default 1e-9, or ${TOL_ENV})")
    common.add_argument("--config", help="JSON file with flag values; explicit flags win")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--catalog", help="catalog id, e.g. xxz or tower:rank2-n2:2")
    source.add_argument("--param", action="append", metavar="K=V", help="catalog parameter")
    source.add_argument("--q", help="shortcut for --param q=...")
    source.add_argument("--zeta", help="shortcut for --param zeta=... (accepts 1j or i)")
    source.add_argument("--t", help="matrix JSON file holding T")
    source.add_argument("--coeffs", help="CoeffSet JSON file")

    p = argparse.ArgumentParser(prog="tlrep", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("verify", parents=[common, source], help="check the TL relations")
    sub.add_parser("bounds", parents=[common, source], help="evaluate the bounds on Q")
    sub.add_parser("ybe", parents=[common, source], help="Yang-Baxter residual on the default grid")

    c = sub.add_parser("catalog", parents=[common], help="list or build catalog entries")
    c.add_argument("action", choices=["list", "build"])
    c.add_argument("id", nargs="?")
    c.add_argument("--param", action="append", metavar="K=V")

    for name in ("scan-vectors", "scan-pairs"):
        s = sub.add_parser(name, parents=[common], help=f"{name.split('-')[1]} of CG eigenvectors")
        s.add_argument("--spin", type=float)
        s.add_argument("--q", type=float)
        s.add_argument("--sweep", action="store_true", help="scan q over [--q-min, --q-max]")
        s.add_argument("--q-min", type=float, default=qsu2.DEFAULT_Q_RANGE[0])
        s.add_argument("--q-max", type=float, default=qsu2.DEFAULT_Q_RANGE[1])
        s.add_argument("--grid", type=int, default=qsu2.DEFAULT_GRID)

    for name in ("scan-subsets", "scan"):
        s = sub.add_parser(name, parents=[common], help="exhaustive basis-subset search")
        s.add_argument("--basis", help="matrix-list JSON file or cg:S,q")
        s.add_argument("--max-rank", type=int)
        s.add_argument("--high-ranks", action="store_true")
        s.add_argument("--jobs", type=int, default=1)

    j = sub.add_parser("jw", parents=[common], help="Jones-Wenzl traces and admissible Q")
    j.add_argument("--n", type=int)
    j.add_argument("--r", type=int)
    j.add_argument("--n-max", type=int, default=10)
    j.add_argument("--q", type=float, help="also list rho_N at this Q")
    return p


REQUIRED = {"scan-vectors": ["spin"], "scan-pairs": ["spin"], "scan-subsets": ["basis"],
            "scan": ["basis"], "jw": ["n", "r"]}


def _parse(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    parser = build_parser()
    if known.config:
        try:
            cfg = _load_json(known.config)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config: {exc}")
        if not isinstance(cfg, dict):
            parser.error("config must be a JSON object")
        # config values become defaults, so explicit flags still win
        for sub in parser._subparsers._group_actions[0].choices.values():
            sub.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    args = parser.parse_args(argv)
    missing = [f"--{k.replace('_', '-')}" for k in REQUIRED.get(args.command, [])
               if getattr(args, k, None) is None]
    if missing:
        parser.error(f"{args.command}: missing required option(s) {', '.join(missing)}")
    if args.tol is None:
        args.tol = _default_tol()
    if args.tol <= 0:
        parser.error("--tol must be positive")
    return args


def main(argv=None) -> int:
    args = _parse(sys.argv[1:] if argv is None else argv)
    try:
        result, ok, summary = COMMANDS[args.command](args)
    except (TLRepError, ValueError, KeyError, OSError) as exc:
        print(f"tlrep {args.command}: error: {exc}", file=sys.stderr)
        return 2
    doc = {"meta": {"tool": "tlrep", "version": _version(), "command": args.command,
                    "tol": args.tol},
           "result": result, "ok": ok}
    text = dumps(doc) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(summary, file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

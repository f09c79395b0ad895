"""Command line entry point: ``index``, ``lderivative`` and ``check``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import specfile
from .checks import DEFAULT_SEED, SUITES
from .finite import find_critical_point, hessian_index_nullity, is_morse_pair, l_space
from .grassmannian import intersection_dim, vertical
from .jacobi import NumericalDegeneracyError, refine_to_limit, run_recursion, vertical_frame
from .morse import OracleSizeError, hessian_oracle_index, index_report

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_NONCONVERGED, EXIT_MISMATCH = 0, 1, 2, 3, 4

log = logging.getLogger("maslov_morse")


def _setup_logging():
    level = os.environ.get("MASLOV_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), format="%(levelname)s %(message)s",
                        stream=sys.stderr)


def _write_json(path: Path, doc: dict):
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def write_curve_csv(path: Path, times, frames, terms, n: int):
    """Rows ``time, dim_intersection_with_vertical, cumulative_pair_index``."""
    pi = vertical_frame(n)
    total = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time", "dim_intersection_with_vertical", "cumulative_pair_index"])
        for i, (t, f) in enumerate(zip(times, frames)):
            if i > 0:
                total += terms[i - 1]
            w.writerow([repr(float(t)), intersection_dim(f, pi), total])


def cmd_index(args) -> int:
    doc = specfile.load(args.spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if doc["type"] == "finite":
        return _finite_index(doc, out)
    prob = specfile.build_jacobi(doc)
    if args.N is not None:
        doc.setdefault("partition", {})["N"] = args.N
        doc["partition"].pop("points", None)
    part = specfile.partition_for(doc, prob.t1)
    tol = args.tol if args.tol is not None else doc.get("tolerances", {}).get("eig", 1e-8)
    want_oracle = args.oracle or doc.get("oracle", False)
    start = time.perf_counter()
    curve = run_recursion(prob, part)
    rep = index_report(prob, curve)
    if want_oracle:
        rep.oracle_index, rep.oracle_nullity = hessian_oracle_index(prob, part, tol=tol)
    log.info("index computed in %.3f s", time.perf_counter() - start)
    _write_json(out / "report.json", rep.to_dict())
    write_curve_csv(out / "curve.csv", part, curve.frames, rep.pair_terms, prob.n)
    print(f"piecewise_index={rep.piecewise_index}" + (f" oracle_index={rep.oracle_index}" if want_oracle else ""))
    if want_oracle and rep.oracle_index != rep.piecewise_index:
        print("error: crossing count and oracle disagree", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def _finite_index(doc: dict, out: Path) -> int:
    prob = specfile.build_finite(doc)
    pt = doc["point"]
    u, p = np.asarray(pt["u"], float), np.asarray(pt["p"], float)
    if u.shape != (prob.m,) or p.shape != (prob.n,):
        raise specfile.SpecError(f"field 'point': expected u of length {prob.m} and p of length {prob.n}")
    if pt.get("newton"):
        cp = find_critical_point(prob, u, p, prob.Phi(u))
        u, p = cp.u, cp.p
    ind, nul = hessian_index_nullity(prob, u, p)
    frame = l_space(prob, u, p)
    rep = {
        "index": ind,
        "nullity": nul,
        "vertical_intersection": intersection_dim(frame, vertical(frame.space)),
        "morse_pair": is_morse_pair(prob, u, p),
        "u": u.tolist(),
        "p": p.tolist(),
        "l_space": frame.basis.tolist(),
    }
    _write_json(out / "report.json", rep)
    print(f"index={ind} nullity={nul}")
    return EXIT_OK


def cmd_lderivative(args) -> int:
    doc = specfile.load(args.spec)
    if doc["type"] != "jacobi":
        raise specfile.SpecError("field 'type': lderivative needs a jacobi problem")
    prob = specfile.build_jacobi(doc)
    tol = args.refine_tol if args.refine_tol is not None else doc.get("tolerances", {}).get("refine", 1e-6)
    n0 = int(doc.get("partition", {}).get("N", 16))
    frame, info = refine_to_limit(prob, tol=tol, max_depth=args.max_depth, n0=n0)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = {
        "converged": info["converged"],
        "N": info["N"],
        "distances": info["distances"],
        "frame": frame.basis.tolist(),
        "vertical_intersection": intersection_dim(frame, vertical_frame(prob.n)),
    }
    _write_json(out / "report.json", rep)
    print(f"converged={info['converged']} N={info['N'][-1]}")
    return EXIT_OK if info["converged"] else EXIT_NONCONVERGED


def cmd_check(args) -> int:
    ok = True
    for name, fn in SUITES.items():
        res = fn(args.trials, args.seed)
        print(f"{name}: {res.passed}/{res.total}")
        if not res.ok:
            ok = False
            for f in res.failures:
                print(f"  reproduce with seed {f['seed']}: {f['detail']}")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maslov-morse", description="Morse indices of second variations from Jacobi curves.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="crossing-count index of a problem file")
    p.add_argument("spec")
    p.add_argument("--N", type=int, help="uniform partition size (overrides the file)")
    p.add_argument("--oracle", action="store_true", help="also run the brute-force Hessian eigencount")
    p.add_argument("--tol", type=float, help="eigenvalue zero threshold for the oracle")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("lderivative", help="refine the end frame until it settles")
    p.add_argument("spec")
    p.add_argument("--refine-tol", type=float)
    p.add_argument("--max-depth", type=int, default=8)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_lderivative)

    p = sub.add_parser("check", help="run the randomized invariant suites")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (specfile.SpecError, OracleSizeError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalDegeneracyError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())

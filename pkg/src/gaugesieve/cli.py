"""``gauge-sieve`` command line front end.

Exit codes: 0 success, 1 bad input, 2 EMPTY, 3 budget exhausted,
4 solver disagreed with the oracle under ``--verify``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import numpy as np

from gaugesieve import oracle
from gaugesieve.cvp import approx_cvp, exact_cvp
from gaugesieve.geometry import GeometryError, barycenter_approx, estimate_gamma, volume_ratio_estimate
from gaugesieve.instances import GENERATOR_KINDS, Instance, InstanceError, blowup_point, generate
from gaugesieve.ip import IPStatus, OptStatus, approx_ip, approx_opt, blowup_membership, derive_seed, ip_gauge_test
from gaugesieve.lattice import Subspace, in_lattice, in_subspace
from gaugesieve.linalg import dot, fmt_rational, qvec
from gaugesieve.report import SCHEMA, SolveStatus
from gaugesieve.sieve import SieveConfig, approx_sap, exact_sap

EXIT_OK, EXIT_INPUT, EXIT_EMPTY, EXIT_BUDGET, EXIT_VIOLATION = 0, 1, 2, 3, 4
SOLVERS = ("cvp", "sap", "svp", "ip-feasible", "ip-optimize", "gamma", "barycenter")


class InputError(Exception):
    pass


SUBCOMMAND_HELP = {
    "cvp": "closest lattice vector to the target",
    "sap": "short lattice vector outside the subspace",
    "svp": "shortest non-zero lattice vector",
    "ip-feasible": "lattice point in K or a slight blowup of K",
    "ip-optimize": "approximately maximise a linear objective over lattice points of K",
    "gamma": "estimate the symmetry of the body",
    "barycenter": "estimate the centroid of the body",
}


def _rational(q: Fraction) -> dict:
    return {"decimal": float(q), "rational": fmt_rational(q)}


def load_instance(path: str) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return Instance.from_dict(data)
    except (InstanceError, GeometryError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _param(args, inst: Instance, name: str, default=None):
    val = getattr(args, name, None)
    if val is not None:
        return val
    return inst.params.get(name, default)


def sieve_config(args, inst: Instance) -> SieveConfig:
    return SieveConfig(
        seed=int(_param(args, inst, "seed", 0)),
        budget_multiplier=float(_param(args, inst, "budget_multiplier", 1.0)),
        max_pairs=_param(args, inst, "max_pairs"),
        gamma=_param(args, inst, "gamma", inst.params.get("gamma_override")),
        max_stages=args.max_stages,
        sampler=args.sampler.replace("hitandrun", "hit-and-run"),
        burn_in=args.burn_in,
    )


def _ratio_check(value: Optional[Fraction], best: Fraction, eps: float, exact: bool) -> dict:
    block: dict[str, Any] = {"optimum": _rational(best)}
    if value is None:
        block["agrees"] = None
        return block
    block["ratio"] = None if best == 0 else float(value / best)
    if exact:
        block["agrees"] = value == best
    else:
        block["agrees"] = best <= value <= (1 + Fraction(eps)) * best * (1 + Fraction(1, 10**9))
    return block


def solve_cvp(args, inst: Instance) -> tuple[int, dict]:
    if inst.target is None:
        raise InputError("cvp needs a target (instance field or --target)")
    C, B, x = inst.body, inst.lattice, inst.target
    _require_zero_centered(C)
    if args.exact:
        res = oracle.cvp_brute(C, B, x, args.max_n_oracle)
        return EXIT_OK, _oracle_report("cvp", res)
    cfg = sieve_config(args, inst)
    t = _param(args, inst, "exact_t")
    eps = float(_param(args, inst, "eps", 0.25))
    rep = exact_cvp(C, B, x, float(t), cfg) if t is not None else approx_cvp(C, B, x, eps, cfg)
    out = rep.to_dict()
    code = _status_code(rep.status)
    if args.verify:
        best = oracle.cvp_brute(C, B, x, args.max_n_oracle)
        block = _ratio_check(rep.value, best.value, rep.params["eps"], t is not None)
        if rep.found and not in_lattice(B, rep.vector):
            block["agrees"] = False
        out["oracle"] = block
        if block["agrees"] is False:
            code = EXIT_VIOLATION
    return code, out


def solve_sap(args, inst: Instance, svp: bool = False) -> tuple[int, dict]:
    C, B = inst.body, inst.lattice
    _require_zero_centered(C)
    M = Subspace.zero(B.dim) if svp or inst.subspace is None else inst.subspace
    kind = "svp" if svp else "sap"
    if args.exact:
        return EXIT_OK, _oracle_report(kind, oracle.sap_brute(C, B, M, args.max_n_oracle))
    cfg = sieve_config(args, inst)
    t = _param(args, inst, "exact_t")
    eps = float(_param(args, inst, "eps", 0.5))
    rep = exact_sap(C, B, M, float(t), cfg) if t is not None else approx_sap(C, B, M, eps, cfg)
    rep.kind = kind
    out = rep.to_dict()
    code = _status_code(rep.status)
    if args.verify:
        best = oracle.sap_brute(C, B, M, args.max_n_oracle)
        block = _ratio_check(rep.value, best.value, rep.params["eps"], t is not None)
        if rep.found and (not in_lattice(B, rep.vector) or in_subspace(M, rep.vector)):
            block["agrees"] = False
        out["oracle"] = block
        if block["agrees"] is False:
            code = EXIT_VIOLATION
    return code, out


def solve_ip(args, inst: Instance) -> tuple[int, dict]:
    K, B = inst.body, inst.lattice
    if args.exact:
        p = oracle.ip_brute(K, B, args.max_n_oracle)
        out = {"kind": "ip-feasible", "status": "EMPTY" if p is None else "FOUND_IN_K", "solver": "oracle"}
        out["vector"] = None if p is None else [fmt_rational(v) for v in p]
        return (EXIT_EMPTY if p is None else EXIT_OK), out
    cfg = sieve_config(args, inst)
    eps = float(_param(args, inst, "eps", 0.5))
    res = approx_ip(K, B, eps, cfg)
    out = res.to_dict()
    out["params"].update(cfg.params())
    code = {IPStatus.EMPTY: EXIT_EMPTY, IPStatus.BUDGET_EXHAUSTED: EXIT_BUDGET}.get(res.status, EXIT_OK)
    if args.verify:
        inside = oracle.ip_brute(K, B, args.max_n_oracle)
        grown = blowup_point(K, B, eps)
        block = {"point_in_K": inside is not None, "point_in_blowup": grown is not None}
        if res.found:
            agrees = ip_gauge_test(K, res.barycenter, res.point, eps) and in_lattice(B, res.point)
        elif res.status is IPStatus.EMPTY:
            agrees = inside is None
        else:
            agrees = None
        block["agrees"] = agrees
        out["oracle"] = block
        if agrees is False:
            code = EXIT_VIOLATION
    return code, out


def solve_opt(args, inst: Instance) -> tuple[int, dict]:
    K, B = inst.body, inst.lattice
    if inst.objective is None:
        raise InputError("ip-optimize needs an objective")
    v = inst.objective
    delta = args.delta if args.delta is not None else (float(inst.delta) if inst.delta is not None else 0.1)
    if args.exact:
        pts = oracle.ip_points(K, B, args.max_n_oracle)
        if not pts:
            return EXIT_EMPTY, {"kind": "ip-optimize", "status": "EMPTY", "solver": "oracle"}
        best = max(pts, key=lambda p: dot(v, p))
        return EXIT_OK, {
            "kind": "ip-optimize",
            "status": "SOLVED",
            "solver": "oracle",
            "vector": [fmt_rational(c) for c in best],
            "value": _rational(dot(v, best)),
        }
    cfg = sieve_config(args, inst)
    eps = float(_param(args, inst, "eps", 0.5))
    res = approx_opt(K, B, v, eps, delta, cfg)
    out = res.to_dict()
    out["params"] = {"eps": eps, "delta": delta, **cfg.params()}
    code = {OptStatus.EMPTY: EXIT_EMPTY, OptStatus.BUDGET_EXHAUSTED: EXIT_BUDGET, OptStatus.ITERATION_CAP: EXIT_BUDGET}.get(
        res.status, EXIT_OK
    )
    if args.verify:
        pts = oracle.ip_points(K, B, args.max_n_oracle)
        block: dict[str, Any] = {"feasible": bool(pts)}
        if pts:
            opt = max(dot(v, p) for p in pts)
            block["optimum"] = _rational(opt)
        if res.point is not None:
            member = blowup_membership(K, eps, res.point)
            block["blowup_membership"] = member
            block["agrees"] = member and (not pts or res.value >= opt - Fraction(delta))
        else:
            block["agrees"] = not pts if res.status is OptStatus.EMPTY else None
        out["oracle"] = block
        if block["agrees"] is False:
            code = EXIT_VIOLATION
    return code, out


def solve_gamma(args, inst: Instance) -> tuple[int, dict]:
    C = inst.body
    _require_zero_centered(C)
    seed = int(_param(args, inst, "seed", 0))
    p, se = volume_ratio_estimate(C, args.samples, seed)
    return EXIT_OK, {
        "kind": "gamma",
        "status": "OK",
        "value": estimate_gamma(C, args.samples, seed),
        "volume_ratio": p,
        "standard_error": se,
        "samples": args.samples,
        "seed": seed,
    }


def solve_barycenter(args, inst: Instance) -> tuple[int, dict]:
    seed = int(_param(args, inst, "seed", 0))
    eps = float(_param(args, inst, "eps", 1 / 3))
    b = barycenter_approx(inst.body, eps, seed=seed)
    return EXIT_OK, {"kind": "barycenter", "status": "OK", "vector": b.tolist(), "eps": eps, "seed": seed}


def _require_zero_centered(C):
    if not C.origin_interior:
        raise InputError("the body must contain the origin in its interior")


def _status_code(status: SolveStatus) -> int:
    return {SolveStatus.EMPTY: EXIT_EMPTY, SolveStatus.BUDGET_EXHAUSTED: EXIT_BUDGET, SolveStatus.NOT_FOUND: EXIT_BUDGET}.get(
        status, EXIT_OK
    )


def _oracle_report(kind: str, res) -> dict:
    return {
        "kind": kind,
        "status": "OK",
        "solver": "oracle",
        "vector": [fmt_rational(v) for v in res.vector],
        "coeffs": list(res.coeffs),
        "value": _rational(res.value),
    }


DISPATCH = {
    "cvp": solve_cvp,
    "sap": solve_sap,
    "svp": lambda a, i: solve_sap(a, i, svp=True),
    "ip-feasible": solve_ip,
    "ip-optimize": solve_opt,
    "gamma": solve_gamma,
    "barycenter": solve_barycenter,
}


def run_one(args, path: str) -> tuple[int, dict]:
    try:
        inst = load_instance(path)
        if args.target is not None:
            inst.target = qvec(args.target.split(","))
            if len(inst.target) != inst.dim:
                raise InputError("--target has wrong dimension")
        start = time.perf_counter()
        code, out = DISPATCH[args.command](args, inst)
        if args.timing:
            out["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    except (InputError, oracle.OracleCapError, GeometryError, ValueError) as exc:
        return EXIT_INPUT, {"schema": SCHEMA, "status": "INPUT_ERROR", "error": str(exc), "instance": path}
    return code, {"schema": SCHEMA, "instance": path, **out}


def _batch_job(job):
    args, path = job
    return run_one(args, path)


def run_batch(args) -> tuple[int, list]:
    paths = sorted(str(p) for p in Path(args.batch).glob("*.json"))
    if not paths:
        raise InputError(f"no instance files in {args.batch}")
    master = args.seed if args.seed is not None else 0
    jobs = []
    for i, p in enumerate(paths):
        a = argparse.Namespace(**vars(args))
        a.seed = derive_seed(master, i) % 2**31
        jobs.append((a, p))
    with ProcessPoolExecutor(max_workers=args.workers) as pool:
        results = list(pool.map(_batch_job, jobs))
    return max(code for code, _ in results), [out for _, out in results]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gauge-sieve", description="Lattice problems under polytope gauges.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("instance", nargs="?", help="instance JSON file")
    common.add_argument("--batch", metavar="DIR", help="solve every *.json in DIR")
    common.add_argument("--workers", type=int, default=None, help="processes for --batch")
    common.add_argument("--seed", type=int)
    common.add_argument("--eps", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--exact-t", dest="exact_t", type=float)
    common.add_argument("--budget-multiplier", dest="budget_multiplier", type=float)
    common.add_argument("--max-pairs", dest="max_pairs", type=int)
    common.add_argument("--gamma", type=float, help="override the symmetry estimate")
    common.add_argument("--max-stages", dest="max_stages", type=int)
    common.add_argument("--sampler", choices=("rejection", "hitandrun", "hit-and-run"), default="rejection")
    common.add_argument("--burn-in", dest="burn_in", type=int, default=200)
    common.add_argument("--target", help="comma-separated rationals overriding the instance target")
    common.add_argument("--exact", action="store_true", help="solve with the enumeration oracle")
    common.add_argument("--verify", action="store_true", help="compare against the enumeration oracle")
    common.add_argument("--max-n-oracle", dest="max_n_oracle", type=int, default=oracle.DEFAULT_MAX_N)
    common.add_argument("--samples", type=int, default=100_000, help="Monte-Carlo samples for gamma")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    for name in SOLVERS:
        sub.add_parser(name, parents=[common], help=SUBCOMMAND_HELP.get(name))

    gen = sub.add_parser("gen", help="emit a generated instance")
    gen.add_argument("kind", choices=GENERATOR_KINDS)
    gen.add_argument("--n", type=int, default=2)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--body", choices=("cube", "skew", "random"), default="cube")
    gen.add_argument("--eps", type=float, default=0.5)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "gen":
        try:
            print(generate(args.kind, args.n, args.seed, args.body, args.eps).dumps())
        except InstanceError as exc:
            print(json.dumps({"schema": SCHEMA, "status": "INPUT_ERROR", "error": str(exc)}), file=sys.stderr)
            return EXIT_INPUT
        return EXIT_OK
    try:
        if args.batch:
            code, out = run_batch(args)
        elif args.instance:
            code, out = run_one(args, args.instance)
        else:
            raise InputError("give an instance file or --batch DIR")
    except InputError as exc:
        print(json.dumps({"schema": SCHEMA, "status": "INPUT_ERROR", "error": str(exc)}))
        return EXIT_INPUT
    print(json.dumps(out, indent=2, sort_keys=True, default=_json_default))
    return code


def _json_default(obj):
    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serialisable: {type(obj).__name__}")


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: ``ellmirror verify|mirror|compose|inverse``.

Exit codes: 0 success (all checks pass), 1 a check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import fukaya as fk
from . import holo as ho
from . import mirror as mr
from . import numerics as nm
from . import verify as vf


class UsageError(Exception):
    pass


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _tau(text):
    try:
        return nm.UpperHalfParam.parse(text).tau
    except (ValueError, nm.DomainError) as exc:
        raise argparse.ArgumentTypeError(f"bad tau {text!r}: {exc}") from exc


def _emit(obj):
    print(json.dumps(obj, indent=2))


def cmd_verify(args) -> int:
    names = list(vf.CHECKS) if args.check == "all" else [args.check]
    if args.check != "all" and args.check not in vf.CHECKS:
        raise UsageError(f"unknown check {args.check!r}; choose from all, {', '.join(vf.CHECKS)}")
    cfg = vf.GeneratorConfig(seed=args.seed, count=args.count, tolerance=args.tol, cutoff=args.cutoff)
    if args.tau is not None:
        cfg.taus = (args.tau,)
    reports = [vf.run_check(name, cfg) for name in names]
    for r in reports:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag} {r.check:<24} deviation={r.deviation:.3e} tol={r.tolerance:.0e} "
              f"n={r.detail.get('instances')} time={r.seconds:.1f}s")
        if not r.passed:
            print(f"     worst instance: {r.instance}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([r.to_json(args.timings) for r in reports], fh, indent=2)
            fh.write("\n")
    return 0 if all(r.passed for r in reports) else 1


def cmd_mirror(args) -> int:
    data = _load(args.object)
    try:
        A = ho.object_from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"bad object: {exc}") from exc
    _emit(fk.object_to_json(mr.mirror_object(A)))
    return 0


def cmd_compose(args) -> int:
    try:
        f = ho.morphism_from_json(_load(args.f), args.tau)
        g = ho.morphism_from_json(_load(args.g), f.tau)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"bad morphism: {exc}") from exc
    if f.target != g.source:
        raise UsageError("target of f differs from source of g")
    gf = ho.compose(f, g)
    lhs = mr.mirror_morphism(gf)
    rhs = fk.compose_symp(mr.mirror_morphism(f), mr.mirror_morphism(g))
    diff = [np.max(np.abs(lhs.blocks[k] - rhs.blocks[k]), initial=0.0) for k in lhs.blocks]
    _emit({"holomorphic": ho.morphism_to_json(gf),
           "mirror_of_composite": fk.morphism_to_json(lhs),
           "composite_of_mirrors": fk.morphism_to_json(rhs),
           "deviation": float(max(diff, default=0.0))})
    return 0


def cmd_inverse(args) -> int:
    try:
        X = fk.object_from_json(_load(args.object))
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"bad object: {exc}") from exc
    out = ho.DbObject(())
    try:
        for S in X.summands:
            out = out + mr.mirror_inverse(S)
    except (fk.CaseError, mr.UnsupportedInput) as exc:
        raise UsageError(str(exc)) from exc
    _emit(ho.object_to_json(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ellmirror", description="Mirror functor for elliptic curves: checks and tools.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run one acceptance check, or all of them")
    v.add_argument("check", help="check name or 'all': " + ", ".join(vf.CHECKS))
    v.add_argument("--tau", type=_tau, help="single modulus B+Ai instead of the default three")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, help="override the check tolerance")
    v.add_argument("--cutoff", type=int, help="fixed half-width for every theta window and triangle lift range")
    v.add_argument("--count", type=int, help="number of random instances")
    v.add_argument("--json", metavar="PATH", help="write the reports as a JSON array")
    v.add_argument("--timings", action="store_true", help="include wall times in the JSON report")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("mirror", help="print the mirror of a holomorphic object")
    m.add_argument("object")
    m.set_defaults(func=cmd_mirror)

    c = sub.add_parser("compose", help="compose two holomorphic morphisms on both sides")
    c.add_argument("f")
    c.add_argument("g")
    c.add_argument("--tau", type=_tau, help="override the modulus stored in the files")
    c.set_defaults(func=cmd_compose)

    i = sub.add_parser("inverse", help="print a sheaf whose mirror is the given FK object")
    i.add_argument("object")
    i.set_defaults(func=cmd_inverse)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, nm.DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

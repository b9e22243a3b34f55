"""Command dispatch, file IO, and report emission.

Exit-code contract: 0 = holds/consistent, 2 = mathematical failure,
3 = inconclusive past the horizon, 64 = usage error.  JSON output is
byte-deterministic for identical invocations (sorted keys, no timestamps).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .amplitude import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    FilterSpec,
    ampleness_chain,
    amplitude_level_bound,
    estimate_f_amplitude,
    fujita_m0_search,
    p_ample_check,
    restriction_sandwich,
    t_ample_prefix,
    tensor_reg_bound,
)
from .functors import (
    BundleCatalog,
    frobenius_pullback,
    frobenius_pushforward,
    globally_generated,
    make_bundle,
    nlf_locus_dim,
    restrict_hyperplane,
    sym_power,
    twist,
)
from .fuzz import FuzzConfig, fuzz_stream, make_instance
from .modfile import ModuleFileError, format_module, parse_module
from .modules import line_bundle, structure_sheaf
from .resolve import betti, min_free_resolution
from .ring import GradedRing, PolyParseError, parse_poly
from .sentinel import NEG_INF, as_jsonable
from .sheafcoh import cohomology_table, level, reg_t

USAGE_EXIT = 64

VERBS = (
    "cohomology", "regularity", "level", "betti", "bundle", "twist", "sym",
    "frob", "frob-push", "restrict", "nlf", "globgen", "filter-check",
    "famp", "pamp", "verify", "fuzz",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _parse_range(text: str) -> tuple:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    v = int(text)
    return v, v


def _workers() -> int:
    raw = os.environ.get("AMPLE_FORGE_THREADS", "1")
    try:
        w = int(raw)
    except ValueError:
        raise SystemExit(f"AMPLE_FORGE_THREADS must be an integer, got {raw!r}")
    return max(1, w)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(obj, path: str | None) -> None:
    if path is None:
        return
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", path)


def _add_module_source(sp, with_d: bool = True) -> None:
    sp.add_argument("--module", help="module file path")
    sp.add_argument("--bundle", help="catalog bundle: structure|tangent|cotangent|canonical")
    if with_d:
        sp.add_argument("--d", type=int, default=0, help="twist for structure(d)")
    sp.add_argument("--n", type=int, help="projective dimension (with --bundle)")
    sp.add_argument("--p", type=int, help="prime (with --bundle)")


def _resolve_module(args):
    if getattr(args, "module", None):
        with open(args.module, "rb") as fh:
            return parse_module(fh.read())
    if getattr(args, "bundle", None):
        if args.n is None or args.p is None:
            raise SystemExit("--bundle needs --n and --p")
        ring = GradedRing(args.p, args.n + 1)
        d = getattr(args, "d", 0)
        d = d if isinstance(d, int) else 0
        return make_bundle(BundleCatalog(args.bundle, args.n, d=d), ring)
    raise SystemExit("need --module or --bundle")


def _verdict_exit(verdict: str) -> int:
    if verdict == HOLDS or verdict == "consistent":
        return 0
    if verdict == FAILS:
        return 2
    return 3


def build_parser() -> _Parser:
    ap = _Parser(prog="ampleforge", description=__doc__)
    sub = ap.add_subparsers(dest="verb")

    def new(name, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("--json", help="write JSON report to path ('-' = stdout)")
        sp.add_argument("--tsv", help="write TSV to path ('-' = stdout)")
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--horizon", type=int, default=None)
        sp.add_argument("--window", default=None, help="degree window lo..hi")
        return sp

    sp = new("cohomology")
    _add_module_source(sp, with_d=False)
    sp.add_argument("--i", default=None, help="cohomological range lo..hi")
    sp.add_argument("--d", default="-4..4", help="twist range lo..hi")

    sp = new("regularity")
    _add_module_source(sp)
    sp.add_argument("--t", type=int, default=0)

    sp = new("level")
    _add_module_source(sp)

    sp = new("betti")
    _add_module_source(sp)

    sp = new("bundle")
    sp.add_argument("--name", required=True)
    sp.add_argument("--d", type=int, default=0)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--out", default="-")

    for name, extra in (
        ("twist", [("--a", int, True)]),
        ("sym", [("--k", int, True)]),
        ("frob", [("--iterations", int, False)]),
        ("frob-push", []),
        ("restrict", [("--form", str, False)]),
    ):
        sp = new(name)
        _add_module_source(sp)
        for flag, typ, req in extra:
            sp.add_argument(flag, type=typ, required=req)
        sp.add_argument("--out", default="-")

    sp = new("nlf")
    _add_module_source(sp)

    sp = new("globgen")
    _add_module_source(sp)

    sp = new("filter-check")
    _add_module_source(sp)
    sp.add_argument("--kind", required=True,
                    choices=["line", "sym", "frob", "twisted-frob"])
    sp.add_argument("--t", type=int, default=0)
    sp.add_argument("--twist-h", type=int, default=0)

    sp = new("famp")
    _add_module_source(sp)

    sp = new("pamp")
    _add_module_source(sp)

    sp = new("verify")
    sp.add_argument("--suite", required=True,
                    choices=["sid", "chain72", "sandwich61", "cor42", "fujita"])
    sp.add_argument("--fuzz-count", type=int, default=50)
    sp.add_argument("--p", type=int, default=2)

    sp = new("fuzz")
    sp.add_argument("--shape", default="monomial_ideal")
    sp.add_argument("--count", type=int, default=3)
    sp.add_argument("--nvars", type=int, default=3)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--max-gen-degree", type=int, default=3)
    sp.add_argument("--max-gens", type=int, default=3)
    sp.add_argument("--out-dir", default=None)
    return ap


def _cmd_cohomology(args) -> int:
    M = _resolve_module(args)
    n = M.ring.projective_dim
    i_range = _parse_range(args.i) if args.i else (0, n)
    d_range = _parse_range(args.window if args.window else args.d)
    table = cohomology_table(M, i_range, d_range, workers=_workers())
    _emit(table.to_tsv(), args.tsv or ("-" if not args.json else None))
    _emit_json(table.to_json_dict(), args.json)
    return 0 if table.euler_ok else 2


def _cmd_regularity(args) -> int:
    M = _resolve_module(args)
    v = reg_t(M, args.t)
    print(f"reg_{args.t} = {as_jsonable(v)}")
    _emit_json({"t": args.t, "reg": as_jsonable(v)}, args.json)
    return 0


def _cmd_level(args) -> int:
    M = _resolve_module(args)
    v = level(M)
    print(f"level = {v}")
    _emit_json({"level": v}, args.json)
    return 0


def _cmd_betti(args) -> int:
    M = _resolve_module(args)
    table = betti(min_free_resolution(M))
    text = table.to_tsv()
    _emit(text, args.tsv or "-")
    _emit_json(
        {
            "entries": {f"{i},{j}": v for (i, j), v in sorted(table.entries.items())},
            "reg0": as_jsonable(table.reg0),
        },
        args.json,
    )
    return 0


def _cmd_bundle(args) -> int:
    ring = GradedRing(args.p, args.n + 1)
    M = make_bundle(BundleCatalog(args.name, args.n, d=args.d), ring)
    _emit(format_module(M), args.out)
    return 0


def _cmd_transform(args) -> int:
    M = _resolve_module(args)
    if args.verb == "twist":
        out = twist(M, args.a)
    elif args.verb == "sym":
        out = sym_power(M, args.k)
    elif args.verb == "frob":
        out = frobenius_pullback(M, args.iterations or 1)
    elif args.verb == "frob-push":
        window = _parse_range(args.window) if args.window else None
        out = frobenius_pushforward(M, window)
    else:
        form = parse_poly(M.ring, args.form) if args.form else None
        out = restrict_hyperplane(M, form)
    _emit(format_module(out), args.out)
    return 0


def _cmd_nlf(args) -> int:
    M = _resolve_module(args)
    v = nlf_locus_dim(M)
    print(f"nlf_locus_dim = {v}")
    _emit_json({"nlf_locus_dim": v}, args.json)
    return 0


def _cmd_globgen(args) -> int:
    M = _resolve_module(args)
    v = globally_generated(M)
    print(f"globally_generated = {str(v).lower()}")
    _emit_json({"globally_generated": v}, args.json)
    return 0


def _cmd_filter_check(args) -> int:
    M = _resolve_module(args)
    kind = {
        "line": "line_powers",
        "sym": "sym_powers",
        "frob": "frobenius_powers",
        "twisted-frob": "twisted_frobenius",
    }[args.kind]
    tw = line_bundle(M.ring, args.twist_h) if kind == "twisted_frobenius" else None
    filt = FilterSpec(kind, M, twist_by=tw)
    rep = t_ample_prefix(filt, args.t, horizon=args.horizon or 8)
    _emit_json(rep.to_json_dict(), args.json or "-")
    return _verdict_exit(rep.verdict)


def _cmd_famp(args) -> int:
    M = _resolve_module(args)
    rep = estimate_f_amplitude(M, horizon=args.horizon or 4)
    print(f"phi_hat = {rep.phi_hat} ({rep.verdict})")
    _emit_json(rep.to_json_dict(), args.json)
    return _verdict_exit(rep.verdict)


def _cmd_pamp(args) -> int:
    M = _resolve_module(args)
    rep = p_ample_check(M, horizon=args.horizon or 3)
    print(f"p_ample: {rep.verdict}")
    _emit_json(rep.to_json_dict(), args.json)
    return _verdict_exit(rep.verdict)


def _suite_sid(args) -> tuple:
    from .fuzz import FuzzConfig, make_instance

    count = args.fuzz_count
    records = []
    checked = holding = hunting = 0
    for idx in range(count):
        cfg = FuzzConfig(seed=args.seed, count=count, nvars=3, p=args.p,
                         max_gen_degree=3, max_gens=3, shape="quotient")
        cfg2 = FuzzConfig(seed=args.seed + 1, count=count, nvars=3, p=args.p,
                          max_gen_degree=3, max_gens=3, shape="quotient")
        F = make_instance(cfg, idx)
        G = make_instance(cfg2, idx)
        for t in (0, 1):
            rec = tensor_reg_bound(F, G, t)
            records.append({"index": idx, "t": t, **rec.to_json_dict()})
            if rec.hypothesis_met:
                checked += 1
                if rec.holds:
                    holding += 1
            else:
                hunting += 1
    ok = holding == checked
    report = {
        "suite": "sid",
        "pairs": count,
        "hypothesis_cases": checked,
        "holding": holding,
        "hunt_only_cases": hunting,
        "records": records,
    }
    return (0 if ok else 2), report


def _suite_chain72(args) -> tuple:
    ring = GradedRing(args.p, 3)
    T = make_bundle(BundleCatalog("tangent", 2), ring)
    from .functors import direct_sum

    horizon = args.horizon or 5
    filters = {
        "line_powers(O(1))": FilterSpec("line_powers", line_bundle(ring, 1)),
        "sym_powers(O(1)+O(1))": FilterSpec(
            "sym_powers", direct_sum(line_bundle(ring, 1), line_bundle(ring, 1))
        ),
        "frobenius_powers(tangent)": FilterSpec("frobenius_powers", T),
    }
    out = {}
    ok = True
    for name, filt in filters.items():
        rec = ampleness_chain(filt, horizon=horizon)
        out[name] = rec.to_json_dict()
        if not rec.consistent:
            ok = False
    sep = out["frobenius_powers(tangent)"]["properties"]
    separation = sep["1"] == FAILS and sep["3"] == HOLDS
    report = {"suite": "chain72", "filters": out, "tangent_separation": separation}
    return (0 if ok and separation else 2), report


def _suite_sandwich61(args) -> tuple:
    ring = GradedRing(args.p, 3)
    from .functors import direct_sum

    fixtures = {
        "tangent": make_bundle(BundleCatalog("tangent", 2), ring),
        "O(2)": line_bundle(ring, 2),
        "O(-1)": line_bundle(ring, -1),
        "O(1)+O(2)": direct_sum(line_bundle(ring, 1), line_bundle(ring, 2)),
    }
    out = {}
    worst = HOLDS
    for name, E in fixtures.items():
        rec = restriction_sandwich(E, horizon=args.horizon or 4)
        out[name] = rec.to_json_dict()
        if rec.verdict == FAILS:
            worst = FAILS
        elif rec.verdict == INCONCLUSIVE and worst != FAILS:
            worst = INCONCLUSIVE
    return _verdict_exit(worst), {"suite": "sandwich61", "fixtures": out}


def _suite_cor42(args) -> tuple:
    ring = GradedRing(args.p, 3)
    fixtures = {
        "O(1)": line_bundle(ring, 1),
        "O(0)": structure_sheaf(ring),
        "tangent": make_bundle(BundleCatalog("tangent", 2), ring),
    }
    out = {}
    all_ok = True
    for name, E in fixtures.items():
        rec = amplitude_level_bound(E, horizon=args.horizon or 4)
        out[name] = rec.to_json_dict()
        all_ok = all_ok and rec.consistent
    return (0 if all_ok else 3), {"suite": "cor42", "fixtures": out}


def _suite_fujita(args) -> tuple:
    ring = GradedRing(args.p, 3)
    from .functors import ideal_of_point

    F = ideal_of_point(ring)
    G_set = [(f"O({a})", line_bundle(ring, a)) for a in (0, 1, 2)]
    rec = fujita_m0_search(F, G_set, t=0, twist_cap=6,
                           cert_horizon=args.horizon or 4)
    code = 0 if rec.verdict == HOLDS else 3
    return code, {"suite": "fujita", **rec.to_json_dict()}


def _cmd_verify(args) -> int:
    runner = {
        "sid": _suite_sid,
        "chain72": _suite_chain72,
        "sandwich61": _suite_sandwich61,
        "cor42": _suite_cor42,
        "fujita": _suite_fujita,
    }[args.suite]
    code, report = runner(args)
    report["seed"] = args.seed
    print(f"suite {args.suite}: exit {code}")
    _emit_json(report, args.json)
    return code


def _cmd_fuzz(args) -> int:
    cfg = FuzzConfig(
        seed=args.seed,
        count=args.count,
        nvars=args.nvars,
        p=args.p,
        max_gen_degree=args.max_gen_degree,
        max_gens=args.max_gens,
        shape=args.shape,
    )
    out = []
    for M in fuzz_stream(cfg):
        text = format_module(M)
        out.append({"name": M.name, "text": text})
        if args.out_dir:
            os.makedirs(args.out_dir, exist_ok=True)
            with open(os.path.join(args.out_dir, f"{M.name}.mod"), "w") as fh:
                fh.write(text)
        print(M.name)
    _emit_json({"instances": out}, args.json)
    return 0


_RANGE_FLAGS = {"--d", "--i", "--window", "--a"}


def _glue_ranges(argv):
    """argparse rejects values that start with '-'; join range flags with
    '=' so `--d -4..4` works as the interface promises."""
    import re

    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (
            tok in _RANGE_FLAGS
            and i + 1 < len(argv)
            and re.fullmatch(r"-\d+(\.\.-?\d+)?", argv[i + 1])
        ):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(_glue_ranges(list(sys.argv[1:] if argv is None else argv)))
    if args.verb is None:
        ap.print_usage(sys.stderr)
        return USAGE_EXIT
    handlers = {
        "cohomology": _cmd_cohomology,
        "regularity": _cmd_regularity,
        "level": _cmd_level,
        "betti": _cmd_betti,
        "bundle": _cmd_bundle,
        "twist": _cmd_transform,
        "sym": _cmd_transform,
        "frob": _cmd_transform,
        "frob-push": _cmd_transform,
        "restrict": _cmd_transform,
        "nlf": _cmd_nlf,
        "globgen": _cmd_globgen,
        "filter-check": _cmd_filter_check,
        "famp": _cmd_famp,
        "pamp": _cmd_pamp,
        "verify": _cmd_verify,
        "fuzz": _cmd_fuzz,
    }
    try:
        return handlers[args.verb](args)
    except (ModuleFileError, PolyParseError) as e:
        sys.stderr.write(f"error: {e}\n")
        return USAGE_EXIT


if __name__ == "__main__":
    raise SystemExit(main())

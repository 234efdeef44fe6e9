"""Command-line driver.

Subcommands: homology, verify, nu, sum, realize, catalog.  Exit codes:
0 pass / expected, 1 fail, 2 unknown, 3 input error.  The bounded-search
radius honours the PD3_SEARCH_RADIUS environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import report as rpt
from .catalog import catalog_entries
from .dsl import ParseError, SemanticError, load_scenario
from .invariants import nu_of_pair, nu_verdict
from .pairs import PairError, verify_ladder, verify_pd

EXIT_PASS, EXIT_FAIL, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3


def search_radius(args):
    env = os.environ.get("PD3_SEARCH_RADIUS")
    if args.radius is not None:
        return args.radius
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 4


def _load(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    try:
        return load_scenario(text)
    except (ParseError, SemanticError, PairError) as exc:
        print(f"{path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _single_pair(scenario, path):
    if not scenario.pairs:
        print(f"{path}: no pair in scenario", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    name = sorted(scenario.pairs)[0]
    return name, scenario.pairs[name]


def cmd_homology(args):
    scenario = _load(args.file)
    radius = search_radius(args)
    del radius
    out = {}
    for name, pair in sorted(scenario.pairs.items()):
        tables = {"total": rpt.homology_table(pair.P.tensor_Zomega())}
        if pair.Q.ranks:
            tables["boundary"] = rpt.homology_table(pair.Q.tensor_Zomega())
            tables["relative"] = rpt.homology_table(pair.D.tensor_Zomega())
        out[name] = tables
    for name, cx in sorted(scenario.complexes.items()):
        if any(name == p.P.basis_names for p in scenario.pairs.values()):
            continue
        out.setdefault(name, {"total": rpt.homology_table(cx.tensor_Zomega())})
    if args.json:
        print(rpt.to_json(out))
    else:
        for name, tables in out.items():
            print(rpt.render_homology_text(name, tables))
    return EXIT_PASS


def cmd_verify(args):
    scenario = _load(args.file)
    name, pair = _single_pair(scenario, args.file)
    radius = search_radius(args)
    timings = {}
    t0 = time.time()
    verdict = verify_pd(pair, radius)
    timings["verify_pd"] = round(time.time() - t0, 3)
    ladder = None
    if verdict.passed():
        t0 = time.time()
        ladder = verify_ladder(pair, verdict.fundamental_class, radius)
        timings["verify_ladder"] = round(time.time() - t0, 3)
    if args.json:
        print(rpt.to_json(rpt.verdict_report(verdict, ladder, timings)))
    else:
        print(rpt.render_verdict_text(name, verdict, ladder))
    if verdict.passed():
        if ladder is not None and ladder.status != "pass":
            return EXIT_FAIL if ladder.status == "fail" else EXIT_UNKNOWN
        return EXIT_PASS
    return EXIT_FAIL if verdict.status == "fail" else EXIT_UNKNOWN


def cmd_nu(args):
    scenario = _load(args.file)
    name, pair = _single_pair(scenario, args.file)
    radius = search_radius(args)
    t0 = time.time()
    verdict = verify_pd(pair, radius)
    if not verdict.passed():
        print(f"{name}: not a verified pair ({verdict.status}: "
              f"{verdict.reason})", file=sys.stderr)
        return EXIT_FAIL if verdict.status == "fail" else EXIT_UNKNOWN
    nu = nu_of_pair(pair, verdict.fundamental_class, radius)
    nu = nu_verdict(nu, radius)
    timings = {"total": round(time.time() - t0, 3)}
    if args.json:
        print(rpt.to_json(rpt.nu_report(nu, nu.verdict, timings)))
    else:
        print(rpt.render_nu_text(name, nu, nu.verdict))
    if nu.verdict.is_equivalence():
        return EXIT_PASS
    return EXIT_FAIL if nu.verdict.status == "not" else EXIT_UNKNOWN


def cmd_sum(args):
    from .sums import SumRecipe, boundary_sum, interior_sum
    left_sc = _load(args.left)
    right_sc = _load(args.right)
    _, left = _single_pair(left_sc, args.left)
    _, right = _single_pair(right_sc, args.right)
    radius = search_radius(args)
    lv = verify_pd(left, radius)
    rv = verify_pd(right, radius)
    for nm, v in ((args.left, lv), (args.right, rv)):
        if not v.passed():
            print(f"operand {nm}: {v.status} ({v.reason})", file=sys.stderr)
            return EXIT_FAIL if v.status == "fail" else EXIT_UNKNOWN
    try:
        if args.interior:
            recipe = SumRecipe("interior", left, right,
                               top_cells=tuple(args.interior))
            outcome = interior_sum(recipe, (lv, rv), radius)
        else:
            recipe = SumRecipe("boundary", left, right,
                               components=tuple(args.boundary))
            outcome = boundary_sum(recipe, (lv, rv), radius)
    except Exception as exc:
        print(f"sum construction failed: {exc}", file=sys.stderr)
        return EXIT_INPUT
    verdict = verify_pd(outcome.pair, radius)
    if args.json:
        print(rpt.to_json(rpt.verdict_report(verdict)))
    else:
        print(rpt.render_verdict_text(outcome.pair.name, verdict))
    if verdict.passed():
        return EXIT_PASS
    return EXIT_FAIL if verdict.status == "fail" else EXIT_UNKNOWN


def cmd_realize(args):
    from .invariants import nu_difference_is_null, nu_of_pair as nu_of
    from .sums import export_realization_input, realize_free_case
    scenario = _load(args.file)
    name, pair = _single_pair(scenario, args.file)
    radius = search_radius(args)
    verdict = verify_pd(pair, radius)
    if not verdict.passed():
        print(f"{name}: not a verified pair ({verdict.status})",
              file=sys.stderr)
        return EXIT_FAIL if verdict.status == "fail" else EXIT_UNKNOWN
    try:
        inp = export_realization_input(pair, verdict, radius)
        outcome = realize_free_case(inp, radius)
    except Exception as exc:
        print(f"realization failed: {exc}", file=sys.stderr)
        return EXIT_INPUT
    agree = "unknown"
    if outcome.verdict.passed():
        nu1 = nu_of(pair, verdict.fundamental_class, radius)
        nu2 = nu_of(outcome.pair, outcome.verdict.fundamental_class, radius)
        agree = nu_difference_is_null(nu1, nu2, radius)
    data = {
        "status": outcome.verdict.status,
        "contradiction": outcome.contradiction,
        "triple_agreement": agree,
        "notes": outcome.notes,
        "rebuilt_boundary": outcome.pair.P.boundary_or_zero(3).pretty(),
    }
    if args.json:
        print(rpt.to_json(data))
    else:
        print(f"realize {name}: {outcome.verdict.status}")
        print(f"  triple agreement (nu comparison): {agree}")
        print(f"  rebuilt top boundary: {data['rebuilt_boundary']}")
    if outcome.verdict.passed() and agree == "yes":
        return EXIT_PASS
    return EXIT_FAIL if outcome.contradiction else EXIT_UNKNOWN


def _run_catalog_entry(entry, radius):
    t0 = time.time()
    try:
        pair = entry.builder()
        verdict = verify_pd(pair, radius)
        status = verdict.status
        reason = verdict.reason
        hom_ok = True
        for deg, (free, torsion) in entry.expected_homology.items():
            h = pair.D.tensor_Zomega().homology(deg)
            if (h.free_rank, tuple(h.torsion)) != (free, tuple(torsion)):
                hom_ok = False
        ok = (status == entry.expected_status) and hom_ok
    except Exception as exc:  # construction failures count as input errors
        status, reason, ok = "error", str(exc), False
    return {
        "name": entry.name,
        "status": status,
        "expected": entry.expected_status,
        "ok": ok,
        "reason": reason,
        "seconds": round(time.time() - t0, 3),
    }


def cmd_catalog(args):
    radius = search_radius(args)
    entries = catalog_entries()
    with ThreadPoolExecutor(max_workers=min(4, len(entries))) as pool:
        results = list(pool.map(lambda e: _run_catalog_entry(e, radius),
                                entries))
    results.sort(key=lambda r: r["name"])
    all_ok = all(r["ok"] for r in results)
    if args.json:
        print(rpt.to_json({"entries": results, "all_expected": all_ok}))
    else:
        for r in results:
            flag = "ok" if r["ok"] else "MISMATCH"
            print(f"{r['name']:24s} {r['status']:8s} expected "
                  f"{r['expected']:8s} [{flag}] ({r['seconds']}s)"
                  + (f"  {r['reason']}" if r["reason"] else ""))
        print("catalog:", "all entries as expected" if all_ok
              else "UNEXPECTED RESULTS")
    return EXIT_PASS if all_ok else EXIT_FAIL


def build_parser():
    ap = argparse.ArgumentParser(
        prog="pdpairs",
        description="Chain-level Poincare duality workbench for "
                    "3-dimensional pairs")
    ap.add_argument("--radius", type=int, default=None,
                    help="bounded-search radius (default 4, or "
                         "PD3_SEARCH_RADIUS)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("homology", help="homology tables of a scenario")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_homology)

    p = sub.add_parser("verify", help="duality verdict and cap ladder")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("nu", help="the nu morphism and its derived verdict")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_nu)

    p = sub.add_parser("sum", help="connected sums of two scenarios")
    p.add_argument("left")
    p.add_argument("right")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--interior", nargs=2, metavar=("TOP1", "TOP2"))
    group.add_argument("--boundary", nargs=2, metavar=("COMP1", "COMP2"))
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_sum)

    p = sub.add_parser("realize",
                       help="round-trip realization from the 2-skeleton")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_realize)

    p = sub.add_parser("catalog", help="run all builtin examples")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_catalog)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        code = args.fn(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())

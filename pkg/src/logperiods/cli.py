"""Command line entry point: logperiods <command> [options].

Exit status is 0 when every check passes, 1 when any check fails or is
inconclusive, 2 on usage or input errors.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .suites import SUITES, Check


@dataclass
class RunReport:
    command: str
    inputs: dict
    checks: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def to_json(self, timings=False):
        return {"command": self.command, "inputs": self.inputs,
                "status": "pass" if self.ok else "fail",
                "checks": [c.to_json(timings) for c in self.checks],
                "data": self.data, "artifacts": self.artifacts}


class UsageError(Exception):
    pass


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("not a rational number: %r" % text)


def _cfg(args):
    from .integrator import QuadratureConfig
    return QuadratureConfig(seed=args.seed, threads=args.threads)


def _cx(z):
    return [float(z.real), float(z.imag)]


# ---------------------------------------------------------------------------
# commands

def cmd_verify_cauchy(args):
    from .integrator import verify_cauchy, verify_cauchy_simplicial
    cfg = _cfg(args)
    inputs = {"example": args.example, "a": args.a, "b": args.b, "chains": args.chains,
              "chain": args.chain}
    report = RunReport("verify-cauchy", {k: str(v) for k, v in inputs.items() if v is not None})
    if args.chains:
        from .chain_core import BundleParseError, load_bundle
        try:
            K, chains = load_bundle(args.chains)
        except (BundleParseError, OSError) as e:
            raise UsageError("cannot read %s: %s" % (args.chains, e))
        names = [args.chain] if args.chain else sorted(chains)
        for name in names:
            if name not in chains:
                raise UsageError("no chain named %r in %s" % (name, args.chains))
            g = chains[name]
            if g.degree != g.n + 1:
                continue
            r = verify_cauchy_simplicial(K, g, cfg, args.tolerance)
            report.checks.append(_cauchy_check("Cauchy on %s" % name, r))
            report.data[name] = r.to_json()
        if not report.checks:
            raise UsageError("no chain of degree n+1 in the bundle")
        return report
    if args.example == "disk-box":
        from .cells import chain_of, disk_interval
        from .suites import log_ratio_oracle
        a = args.a if args.a is not None else Fraction(1)
        b = args.b if args.b is not None else Fraction(2)
        if not 0 < a < b:
            raise UsageError("disk-box needs 0 < a < b")
        r = verify_cauchy(chain_of((disk_interval(a, b), 1)), cfg, args.tolerance)
        report.checks.append(_cauchy_check("Cauchy on the disk-box cell", r))
        delta = abs(r.boundary_term.value - log_ratio_oracle(a, b))
        report.checks.append(Check("I_1(boundary) = ln(b/a)/(2 pi i)",
                                   "pass" if delta < 1e-6 else "fail", delta, 1e-6))
        report.data["disk-box"] = r.to_json()
    elif args.example == "dilog":
        from .suites import dilog_cauchy_chains
        a = args.a if args.a is not None else Fraction(1, 2)
        if not 0 < a < 1:
            raise UsageError("the dilogarithm chains need 0 < a < 1")
        tol = args.tolerance if args.tolerance is not None else 1e-4
        results = {}
        for name, g in dilog_cauchy_chains(a).items():
            r = verify_cauchy(g, cfg, tol)
            results[name] = r
            report.checks.append(_cauchy_check("Cauchy on %s" % name, r))
            report.data[name] = r.to_json()
        xi2 = results["D x eta2(1)"].residual + results["D x eta2(0)"].residual
        report.checks.append(Check("Cauchy on D x xi2", "pass" if abs(xi2) < tol else "fail",
                                   abs(xi2), tol))
    return report


def _cauchy_check(name, r):
    return Check(name, r.verdict, abs(r.residual), r.tolerance, 1, 0.0,
                 {"I_boundary": _cx(r.boundary_term.value), "I_delta": _cx(r.delta_term.value)})


def cmd_dilog_periods(args):
    from .hodge_realization import ScenarioError, build_dilog_scenario
    from .suites import dilog_oracles, period_checks
    a = args.a
    if not 0 < a < 1:
        raise UsageError("need 0 < a < 1")
    report = RunReport("dilog-periods", {"a": str(a)})
    try:
        sc = build_dilog_scenario(a, _cfg(args))
    except ScenarioError as e:
        report.checks.append(Check(str(e), "fail", math.inf, 0.0))
        return report
    report.checks.append(Check("Betti and de Rham kernels are 3-dimensional",
                               "pass" if (sc.betti.dim, sc.derham.dim) == (3, 3) else "fail",
                               0.0, 0.0))
    report.checks += period_checks(sc)
    pm = sc.matrix
    P = pm.numeric()
    tp = 2j * math.pi
    orc = dilog_oracles(a)
    report.data = {
        "period_matrix": pm.to_json(),
        "oracle": orc,
        "oracle_deltas": {
            "Li2(a)": abs(P[2, 0] * tp ** 2 - orc["Li2"]),
            "Li1(a)": abs(P[1, 0] * tp ** 2 - orc["Li1"]),
            "log a": abs(P[2, 1] * tp - orc["log"]),
        },
        "relations": [{"name": r.name, "ok": r.ok, "kind": r.kind} for r in sc.relations],
        "integrals": {k: v.to_json() for k, v in sc.integrals.items()},
    }
    return report


def cmd_check_invariants(args):
    from .suites import run_suite
    report = RunReport("check-invariants", {"suite": args.suite, "seed": args.seed})
    report.checks = run_suite(args.suite, args.seed, _cfg(args))
    return report


def cmd_thom_compare(args):
    from .chain_core import BundleParseError, load_bundle
    from .face_maps import GenericityError, exact_thom_cocycle
    from .geometry import DomainError, LinearCell
    from .integrator import ThomPreconditionError, thom_form_value
    try:
        K, _ = load_bundle(args.chains)
    except (BundleParseError, OSError) as e:
        raise UsageError("cannot read %s: %s" % (args.chains, e))
    report = RunReport("thom-compare", {"chains": args.chains, "epsilon": args.epsilon})
    rows = []
    worst = 0.0
    skipped = 0
    for i in range(1, K.n + 1):
        try:
            T = exact_thom_cocycle(K, (i, 0))
        except GenericityError as e:
            report.checks.append(Check("exact Thom cocycle for z%d = 0" % i, "fail",
                                       math.inf, 0.0, detail={"error": str(e)}))
            continue
        for s in K.by_dim(2):
            if any(K.on_face(v, {(i, 0)}) for v in s):
                skipped += 1
                continue
            cell = LinearCell([K.vertices[v].coords for v in s])
            try:
                num = thom_form_value(cell, i, 0, args.epsilon).value
            except (ThomPreconditionError, DomainError):
                skipped += 1
                continue
            ex = T(s)
            worst = max(worst, abs(num - float(ex)))
            rows.append({"face": "z%d=0" % i, "simplex": list(s), "exact": str(ex),
                         "thom_form": _cx(num)})
    report.checks.append(Check("Thom form matches exact Thom cocycle",
                               "pass" if rows and worst < args.tolerance else "fail",
                               worst, args.tolerance, len(rows), 0.0, {"skipped": skipped}))
    report.data["values"] = rows
    return report


COMMANDS = {"verify-cauchy": cmd_verify_cauchy, "dilog-periods": cmd_dilog_periods,
            "check-invariants": cmd_check_invariants, "thom-compare": cmd_thom_compare}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the full report here")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--timings", action="store_true", help="include timings in --json")
    p = argparse.ArgumentParser(prog="logperiods", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    vc = sub.add_parser("verify-cauchy", parents=[common],
                        help="check I_{n-1}(d gamma) + (-1)^n I_n(delta gamma) = 0")
    src = vc.add_mutually_exclusive_group(required=True)
    src.add_argument("--example", choices=["disk-box", "dilog"])
    src.add_argument("--chains", metavar="FILE", help="chain bundle JSON")
    vc.add_argument("--chain", help="name of the chain in the bundle (default: all)")
    vc.add_argument("--a", type=_fraction)
    vc.add_argument("--b", type=_fraction)
    vc.add_argument("--tolerance", type=float)
    dp = sub.add_parser("dilog-periods", parents=[common],
                        help="period matrix of the dilogarithm comodule")
    dp.add_argument("--a", type=_fraction, required=True)
    ci = sub.add_parser("check-invariants", parents=[common], help="run a verification suite")
    ci.add_argument("--suite", choices=SUITES, required=True)
    tc = sub.add_parser("thom-compare", parents=[common],
                        help="Thom form against exact Thom cocycles on a bundle")
    tc.add_argument("--chains", metavar="FILE", required=True)
    tc.add_argument("--epsilon", type=float, default=0.05)
    tc.add_argument("--tolerance", type=float, default=1e-6)
    return p


def print_table(report, out):
    out.write("%s  %s\n" % (report.command, " ".join("%s=%s" % kv for kv in
                                                     sorted(report.inputs.items()) if kv[1])))
    width = max([len(c.name) for c in report.checks] + [10])
    for c in report.checks:
        out.write("  %-12s %-*s  residual %.3e  tol %.1e\n"
                  % (c.status.upper(), width, c.name, c.residual, c.tolerance))
    if report.command == "dilog-periods" and "period_matrix" in report.data:
        pm = report.data["period_matrix"]
        out.write("  period matrix (rows %s, columns %s):\n"
                  % (",".join(pm["derham_basis"]), ",".join(pm["betti_basis"])))
        for row in pm["entries"]:
            cells = []
            for e in row:
                re, im = e["value"]
                sym = e["symbolic"] or "%.12g%+.12gi" % (re, im)
                cells.append("%-28s" % sym)
            out.write("    " + "".join(cells) + "\n")
        for k, v in report.data["oracle_deltas"].items():
            out.write("  oracle delta %-8s %.3e\n" % (k, v))
    out.write("%s\n" % ("PASS" if report.ok else "FAIL"))


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    if args.threads < 1:
        sys.stderr.write("--threads must be at least 1\n")
        return 2
    try:
        report = COMMANDS[args.command](args)
    except UsageError as e:
        sys.stderr.write("error: %s\n" % e)
        return 2
    if args.json:
        with open(args.json, "w") as f:
            json.dump(report.to_json(args.timings), f, indent=1, sort_keys=True, default=str)
        report.artifacts.append(args.json)
    print_table(report, sys.stdout)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())

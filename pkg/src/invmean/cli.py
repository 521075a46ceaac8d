"""File-driven command line: analyze | iterate | invariant | tg | verify.

Every command takes a JSON mapping-spec path ("-" reads stdin) and an
optional --json flag for machine output.  Exit codes: 0 success, 1 for
usage/parse/domain errors, 2 when something was falsified or an
iteration did not converge.

Numbers are printed with 12 significant digits in human mode; JSON mode
emits doubles with round-trip-exact precision.
"""

from __future__ import annotations

import argparse
import json
import sys
from random import Random
from typing import Sequence

from .averaging import (
    CERTIFIED,
    FALSIFIED,
    certify_uniform_weak_contractivity,
    falsify_contractivity,
    oscillation,
)
from .digraph import TriStateColoring, is_ergodic, tg_stabilize
from .errors import InvMeanError
from .invariant import (
    Witness,
    check_bracket_dichotomy,
    check_oscillation_monotonicity,
    invariant_mean_eval,
    subsequence_limits,
    verify_invariance,
    verify_mean_properties,
)
from .means import check_mean_property
from .specfile import MappingSpec, load_mapping_spec
from .version import __version__

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FALSIFIED = 2


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _fmt_point(x: Sequence[float]) -> str:
    return "(" + ", ".join(_fmt(t) for t in x) + ")"


def _fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2))


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract here reserves 2 for
    # falsification, so remap to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_spec(path: str) -> MappingSpec:
    if path == "-":
        return load_mapping_spec(sys.stdin.read())
    return load_mapping_spec(path)


def _parse_point(text: str, p: int) -> tuple[float, ...]:
    parts = [part for part in text.replace(",", " ").split() if part]
    try:
        values = tuple(float(part) for part in parts)
    except ValueError:
        raise InvMeanError(f"could not parse point {text!r}") from None
    if len(values) != p:
        raise InvMeanError(f"point has {len(values)} coordinates, spec has p={p}")
    return values


def _parse_coloring(text: str, p: int) -> TriStateColoring:
    parts = [part for part in text.replace(",", " ").split() if part]
    try:
        values = tuple(int(part) for part in parts)
    except ValueError:
        raise InvMeanError(f"could not parse coloring {text!r}") from None
    if len(values) != p:
        raise InvMeanError(f"coloring has {len(values)} entries, spec has p={p}")
    if any(v not in (-1, 0, 1) for v in values):
        raise InvMeanError(f"coloring entries must be -1, 0, or 1, got {text!r}")
    return TriStateColoring(values)


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    spec = _load_spec(args.spec)
    mapping = spec.build()
    cls = is_ergodic(mapping.graph)
    cert = certify_uniform_weak_contractivity(mapping)
    edges = [[a, b] for a, b in mapping.graph.sorted_edges()]
    if args.json:
        _emit_json(
            {
                "edges": edges,
                "irreducible": cls.irreducible,
                "period": cls.period,
                "aperiodic": cls.aperiodic,
                "ergodic": cls.ergodic,
                "uniform_walk_length": cls.uniform_walk_length,
                "certificate": cert.to_json_dict(),
            }
        )
        return EXIT_OK
    print("edges:", " ".join(f"[{a},{b}]" for a, b in edges))
    print("irreducible:", _fmt_bool(cls.irreducible))
    print("period:", "none" if cls.period is None else cls.period)
    print("aperiodic:", _fmt_bool(cls.aperiodic))
    print("ergodic:", _fmt_bool(cls.ergodic))
    if cls.ergodic:
        print("uniform_walk_length:", cls.uniform_walk_length)
    print("contractivity class:", cert.status)
    print("n0:", "none" if cert.n0 is None else cert.n0)
    print("evidence:", cert.evidence)
    return EXIT_OK


def cmd_iterate(args) -> int:
    spec = _load_spec(args.spec)
    mapping = spec.build()
    x = _parse_point(args.x, spec.p)
    trace = mapping.iterate(x, args.steps)
    oscillations = [oscillation(pt) for pt in trace]
    shown = range(len(trace)) if args.trace else (0, len(trace) - 1)
    if args.json:
        _emit_json(
            {
                "steps": args.steps,
                "trace": [list(trace[k]) for k in shown],
                "oscillations": [oscillations[k] for k in shown],
            }
        )
        return EXIT_OK
    for k in shown:
        print(f"n={k}  x = {_fmt_point(trace[k])}  oscillation = {_fmt(oscillations[k])}")
    return EXIT_OK


def cmd_invariant(args) -> int:
    spec = _load_spec(args.spec)
    mapping = spec.build()
    x = _parse_point(args.x, spec.p)
    if args.modulus > 1:
        limits = subsequence_limits(
            mapping, x, args.modulus, tol=args.tol, max_iter=args.max_iter
        )
        if args.json:
            _emit_json(limits.to_json_dict())
        else:
            print("modulus:", limits.modulus)
            for r, entry in enumerate(limits.limits):
                print(
                    f"residue {r}: converged={_fmt_bool(entry.converged)} "
                    f"point={_fmt_point(entry.point)}"
                )
        return EXIT_OK if limits.all_converged else EXIT_FALSIFIED
    report = invariant_mean_eval(mapping, x, tol=args.tol, max_iter=args.max_iter)
    if args.json:
        _emit_json(report.to_json_dict())
    else:
        print("value:", "none" if report.value is None else _fmt(report.value))
        print("error_radius:", _fmt(report.error_radius))
        print("iterations_used:", report.iterations_used)
        print("converged:", _fmt_bool(report.converged))
        print("final_iterate:", _fmt_point(report.final_iterate))
    return EXIT_OK if report.converged else EXIT_FALSIFIED


def cmd_tg(args) -> int:
    spec = _load_spec(args.spec)
    mapping = spec.build()
    c0 = _parse_coloring(args.c0, spec.p)
    max_steps = args.max_steps if args.max_steps is not None else 3 ** spec.p
    report = tg_stabilize(mapping.graph, c0, max_steps=max_steps)
    if args.json:
        _emit_json(
            {
                "trace": [list(c.values) for c in report.trace],
                "steps_to_constant": report.steps_to_constant,
                "constant_value": report.constant_value,
            }
        )
        return EXIT_OK
    for k, coloring in enumerate(report.trace):
        print(f"step {k}: ({', '.join(str(v) for v in coloring.values)})")
    if report.steps_to_constant is None:
        print(f"no constant coloring within {max_steps} steps")
    else:
        print(f"constant at step {report.steps_to_constant}, value {report.constant_value}")
    return EXIT_OK


def _check_entry(name: str, status: str, detail: str, witnesses=()) -> dict:
    entry = {"name": name, "status": status, "detail": detail}
    if witnesses:
        entry["witnesses"] = [
            {"point": list(w.point), "message": w.message} for w in witnesses
        ]
    return entry


def _report_entry(name: str, report) -> dict:
    if report.n_evaluated == 0 and report.n_skipped > 0:
        return _check_entry(
            name, "skip", f"no convergent samples ({report.n_skipped} skipped)"
        )
    detail = (
        f"max residual {report.max_residual:.3e} over {report.n_evaluated} samples"
        f" ({report.n_skipped} skipped)"
    )
    if report.passed:
        return _check_entry(name, "pass", detail)
    return _check_entry(
        name, "fail", f"{len(report.violations)} violation(s); {detail}",
        report.violations[:5],
    )


def cmd_verify(args) -> int:
    spec = _load_spec(args.spec)
    mapping = spec.build()
    rng = Random(args.seed)
    n = args.samples
    checks: list[dict] = []

    mp_violations = 0
    mp_points = 0
    for mean in mapping.base.means:
        rep = check_mean_property(mean, rng, n)
        mp_points += rep.n_points
        mp_violations += len(rep.violations)
    checks.append(
        _check_entry(
            "mean-property",
            "pass" if mp_violations == 0 else "fail",
            f"{mapping.p} means, {mp_points} points, {mp_violations} violation(s)",
        )
    )

    checks.append(_report_entry(
        "oscillation-monotonicity",
        check_oscillation_monotonicity(mapping, rng, n_samples=n),
    ))

    cert = certify_uniform_weak_contractivity(mapping)
    checks.append(_check_entry(
        "certificate", "info", f"class={cert.status} n0={cert.n0}; {cert.evidence}"
    ))

    certified = cert.status == CERTIFIED
    n0 = 3 ** mapping.p
    if certified:
        checks.append(_report_entry(
            "invariance", verify_invariance(mapping, tol=args.tol, rng=rng, n_samples=n)
        ))
        checks.append(_report_entry(
            "bracket-dichotomy", check_bracket_dichotomy(mapping, rng, n_samples=min(n, 100))
        ))
    else:
        falsification = falsify_contractivity(mapping, n0, rng, n_samples=n)
        if falsification.status == FALSIFIED:
            checks.append(_check_entry(
                "contractivity", "fail", falsification.evidence,
                witnesses=[Witness(falsification.witness, falsification.evidence)],
            ))
        else:
            checks.append(_check_entry("contractivity", "info", falsification.evidence))
        checks.append(_check_entry("invariance", "skip", "not certified"))
        checks.append(_check_entry("bracket-dichotomy", "skip", "not certified"))

    flags = [mean.flags for mean in mapping.base.means]
    iv = mapping.interval
    positive_line = iv.lower == 0.0 and iv.lower_open and iv.upper == float("inf")
    for prop in ("strict", "monotone", "homogeneous"):
        if not all(getattr(f, prop) for f in flags):
            checks.append(_check_entry(prop, "skip", f"{prop} flag not asserted on all means"))
            continue
        if prop == "homogeneous" and not positive_line:
            checks.append(_check_entry(prop, "skip", f"domain is {iv}, not (0, +inf)"))
            continue
        checks.append(_report_entry(
            prop, verify_mean_properties(mapping, prop, rng=rng, n_samples=n)
        ))

    failed = [c for c in checks if c["status"] == "fail"]
    if args.json:
        _emit_json({"checks": checks, "falsified": bool(failed)})
    else:
        for c in checks:
            print(f"{c['status'].upper():5s} {c['name']}: {c['detail']}")
            for w in c.get("witnesses", []):
                print(f"      witness x={_fmt_point(w['point'])}: {w['message']}")
        print(
            "verdict:",
            f"{len(failed)} check(s) falsified" if failed else "all checks passed",
        )
    return EXIT_FALSIFIED if failed else EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="invmean",
        description="Analyze and iterate mean-type mappings defined by a JSON spec.",
    )
    parser.add_argument("--version", action="version", version=f"invmean {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("spec", help="spec file path, or - for stdin")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    add("analyze", cmd_analyze, "classify the incidence graph and certify contractivity")

    p = add("iterate", cmd_iterate, "print iterates and their oscillations")
    p.add_argument("x", help="start point, comma-separated")
    p.add_argument("-n", "--steps", type=int, default=10, help="number of steps (default 10)")
    p.add_argument("--trace", action="store_true", help="print every step, not just first/last")

    p = add("invariant", cmd_invariant, "iterate to the invariant mean")
    p.add_argument("x", help="start point, comma-separated")
    p.add_argument("--tol", type=float, default=1e-12, help="tolerance (default 1e-12)")
    p.add_argument("--max-iter", type=int, default=10_000, help="iteration cap (default 10000)")
    p.add_argument(
        "--modulus", type=int, default=1,
        help="with m > 1, report per-residue subsequence limits mod m",
    )

    p = add("tg", cmd_tg, "iterate the tri-state in-neighbor operator on the graph")
    p.add_argument("c0", help="start coloring over {-1,0,1}, comma-separated")
    p.add_argument(
        "--max-steps", type=int, default=None,
        help="step cap (default 3^p)",
    )

    p = add("verify", cmd_verify, "run the sampled property suite")
    p.add_argument("--samples", type=int, default=200, help="samples per check (default 200)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--tol", type=float, default=1e-9, help="residual tolerance (default 1e-9)")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvMeanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

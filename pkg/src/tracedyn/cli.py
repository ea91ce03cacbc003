"""Command-line front end.

Exit codes: 0 on success, 1 when a check fails or the library raises a domain
error (reported as ``ErrorName: message`` on stderr), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .action import PartialAction, free_monoid, rabati, singleton_action, tip_top
from .document import ActionDocument, document_for, monoid_from_json
from .errors import TraceDynError
from .fixtures import abc_monoid, strip4_family
from .monoid import (
    DEFAULT_LIMIT,
    MonoidSpec,
    enumerate_traces,
    format_trace,
    growth_coefficients,
    mobius_polynomial,
    parse_trace,
)
from .sampler import estimate_cylinder, estimate_prefix, sample_prefix
from .uniform import (
    characteristic_data,
    characteristic_root,
    fibred_inversion_check,
    mobius_matrix,
    theta_polynomial,
    truncated_inverse_residual,
    uniform_valuation,
)
from .valuation import FibredValuation, chain_spec, check_concurrency, eval_valuation, mobius_report, prefix_probability


def num(x: float) -> str:
    return f"{x:.15g}"


@dataclass
class Loaded:
    monoid: MonoidSpec
    action: PartialAction
    valuation: FibredValuation | None


class UsageError(Exception):
    pass


def load(args) -> Loaded:
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            doc = ActionDocument.from_json(json.load(fh))
        pa = doc.action()
        return Loaded(pa.monoid, pa, doc.fibred_valuation(pa))
    if args.monoid:
        with open(args.monoid, encoding="utf-8") as fh:
            m = monoid_from_json(json.load(fh))
    else:
        m = None
    kind = args.builtin or "tiptop"
    if kind == "rabati":
        if args.size is None:
            raise UsageError("--builtin rabati needs --n (or --size)")
        m, pa = rabati(args.size, circular=args.circular)
    elif kind == "free":
        m = free_monoid(args.size if args.size is not None else 2)
        pa = tip_top(m)
    elif kind == "singleton":
        m = m or abc_monoid()
        pa = singleton_action(m)
    else:
        m = m or abc_monoid()
        pa = tip_top(m)
    return Loaded(m, pa, None)


def valuation_or_uniform(ld: Loaded) -> FibredValuation:
    return ld.valuation if ld.valuation is not None else uniform_valuation(ld.action)


def emit(args, text_lines, payload) -> None:
    if args.json:
        print(json.dumps(payload, ensure_ascii=False))
    else:
        for line in text_lines:
            print(line)


# subcommands; each returns an exit code

def cmd_cliques(args, ld: Loaded) -> int:
    names = [ld.monoid.clique_name(c) for c in ld.monoid.cliques]
    emit(args, names, names)
    return 0


def cmd_mobius(args, ld: Loaded) -> int:
    p = mobius_polynomial(ld.monoid)
    emit(args, [p.to_text()], list(p.coeffs))
    return 0


def cmd_growth(args, ld: Loaded) -> int:
    counts = growth_coefficients(ld.monoid, args.k, limit=args.limit)
    series = mobius_polynomial(ld.monoid).series_inverse(args.k)
    ok = counts == series
    emit(
        args,
        [" ".join(map(str, counts)), "inverse of mobius polynomial: " + ("agrees" if ok else "DISAGREES")],
        {"counts": counts, "series": series, "agree": ok},
    )
    return 0 if ok else 1


def cmd_matrix(args, ld: Loaded) -> int:
    mu = mobius_matrix(ld.action)
    width = max(len(s) for s in mu.labels)
    lines = []
    for label, row in zip(mu.labels, mu.entries):
        lines.append(f"{label:>{width}} | " + " ; ".join(p.to_text() for p in row))
    emit(args, lines, {"labels": list(mu.labels), "entries": [[list(p.coeffs) for p in row] for row in mu.entries]})
    return 0


def cmd_theta(args, ld: Loaded) -> int:
    theta = theta_polynomial(ld.action)
    emit(args, [theta.to_text()], list(theta.coeffs))
    return 0


def cmd_root(args, ld: Loaded) -> int:
    t0 = characteristic_root(ld.action)
    emit(args, [num(t0)], {"t0": t0})
    return 0


def cmd_cocycle(args, ld: Loaded) -> int:
    data = characteristic_data(ld.action)
    states = ld.action.states
    matrix = [[data.cocycle[(a, b)] for b in states] for a in states]
    lines = [f"t0 = {num(data.t0)}  ({data.method})"]
    lines += [f"{a} -> {b}: {num(data.cocycle[(a, b)])}" for a in states for b in states]
    emit(args, lines, {"t0": data.t0, "method": data.method, "labels": list(states), "matrix": matrix})
    return 0


def _table_lines(F: FibredValuation) -> list[str]:
    lines = []
    for state, row in F.to_table().items():
        parts = ", ".join(f"{a}={num(v)}" for a, v in row.items())
        lines.append(f"{state}: {parts}")
    return lines


def cmd_uniform(args, ld: Loaded) -> int:
    F = uniform_valuation(ld.action)
    doc = document_for(ld.action, F)
    emit(args, _table_lines(F), doc.to_json())
    return 0


def cmd_family(args, ld: Loaded) -> int:
    F = strip4_family(args.q)
    doc = document_for(F.action, F)
    emit(args, _table_lines(F), doc.to_json())
    return 0


def cmd_validate(args, ld: Loaded) -> int:
    pa = ld.action
    reach = pa.reachability
    lines = [f"action: valid ({pa.size} states)", f"irreducible: {'yes' if reach.is_irreducible else 'no'}"]
    payload = {
        "action": "valid",
        "irreducible": reach.is_irreducible,
        "essential_states": list(reach.essential_states),
    }
    code = 0
    if ld.valuation is not None:
        F = ld.valuation
        conc = check_concurrency(F, args.tol)
        rep = mobius_report(F, args.tol)
        if conc.passed:
            lines.append("concurrency: passed")
        else:
            s, a, b, lhs, rhs = conc.witnesses[0]
            lines.append(f"concurrency: failed at state {s}, letters {a} || {b} ({num(lhs)} vs {num(rhs)})")
        if rep.valid:
            lines.append("mobius: valid")
        else:
            s, c, v = rep.violations[0]
            lines.append(f"mobius: invalid at state {s}, clique {c} (h = {num(v)})")
        payload["concurrency"] = {"passed": conc.passed, "witnesses": [list(w) for w in conc.witnesses]}
        payload["mobius"] = {"valid": rep.valid, "violations": [list(v) for v in rep.violations], "transforms": rep.transforms}
        code = 0 if conc.passed and rep.valid else 1
    emit(args, lines, payload)
    return code


def cmd_chain(args, ld: Loaded) -> int:
    F = valuation_or_uniform(ld)
    chain = chain_spec(F, args.start, args.tol)
    m = ld.monoid

    def label(i):
        s, c = chain.index[i]
        return f"({s}, {m.clique_name(c)})"

    lines = ["initial:"]
    lines += [f"  {label(i)}: {num(p)}" for i, p in enumerate(chain.initial) if p > 0]
    lines.append("transitions:")
    for i, row in enumerate(chain.rows):
        if row:
            lines.append(f"  {label(i)} -> " + ", ".join(f"{label(j)}: {num(p)}" for j, p in row.items()))
    payload = {
        "start": chain.start,
        "index": [[s, m.clique_name(c)] for s, c in chain.index],
        "initial": list(chain.initial),
        "rows": [{str(j): p for j, p in row.items()} for row in chain.rows],
        "dead_rows": sorted(chain.dead_rows),
    }
    emit(args, lines, payload)
    return 0


def cmd_sample(args, ld: Loaded) -> int:
    F = valuation_or_uniform(ld)
    chain = chain_spec(F, args.start, args.tol)
    m = ld.monoid
    for r in range(args.runs):
        run = sample_prefix(chain, args.start, args.steps, args.seed + r)
        record = {
            "seed": run.seed,
            "start": run.start,
            "steps": [[s, m.clique_name(c)] for s, c in run.steps],
            "states": list(run.states),
            "prefix": format_trace(m, run.prefix),
        }
        if args.json:
            print(json.dumps(record, ensure_ascii=False))
        else:
            print(f"seed {run.seed}: {format_trace(m, run.prefix)}   states {' '.join(run.states)}")
    return 0


def cmd_estimate(args, ld: Loaded) -> int:
    F = valuation_or_uniform(ld)
    chain = chain_spec(F, args.start, args.tol)
    x = parse_trace(ld.monoid, args.trace)
    if args.kind == "prefix":
        est = estimate_prefix(chain, args.start, x, args.samples, args.seed, workers=args.workers)
        exact = prefix_probability(F, args.start, x, args.tol)
    else:
        est = estimate_cylinder(chain, args.start, x, args.samples, args.seed, workers=args.workers)
        exact = eval_valuation(F, args.start, x)
    record = {
        "trace": format_trace(ld.monoid, x),
        "kind": args.kind,
        "estimate": est.value,
        "std_error": est.std_error,
        "n_samples": est.n_samples,
        "exact": exact,
        "within_4se": est.within(exact),
    }
    emit(
        args,
        [
            f"{args.kind} {record['trace']}: {num(est.value)} +/- {num(est.std_error)} (N={est.n_samples})",
            f"exact: {num(exact)}",
        ],
        record,
    )
    return 0


def cmd_enumerate(args, ld: Loaded) -> int:
    prefix = parse_trace(ld.monoid, args.prefix) if args.prefix else None
    found = enumerate_traces(ld.monoid, args.k, prefix=prefix, same_height=args.same_height, limit=args.limit)
    names = [format_trace(ld.monoid, x) for x in found]
    emit(args, names, names)
    return 0


def cmd_check(args, ld: Loaded) -> int:
    inverse = truncated_inverse_residual(ld.action, args.k, limit=args.limit)
    fibred = fibred_inversion_check(ld.action, min(args.k, args.fibred_k), limit=args.limit)
    ok = inverse == 0 and fibred == 0
    emit(
        args,
        [
            f"mu(t) Z(t) = I through degree {args.k}: residual {inverse}",
            f"fibred inversion through length {min(args.k, args.fibred_k)}: residual {fibred}",
        ],
        {"inverse_residual": inverse, "fibred_residual": fibred, "ok": ok},
    )
    return 0 if ok else 1


COMMANDS = {
    "cliques": (cmd_cliques, "list the cliques of the monoid"),
    "mobius": (cmd_mobius, "Möbius polynomial of the monoid"),
    "growth": (cmd_growth, "trace counts by length, checked against the inverse Möbius series"),
    "matrix": (cmd_matrix, "state-indexed Möbius polynomial matrix"),
    "theta": (cmd_theta, "determinant of the Möbius matrix"),
    "root": (cmd_root, "characteristic root"),
    "cocycle": (cmd_cocycle, "cocycle table of the uniform measure"),
    "uniform": (cmd_uniform, "uniform valuation (as a document with --json)"),
    "family": (cmd_family, "one-parameter valuation on the 2 x 4 strip (as a document with --json)"),
    "validate": (cmd_validate, "validate an action and its valuation"),
    "chain": (cmd_chain, "chain of states and cliques"),
    "sample": (cmd_sample, "sample runs of the chain"),
    "estimate": (cmd_estimate, "Monte-Carlo estimate of a cylinder or prefix probability"),
    "enumerate": (cmd_enumerate, "enumerate traces up to a length"),
    "check": (cmd_check, "truncated inversion checks"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--input", metavar="FILE", help="action document (JSON)")
    src.add_argument("--builtin", choices=["tiptop", "rabati", "free", "singleton"], help="built-in action")
    common.add_argument("--monoid", metavar="FILE", help="monoid document for tiptop/singleton builtins")
    common.add_argument("--n", "--size", dest="size", type=int, help="strip size for rabati, alphabet size for free")
    common.add_argument("--circular", action="store_true", help="circular strip for rabati")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--tol", type=float, default=1e-9, help="numerical tolerance")
    common.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="enumeration length guard")

    parser = argparse.ArgumentParser(prog="tracedyn", description="Trace monoid actions and their Markov measures.")
    sub = parser.add_subparsers(dest="command", required=True)
    # `sample --n` is the run length, so there the strip size is only reachable as --size
    subs = {
        name: sub.add_parser(name, parents=[common], help=h, conflict_handler="resolve" if name == "sample" else "error")
        for name, (_, h) in COMMANDS.items()
    }
    subs["growth"].add_argument("--k", type=int, required=True, help="largest length")
    subs["family"].add_argument("--q", type=float, required=True, help="weight of b from the empty tiling, in (0, 1)")
    for name in ("chain", "sample", "estimate"):
        subs[name].add_argument("--start", default="1", help="starting state (default 1)")
    subs["sample"].add_argument("--n", dest="steps", type=int, required=True, help="number of cliques")
    subs["sample"].add_argument("--seed", type=int, required=True, help="PRNG seed")
    subs["sample"].add_argument("--runs", type=int, default=1, help="independent runs, seeded seed, seed+1, ...")
    subs["estimate"].add_argument("--trace", required=True, help="target trace, e.g. a^2.c.b")
    subs["estimate"].add_argument("--samples", type=int, required=True, help="number of runs")
    subs["estimate"].add_argument("--seed", type=int, required=True, help="PRNG seed")
    subs["estimate"].add_argument("--workers", type=int, default=1, help="worker processes, seeded seed+i")
    subs["estimate"].add_argument("--kind", choices=["cylinder", "prefix"], default="cylinder", help="x <= Y_h or Y_h == x")
    subs["enumerate"].add_argument("--k", type=int, required=True, help="largest length")
    subs["enumerate"].add_argument("--prefix", help="only traces above this one")
    subs["enumerate"].add_argument("--same-height", action="store_true", help="with --prefix, keep its height")
    subs["check"].add_argument("--k", type=int, required=True, help="truncation order of the matrix series")
    subs["check"].add_argument("--fibred-k", type=int, default=4, help="length bound of the trace-by-trace check")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ld = load(args)
        return COMMANDS[args.command][0](args, ld)
    except UsageError as exc:
        parser.error(str(exc))
    except TraceDynError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())

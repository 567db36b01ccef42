"""Command-line entry point."""
from __future__ import annotations

import argparse
import json
import math
import random
import sys

from . import automata, instances, localsim, mender, orientation, problems, treemend
from .core import LclError, PartialLabeling, accepts, encode_label, is_mend, validate_labeling

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _emit(args, doc, text=None):
    print(text if text is not None else json.dumps(doc, indent=2, sort_keys=True))
    if getattr(args, "json", None):
        with open(args.json, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _problem(pid):
    try:
        return problems.make(pid)
    except LclError as e:
        raise UsageError(str(e)) from None


def _load(path):
    try:
        with open(path) as fh:
            return instances.loads(fh.read())
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except LclError as e:
        raise InputError(f"{path}: {e}") from None


def _params(items):
    out = {}
    for it in items or ():
        if "=" not in it:
            raise UsageError(f"parameter {it!r} is not key=value")
        k, v = it.split("=", 1)
        try:
            out[k] = int(v)
        except ValueError:
            raise UsageError(f"parameter {k} must be an integer") from None
    return out


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected a state a,b, got {text!r}")
    return tuple(parts)


# subcommands

def cmd_problems(args):
    rows, doc = [], []
    for pid in problems.CATALOG:
        # parametrized ids are shown through a representative instance
        sample = pid.replace(":D:k", ":3:1").replace(":k", ":3")
        p = problems.make(sample)
        labels = [encode_label(x) for x in p.labels[:8]]
        more = len(p.labels) > 8
        doc.append({"id": pid, "example": sample, "radius": p.radius, "labels": labels, "truncated": more,
                    "inputs": list(p.input_labels)})
        alpha = " ".join(str(x) for x in labels) + (" ..." if more else "")
        rows.append(f"{pid:<26} r={p.radius}  {alpha}")
    _emit(args, {"schema": 1, "problems": doc}, "\n".join(rows))
    return EXIT_OK


def cmd_verify(args):
    prob = _problem(args.problem)
    g, lam = _load(args.graph)
    try:
        validate_labeling(prob, g, lam)
    except LclError as e:
        raise InputError(str(e)) from None
    acc = accepts(prob, g, lam)
    doc = {"schema": 1, "problem": args.problem, "accepted": acc.accepted,
           "unhappy": list(acc.unhappy_nodes), "complete": lam.complete}
    text = f"{'accepted' if acc.accepted else 'rejected'}"
    if not acc.accepted:
        text += f"; unhappy nodes: {' '.join(map(str, acc.unhappy_nodes))}"
    _emit(args, doc, text if not args.json_stdout else None)
    return EXIT_OK if acc.accepted else EXIT_FAIL


def _fast_mend(pid, g, lam, v, args):
    from .pointer import mend_pointer
    if pid == "grid4":
        return problems.mend_grid4(g, lam, v)
    if pid == "binary3col_restricted":
        return problems.mend_binary3col_restricted(g, lam, v)
    if pid.startswith("deltacol_restricted:"):
        return problems.mend_deltacol_restricted(g, lam, v, int(pid.split(":")[2]))
    if pid == "pointer_lcl":
        return mend_pointer(g, lam, v, args.c)
    raise UsageError(f"no fast mender for {pid}")


def cmd_mend(args):
    prob = _problem(args.problem)
    g, lam = _load(args.graph)
    v = args.node
    if not 0 <= v < g.n:
        raise UsageError(f"node {v} not in graph")
    try:
        validate_labeling(prob, g, lam)
    except LclError as e:
        raise InputError(str(e)) from None
    if not accepts(prob, g, lam):
        raise InputError("labeling is not accepted by the relaxed verifier")
    if lam[v] is not None:
        raise InputError(f"node {v} is not empty")
    if args.method == "oracle":
        t_max = args.max_radius if args.max_radius is not None else g.eccentricity(v)
        m = mender.find_mend(prob, g, lam, v, t_max, check=False)
    elif args.method == "layered":
        m = treemend.mend_tree_layered(prob, g, lam, v, args.k)
    else:
        m = _fast_mend(args.problem, g, lam, v, args)
    if m is None:
        _emit(args, {"schema": 1, "mend": None}, f"no mend of radius <= {args.max_radius}")
        return EXIT_FAIL
    out = m.apply(lam)
    ok = is_mend(prob, g, lam, out, v, m.radius)
    doc = {"schema": 1, "problem": args.problem, "node": v, "t": m.radius, "mend": m.to_json(),
           "valid": ok, "labels": {str(u): encode_label(x) for u, x in enumerate(out)}}
    _emit(args, doc)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_radius(args):
    prob = _problem(args.problem)
    fam = instances.InstanceSpec(args.family, _params(args.param), args.seed)
    sizes = _ints(args.sizes)
    rep = mender.estimate_radius(prob, fam, sizes, mode=args.mode, budget=args.budget, seed=args.seed,
                                 samples=args.samples, problem_id=args.problem)
    _emit(args, rep.to_json(), rep.text())
    return EXIT_OK if rep.complete else EXIT_FAIL


def cmd_solve(args):
    prob = _problem(args.problem)
    g, lam = _load(args.graph)
    try:
        validate_labeling(prob, g, lam)
    except LclError as e:
        raise InputError(str(e)) from None
    if args.method == "constant":
        out, log = localsim.solve_constant_mendable(prob, g, args.k, lam=lam)
    else:
        power = args.nd_power if args.nd_power is not None else 2 * args.k + prob.radius
        nd = localsim.network_decomposition(g, power)
        out, log = localsim.solve_by_decomposition(prob, g, nd, args.k, lam=lam)
    ok = localsim.solved(prob, g, out)
    doc = {"schema": 1, "problem": args.problem, "solved": ok, "rounds": log.rounds, "phases": log.phases,
           "labels": {str(u): encode_label(x) for u, x in enumerate(out)}}
    text = f"solved={ok} phases={log.phases} rounds={log.rounds}"
    _emit(args, doc, None if args.json_stdout else text)
    return EXIT_OK if ok else EXIT_FAIL


def _diagram(args):
    if args.diagram:
        try:
            with open(args.diagram) as fh:
                spec = automata.spec_from_json(json.load(fh))
        except OSError as e:
            raise InputError(f"cannot read {args.diagram}: {e.strerror}") from None
        except (ValueError, KeyError, TypeError) as e:
            raise InputError(f"{args.diagram}: malformed diagram: {e}") from None
    else:
        if not args.problem:
            raise UsageError("give --problem or --diagram")
        prob = _problem(args.problem)
        if prob.path_spec is None:
            raise UsageError(f"{args.problem} has no path description")
        spec = prob.path_spec
    return automata.build_diagram(spec)


def cmd_automaton(args):
    d = _diagram(args)
    if args.action == "classify":
        info = automata.classify_states(d)
        doc = {"schema": 1, "states": [{"state": list(s), **vars(i)} for s, i in sorted(info.items())]}
        rows = [f"{'state':>10} rep loop flex K mirror Km scc"]
        for s, i in sorted(info.items()):
            rows.append(f"{','.join(s):>10} {int(i.repeatable):>3} {int(i.loop):>4} {int(i.flexible):>4} "
                        f"{i.K if i.K is not None else '-'} {int(i.mirror_flexible):>6} "
                        f"{i.K_m if i.K_m is not None else '-'} {i.scc_id:>3}")
        _emit(args, doc, "\n".join(rows))
        return EXIT_OK
    if args.action == "restrict":
        try:
            r = automata.restrict(d, args.mode)
        except automata.NotRestrictableError as e:
            print(f"not restrictable: {e}", file=sys.stderr)
            return EXIT_FAIL
        text = f"K={r.K} q={r.q} states: " + " ".join(",".join(s) for s in r.states)
        _emit(args, r.to_json(), text)
        return EXIT_OK
    if args.frm is None or args.to is None or args.length is None:
        raise UsageError("walk needs --from, --to and --length")
    w = automata.walk(d, _pair(args.frm), _pair(args.to), args.length)
    doc = {"schema": 1, "walk": None if w is None else [list(s) for s in w]}
    _emit(args, doc, "none" if w is None else " ".join(",".join(s) for s in w))
    return EXIT_OK if w is not None else EXIT_FAIL


def cmd_census(args):
    res = orientation.census(jobs=args.jobs)
    doc = {"schema": 1, "total": res["total"], "mendable": res["mendable"], "seconds": round(res["seconds"], 3),
           "failures": [{"corner_in": list(c.corner_in), "edge_in": list(c.edge_in)} for c in res["failures"]]}
    _emit(args, doc, f"{res['mendable']}/{res['total']} mendable ({res['seconds']:.2f}s)")
    return EXIT_OK if not res["failures"] and res["total"] == 1296 else EXIT_FAIL


def cmd_gen(args):
    spec = instances.InstanceSpec(args.kind, _params(args.param), args.seed)
    g = instances.generate(spec)
    doc = instances.to_json(g)
    text = json.dumps(doc, sort_keys=True)
    if args.json:
        _emit(args, doc, f"wrote {g.n} nodes to {args.json}")
    else:
        print(text)
    return EXIT_OK


def lower_bound_expectation(pid: str, n: int) -> int:
    """Least oracle radius the construction is meant to force at its hole."""
    if pid == "ab123":
        return (n - 1) // 2 - 1
    if pid == "pointer_lcl":
        return math.isqrt(n) // 2
    if pid.startswith("binary3col_rigid"):
        return n - RIGID_SLACK
    if pid == "overlap_cycles":
        return 10 * n
    raise UsageError(f"no lower-bound construction for {pid}")


RIGID_SLACK = 0  # rigid trees force radius >= depth - RIGID_SLACK


def cmd_lowerbound(args):
    prob = _problem(args.problem)
    try:
        g, lam = instances.lower_bound_instance(args.problem, args.n)
    except LclError as e:
        raise UsageError(str(e)) from None
    rows = []
    ok = True
    for v in lam.holes():
        rad = mender.mend_radius_at(prob, g, lam, v)
        need = lower_bound_expectation(args.problem, args.n)
        rows.append({"node": v, "radius": rad, "expected_at_least": need, "ok": rad >= need})
        ok &= rad >= need
    doc = {"schema": 1, "problem": args.problem, "n": args.n, "holes": rows, "ok": ok}
    text = "\n".join(f"node {r['node']}: oracle radius {r['radius']} (expected >= {r['expected_at_least']}) "
                     f"{'PASS' if r['ok'] else 'FAIL'}" for r in rows)
    _emit(args, doc, text)
    return EXIT_OK if ok else EXIT_FAIL


def _tree(args):
    if args.graph:
        g, lam = _load(args.graph)
    else:
        if args.random is None:
            raise UsageError("give --graph or --random N")
        g = instances.random_tree(args.random, args.seed)
        lam = PartialLabeling.empty(g.n)
    return g, lam


def cmd_tree(args):
    g, lam = _tree(args)
    try:
        layers = treemend.rake_compress(g, args.k)
    except treemend.NotATreeError as e:
        raise InputError(str(e)) from None
    if args.action == "decompose":
        viol = treemend.check_separation(g, layers, max_pairs=None if g.n <= 200 else 20000, seed=args.seed)
        rad, bound, flagged = treemend.forest_radius(g, layers)
        doc = layers.to_json()
        doc.update({"schema": 1, "layer_bound": treemend.layer_bound(g.n, args.k), "separation_ok": not viol,
                    "forest_radius": rad, "forest_radius_bound": bound, "flagged": flagged})
        text = (f"L={layers.L} (bound {doc['layer_bound']}), {len(layers.compress_paths)} compress paths, "
                f"|Z|={len(layers.Z)}, separation {'ok' if not viol else 'VIOLATED'}, "
                f"forest radius {rad} (bound {bound})")
        _emit(args, doc, text)
        return EXIT_OK if not viol and layers.L <= doc["layer_bound"] else EXIT_FAIL
    prob = _problem(args.problem)
    if args.node is None:
        raise UsageError("tree mend needs --node")
    if lam[args.node] is not None:
        raise InputError(f"node {args.node} is not empty")
    m = treemend.mend_tree_layered(prob, g, lam, args.node, args.k, layers=layers)
    out = m.apply(lam)
    ok = is_mend(prob, g, lam, out, args.node, m.radius)
    env = treemend.envelope(g.n, args.k, layers.L)
    doc = {"schema": 1, "mend": m.to_json(), "valid": ok, "L": layers.L, "envelope": env}
    _emit(args, doc)
    return EXIT_OK if ok and m.radius <= env else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="also write the result as JSON to PATH")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes where supported (default 1)")

    p = argparse.ArgumentParser(prog="mendlab", description="Mending partial solutions of LCL problems.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("problems", parents=[common], help="list catalog problem ids")
    s.add_argument("action", nargs="?", choices=["list"], default="list")
    s.set_defaults(func=cmd_problems)

    s = sub.add_parser("verify", parents=[common], help="run the relaxed verifier on a labeled instance")
    s.add_argument("--problem", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--json-stdout", action="store_true", help="print JSON instead of text")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("mend", parents=[common], help="mend one hole")
    s.add_argument("--problem", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--node", type=int, required=True)
    s.add_argument("--max-radius", type=int)
    s.add_argument("--method", choices=["oracle", "fast", "layered"], default="oracle")
    s.add_argument("--k", type=int, default=2, help="compress threshold for --method layered")
    s.add_argument("--c", type=int, default=2, help="radius constant for the pointer mender")
    s.set_defaults(func=cmd_mend)

    s = sub.add_parser("radius", parents=[common], help="estimate the mending radius over a family")
    s.add_argument("--problem", required=True)
    s.add_argument("--family", required=True, choices=instances.KINDS)
    s.add_argument("--sizes", required=True, help="comma-separated sizes")
    s.add_argument("--mode", choices=["exhaustive", "sampled", "adversarial"], default="exhaustive")
    s.add_argument("--budget", type=int, default=mender.DEFAULT_BUDGET)
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--param", action="append", help="extra family parameter key=value")
    s.set_defaults(func=cmd_radius)

    s = sub.add_parser("solve", parents=[common], help="fill every hole by mending in color-class phases")
    s.add_argument("--problem", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--k", type=int, default=1, help="mending radius used per hole")
    s.add_argument("--method", choices=["constant", "decomposition"], default="constant")
    s.add_argument("--nd-power", type=int, help="power of the graph to decompose (default 2k+r)")
    s.add_argument("--json-stdout", action="store_true")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("automaton", parents=[common], help="diagram classification, restriction and walks")
    s.add_argument("action", choices=["classify", "restrict", "walk"])
    s.add_argument("--problem")
    s.add_argument("--diagram", help="JSON file with edge/node/start/end label pairs")
    s.add_argument("--mode", choices=["directed", "undirected_path", "undirected_cycle"], default="directed")
    s.add_argument("--from", dest="frm")
    s.add_argument("--to")
    s.add_argument("--length", type=int)
    s.set_defaults(func=cmd_automaton)

    s = sub.add_parser("census-134", parents=[common], help="3x3 patch census for {1,3,4}-orientations")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("gen", parents=[common], help="generate an instance graph as JSON")
    s.add_argument("kind", choices=instances.KINDS)
    s.add_argument("--param", action="append", help="key=value, e.g. n=10")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("lowerbound", parents=[common], help="oracle radius on a hard instance")
    s.add_argument("problem", choices=instances.LOWER_BOUND_IDS)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_lowerbound)

    s = sub.add_parser("tree", parents=[common], help="rake-and-compress layers and layered mending")
    s.add_argument("action", choices=["decompose", "mend"])
    s.add_argument("--graph")
    s.add_argument("--random", type=int, metavar="N", help="use a seeded random tree on N nodes")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--problem")
    s.add_argument("--node", type=int)
    s.set_defaults(func=cmd_tree)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT
    except LclError as e:
        print(f"failed: {e}", file=sys.stderr)
        return EXIT_FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

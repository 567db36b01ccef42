"""Catalog of LCL problems, their fast menders and the shift-down solver."""
from __future__ import annotations

import itertools
from functools import lru_cache

from .core import (BOT, Graph, LclError, LclProblem, Mend, PathSpec, PreconditionError, _raw,
                   happy)
from .instances import children_of, parent_of, root_of


class UnknownProblemError(LclError):
    pass


# paths and cycles

def path_spec_from_edges(labels, edge_pairs, start=None, end=None) -> PathSpec:
    labels = tuple(labels)
    return PathSpec(labels, frozenset(edge_pairs), frozenset((a, a) for a in labels),
                    frozenset(start if start is not None else labels),
                    frozenset(end if end is not None else labels))


def path_checker(spec: PathSpec):
    """Verifier reading a path/cycle through its next/prev ports."""
    def check(g, lab, v):
        a = lab[v]
        nxt, prv = g.follow(v, "next"), g.follow(v, "prev")
        if nxt is None and prv is None:
            # no orientation available: read edges in both directions
            for w in g.adj[v]:
                if (a, lab[w]) not in spec.edge and (lab[w], a) not in spec.edge:
                    return False
            return len(g.adj[v]) > 1 or a in spec.start | spec.end
        if nxt is not None and (a, lab[nxt]) not in spec.edge:
            return False
        if prv is not None and (lab[prv], a) not in spec.edge:
            return False
        if prv is None and a not in spec.start:
            return False
        if nxt is None and a not in spec.end:
            return False
        return True
    return check


def coloring(k: int, name: str | None = None) -> LclProblem:
    labels = tuple(str(i) for i in range(1, k + 1))

    def check(g, lab, v):
        a = lab[v]
        return all(lab[w] != a for w in g.adj[v])

    spec = path_spec_from_edges(labels, [(a, b) for a in labels for b in labels if a != b])
    return LclProblem(name or f"coloring:{k}", labels, 1, check, path_spec=spec)


AB123_EDGES = [("A", "B"), ("1", "2"), ("1", "3"), ("2", "3")]


def ab123() -> LclProblem:
    labels = ("A", "B", "1", "2", "3")
    pairs = {(a, b) for a, b in AB123_EDGES} | {(b, a) for a, b in AB123_EDGES}
    spec = path_spec_from_edges(labels, pairs)

    def check(g, lab, v):
        a = lab[v]
        return all((a, lab[w]) in pairs for w in g.adj[v])

    return LclProblem("ab123", labels, 1, check, path_spec=spec)


def problem_from_spec(spec: PathSpec, name: str) -> LclProblem:
    """Node-output problem on paths/cycles given by a PathSpec (C_Node must be equality)."""
    return LclProblem(name, spec.labels, 1, path_checker(spec), path_spec=spec)


# orientations: a node's output is a tuple over its sorted neighbors, 'i' = edge points in

@lru_cache(maxsize=None)
def _orient_tuples(d):
    return tuple(itertools.product("io", repeat=d))


def orientation134() -> LclProblem:
    def domain(g, u):
        return _orient_tuples(len(g.adj[u]))

    def check(g, lab, v):
        mine = lab[v]
        for i, w in enumerate(g.adj[v]):
            theirs = lab[w][g.adj[w].index(v)]
            if mine[i] == theirs:
                return False
        if len(g.adj[v]) == 4:
            return mine.count("i") in (1, 3, 4)
        return True

    return LclProblem("orientation134", _orient_tuples(4), 1, check, domain=domain)


# rooted trees

def _kids_colors(g, lab, u):
    return [lab[c] for c in children_of(g, u)]


def is_mixed(g: Graph, lab, u) -> bool:
    return len(set(_kids_colors(g, lab, u))) > 1


def binary3col() -> LclProblem:
    p = coloring(3, "binary3col")
    return LclProblem("binary3col", p.labels, 1, p.check)


def binary3col_restricted() -> LclProblem:
    labels = ("1", "2", "3")

    def check(g, lab, v):
        a = lab[v]
        if any(lab[w] == a for w in g.adj[v]):
            return False
        if not is_mixed(g, lab, v):
            return True
        par = parent_of(g, v)
        if par is not None and is_mixed(g, lab, par):
            return False
        return not any(is_mixed(g, lab, c) for c in children_of(g, v))

    return LclProblem("binary3col_restricted", labels, 2, check)


# child-color configurations allowed per parent color, for the configuration-restricted variants
RIGID_V1_CONFIGS = {("1", "22"), ("1", "33"), ("2", "11"), ("2", "33"), ("3", "11"), ("3", "22"),
                    ("3", "12"), ("2", "13")}
RIGID_V2_CONFIGS = {("1", "22"), ("1", "33"), ("2", "11"), ("3", "22")}


def binary3col_configs(name, allowed) -> LclProblem:
    labels = ("1", "2", "3")

    def check(g, lab, v):
        kids = sorted(_kids_colors(g, lab, v))
        if not kids:
            return True
        if len(kids) == 1:
            kids = kids * 2
        return (lab[v], "".join(kids)) in allowed

    return LclProblem(name, labels, 1, check)


def deltacol_restricted(delta: int, k: int) -> LclProblem:
    if delta < 3 or k < 1:
        raise UnknownProblemError("deltacol_restricted needs delta >= 3 and k >= 1")
    labels = tuple(str(i) for i in range(1, delta + 1))

    def mixed_chain(g, lab, u, depth):
        # is there a downward path of `depth` more edges through mixed nodes starting at mixed u
        if depth == 0:
            return True
        return any(is_mixed(g, lab, c) and mixed_chain(g, lab, c, depth - 1) for c in children_of(g, u))

    def check(g, lab, v):
        a = lab[v]
        if any(lab[w] == a for w in g.adj[v]):
            return False
        if is_mixed(g, lab, v) and mixed_chain(g, lab, v, k):
            return False
        return True

    return LclProblem(f"deltacol_restricted:{delta}:{k}", labels, k + 1, check,
                      meta={"delta": delta, "k": k})


OVERLAP_LABELS = ("1", "2", "3", "4", "5", "A", "B", "C", "D", "E", "F", "G", "H", "a", "b", "c", "d", "e")


def overlap_arcs():
    long_cycle = ("1", "2", "3", "4", "5", "A", "B", "C", "D", "E", "F", "G", "H")
    short_cycle = ("1", "2", "3", "4", "5", "a", "b", "c", "d", "e")
    arcs = set()
    for cyc in (long_cycle, short_cycle):
        for i, x in enumerate(cyc):
            arcs.add((x, cyc[(i + 1) % len(cyc)]))
    return frozenset(arcs)


def overlap_cycles() -> LclProblem:
    arcs = overlap_arcs()

    def check(g, lab, v):
        a = lab[v]
        return all((a, lab[c]) in arcs for c in children_of(g, v))

    return LclProblem("overlap_cycles", OVERLAP_LABELS, 1, check)


CATALOG = ("coloring:k", "grid4", "grid5", "ab123", "orientation134", "binary3col", "binary3col_restricted",
           "binary3col_rigid_v1", "binary3col_rigid_v2", "deltacol_restricted:D:k", "pointer_lcl",
           "overlap_cycles")


def make(pid: str) -> LclProblem:
    parts = pid.split(":")
    head = parts[0]
    try:
        if head == "coloring" and len(parts) == 2:
            return coloring(int(parts[1]))
        if head == "deltacol_restricted" and len(parts) == 3:
            return deltacol_restricted(int(parts[1]), int(parts[2]))
    except ValueError:
        raise UnknownProblemError(f"bad parameters in {pid!r}") from None
    if pid == "grid4":
        return coloring(4, "grid4")
    if pid == "grid5":
        return coloring(5, "grid5")
    if pid == "ab123":
        return ab123()
    if pid == "orientation134":
        return orientation134()
    if pid == "binary3col":
        return binary3col()
    if pid == "binary3col_restricted":
        return binary3col_restricted()
    if pid == "binary3col_rigid_v1":
        return binary3col_configs(pid, RIGID_V1_CONFIGS)
    if pid == "binary3col_rigid_v2":
        return binary3col_configs(pid, RIGID_V2_CONFIGS)
    if pid == "pointer_lcl":
        from .pointer import pointer_problem
        return pointer_problem()
    if pid == "overlap_cycles":
        return overlap_cycles()
    raise UnknownProblemError(f"unknown problem {pid!r}")


# fast menders

def _require_hole(lam, v):
    if lam[v] is not None:
        raise PreconditionError(f"node {v} is not empty")


def region_mend(problem: LclProblem, g: Graph, lam, v: int, region) -> Mend | None:
    """Lexicographically first mend at v that only touches `region` (a node set containing v)."""
    from .mender import Counter, _BallSearch
    raw = _raw(lam)
    search = _BallSearch(problem, g, raw, v, 0, Counter(), variables=sorted(region))
    res = search.solve()
    if res is None:
        return None
    changes = {u: a for u, a in res.items() if a != raw[u]}
    dist = g.ball(v, g.n)
    return Mend(v, max((dist[u] for u in changes), default=0), changes)


def _patch_ok(problem, g, raw, changes):
    work = list(raw)
    for u, x in changes.items():
        work[u] = x
    near = {w for u in changes for w in g.ball(u, problem.radius)}
    return all(happy(problem, g, work, w) for w in near)


def mend_grid4(g: Graph, lam, v: int) -> Mend:
    """Greedy fill if a color is free, else recolor a 2x2 block around v by 4-cycle list coloring.

    Filling v can expose conflicts that the hole was hiding in an accepted but
    improper partial coloring; those inputs fall back to exact search on the
    radius-2, then radius-3 ball.
    """
    raw = _raw(lam)
    _require_hole(raw, v)
    problem = coloring(4, "grid4")
    palette = problem.labels
    used = {raw[w] for w in g.adj[v]}
    free = [c for c in palette if c not in used]
    if free and _patch_ok(problem, g, raw, {v: free[0]}):
        return Mend(v, 0, {v: free[0]})
    for dx, dy in (("Right", "Up"), ("Left", "Up"), ("Left", "Down"), ("Right", "Down")):
        a = g.follow(v, dx)
        b = g.follow(v, dy)
        c = g.follow(a, dy) if a is not None else None
        if a is None or b is None or c is None or g.follow(b, dx) != c:
            continue
        block = [v, a, c, b]  # in cyclic order
        lists = []
        for u in block:
            outside = {raw[w] for w in g.adj[u] if w not in block}
            lists.append([x for x in palette if x not in outside])
        for combo in itertools.product(*lists):
            if all(combo[i] != combo[(i + 1) % 4] for i in range(4)):
                changes = {u: x for u, x in zip(block, combo) if x != raw[u]}
                changes[v] = combo[0]
                if _patch_ok(problem, g, raw, changes):
                    return Mend(v, 2 if c in changes else 1, changes)
    for t in (2, 3):
        m = region_mend(problem, g, raw, v, g.ball(v, t))
        if m is not None:
            return m
    raise PreconditionError(f"no 4-coloring mend of radius <= 3 at node {v}")


def block_lists(g: Graph, lam, v: int):
    """Per-node lists of the first 2x2 block mend_grid4 would use (for inspection)."""
    raw = _raw(lam)
    a, b = g.follow(v, "Right"), g.follow(v, "Up")
    c = g.follow(a, "Up")
    block = [v, a, c, b]
    return {u: [x for x in "1234" if x not in {raw[w] for w in g.adj[u] if w not in block}] for u in block}


def _subtree(g, u, depth):
    out, frontier = [u], [u]
    for _ in range(depth):
        frontier = [c for x in frontier for c in children_of(g, x)]
        out.extend(frontier)
    return out


def mend_binary3col_restricted(t: Graph, lam, v: int) -> Mend:
    """Repair v by recoloring v, its children and grandchildren; failing that, widen to the siblings.

    The last resort is exact search on balls of radius 1 to 3, which also covers
    parents that must change and conflicts hidden next to the hole.
    """
    raw = _raw(lam)
    _require_hole(raw, v)
    problem = binary3col_restricted()
    region = _subtree(t, v, 2)
    regions = [list(region)]
    par = parent_of(t, v)
    if par is not None:
        for s in children_of(t, par):
            region.extend(x for x in _subtree(t, s, 1) if x not in region)
        regions.append(region)
    regions.extend(t.ball(v, rad) for rad in (1, 2, 3))
    for reg in regions:
        m = region_mend(problem, t, raw, v, reg)
        if m is not None:
            return m
    raise PreconditionError("labeling violates the restricted coloring constraints")


def mend_deltacol_restricted(t: Graph, lam, v: int, k: int) -> Mend:
    """Recolor the mixed components below v bottom-up; if v's parent is the root, the siblings too."""
    raw = _raw(lam)
    _require_hole(raw, v)
    delta = max(len(children_of(t, root_of(t))), 3)
    problem = deltacol_restricted(delta, k)
    region = _subtree(t, v, k + 1)
    m = region_mend(problem, t, raw, v, region)
    if m is None:
        par = parent_of(t, v)
        if par is not None:
            for s in children_of(t, par):
                region.extend(x for x in _subtree(t, s, k + 1) if x not in region)
        m = region_mend(problem, t, raw, v, region)
    for rad in range(1, k + 3 + 1):
        if m is not None:
            break
        m = region_mend(problem, t, raw, v, t.ball(v, rad))
    if m is None:
        raise PreconditionError("labeling violates the restricted coloring constraints")
    return m


def solve_shift_down(t: Graph, palette: int, log=None):
    """Proper coloring with `palette` colors in which every node's children share one color."""
    from .core import PartialLabeling
    from .localsim import distance_coloring
    if palette < 3:
        raise PreconditionError("shift-down needs at least 3 colors")
    root = root_of(t)
    col, clog = distance_coloring(t, 1)
    col = [col[u] for u in t.nodes]
    rounds = clog.rounds

    def shift(col):
        new = list(col)
        for u in t.nodes:
            p = parent_of(t, u)
            if p is None:
                new[u] = min(c for c in range(1, palette + 1) if c != col[u])
            else:
                new[u] = col[p]
        return new

    top = max(col, default=1)
    for c in range(top, palette, -1):
        col = shift(col)
        rounds += 1
        new = list(col)
        for u in t.nodes:
            if col[u] == c:
                blocked = {col[w] for w in t.adj[u]}
                new[u] = min(x for x in range(1, palette + 1) if x not in blocked)
        col = new
        rounds += 1
    col = shift(col)
    rounds += 1
    if log is not None:
        log.rounds += rounds
    return PartialLabeling(str(c) for c in col)

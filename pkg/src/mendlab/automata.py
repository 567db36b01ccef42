"""Diagrams of node-edge-checkable path/cycle problems: classification, restriction, walks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import networkx as nx

from .core import BOT, Graph, LclError, Mend, PathSpec, _raw


class NotRestrictableError(LclError):
    pass


class InvalidPartialSolution(LclError):
    pass


@dataclass(frozen=True)
class Diagram:
    labels: tuple
    states: tuple  # sorted label pairs
    succ: dict = field(compare=False)  # state -> tuple of successor states
    start_states: frozenset = frozenset()
    end_states: frozenset = frozenset()
    symmetric: bool = False
    node_rel: frozenset = frozenset()
    start: frozenset = frozenset()
    end: frozenset = frozenset()
    K: int | None = None  # flexibility parameter (set on restricted diagrams)
    q: int = 0  # number of non-repeatable states kept

    def to_json(self):
        return {"schema": 1, "states": [list(s) for s in self.states],
                "transitions": [[list(s), list(t)] for s in self.states for t in self.succ[s]],
                "start_states": sorted(list(s) for s in self.start_states),
                "end_states": sorted(list(s) for s in self.end_states),
                "symmetric": self.symmetric, "K": self.K, "q": self.q}

    def edge_pairs(self):
        return frozenset(self.states)

    def as_spec(self) -> PathSpec:
        labs = tuple(sorted({x for s in self.states for x in s}))
        return PathSpec(labs, frozenset(self.states), self.node_rel,
                        self.start & frozenset(labs), self.end & frozenset(labs))


def build_diagram(spec: PathSpec) -> Diagram:
    states = tuple(sorted(spec.edge))
    succ = {s: tuple(t for t in states if (s[1], t[0]) in spec.node) for s in states}
    sym = (spec.start == spec.end
           and all((b, a) in spec.edge for a, b in spec.edge)
           and all((b, a) in spec.node for a, b in spec.node))
    return Diagram(tuple(spec.labels), states, succ,
                   frozenset(s for s in states if s[0] in spec.start),
                   frozenset(s for s in states if s[1] in spec.end),
                   sym, frozenset(spec.node), frozenset(spec.start), frozenset(spec.end))


def _digraph(d: Diagram) -> nx.DiGraph:
    G = nx.DiGraph()
    G.add_nodes_from(d.states)
    for s in d.states:
        for t in d.succ[s]:
            G.add_edge(s, t)
    return G


@dataclass
class StateInfo:
    repeatable: bool
    loop: bool
    flexible: bool
    K: int | None
    mirror_flexible: bool
    K_m: int | None
    scc_id: int
    period: int | None


def ell_max(d: Diagram) -> int:
    s = len(d.states)
    return s * s + 2 * s


def _reach_lengths(d: Diagram, src, lmax):
    """sets[l] = states reachable from src by a walk of exactly l transitions."""
    sets = [frozenset([src])]
    for _ in range(lmax):
        sets.append(frozenset(t for s in sets[-1] for t in d.succ[s]))
    return sets


def _threshold(hits, lmax):
    """Least K >= 1 such that hits[l] holds for every K <= l <= lmax, else None."""
    if not hits[lmax]:
        return None
    K = lmax
    while K > 1 and hits[K - 1]:
        K -= 1
    return K


def classify_states(d: Diagram) -> dict:
    G = _digraph(d)
    sccs = sorted((sorted(c) for c in nx.strongly_connected_components(G)), key=lambda c: c[0])
    scc_of = {s: i for i, c in enumerate(sccs) for s in c}
    lmax = ell_max(d)
    out = {}
    for s in d.states:
        comp = sccs[scc_of[s]]
        loop = s in d.succ[s]
        repeatable = loop or len(comp) > 1
        period = None
        if repeatable:
            period = _period(G.subgraph(comp), s)
        reach = _reach_lengths(d, s, lmax)
        hits = [s in r for r in reach]
        K = _threshold(hits, lmax) if repeatable else None
        flexible = repeatable and period == 1
        if flexible and K is None:
            raise AssertionError(f"flexibility bound exceeded for state {s}")
        if not flexible:
            K = None
        mirror = (s[1], s[0])
        Km = _threshold([mirror in r for r in reach], lmax) if mirror in scc_of else None
        out[s] = StateInfo(repeatable, loop, flexible, K, Km is not None, Km, scc_of[s], period)
    return out


def _period(sub: nx.DiGraph, s) -> int:
    level = {s: 0}
    order = [s]
    for u in order:
        for w in sub.successors(u):
            if w not in level:
                level[w] = level[u] + 1
                order.append(w)
    g = 0
    for u, w in sub.edges():
        g = math.gcd(g, level[u] + 1 - level[w])
    return g


def _induced(d: Diagram, keep, K=None, q=0) -> Diagram:
    keep = set(keep)
    states = tuple(sorted(keep))
    succ = {s: tuple(t for t in d.succ[s] if t in keep) for s in states}
    return replace(d, states=states, succ=succ,
                   start_states=frozenset(s for s in states if s in d.start_states),
                   end_states=frozenset(s for s in states if s in d.end_states),
                   symmetric=d.symmetric and all((b, a) in keep for a, b in keep), K=K, q=q)


def restrict(d: Diagram, mode: str = "directed") -> Diagram:
    info = classify_states(d)
    if mode not in ("directed", "undirected_path", "undirected_cycle"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode != "directed" and not d.symmetric:
        raise NotRestrictableError("undirected restriction needs a symmetric problem")
    comps: dict[int, list] = {}
    for s, i in info.items():
        comps.setdefault(i.scc_id, []).append(s)
    if mode == "directed":
        good = [sorted(c) for c in comps.values() if any(info[s].flexible for s in c)]
    else:
        good = [sorted(c) for c in comps.values() if any(info[s].mirror_flexible and info[s].flexible for s in c)]
    if not good:
        raise NotRestrictableError("no flexible state: the problem is not solvable in log-star time")
    best = min(good, key=lambda c: (len(c), c))
    K = max(info[s].K for s in best)
    if mode != "undirected_path":
        return _induced(d, best, K=K, q=0)
    core = set(best)
    G = _digraph(d)
    nonrep = {s for s in d.states if not info[s].repeatable}
    allowed = G.subgraph(core | nonrep)
    into_core = set()
    from_core = set()
    for s in nonrep:
        if any(nx.has_path(allowed, s, c) for c in core):
            into_core.add(s)
        if any(nx.has_path(allowed, c, s) for c in core):
            from_core.add(s)
    attach = set()
    for s in nonrep:
        # on a walk start -> core or core -> end staying in core or non-repeatable states
        if s in into_core and any(nx.has_path(allowed, a, s) for a in d.start_states if a in allowed):
            attach.add(s)
        if s in from_core and any(nx.has_path(allowed, s, b) for b in d.end_states if b in allowed):
            attach.add(s)
    attach = {s for s in attach if (s[1], s[0]) in attach}
    return _induced(d, core | attach, K=K, q=len(attach))


def walk(d: Diagram, frm, to, length: int):
    """Lexicographically first walk of exactly `length` transitions from frm to to.

    Returns the states after frm (so the list has `length` entries), or None.
    """
    if length < 0:
        return None
    if frm not in d.succ or to not in d.succ:
        return None
    # can[l] = states from which `to` is reachable in exactly l steps
    can = [frozenset([to])]
    for _ in range(length):
        prev = can[-1]
        can.append(frozenset(s for s in d.states if any(t in prev for t in d.succ[s])))
    if frm not in can[length]:
        return None
    out, cur = [], frm
    for rem in range(length - 1, -1, -1):
        cur = min(t for t in d.succ[cur] if t in can[rem])
        out.append(cur)
    return out


def problem_for(d: Diagram, name: str = "restricted"):
    from .problems import problem_from_spec
    return problem_from_spec(d.as_spec(), name)


def _walk_dir(g: Graph, v, port, steps):
    out = []
    u = v
    for _ in range(steps):
        u = g.follow(u, port)
        if u is None or u == v or u in out:
            break
        out.append(u)
    return out


def _fill_segment(d: Diagram, seg, raw, left, right, cyclic=False):
    """Labels for the nodes of seg (in next-order) between anchor labels left/right.

    An anchor of None with flag 'end' means a path end; BOT means free.
    Prefers each node's current label, then label order.
    """
    pairs = d.edge_pairs()
    labs = sorted({x for s in d.states for x in s})
    m = len(seg)
    start_ok = {s[0] for s in d.start_states}
    end_ok = {s[1] for s in d.end_states}

    def left_ok(x):
        if left == "end":
            return x in start_ok
        return left is BOT or (left, x) in pairs

    def right_ok(x):
        if right == "end":
            return x in end_ok
        return right is BOT or (x, right) in pairs

    # feas[i] = labels x for seg[i] from which seg[i+1:] can be completed
    feas = [set() for _ in range(m)]
    for i in range(m - 1, -1, -1):
        for x in labs:
            if i == m - 1:
                ok = right_ok(x)
            else:
                ok = any((x, y) in pairs for y in feas[i + 1])
            if ok:
                feas[i].add(x)
    out = []
    prev = None
    for i in range(m):
        cands = [x for x in feas[i] if (left_ok(x) if i == 0 else (prev, x) in pairs)]
        if not cands:
            return None
        cur = raw[seg[i]]
        x = cur if cur in cands else min(cands)
        out.append(x)
        prev = x
    return out


def _closed_fill(d: Diagram, order, raw):
    pairs = d.edge_pairs()
    for s in d.states:
        w = walk(d, s, s, len(order))
        if w is not None:
            # state i+1 is the edge (order[i], order[i+1]); the node label is its first entry
            labels = [t[0] for t in w]
            labels = labels[-1:] + labels[:-1]
            if all((labels[i], labels[(i + 1) % len(order)]) in pairs for i in range(len(order))):
                return labels
    return None


def mend_path(restricted: Diagram, g: Graph, lam, v: int) -> Mend:
    """Blank the (K+q)-ball of v and splice a diagram walk between the boundary labels."""
    raw = _raw(lam)
    if raw[v] is not None:
        raise LclError(f"node {v} is not empty")
    labs = {x for s in restricted.states for x in s}
    for x in raw:
        if x is not None and x not in labs:
            raise InvalidPartialSolution(f"label {x!r} is outside the restricted diagram")
    s = (restricted.K or 1) + restricted.q
    back = _walk_dir(g, v, "prev", s + 1)
    fwd = _walk_dir(g, v, "next", s + 1)
    cyclic = g.follow(v, "prev") is not None and g.follow(v, "next") is not None and \
        len(g.ball(v, s + 1)) == g.n and all(len(g.adj[u]) == 2 for u in g.nodes)
    if cyclic and 2 * s + 2 >= g.n:
        order = [v]
        u = g.follow(v, "next")
        while u != v:
            order.append(u)
            u = g.follow(u, "next")
        labels = _closed_fill(restricted, order, raw)
        if labels is None:
            raise InvalidPartialSolution("no closed walk of the cycle length")
        changes = {u: x for u, x in zip(order, labels) if raw[u] != x}
        changes[v] = labels[0]
        dist = g.ball(v, g.n)
        return Mend(v, max(dist[u] for u in changes), changes)
    inner_back = back[:s]
    inner_fwd = fwd[:s]
    left_anchor = back[s] if len(back) > s else None
    right_anchor = fwd[s] if len(fwd) > s else None
    seg = list(reversed(inner_back)) + [v] + inner_fwd

    def anchor_label(a, outer_port, seg_side):
        if a is None:
            return "end", False
        if raw[a] is None:
            return BOT, False
        o = g.follow(a, outer_port)
        # a labeled anchor whose outer pair is broken was only happy thanks to an empty inner neighbour
        if o is not None and raw[o] is not None:
            pair = (raw[o], raw[a]) if outer_port == "prev" else (raw[a], raw[o])
            if pair not in restricted.edge_pairs():
                return BOT, True
        return raw[a], False

    left, drop_left = anchor_label(left_anchor, "prev", 0)
    right, drop_right = anchor_label(right_anchor, "next", -1)
    keep_empty = []
    if drop_left:
        keep_empty.append(seg.pop(0))
    if drop_right:
        keep_empty.append(seg.pop())
    labels = _fill_segment(restricted, seg, raw, left, right)
    if labels is None:
        raise InvalidPartialSolution("no walk connects the boundary labels")
    changes = {u: x for u, x in zip(seg, labels) if raw[u] != x}
    dist = g.ball(v, s)
    return Mend(v, max((dist[u] for u in changes), default=0), changes)


def spec_from_json(doc: dict) -> PathSpec:
    """PathSpec from {"edge": [[a, b], ...], "node": [[b, c], ...], "start": [...], "end": [...]}."""
    edge = frozenset(tuple(map(str, p)) for p in doc["edge"])
    labels = sorted({x for p in edge for x in p} | {str(x) for x in doc.get("labels", [])})
    node = frozenset(tuple(map(str, p)) for p in doc.get("node", [[x, x] for x in labels]))
    start = frozenset(map(str, doc.get("start", labels)))
    end = frozenset(map(str, doc.get("end", labels)))
    return PathSpec(tuple(labels), edge, node, start, end)

"""Distance colorings, network decompositions and the mend-by-color-class solver."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import BOT, Graph, LclError, LclProblem, PartialLabeling, _raw, accepts
from .mender import Counter, find_mend

# ball carving bounds: c <= CARVE_A * ceil(log2 n) + CARVE_B, d <= 2 * (CARVE_A * ceil(log2 n) + CARVE_B)
CARVE_A, CARVE_B = 1, 1
# rounds per phase are at most ROUND_C * (d + 1) * (k + r)
ROUND_C = 3


class MendabilityViolated(LclError):
    def __init__(self, node, k):
        super().__init__(f"node {node} admits no {k}-mend")
        self.node = node


class PatchOverlapError(LclError):
    pass


@dataclass
class RoundLog:
    rounds: int = 0
    phases: int = 0
    events: list = field(default_factory=list)

    def to_json(self):
        return {"rounds": self.rounds, "phases": self.phases,
                "events": [{"phase": p, "component": c, "touched": t} for p, c, t in self.events]}


@dataclass
class NetworkDecomposition:
    power: int
    color_of: list
    c: int
    d: int

    def classes(self):
        out: dict[int, list[int]] = {}
        for u, col in enumerate(self.color_of):
            out.setdefault(col, []).append(u)
        return out


def power_adjacency(g: Graph, k: int) -> list[list[int]]:
    return [sorted(w for w in g.ball(v, k) if w != v) for v in g.nodes]


def distance_coloring(g: Graph, k: int):
    """Colors any two nodes within distance k differently, with at most D+1 <= max_degree^k + 1 colors.

    Simulates color reduction from id-based colors: each reduction round recolors
    the top remaining color class to the smallest free color.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    adj = power_adjacency(g, k)
    D = max((len(a) for a in adj), default=0)
    color = {v: v + 1 for v in g.nodes}
    log = RoundLog()
    for v in sorted(g.nodes, reverse=True):
        if color[v] <= D + 1:
            continue
        used = {color[w] for w in adj[v]}
        color[v] = next(c for c in range(1, D + 2) if c not in used)
        log.rounds += k
    return color, log


def _components(nodes, adj):
    nodeset = set(nodes)
    seen = set()
    comps = []
    for s in sorted(nodes):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w in nodeset and w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def _bfs(adj, s, allowed=None):
    dist = {s: 0}
    frontier = [s]
    while frontier:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in dist and (allowed is None or w in allowed):
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def network_decomposition(g: Graph, power: int, target=None) -> NetworkDecomposition:
    """Sequential ball carving on the power graph.

    Each color class is built by growing balls while they more than double;
    the ball's outer layer is deferred to later colors, so same-color clusters
    are non-adjacent in the power graph.
    """
    if power < 1:
        raise ValueError("power must be >= 1")
    adj = power_adjacency(g, power)
    remaining = set(g.nodes)
    color_of = [0] * g.n
    c = 0
    d = 0
    while remaining:
        c += 1
        avail = set(remaining)
        while avail:
            s = min(avail)
            ball = {s}
            layer = {s}
            rad = 0
            while True:
                nxt = {w for u in layer for w in adj[u] if w in avail and w not in ball}
                if len(ball) + len(nxt) <= 2 * len(ball) or not nxt:
                    break
                ball |= nxt
                layer = nxt
                rad += 1
            for u in ball:
                color_of[u] = c
            remaining -= ball
            avail -= ball
            avail -= {w for u in ball for w in adj[u]}
            d = max(d, 2 * rad)
    nd = NetworkDecomposition(power, color_of, c, d)
    nd.d = max((_weak_diameter(adj, comp) for comps in _class_components(nd, adj) for comp in comps), default=0)
    return nd


def _class_components(nd, adj):
    return [_components(nodes, adj) for _, nodes in sorted(nd.classes().items())]


def _weak_diameter(adj, comp):
    best = 0
    for s in comp:
        dist = _bfs(adj, s)
        best = max(best, max(dist[u] for u in comp))
    return best


def check_decomposition(g: Graph, nd: NetworkDecomposition) -> bool:
    if len(nd.color_of) != g.n or any(not 1 <= x <= nd.c for x in nd.color_of):
        return False
    adj = power_adjacency(g, nd.power)
    for comps in _class_components(nd, adj):
        for comp in comps:
            if _weak_diameter(adj, comp) > nd.d:
                return False
    return True


def decomposition_bounds(n: int):
    lg = math.ceil(math.log2(max(n, 2)))
    return CARVE_A * lg + CARVE_B, 2 * (CARVE_A * lg + CARVE_B)


def _mend_component(problem, g, raw, comp, k, counter):
    work = list(raw)
    touched = set()
    for v in comp:
        if work[v] is not None:
            continue
        m = find_mend(problem, g, work, v, k, check=False, counter=counter)
        if m is None:
            raise MendabilityViolated(v, k)
        for u, x in m.changes.items():
            work[u] = x
            touched.add(u)
    return work, touched


def solve_by_decomposition(problem: LclProblem, g: Graph, nd: NetworkDecomposition, k: int,
                           lam=None, verify_replay: bool = True):
    """Fill every hole by mending, one color class of the decomposition at a time."""
    raw = list(_raw(lam)) if lam is not None else [BOT] * g.n
    r = problem.radius
    adj = power_adjacency(g, nd.power)
    log = RoundLog()
    counter = Counter()
    for phase, comps in enumerate(_class_components(nd, adj), start=1):
        start = list(raw)
        results = []
        for comp in comps:
            if all(start[v] is not None for v in comp):
                continue
            work, touched = _mend_component(problem, g, start, comp, k, counter)
            results.append((comp, work, touched))
        # patches of one phase must be pairwise far apart
        for i in range(len(results)):
            for j in range(i + 1, len(results)):
                ti, tj = results[i][2], results[j][2]
                if len(ti) > len(tj):
                    ti, tj = tj, ti
                for u in ti:
                    near = g.ball(u, r)
                    if any(w in tj for w in near):
                        raise PatchOverlapError(f"phase {phase}: patches of components {results[i][0][0]} "
                                                f"and {results[j][0][0]} are within distance {r}")
        for comp, work, touched in results:
            for u in touched:
                raw[u] = work[u]
            log.events.append((phase, comp[0], sorted(touched)))
        if verify_replay and results:
            seq = list(start)
            for comp, _, _ in results:
                seq, _ = _mend_component(problem, g, seq, comp, k, counter)
            if seq != raw:
                raise PatchOverlapError(f"phase {phase}: parallel and sequential execution differ")
        log.phases += 1
        log.rounds += (nd.d + 1) * nd.power + k + r
    out = PartialLabeling(raw)
    return out, log


def solve_constant_mendable(problem: LclProblem, g: Graph, k: int, lam=None, verify_replay: bool = True):
    """Distance-(2k+r) coloring used as a decomposition with singleton clusters."""
    power = 2 * k + problem.radius
    color, clog = distance_coloring(g, power)
    cols = [color[u] for u in g.nodes]
    nd = NetworkDecomposition(power, cols, max(cols, default=1), 0)
    out, log = solve_by_decomposition(problem, g, nd, k, lam=lam, verify_replay=verify_replay)
    log.rounds += clog.rounds
    return out, log


def palette_bound(g: Graph, problem: LclProblem, k: int) -> int:
    return g.max_degree ** (2 * k + problem.radius) + 1


def solved(problem, g, lab) -> bool:
    return lab.complete and bool(accepts(problem, g, lab))

"""Rake-and-compress layering of trees and the layered logarithmic-radius mender."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .core import BOT, Graph, LclError, LclProblem, Mend, PreconditionError, _raw
from .mender import Counter, _BallSearch, find_mend

# L <= LAYER_A * ceil(log2 n) + LAYER_B * k + 1
LAYER_A, LAYER_B = 2, 2
# changed nodes lie within ENVELOPE_C * (2k+1) * L of the hole
ENVELOPE_C = 4


class NotATreeError(LclError):
    pass


class MendabilityWindowExceeded(LclError):
    pass


@dataclass
class RakeCompressLayers:
    layer_label: dict  # node -> ("R" | "C", layer)
    L: int
    compress_paths: list
    Z: frozenset
    k: int
    path_of: dict = field(default_factory=dict)  # compress node -> index into compress_paths

    def layer(self, u) -> int:
        return self.layer_label[u][1]

    def key(self, u):
        # rake nodes of a layer are removed before its compress nodes
        kind, i = self.layer_label[u]
        return (i, 0 if kind == "R" else 1)

    def to_json(self):
        return {"k": self.k, "L": self.L,
                "layers": {str(u): f"{a}_{i}" for u, (a, i) in sorted(self.layer_label.items())},
                "compress_paths": self.compress_paths, "Z": sorted(self.Z)}


def layer_bound(n: int, k: int) -> int:
    return LAYER_A * math.ceil(math.log2(max(n, 2))) + LAYER_B * k + 1


def _require_tree(t: Graph):
    if t.n == 0:
        raise NotATreeError("empty graph")
    if len(t.edges()) != t.n - 1 or len(t.ball(0, t.n)) != t.n:
        raise NotATreeError("graph is not a tree")


def rake_compress(t: Graph, k: int) -> RakeCompressLayers:
    if k < 1:
        raise ValueError("k must be >= 1")
    _require_tree(t)
    alive = set(t.nodes)
    deg = {u: len(t.adj[u]) for u in t.nodes}
    label: dict = {}
    paths: list = []
    path_of: dict = {}
    i = 0

    def remove(nodes):
        for u in nodes:
            alive.discard(u)
        for u in nodes:
            for w in t.adj[u]:
                if w in alive:
                    deg[w] -= 1

    while alive:
        i += 1
        rake = [u for u in alive if deg[u] <= 1]
        for u in rake:
            label[u] = ("R", i)
        remove(rake)
        # maximal chains of degree-2 nodes
        seen = set()
        chains = []
        for s in sorted(alive):
            if deg[s] != 2 or s in seen:
                continue
            chain = [s]
            seen.add(s)
            for side in (0, 1):
                prev, cur = s, [w for w in t.adj[s] if w in alive][side]
                part = []
                while cur in alive and deg[cur] == 2 and cur not in seen:
                    part.append(cur)
                    seen.add(cur)
                    nxt = [w for w in t.adj[cur] if w in alive and w != prev]
                    prev, cur = cur, nxt[0]
                chain = chain + part if side == 1 else part[::-1] + chain
            chains.append(chain)
        comp = []
        for chain in chains:
            if len(chain) >= 2 * k + 1:
                for u in chain:
                    label[u] = ("C", i)
                    path_of[u] = len(paths)
                paths.append(chain)
                comp.extend(chain)
        remove(comp)
    Z = set()
    for p in paths:
        Z.update(p[k:len(p) - k])
    return RakeCompressLayers(label, i, paths, frozenset(Z), k, path_of)


def _components(t: Graph, nodes):
    nodes = set(nodes)
    seen = set()
    out = []
    for s in sorted(nodes):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        j = 0
        while j < len(comp):
            for w in t.adj[comp[j]]:
                if w in nodes and w not in seen:
                    seen.add(w)
                    comp.append(w)
            j += 1
        out.append(comp)
    return out


def check_separation(t: Graph, layers: RakeCompressLayers, max_pairs: int | None = None, seed: int = 0):
    """Violations of the layer structure, as (v1, v2, layer, reason) tuples; empty when fine.

    Within a round the rake step precedes the compress step, so pairs are
    compared per step: two rake nodes of round i (or two compress nodes of
    round i on different paths) must be disconnected in the forest of nodes
    removed no later than that step, or be separated by a compress node of an
    earlier round. Two rake nodes that are adjacent (a two-node component
    raked at once) are exempt. max_pairs caps the reported violations.
    """
    lab = layers.layer_label
    out = []
    key = layers.key
    for u in t.nodes:
        kind, i = lab[u]
        up = [w for w in t.adj[u] if key(w) > key(u)]
        same = [w for w in t.adj[u] if key(w) == key(u)]
        if kind == "R" and len(up) + len(same) > 1:
            out.append((u, None, i, "rake node with several neighbours at its layer or above"))
        if kind == "C" and (len(up) > 1 or len(up) + len(same) > 2):
            out.append((u, None, i, "compress node with too many neighbours at its layer or above"))
    rng = random.Random(seed)
    steps = sorted({key(u) for u in t.nodes})
    for st in steps:
        i = st[0]
        # drop compress nodes of earlier rounds; what stays connected is not separated
        low = {u for u in t.nodes if key(u) <= st and not (lab[u][0] == "C" and lab[u][1] < i)}
        pairs = []
        for comp in _components(t, low):
            top = [u for u in comp if key(u) == st]
            for x, a in enumerate(top):
                for b in top[x + 1:]:
                    if st[1] == 1 and layers.path_of[a] == layers.path_of[b]:
                        continue
                    if b in t.adj[a]:
                        continue
                    pairs.append((a, b))
        if max_pairs is not None and len(pairs) > max_pairs:
            pairs = rng.sample(pairs, max_pairs)
        out.extend((a, b, i, "same-layer nodes connected without a lower compress node") for a, b in pairs)
    return out


def forest_radius(t: Graph, layers: RakeCompressLayers):
    """Largest radius of a tree of T - Z, with the (k+1)L envelope and the trees exceeding it."""
    bound = (layers.k + 1) * layers.L
    worst = 0
    flagged = []
    for comp in _components(t, set(t.nodes) - layers.Z):
        rad = _tree_radius(t, set(comp), comp[0])
        worst = max(worst, rad)
        if rad > bound:
            flagged.append(comp[0])
    return worst, bound, flagged


def _dists(t, nodes, s):
    dist = {s: 0}
    q = [s]
    for u in q:
        for w in t.adj[u]:
            if w in nodes and w not in dist:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def _tree_radius(t, nodes, s):
    # tree radius = ceil(diameter / 2), diameter via double sweep
    d1 = _dists(t, nodes, s)
    a = max(d1, key=d1.get)
    d2 = _dists(t, nodes, a)
    return (max(d2.values()) + 1) // 2


def global_solution(problem: LclProblem, t: Graph):
    # fill the nodes one at a time in BFS order, mending each with the smallest radius
    work = [BOT] * t.n
    for u in _dists(t, set(t.nodes), 0):
        m = find_mend(problem, t, work, u, t.n, check=False)
        if m is None:
            raise PreconditionError(f"{problem.name} has no solution on this tree")
        for x, a in m.changes.items():
            work[x] = a
    return work


def _blank_z_neighbours(t, layers, nodes, work, orig, X):
    for u in nodes:
        for w in t.adj[u]:
            if w in layers.Z and w not in nodes and work[w] is not BOT:
                work[w] = BOT
                if orig[w] is not BOT:
                    X.add(w)


def mend_tree_layered(problem: LclProblem, t: Graph, lam, v: int, k: int = 2, layers=None,
                      solution=None) -> Mend:
    orig = list(_raw(lam))
    if orig[v] is not BOT:
        raise PreconditionError(f"node {v} is not empty")
    layers = layers or rake_compress(t, k)
    k = layers.k
    work = list(orig)
    X: set = set()
    notz = set(t.nodes) - layers.Z
    if v not in layers.Z:
        s = solution or global_solution(problem, t)
        comp = next(c for c in _components(t, notz) if v in c)
        cs = set(comp)
        _blank_z_neighbours(t, layers, cs, work, orig, X)
        for u in comp:
            work[u] = s[u]
    else:
        X.add(v)
    c = max(k - problem.radius, 0)
    guard = 0
    while X:
        guard += 1
        if guard > 10 * t.n:
            raise MendabilityWindowExceeded("layered mending did not converge")
        u = max(X, key=lambda x: (layers.layer(x), -x))
        X.discard(u)
        if work[u] is not BOT:
            continue
        path = layers.compress_paths[layers.path_of[u]]
        pos = path.index(u)
        window = path[max(pos - c, 0):pos + c + 1]
        pset = set(path)
        region = set(window)
        for w in window:
            for x in t.adj[w]:
                if x in pset or x in region:
                    continue
                sub = _dists(t, notz - pset, x) if x in notz else {}
                region.update(sub)
                _blank_z_neighbours(t, layers, set(sub), work, orig, X)
        doms = {}
        for x in region:
            cands = list(problem.candidates(t, x))
            if orig[x] is BOT and x != v and x not in X and work[x] is BOT:
                doms[x] = [BOT] + cands
            else:
                pref = orig[x] if orig[x] is not BOT else work[x]
                doms[x] = ([pref] if pref is not BOT else []) + [a for a in cands if a != pref]
        res = _BallSearch(problem, t, work, u, 0, Counter(), variables=sorted(region), domains=doms).solve()
        if res is None:
            raise MendabilityWindowExceeded(f"no completion of the window around node {u} with k={k}")
        for x, a in res.items():
            work[x] = a
    changes = {x: work[x] for x in t.nodes if work[x] != orig[x]}
    rad = max((t.dist(v, x) for x in changes), default=0)
    return Mend(v, int(rad), changes)


def envelope(n: int, k: int, L: int) -> int:
    return ENVELOPE_C * (2 * k + 1) * L

"""Deterministic instance generators, adversarial partial labelings and JSON io."""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace

from .core import BOT, Graph, LclError, PartialLabeling, decode_label, encode_label

KINDS = ("path", "cycle", "grid", "torus", "complete_binary_tree", "regular_tree", "random_tree",
         "rigid_tree_v1", "rigid_tree_v2", "overlap_cycles_tree")

LOWER_BOUND_IDS = ("ab123", "pointer_lcl", "binary3col_rigid_v1", "binary3col_rigid_v2", "overlap_cycles")


class InstanceError(LclError):
    pass


class ParseError(LclError):
    pass


# which parameter a single "size" stands for, per kind
_SIZE_PARAM = {"path": "n", "cycle": "n", "random_tree": "n", "grid": ("width", "height"),
               "torus": ("width", "height"), "complete_binary_tree": "depth", "regular_tree": "depth",
               "rigid_tree_v1": "depth", "rigid_tree_v2": "depth", "overlap_cycles_tree": "levels"}


@dataclass(frozen=True)
class InstanceSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int | None = None

    def resized(self, n: int) -> "InstanceSpec":
        key = _SIZE_PARAM[self.kind]
        p = dict(self.params)
        for k in (key if isinstance(key, tuple) else (key,)):
            p[k] = n
        return replace(self, params=p)


def _need(spec, *names):
    try:
        vals = [int(spec.params[k]) for k in names]
    except KeyError as e:
        raise InstanceError(f"{spec.kind}: missing parameter {e.args[0]}") from None
    return vals


def path(n: int) -> Graph:
    if n < 1:
        raise InstanceError("path needs n >= 1")
    ports = {}
    for i in range(n - 1):
        ports[(i, i + 1)] = "next"
        ports[(i + 1, i)] = "prev"
    return Graph(n, [(i, i + 1) for i in range(n - 1)], ports, max_degree=2)


def cycle(n: int) -> Graph:
    if n < 3:
        raise InstanceError("cycle needs n >= 3")
    ports = {}
    for i in range(n):
        ports[(i, (i + 1) % n)] = "next"
        ports[((i + 1) % n, i)] = "prev"
    return Graph(n, [(i, (i + 1) % n) for i in range(n)], ports, max_degree=2)


def grid(width: int, height: int, wrap: bool = False) -> Graph:
    """Row-major grid; node (x, y) has id y*width + x, Up increases y."""
    if width < 1 or height < 1:
        raise InstanceError("grid needs positive sides")
    if wrap and (width < 3 or height < 3):
        raise InstanceError("torus needs sides >= 3")
    edges, ports = [], {}

    def nid(x, y):
        return (y % height) * width + (x % width)

    for y in range(height):
        for x in range(width):
            u = nid(x, y)
            if wrap or x + 1 < width:
                w = nid(x + 1, y)
                edges.append((u, w))
                ports[(u, w)] = "Right"
                ports[(w, u)] = "Left"
            if wrap or y + 1 < height:
                w = nid(x, y + 1)
                edges.append((u, w))
                ports[(u, w)] = "Up"
                ports[(w, u)] = "Down"
    return Graph(width * height, edges, ports, max_degree=4)


def coords(g_width: int, u: int) -> tuple[int, int]:
    return u % g_width, u // g_width


def rooted_tree(parents: list) -> Graph:
    """Tree from a parent list (root has parent None); children get ports child0, child1, ..."""
    n = len(parents)
    kids: list[list[int]] = [[] for _ in range(n)]
    for u, p in enumerate(parents):
        if p is not None:
            kids[p].append(u)
    edges, ports = [], {}
    for p in range(n):
        for i, c in enumerate(kids[p]):
            edges.append((p, c))
            ports[(p, c)] = f"child{i}"
            ports[(c, p)] = "parent"
    return Graph(n, edges, ports)


def parent_of(g: Graph, u: int):
    return g.follow(u, "parent")


def children_of(g: Graph, u: int) -> list[int]:
    out = []
    i = 0
    while True:
        c = g.follow(u, f"child{i}")
        if c is None:
            return out
        out.append(c)
        i += 1


def root_of(g: Graph) -> int:
    for u in g.nodes:
        if parent_of(g, u) is None:
            return u
    raise InstanceError("no root")


def depth_of(g: Graph, u: int) -> int:
    d = 0
    while (u := parent_of(g, u)) is not None:
        d += 1
    return d


def complete_tree(arity_root: int, arity: int, depth: int) -> Graph:
    """BFS-numbered rooted tree: the root has arity_root children, inner nodes arity."""
    if depth < 0:
        raise InstanceError("depth must be >= 0")
    parents = [None]
    frontier = [0]
    for d in range(depth):
        nxt = []
        for p in frontier:
            for _ in range(arity_root if d == 0 else arity):
                parents.append(p)
                nxt.append(len(parents) - 1)
        frontier = nxt
    return rooted_tree(parents)


def random_tree(n: int, seed: int) -> Graph:
    """Random recursive tree with degree at most 4, rooted at node 0."""
    if n < 1:
        raise InstanceError("random_tree needs n >= 1")
    rng = random.Random(seed)
    parents = [None]
    deg = [0]
    open_nodes = [0]
    for u in range(1, n):
        while True:
            i = rng.randrange(len(open_nodes))
            p = open_nodes[i]
            if deg[p] < 3:
                break
            open_nodes[i] = open_nodes[-1]
            open_nodes.pop()
        parents.append(p)
        deg[p] += 1
        deg.append(0)
        open_nodes.append(u)
    return rooted_tree(parents)


# rigid pattern trees: node types carry a color and the types of their two children;
# the hole is the root, whose two children get the listed types
RIGID_V1 = {"types": (("1", (2, 2)), ("1", (3, 3)), ("2", (1, 3)), ("3", (0, 2))), "root": (2, 3)}
RIGID_V2 = {"types": (("1", (2, 2)), ("1", (3, 3)), ("2", (0, 1)), ("3", (2, 2))), "root": (2, 3)}

CYCLE_LONG = ("5", "A", "B", "C", "D", "E", "F", "G", "H", "1", "2", "3", "4")
CYCLE_SHORT = ("5", "a", "b", "c", "d", "e", "1", "2", "3", "4")


def _pattern_labels(g: Graph, pattern):
    types = pattern["types"]
    lab = [BOT] * g.n
    ty = [None] * g.n
    root = root_of(g)
    order = [root]
    for u in order:
        kids = children_of(g, u)
        order.extend(kids)
        kt = pattern["root"] if u == root else types[ty[u]][1]
        for c, t in zip(kids, kt):
            ty[c] = t
            lab[c] = types[t][0]
    return lab


def _overlap_tree(levels: int):
    """Root hole; left child 4 rooting the substructure; right child 3 whose children root it."""
    if levels < 1:
        raise InstanceError("overlap_cycles_tree needs levels >= 1")
    parents, lab = [None], [BOT]

    def add(p, x):
        parents.append(p)
        lab.append(x)
        return len(parents) - 1

    def substructure(top, lv):
        leaves = []
        for chain in (CYCLE_LONG, CYCLE_SHORT):
            u = top
            for x in chain:
                u = add(u, x)
            leaves.append(u)
        if lv > 1:
            for leaf in leaves:
                substructure(leaf, lv - 1)

    left = add(0, "4")
    right = add(0, "3")
    substructure(left, levels)
    for _ in range(2):
        substructure(add(right, "4"), levels)
    return rooted_tree(parents), lab


def generate(spec: InstanceSpec) -> Graph:
    k = spec.kind
    if k == "path":
        return path(*_need(spec, "n"))
    if k == "cycle":
        return cycle(*_need(spec, "n"))
    if k in ("grid", "torus"):
        w, h = _need(spec, "width", "height")
        return grid(w, h, wrap=(k == "torus"))
    if k in ("complete_binary_tree", "rigid_tree_v1", "rigid_tree_v2"):
        return complete_tree(2, 2, *_need(spec, "depth"))
    if k == "regular_tree":
        delta, depth = _need(spec, "delta", "depth")
        if delta < 2:
            raise InstanceError("regular_tree needs delta >= 2")
        return complete_tree(delta, delta - 1, depth)
    if k == "random_tree":
        if spec.seed is None:
            raise InstanceError("random_tree needs a seed")
        return random_tree(*_need(spec, "n"), spec.seed)
    if k == "overlap_cycles_tree":
        return _overlap_tree(*_need(spec, "levels"))[0]
    raise InstanceError(f"unknown kind {k!r}")


def lower_bound_instance(problem_id: str, n: int) -> tuple[Graph, PartialLabeling]:
    """Adversarial partial labeling for a catalog problem.

    n is the path length for ab123, the node count (a square) for pointer_lcl,
    the depth for the rigid trees and the recursion depth for overlap_cycles.
    """
    if problem_id == "ab123":
        if n < 3 or n % 2 == 0:
            raise InstanceError("ab123 lower bound needs odd n >= 3")
        k = (n - 1) // 2
        lab = []
        for i in range(n):
            if i == k:
                lab.append(BOT)
            elif i < k:
                lab.append("A" if i % 2 == 0 else "B")
            else:
                lab.append("B" if i % 2 == 0 else "A")
        return path(n), PartialLabeling(lab)
    if problem_id == "pointer_lcl":
        s = math.isqrt(n)
        if s * s != n or s < 3:
            raise InstanceError("pointer_lcl lower bound needs a square n >= 9")
        g = grid(s, s, wrap=True)
        m = (s + 1) // 2
        lab = ["Zero"] * n

        def at(x, y):  # 1-indexed coordinates
            return (y - 1) * s + (x - 1)

        lab[at(m, m)] = BOT
        for x in range(m + 1, s + 1):
            lab[at(x, m)] = "Left"
        return g, PartialLabeling(lab)
    if problem_id in ("binary3col_rigid_v1", "binary3col_rigid_v2"):
        if n < 1:
            raise InstanceError("rigid trees need depth >= 1")
        v = problem_id[-2:]
        g = complete_tree(2, 2, n)
        return g, PartialLabeling(_pattern_labels(g, RIGID_V1 if v == "v1" else RIGID_V2))
    if problem_id == "overlap_cycles":
        g, lab = _overlap_tree(n)
        return g, PartialLabeling(lab)
    raise InstanceError(f"no lower-bound construction for {problem_id!r}")


# JSON

def to_json(g: Graph, lab: PartialLabeling | None = None) -> dict:
    nodes = []
    for u in g.nodes:
        entry: dict = {"id": u}
        ports = {g.ports[(u, w)]: w for w in g.adj[u] if (u, w) in g.ports}
        if ports:
            entry["ports"] = ports
        nodes.append(entry)
    doc = {"schema": 1, "nodes": nodes, "edges": [list(e) for e in g.edges()], "max_degree": g.max_degree}
    if lab is not None:
        doc["labels"] = {str(u): encode_label(x) for u, x in enumerate(lab)}
    return doc


def from_json(doc: dict) -> tuple[Graph, PartialLabeling]:
    try:
        ids = sorted(int(nd["id"]) for nd in doc["nodes"])
        if ids != list(range(len(ids))):
            raise ParseError("node ids must be 0..n-1")
        n = len(ids)
        ports = {}
        for nd in doc["nodes"]:
            for lab, w in nd.get("ports", {}).items():
                ports[(int(nd["id"]), int(w))] = lab
        edges = [(int(a), int(b)) for a, b in doc.get("edges", [])]
        g = Graph(n, edges, ports, max_degree=doc.get("max_degree"))
        raw = [BOT] * n
        for key, x in (doc.get("labels") or {}).items():
            raw[int(key)] = decode_label(x)
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, LclError) as e:
        raise ParseError(f"malformed instance: {e}") from None
    return g, PartialLabeling(raw)


def dumps(g: Graph, lab: PartialLabeling | None = None) -> str:
    return json.dumps(to_json(g, lab), sort_keys=True)


def loads(text: str) -> tuple[Graph, PartialLabeling]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at line {e.lineno} column {e.colno} (char {e.pos}): {e.msg}") from None
    return from_json(doc)


def io_roundtrip(g: Graph, lab: PartialLabeling) -> tuple[Graph, PartialLabeling]:
    return loads(dumps(g, lab))

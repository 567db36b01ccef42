"""Exhaustive 3x3-block census for {1,3,4}-orientations of grids."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

ALLOWED_INDEGREES = (1, 3, 4)

# block positions (x, y), row-major ids 0..8
POS = [(x, y) for y in range(3) for x in range(3)]
CORNERS = [(0, 0), (2, 0), (0, 2), (2, 2)]
MIDPOINTS = [(1, 0), (0, 1), (2, 1), (1, 2)]
CENTER = (1, 1)


def _pid(p):
    return p[1] * 3 + p[0]


# the 12 internal edges as (lower id, higher id), sorted
EDGES = sorted(
    [(_pid((x, y)), _pid((x + 1, y))) for y in range(3) for x in range(2)]
    + [(_pid((x, y)), _pid((x, y + 1))) for y in range(2) for x in range(3)]
)


@dataclass(frozen=True)
class BoundaryConfig:
    corner_in: tuple  # incoming external edges per corner, in CORNERS order
    edge_in: tuple  # incoming external edge per midpoint, in MIDPOINTS order

    def external(self) -> np.ndarray:
        ext = np.zeros(9, dtype=np.int8)
        for p, k in zip(CORNERS, self.corner_in):
            ext[_pid(p)] = k
        for p, k in zip(MIDPOINTS, self.edge_in):
            ext[_pid(p)] = k
        return ext


def enumerate_boundary_configs() -> list[BoundaryConfig]:
    out = []
    for c in itertools.product(range(3), repeat=4):
        for e in itertools.product(range(2), repeat=4):
            out.append(BoundaryConfig(c, e))
    return out


def _orientation_table():
    # bit 0: edge (a, b) points a -> b, bit 1: b -> a; rows in lexicographic bit order
    bits = np.array(list(itertools.product((0, 1), repeat=12)), dtype=np.int8)
    indeg = np.zeros((bits.shape[0], 9), dtype=np.int8)
    for j, (a, b) in enumerate(EDGES):
        indeg[:, b] += 1 - bits[:, j]
        indeg[:, a] += bits[:, j]
    return bits, indeg


_TABLE = None


def _table():
    global _TABLE
    if _TABLE is None:
        _TABLE = _orientation_table()
    return _TABLE


def indegrees(cfg: BoundaryConfig, patch) -> list[int]:
    """Total indegree of each block node under a patch given as (tail, head) pairs."""
    deg = list(cfg.external())
    for _, head in patch:
        deg[head] += 1
    return [int(x) for x in deg]


def find_patch(cfg: BoundaryConfig):
    """Lexicographically first orientation of the 12 internal edges, as (tail, head) pairs, or None."""
    bits, indeg = _table()
    total = indeg + cfg.external()
    ok = np.isin(total, ALLOWED_INDEGREES).all(axis=1)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None
    row = bits[hits[0]]
    return [(a, b) if row[j] == 0 else (b, a) for j, (a, b) in enumerate(EDGES)]


def census(jobs: int = 1) -> dict:
    t0 = time.perf_counter()
    cfgs = enumerate_boundary_configs()
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as ex:
            patches = list(ex.map(find_patch, cfgs, chunksize=64))
    else:
        patches = [find_patch(c) for c in cfgs]
    failures = [c for c, p in zip(cfgs, patches) if p is None]
    return {"total": len(cfgs), "mendable": len(cfgs) - len(failures), "failures": failures,
            "seconds": time.perf_counter() - t0}


def embedded_instance(cfg: BoundaryConfig, size: int = 7):
    """A size x size grid orientation whose centre block sees cfg from outside, centre left empty.

    Every node except the centre and its neighbours satisfies the indegree rule.
    """
    from .instances import grid
    from .mender import Counter, _BallSearch
    from .problems import orientation134

    g = grid(size, size)
    prob = orientation134()
    c0 = size // 2 - 1
    block = {(c0 + x) + (c0 + y) * size: (x, y) for x, y in POS}
    centre = (c0 + 1) * size + (c0 + 1)
    ext = cfg.external()
    # for each block node, which outside neighbours must point in
    want_in = {}
    for u, p in block.items():
        outs = [w for w in g.adj[u] if w not in block]
        k = int(ext[_pid(p)])
        for i, w in enumerate(outs):
            want_in[(u, w)] = i < k
    doms = {}
    for u in g.nodes:
        if u == centre:
            continue
        cands = []
        for tup in prob.candidates(g, u):
            ok = True
            for i, w in enumerate(g.adj[u]):
                if (u, w) in want_in and (tup[i] == "i") != want_in[(u, w)]:
                    ok = False
                if (w, u) in want_in and (tup[i] == "o") != want_in[(w, u)]:
                    ok = False
            if ok:
                cands.append(tup)
        doms[u] = cands
    raw = [None] * g.n
    search = _BallSearch(prob, g, raw, centre, 0, Counter(), variables=sorted(doms), domains=doms)
    res = search.solve()
    if res is None:
        return None
    for u, x in res.items():
        raw[u] = x
    # the block's internal edges are free in the mend; show them as some consistent orientation
    return g, raw, centre

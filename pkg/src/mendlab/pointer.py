"""Grid-structure checks and the pointer problem with its square-root-radius mender."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .core import BOT, Graph, LclError, LclProblem, Mend, PreconditionError, _raw, happy

GRID_LABELS = ("Up", "Down", "Left", "Right")
OUTPUTS = ("Zero", "Flag", "Left", "Up", "Right")
POINTERS = ("Left", "Up", "Right")
MOVES = ("Left", "Up", "Right")  # BFS expansion order
# cycle search tries monotone walks first, then allows Left
CYCLE_MOVES = (("Right", "Up"), MOVES)
# labels the target of a pointer may carry
TARGET_OK = {
    "Left": ("Left", "Up", "Flag"),
    "Right": ("Right", "Up", "Flag"),
    "Up": ("Up", "Left", "Right", "Flag"),
}


class GridConstraintError(LclError):
    def __init__(self, violation):
        super().__init__(f"grid constraint {violation.cid} fails at node {violation.node}: {violation.description}")
        self.violation = violation


class NoMendFound(LclError):
    pass


@dataclass(frozen=True)
class GridViolation:
    node: int
    cid: str
    description: str


def _walk(g: Graph, u: int, labels):
    for lab in labels:
        if u is None:
            return None
        u = g.follow(u, lab)
    return u


def check_grid_constraints(g: Graph, v: int) -> list[GridViolation]:
    out = []
    adj = g.adj[v]
    if len(adj) != 4:
        out.append(GridViolation(v, "1a", f"degree {len(adj)}"))
    if v in adj or len(set(adj)) != len(adj):
        out.append(GridViolation(v, "1b", "self-loop or parallel edge"))
    labs = [g.port(v, w) for w in adj]
    bad = [x for x in labs if x is not None and x not in GRID_LABELS]
    if bad:
        out.append(GridViolation(v, "1c", f"labels outside the grid alphabet: {bad}"))
    if any(x is None for x in labs):
        out.append(GridViolation(v, "1d", "edge endpoint without a label"))
    present = [x for x in labs if x is not None]
    if len(set(present)) != len(present):
        out.append(GridViolation(v, "1e", "repeated label at node"))
    if out:
        return out
    up = g.follow(v, "Up")
    if g.port(up, v) != "Down":
        out.append(GridViolation(v, "2a", f"Up neighbour {up} does not see the edge as Down"))
    right = g.follow(v, "Right")
    if g.port(right, v) != "Left":
        out.append(GridViolation(v, "2b", f"Right neighbour {right} does not see the edge as Left"))
    a = _walk(g, v, ("Down", "Right", "Up"))
    if a is None or a != right:
        out.append(GridViolation(v, "2c", "Down-Right-Up does not reach the Right neighbour"))
    return out


def _check(g: Graph, lab, v: int) -> bool:
    a = lab[v]
    if a == "Flag":
        return bool(check_grid_constraints(g, v))
    if a == "Zero":
        for w in g.adj[v]:
            b = lab[w]
            if b in POINTERS and g.follow(w, b) == v:
                return False
        return True
    w = g.follow(v, a)
    if w is None:
        return False
    return lab[w] in TARGET_OK[a]


def pointer_problem() -> LclProblem:
    return LclProblem("pointer_lcl", OUTPUTS, 1, _check, input_labels=GRID_LABELS)


def _budget(g, c):
    return max(1, math.floor(c * math.sqrt(g.n)))


def _locally_ok(problem, g, raw, changed) -> bool:
    seen = set()
    for u in changed:
        for w in g.ball(u, 1):
            if w not in seen:
                seen.add(w)
                if not happy(problem, g, raw, w):
                    return False
    return True


def _try(problem, g, raw, v, changes, case):
    work = list(raw)
    for u, x in changes.items():
        work[u] = x
    if not _locally_ok(problem, g, work, changes):
        return None
    rad = max(g.dist(v, u) for u in changes)
    return Mend(v, int(rad), {u: x for u, x in changes.items() if raw[u] != x or u == v}, case)


def _bfs_paths(g: Graph, u: int, r: int):
    """Shortest Left/Up/Right move paths from u, in BFS order: yields (node, [(node, move), ...])."""
    prev = {u: None}
    q = deque([u])
    order = []
    while q:
        x = q.popleft()
        order.append(x)
        if g.dist(u, x) >= r:
            continue
        for mv in MOVES:
            y = g.follow(x, mv)
            if y is not None and y not in prev and g.dist(u, y) <= r:
                prev[y] = (x, mv)
                q.append(y)
    for y in order[1:]:
        steps = []
        z = y
        while prev[z] is not None:
            x, mv = prev[z]
            steps.append((x, mv))
            z = x
        yield y, steps[::-1]


def _cycles_with(g: Graph, u: int, r: int, moves):
    for mv0 in moves:
        s = g.follow(u, mv0)
        if s is None:
            continue
        if s == u:
            yield [(u, mv0)]
            continue
        prev = {s: None}
        q = deque([s])
        found = None
        while q and found is None:
            x = q.popleft()
            depth = 0
            z = x
            while prev[z] is not None:
                z = prev[z][0]
                depth += 1
            if depth + 2 > r:
                continue
            for mv in moves:
                y = g.follow(x, mv)
                if y == u and depth == 0:
                    continue  # straight back along the edge just taken
                if y == u:
                    found = (x, mv)
                    break
                if y is not None and y not in prev:
                    prev[y] = (x, mv)
                    q.append(y)
        if found is None:
            continue
        steps = [found]
        z = found[0]
        while prev[z] is not None:
            steps.append(prev[z])
            z = prev[z][0]
        steps.append((u, mv0))
        yield steps[::-1]


def _cycles(g: Graph, u: int, r: int):
    """Closed walks through u of length at most r: Up/Right-only ones first, then with Left."""
    seen = set()
    for moves in CYCLE_MOVES:
        for cyc in sorted(_cycles_with(g, u, r, moves), key=len):
            key = tuple(cyc)
            if key not in seen:
                seen.add(key)
                yield cyc


def find_up_right_cycle(g: Graph, u: int, r: int):
    """Closed walk through u of at most r Left/Up/Right moves, as a node list; Up/Right-only walks preferred."""
    prev = {u: 0}
    q = deque([u])
    while q:
        x = q.popleft()
        viol = check_grid_constraints(g, x)
        if viol:
            raise GridConstraintError(viol[0])
        if prev[x] >= r:
            continue
        for mv in MOVES:
            y = g.follow(x, mv)
            if y is not None and y not in prev:
                prev[y] = prev[x] + 1
                q.append(y)
    for cyc in _cycles(g, u, r):
        return [x for x, _ in cyc]
    return None


def mend_pointer(g: Graph, lam, v: int, c: int = 2) -> Mend:
    """Apply the first of the five mending cases that yields a locally valid patch.

    If filling v exposes an error the hole was hiding, fall back to exact search on a small ball.
    """
    problem = pointer_problem()
    raw = list(_raw(lam))
    if raw[v] is not BOT:
        raise PreconditionError(f"node {v} is not empty")
    r = _budget(g, c)
    # case 1: the structure around v is broken
    if check_grid_constraints(g, v):
        m = _try(problem, g, raw, v, {v: "Flag"}, 1)
        if m is not None:
            return m
    nbr = [raw[w] for w in g.adj[v]]
    # case 2: no neighbour carries a pointer
    if all(x in ("Zero", "Flag", BOT) for x in nbr):
        m = _try(problem, g, raw, v, {v: "Zero"}, 2)
        if m is not None:
            return m
    # case 3: point at a pointer neighbour that does not point back
    for mv in MOVES:
        w = g.follow(v, mv)
        if w is None or raw[w] not in POINTERS or g.follow(w, raw[w]) == v:
            continue
        if raw[w] not in TARGET_OK[mv]:
            continue
        m = _try(problem, g, raw, v, {v: mv}, 3)
        if m is not None:
            return m
    # case 4: a chain towards a Flag or empty node
    for y, steps in _bfs_paths(g, v, r):
        if raw[y] not in ("Flag", BOT):
            continue
        m = _try(problem, g, raw, v, {x: mv for x, mv in steps}, 4)
        if m is not None:
            return m
    # case 5: close a wrap-around cycle
    for cyc in _cycles(g, v, r):
        m = _try(problem, g, raw, v, {x: mv for x, mv in cyc}, 5)
        if m is not None:
            return m
    # filling v exposed an error the hole was hiding (e.g. a stray Flag next to it)
    from .problems import region_mend
    for rad in range(1, min(r, 2) + 1):
        m = region_mend(problem, g, raw, v, g.ball(v, rad))
        if m is not None:
            return Mend(m.center, m.radius, m.changes, 6)
    raise NoMendFound(f"no pointer mend within radius {r} at node {v}")

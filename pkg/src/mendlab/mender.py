"""Exhaustive mend oracle: minimal-radius mends by backtracking over balls."""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Any

from .core import (BOT, Graph, LclError, LclProblem, Mend, PartialLabeling,
                   PreconditionError, _raw, accepts, happy, validate_labeling)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7
_REVISE_LIMIT = 48  # max product of other-domain sizes for look-ahead on one constraint


class UnsolvableInstanceError(LclError):
    pass


class BudgetExceeded(LclError):
    pass


class Counter:
    def __init__(self, budget=None):
        self.calls = 0
        self.budget = budget

    def tick(self, k=1):
        self.calls += k
        if self.budget is not None and self.calls > self.budget:
            raise BudgetExceeded(f"more than {self.budget} verifier calls")


def _value_order(problem, g, raw, u, v):
    cands = list(problem.candidates(g, u))
    cur = raw[u]
    if u == v:
        return cands
    if cur is None:
        return [BOT] + cands
    return [cur] + [x for x in cands if x != cur]


class _BallSearch:
    """Backtracking with look-ahead over the labels of one ball."""

    def __init__(self, problem: LclProblem, g: Graph, raw, v: int, t: int, counter: Counter,
                 variables=None, domains=None):
        self.p, self.g, self.counter = problem, g, counter
        self.vars = sorted(g.ball(v, t) if variables is None else variables)
        self.varset = set(self.vars)
        self.cur = list(raw)
        r = problem.radius
        self.scopes: dict[int, list[int]] = {}
        self.by_var: dict[int, list[int]] = {x: [] for x in self.vars}
        if variables is None:
            watched = g.ball(v, t + r)
        else:
            watched = set()
            for x in self.vars:
                watched.update(g.ball(x, r))
        for w in sorted(watched):
            sc = sorted(u for u in g.ball(w, r) if u in self.varset)
            if sc:
                self.scopes[w] = sc
                for x in sc:
                    self.by_var[x].append(w)
        self.dom0 = {x: list(domains[x]) if domains and x in domains else _value_order(problem, g, raw, x, v)
                     for x in self.vars}

    def _ok(self, w, assign):
        cur = self.cur
        for x, a in assign.items():
            cur[x] = a
        self.counter.tick()
        return happy(self.p, self.g, cur, w)

    def _revise(self, w, dom) -> list[int] | None:
        """Prune values without support in constraint w. Returns changed vars or None on wipeout."""
        sc = self.scopes[w]
        sizes = [len(dom[x]) for x in sc]
        total = 1
        for s in sizes:
            total *= s
        changed = []
        for i, x in enumerate(sc):
            if total // sizes[i] > _REVISE_LIMIT:
                continue
            others = [y for y in sc if y != x]
            keep = []
            for a in dom[x]:
                for combo in itertools.product(*(dom[y] for y in others)):
                    assign = dict(zip(others, combo))
                    assign[x] = a
                    if self._ok(w, assign):
                        keep.append(a)
                        break
            if len(keep) != len(dom[x]):
                if not keep:
                    return None
                total = total // len(dom[x]) * len(keep)
                sizes[i] = len(keep)
                dom[x] = keep
                changed.append(x)
        return changed

    def _propagate(self, dom, queue) -> bool:
        pending = list(dict.fromkeys(queue))
        inq = set(pending)
        while pending:
            w = pending.pop(0)
            inq.discard(w)
            changed = self._revise(w, dom)
            if changed is None:
                return False
            for x in changed:
                for w2 in self.by_var[x]:
                    if w2 not in inq:
                        inq.add(w2)
                        pending.append(w2)
        return True

    def solve(self):
        dom = {x: list(d) for x, d in self.dom0.items()}
        if not self._propagate(dom, list(self.scopes)):
            return None
        return self._dfs(dom)

    def _dfs(self, dom):
        x = next((y for y in self.vars if len(dom[y]) > 1), None)
        if x is None:
            # every constraint was checked fully while all singletons, but
            # constraints skipped for size may remain; final check
            assign = {y: dom[y][0] for y in self.vars}
            for w in self.scopes:
                if not self._ok(w, assign):
                    return None
            return assign
        for a in dom[x]:
            d2 = {y: list(v) for y, v in dom.items()}
            d2[x] = [a]
            if self._propagate(d2, self.by_var[x]):
                res = self._dfs(d2)
                if res is not None:
                    return res
        return None


def _mend_at_radius(problem, g, raw, v, t, counter):
    res = _BallSearch(problem, g, raw, v, t, counter).solve()
    if res is None:
        return None
    changes = {u: a for u, a in res.items() if a != raw[u]}
    return Mend(v, t, changes)


def find_mend(problem: LclProblem, g: Graph, lam, v: int, t_max: int,
              check: bool = True, counter: Counter | None = None) -> Mend | None:
    """Minimal-radius mend of lam at v with radius at most t_max, or None."""
    raw = _raw(lam)
    if raw[v] is not None:
        raise PreconditionError(f"node {v} is not empty")
    if check:
        validate_labeling(problem, g, raw)
        if not accepts(problem, g, raw):
            raise PreconditionError("labeling is not accepted by the relaxed verifier")
    counter = counter or Counter()
    for t in range(t_max + 1):
        m = _mend_at_radius(problem, g, raw, v, t, counter)
        if m is not None:
            return m
        if len(g.ball(v, t)) == len(g.ball(v, t + 1)):
            break
    return None


def mend_radius_at(problem: LclProblem, g: Graph, lam, v: int, check: bool = True,
                   counter: Counter | None = None) -> int:
    ecc = g.eccentricity(v)
    m = find_mend(problem, g, lam, v, ecc, check=check, counter=counter)
    if m is None:
        raise UnsolvableInstanceError(f"no valid solution extends the labeling around node {v}")
    return m.radius


@dataclass
class SizeReport:
    max_radius_found: int = 0
    instances_checked: int = 0
    mode: str = "exhaustive"
    witness: Any = None
    complete: bool = True

    def to_json(self):
        w = None
        if self.witness is not None:
            g, lam, v = self.witness
            w = {"labels": [x if not isinstance(x, tuple) else list(x) for x in lam], "node": v}
        return {"max_radius_found": self.max_radius_found, "instances_checked": self.instances_checked,
                "mode": self.mode, "complete": self.complete, "witness": w}


@dataclass
class RadiusReport:
    problem_id: str
    table: dict = field(default_factory=dict)

    @property
    def complete(self):
        return all(r.complete for r in self.table.values())

    def to_json(self):
        return {"schema": 1, "problem": self.problem_id,
                "table": {str(n): r.to_json() for n, r in sorted(self.table.items())}}

    def text(self):
        rows = [f"{'n':>5} {'max_radius':>10} {'checked':>9} {'mode':>12} complete"]
        for n, r in sorted(self.table.items()):
            rows.append(f"{n:>5} {r.max_radius_found:>10} {r.instances_checked:>9} {r.mode:>12} {r.complete}")
        return "\n".join(rows)


def accepted_labelings(problem: LclProblem, g: Graph, fixed=None):
    """All relaxed-accepted partial labelings of g, by backtracking in id order.

    `fixed` maps nodes to the label (possibly BOT) they must carry.
    """
    fixed = fixed or {}
    alpha = [BOT] + list(problem.labels)
    r = problem.radius
    # node w can be judged once every node within r of it is assigned
    ready_at: dict[int, list[int]] = {}
    for w in range(g.n):
        ready_at.setdefault(max(g.ball(w, r)), []).append(w)
    cur = [BOT] * g.n

    def rec(i):
        if i == g.n:
            yield tuple(cur)
            return
        for a in ((fixed[i],) if i in fixed else alpha):
            if a is not BOT and a not in problem.candidates(g, i):
                continue
            cur[i] = a
            if all(happy(problem, g, cur, w) for w in ready_at.get(i, ())):
                yield from rec(i + 1)
        cur[i] = BOT

    yield from rec(0)


class WindowOracle:
    """Minimal mend radius on paths and cycles, memoized on the labels the search can see.

    Whether a t-mend exists at v depends only on the labels within distance
    t + 2r of v; when that window does not wrap around, it is keyed by the
    label sequence along prev/next (with '#' past a path end).
    """

    def __init__(self, problem: LclProblem):
        self.problem = problem
        self.cache: dict = {}
        self.hits = 0

    def _window(self, g, raw, v, w):
        left, right = [], []
        for port, out in (("prev", left), ("next", right)):
            u = v
            for _ in range(w):
                u = g.follow(u, port) if u is not None else None
                out.append(u)
        nodes = [u for u in left + right if u is not None] + [v]
        if len(set(nodes)) != len(nodes):
            return None
        lab = lambda u: "#" if u is None else raw[u]
        return tuple(lab(u) for u in left[::-1]) + (raw[v],) + tuple(lab(u) for u in right)

    def radius(self, g: Graph, lam, v: int, counter=None) -> int:
        raw = _raw(lam)
        counter = counter or Counter()
        r = self.problem.radius
        for t in range(g.eccentricity(v) + 1):
            key = self._window(g, raw, v, t + 2 * r)
            if key is not None and (t, key) in self.cache:
                self.hits += 1
                found = self.cache[(t, key)]
            else:
                found = _mend_at_radius(self.problem, g, raw, v, t, counter) is not None
                if key is not None:
                    self.cache[(t, key)] = found
            if found:
                return t
        raise UnsolvableInstanceError(f"no valid solution extends the labeling around node {v}")


def random_accepted_labeling(problem: LclProblem, g: Graph, rng: random.Random, hole_p: float = 0.3):
    """Random accepted partial labeling built by greedy random filling."""
    cur = [BOT] * g.n
    order = list(range(g.n))
    rng.shuffle(order)
    for u in order:
        if rng.random() < hole_p:
            continue
        cands = list(problem.candidates(g, u))
        rng.shuffle(cands)
        for a in cands:
            cur[u] = a
            if all(happy(problem, g, cur, w) for w in g.ball(u, problem.radius)):
                break
            cur[u] = BOT
    return PartialLabeling(cur)


def estimate_radius(problem: LclProblem, family, sizes, mode: str = "exhaustive",
                    budget: int = DEFAULT_BUDGET, seed: int = 0, samples: int = 50,
                    problem_id: str | None = None) -> RadiusReport:
    """Probe the mending radius over a family of instances.

    `family` is an InstanceSpec whose size parameter is overridden by each entry of sizes.
    """
    from . import instances

    pid = problem_id or problem.name
    rep = RadiusReport(pid)
    rng = random.Random(seed)
    for n in sizes:
        g = instances.generate(family.resized(n))
        m = mode
        alpha = len(problem.labels) + 1
        if m == "exhaustive" and alpha ** g.n * g.n > budget:
            log.warning("exhaustive enumeration too large for n=%s, using sampled mode", n)
            m = "sampled"
        sr = SizeReport(mode=m)
        counter = Counter(budget)
        pairs = []
        if m == "exhaustive":
            if family.kind == "cycle":
                # every hole is a rotation of a hole at node 0
                pairs = ((lam, 0) for lam in accepted_labelings(problem, g, fixed={0: BOT}))
            else:
                pairs = ((lam, v) for lam in accepted_labelings(problem, g) for v in range(g.n) if lam[v] is None)
        else:
            lst = []
            if m == "adversarial":
                try:
                    gl, lam = instances.lower_bound_instance(pid, n)
                    g = gl
                    lst.extend((lam.labels, v) for v in lam.holes())
                except LclError:
                    pass
            for _ in range(samples if m == "sampled" or not lst else 0):
                lam = random_accepted_labeling(problem, g, rng)
                for v in lam.holes():
                    lst.append((lam.labels, v))
            pairs = lst
        oracle = WindowOracle(problem) if family.kind in ("path", "cycle") else None
        try:
            for lam, v in pairs:
                if oracle is not None:
                    rad = oracle.radius(g, lam, v, counter)
                else:
                    rad = mend_radius_at(problem, g, lam, v, check=False, counter=counter)
                sr.instances_checked += 1
                if rad > sr.max_radius_found or (rad > 0 and sr.witness is None):
                    sr.max_radius_found = rad
                    sr.witness = (g, PartialLabeling(lam), v)
        except BudgetExceeded:
            sr.complete = False
        rep.table[n] = sr
    return rep

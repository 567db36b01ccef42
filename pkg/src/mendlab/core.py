"""Graphs, partial labelings, LCL problems and the relaxed verifier."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

BOT = None  # the empty label


class LclError(Exception):
    pass


class GraphError(LclError):
    pass


class InvalidLabelingError(LclError):
    pass


class PreconditionError(LclError):
    pass


class Verdict(enum.Enum):
    HAPPY = "happy"
    UNHAPPY = "unhappy"

    def __bool__(self):
        return self is Verdict.HAPPY


class Graph:
    """Undirected simple graph on nodes 0..n-1 with optional per-endpoint port labels.

    `ports[(u, w)]` is the label of edge {u,w} as seen from u.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (), ports=None,
                 max_degree: int | None = None, validate: bool = True):
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        for u, w in edges:
            if not (0 <= u < n and 0 <= w < n):
                raise GraphError(f"edge ({u},{w}) out of range")
            if validate:
                if u == w:
                    raise GraphError(f"self-loop at {u}")
                if w in self.adj[u]:
                    raise GraphError(f"parallel edge {u}-{w}")
            self.adj[u].append(w)
            if u != w:
                self.adj[w].append(u)
        for a in self.adj:
            a.sort()
        self.ports: dict[tuple[int, int], str] = dict(ports or {})
        if validate:
            for (u, w) in self.ports:
                if w not in self.adj[u]:
                    raise GraphError(f"port on non-edge ({u},{w})")
        deg = max((len(a) for a in self.adj), default=0)
        self.max_degree = deg if max_degree is None else max_degree
        if validate and deg > self.max_degree:
            raise GraphError(f"degree {deg} exceeds bound {self.max_degree}")
        self._port_index = {}
        for (u, w), lab in self.ports.items():
            self._port_index.setdefault((u, lab), w)
        self._dist_cache: dict[tuple[int, int], dict[int, int]] = {}

    @property
    def nodes(self):
        return range(self.n)

    def neighbors(self, u: int) -> list[int]:
        return self.adj[u]

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, w) for u in range(self.n) for w in self.adj[u] if u < w)

    def port(self, u: int, w: int):
        return self.ports.get((u, w))

    def follow(self, u: int, label: str):
        """Node reached from u through the edge whose u-side port is `label`, or None."""
        return self._port_index.get((u, label))

    def ball(self, v: int, t: int) -> dict[int, int]:
        """Distances from v to every node within distance t."""
        key = (v, t)
        got = self._dist_cache.get(key)
        if got is not None:
            return got
        dist = {v: 0}
        q = deque([v])
        while q:
            u = q.popleft()
            d = dist[u]
            if d == t:
                continue
            for w in self.adj[u]:
                if w not in dist:
                    dist[w] = d + 1
                    q.append(w)
        if len(self._dist_cache) < 200000:
            self._dist_cache[key] = dist
        return dist

    def distances(self, v: int) -> dict[int, int]:
        return self.ball(v, self.n)

    def dist(self, u: int, v: int) -> float:
        return self.distances(u).get(v, float("inf"))

    def eccentricity(self, v: int) -> int:
        return max(self.distances(v).values())

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.n == other.n and self.adj == other.adj
                and self.ports == other.ports and self.max_degree == other.max_degree)

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges())})"


class PartialLabeling:
    """Immutable map node -> label, None meaning the empty label."""

    __slots__ = ("labels",)

    def __init__(self, labels: Iterable):
        self.labels = tuple(labels)

    @classmethod
    def empty(cls, n: int) -> "PartialLabeling":
        return cls([BOT] * n)

    def __getitem__(self, u):
        return self.labels[u]

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __eq__(self, other):
        if isinstance(other, PartialLabeling):
            return self.labels == other.labels
        return NotImplemented

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return "PartialLabeling(" + ",".join("⊥" if x is None else str(x) for x in self.labels) + ")"

    @property
    def complete(self) -> bool:
        return all(x is not None for x in self.labels)

    def holes(self) -> list[int]:
        return [u for u, x in enumerate(self.labels) if x is None]

    def with_changes(self, changes: dict) -> "PartialLabeling":
        out = list(self.labels)
        for u, x in changes.items():
            out[u] = x
        return PartialLabeling(out)


@dataclass(frozen=True)
class PathSpec:
    """Node-edge-checkable description of a path/cycle problem."""
    labels: tuple
    edge: frozenset  # ordered pairs (a, b)
    node: frozenset  # ordered pairs (b, c)
    start: frozenset
    end: frozenset


@dataclass(frozen=True)
class LclProblem:
    """An LCL problem.

    `check(g, lab, v)` is the underlying verifier. It is only called when no
    empty label occurs within distance `radius` of v, and must only read
    labels inside that ball.
    """
    name: str
    labels: tuple
    radius: int
    check: Callable[[Graph, Sequence, int], bool] = field(compare=False)
    input_labels: tuple = ()
    path_spec: PathSpec | None = None
    domain: Callable[[Graph, int], Sequence] | None = field(default=None, compare=False)
    meta: dict = field(default_factory=dict, compare=False)

    def candidates(self, g: Graph, u: int) -> Sequence:
        if self.domain is not None:
            return self.domain(g, u)
        return self.labels

    def valid_label(self, g: Graph, u: int, x) -> bool:
        return x is None or x in self.candidates(g, u)


def _raw(lab):
    return lab.labels if isinstance(lab, PartialLabeling) else lab


def validate_labeling(problem: LclProblem, g: Graph, lab) -> None:
    raw = _raw(lab)
    if len(raw) != g.n:
        raise InvalidLabelingError(f"labeling has {len(raw)} entries for {g.n} nodes")
    for u, x in enumerate(raw):
        if not problem.valid_label(g, u, x):
            raise InvalidLabelingError(f"node {u}: label {x!r} not in output alphabet")


def happy(problem: LclProblem, g: Graph, raw: Sequence, v: int) -> bool:
    """Relaxed verifier without validation; raw is indexable by node id."""
    ball = g.ball(v, problem.radius)
    for u in ball:
        if raw[u] is None:
            return True
    return bool(problem.check(g, raw, v))


def relaxed_verify(problem: LclProblem, g: Graph, lab, v: int) -> Verdict:
    if not 0 <= v < g.n:
        raise PreconditionError(f"node {v} not in graph")
    validate_labeling(problem, g, lab)
    return Verdict.HAPPY if happy(problem, g, _raw(lab), v) else Verdict.UNHAPPY


@dataclass(frozen=True)
class Acceptance:
    accepted: bool
    unhappy_nodes: list

    def __bool__(self):
        return self.accepted


def accepts(problem: LclProblem, g: Graph, lab) -> Acceptance:
    validate_labeling(problem, g, lab)
    raw = _raw(lab)
    bad = [v for v in range(g.n) if not happy(problem, g, raw, v)]
    return Acceptance(not bad, bad)


@dataclass(frozen=True)
class Mend:
    center: int
    radius: int
    changes: dict
    case: int | None = None  # which strategy produced it, for menders that have several

    def apply(self, lam) -> PartialLabeling:
        if not isinstance(lam, PartialLabeling):
            lam = PartialLabeling(lam)
        return lam.with_changes(self.changes)

    def to_json(self) -> dict[str, Any]:
        return {"center": self.center, "radius": self.radius,
                "changes": {str(u): encode_label(x) for u, x in sorted(self.changes.items())},
                **({"case": self.case} if self.case is not None else {})}


def is_mend(problem: LclProblem, g: Graph, lam, mu, v: int, t: int) -> bool:
    if not accepts(problem, g, lam):
        raise PreconditionError("base labeling is not accepted by the relaxed verifier")
    validate_labeling(problem, g, mu)
    lam, mu = _raw(lam), _raw(mu)
    if mu[v] is None:
        return False
    dist = g.ball(v, t)
    for u in range(g.n):
        if mu[u] is None and lam[u] is not None:
            return False
        if mu[u] != lam[u] and u not in dist:
            return False
    return bool(accepts(problem, g, mu))


def encode_label(x) -> Hashable:
    if isinstance(x, tuple):
        return list(x)
    return x


def decode_label(x):
    if isinstance(x, list):
        return tuple(x)
    return x

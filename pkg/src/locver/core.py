"""Graphs, configurations, t-ball views and the engine that runs a local algorithm.

Nodes are internal indices ``0..n-1``.  Identities are a separate assignment so
the same configuration can be replayed under many identity pools.  Inputs and
certificates are ``bytes``.

Edge visibility: a radius-t view holds every node at distance <= t and every
edge with at least one endpoint at distance <= t-1.  Edges between two nodes
at distance exactly t cannot be learned in t rounds and are absent.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .canon import canonical_code, canonical_form
from .errors import DomainError, UsageError

Certs = tuple[bytes, ...]
Ids = tuple[int, ...]


class Graph:
    """Connected simple graph on nodes ``0..n-1``."""

    __slots__ = ("n", "edges", "adj", "_hash", "_cache")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], *, check_connected: bool = True):
        if n < 1:
            raise DomainError("a graph needs at least one node")
        norm = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise DomainError(f"self-loop at {u}")
            norm.add((min(u, v), max(u, v)))
        self.n = n
        self.edges = frozenset(norm)
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in sorted(norm):
            adj[u].append(v)
            adj[v].append(u)
        self.adj = tuple(tuple(sorted(a)) for a in adj)
        self._hash = hash((n, self.edges))
        self._cache: dict = {}
        if check_connected and not self.is_connected():
            raise DomainError("graph is not connected")

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={sorted(self.edges)})"

    def nodes(self) -> range:
        return range(self.n)

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def is_connected(self) -> bool:
        seen = {0}
        todo = [0]
        while todo:
            u = todo.pop()
            for w in self.adj[u]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == self.n

    def distances(self, u: int) -> tuple[int, ...]:
        """BFS distances from ``u`` (cached)."""
        key = ("dist", u)
        hit = self._cache.get(key)
        if hit is None:
            dist = [-1] * self.n
            dist[u] = 0
            q = deque([u])
            while q:
                a = q.popleft()
                for b in self.adj[a]:
                    if dist[b] < 0:
                        dist[b] = dist[a] + 1
                        q.append(b)
            hit = self._cache[key] = tuple(dist)
        return hit

    def dist(self, u: int, v: int) -> int:
        return self.distances(u)[v]

    def diameter(self) -> int:
        return max(max(self.distances(u)) for u in self.nodes())

    def bfs_order(self, root: int = 0) -> tuple[int, ...]:
        key = ("bfs", root)
        hit = self._cache.get(key)
        if hit is None:
            d = self.distances(root)
            hit = self._cache[key] = tuple(sorted(self.nodes(), key=lambda v: (d[v], v)))
        return hit

    def ball_structure(self, u: int, t: int) -> "_BallStructure":
        key = ("ball", u, t)
        hit = self._cache.get(key)
        if hit is None:
            if not 0 <= u < self.n:
                raise DomainError(f"unknown node {u}")
            d = self.distances(u)
            nodes = tuple(sorted((v for v in self.nodes() if d[v] <= t), key=lambda v: (d[v], v)))
            dist = {v: d[v] for v in nodes}
            nbrs = {}
            for v in nodes:
                if d[v] < t:
                    nbrs[v] = self.adj[v]
                else:
                    # frontier nodes only see edges towards the interior
                    nbrs[v] = tuple(w for w in self.adj[v] if d[w] < t)
            hit = self._cache[key] = _BallStructure(nodes, dist, nbrs)
        return hit


@dataclass(frozen=True)
class _BallStructure:
    nodes: tuple[int, ...]
    dist: Mapping[int, int]
    nbrs: Mapping[int, tuple[int, ...]]


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise DomainError("a cycle needs at least three nodes")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@dataclass(frozen=True)
class Configuration:
    """A connected graph plus one input byte-string per node."""

    graph: Graph
    inputs: tuple[bytes, ...]

    def __post_init__(self):
        inputs = tuple(self.inputs)
        object.__setattr__(self, "inputs", inputs)
        if len(inputs) != self.graph.n:
            raise DomainError(f"expected {self.graph.n} inputs, got {len(inputs)}")
        for x in inputs:
            if not isinstance(x, bytes):
                raise DomainError("inputs must be bytes")

    @property
    def n(self) -> int:
        return self.graph.n

    @classmethod
    def uniform(cls, graph: Graph, value: bytes = b"") -> "Configuration":
        return cls(graph, (value,) * graph.n)

    def with_inputs(self, inputs: Sequence[bytes]) -> "Configuration":
        return Configuration(self.graph, tuple(inputs))

    def canonical(self) -> tuple[tuple[int, ...], tuple]:
        """Canonical ``(order, code)`` of the input-labeled graph."""
        return canonical_form(self.graph.adj, self.inputs)

    def code(self) -> tuple:
        return self.canonical()[1]

    def isomorphic(self, other: "Configuration") -> bool:
        return self.code() == other.code()

    def relabel(self, perm: Sequence[int]) -> "Configuration":
        """Move node ``v`` to position ``perm[v]``."""
        n = self.n
        inputs = [b""] * n
        for v in range(n):
            inputs[perm[v]] = self.inputs[v]
        return Configuration(Graph(n, [(perm[u], perm[v]) for u, v in self.graph.edges]), tuple(inputs))


def check_ids(graph: Graph, ids: Sequence[int] | None) -> Ids | None:
    if ids is None:
        return None
    ids = tuple(ids)
    if len(ids) != graph.n:
        raise UsageError(f"identity assignment has {len(ids)} entries for {graph.n} nodes")
    if len(set(ids)) != len(ids) or any(i < 0 for i in ids):
        raise DomainError("identities must be distinct non-negative integers")
    return ids


def check_certs(graph: Graph, certs: Sequence[bytes]) -> Certs:
    certs = tuple(certs)
    if len(certs) != graph.n:
        raise UsageError(f"certificate assignment has {len(certs)} entries for {graph.n} nodes")
    return certs


class BallView:
    """What node ``center`` knows after ``radius`` rounds.

    Accessors refuse nodes outside the ball, which keeps verdict functions honest
    about locality.  Node handles are internal indices and carry no meaning
    beyond distinguishing visible nodes.
    """

    __slots__ = ("center", "radius", "_s", "_inputs", "_ids", "_certs")

    def __init__(self, center: int, radius: int, structure: _BallStructure,
                 inputs: Sequence[bytes], ids: Ids | None, certs: Sequence[Certs]):
        self.center = center
        self.radius = radius
        self._s = structure
        self._inputs = inputs
        self._ids = ids
        self._certs = certs

    def _check(self, v: int) -> None:
        if v not in self._s.dist:
            raise KeyError(f"node {v} is not visible from {self.center}")

    @property
    def nodes(self) -> tuple[int, ...]:
        return self._s.nodes

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset((min(v, w), max(v, w)) for v in self._s.nodes for w in self._s.nbrs[v])

    @property
    def arity(self) -> int:
        return len(self._certs)

    def dist(self, v: int) -> int:
        self._check(v)
        return self._s.dist[v]

    def neighbors(self, v: int | None = None) -> tuple[int, ...]:
        v = self.center if v is None else v
        self._check(v)
        return self._s.nbrs[v]

    def x(self, v: int | None = None) -> bytes:
        v = self.center if v is None else v
        self._check(v)
        return self._inputs[v]

    def id(self, v: int | None = None) -> int:
        v = self.center if v is None else v
        self._check(v)
        if self._ids is None:
            raise UsageError("identities are hidden from identity-oblivious algorithms")
        return self._ids[v]

    def cert(self, level: int, v: int | None = None) -> bytes:
        v = self.center if v is None else v
        self._check(v)
        return self._certs[level][v]

    @property
    def has_ids(self) -> bool:
        return self._ids is not None

    def labeled_graph(self, compare_ids: bool) -> tuple[tuple[tuple[int, ...], ...], list]:
        index = {v: i for i, v in enumerate(self._s.nodes)}
        adj = tuple(tuple(sorted(index[w] for w in self._s.nbrs[v])) for v in self._s.nodes)
        labels = []
        for v in self._s.nodes:
            lab = (self._s.dist[v], self._inputs[v], tuple(c[v] for c in self._certs))
            if compare_ids:
                lab += (self._ids[v] if self._ids is not None else None,)
            labels.append(lab)
        return adj, labels

    def subview(self, v: int, radius: int) -> "BallView":
        """View of a visible node ``v`` with a smaller radius, rebuilt from this view alone."""
        self._check(v)
        if self._s.dist[v] + radius > self.radius:
            raise DomainError("sub-view would reach outside this view")
        dist = {v: 0}
        q = deque([v])
        while q:
            a = q.popleft()
            if dist[a] == radius:
                continue
            for b in self._s.nbrs[a]:
                if b not in dist:
                    dist[b] = dist[a] + 1
                    q.append(b)
        nodes = tuple(sorted(dist, key=lambda w: (dist[w], w)))
        nbrs = {}
        for w in nodes:
            if dist[w] < radius:
                nbrs[w] = self._s.nbrs[w]
            else:
                nbrs[w] = tuple(b for b in self._s.nbrs[w] if b in dist and dist[b] < radius)
        return BallView(v, radius, _BallStructure(nodes, dist, nbrs), self._inputs, self._ids, self._certs)


def ball(config: Configuration, ids: Sequence[int] | None, certs: Sequence[Sequence[bytes]], u: int, t: int) -> BallView:
    if t < 0:
        raise DomainError("radius must be non-negative")
    if not isinstance(u, int) or not 0 <= u < config.n:
        raise DomainError(f"unknown node {u}")
    structure = config.graph.ball_structure(u, t)
    return BallView(u, t, structure, config.inputs, check_ids(config.graph, ids),
                    tuple(check_certs(config.graph, c) for c in certs))


@dataclass(frozen=True)
class LocalAlgorithm:
    """Radius ``radius`` verifier reading ``arity`` certificate levels.

    ``verdict`` maps a :class:`BallView` to ``True`` (accept) or ``False``
    (reject).  Algorithms declaring ``uses_ids=False`` receive views with
    identities hidden, so their verdicts cannot depend on the identity pool.
    """

    radius: int
    arity: int
    verdict: Callable[[BallView], bool]
    name: str = "algorithm"
    uses_ids: bool = False

    def __repr__(self) -> str:
        return f"LocalAlgorithm({self.name!r}, t={self.radius}, k={self.arity})"


ACCEPT = True
REJECT = False


def node_verdict(alg: LocalAlgorithm, config: Configuration, ids: Ids | None, certs: Sequence[Certs], u: int) -> bool:
    """Verdict at ``u`` without re-validating arguments (hot path for searches)."""
    structure = config.graph.ball_structure(u, alg.radius)
    view = BallView(u, alg.radius, structure, config.inputs, ids if alg.uses_ids else None, certs)
    return bool(alg.verdict(view))


def run(alg: LocalAlgorithm, config: Configuration, ids: Sequence[int] | None = None,
        certs: Sequence[Sequence[bytes]] = ()) -> dict[int, bool]:
    if len(certs) != alg.arity:
        raise UsageError(f"{alg.name} expects {alg.arity} certificate levels, got {len(certs)}")
    levels = tuple(check_certs(config.graph, c) for c in certs)
    ids = check_ids(config.graph, ids)
    if alg.uses_ids and ids is None:
        raise UsageError(f"{alg.name} reads identities; pass an identity assignment")
    return {u: node_verdict(alg, config, ids, levels, u) for u in config.graph.nodes()}


def global_accept(verdicts: Mapping[int, bool] | Sequence[bool], mode: str = "conjunctive") -> bool:
    values = list(verdicts.values()) if isinstance(verdicts, Mapping) else list(verdicts)
    if not values:
        raise DomainError("no verdicts")
    if mode == "conjunctive":
        return all(values)
    if mode == "disjunctive":
        return any(values)
    raise UsageError(f"unknown acceptance mode {mode!r}")


def view_code(view: BallView, compare_ids: bool = False) -> tuple:
    adj, labels = view.labeled_graph(compare_ids)
    return canonical_code(adj, labels)


def views_isomorphic(v1: BallView, v2: BallView, compare_ids: bool = False) -> bool:
    """Center-preserving isomorphism matching inputs, certificates and distances.

    The center is the unique node annotated with distance 0, so any
    label-preserving isomorphism maps center to center.
    """
    if v1.radius != v2.radius or len(v1.nodes) != len(v2.nodes):
        return False
    return view_code(v1, compare_ids) == view_code(v2, compare_ids)

"""Lifts, voltage covers and closure under lift.

A t-lift of (G, x) is a configuration (G', x') with a map phi such that every
t-ball of G' is isomorphic (inputs preserved) to the t-ball of its image.
Constructive lifts come from voltage assignments: each edge (u, v), u < v,
carries a permutation pi of {0..k-1} and the cover joins (u, i) to
(v, pi[i]).  Cover node (u, i) has index ``i * n + u``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Callable, Iterable, Mapping, Sequence

from .core import Configuration, Graph, ball, views_isomorphic
from .errors import CoverError, DomainError, Inconclusive

Voltages = Mapping[tuple[int, int], Sequence[int]]


@dataclass(frozen=True)
class LiftMap:
    source: Configuration
    target: Configuration
    phi: tuple[int, ...]
    t: int = 1


def _phi_tuple(source: Configuration, target: Configuration, phi) -> tuple[int, ...]:
    if isinstance(phi, Mapping):
        missing = [u for u in range(source.n) if u not in phi]
        if missing:
            raise DomainError(f"phi is undefined on nodes {missing}")
        phi = [phi[u] for u in range(source.n)]
    phi = tuple(phi)
    if len(phi) != source.n:
        raise DomainError(f"phi has {len(phi)} entries for {source.n} nodes")
    for v in phi:
        if not 0 <= v < target.n:
            raise DomainError(f"phi maps onto unknown node {v}")
    return phi


def is_t_lift(source: Configuration, target: Configuration, phi, t: int) -> bool:
    """Check that each t-ball of ``source`` matches the t-ball of its image."""
    phi = _phi_tuple(source, target, phi)
    return all(
        views_isomorphic(ball(source, None, (), u, t), ball(target, None, (), phi[u], t))
        for u in range(source.n)
    )


def is_covering_map(source: Configuration, target: Configuration, phi) -> bool:
    """Surjective, input-preserving, and a bijection from N(u) onto N(phi(u)) at every node."""
    phi = _phi_tuple(source, target, phi)
    if set(phi) != set(range(target.n)):
        return False
    tadj = [set(a) for a in target.graph.adj]
    for u in range(source.n):
        if source.inputs[u] != target.inputs[phi[u]]:
            return False
        image = [phi[w] for w in source.graph.adj[u]]
        if len(set(image)) != len(image) or set(image) != tadj[phi[u]]:
            return False
    return True


def _normalize_voltages(n: int, k: int, voltages: Voltages) -> dict[tuple[int, int], tuple[int, ...]]:
    out = {}
    for (a, b), perm in voltages.items():
        perm = tuple(perm)
        if sorted(perm) != list(range(k)):
            raise DomainError(f"voltage on ({a}, {b}) is not a permutation of 0..{k - 1}")
        if a > b:
            inv = [0] * k
            for i, p in enumerate(perm):
                inv[p] = i
            a, b, perm = b, a, tuple(inv)
        out[(a, b)] = perm
    return out


def _cover_graph(graph: Graph, k: int, voltages: Mapping[tuple[int, int], tuple[int, ...]]) -> tuple[Graph, tuple[int, ...]]:
    n = graph.n
    ident = tuple(range(k))
    edges = []
    for u, v in graph.edges:
        perm = voltages.get((u, v), ident)
        for i in range(k):
            edges.append((i * n + u, perm[i] * n + v))
    cover = Graph(n * k, edges, check_connected=False)
    phi = tuple(w % n for w in range(n * k))
    return cover, phi


def k_fold_cover(config: Configuration, k: int, voltages: Voltages | None = None) -> tuple[Configuration, LiftMap]:
    """Voltage-graph k-fold cover with inputs pulled back along the projection."""
    if k < 1:
        raise DomainError("k must be positive")
    volts = _normalize_voltages(config.n, k, voltages or {})
    for a, b in volts:
        if (a, b) not in config.graph.edges:
            raise DomainError(f"voltage on non-edge ({a}, {b})")
    graph, phi = _cover_graph(config.graph, k, volts)
    if not graph.is_connected():
        raise CoverError("these voltages give a disconnected cover; choose voltages that generate a transitive group")
    lifted = Configuration(graph, tuple(config.inputs[p] for p in phi))
    return lifted, LiftMap(lifted, config, phi, 1)


def pull_back(certs: Sequence[bytes], phi: Sequence[int]) -> tuple[bytes, ...]:
    """Certificates c o phi on the lifted configuration."""
    return tuple(certs[p] for p in phi)


@lru_cache(maxsize=512)
def connected_covers(graph: Graph, k: int) -> tuple[tuple[Graph, tuple[int, ...]], ...]:
    """Connected k-fold voltage covers in enumeration order.

    Voltages on a BFS spanning tree are fixed to the identity (every cover is
    isomorphic to one of this form); the remaining edges range over all
    permutations in lexicographic order.
    """
    order = graph.bfs_order(0)
    dist = graph.distances(0)
    tree = set()
    for v in order[1:]:
        parent = min(w for w in graph.adj[v] if dist[w] == dist[v] - 1)
        tree.add((min(v, parent), max(v, parent)))
    cotree = sorted(graph.edges - tree)
    perms = list(permutations(range(k)))
    out = []
    for choice in product(perms, repeat=len(cotree)):
        cover, phi = _cover_graph(graph, k, dict(zip(cotree, choice)))
        if cover.is_connected():
            out.append((cover, phi))
    return tuple(out)


def search_lift_counterexample(lang: Callable[[Configuration], bool], config: Configuration, t: int = 1,
                               k_max: int = 2, budget: int | None = None) -> tuple[Configuration, LiftMap] | None:
    """First k-fold cover (k = 2..k_max) of a member of ``lang`` that is a t-lift and not a member.

    Returns None when the enumerated space holds no counterexample.  Raises
    :class:`Inconclusive` if more than ``budget`` covers would be examined.
    """
    if not lang(config):
        raise DomainError("search_lift_counterexample needs a member of the language")
    examined = 0
    for k in range(2, k_max + 1):
        for graph, phi in connected_covers(config.graph, k):
            examined += 1
            if budget is not None and examined > budget:
                raise Inconclusive("lift search budget exhausted", {"examined": examined - 1, "k": k})
            lifted = Configuration(graph, tuple(config.inputs[p] for p in phi))
            if lang(lifted):
                continue
            if is_t_lift(lifted, config, phi, t):
                return lifted, LiftMap(lifted, config, phi, t)
    return None


# -- closure under lift -------------------------------------------------------


def quotients(config: Configuration) -> Iterable[tuple[Configuration, tuple[int, ...]]]:
    """Every configuration that ``config`` covers, with the covering map.

    A covering map is determined by its fibers: independent sets of nodes at
    pairwise distance >= 3 with a common input, such that nodes in the same
    fiber see the same set of neighboring fibers.  Fibers are built by
    backtracking over the nodes in BFS order.
    """
    g = config.graph
    n = g.n
    order = g.bfs_order(0)
    dist = [g.distances(u) for u in range(n)]
    block_of = [-1] * n
    blocks: list[list[int]] = []

    def finish():
        nbr_sets = {}
        for b, members in enumerate(blocks):
            ref = None
            for u in members:
                s = frozenset(block_of[w] for w in g.adj[u])
                if ref is None:
                    ref = s
                elif s != ref:
                    return None
            nbr_sets[b] = ref
        edges = {(min(a, b), max(a, b)) for a, s in nbr_sets.items() for b in s}
        q = Graph(len(blocks), edges, check_connected=False)
        inputs = tuple(config.inputs[members[0]] for members in blocks)
        return Configuration(q, inputs), tuple(block_of)

    def rec(pos):
        if pos == n:
            result = finish()
            if result is not None:
                yield result
            return
        u = order[pos]
        for b, members in enumerate(blocks):
            rep = members[0]
            if config.inputs[rep] != config.inputs[u] or g.degree(rep) != g.degree(u):
                continue
            if any(dist[u][w] < 3 for w in members):
                continue
            members.append(u)
            block_of[u] = b
            yield from rec(pos + 1)
            members.pop()
            block_of[u] = -1
        blocks.append([u])
        block_of[u] = len(blocks) - 1
        yield from rec(pos + 1)
        blocks.pop()
        block_of[u] = -1

    return rec(0)


def lift_closure_membership(config: Configuration, family, budget: int | None = None) -> bool:
    """Is ``config`` a member of ``family`` or a 1-lift (covering) of a member?

    ``family`` is a sequence of configurations or any object with a
    ``contains(config)`` method.  ``budget`` bounds the number of candidate
    quotients tested; exceeding it raises :class:`Inconclusive`.
    """
    if hasattr(family, "contains"):
        contains = family.contains
    else:
        codes = {c.code() for c in family}
        contains = lambda c: c.code() in codes  # noqa: E731
    examined = 0
    for quotient, phi in quotients(config):
        if budget is not None and examined >= budget:
            raise Inconclusive("lift-closure budget exhausted", {"quotients": examined})
        examined += 1
        if quotient.graph.is_connected() and contains(quotient):
            assert is_t_lift(config, quotient, phi, 1)
            return True
    return False

"""Exhaustive small-instance generators used by tests, reports and searches."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterator, Sequence

from .canon import automorphisms, canonical_code
from .core import Configuration, Graph


@lru_cache(maxsize=None)
def connected_graphs(n: int) -> tuple[Graph, ...]:
    """All connected simple graphs on ``n`` nodes, one per isomorphism class.

    Ordered by edge count, then by canonical code, so the sequence is stable.
    """
    pairs = list(combinations(range(n), 2))
    found: dict[tuple, Graph] = {}
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        if len(edges) < n - 1:
            continue
        g = Graph(n, edges, check_connected=False)
        if not g.is_connected():
            continue
        code = canonical_code(g.adj, (0,) * n)
        if code not in found:
            found[code] = g
    return tuple(sorted(found.values(), key=lambda g: (len(g.edges), canonical_code(g.adj, (0,) * n))))


def graphs_up_to(max_n: int, min_n: int = 1) -> Iterator[Graph]:
    for n in range(min_n, max_n + 1):
        yield from connected_graphs(n)


def is_tree(graph: Graph) -> bool:
    return len(graph.edges) == graph.n - 1


def configurations(graph: Graph, alphabet: Sequence[bytes]) -> list[Configuration]:
    """Input assignments over ``alphabet``, one per isomorphism class of configuration."""
    seen = set()
    out = []
    for inputs in product(alphabet, repeat=graph.n):
        cfg = Configuration(graph, inputs)
        code = cfg.code()
        if code not in seen:
            seen.add(code)
            out.append(cfg)
    return out


def all_configurations(max_n: int, alphabet: Sequence[bytes], min_n: int = 1) -> Iterator[Configuration]:
    for g in graphs_up_to(max_n, min_n):
        yield from configurations(g, alphabet)


def config_automorphisms(config: Configuration) -> list[tuple[int, ...]]:
    return automorphisms(config.graph.adj, config.inputs)


def default_id_pool(config: Configuration, limit: int | None = None) -> list[tuple[int, ...]]:
    """Injective identity assignments from {1..n+2}, one per orbit of the automorphism group.

    ``limit`` truncates the (deterministically ordered) pool for large instances.
    """
    n = config.n
    autos = config_automorphisms(config)
    seen = set()
    pool = []
    for ids in permutations(range(1, n + 3), n):
        key = min(tuple(ids[g[v]] for v in range(n)) for g in autos)
        if key in seen:
            continue
        seen.add(key)
        pool.append(tuple(ids))
        if limit is not None and len(pool) >= limit:
            break
    return pool


def id_assignments(n: int, values: Sequence[int]) -> list[tuple[int, ...]]:
    """Every injective assignment of ``values`` to ``n`` nodes."""
    return [tuple(p) for p in permutations(values, n)]

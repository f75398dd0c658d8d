"""Canonical labeling of small vertex-labeled graphs.

Individualization-refinement: colour refinement splits vertices by label and
neighbour colours, and any remaining non-singleton cell is split by
individualizing each of its vertices in turn.  Leaves of the search tree are
orderings of the vertex set; the canonical form is the leaf with the smallest
adjacency code.  Automorphisms discovered between equal leaves prune sibling
branches.  Exact, intended for graphs with up to a few dozen vertices.

Labels may be any values with a deterministic ``repr``; they are ranked by
``repr`` so mixed types are fine.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from typing import Hashable, Iterator, Sequence

Adjacency = tuple[tuple[int, ...], ...]


def _rank(keys: Sequence) -> list[int]:
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _refine(adj: Adjacency, colors: list[int]) -> list[int]:
    cells = len(set(colors))
    while True:
        sig = [(colors[v], tuple(sorted(colors[w] for w in adj[v]))) for v in range(len(adj))]
        new = _rank(sig)
        ncells = len(set(new))
        if ncells == cells:
            return new
        colors, cells = new, ncells


def _edge_code(adj: Adjacency, order: Sequence[int]) -> tuple[int, ...]:
    pos = {v: i for i, v in enumerate(order)}
    rows = []
    for v in order:
        mask = 0
        for w in adj[v]:
            mask |= 1 << pos[w]
        rows.append(mask)
    return tuple(rows)


class _Find:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _search(adj: Adjacency, labels: Sequence[Hashable]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    n = len(adj)
    keys = [repr(lab) for lab in labels]
    start = _refine(adj, _rank(keys))
    best: list = [None, None]  # code, order
    first_leaf: dict[tuple[int, ...], tuple[int, ...]] = {}
    autos: list[tuple[int, ...]] = []

    def leaf(colors: list[int]) -> None:
        order = tuple(sorted(range(n), key=colors.__getitem__))
        code = _edge_code(adj, order)
        seen = first_leaf.get(code)
        if seen is not None:
            perm = [0] * n
            for a, b in zip(seen, order):
                perm[a] = b
            autos.append(tuple(perm))
            return
        first_leaf[code] = order
        if best[0] is None or code < best[0]:
            best[0], best[1] = code, order

    def rec(colors: list[int], path: tuple[int, ...]) -> None:
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        target = min((c for c, k in counts.items() if k > 1), default=None)
        if target is None:
            leaf(colors)
            return
        cell = [v for v in range(n) if colors[v] == target]
        explored: list[int] = []
        for v in cell:
            if explored:
                uf = _Find(n)
                for g in autos:
                    if all(g[p] == p for p in path):
                        for i in range(n):
                            uf.union(i, g[i])
                if any(uf.find(v) == uf.find(e) for e in explored):
                    continue
            split = _rank([(colors[w], 0 if w == v else 1) for w in range(n)])
            rec(_refine(adj, split), path + (v,))
            explored.append(v)

    rec(start, ())
    return best[1], best[0]


@lru_cache(maxsize=200_000)
def _canonical_cached(adj: Adjacency, labels: tuple) -> tuple[tuple[int, ...], tuple]:
    order, code = _search(adj, labels)
    ordered_labels = tuple(labels[v] for v in order)
    return order, (len(adj), tuple(repr(l) for l in ordered_labels), code)


def canonical_form(adj: Adjacency, labels: Sequence[Hashable]) -> tuple[tuple[int, ...], tuple]:
    """Return ``(order, code)``.

    ``order[i]`` is the vertex placed at canonical position ``i``.  Two labeled
    graphs are isomorphic (label-preserving) iff their codes are equal.
    """
    return _canonical_cached(tuple(tuple(sorted(a)) for a in adj), tuple(labels))


def canonical_code(adj: Adjacency, labels: Sequence[Hashable]) -> tuple:
    return canonical_form(adj, labels)[1]


def isomorphisms(adj1: Adjacency, labels1: Sequence, adj2: Adjacency, labels2: Sequence) -> Iterator[tuple[int, ...]]:
    """Yield every label-preserving isomorphism ``g`` (as a tuple, ``g[v1] = v2``).

    Plain backtracking with degree/label pruning; meant for small graphs.
    """
    n = len(adj1)
    if n != len(adj2):
        return
    key1 = [(repr(labels1[v]), len(adj1[v])) for v in range(n)]
    key2 = [(repr(labels2[v]), len(adj2[v])) for v in range(n)]
    if sorted(key1) != sorted(key2):
        return
    sets2 = [set(a) for a in adj2]
    mapping = [-1] * n
    used = [False] * n

    def rec(v: int) -> Iterator[tuple[int, ...]]:
        if v == n:
            yield tuple(mapping)
            return
        for w in range(n):
            if used[w] or key1[v] != key2[w]:
                continue
            ok = True
            for u in adj1[v]:
                if u < v and mapping[u] not in sets2[w]:
                    ok = False
                    break
            if ok:
                # non-edges must map to non-edges as well
                for u in range(v):
                    if (u in adj1[v]) != (mapping[u] in sets2[w]):
                        ok = False
                        break
            if not ok:
                continue
            mapping[v] = w
            used[w] = True
            yield from rec(v + 1)
            used[w] = False
            mapping[v] = -1

    yield from rec(0)


def automorphisms(adj: Adjacency, labels: Sequence) -> list[tuple[int, ...]]:
    return list(isomorphisms(adj, labels, adj, labels))


def brute_force_code(adj: Adjacency, labels: Sequence) -> tuple:
    """Reference canonical code by trying every ordering (tiny graphs only)."""
    n = len(adj)
    best = None
    for order in permutations(range(n)):
        key = (tuple(repr(labels[v]) for v in order), _edge_code(adj, order))
        if best is None or key < best:
            best = key
    return best

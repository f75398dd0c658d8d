"""Certificate schemes with one existential layer: TREE, ALTS and COVER.

Encodings (byte-exact):

    TREE   varint counter
    ALTS   varint d1, varint d2
    COVER  varint d0, varint L, then L entries (varint d_i, length-prefixed e_i)

Provers pick their anchors (root, targets, covering node) by canonical codes
of the configuration with the candidate node marked, so their output does not
depend on identities.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Sequence

from .canon import canonical_code
from .core import BallView, Configuration, LocalAlgorithm
from .encoding import TOP, Reader, lp, varint
from .errors import DomainError, ParseError
from .games import CertificateSpace
from .zoo import ALTS, COVER, COVER_MULTISET, covers, decode_cover_input, is_tree


def marked_code(config: Configuration, v: int) -> tuple:
    """Canonical code of ``config`` with node ``v`` distinguished."""
    labels = tuple((config.inputs[u], u == v) for u in range(config.n))
    return canonical_code(config.graph.adj, labels)


def canonical_pick(config: Configuration, candidates: Sequence[int]) -> list[int]:
    """Candidates sorted by marked canonical code, ties broken by index."""
    return sorted(candidates, key=lambda v: (marked_code(config, v), v))


def _decode_varints(data: bytes, count: int) -> tuple[int, ...] | None:
    try:
        r = Reader(data)
        values = tuple(r.varint() for _ in range(count))
        r.finish()
    except ParseError:
        return None
    return values


# -- TREE ------------------------------------------------------------------------


def tree_root(config: Configuration) -> int:
    g = config.graph
    ecc = [max(g.distances(u)) for u in g.nodes()]
    radius = min(ecc)
    centers = [u for u in g.nodes() if ecc[u] == radius]
    return canonical_pick(config, centers)[0]


def tree_prover(config: Configuration) -> tuple[bytes, ...]:
    if not is_tree(config):
        raise DomainError("tree prover needs a tree")
    root = tree_root(config)
    return tuple(varint(d) for d in config.graph.distances(root))


def _tree_verdict(view: BallView) -> bool:
    mine = _decode_varints(view.cert(0), 1)
    if mine is None:
        return False
    c = mine[0]
    smaller = 0
    for w in view.neighbors():
        other = _decode_varints(view.cert(0, w), 1)
        if other is None or abs(other[0] - c) != 1:
            return False
        smaller += other[0] == c - 1
    return smaller == 1 if c > 0 else True


def tree_verifier() -> LocalAlgorithm:
    return LocalAlgorithm(1, 1, _tree_verdict, name="tree")


def tree_space(max_counter: int) -> CertificateSpace:
    return CertificateSpace.varints(max_counter)


# -- ALTS ------------------------------------------------------------------------


def encode_alts(d1: int, d2: int) -> bytes:
    return varint(d1) + varint(d2)


def alts_prover(config: Configuration) -> tuple[bytes, ...]:
    if not ALTS(config):
        raise DomainError("alts prover needs at least two selected nodes")
    selected = [u for u in range(config.n) if config.inputs[u] == TOP]
    s1, s2 = canonical_pick(config, selected)[:2]
    d1, d2 = config.graph.distances(s1), config.graph.distances(s2)
    return tuple(encode_alts(d1[u], d2[u]) for u in range(config.n))


def _alts_verdict(view: BallView) -> bool:
    mine = _decode_varints(view.cert(0), 2)
    if mine is None or mine == (0, 0):
        return False
    nbrs = [_decode_varints(view.cert(0, w), 2) for w in view.neighbors()]
    for j in range(2):
        d = mine[j]
        if d == 0:
            if view.x() != TOP:
                return False
        elif not any(c is not None and c[j] == d - 1 for c in nbrs):
            return False
    return True


def alts_verifier() -> LocalAlgorithm:
    return LocalAlgorithm(1, 1, _alts_verdict, name="alts")


def alts_space(max_dist: int) -> CertificateSpace:
    values = tuple(encode_alts(a, b) for a in range(max_dist + 1) for b in range(max_dist + 1))
    return CertificateSpace.uniform(values, f"alts<={max_dist}")


# -- COVER -----------------------------------------------------------------------


def encode_cover_cert(d0: int, entries: Sequence[tuple[int, bytes]]) -> bytes:
    out = bytearray(varint(d0) + varint(len(entries)))
    for d, e in entries:
        out += varint(d) + lp(e)
    return bytes(out)


@lru_cache(maxsize=200_000)
def decode_cover_cert(data: bytes) -> tuple[int, tuple[tuple[int, bytes], ...]]:
    r = Reader(data)
    d0 = r.varint()
    count = r.varint()
    entries = tuple((r.varint(), r.lp()) for _ in range(count))
    r.finish()
    return d0, entries


def _try_cover_cert(data: bytes):
    try:
        return decode_cover_cert(data)
    except ParseError:
        return None


def _owns_cover(config: Configuration, u: int, multiset: bool) -> bool:
    sets, _ = decode_cover_input(config.inputs[u])
    elements = [decode_cover_input(x)[1] for x in config.inputs]
    return any(covers(s, elements, multiset) for s in sets)


def cover_prover(config: Configuration, multiset: bool = False) -> tuple[bytes, ...]:
    """Honest COVER certificates.

    Set mode lists each distinct element once, in byte order, with the
    distance to the nearest node holding it.  Multiset mode lists one entry
    per node (sorted by element, then canonically) with the distance to that
    node.
    """
    lang = COVER_MULTISET if multiset else COVER
    if not lang(config):
        raise DomainError("cover prover needs a member of the language")
    g = config.graph
    elems = [decode_cover_input(x)[1] for x in config.inputs]
    owners = [u for u in g.nodes() if _owns_cover(config, u, multiset)]
    star = canonical_pick(config, owners)[0]
    d_star = g.distances(star)
    if multiset:
        anchors = canonical_pick(config, list(g.nodes()))
        anchors.sort(key=lambda v: elems[v])  # stable: canonical order within equal elements
        columns = [(g.distances(v), elems[v]) for v in anchors]
        return tuple(
            encode_cover_cert(d_star[u], [(dist[u], e) for dist, e in columns]) for u in g.nodes()
        )
    values = sorted(set(elems))
    holders = {e: [v for v in g.nodes() if elems[v] == e] for e in values}
    out = []
    for u in g.nodes():
        du = g.distances(u)
        entries = [(min(du[v] for v in holders[e]), e) for e in values]
        out.append(encode_cover_cert(d_star[u], entries))
    return tuple(out)


def _cover_verdict(view: BallView, multiset: bool) -> bool:
    mine = _try_cover_cert(view.cert(0))
    if mine is None:
        return False
    try:
        sets, element = decode_cover_input(view.x())
    except ParseError:
        return False
    d0, entries = mine
    nbrs = []
    for w in view.neighbors():
        other = _try_cover_cert(view.cert(0, w))
        # equal list lengths and equal element values position by position
        if other is None or len(other[1]) != len(entries):
            return False
        if any(a[1] != b[1] for a, b in zip(other[1], entries)):
            return False
        nbrs.append(other)
    zeros = [i for i, (d, _) in enumerate(entries) if d == 0]
    if len(zeros) != 1 or entries[zeros[0]][1] != element:
        return False
    listed = [e for _, e in entries]
    if d0 == 0 and not any(covers(s, listed, multiset) for s in sets):
        return False
    if d0 > 0 and not any(o[0] < d0 for o in nbrs):
        return False
    for i, (d, _) in enumerate(entries):
        if d > 0 and not any(o[1][i][0] < d for o in nbrs):
            return False
    return True


def cover_verifier(multiset: bool = False) -> LocalAlgorithm:
    name = "cover_multiset" if multiset else "cover"
    return LocalAlgorithm(1, 1, lambda view: _cover_verdict(view, multiset), name=name)


def cover_universe(config: Configuration) -> list[bytes]:
    """Every element value mentioned by the instance, in byte order."""
    seen = set()
    for x in config.inputs:
        try:
            sets, e = decode_cover_input(x)
        except ParseError:
            continue
        seen.add(e)
        for s in sets:
            seen.update(s)
    return sorted(seen)


def cover_space(config: Configuration, max_dist: int, max_len: int) -> CertificateSpace:
    """All COVER certificates with distances <= max_dist, list length 1..max_len, elements from the instance."""
    universe = cover_universe(config)
    entry = [(d, e) for e in universe for d in range(max_dist + 1)]
    values = []
    for d0 in range(max_dist + 1):
        for length in range(1, max_len + 1):
            for entries in product(entry, repeat=length):
                values.append(encode_cover_cert(d0, entries))
    values = tuple(values)
    return CertificateSpace(lambda cfg, u: values, f"cover<={max_dist},{max_len}")


def cover_cert_bits(certs: Sequence[bytes]) -> int:
    return 8 * max(len(c) for c in certs)


def cover_own_checks(x: bytes, cert: bytes, multiset: bool = False) -> bool:
    """The verifier's checks that read only the node's own input and certificate.

    Exactly one zero distance, sitting at the node's own element, and a
    covering set when d0 = 0.  A value failing them is rejected whatever the
    neighbors hold.
    """
    mine = _try_cover_cert(cert)
    if mine is None:
        return False
    try:
        sets, element = decode_cover_input(x)
    except ParseError:
        return False
    d0, entries = mine
    zeros = [i for i, (d, _) in enumerate(entries) if d == 0]
    if len(zeros) != 1 or entries[zeros[0]][1] != element:
        return False
    return d0 > 0 or any(covers(s, [e for _, e in entries], multiset) for s in sets)


def cover_blocks(config: Configuration, max_dist: int, max_len: int,
                 multiset: bool = False) -> list[CertificateSpace]:
    """``cover_space`` split by element sequence, each node keeping the values that pass its own checks.

    The verifier rejects unless neighbors agree on the element sequence,
    and values failing :func:`cover_own_checks` reject outright, so an
    everywhere-accepting assignment from ``cover_space`` lies in one block.
    """
    universe = cover_universe(config)
    blocks = []
    for length in range(1, max_len + 1):
        for elems in product(universe, repeat=length):
            values = [encode_cover_cert(d0, list(zip(ds, elems)))
                      for d0 in range(max_dist + 1) for ds in product(range(max_dist + 1), repeat=length)]
            per_node = [tuple(v for v in values if cover_own_checks(config.inputs[u], v, multiset))
                        for u in range(config.n)]
            blocks.append(CertificateSpace(lambda cfg, u, per_node=per_node: per_node[u], f"cover{elems}"))
    return blocks

SCHEMES = {
    "tree": (tree_prover, tree_verifier),
    "alts": (alts_prover, alts_verifier),
    "cover": (cover_prover, cover_verifier),
}

"""Generic forall-exists protocol: any decidable language, radius 1.

Level 0 (c1) is a description ``(M, data, index)`` of the whole configuration;
level 1 (c2) refutes a wrong description or confirms a correct one.

Refutation flags:

    0  (d)        distance to a node whose c1 is unreadable or differs from a neighbor's
    1  ()         the description is an accurate copy of the configuration
    2  (i, d, d') distances to two distinct nodes claiming index i
    3  (i)        no node claims index i
    4  (d)        distance to a node whose neighborhood contradicts the description

Both payload layouts are byte-exact: a DescriptionCert is the (M, data)
encoding followed by a varint index; a RefutationCert is one flag byte
followed by its varint fields.
"""

from __future__ import annotations

from dataclasses import dataclass
import random
from functools import lru_cache
from itertools import combinations, product
from typing import Callable, Sequence

from .core import BallView, Configuration, LocalAlgorithm, ball
from .encoding import Reader, encode_md, read_md, varint
from .errors import DomainError, ParseError
from .games import CertificateSpace
from .zoo import config_from_md, md_from_config

Projection = Callable[[bytes], bytes]

_FIELDS = {0: 1, 1: 0, 2: 3, 3: 1, 4: 1}


@dataclass(frozen=True)
class DescriptionCert:
    matrix: tuple[tuple[int, ...], ...]
    data: tuple[bytes, ...]
    index: int

    @property
    def m(self) -> int:
        return len(self.matrix)

    def encode(self) -> bytes:
        return encode_md(self.matrix, self.data) + varint(self.index)

    def described(self) -> Configuration | None:
        return config_from_md(self.matrix, self.data)

    def neighbors_of(self, i: int) -> set[int]:
        """1-based neighbors of 1-based position ``i`` in M."""
        return {j + 1 for j, bit in enumerate(self.matrix[i - 1]) if bit}


@lru_cache(maxsize=200_000)
def decode_description(data: bytes) -> DescriptionCert:
    r = Reader(data)
    matrix, values = read_md(r)
    index = r.varint()
    r.finish()
    if not 1 <= index <= len(matrix):
        raise ParseError(f"index {index} outside 1..{len(matrix)}")
    return DescriptionCert(matrix, values, index)


def try_description(data: bytes) -> DescriptionCert | None:
    try:
        return decode_description(data)
    except ParseError:
        return None


@dataclass(frozen=True)
class RefutationCert:
    flag: int
    fields: tuple[int, ...] = ()

    def __post_init__(self):
        if self.flag not in _FIELDS or len(self.fields) != _FIELDS[self.flag]:
            raise DomainError(f"payload {self.fields} does not fit flag {self.flag}")

    def encode(self) -> bytes:
        return bytes([self.flag]) + b"".join(varint(v) for v in self.fields)


@lru_cache(maxsize=200_000)
def decode_refutation(data: bytes) -> RefutationCert:
    r = Reader(data)
    flag = r.byte()
    if flag not in _FIELDS:
        raise ParseError(f"unknown flag {flag}")
    fields = tuple(r.varint() for _ in range(_FIELDS[flag]))
    r.finish()
    return RefutationCert(flag, fields)


def try_refutation(data: bytes) -> RefutationCert | None:
    try:
        return decode_refutation(data)
    except ParseError:
        return None


def project_config(config: Configuration, project: Projection | None) -> Configuration:
    if project is None:
        return config
    return config.with_inputs([project(x) for x in config.inputs])


# -- honest description ---------------------------------------------------------


def honest_description(config: Configuration, project: Projection | None = None) -> tuple[bytes, ...]:
    """c1 describing the configuration in canonical order; index(u) = canonical position + 1."""
    cfg = project_config(config, project)
    order, _ = cfg.canonical()
    matrix, data = md_from_config(cfg, order)
    pos = {v: i for i, v in enumerate(order)}
    return tuple(DescriptionCert(matrix, data, pos[u] + 1).encode() for u in range(cfg.n))


# -- local predicates shared by prover and verifier -------------------------------


def _same_md(a: DescriptionCert, b: DescriptionCert) -> bool:
    return a.matrix == b.matrix and a.data == b.data


def locally_inconsistent(view: BallView, project: Projection | None = None) -> bool:
    """c1 at the center is unreadable, or some neighbor's is unreadable or describes another (M, data)."""
    mine = try_description(view.cert(0))
    if mine is None:
        return True
    for w in view.neighbors():
        other = try_description(view.cert(0, w))
        if other is None or not _same_md(mine, other):
            return True
    return False


def _input(view: BallView, v: int, project: Projection | None) -> bytes | None:
    x = view.x(v)
    if project is None:
        return x
    try:
        return project(x)
    except ParseError:
        return None


def local_mismatch(view: BallView, project: Projection | None = None) -> bool:
    """The radius-1 neighborhood of the center contradicts the (common) description.

    True if the center's input differs from data[index], if the neighbors'
    indices repeat or differ from the M-neighbors of index, or if some
    neighbor's input differs from data at its index.  Only meaningful when
    the center and its neighbors hold readable, equal (M, data).
    """
    mine = try_description(view.cert(0))
    if mine is None:
        return False
    nbrs = []
    for w in view.neighbors():
        other = try_description(view.cert(0, w))
        if other is None or not _same_md(mine, other):
            return False
        nbrs.append((w, other))
    if _input(view, view.center, project) != mine.data[mine.index - 1]:
        return True
    idx = [o.index for _, o in nbrs]
    if len(set(idx)) != len(idx) or set(idx) != mine.neighbors_of(mine.index):
        return True
    return any(_input(view, w, project) != o.data[o.index - 1] for w, o in nbrs)


# -- refutation prover -----------------------------------------------------------


def refute(config: Configuration, lang: Callable[[Configuration], bool] | None,
           c1: Sequence[bytes], project: Projection | None = None) -> tuple[bytes, ...]:
    """c2 answering an arbitrary c1 on a legal configuration.

    Cases are tried in the order 0..4; witnesses are chosen by canonical
    position (then index order for colliding indices).
    """
    if lang is not None and not lang(config):
        raise DomainError("refute is only defined on legal configurations")
    g = config.graph
    n = g.n
    c1 = tuple(c1)
    if len(c1) != n:
        raise DomainError("c1 must cover every node")
    order, _ = project_config(config, project).canonical()
    rank = {v: i for i, v in enumerate(order)}

    def by_rank(nodes):
        return sorted(nodes, key=rank.__getitem__)

    def dist_cert(flag, w):
        d = g.distances(w)
        return tuple(RefutationCert(flag, (d[u],)).encode() for u in range(n))

    parsed = [try_description(c) for c in c1]
    bad = [u for u in range(n)
           if parsed[u] is None
           or any(parsed[w] is None or not _same_md(parsed[u], parsed[w]) for w in g.adj[u])]
    if bad:
        return dist_cert(0, by_rank(bad)[0])

    desc = parsed[0]
    m = desc.m
    index = [p.index for p in parsed]
    holders: dict[int, list[int]] = {}
    for u in range(n):
        holders.setdefault(index[u], []).append(u)
    injective = len(holders) == n

    described = desc.described()
    projected = project_config(config, project)
    if injective and n == m and described is not None and described.code() == projected.code():
        return tuple(RefutationCert(1).encode() for _ in range(n))
    if not injective:
        i = min(k for k, nodes in holders.items() if len(nodes) > 1)
        w, w2 = by_rank(holders[i])[:2]
        dw, dw2 = g.distances(w), g.distances(w2)
        return tuple(RefutationCert(2, (i, dw[u], dw2[u])).encode() for u in range(n))
    if n < m:
        i = min(k for k in range(1, m + 1) if k not in holders)
        return tuple(RefutationCert(3, (i,)).encode() for _ in range(n))
    # n == m, index is a bijection, and yet no isomorphism: some neighborhood is wrong
    certs = (c1,)
    mismatched = [u for u in range(n) if local_mismatch(ball(config, None, certs, u, 1), project)]
    if not mismatched:
        raise AssertionError("no refutation case applies; the case analysis is broken")
    return dist_cert(4, by_rank(mismatched)[0])


# -- verifier --------------------------------------------------------------------


def _decreases(view: BallView, certs: dict, pos: int, value: int) -> bool:
    return any(c.fields[pos] < value for c in certs.values())


def pi2_verdict(view: BallView, member: Callable[[BallView, DescriptionCert], bool],
                project: Projection | None = None) -> bool:
    mine = try_refutation(view.cert(1))
    if mine is None:
        return False
    nbrs = {}
    for w in view.neighbors():
        other = try_refutation(view.cert(1, w))
        if other is None or other.flag != mine.flag:
            return False
        nbrs[w] = other
    flag = mine.flag
    if flag in (0, 4):
        d = mine.fields[0]
        if d > 0:
            return _decreases(view, nbrs, 0, d)
        return locally_inconsistent(view, project) if flag == 0 else local_mismatch(view, project)
    desc = try_description(view.cert(0))
    if flag == 1:
        return desc is not None and member(view, desc)
    i = mine.fields[0]
    if any(o.fields[0] != i for o in nbrs.values()):
        return False
    if desc is None:
        return False
    if flag == 2:
        d1, d2 = mine.fields[1], mine.fields[2]
        if d1 == 0 and d2 == 0:
            return False
        for pos, d in ((1, d1), (2, d2)):
            if d == 0:
                if desc.index != i:
                    return False
            elif not _decreases(view, nbrs, pos, d):
                return False
        return True
    # flag 3: i must be a real position of the description, and not mine
    return 1 <= i <= desc.m and desc.index != i


def language_member(lang: Callable[[Configuration], bool]) -> Callable[[BallView, DescriptionCert], bool]:
    def member(view: BallView, desc: DescriptionCert) -> bool:
        described = desc.described()
        return described is not None and bool(lang(described))

    return member


def verify_pi2(lang: Callable[[Configuration], bool], project: Projection | None = None,
               member: Callable[[BallView, DescriptionCert], bool] | None = None,
               name: str | None = None) -> LocalAlgorithm:
    """Radius-1 verifier reading (c1, c2).

    ``member`` overrides the flag-1 test (default: the described
    configuration is connected and belongs to ``lang``).
    """
    test = member or language_member(lang)
    label = name or f"pi2[{getattr(lang, 'name', 'lang')}]"
    return LocalAlgorithm(1, 2, lambda view: pi2_verdict(view, test, project), name=label)


def refutation_values(max_dist: int, max_index: int) -> tuple[bytes, ...]:
    out = [RefutationCert(0, (d,)).encode() for d in range(max_dist + 1)]
    out.append(RefutationCert(1).encode())
    out += [RefutationCert(2, (i, d, e)).encode()
            for i in range(1, max_index + 1) for d in range(max_dist + 1) for e in range(max_dist + 1)]
    out += [RefutationCert(3, (i,)).encode() for i in range(1, max_index + 1)]
    out += [RefutationCert(4, (d,)).encode() for d in range(max_dist + 1)]
    return tuple(out)


def refutation_space(max_dist: int, max_index: int) -> CertificateSpace:
    """Every RefutationCert with distances <= max_dist and indices <= max_index."""
    return CertificateSpace.uniform(refutation_values(max_dist, max_index), f"c2<=({max_dist},{max_index})")


def refutation_subspaces(max_dist: int, max_index: int) -> list[tuple[str, tuple[bytes, ...]]]:
    """The refutation space split by flag (and by i for flags 2 and 3).

    Neighbors with different flags, or different i under flags 2 and 3,
    reject; a connected graph accepting everywhere therefore uses a single
    block of this split.
    """
    dists = range(max_dist + 1)
    blocks = [("0", tuple(RefutationCert(0, (d,)).encode() for d in dists)),
              ("1", (RefutationCert(1).encode(),))]
    for i in range(1, max_index + 1):
        blocks.append((f"2/{i}", tuple(RefutationCert(2, (i, d, e)).encode() for d in dists for e in dists)))
    for i in range(1, max_index + 1):
        blocks.append((f"3/{i}", (RefutationCert(3, (i,)).encode(),)))
    blocks.append(("4", tuple(RefutationCert(4, (d,)).encode() for d in dists)))
    return blocks


def accepted_refutation(alg: LocalAlgorithm, config: Configuration, c1: Sequence[bytes], max_dist: int,
                        max_index: int, budget: int | None = None) -> tuple[tuple[bytes, ...] | None, dict]:
    """Search ``refutation_space(max_dist, max_index)`` for a c2 accepted at every node.

    Exact: the verifier rejects wherever neighbors hold different blocks of
    :func:`refutation_subspaces`, and flag-2 values failing the node's own
    checks are dropped per node.  Returns ``(c2 or None, stats)``.
    """
    from .games import exists_accepting_in_blocks

    c1 = tuple(c1)
    descs = [try_description(c) for c in c1]
    blocks = []
    for name, values in refutation_subspaces(max_dist, max_index):
        if name.startswith("2/"):
            per_node = [tuple(v for v in values if _flag2_own_ok(descs[u], decode_refutation(v)))
                        for u in range(config.n)]
            values = CertificateSpace(lambda cfg, u, per_node=per_node: per_node[u], f"c2 block {name}")
        blocks.append(values)
    return exists_accepting_in_blocks(alg, config, [c1], blocks, budget)


def _flag2_own_ok(desc: DescriptionCert | None, cert: RefutationCert) -> bool:
    """The flag-2 checks reading only the node's own c1 and c2; failing values reject whatever the neighbors hold."""
    i, d1, d2 = cert.fields
    if desc is None or d1 == d2 == 0:
        return False
    return all(d > 0 or desc.index == i for d in (d1, d2))


# -- bounded adversary for the legal branch ----------------------------------------------


def _matrices(m: int):
    """Every symmetric zero-diagonal m x m matrix, one per graph isomorphism class."""
    from .canon import canonical_code

    pairs = list(combinations(range(m), 2))
    seen = set()
    for mask in range(1 << len(pairs)):
        adj = [[] for _ in range(m)]
        matrix = [[0] * m for _ in range(m)]
        for k, (i, j) in enumerate(pairs):
            if mask >> k & 1:
                matrix[i][j] = matrix[j][i] = 1
                adj[i].append(j)
                adj[j].append(i)
        code = canonical_code(tuple(tuple(a) for a in adj), (0,) * m)
        if code not in seen:
            seen.add(code)
            yield tuple(tuple(r) for r in matrix)


def _variants(matrix, data, alphabet):
    """Descriptions near (M, data): one edge flipped, one value changed, one node added or removed."""
    m = len(matrix)
    rows = [list(r) for r in matrix]
    for i, j in combinations(range(m), 2):
        flipped = [list(r) for r in rows]
        flipped[i][j] = flipped[j][i] = 1 - rows[i][j]
        yield tuple(tuple(r) for r in flipped), data
    for i in range(m):
        for a in alphabet:
            if a != data[i]:
                yield matrix, data[:i] + (a,) + data[i + 1:]
    if m > 1:
        yield tuple(tuple(r[:-1]) for r in rows[:-1]), data[:-1]
    for attach in (None, 0):
        grown = [r + [0] for r in rows] + [[0] * (m + 1)]
        if attach is not None:
            grown[attach][m] = grown[m][attach] = 1
        yield tuple(tuple(r) for r in grown), data + (alphabet[0],)


def adversary_descriptions(config: Configuration, alphabet: Sequence[bytes], max_m: int = 6,
                           full_m: int = 3, max_maps: int = 32, seed: int = 0):
    """Bounded stand-in for "every c1": yields c1 assignments (tuples of bytes).

    * the honest description, and honest descriptions with one node's
      certificate unreadable or replaced by a nearby description;
    * common descriptions (M, data): every M up to isomorphism with every data
      vector over ``alphabet`` for m <= ``full_m``, plus the near variants of
      the honest description and its double cover up to ``max_m``;
    * for each common description, every index map when there are at most
      ``max_maps`` of them, otherwise ``max_maps`` seeded random maps plus the
      honest one when m = n.
    """
    rng = random.Random(seed)
    n = config.n
    alphabet = tuple(alphabet)
    honest = honest_description(config)
    hd = decode_description(honest[0])
    yield honest
    near = []
    for matrix, data in _variants(hd.matrix, hd.data, alphabet):
        if 1 <= len(matrix) <= max_m:
            near.append((matrix, data))
    for u in range(n):
        yield honest[:u] + (b"\xff",) + honest[u + 1:]
        for matrix, data in near[:3]:
            other = DescriptionCert(matrix, data, min(hd.index, len(matrix))).encode()
            yield honest[:u] + (other,) + honest[u + 1:]
    yield tuple(b"" for _ in range(n))

    common = []
    for m in range(1, min(full_m, max_m) + 1):
        for matrix in _matrices(m):
            for data in product(alphabet, repeat=m):
                common.append((matrix, tuple(data)))
    common += near
    if 2 * n <= max_m:
        from .lifts import connected_covers

        for cover, phi in connected_covers(config.graph, 2)[:1]:
            lifted = Configuration(cover, tuple(config.inputs[p] for p in phi))
            order, _ = lifted.canonical()
            common.append(md_from_config(lifted, order))
    seen = set()
    for matrix, data in common:
        key = (matrix, data)
        if key in seen:
            continue
        seen.add(key)
        m = len(matrix)
        if m ** n <= max_maps:
            maps = list(product(range(1, m + 1), repeat=n))
        else:
            maps = [tuple(rng.randint(1, m) for _ in range(n)) for _ in range(max_maps)]
            if m == n:
                maps.append(tuple(decode_description(c).index for c in honest))
        for index in maps:
            yield tuple(DescriptionCert(matrix, data, i).encode() for i in index)

"""Distributed languages and the local deciders for those that sit in LD.

Inputs are bytes.  Boolean and selection languages use ``b'\\x00'`` / ``b'\\x01'``
(false/true, unselected/selected).  Any configuration whose inputs do not
parse for a language is outside it.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Sequence

from .core import Configuration, Graph, LocalAlgorithm
from .corpus import connected_graphs
from .encoding import FALSE, TOP, TRUE, Reader, encode_md, lp, read_md, shortlex_rank, shortlex_unrank, varint
from .errors import DomainError, ParseError


@dataclass(frozen=True)
class Language:
    name: str
    member: Callable[[Configuration], bool]
    well_formed: Callable[[Configuration], bool] | None = None

    def __call__(self, config: Configuration) -> bool:
        return bool(self.member(config))

    def __repr__(self) -> str:
        return f"Language({self.name!r})"


def _binary(config: Configuration) -> bool:
    return all(x in (FALSE, TRUE) for x in config.inputs)


def _selected(config: Configuration) -> int | None:
    if not _binary(config):
        return None
    return sum(1 for x in config.inputs if x == TOP)


def is_tree(config: Configuration) -> bool:
    return len(config.graph.edges) == config.n - 1


AND = Language("and", lambda c: _binary(c) and all(x == TRUE for x in c.inputs), _binary)
OR = Language("or", lambda c: _binary(c) and any(x == TRUE for x in c.inputs), _binary)
PROP_COL = Language("prop_col", lambda c: all(c.inputs[u] != c.inputs[v] for u, v in c.graph.edges))
TREE = Language("tree", is_tree)
AMOS = Language("amos", lambda c: (k := _selected(c)) is not None and k <= 1, _binary)
ALTS = Language("alts", lambda c: (k := _selected(c)) is not None and k >= 2, _binary)
EXTS = Language("exts", lambda c: _selected(c) == 2, _binary)


def diam(k: int) -> Language:
    return Language(f"diam_{k}", lambda c: c.graph.diameter() <= k)


# -- COVER -------------------------------------------------------------------
#
# x(u) = varint k, then k sets (varint size, length-prefixed elements), then
# the length-prefixed element e(u).


def encode_cover_input(sets: Sequence[Iterable[bytes]], element: bytes, *, multiset: bool = False) -> bytes:
    out = bytearray(varint(len(sets)))
    for s in sets:
        items = sorted(s) if multiset else sorted(set(s))
        out += varint(len(items))
        for e in items:
            out += lp(e)
    out += lp(element)
    return bytes(out)


@lru_cache(maxsize=100_000)
def decode_cover_input(data: bytes) -> tuple[tuple[tuple[bytes, ...], ...], bytes]:
    r = Reader(data)
    k = r.varint()
    if k < 1:
        raise ParseError("a node must hold at least one set")
    sets = []
    for _ in range(k):
        size = r.varint()
        sets.append(tuple(r.lp() for _ in range(size)))
    element = r.lp()
    r.finish()
    return tuple(sets), element


def covers(candidate: Sequence[bytes], elements: Sequence[bytes], multiset: bool = False) -> bool:
    if multiset:
        return Counter(candidate) == Counter(elements)
    return set(candidate) == set(elements)


def cover_member(config: Configuration, multiset: bool = False) -> bool:
    try:
        decoded = [decode_cover_input(x) for x in config.inputs]
    except ParseError:
        return False
    elements = [e for _, e in decoded]
    return any(covers(s, elements, multiset) for sets, _ in decoded for s in sets)


COVER = Language("cover", cover_member)
COVER_MULTISET = Language("cover_multiset", lambda c: cover_member(c, multiset=True))


# -- MISS families ------------------------------------------------------------


def config_from_md(matrix, data) -> Configuration | None:
    """Configuration described by (M, data), or None when M is disconnected."""
    m = len(matrix)
    edges = [(i, j) for i in range(m) for j in range(i + 1, m) if matrix[i][j]]
    g = Graph(m, edges, check_connected=False)
    if not g.is_connected():
        return None
    return Configuration(g, tuple(data))


def md_from_config(config: Configuration, order: Sequence[int] | None = None):
    order = list(range(config.n)) if order is None else list(order)
    pos = {v: i for i, v in enumerate(order)}
    m = config.n
    matrix = [[0] * m for _ in range(m)]
    for u, v in config.graph.edges:
        matrix[pos[u]][pos[v]] = matrix[pos[v]][pos[u]] = 1
    return tuple(tuple(r) for r in matrix), tuple(config.inputs[v] for v in order)


def value_of(data: bytes) -> int:
    """Numeric value of an input string (its shortlex rank)."""
    return shortlex_rank(data)


class Family:
    """A set of configurations stored in a MISS input."""

    def contains(self, config: Configuration) -> bool:
        raise NotImplementedError

    def encode(self) -> bytes:
        raise NotImplementedError


@dataclass(frozen=True)
class ExplicitFamily(Family):
    members: tuple[Configuration, ...]

    def __post_init__(self):
        object.__setattr__(self, "_codes", frozenset(c.code() for c in self.members))

    def contains(self, config: Configuration) -> bool:
        return config.code() in self._codes

    def encode(self) -> bytes:
        out = bytearray(b"\x00")
        ordered = sorted(self.members, key=lambda c: repr(c.code()))
        out += varint(len(ordered))
        for cfg in ordered:
            order, _ = cfg.canonical()
            out += encode_md(*md_from_config(cfg, order))
        return bytes(out)


@dataclass(frozen=True)
class LazyFamily(Family):
    """Every configuration outside ``base`` with at most ``omega`` nodes and input values <= ``omega``."""

    base: str
    omega: int

    def within_bound(self, config: Configuration) -> bool:
        return config.n <= self.omega and all(value_of(x) <= self.omega for x in config.inputs)

    def contains(self, config: Configuration) -> bool:
        return self.within_bound(config) and not get_language(self.base)(config)

    def encode(self) -> bytes:
        return b"\x01" + lp(self.base.encode()) + varint(self.omega)

    def materialize(self) -> ExplicitFamily:
        """List every member up to isomorphism (feasible only for tiny omega)."""
        lang = get_language(self.base)
        values = [shortlex_unrank(r) for r in range(self.omega + 1)]
        members = []
        seen = set()
        for n in range(1, self.omega + 1):
            for g in connected_graphs(n):
                for inputs in product(values, repeat=n):
                    cfg = Configuration(g, inputs)
                    if lang(cfg):
                        continue
                    code = cfg.code()
                    if code not in seen:
                        seen.add(code)
                        members.append(cfg)
        return ExplicitFamily(tuple(members))


@lru_cache(maxsize=10_000)
def decode_family(data: bytes) -> Family:
    r = Reader(data)
    tag = r.byte()
    if tag == 0:
        count = r.varint()
        members = []
        for _ in range(count):
            matrix, values = read_md(r)
            cfg = config_from_md(matrix, values)
            if cfg is None:
                raise ParseError("family member is disconnected")
            members.append(cfg)
        r.finish()
        return ExplicitFamily(tuple(members))
    if tag == 1:
        try:
            base = r.lp().decode()
        except UnicodeDecodeError:
            raise ParseError("bad language name") from None
        omega = r.varint()
        r.finish()
        if base not in _REGISTRY and not base.startswith("diam_"):
            raise ParseError(f"unknown language {base!r}")
        return LazyFamily(base, omega)
    raise ParseError(f"unknown family tag {tag}")


def encode_miss_input(family: Family, x_prime: bytes) -> bytes:
    return lp(family.encode()) + lp(x_prime)


@lru_cache(maxsize=100_000)
def decode_miss_input(data: bytes) -> tuple[Family, bytes]:
    r = Reader(data)
    fam = r.lp()
    x_prime = r.lp()
    r.finish()
    return decode_family(fam), x_prime


def split_miss(config: Configuration) -> tuple[list[Family], Configuration] | None:
    try:
        decoded = [decode_miss_input(x) for x in config.inputs]
    except ParseError:
        return None
    return [f for f, _ in decoded], config.with_inputs([x for _, x in decoded])


def miss_member(config: Configuration) -> bool:
    parts = split_miss(config)
    if parts is None:
        return False
    families, projected = parts
    return not any(f.contains(projected) for f in families)


def miss_lift_member(config: Configuration, budget: int | None = None) -> bool:
    from .lifts import lift_closure_membership

    parts = split_miss(config)
    if parts is None:
        return False
    families, projected = parts
    return not any(lift_closure_membership(projected, f, budget) for f in families)


MISS = Language("miss", miss_member)
MISS_LIFT = Language("miss_lift", miss_lift_member)

_REGISTRY: dict[str, Language] = {
    lang.name: lang for lang in (AND, OR, PROP_COL, TREE, AMOS, ALTS, EXTS, COVER, COVER_MULTISET, MISS, MISS_LIFT)
}


def register(lang: Language) -> Language:
    """Make a language addressable by name (used by modules defining their own languages)."""
    _REGISTRY[lang.name] = lang
    return lang


def get_language(name: str) -> Language:
    key = name.lower().replace("-", "_")
    if key in _REGISTRY:
        return _REGISTRY[key]
    if key.startswith("diam"):
        digits = key[4:].lstrip("_")
        if digits.isdigit():
            return diam(int(digits))
    raise DomainError(f"unknown language {name!r}")


def language_names() -> list[str]:
    return sorted(_REGISTRY) + ["diam_<k>"]


# -- LD deciders -------------------------------------------------------------


def ld_checker(name: str) -> LocalAlgorithm:
    key = name.lower().replace("-", "_")
    if key == "and":
        return LocalAlgorithm(0, 0, lambda v: v.x() == TRUE, name="and")
    if key == "prop_col":
        return LocalAlgorithm(1, 0, lambda v: all(v.x(w) != v.x() for w in v.neighbors()), name="prop_col")
    if key.startswith("diam"):
        k = int(key[4:].lstrip("_"))

        def no_far_node(view, k=k):
            return not any(view.dist(w) == k + 1 for w in view.nodes)

        return LocalAlgorithm(k + 1, 0, no_far_node, name=f"diam_{k}")
    raise DomainError(f"no LD checker for {name!r}")


def co_ld_checker(name: str) -> LocalAlgorithm:
    """Disjunctive-mode decider: a legal instance needs one accepting node."""
    if name.lower() == "or":
        return LocalAlgorithm(0, 0, lambda v: v.x() == TRUE, name="or")
    raise DomainError(f"no co-LD checker for {name!r}")

"""Bounded evaluation of alternating certificate games.

A game is ``Q1 c1 ... Qk ck  forall id in pool:  matrix`` where each ``ci``
ranges over a finite :class:`CertificateSpace` per node and the matrix is one
of

    A  every node accepts        (legal branch of a class)
    B  some node rejects         (illegal branch of a class)
    C  some node accepts         (legal branch of a co-class)
    D  every node rejects        (illegal branch of a co-class)

Assignments are enumerated node by node in BFS order from node 0, each node
running through its choices in space order, so "lexicographically first"
refers to that order.  The last certificate layer is solved with a
strategy that exploits locality (backtracking for existential layers,
per-ball enumeration for universal ones); ``short_circuit=False`` switches
everything to plain exhaustive enumeration, which serves as the reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Sequence

from .core import Configuration, LocalAlgorithm, ball, node_verdict, view_code
from .corpus import default_id_pool
from .encoding import varint
from .errors import Inconclusive, UsageError

EXISTS = "exists"
FORALL = "forall"


class CertificateSpace:
    """Finite per-node certificate choices.

    ``fn(config, u)`` returns the candidate certificates for node ``u`` in
    enumeration order.
    """

    def __init__(self, fn: Callable[[Configuration, int], Iterable[bytes]], name: str = "space"):
        self._fn = fn
        self.name = name

    def choices(self, config: Configuration, u: int) -> tuple[bytes, ...]:
        return tuple(self._fn(config, u))

    def __repr__(self) -> str:
        return f"CertificateSpace({self.name!r})"

    @classmethod
    def uniform(cls, values: Iterable[bytes], name: str = "uniform") -> "CertificateSpace":
        values = tuple(values)
        return cls(lambda config, u: values, name)

    @classmethod
    def raw(cls, max_len: int, symbols: Sequence[int] = (0, 1)) -> "CertificateSpace":
        """Every byte string of length <= ``max_len`` over ``symbols``."""
        values = tuple(bytes(w) for k in range(max_len + 1) for w in product(symbols, repeat=k))
        return cls(lambda config, u: values, f"raw<={max_len}")

    @classmethod
    def varints(cls, upper: int) -> "CertificateSpace":
        values = tuple(varint(i) for i in range(upper + 1))
        return cls(lambda config, u: values, f"varint<={upper}")


@dataclass
class Witness:
    """Choices of the player that wins the evaluated formula.

    ``certs`` holds one assignment per decided layer (a tuple indexed by
    node); ``ids``/``node`` are filled when the matrix itself was refuted
    or satisfied at a specific identity assignment and node.
    """

    certs: list[tuple[bytes, ...]] = field(default_factory=list)
    ids: tuple[int, ...] | None = None
    node: int | None = None


@dataclass
class GameResult:
    value: bool
    witness: Witness
    stats: dict


_MATRIX = {
    # (target verdict, node quantifier is universal)
    "A": (True, True),
    "B": (False, False),
    "C": (True, False),
    "D": (False, True),
}


class _Game:
    def __init__(self, alg, config, prefix, spaces, id_pool, budget, short_circuit):
        self.alg = alg
        self.config = config
        self.prefix = list(prefix)
        self.k = len(self.prefix)
        self.n = config.n
        self.order = config.graph.bfs_order(0)
        self.pos = {v: i for i, v in enumerate(self.order)}
        self.choices = [[space.choices(config, u) for u in range(self.n)] for space in spaces]
        self.ids = [None] if not alg.uses_ids else [tuple(i) for i in id_pool]
        self.budget = budget
        self.short_circuit = short_circuit
        self.evals = 0
        balls = [config.graph.ball_structure(u, alg.radius).nodes for u in range(self.n)]
        self.balls = balls
        # position in BFS order after which node u's ball is fully assigned
        self.ready = [[] for _ in range(self.n)]
        for u in range(self.n):
            self.ready[max(self.pos[v] for v in balls[u])].append(u)

    def stats(self) -> dict:
        return {"verdict_evaluations": self.evals, "id_pool": len(self.ids), "layers": self.k}

    def verdict(self, ids, certs, u) -> bool:
        self.evals += 1
        if self.budget is not None and self.evals > self.budget:
            raise Inconclusive("game budget exhausted", self.stats())
        return node_verdict(self.alg, self.config, ids, certs, u)

    # -- matrix --------------------------------------------------------------

    def matrix(self, certs, kind) -> tuple[bool, Witness]:
        target, universal = _MATRIX[kind]
        value, witness = True, Witness()
        for ids in self.ids:
            hits = []
            for u in range(self.n):
                hit = self.verdict(ids, certs, u) == target
                hits.append(hit)
                if self.short_circuit and hit != universal:
                    break
            if universal:
                bad = next((u for u, h in enumerate(hits) if not h), None)
                ok = bad is None
            else:
                bad = None
                ok = any(hits)
            if not ok and value:
                value, witness = False, Witness(ids=ids, node=bad)
                if self.short_circuit:
                    break
        return value, witness

    # -- enumeration helpers ---------------------------------------------------

    def assignments(self, level) -> Iterable[tuple[bytes, ...]]:
        per_pos = [self.choices[level][v] for v in self.order]
        for combo in product(*per_pos):
            certs = [b""] * self.n
            for p, c in enumerate(combo):
                certs[self.order[p]] = c
            yield tuple(certs)

    def key(self, level, certs) -> tuple[int, ...]:
        return tuple(self.choices[level][v].index(certs[v]) for v in self.order)

    def backtrack(self, prior, level, target, ids_list) -> tuple[bytes, ...] | None:
        """Lex-first assignment of layer ``level`` where every node gives ``target`` under every id."""
        certs = [b""] * self.n
        if any(not self.choices[level][v] for v in range(self.n)):
            return None

        def rec(p):
            if p == self.n:
                return True
            v = self.order[p]
            for c in self.choices[level][v]:
                certs[v] = c
                full = prior + (tuple(certs),)
                if all(self.verdict(ids, full, u) == target for u in self.ready[p] for ids in ids_list):
                    if rec(p + 1):
                        return True
            certs[v] = b""
            return False

        return tuple(certs) if rec(0) else None

    def local_find(self, prior, level, target, ids_list):
        """Lex-first assignment where some node gives ``target`` under some id.

        Returns ``(certs, ids, node)`` or None.  Only the ball of the node
        matters, so each node is examined over its ball alone; other nodes
        take their first choice.
        """
        if any(not self.choices[level][v] for v in range(self.n)):
            return None
        base = [self.choices[level][v][0] for v in range(self.n)]
        best = None
        for u in range(self.n):
            ball_nodes = sorted(self.balls[u], key=self.pos.__getitem__)
            for combo in product(*(self.choices[level][v] for v in ball_nodes)):
                certs = list(base)
                for v, c in zip(ball_nodes, combo):
                    certs[v] = c
                certs = tuple(certs)
                if best is not None and self.key(level, certs) >= best[0]:
                    continue
                full = prior + (certs,)
                for ids in self.ids if ids_list is None else ids_list:
                    if self.verdict(ids, full, u) == target:
                        best = (self.key(level, certs), certs, ids, u)
                        break
        if best is None:
            return None
        return best[1], best[2], best[3]

    # -- solver ----------------------------------------------------------------

    def last_layer(self, prior, kind) -> tuple[bool, Witness] | None:
        level = self.k - 1
        q = self.prefix[level]
        target, universal = _MATRIX[kind]
        if q == EXISTS and universal:
            c = self.backtrack(prior, level, target, self.ids)
            return (True, Witness([c])) if c is not None else (False, Witness())
        if q == FORALL and universal:
            hit = self.local_find(prior, level, not target, None)
            if hit is None:
                return True, Witness()
            return False, Witness([hit[0]], hit[1], hit[2])
        if q == FORALL and not universal:
            # forall c forall id exists u target  <=>  for each id, no c makes every node miss target
            found = []
            for ids in self.ids:
                c = self.backtrack(prior, level, not target, [ids])
                if c is not None:
                    found.append((self.key(level, c), c, ids))
            if not found:
                return True, Witness()
            _, c, ids = min(found, key=lambda item: item[0])
            return False, Witness([c], ids)
        if q == EXISTS and not universal and len(self.ids) == 1:
            hit = self.local_find(prior, level, target, self.ids)
            if hit is None:
                return False, Witness()
            return True, Witness([hit[0]], hit[1], hit[2])
        return None

    def solve(self, level, prior, kind) -> tuple[bool, Witness]:
        if level == self.k:
            return self.matrix(prior, kind)
        if self.short_circuit and level == self.k - 1:
            special = self.last_layer(prior, kind)
            if special is not None:
                return special
        q = self.prefix[level]
        want = q == EXISTS
        result = None
        for certs in self.assignments(level):
            value, sub = self.solve(level + 1, prior + (certs,), kind)
            if value == want and result is None:
                result = Witness([certs] + sub.certs, sub.ids, sub.node)
                if self.short_circuit:
                    break
        if result is not None:
            return want, result
        return not want, Witness()


def _normalize_prefix(prefix) -> list[str]:
    out = []
    for q in prefix:
        key = str(q).lower()
        if key in ("e", "exists", "∃"):
            out.append(EXISTS)
        elif key in ("a", "forall", "∀"):
            out.append(FORALL)
        else:
            raise UsageError(f"unknown quantifier {q!r}")
    return out


def solve_game(alg: LocalAlgorithm, config: Configuration, prefix: Sequence[str],
               spaces: Sequence[CertificateSpace], id_pool: Sequence[Sequence[int]] | None = None,
               matrix: str = "A", budget: int | None = None, short_circuit: bool = True) -> GameResult:
    prefix = _normalize_prefix(prefix)
    if len(prefix) != len(spaces) or len(prefix) != alg.arity:
        raise UsageError(f"prefix, spaces and arity must agree ({len(prefix)}, {len(spaces)}, {alg.arity})")
    if matrix not in _MATRIX:
        raise UsageError(f"unknown matrix {matrix!r}")
    if id_pool is None:
        id_pool = default_id_pool(config) if alg.uses_ids else [None]
    if len(id_pool) == 0:
        raise UsageError("identity pool is empty")
    game = _Game(alg, config, prefix, spaces, id_pool, budget, short_circuit)
    value, witness = game.solve(0, (), matrix)
    return GameResult(value, witness, game.stats())


def evaluate_game(alg: LocalAlgorithm, config: Configuration, prefix: Sequence[str],
                  spaces: Sequence[CertificateSpace], id_pool: Sequence[Sequence[int]] | None = None,
                  mode: str = "conjunctive", budget: int | None = None, short_circuit: bool = True) -> bool:
    """Value of ``Q1 c1 ... Qk ck forall id: global_accept(run(...), mode)``."""
    if mode not in ("conjunctive", "disjunctive"):
        raise UsageError(f"unknown acceptance mode {mode!r}")
    matrix = "A" if mode == "conjunctive" else "C"
    return solve_game(alg, config, prefix, spaces, id_pool, matrix, budget, short_circuit).value


# -- class membership -----------------------------------------------------------

_PREFIXES = {
    "ld": (),
    "sigma1": (EXISTS,),
    "nld": (EXISTS,),
    "pi1": (FORALL,),
    "sigma2": (EXISTS, FORALL),
    "pi2": (FORALL, EXISTS),
}


def parse_class_tag(tag: str) -> tuple[tuple[str, ...], bool]:
    """Return ``(prefix, is_co_class)`` for tags like ``Pi2``, ``co-NLD``, ``Σ1``."""
    key = tag.strip().lower().replace("σ", "sigma").replace("π", "pi").replace("₁", "1").replace("₂", "2")
    co = False
    for marker in ("co-", "co_", "co"):
        if key.startswith(marker):
            co, key = True, key[len(marker):]
            break
    if key not in _PREFIXES:
        raise UsageError(f"unknown class {tag!r}")
    return _PREFIXES[key], co


def _dual(prefix):
    return tuple(FORALL if q == EXISTS else EXISTS for q in prefix)


@dataclass
class Consistent:
    stats: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return True


@dataclass
class Violated:
    witness: Witness
    stats: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return False


def class_formula(class_tag: str, truth: bool) -> tuple[tuple[str, ...], str]:
    """Prefix and matrix that must hold for an instance of the given truth value."""
    prefix, co = parse_class_tag(class_tag)
    if not co:
        return (prefix, "A") if truth else (_dual(prefix), "B")
    return (_dual(prefix), "C") if truth else (prefix, "D")


def check_class_membership_on_instance(alg: LocalAlgorithm, config: Configuration, class_tag: str,
                                       spaces: Sequence[CertificateSpace],
                                       id_pool: Sequence[Sequence[int]] | None, truth: bool,
                                       budget: int | None = None, short_circuit: bool = True):
    """Check the branch of the class definition selected by ``truth`` on one instance.

    Returns :class:`Consistent` or :class:`Violated` with the refuting
    player's choices (the lexicographically first ones).
    """
    prefix, matrix = class_formula(class_tag, truth)
    result = solve_game(alg, config, prefix, spaces, id_pool, matrix, budget, short_circuit)
    if result.value:
        return Consistent(result.stats)
    return Violated(result.witness, result.stats)


def exists_accepting_in_blocks(alg: LocalAlgorithm, config: Configuration, fixed: Sequence[Sequence[bytes]],
                               blocks: Sequence[Sequence[bytes] | CertificateSpace], budget: int | None = None
                               ) -> tuple[tuple[bytes, ...] | None, dict]:
    """Search for a last-layer assignment, drawn from one block, accepted at every node.

    ``fixed`` holds the earlier certificate layers; a block is a value list or a space.  The search equals a
    search over the union of the blocks whenever ``alg`` rejects at a node
    whose neighbors hold values from a different block: on a connected
    graph an everywhere-accepting assignment then lies inside one block.
    Returns ``(certs or None, stats)``.
    """
    spaces = [CertificateSpace(lambda cfg, u, level=level: (level[u],), "fixed") for level in map(tuple, fixed)]
    prefix = (EXISTS,) * (len(spaces) + 1)
    evals = 0
    for values in blocks:
        left = None if budget is None else budget - evals
        space = values if isinstance(values, CertificateSpace) else CertificateSpace.uniform(values)
        result = solve_game(alg, config, prefix, spaces + [space], [None], "A", left)
        evals += result.stats["verdict_evaluations"]
        if result.value:
            return result.witness.certs[-1], {"verdict_evaluations": evals, "blocks": len(blocks)}
    return None, {"verdict_evaluations": evals, "blocks": len(blocks)}


def view_decider(configs: Sequence[Configuration], t: int, truth: Callable[[Configuration], bool],
                 certs: Sequence[Sequence[Sequence[bytes]]] | None = None) -> tuple[dict | None, int]:
    """Search every map from realized t-views to verdicts for one deciding ``truth`` on ``configs``.

    A map decides when, for each configuration, all nodes accept exactly if
    the configuration is legal.  Views are compared up to center-preserving
    isomorphism without identities.  Returns ``(decider or None, number of
    distinct views)``.
    """
    codes: dict[tuple, int] = {}
    rows = []
    for i, config in enumerate(configs):
        levels = certs[i] if certs is not None else ()
        row = set()
        for u in range(config.n):
            code = view_code(ball(config, None, levels, u, t))
            row.add(codes.setdefault(code, len(codes)))
        rows.append((frozenset(row), bool(truth(config))))
    for verdicts in product((False, True), repeat=len(codes)):
        if all(all(verdicts[v] for v in row) == legal for row, legal in rows):
            inverse = {i: code for code, i in codes.items()}
            return {inverse[i]: verdicts[i] for i in range(len(codes))}, len(codes)
    return None, len(codes)

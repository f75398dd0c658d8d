"""Iterated Turing-machine steps laid out on a rigid gadget.

System states of a machine on a tape of fixed length T are numbered from 2
upward; 0 and 1 stand for "halted rejecting" and "halted accepting" and are
fixed points of the step function ``fm``.

Gadget layout (node 0 is the pivot)::

    leaves   L_|L| ... L_2 L_1  pivot  R_1 R_2 ... R_|R|     (a path)

Above each side sits a complete binary tree whose leaves are that side's
path nodes, with a horizontal path through every level.  Position ``j``
counts from the pivot-side end of a level (0-based).  Labels:

    leaf   l1 = (j + 1) mod 3   (its distance to the pivot)
    inner  l1 = j mod 3         (distance to the pivot-side end of its level)
    all    l2 = height mod 3    (leaves 0; the pivot has l1 = l2 = 0)

Inputs are byte strings: kind, side, l1, l2, then for the pivot the machine
blob and the varints a, b, and for a leaf the machine blob and its value f.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

from .core import BallView, Configuration, Graph, LocalAlgorithm
from .encoding import Reader, decode_uint, lp, varint
from .errors import CodecRangeError, DomainError, ParseError
from .zoo import Language, register

PIVOT, LEAF, INNER = 0, 1, 2
NONE, LEFT, RIGHT = 0, 1, 2


# -- machines ---------------------------------------------------------------------


@dataclass(frozen=True)
class TuringMachine:
    """Deterministic single-tape machine.  ``alphabet[0]`` is the blank."""

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    transitions: dict = field(hash=False, compare=True)
    start: str = ""
    halt0: str = "h0"
    halt1: str = "h1"
    name: str = "machine"

    def __post_init__(self):
        start = self.start or self.states[0]
        object.__setattr__(self, "start", start)
        for q in (start, self.halt0, self.halt1):
            if q not in self.states:
                raise DomainError(f"unknown state {q!r}")
        if start in self.halting:
            raise DomainError("the start state must not be halting")
        for q in self.working:
            for s in self.alphabet:
                if (q, s) not in self.transitions:
                    raise DomainError(f"no transition for ({q}, {s})")
        for (q, s), (q2, s2, move) in self.transitions.items():
            if q not in self.states or q2 not in self.states or s not in self.alphabet or s2 not in self.alphabet:
                raise DomainError(f"transition ({q}, {s}) uses unknown symbols")
            if move not in ("L", "R"):
                raise DomainError(f"move must be L or R, got {move!r}")

    def __hash__(self):
        return hash((self.states, self.alphabet, self.start, self.halt0, self.halt1, self.to_text()))

    @property
    def halting(self) -> tuple[str, str]:
        return (self.halt0, self.halt1)

    @property
    def working(self) -> tuple[str, ...]:
        return tuple(q for q in self.states if q not in self.halting)

    def to_text(self) -> str:
        lines = [f"states {' '.join(self.states)}", f"alphabet {' '.join(self.alphabet)}",
                 f"start {self.start}", f"halt0 {self.halt0}", f"halt1 {self.halt1}"]
        for (q, s), (q2, s2, move) in sorted(self.transitions.items()):
            lines.append(f"trans {q} {s} {q2} {s2} {move}")
        return "\n".join(lines) + "\n"


def parse_machine(text: str, name: str = "machine") -> TuringMachine:
    """Read a machine description (``states``, ``alphabet``, ``start``, ``halt0``, ``halt1``, ``trans`` lines)."""
    fields: dict[str, list[str]] = {}
    trans = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        key, args = toks[0], toks[1:]
        if key == "trans":
            if len(args) != 5:
                raise ParseError("trans takes <q> <sym> <q'> <sym'> <L|R>", lineno, 1)
            trans[(args[0], args[1])] = (args[2], args[3], args[4])
        elif key in ("states", "alphabet"):
            if not args:
                raise ParseError(f"{key} needs at least one entry", lineno, 1)
            fields[key] = args
        elif key in ("start", "halt0", "halt1"):
            if len(args) != 1:
                raise ParseError(f"{key} takes one state", lineno, 1)
            fields[key] = args
        else:
            raise ParseError(f"unknown record {key!r}", lineno, 1)
    for key in ("states", "alphabet"):
        if key not in fields:
            raise ParseError(f"missing {key!r} record")
    try:
        return TuringMachine(
            tuple(fields["states"]), tuple(fields["alphabet"]), trans,
            start=fields.get("start", [""])[0], halt0=fields.get("halt0", ["h0"])[0],
            halt1=fields.get("halt1", ["h1"])[0], name=name)
    except DomainError as exc:
        raise ParseError(str(exc)) from None


def example_machines() -> dict[str, TuringMachine]:
    """Three small machines used by the tests and the CLI."""
    halt = TuringMachine(("s", "h0", "h1"), ("_", "1"),
                         {("s", "_"): ("h1", "_", "R"), ("s", "1"): ("h1", "1", "R")}, "s", name="halt_immediately")
    eraser = TuringMachine(("s", "h0", "h1"), ("_", "1"),
                           {("s", "1"): ("s", "_", "R"), ("s", "_"): ("h0", "_", "R")}, "s", name="eraser")
    parity = TuringMachine(("e", "o", "h0", "h1"), ("_", "1"),
                           {("e", "1"): ("o", "1", "R"), ("o", "1"): ("e", "1", "R"),
                            ("e", "_"): ("h0", "_", "R"), ("o", "_"): ("h1", "_", "R")}, "e", name="parity")
    return {m.name: m for m in (halt, eraser, parity)}


# -- system-state codec -----------------------------------------------------------------


@dataclass(frozen=True)
class SystemStateCodec:
    """Bijection between {2..B} and (tape, head, working state) on a tape of length T.

    States are ordered lexicographically by tape (first cell most
    significant, symbols in alphabet order), then head position, then state
    in declaration order.
    """

    machine: TuringMachine
    tape_len: int

    def __post_init__(self):
        if self.tape_len < 1:
            raise DomainError("tape length must be positive")

    @property
    def count(self) -> int:
        return len(self.machine.alphabet) ** self.tape_len * self.tape_len * len(self.machine.working)

    @property
    def bound(self) -> int:
        return 1 + self.count

    def encode(self, tape: Sequence[str], head: int, state: str) -> int:
        m = self.machine
        if len(tape) != self.tape_len or not 0 <= head < self.tape_len or state not in m.working:
            raise CodecRangeError("system state outside the codec")
        rank = 0
        for s in tape:
            rank = rank * len(m.alphabet) + m.alphabet.index(s)
        return 2 + (rank * self.tape_len + head) * len(m.working) + m.working.index(state)

    def decode(self, index: int) -> tuple[tuple[str, ...], int, str]:
        if not 2 <= index <= self.bound:
            raise CodecRangeError(f"index {index} outside 2..{self.bound}")
        m = self.machine
        rest, q = divmod(index - 2, len(m.working))
        rank, head = divmod(rest, self.tape_len)
        tape = []
        for _ in range(self.tape_len):
            rank, s = divmod(rank, len(m.alphabet))
            tape.append(m.alphabet[s])
        return tuple(reversed(tape)), head, m.working[q]

    def initial(self, word: Sequence[str] = ()) -> int:
        word = list(word)
        if len(word) > self.tape_len:
            raise CodecRangeError("input word longer than the tape")
        tape = word + [self.machine.alphabet[0]] * (self.tape_len - len(word))
        return self.encode(tape, 0, self.machine.start)

    def blob(self) -> bytes:
        return lp(self.machine.to_text().encode()) + varint(self.tape_len)


@lru_cache(maxsize=1024)
def codec_from_blob(blob: bytes) -> SystemStateCodec:
    r = Reader(blob)
    try:
        text = r.lp().decode()
    except UnicodeDecodeError:
        raise ParseError("machine text is not UTF-8") from None
    tape_len = r.varint()
    r.finish()
    try:
        return SystemStateCodec(parse_machine(text), tape_len)
    except DomainError as exc:
        raise ParseError(str(exc)) from None


def fm(machine_or_codec, i: int, codec: SystemStateCodec | None = None) -> int:
    """One machine step on the state numbered ``i``; 0 and 1 are fixed points."""
    codec = codec or machine_or_codec
    if i in (0, 1):
        return i
    tape, head, state = codec.decode(i)
    m = codec.machine
    q2, s2, move = m.transitions[(state, tape[head])]
    if q2 == m.halt0:
        return 0
    if q2 == m.halt1:
        return 1
    tape = list(tape)
    tape[head] = s2
    if move == "L":
        head = max(0, head - 1)
    else:
        head += 1
        if head >= codec.tape_len:
            raise CodecRangeError("head ran off the bounded tape")
    return codec.encode(tape, head, q2)


def iterate(codec: SystemStateCodec, a: int, k: int) -> int:
    """fm applied k times, shortcutting fixed points and cycles."""
    seen: dict[int, int] = {}
    x, i = a, 0
    while i < k:
        if x in (0, 1):
            return x
        if x in seen:
            period = i - seen[x]
            for _ in range((k - i) % period):
                x = fm(codec, x)
            return x
        seen[x] = i
        x = fm(codec, x)
        i += 1
    return x


def orbit(codec: SystemStateCodec, a: int, k: int) -> list[int]:
    """[a, fm(a), ..., fm^k(a)]."""
    out = [a]
    for _ in range(k):
        out.append(fm(codec, out[-1]))
    return out


# -- gadget inputs ------------------------------------------------------------------------


@dataclass(frozen=True)
class GadgetInput:
    kind: int
    side: int
    l1: int
    l2: int
    machine: bytes = b""
    f: int = 0
    a: int = 0
    b: int = 0

    def encode(self) -> bytes:
        out = bytes([self.kind, self.side, self.l1, self.l2])
        if self.kind == PIVOT:
            return out + lp(self.machine) + varint(self.a) + varint(self.b)
        if self.kind == LEAF:
            return out + lp(self.machine) + varint(self.f)
        return out


@lru_cache(maxsize=100_000)
def decode_gadget_input(data: bytes) -> GadgetInput:
    r = Reader(data)
    kind, side, l1, l2 = r.byte(), r.byte(), r.byte(), r.byte()
    if kind not in (PIVOT, LEAF, INNER) or l1 > 2 or l2 > 2:
        raise ParseError("bad kind or label")
    if (kind == PIVOT) != (side == NONE) or side > RIGHT:
        raise ParseError("bad side marker")
    if kind == PIVOT:
        machine = r.lp()
        a, b = r.varint(), r.varint()
        r.finish()
        return GadgetInput(kind, side, l1, l2, machine, a=a, b=b)
    if kind == LEAF:
        machine = r.lp()
        f = r.varint()
        r.finish()
        return GadgetInput(kind, side, l1, l2, machine, f=f)
    r.finish()
    return GadgetInput(kind, side, l1, l2)


def _try_input(data: bytes) -> GadgetInput | None:
    try:
        return decode_gadget_input(data)
    except ParseError:
        return None


def _is_power_of_two(k: int) -> bool:
    return k >= 1 and k & (k - 1) == 0


def iter_instance(machine: TuringMachine, a: int, b: int, len_l: int, len_r: int,
                  codec: SystemStateCodec, strict: bool = True) -> Configuration:
    """Build the gadget for (M, a, b) with |L| = len_l and |R| = len_r.

    With ``strict`` the extremity values must lie in {0, 1} (so the result
    is in ITER-minus); pass ``strict=False`` to build instances whose ends
    are still running.
    """
    if codec.machine != machine:
        raise DomainError("codec belongs to a different machine")
    if not (_is_power_of_two(len_l) and _is_power_of_two(len_r)):
        raise DomainError("path lengths must be powers of two")
    blob = codec.blob()
    inputs: list[bytes] = [GadgetInput(PIVOT, NONE, 0, 0, blob, a=a, b=b).encode()]
    edges: list[tuple[int, int]] = []
    for side, start, count in ((LEFT, a, len_l), (RIGHT, b, len_r)):
        values = orbit(codec, start, count)
        if strict and values[-1] not in (0, 1):
            raise DomainError(f"extremity value {values[-1]} is not 0 or 1")
        levels: list[list[int]] = []
        width, height = count, 0
        while width >= 1:
            level = []
            for j in range(width):
                level.append(len(inputs))
                if height == 0:
                    inputs.append(GadgetInput(LEAF, side, (j + 1) % 3, 0, blob, f=values[j + 1]).encode())
                else:
                    inputs.append(GadgetInput(INNER, side, j % 3, height % 3).encode())
            for j in range(width - 1):
                edges.append((level[j], level[j + 1]))
            if height > 0:
                below = levels[-1]
                for j, v in enumerate(level):
                    edges += [(v, below[2 * j]), (v, below[2 * j + 1])]
            levels.append(level)
            if width == 1:
                break
            width //= 2
            height += 1
        edges.append((0, levels[0][0]))
    return Configuration(Graph(len(inputs), edges), tuple(inputs))


# -- global predicates ----------------------------------------------------------------------


def _extremities(config: Configuration) -> tuple[int, int] | None:
    """Extremity values if the configuration is exactly a gadget built by :func:`iter_instance`."""
    parsed = [_try_input(x) for x in config.inputs]
    if any(p is None for p in parsed):
        return None
    pivots = [p for p in parsed if p.kind == PIVOT]
    if len(pivots) != 1:
        return None
    pivot = pivots[0]
    try:
        codec = codec_from_blob(pivot.machine)
    except ParseError:
        return None
    len_l = sum(1 for p in parsed if p.kind == LEAF and p.side == LEFT)
    len_r = sum(1 for p in parsed if p.kind == LEAF and p.side == RIGHT)
    try:
        expected = iter_instance(codec.machine, pivot.a, pivot.b, len_l, len_r, codec, strict=False)
        ends = (iterate(codec, pivot.a, len_l), iterate(codec, pivot.b, len_r))
    except (DomainError, CodecRangeError):
        return None
    if expected.n != config.n or expected.code() != config.code():
        return None
    return ends


def iter_minus_check(config: Configuration) -> bool:
    ends = _extremities(config)
    return ends is not None and ends[0] in (0, 1) and ends[1] in (0, 1)


def iter_check(config: Configuration) -> bool:
    ends = _extremities(config)
    return ends is not None and ends[0] in (0, 1) and ends[1] in (0, 1) and 0 in ends


ITER_MINUS = register(Language("iter_minus", iter_minus_check))
ITER = register(Language("iter", iter_check))


# -- local rules ---------------------------------------------------------------------------------


def _local_ok(view: BallView) -> bool:
    me = _try_input(view.x())
    if me is None:
        return False
    nbrs = []
    for w in view.neighbors():
        o = _try_input(view.x(w))
        if o is None:
            return False
        nbrs.append(o)
    if me.kind == PIVOT:
        return _pivot_ok(me, nbrs)
    return _tree_node_ok(me, nbrs)


def _pivot_ok(me: GadgetInput, nbrs: list[GadgetInput]) -> bool:
    if (me.l1, me.l2) != (0, 0) or len(nbrs) != 2:
        return False
    try:
        codec_from_blob(me.machine)
    except ParseError:
        return False
    if sorted(o.side for o in nbrs) != [LEFT, RIGHT]:
        return False
    return all(o.kind == LEAF and (o.l1, o.l2) == (1, 0) for o in nbrs)


def _tree_node_ok(me: GadgetInput, nbrs: list[GadgetInput]) -> bool:
    if me.kind == LEAF and me.l2 != 0:
        return False
    pivot_side, away, parent, children = [], [], [], []
    for o in nbrs:
        if o.kind == PIVOT:
            if me.kind != LEAF:
                return False
            pivot_side.append(o)
        elif o.side != me.side:
            return False
        elif o.kind == me.kind and o.l2 == me.l2:
            if o.l1 == (me.l1 - 1) % 3:
                pivot_side.append(o)
            elif o.l1 == (me.l1 + 1) % 3:
                away.append(o)
            else:
                return False
        elif o.kind == INNER and o.l2 == (me.l2 + 1) % 3:
            parent.append(o)
        elif me.kind == INNER and o.l2 == (me.l2 - 1) % 3:
            children.append(o)
        else:
            return False
    if len(pivot_side) > 1 or len(away) > 1 or len(parent) > 1:
        return False
    horizontal = [o for o in pivot_side + away if o.kind != PIVOT]
    if bool(parent) != bool(horizontal):
        return False
    p = parent[0] if parent else None

    if me.kind == INNER:
        if len(children) != 2 or children[0].kind != children[1].kind:
            return False
        offset = 1 if children[0].kind == LEAF else 0
        want = {(2 * me.l1 + offset) % 3, (2 * me.l1 + offset + 1) % 3}
        if {c.l1 for c in children} != want:
            return False
        if not pivot_side and me.l1 != 0:
            return False
    else:
        if len(pivot_side) != 1:
            return False
        if pivot_side[0].kind == PIVOT and me.l1 != 1:
            return False

    offset = 1 if me.kind == LEAF else 0
    if p is not None:
        first = (2 * p.l1 + offset) % 3
        if me.l1 == first:
            if not away:
                return False
        elif me.l1 == (first + 1) % 3:
            if not horizontal or not pivot_side or pivot_side[0].kind == PIVOT:
                return False
        else:
            return False
        if pivot_side and pivot_side[0].kind == PIVOT and p.l1 != 0:
            return False
        if me.kind == INNER and not pivot_side and p.l1 != 0:
            return False
        if not away:
            # far end of a level with at least two nodes
            if me.kind == INNER and me.l1 not in (0, 1):
                return False
            if me.kind == LEAF and (me.l1, p.l1) not in ((1, 1), (2, 0)):
                return False
    elif me.kind == LEAF and not away and me.l1 != 1:
        return False

    if me.kind == LEAF:
        return _leaf_value_ok(me, pivot_side[0], bool(away))
    return True


def _leaf_value_ok(me: GadgetInput, pred: GadgetInput, has_next: bool) -> bool:
    if me.machine != pred.machine:
        return False
    try:
        codec = codec_from_blob(me.machine)
    except ParseError:
        return False
    if pred.kind == PIVOT:
        source = pred.a if me.side == LEFT else pred.b
    else:
        source = pred.f
    try:
        if fm(codec, source) != me.f:
            return False
    except CodecRangeError:
        return False
    return has_next or me.f in (0, 1)


def iter_minus_local_checks() -> LocalAlgorithm:
    """Radius-1 rule set checking labels, degrees, and f-values against the predecessor."""
    return LocalAlgorithm(1, 0, _local_ok, name="iter_minus_local")


def iter_pi1_algorithm(codec: SystemStateCodec | None = None) -> LocalAlgorithm:
    """Local rules everywhere; the pivot also reads its certificate as a big-endian integer k
    and rejects iff fm^k(a) = fm^k(b) = 1."""

    def verdict(view: BallView) -> bool:
        if not _local_ok(view):
            return False
        me = decode_gadget_input(view.x())
        if me.kind != PIVOT:
            return True
        k = decode_uint(view.cert(0))
        cod = codec or codec_from_blob(me.machine)
        try:
            return not (iterate(cod, me.a, k) == 1 and iterate(cod, me.b, k) == 1)
        except CodecRangeError:
            return False

    return LocalAlgorithm(1, 1, verdict, name="iter_pi1")


# -- mutations -----------------------------------------------------------------------------------


@dataclass(frozen=True)
class Mutation:
    kind: str
    detail: tuple

    def apply(self, config: Configuration) -> Configuration:
        if self.kind == "edge":
            u, v = self.detail
            edges = set(config.graph.edges) ^ {(u, v)}
            return Configuration(Graph(config.n, edges), config.inputs)
        u, data = self.detail
        inputs = list(config.inputs)
        inputs[u] = data
        return config.with_inputs(inputs)


def _field_variants(p: GadgetInput) -> Iterator[GadgetInput]:
    for l1 in range(3):
        if l1 != p.l1:
            yield replace(p, l1=l1)
    for l2 in range(3):
        if l2 != p.l2:
            yield replace(p, l2=l2)
    if p.kind != PIVOT:
        yield replace(p, side=LEFT if p.side == RIGHT else RIGHT)
    if p.kind == LEAF:
        for f in sorted({0, 1, 2, 3, p.f + 1, max(p.f - 1, 0)} - {p.f}):
            yield replace(p, f=f)
        yield replace(p, kind=INNER, machine=b"", f=0)
    if p.kind == INNER:
        yield replace(p, kind=LEAF, machine=b"", f=0)


def single_mutations(config: Configuration) -> list[Mutation]:
    """Every label / f-value change and every connectivity-preserving edge flip.

    Labels are kind, side, l1 and l2.  The pivot's a and b are not mutated:
    replacing them by another index with the same image yields a different
    legal gadget rather than a corrupted one.
    """
    out = []
    for u, x in enumerate(config.inputs):
        p = _try_input(x)
        if p is None:
            continue
        for q in _field_variants(p):
            out.append(Mutation("label", (u, q.encode())))
    for u, v in combinations(range(config.n), 2):
        edges = set(config.graph.edges) ^ {(u, v)}
        if Graph(config.n, edges, check_connected=False).is_connected():
            out.append(Mutation("edge", (u, v)))
    return out


def random_mutations(config: Configuration, count: int, seed: int = 0) -> list[Mutation]:
    """``count`` mutations drawn uniformly (with replacement) from :func:`single_mutations`."""
    pool = single_mutations(config)
    rng = random.Random(seed)
    return [rng.choice(pool) for _ in range(count)]

"""Line-oriented instance files.

::

    # comment
    n 4
    e 0 1
    x 0 01          # hex input, omitted entries default to the empty string
    id 0 7          # optional identity
    c 0 2 0a0b      # certificate level 0, node 2
    v 0 1 1,0       # voltage permutation on edge (0, 1), for the lift command

Serialization is canonical (sorted records, lower-case hex), so parsing a
serialized instance and serializing it again is byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Configuration, Graph
from .errors import DomainError, ParseError


@dataclass
class Instance:
    config: Configuration
    ids: tuple[int, ...] | None = None
    certs: dict[int, tuple[bytes, ...]] = field(default_factory=dict)
    voltages: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)

    def cert_levels(self) -> list[tuple[bytes, ...]]:
        if not self.certs:
            return []
        top = max(self.certs)
        return [self.certs.get(level, (b"",) * self.config.n) for level in range(top + 1)]


def _int(tok: str, line: int, col: int) -> int:
    try:
        value = int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", line, col) from None
    if value < 0:
        raise ParseError(f"expected a non-negative integer, got {tok!r}", line, col)
    return value


def _hex(tok: str, line: int, col: int) -> bytes:
    if tok == "-":
        return b""
    try:
        return bytes.fromhex(tok)
    except ValueError:
        raise ParseError(f"bad hex string {tok!r}", line, col) from None


def parse(text: str) -> Instance:
    n = None
    edges: list[tuple[int, int]] = []
    inputs: dict[int, bytes] = {}
    ids: dict[int, int] = {}
    certs: dict[int, dict[int, bytes]] = {}
    voltages: dict[tuple[int, int], tuple[int, ...]] = {}

    def node(tok: str, line: int, col: int) -> int:
        u = _int(tok, line, col)
        if n is None:
            raise ParseError("node referenced before the 'n' record", line, col)
        if u >= n:
            raise ParseError(f"node {u} out of range (n={n})", line, col)
        return u

    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks = body.split()
        if not toks:
            continue
        cols = []
        pos = 0
        for tok in toks:
            pos = body.index(tok, pos)
            cols.append(pos + 1)
            pos += len(tok)
        kind, args = toks[0], toks[1:]
        expect = {"n": 1, "e": 2, "x": 2, "id": 2, "c": 3, "v": 3}.get(kind)
        if expect is None:
            raise ParseError(f"unknown record {kind!r}", lineno, cols[0])
        if len(args) != expect:
            raise ParseError(f"record {kind!r} takes {expect} fields, got {len(args)}", lineno, cols[0])
        if kind == "n":
            if n is not None:
                raise ParseError("duplicate 'n' record", lineno, cols[0])
            n = _int(args[0], lineno, cols[1])
            if n < 1:
                raise ParseError("n must be positive", lineno, cols[1])
        elif kind == "e":
            edges.append((node(args[0], lineno, cols[1]), node(args[1], lineno, cols[2])))
        elif kind == "x":
            inputs[node(args[0], lineno, cols[1])] = _hex(args[1], lineno, cols[2])
        elif kind == "id":
            ids[node(args[0], lineno, cols[1])] = _int(args[1], lineno, cols[2])
        elif kind == "c":
            level = _int(args[0], lineno, cols[1])
            certs.setdefault(level, {})[node(args[1], lineno, cols[2])] = _hex(args[2], lineno, cols[3])
        elif kind == "v":
            a, b = node(args[0], lineno, cols[1]), node(args[1], lineno, cols[2])
            try:
                perm = tuple(int(p) for p in args[2].split(","))
            except ValueError:
                raise ParseError(f"bad permutation {args[2]!r}", lineno, cols[3]) from None
            if sorted(perm) != list(range(len(perm))):
                raise ParseError(f"{args[2]!r} is not a permutation", lineno, cols[3])
            if a > b:
                inv = [0] * len(perm)
                for i, p in enumerate(perm):
                    inv[p] = i
                a, b, perm = b, a, tuple(inv)
            voltages[(a, b)] = perm
    if n is None:
        raise ParseError("missing 'n' record")
    try:
        graph = Graph(n, edges)
    except DomainError as exc:
        raise ParseError(str(exc)) from None
    config = Configuration(graph, tuple(inputs.get(u, b"") for u in range(n)))
    id_tuple = None
    if ids:
        if len(ids) != n:
            raise ParseError("identities must be given for every node or none")
        id_tuple = tuple(ids[u] for u in range(n))
        if len(set(id_tuple)) != n:
            raise ParseError("identities must be distinct")
    cert_levels = {lvl: tuple(m.get(u, b"") for u in range(n)) for lvl, m in certs.items()}
    return Instance(config, id_tuple, cert_levels, voltages)


def serialize(inst: Instance | Configuration) -> str:
    if isinstance(inst, Configuration):
        inst = Instance(inst)
    cfg = inst.config
    lines = [f"n {cfg.n}"]
    lines += [f"e {u} {v}" for u, v in sorted(cfg.graph.edges)]
    lines += [f"x {u} {cfg.inputs[u].hex() or '-'}" for u in range(cfg.n) if cfg.inputs[u]]
    if inst.ids is not None:
        lines += [f"id {u} {i}" for u, i in enumerate(inst.ids)]
    for level in sorted(inst.certs):
        lines += [f"c {level} {u} {c.hex() or '-'}" for u, c in enumerate(inst.certs[level])]
    for (a, b), perm in sorted(inst.voltages.items()):
        lines.append(f"v {a} {b} {','.join(map(str, perm))}")
    return "\n".join(lines) + "\n"


def load(path: str) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())

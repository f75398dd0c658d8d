"""Local reductions, label preservation, the MISS reduction and the MISS-lift scheme."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .core import BallView, Configuration, LocalAlgorithm, ball
from .encoding import bit_length
from .errors import DomainError, Inconclusive, ParseError
from .lifts import lift_closure_membership
from .pi2 import (DescriptionCert, honest_description, local_mismatch, locally_inconsistent, try_description,
                  verify_pi2)
from .zoo import (MISS, MISS_LIFT, Language, LazyFamily, decode_miss_input, encode_miss_input, md_from_config,
                  value_of)


@dataclass(frozen=True)
class LocalReduction:
    """Radius-``radius`` map from a view (identities visible) to the new input y(u)."""

    radius: int
    output: Callable[[BallView], bytes]
    name: str = "reduction"


def apply_reduction(red: LocalReduction, config: Configuration, ids: Sequence[int] | None) -> Configuration:
    return config.with_inputs([red.output(ball(config, ids, (), u, red.radius)) for u in range(config.n)])


IDENTITY = LocalReduction(0, lambda view: view.x(), "identity")


def width(identity: int, x: bytes) -> int:
    """omega(u) = 2^(|id(u)| + |x(u)|) with |.| the binary length of the value (|0| = 1)."""
    return 2 ** (bit_length(identity) + bit_length(value_of(x)))


def miss_reduction(lang: Language, materialize: bool = False) -> LocalReduction:
    """y(u) = (F(u), x(u)) where F(u) holds the illegal configurations of width <= omega(u).

    F(u) is stored as a lazy descriptor; with ``materialize`` it is expanded
    into an explicit list whenever omega(u) <= 4.
    """

    def output(view: BallView) -> bytes:
        omega = width(view.id(), view.x())
        family = LazyFamily(lang.name, omega)
        if materialize and omega <= 4:
            family = family.materialize()
        return encode_miss_input(family, view.x())

    return LocalReduction(0, output, f"miss[{lang.name}]")


def miss_projection(x: bytes) -> bytes:
    """x'(u) from a MISS input (raises ParseError on malformed input)."""
    return decode_miss_input(x)[1]


def check_label_preserving(red: LocalReduction, prover: Callable[[Configuration], Sequence[bytes]],
                           config: Configuration, id_pool: Sequence[Sequence[int]]) -> bool:
    """True iff the prover's certificates on the reduced instance agree for every identity assignment."""
    if not id_pool:
        raise DomainError("identity pool is empty")
    outputs = {tuple(prover(apply_reduction(red, config, ids))) for ids in id_pool}
    return len(outputs) == 1


def miss_prover(config: Configuration) -> tuple[bytes, ...]:
    """Honest description of (G, x'); ignores the families entirely."""
    return honest_description(config, miss_projection)


def _miss_flag1(view: BallView, desc: DescriptionCert) -> bool:
    described = desc.described()
    if described is None:
        return False
    try:
        family, _ = decode_miss_input(view.x())
    except ParseError:
        return False
    return not family.contains(described)


def miss_pi2_verifier() -> LocalAlgorithm:
    """The generic forall-exists verifier for MISS, reading descriptions of (G, x')."""
    return verify_pi2(MISS, miss_projection, _miss_flag1, name="pi2[miss]")


def compose(red: LocalReduction, alg: LocalAlgorithm) -> LocalAlgorithm:
    """Run ``alg`` on the reduced instance: radius red.radius + alg.radius, identities visible."""
    r1, r2 = red.radius, alg.radius

    def verdict(view: BallView) -> bool:
        inner = view.subview(view.center, r2)
        y = {v: red.output(view.subview(v, r1)) for v in inner.nodes}
        reduced = BallView(view.center, r2, inner._s, y, view._ids if alg.uses_ids else None, view._certs)
        return alg.verdict(reduced)

    return LocalAlgorithm(r1 + r2, alg.arity, verdict, name=f"{alg.name}o{red.name}", uses_ids=True)


# -- MISS-lift scheme ---------------------------------------------------------------


def miss_lift_prover(config: Configuration) -> tuple[bytes, ...]:
    if not MISS_LIFT(config):
        raise DomainError("miss_lift prover needs a member of the language")
    return honest_description(config, miss_projection)


def miss_lift_verdict(view: BallView, budget: int | None = None) -> bool:
    try:
        family, _ = decode_miss_input(view.x())
    except ParseError:
        return False
    desc = try_description(view.cert(0))
    if desc is None or locally_inconsistent(view, miss_projection):
        return False
    if local_mismatch(view, miss_projection):
        return False
    described = desc.described()
    if described is None:
        return False
    try:
        return not lift_closure_membership(described, family, budget)
    except Inconclusive:
        return False


def miss_lift_verifier(budget: int | None = 100_000) -> LocalAlgorithm:
    """Radius 1: the description must fit the neighborhood, then (M, data) must avoid F(u) lifted."""
    return LocalAlgorithm(1, 1, lambda view: miss_lift_verdict(view, budget), name="miss_lift")


# -- illustration: a reduction that leaks identities ----------------------------------------


ID_LEAK = LocalReduction(0, lambda view: bit_length(view.id()).to_bytes(1, "big") + view.id().to_bytes(4, "big"),
                         "id_leak")


def echo_prover(config: Configuration) -> tuple[bytes, ...]:
    """Certificates that repeat each node's input."""
    return tuple(config.inputs)


def description_blocks(config: Configuration, max_m: int, project=miss_projection) -> list:
    """Every description (M, data) with m <= max_m, as per-node index choices.

    Descriptions range over connected M up to isomorphism with data drawn
    from the projected inputs (any other value never matches a node).  A
    node keeps index i only when data[i] equals its projected input and
    M gives i as many neighbors as the node has; otherwise the radius-1
    check rejects whatever the neighbors hold.
    """
    from .corpus import all_configurations
    from .games import CertificateSpace

    own = []
    for x in config.inputs:
        try:
            own.append(project(x))
        except ParseError:
            own.append(None)
    alphabet = sorted({x for x in own if x is not None})
    blocks = []
    if not alphabet:
        return blocks
    for described in all_configurations(max_m, alphabet):
        order, _ = described.canonical()
        matrix, data = md_from_config(described, order)
        degrees = [sum(row) for row in matrix]
        per_node = []
        for u in range(config.n):
            deg = config.graph.degree(u)
            per_node.append(tuple(DescriptionCert(matrix, data, i + 1).encode()
                                  for i in range(len(matrix)) if data[i] == own[u] and degrees[i] == deg))
        if all(per_node):
            blocks.append(CertificateSpace(lambda cfg, u, per_node=per_node: per_node[u], f"m={len(matrix)}"))
    return blocks

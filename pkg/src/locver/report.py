"""Desk-scale evidence for the class hierarchy, as sorted records."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

from .core import Configuration, cycle_graph, global_accept, run
from .corpus import all_configurations, graphs_up_to
from .encoding import FALSE, TOP, TRUE, BOT
from .errors import Inconclusive
from .fileformat import serialize
from .games import CertificateSpace, check_class_membership_on_instance
from .iteration import (SystemStateCodec, example_machines, iter_instance, iter_minus_check, iter_minus_local_checks,
                        iter_pi1_algorithm, random_mutations)
from .lifts import search_lift_counterexample
from .pi2 import honest_description, refutation_space, refute, verify_pi2
from .reductions import apply_reduction, check_label_preserving, miss_prover, miss_reduction
from .schemes import alts_prover, alts_space, alts_verifier, tree_prover, tree_space, tree_verifier
from .zoo import ALTS, AMOS, AND, EXTS, MISS, OR, TREE, co_ld_checker, diam, ld_checker

CAVEATS = (
    "Evidence is bounded: instances up to the stated size, finite certificate spaces, "
    "and a finite identity pool (injective maps from {1..n+2} up to automorphism). "
    "Membership claims are checked, not proved."
)

SUITES = ("hierarchy",)


@dataclass
class Record:
    language: str
    claim: str
    evidence: str  # exhaustive | witness | counterexample | inconclusive
    digest: str
    detail: str
    instances: int = 0
    seed: int | None = None
    bounds: str = ""
    runtime: float = field(default=0.0, compare=False)

    def key(self):
        return (self.language, self.claim, self.evidence, self.digest)

    def as_dict(self, with_runtime: bool = True) -> dict:
        d = asdict(self)
        if not with_runtime:
            d.pop("runtime")
        return d


def digest(configs) -> str:
    h = hashlib.sha256()
    for c in configs:
        h.update(serialize(c).encode())
        h.update(b"\x00")
    return h.hexdigest()[:16]


def _timed(fn: Callable[[], Record]) -> Record:
    start = time.perf_counter()
    try:
        rec = fn()
    except Inconclusive as exc:
        rec = Record("?", "?", "inconclusive", "-", f"{exc} {exc.stats}")
    rec.runtime = round(time.perf_counter() - start, 3)
    return rec


def _ld_agreement(name: str, lang, alg, corpus, mode="conjunctive") -> Record:
    corpus = list(corpus)
    bad = [c for c in corpus if global_accept(run(alg, c), mode) != lang(c)]
    evidence = "exhaustive" if not bad else "counterexample"
    claim = "co-LD" if mode == "disjunctive" else "LD"
    detail = f"checker agrees with membership on {len(corpus)} configurations" if not bad else \
        f"checker disagrees on {len(bad)} configurations"
    return Record(name, claim, evidence, digest(corpus), detail, len(corpus))


def _scheme_record(name: str, lang, prover, verifier, space, corpus) -> Record:
    corpus = list(corpus)
    members = [c for c in corpus if lang(c)]
    others = [c for c in corpus if not lang(c)]
    for c in members:
        if not all(run(verifier, c, None, [prover(c)]).values()):
            return Record(name, "NLD", "counterexample", digest([c]), "honest certificates rejected", 1)
    for c in others:
        verdict = check_class_membership_on_instance(verifier, c, "Sigma1", [space(c)], None, False)
        if not verdict:
            return Record(name, "NLD", "counterexample", digest([c]), "dishonest certificates accepted", 1)
    return Record(name, "NLD", "exhaustive", digest(corpus),
                  f"complete on {len(members)} members, sound on {len(others)} non-members", len(corpus))


def _lift_record(name: str, lang, config: Configuration) -> Record:
    found = search_lift_counterexample(lang, config, 1, 2, budget=10_000)
    if found is None:
        return Record(name, "not NLD", "inconclusive", digest([config]), "no lift counterexample within k <= 2", 1)
    lifted, _ = found
    return Record(name, "not NLD", "counterexample", digest([config, lifted]),
                  f"member on {config.n} nodes lifts to a non-member on {lifted.n} nodes", 2)


def _pi2_record(lang, corpus) -> Record:
    corpus = list(corpus)
    alg = verify_pi2(lang)
    checked = 0
    for c in corpus:
        c1 = honest_description(c)
        if lang(c):
            if not all(run(alg, c, None, [c1, refute(c, lang, c1)]).values()):
                return Record(lang.name, "Pi2", "counterexample", digest([c]), "refutation rejected", 1)
        else:
            space = refutation_space(c.graph.diameter(), c.n)
            describe = CertificateSpace(lambda cfg, u, c1=c1: (c1[u],), "honest")
            if not check_class_membership_on_instance(alg, c, "Pi2", [describe, space], None, False):
                return Record(lang.name, "Pi2", "counterexample", digest([c]), "refutation accepted", 1)
        checked += 1
    return Record(lang.name, "Pi2", "witness", digest(corpus),
                  f"honest descriptions refuted or confirmed on {checked} configurations", checked)


def _iter_record(seed: int) -> Record:
    machines = example_machines()
    m = machines["parity"]
    codec = SystemStateCodec(m, 4)
    legal = iter_instance(m, codec.initial(["1", "1"]), codec.initial(["1"]), 4, 2, codec)
    alg = iter_pi1_algorithm()
    k_max = 8
    space = CertificateSpace.uniform([k.to_bytes(1, "big") if k else b"" for k in range(k_max + 1)], "k<=8")
    if not check_class_membership_on_instance(alg, legal, "Pi1", [space], None, True):
        return Record("iter", "Pi1", "counterexample", digest([legal]), "legal instance rejected", 1)
    illegal = iter_instance(m, codec.initial(["1"]), codec.initial(["1", "1", "1"]), 4, 4, codec)
    if check_class_membership_on_instance(alg, illegal, "Pi1", [space], None, False):
        pass
    else:
        return Record("iter", "Pi1", "counterexample", digest([illegal]), "illegal instance accepted", 1)
    h = machines["halt_immediately"]
    hc = SystemStateCodec(h, 2)
    smallest = iter_instance(h, hc.initial(), hc.initial(), 1, 1, hc)
    local = iter_minus_local_checks()
    for mut in random_mutations(smallest, 200, seed):
        mutated = mut.apply(smallest)
        if iter_minus_check(mutated) or all(run(local, mutated).values()):
            return Record("iter", "Pi1", "counterexample", digest([mutated]), "mutation not detected", 1, seed)
    return Record("iter", "Pi1", "witness", digest([legal, illegal, smallest]),
                  "pivot rule consistent on legal/illegal gadgets; 200 mutations detected", 3, seed)


def _miss_record(max_n: int) -> Record:
    red = miss_reduction(AND)
    corpus = list(all_configurations(min(max_n, 3), [FALSE, TRUE]))
    pairs = 0
    for c in corpus:
        pool = [ids for ids in __import__("itertools").permutations(range(1, 4), c.n)]
        for ids in pool:
            if MISS(apply_reduction(red, c, ids)) != AND(c):
                return Record("miss", "reduction", "counterexample", digest([c]), f"ids {ids}", 1)
            pairs += 1
        if not check_label_preserving(red, miss_prover, c, pool):
            return Record("miss", "reduction", "counterexample", digest([c]), "certificates depend on ids", 1)
    return Record("miss", "reduction", "exhaustive", digest(corpus),
                  f"AND reduces to MISS with id-independent certificates on {pairs} (config, ids) pairs", pairs)


def hierarchy(max_n: int = 4, seed: int = 0) -> list[Record]:
    """Records for the desk-scale hierarchy; ``seed`` only drives the ITER mutation sample."""
    binary = lambda n: list(all_configurations(n, [FALSE, TRUE]))  # noqa: E731
    selection = lambda n: list(all_configurations(n, [BOT, TOP]))  # noqa: E731
    small = min(max_n, 4)
    jobs = [
        lambda: _ld_agreement("and", AND, ld_checker("and"), binary(max_n)),
        lambda: _ld_agreement("or", OR, co_ld_checker("or"), binary(max_n), "disjunctive"),
        lambda: _ld_agreement("diam_2", diam(2), ld_checker("diam_2"), graphs_as_configs(max_n)),
        lambda: _scheme_record("alts", ALTS, alts_prover, alts_verifier(), lambda c: alts_space(c.graph.diameter()),
                               selection(small)),
        lambda: _scheme_record("tree", TREE, tree_prover, tree_verifier(), lambda c: tree_space(c.n),
                               graphs_as_configs(small)),
        lambda: _lift_record("amos", AMOS, Configuration(cycle_graph(3), (TOP, BOT, BOT))),
        lambda: _lift_record("exts", EXTS, Configuration(cycle_graph(3), (TOP, TOP, BOT))),
        lambda: _pi2_record(EXTS, [c for c in selection(min(max_n, 3))]),
        lambda: _iter_record(seed),
        lambda: _miss_record(max_n),
    ]
    records = [_timed(job) for job in jobs]
    for r in records:
        r.bounds = f"suite=hierarchy max_n={max_n}"
    return sorted(records, key=Record.key)


def graphs_as_configs(max_n: int) -> list[Configuration]:
    return [Configuration.uniform(g) for g in graphs_up_to(max_n)]


def run_suite(name: str, max_n: int = 4, seed: int = 0) -> list[Record]:
    if name == "hierarchy":
        return hierarchy(max_n, seed)
    raise ValueError(f"unknown suite {name!r}")


def render_json(records: list[Record], with_runtime: bool = True) -> str:
    lines = [json.dumps({"caveats": CAVEATS}, sort_keys=True)]
    lines += [json.dumps(r.as_dict(with_runtime), sort_keys=True) for r in records]
    return "\n".join(lines) + "\n"


def render_table(records: list[Record]) -> str:
    header = f"{'language':<10} {'claim':<10} {'evidence':<15} {'digest':<17} {'n':>6} {'secs':>7}  detail"
    lines = [f"# {CAVEATS}", header, "-" * len(header)]
    for r in records:
        lines.append(f"{r.language:<10} {r.claim:<10} {r.evidence:<15} {r.digest:<17} {r.instances:>6} "
                     f"{r.runtime:>7.2f}  {r.detail}")
    return "\n".join(lines) + "\n"

"""Acceptance criteria, one test per criterion.

Each test prints a pass/fail line; the conftest hook repeats them in the
terminal summary.
"""

import itertools
import math
import random
import time

import numpy as np
import pytest

from locver.core import Configuration, cycle_graph, path_graph, complete_graph, run
from locver.corpus import all_configurations, configurations, connected_graphs, default_id_pool, graphs_up_to
from locver.encoding import BOT, FALSE, TOP, TRUE
from locver.errors import CodecRangeError
from locver.games import CertificateSpace, check_class_membership_on_instance, exists_accepting_in_blocks, view_decider
from locver.iteration import (SystemStateCodec, example_machines, fm, iter_check, iter_instance, iter_minus_check,
                              iter_minus_local_checks, iter_pi1_algorithm, random_mutations)
from locver.lifts import connected_covers, pull_back, search_lift_counterexample
from locver.pi2 import accepted_refutation, adversary_descriptions, honest_description, refute, verify_pi2
from locver.reductions import (apply_reduction, description_blocks, miss_lift_prover, miss_lift_verifier,
                               miss_projection, miss_prover, miss_reduction, check_label_preserving)
from locver.schemes import (alts_prover, alts_space, alts_verifier, cover_blocks, cover_cert_bits, cover_prover,
                            cover_universe, cover_verifier, tree_prover, tree_verifier)
from locver.zoo import ALTS, AMOS, AND, COVER, EXTS, MISS, MISS_LIFT, TREE, ExplicitFamily, encode_cover_input, \
    encode_miss_input

COVER_SIZE_CONSTANT = 16


def report(number, ok, detail):
    print(f"criterion {number} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def legal_pi2_grid():
    grid = [(EXTS, c, (BOT, TOP)) for c in all_configurations(5, [BOT, TOP]) if EXTS(c)]
    grid += [(TREE, Configuration.uniform(g), (b"",)) for g in graphs_up_to(5) if TREE(Configuration.uniform(g))]
    return grid


def illegal_pi2_grid():
    grid = [(EXTS, c) for c in all_configurations(5, [BOT, TOP]) if not EXTS(c)]
    grid += [(TREE, Configuration.uniform(g)) for g in graphs_up_to(5) if not TREE(Configuration.uniform(g))]
    return grid


@pytest.mark.criterion(1, "forall-exists protocol, legal branch (n <= 5, adversarial c1 with m <= 6)")
def test_criterion_1_pi2_legal_branch():
    checked = pooled = 0
    failures = []
    for lang, config, alphabet in legal_pi2_grid():
        alg = verify_pi2(lang)
        assert not alg.uses_ids  # identities never reach the verdict
        pool = default_id_pool(config)
        for k, c1 in enumerate(adversary_descriptions(config, alphabet)):
            c2 = refute(config, lang, c1)
            checked += 1
            id_list = pool if k < 2 else [None]
            pooled += len(id_list) if k < 2 else 0
            for ids in id_list:
                if not all(run(alg, config, ids, [c1, c2]).values()):
                    failures.append((config, c1, ids))
    report(1, not failures, f"{checked} (config, c1) pairs accepted, {pooled} replays under the default id pool; "
                            f"{len(failures)} failures")


@pytest.mark.criterion(2, "forall-exists protocol, illegal branch (every bounded c2 rejected)")
def test_criterion_2_pi2_illegal_branch():
    failures = []
    evals = 0
    grid = illegal_pi2_grid()
    for lang, config in grid:
        c1 = honest_description(config)
        found, stats = accepted_refutation(verify_pi2(lang), config, c1, config.graph.diameter(), config.n)
        evals += stats["verdict_evaluations"]
        if found is not None:
            failures.append((config, found))
    report(2, not failures, f"{len(grid)} illegal instances, {evals} verdict evaluations, {len(failures)} accepted c2")


def _transport_ok(alg, config, certs, k):
    base = run(alg, config, None, certs)
    for cover, phi in connected_covers(config.graph, k):
        lifted = Configuration(cover, tuple(config.inputs[p] for p in phi))
        verdicts = run(alg, lifted, None, [pull_back(c, phi) for c in certs])
        if any(verdicts[u] != base[phi[u]] for u in range(cover.n)):
            return False
    return True


def _random_certs(space, config, rng):
    return tuple(rng.choice(space.choices(config, u)) for u in range(config.n))


@pytest.mark.criterion(3, "certificate transport along 2- and 3-fold covers of C3..C5")
def test_criterion_3_lift_transport():
    rng = random.Random(3)
    cases = 0
    bad = []
    cycles = [cycle_graph(n) for n in (3, 4, 5)]
    elements = (b"a", b"b")
    for g in cycles:
        # TREE has no legal cycle; its honest certificates have nothing to transport
        assert not any(TREE(c) for c in configurations(g, [b""]))
        jobs = []
        for c in configurations(g, [BOT, TOP]):
            if ALTS(c):
                space = alts_space(g.n)
                jobs.append((alts_verifier(), c, [alts_prover(c)]))
                jobs += [(alts_verifier(), c, [_random_certs(space, c, rng)]) for _ in range(2)]
            if EXTS(c):
                c1 = honest_description(c)
                jobs.append((verify_pi2(EXTS), c, [c1, refute(c, EXTS, c1)]))
                bogus = next(iter(adversary_descriptions(c, (BOT, TOP), max_maps=4, seed=1)))
                jobs.append((verify_pi2(EXTS), c, [bogus, refute(c, EXTS, bogus)]))
        for es in itertools.product(elements, repeat=g.n):
            owner = (tuple(sorted(set(es))),)
            inputs = [encode_cover_input(owner if u == 0 else [()], es[u]) for u in range(g.n)]
            c = Configuration(g, tuple(inputs))
            assert COVER(c)
            honest = cover_prover(c)
            jobs.append((cover_verifier(), c, [honest]))
            jobs.append((cover_verifier(), c, [tuple(reversed(honest))]))
        for alg, c, certs in jobs:
            for k in (2, 3):
                cases += 1
                if not _transport_ok(alg, c, certs, k):
                    bad.append((alg.name, c, k))
    report(3, not bad, f"{cases} (scheme, instance, k) cases, verdicts transported exactly; {len(bad)} mismatches")


@pytest.mark.criterion(4, "lift counterexamples for AMOS/EXTS; none for ALTS/TREE (n <= 5, k <= 3)")
def test_criterion_4_lift_evidence():
    timings = {}
    for lang, inputs in ((AMOS, (TOP, BOT, BOT)), (EXTS, (TOP, TOP, BOT))):
        c = Configuration(cycle_graph(3), inputs)
        start = time.perf_counter()
        found = search_lift_counterexample(lang, c, 1, 2)
        timings[lang.name] = time.perf_counter() - start
        assert found is not None and found[0].n == 6 and not lang(found[0])
    searched = 0
    for c in all_configurations(5, [BOT, TOP]):
        if ALTS(c):
            assert search_lift_counterexample(ALTS, c, 1, 3) is None
            searched += 1
    for g in graphs_up_to(5):
        c = Configuration.uniform(g)
        if TREE(c):
            assert search_lift_counterexample(TREE, c, 1, 3) is None
            searched += 1
    fast = all(t < 1.0 for t in timings.values())
    report(4, fast, f"AMOS {timings['amos']:.3f}s, EXTS {timings['exts']:.3f}s; "
                    f"{searched} ALTS/TREE members without counterexample")


def _tree_oracle_accepts(g):
    """numpy brute force: does any counter vector in {0..n}^n pass every node's rule?"""
    n = g.n
    counters = np.array(list(itertools.product(range(n + 1), repeat=n)), dtype=np.int16)
    ok = np.ones(len(counters), dtype=bool)
    for u in range(n):
        cu = counters[:, u]
        nbrs = sorted(g.adj[u])
        diffs = np.stack([np.abs(counters[:, w] - cu) for w in nbrs], axis=1)
        smaller = np.stack([counters[:, w] == cu - 1 for w in nbrs], axis=1).sum(axis=1)
        ok &= (diffs == 1).all(axis=1) & np.where(cu > 0, smaller == 1, True)
    return bool(ok.any())


@pytest.mark.criterion(5, "TREE scheme: exhaustive soundness and completeness for n <= 6")
def test_criterion_5_tree_scheme():
    alg = tree_verifier()
    non_trees = trees = 0
    for g in graphs_up_to(6):
        c = Configuration.uniform(g)
        if TREE(c):
            trees += 1
            certs = tree_prover(c)
            pool = default_id_pool(c, 3)
            assert len(pool) >= 3 or g.n == 1
            assert all(all(run(alg, c, ids, [certs]).values()) for ids in pool)
        else:
            non_trees += 1
            space = CertificateSpace.varints(g.n)
            outcome = check_class_membership_on_instance(alg, c, "NLD", [space], None, False)
            assert outcome, g
            assert not _tree_oracle_accepts(g), g
    report(5, True, f"{non_trees} non-trees rejected by every counter vector (engine and numpy oracle agree); "
                    f"{trees} trees accepted")


def cover_corpus_small():
    elements = (b"a", b"b")
    # () has no sets at all and is malformed; ((),) holds one empty set
    set_options = [(), ((),), ((b"a",),), ((b"b",),), ((b"a", b"b"),)]
    alphabet = [encode_cover_input(s, e) for e in elements for s in set_options]
    for g in (path_graph(1), path_graph(2), path_graph(3), complete_graph(3)):
        yield from configurations(g, alphabet)


def cover_size_corpus(count=100, seed=6):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(2, 6)
        size = rng.randint(2, 4)
        universe = [bytes([0x61 + i]) for i in range(size)]
        g = rng.choice(connected_graphs(n))
        es = [rng.choice(universe) for _ in range(n)]
        owner = rng.randrange(n)
        inputs = [encode_cover_input([sorted(set(es))] if u == owner else [()], es[u]) for u in range(n)]
        c = Configuration(g, tuple(inputs))
        if len(cover_universe(c)) >= 2:
            out.append(c)
    return out


@pytest.mark.criterion(6, "COVER scheme: complete, exhaustively sound at n <= 3, size within C n (log n + log |U|)")
def test_criterion_6_cover_scheme():
    alg = cover_verifier()
    members = non_members = 0
    for c in cover_corpus_small():
        if COVER(c):
            members += 1
            assert all(run(alg, c, None, [cover_prover(c)]).values())
        else:
            non_members += 1
            found, _ = exists_accepting_in_blocks(alg, c, [], cover_blocks(c, 3, 2))
            assert found is None, c
    worst = 0.0
    for c in cover_size_corpus():
        certs = cover_prover(c)
        assert all(run(alg, c, None, [certs]).values())
        u = len(cover_universe(c))
        worst = max(worst, cover_cert_bits(certs) / (c.n * (math.log2(c.n) + math.log2(u))))
    report(6, worst <= COVER_SIZE_CONSTANT,
           f"{members} members accepted, {non_members} non-members sound; "
           f"max bits / n(log n + log |U|) = {worst:.2f} <= C = {COVER_SIZE_CONSTANT}")


@pytest.mark.criterion(7, "no radius-2 view function decides ALTS on C12 with three spread nodes")
def test_criterion_7_indistinguishability():
    g = cycle_graph(12)
    spread = (0, 4, 8)
    configs = []
    for bits in itertools.product((0, 1), repeat=3):
        x = [BOT] * 12
        for b, s in zip(bits, spread):
            if b:
                x[s] = TOP
        configs.append(Configuration(g, tuple(x)))
    start = time.perf_counter()
    decider, views = view_decider(configs, 2, ALTS)
    elapsed = time.perf_counter() - start
    report(7, decider is None and elapsed < 60,
           f"{views} distinct views, {2 ** views} view->verdict maps, none decides ({elapsed:.2f}s)")


@pytest.mark.criterion(8, "MISS reduction correct and label-preserving on the AND grid (n <= 3, ids from {1,2,3})")
def test_criterion_8_miss_reduction():
    red = miss_reduction(AND)
    pairs = 0
    for c in all_configurations(3, [FALSE, TRUE]):
        pool = list(itertools.permutations((1, 2, 3), c.n))
        for ids in pool:
            assert MISS(apply_reduction(red, c, ids)) == AND(c)
            pairs += 1
        assert check_label_preserving(red, miss_prover, c, pool)
    report(8, True, f"{pairs} (config, ids) pairs: membership preserved, certificates identical across ids")


def miss_lift_families():
    return [
        ExplicitFamily([Configuration.uniform(cycle_graph(3), BOT)]),
        ExplicitFamily([Configuration(path_graph(2), (BOT, TOP))]),
        ExplicitFamily([Configuration.uniform(path_graph(3), BOT), Configuration.uniform(cycle_graph(4), BOT),
                        Configuration(path_graph(1), (TOP,))]),
    ]


@pytest.mark.criterion(9, "MISS-lift scheme: members accepted, non-members rejected for all descriptions m <= 6")
def test_criterion_9_miss_lift_scheme():
    alg = miss_lift_verifier()
    members = non_members = 0
    for family in miss_lift_families():
        for base in all_configurations(4, [BOT, TOP]):
            c = base.with_inputs([encode_miss_input(family, x) for x in base.inputs])
            if MISS_LIFT(c):
                members += 1
                assert all(run(alg, c, None, [miss_lift_prover(c)]).values())
            else:
                non_members += 1
                assert not all(run(alg, c, None, [honest_description(c, miss_projection)]).values())
                found, _ = exists_accepting_in_blocks(alg, c, [], description_blocks(c, 6))
                assert found is None, c
    report(9, True, f"{members} members accepted, {non_members} non-members rejected")


def _gadgets():
    machines = example_machines()
    parity, eraser, halt = machines["parity"], machines["eraser"], machines["halt_immediately"]
    pc, ec, hc = SystemStateCodec(parity, 4), SystemStateCodec(eraser, 3), SystemStateCodec(halt, 2)
    legal = [
        iter_instance(parity, pc.initial("11"), pc.initial("1"), 4, 2, pc),
        iter_instance(parity, 0, pc.initial("1"), 2, 2, pc),
        iter_instance(eraser, ec.initial("1"), ec.initial("11"), 2, 4, ec),
    ]
    illegal = [
        iter_instance(parity, pc.initial("1"), pc.initial("111"), 2, 4, pc),
        iter_instance(halt, hc.initial(), hc.initial("1"), 1, 2, hc),
    ]
    return legal, illegal, iter_instance(halt, hc.initial(), hc.initial(), 1, 1, hc)


def _k_cert(k):
    return k.to_bytes((k.bit_length() + 7) // 8, "big")


@pytest.mark.criterion(10, "ITER: fm invariants, pivot rule, 1000 detected mutations")
def test_criterion_10_iter():
    start = time.perf_counter()
    for name, machine in example_machines().items():
        codec = SystemStateCodec(machine, 3)
        assert fm(codec, 0) == 0 and fm(codec, 1) == 1
        for i in range(2, codec.bound + 1):
            values = [i]
            try:
                for _ in range(3 * codec.count):
                    values.append(fm(codec, values[-1]))
            except CodecRangeError:
                continue  # head left the bounded tape
            for j, v in enumerate(values):
                if v in (0, 1):
                    assert all(w == v for w in values[j:]), (name, i)
                    break
    legal, illegal, smallest = _gadgets()
    alg = iter_pi1_algorithm()
    for c in legal:
        assert iter_check(c)
        sizes = _side_lengths(c)
        bound = 2 * max(sizes)
        for k in range(bound + 1):
            assert all(run(alg, c, None, [(_k_cert(k),) * c.n]).values()), k
        space = CertificateSpace.uniform([_k_cert(k) for k in range(bound + 1)])
        assert check_class_membership_on_instance(alg, c, "Pi1", [space], None, True)
    for c in illegal:
        assert iter_minus_check(c) and not iter_check(c)
        k = max(_side_lengths(c))
        verdicts = run(alg, c, None, [(_k_cert(k),) * c.n])
        assert not verdicts[0] and all(verdicts[u] for u in range(1, c.n))
    local = iter_minus_local_checks()
    survivors = [m for m in random_mutations(smallest, 1000, seed=10)
                 if iter_minus_check(m.apply(smallest)) and all(run(local, m.apply(smallest)).values())]
    elapsed = time.perf_counter() - start
    report(10, not survivors and elapsed < 120,
           f"{len(legal)} legal and {len(illegal)} illegal gadgets; 1000 mutations, {len(survivors)} undetected "
           f"({elapsed:.1f}s)")


def _side_lengths(config):
    from locver.iteration import LEAF, LEFT, decode_gadget_input

    kinds = [decode_gadget_input(x) for x in config.inputs]
    left = sum(1 for g in kinds if g.kind == LEAF and g.side == LEFT)
    right = sum(1 for g in kinds if g.kind == LEAF and g.side != LEFT)
    return left, right

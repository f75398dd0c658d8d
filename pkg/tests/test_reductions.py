import itertools

from locver.core import Configuration, LocalAlgorithm, cycle_graph, path_graph, run
from locver.corpus import all_configurations, default_id_pool
from locver.encoding import FALSE, TRUE
from locver.games import exists_accepting_in_blocks
from locver.pi2 import DescriptionCert, honest_description
from locver.reductions import (ID_LEAK, IDENTITY, apply_reduction, check_label_preserving, compose,
                               description_blocks, echo_prover, miss_lift_prover, miss_lift_verifier, miss_prover,
                               miss_projection, miss_reduction, width)
from locver.zoo import AND, MISS, MISS_LIFT, ExplicitFamily, encode_miss_input, md_from_config


def binary(max_n):
    return list(all_configurations(max_n, [FALSE, TRUE]))


def test_width():
    assert width(1, b"") == 4
    assert width(5, b"\x01") == 2 ** (3 + 2)


def test_identity_reduction():
    c = Configuration(path_graph(2), (FALSE, TRUE))
    assert apply_reduction(IDENTITY, c, (1, 2)) == c


def test_miss_reduction_preserves_membership():
    red = miss_reduction(AND)
    for c in binary(3):
        for ids in itertools.permutations(range(1, c.n + 2), c.n):
            reduced = apply_reduction(red, c, ids)
            assert MISS(reduced) == AND(c)
            assert [miss_projection(x) for x in reduced.inputs] == list(c.inputs)


def test_materialized_families_agree_with_lazy_ones():
    lazy, explicit = miss_reduction(AND), miss_reduction(AND, materialize=True)
    for c in binary(2):
        ids = tuple(range(1, c.n + 1))
        assert MISS(apply_reduction(lazy, c, ids)) == MISS(apply_reduction(explicit, c, ids))


def test_label_preservation():
    red = miss_reduction(AND)
    for c in binary(3):
        assert check_label_preserving(red, miss_prover, c, default_id_pool(c, 12))
    c = Configuration(path_graph(2), (TRUE, TRUE))
    assert not check_label_preserving(ID_LEAK, echo_prover, c, [(1, 2), (3, 4)])


def test_compose_runs_the_inner_algorithm_on_reduced_inputs():
    red = miss_reduction(AND)
    inner = LocalAlgorithm(1, 0, lambda v: all(v.x(w) == v.x() for w in v.neighbors()), "uniform")
    outer = compose(red, inner)
    assert outer.radius == 1 and outer.uses_ids
    for c in binary(3):
        for ids in itertools.permutations(range(1, c.n + 1)):
            expected = run(inner, apply_reduction(red, c, ids))
            assert run(outer, c, ids) == expected


def test_miss_lift_scheme_on_small_members():
    family = ExplicitFamily((Configuration(cycle_graph(3), (FALSE,) * 3),))
    c = Configuration(path_graph(3), tuple(encode_miss_input(family, x) for x in (FALSE, TRUE, FALSE)))
    assert MISS_LIFT(c)
    certs = miss_lift_prover(c)
    assert all(run(miss_lift_verifier(), c, None, [certs]).values())
    hexagon = Configuration(cycle_graph(6), (encode_miss_input(family, FALSE),) * 6)
    assert not MISS_LIFT(hexagon)
    found, _ = exists_accepting_in_blocks(miss_lift_verifier(), hexagon, [], description_blocks(hexagon, 6))
    assert found is None


def test_miss_lift_gap_on_c12():
    # C12 covers C4, so it is outside MISS-lift for F = {C4}.  It also covers
    # C3, and a consistent description of C3 passes every local check.
    c4 = Configuration.uniform(cycle_graph(4), FALSE)
    x = encode_miss_input(ExplicitFamily((c4,)), FALSE)
    g = Configuration(cycle_graph(12), (x,) * 12)
    assert not MISS_LIFT(g)
    matrix, data = md_from_config(Configuration.uniform(cycle_graph(3), FALSE))
    c1 = tuple(DescriptionCert(matrix, data, u % 3 + 1).encode() for u in range(12))
    assert all(run(miss_lift_verifier(), g, None, [c1]).values())
    # the honest description of G itself is rejected
    assert not all(run(miss_lift_verifier(), g, None, [honest_description(g, miss_projection)]).values())

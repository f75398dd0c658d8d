import itertools

from locver.core import Configuration, cycle_graph, path_graph, run
from locver.corpus import all_configurations, configurations, graphs_up_to
from locver.encoding import BOT, TOP
from locver.games import EXISTS, exists_accepting_in_blocks, solve_game
from locver.lifts import k_fold_cover, pull_back
from locver.schemes import (alts_prover, alts_space, alts_verifier, cover_blocks, cover_own_checks, cover_prover,
                            cover_space, cover_verifier, decode_cover_cert, encode_cover_cert, tree_prover, tree_root,
                            tree_space, tree_verifier)
from locver.zoo import ALTS, COVER, COVER_MULTISET, TREE, encode_cover_input


def accepted(alg, config, certs):
    return all(run(alg, config, None, [certs]).values())


def test_tree_scheme_complete_and_sound():
    for g in graphs_up_to(5):
        c = Configuration.uniform(g)
        if TREE(c):
            assert accepted(tree_verifier(), c, tree_prover(c))
        elif g.n <= 4:
            assert not solve_game(tree_verifier(), c, [EXISTS], [tree_space(g.n)]).value


def test_tree_root_is_a_center_and_identity_independent():
    c = Configuration.uniform(path_graph(4))
    assert tree_root(c) in (1, 2)
    for perm in itertools.permutations(range(4)):
        moved = c.relabel(perm)
        certs = tree_prover(moved)
        assert sorted(certs) == sorted(tree_prover(c))


def test_alts_scheme_complete_and_sound():
    for c in all_configurations(4, [BOT, TOP]):
        if ALTS(c):
            assert accepted(alts_verifier(), c, alts_prover(c))
        else:
            assert not solve_game(alts_verifier(), c, [EXISTS], [alts_space(c.graph.diameter())]).value


def cover_inputs(sets_per_node, elements):
    return tuple(encode_cover_input(s, e) for s, e in zip(sets_per_node, elements))


def test_cover_prover_on_members():
    c = Configuration(path_graph(3), cover_inputs([[()], [(b"a", b"b")], [()]], [b"a", b"b", b"a"]))
    assert COVER(c)
    certs = cover_prover(c)
    assert accepted(cover_verifier(), c, certs)
    d0, entries = decode_cover_cert(certs[0])
    assert d0 == 1 and entries == ((0, b"a"), (1, b"b"))


def test_cover_cert_round_trip():
    cert = encode_cover_cert(3, [(0, b"x"), (2, b"")])
    assert decode_cover_cert(cert) == (3, ((0, b"x"), (2, b"")))


def test_own_checks():
    x = encode_cover_input([(b"a",)], b"a")
    assert cover_own_checks(x, encode_cover_cert(0, [(0, b"a")]))
    assert not cover_own_checks(x, encode_cover_cert(0, [(1, b"a")]))
    assert not cover_own_checks(x, encode_cover_cert(0, [(0, b"a"), (1, b"b")]))
    assert cover_own_checks(x, encode_cover_cert(1, [(0, b"a"), (1, b"b")]))
    assert not cover_own_checks(x, b"\xff")


def test_cover_blocks_agree_with_plain_game_on_small_instances():
    options = [(), [()], [(b"a",)], [(b"a", b"b")]]
    alphabet = [encode_cover_input(s, e) for e in (b"a", b"b") for s in options]
    for g in (path_graph(1), path_graph(2)):
        for c in configurations(g, alphabet):
            plain = solve_game(cover_verifier(), c, [EXISTS], [cover_space(c, 2, 2)]).value
            found, _ = exists_accepting_in_blocks(cover_verifier(), c, [], cover_blocks(c, 2, 2))
            assert (found is not None) == plain
            if not COVER(c):
                assert not plain


def test_cover_certificates_transport_along_lifts():
    c = Configuration(cycle_graph(3), cover_inputs([[(b"a", b"b")], [()], [()]], [b"a", b"b", b"b"]))
    lifted, lift = k_fold_cover(c, 2, {(0, 1): (1, 0)})
    assert COVER(lifted)
    assert accepted(cover_verifier(), lifted, pull_back(cover_prover(c), lift.phi))


def test_multiset_cover_is_fooled_by_lifts():
    # the owner's multiset matches three nodes; the double cover has six
    sets = [[(b"a", b"b", b"b")], [()], [()]]
    c = Configuration(cycle_graph(3), tuple(encode_cover_input(s, e, multiset=True)
                                            for s, e in zip(sets, [b"a", b"b", b"b"])))
    assert COVER_MULTISET(c)
    certs = cover_prover(c, multiset=True)
    assert accepted(cover_verifier(multiset=True), c, certs)
    lifted, lift = k_fold_cover(c, 2, {(0, 1): (1, 0)})
    assert not COVER_MULTISET(lifted)
    assert accepted(cover_verifier(multiset=True), lifted, pull_back(certs, lift.phi))

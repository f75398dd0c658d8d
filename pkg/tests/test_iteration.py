import pytest

from locver.core import run
from locver.errors import CodecRangeError, DomainError, ParseError
from locver.games import CertificateSpace, solve_game
from locver.iteration import (GadgetInput, SystemStateCodec, codec_from_blob, decode_gadget_input, example_machines,
                              fm, iter_check, iter_instance, iter_minus_check, iter_minus_local_checks,
                              iter_pi1_algorithm, iterate, orbit, parse_machine, single_mutations)


@pytest.fixture
def parity():
    m = example_machines()["parity"]
    return m, SystemStateCodec(m, 3)


def test_codec_is_a_bijection(parity):
    _, codec = parity
    for i in range(2, codec.bound + 1):
        assert codec.encode(*codec.decode(i)) == i
    with pytest.raises(CodecRangeError):
        codec.decode(codec.bound + 1)
    with pytest.raises(CodecRangeError):
        codec.initial(["1"] * 4)


def test_fm_runs_the_machine(parity):
    _, codec = parity
    assert fm(codec, 0) == 0 and fm(codec, 1) == 1
    assert iterate(codec, codec.initial(["1", "1"]), 10) == 0
    assert iterate(codec, codec.initial(["1"]), 10) == 1
    path = orbit(codec, codec.initial(["1"]), 2)
    assert path[-1] == 1 and len(path) == 3


def test_head_off_tape_is_out_of_range():
    m = example_machines()["eraser"]
    codec = SystemStateCodec(m, 1)
    with pytest.raises(CodecRangeError):
        fm(codec, codec.initial(["1"]))


def test_machine_text_round_trip():
    for m in example_machines().values():
        assert parse_machine(m.to_text(), m.name) == m
        assert codec_from_blob(SystemStateCodec(m, 2).blob()).machine.to_text() == m.to_text()
    with pytest.raises(ParseError):
        parse_machine("states s h0 h1\nalphabet _\n")
    with pytest.raises(ParseError):
        parse_machine("bogus 1\n")


def test_gadget_input_round_trip():
    p = GadgetInput(0, 0, 0, 0, b"blob", a=5, b=7)
    assert decode_gadget_input(p.encode()) == p
    with pytest.raises(ParseError):
        decode_gadget_input(b"\x09\x00\x00\x00")


def test_gadget_is_in_iter_minus_and_locally_accepted(parity):
    m, codec = parity
    for len_l, len_r, word_a, word_b in ((1, 1, [], []), (2, 4, ["1"], ["1", "1"]), (4, 2, ["1", "1"], ["1"])):
        c = iter_instance(m, codec.initial(word_a), codec.initial(word_b), len_l, len_r, codec)
        assert iter_minus_check(c)
        assert all(run(iter_minus_local_checks(), c).values())
    with pytest.raises(DomainError):
        iter_instance(m, codec.initial(), codec.initial(), 3, 1, codec)


def test_iter_needs_a_zero_end(parity):
    m, codec = parity
    even, odd = codec.initial(["1", "1"]), codec.initial(["1"])
    assert iter_check(iter_instance(m, even, odd, 4, 2, codec))
    assert not iter_check(iter_instance(m, odd, odd, 2, 2, codec))


def test_every_single_mutation_of_the_smallest_gadget_is_detected():
    m = example_machines()["halt_immediately"]
    codec = SystemStateCodec(m, 2)
    c = iter_instance(m, codec.initial(), codec.initial(), 1, 1, codec)
    local = iter_minus_local_checks()
    mutations = single_mutations(c)
    assert mutations
    for mut in mutations:
        mutated = mut.apply(c)
        assert not iter_minus_check(mutated)
        assert not all(run(local, mutated).values()), mut


def test_pi1_pivot_rule(parity):
    m, codec = parity
    alg = iter_pi1_algorithm()
    space = CertificateSpace.uniform([bytes([k]) if k else b"" for k in range(6)])
    even, odd = codec.initial(["1", "1"]), codec.initial(["1"])
    legal = iter_instance(m, even, odd, 4, 2, codec)
    assert solve_game(alg, legal, ["forall"], [space]).value
    illegal = iter_instance(m, odd, odd, 2, 2, codec)
    assert not solve_game(alg, illegal, ["forall"], [space]).value

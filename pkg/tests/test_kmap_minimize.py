"""Minimizer checks against the brute-force cover-search oracle."""

from __future__ import annotations

import random

import pytest

from rtlforge.kmap import (
    CellValue,
    Implicant,
    TruthFunction,
    detect_xor,
    minimize,
    prime_implicants,
)

from .oracles import (
    evaluate_sop_rows,
    maximal_cubes,
    minimum_cover_size,
    parity_rows,
)


def function_bits(tf: TruthFunction) -> tuple[int, int]:
    """(on_bits, off_bits) row bitsets of a TruthFunction."""
    on = off = 0
    for m, v in enumerate(tf.values):
        if v is CellValue.ONE:
            on |= 1 << m
        elif v is CellValue.ZERO:
            off |= 1 << m
    return on, off


def assert_sound(tf: TruthFunction, expr) -> None:
    on, off = function_bits(tf)
    if expr.constant is not None:
        rows = ((1 << (1 << tf.num_vars)) - 1) if expr.constant else 0
    else:
        rows = evaluate_sop_rows(
            [(t.fixed_mask, t.value_bits) for t in expr.terms], tf.num_vars
        )
    assert rows & on == on, "a One minterm is uncovered"
    assert rows & off == 0, "a Zero minterm is covered"


def test_golden_three_variable_cyclic_cover():
    # ON {0,1,2,5,6,7}: the classic cyclic chart with two 3-term minima;
    # the canonical tie-break lands on {~b&c, ~a&~c, a&b}.
    tf = TruthFunction.from_minterms(3, [0, 1, 2, 5, 6, 7])
    expr = minimize(tf)
    assert expr.term_count == 3
    assert expr.literal_count == 6
    assert expr.terms == (
        Implicant(0b011, 0b001),
        Implicant(0b101, 0b000),
        Implicant(0b110, 0b110),
    )
    assert_sound(tf, expr)
    assert minimum_cover_size([0, 1, 2, 5, 6, 7], [], 3) == 3


def test_constants():
    zero = minimize(TruthFunction.from_minterms(3, []))
    assert zero.constant is False and zero.terms == ()
    one = minimize(TruthFunction.from_minterms(3, range(8)))
    assert one.constant is True and one.terms == ()
    # Ones plus don't-cares filling the space also collapse to constant 1
    mixed = minimize(TruthFunction.from_minterms(3, [0, 3], dont_cares=[1, 2, 4, 5, 6, 7]))
    assert mixed.constant is True


def test_single_minterm():
    expr = minimize(TruthFunction.from_minterms(2, [2]))
    assert expr.terms == (Implicant(0b11, 0b10),)


def test_dont_cares_absorbed_not_required():
    # f = a (with DC at 01) minimizes to a single literal
    tf = TruthFunction.from_minterms(2, [2, 3], dont_cares=[1])
    expr = minimize(tf)
    assert expr.terms == (Implicant(0b10, 0b10),)
    assert_sound(tf, expr)


def test_exhaustive_three_variable_minimality():
    # every fully specified 3-var function: sound and oracle-minimal
    for bits in range(256):
        ones = [m for m in range(8) if bits >> m & 1]
        tf = TruthFunction.from_minterms(3, ones)
        expr = minimize(tf)
        assert_sound(tf, expr)
        got = expr.term_count
        want = minimum_cover_size(ones, [], 3)
        if bits == 255:
            want = 0  # tautology carries no product terms under our convention
        assert got == want, f"function {bits:08b}: got {got} terms, oracle says {want}"


def test_seeded_four_variable_with_dont_cares():
    rng = random.Random(1234)
    for _ in range(200):
        assignment = [rng.choice("01x") for _ in range(16)]
        ones = [m for m, s in enumerate(assignment) if s == "1"]
        dcs = [m for m, s in enumerate(assignment) if s == "x"]
        tf = TruthFunction.from_minterms(4, ones, dont_cares=dcs)
        expr = minimize(tf)
        assert_sound(tf, expr)
        if expr.constant is None:
            want = minimum_cover_size(ones, dcs, 4)
            assert expr.term_count == want


def test_prime_implicants_match_oracle_maximal_cubes():
    rng = random.Random(99)
    for _ in range(60):
        assignment = [rng.choice("011x") for _ in range(16)]
        ones = {m for m, s in enumerate(assignment) if s == "1"}
        dcs = {m for m, s in enumerate(assignment) if s == "x"}
        if not ones:
            continue
        on_bits = sum(1 << m for m in ones)
        dc_bits = sum(1 << m for m in dcs)
        off_bits = ~(on_bits | dc_bits) & 0xFFFF
        got = {(p.fixed_mask, p.value_bits) for p in prime_implicants(ones | dcs, 4)}
        # oracle maximality is relative to covering at least one One; primes
        # from merging may also cover only don't-cares, so compare the
        # subset that touches Ones
        got_touching = {
            (m, v) for (m, v) in got
            if any((mm & m) == v for mm in ones)
        }
        want = {(m, v) for m, v, _ in maximal_cubes(on_bits, off_bits, 4)}
        assert got_touching == want


def test_greedy_fallback_stays_sound():
    rng = random.Random(5)
    for _ in range(40):
        ones = sorted(rng.sample(range(32), 14))
        tf = TruthFunction.from_minterms(5, ones)
        exact = minimize(tf)
        greedy = minimize(tf, petrick_limit=0)
        assert_sound(tf, greedy)
        if exact.constant is None and greedy.constant is None:
            assert greedy.term_count >= exact.term_count


def test_minimize_is_deterministic():
    tf = TruthFunction.from_minterms(4, [0, 1, 5, 7, 8, 10, 14, 15], dont_cares=[2, 3])
    assert minimize(tf) == minimize(tf)


def test_detect_xor_three_way_parity():
    tf = TruthFunction.from_minterms(3, [1, 2, 4, 7])
    assert detect_xor(tf) == ((0, 1, 2), 0)


def test_detect_xnor_polarity():
    tf = TruthFunction.from_minterms(2, [0, 3])
    assert detect_xor(tf) == ((0, 1), 1)


def test_detect_xor_subset_of_variables():
    # f = b ^ c regardless of a
    ones = [m for m in range(8) if ((m >> 1) & 1) ^ (m & 1)]
    tf = TruthFunction.from_minterms(3, ones)
    assert detect_xor(tf) == ((1, 2), 0)


def test_detect_xor_rejects_non_parity():
    assert detect_xor(TruthFunction.from_minterms(2, [3])) is None  # AND
    assert detect_xor(TruthFunction.from_minterms(3, [])) is None  # constant
    assert detect_xor(TruthFunction.from_minterms(3, range(8))) is None


def test_detect_xor_with_dont_cares():
    # specified rows consistent with a ^ b; DC rows free
    tf = TruthFunction.from_minterms(2, [1], dont_cares=[2])
    got = detect_xor(tf)
    assert got is not None
    subset, polarity = got
    mask = sum(1 << (2 - 1 - i) for i in subset)
    want_rows = parity_rows(mask, polarity, 2)
    for m, v in enumerate(tf.values):
        if v is CellValue.ONE:
            assert want_rows >> m & 1
        elif v is CellValue.ZERO:
            assert not want_rows >> m & 1


def test_detect_xor_exhaustive_against_oracle():
    # for every 3-var function, detect_xor agrees with direct parity search
    for bits in range(256):
        tf = TruthFunction.from_minterms(3, [m for m in range(8) if bits >> m & 1])
        got = detect_xor(tf)
        matches = []
        for mask in range(1, 8):
            if bin(mask).count("1") < 2:
                continue
            for pol in (0, 1):
                if parity_rows(mask, pol, 3) == bits:
                    matches.append((mask, pol))
        if got is None:
            assert not matches
        else:
            subset, pol = got
            mask = sum(1 << (3 - 1 - i) for i in subset)
            assert (mask, pol) in matches


def test_rejects_oversized_functions():
    with pytest.raises(ValueError):
        TruthFunction.from_minterms(7, [0])

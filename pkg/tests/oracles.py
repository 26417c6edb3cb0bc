"""Independent brute-force oracles used to check the real implementations.

Deliberately different algorithms from the package code: cube enumeration
and exhaustive set-cover search here, iterative merging plus Petrick there.
Everything operates on row bitsets so the exhaustive searches stay fast.
"""

from __future__ import annotations

import itertools
from typing import Iterable


def all_cubes(num_vars: int) -> list[tuple[int, int]]:
    """Every product term as (fixed_mask, value_bits). 3^n cubes."""
    cubes = []
    for mask in range(1 << num_vars):
        sub = mask
        while True:
            cubes.append((mask, sub))
            if sub == 0:
                break
            sub = (sub - 1) & mask
    return cubes


def cube_rows(mask: int, value: int, num_vars: int) -> int:
    """Bitset of minterms covered by the cube."""
    rows = 0
    for m in range(1 << num_vars):
        if (m & mask) == value:
            rows |= 1 << m
    return rows


def valid_cubes(on_bits: int, off_bits: int, num_vars: int) -> list[tuple[int, int, int]]:
    """Cubes touching no Zero row and at least one One row, as (mask, value, rows)."""
    out = []
    for mask, value in all_cubes(num_vars):
        rows = cube_rows(mask, value, num_vars)
        if rows & off_bits:
            continue
        if rows & on_bits:
            out.append((mask, value, rows))
    return out


def maximal_cubes(on_bits: int, off_bits: int, num_vars: int) -> list[tuple[int, int, int]]:
    """Valid cubes with no valid strict superset (independent prime computation).

    A cube's parents are obtained by unfixing one fixed variable; the cube is
    maximal iff every parent hits a Zero row.
    """
    maxi = []
    for mask, value, rows in valid_cubes(on_bits, off_bits, num_vars):
        is_max = True
        for bit in range(num_vars):
            b = 1 << bit
            if mask & b:
                parent_rows = cube_rows(mask & ~b, value & ~b, num_vars)
                if not parent_rows & off_bits:
                    is_max = False
                    break
        if is_max:
            maxi.append((mask, value, rows))
    return maxi


def minimum_cover_size(ones: Iterable[int], dont_cares: Iterable[int], num_vars: int) -> int:
    """Smallest number of product terms in any sound SOP cover of the Ones.

    Exhaustive search over maximal cubes by increasing cover cardinality.
    Restricting to maximal cubes is safe: any cube in a minimum cover can be
    replaced by a maximal superset without uncovering anything.
    """
    on_bits = 0
    for m in ones:
        on_bits |= 1 << m
    dc_bits = 0
    for m in dont_cares:
        dc_bits |= 1 << m
    off_bits = ~(on_bits | dc_bits) & ((1 << (1 << num_vars)) - 1)
    if on_bits == 0:
        return 0
    cubes = maximal_cubes(on_bits, off_bits, num_vars)
    row_sets = [rows for _, _, rows in cubes]
    for size in range(1, len(row_sets) + 1):
        for combo in itertools.combinations(row_sets, size):
            union = 0
            for rows in combo:
                union |= rows
            if union & on_bits == on_bits:
                return size
    raise AssertionError("no cover found; ones not coverable")


def evaluate_sop_rows(terms: Iterable[tuple[int, int]], num_vars: int) -> int:
    """Bitset of minterms where the SOP (list of (mask, value) cubes) is true."""
    rows = 0
    for mask, value in terms:
        rows |= cube_rows(mask, value, num_vars)
    return rows


def parity_rows(subset_mask: int, polarity: int, num_vars: int) -> int:
    """Bitset where XOR over the variables in subset_mask (xor polarity) is 1."""
    rows = 0
    for m in range(1 << num_vars):
        if (bin(m & subset_mask).count("1") & 1) ^ polarity:
            rows |= 1 << m
    return rows

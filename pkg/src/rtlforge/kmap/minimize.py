"""Quine-McCluskey minimization with Petrick's method, plus parity detection.

Determinism contract: identical TruthFunction in, identical SopExpression
out, on every platform. All tie-breaks are total orders:

1. fewest product terms,
2. fewest total literals,
3. lexicographically smallest sorted tuple of (fixed_mask, value_bits) keys.

Petrick's exact residue cover is abandoned for a greedy cover when the
residue (minterms left after essential primes) exceeds ``petrick_limit``;
greedy keeps soundness and loses only the minimality guarantee.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Optional, Sequence

from .model import CellValue, Implicant, SopExpression, TruthFunction

PETRICK_LIMIT = 22
# Absorption-pruned product-of-sums expansion is abandoned past this many
# partial products; beyond it the greedy cover takes over.
_PETRICK_TERM_CAP = 20000


def prime_implicants(on_and_dc: Iterable[int], num_vars: int) -> list[Implicant]:
    """All prime implicants of the set, by iterative pairwise merging."""
    current = {(((1 << num_vars) - 1), m) for m in on_and_dc}
    primes: set[tuple[int, int]] = set()
    while current:
        merged: set[tuple[int, int]] = set()
        used: set[tuple[int, int]] = set()
        items = sorted(current)
        for i, (mask_a, val_a) in enumerate(items):
            for mask_b, val_b in items[i + 1:]:
                if mask_a != mask_b:
                    continue
                diff = val_a ^ val_b
                if bin(diff).count("1") == 1:
                    merged.add((mask_a & ~diff, val_a & ~diff))
                    used.add((mask_a, val_a))
                    used.add((mask_b, val_b))
        primes.update(current - used)
        current = merged
    return sorted(Implicant(m, v) for m, v in primes)


def _greedy_cover(
    residue: set[int], candidates: Sequence[Implicant]
) -> list[Implicant]:
    chosen: list[Implicant] = []
    remaining = set(residue)
    while remaining:
        best = max(
            candidates,
            key=lambda p: (
                sum(1 for m in remaining if p.covers(m)),
                -p.literal_count,
                (-p.fixed_mask, -p.value_bits),
            ),
        )
        covered = {m for m in remaining if best.covers(m)}
        if not covered:
            raise AssertionError("residue minterm not coverable by any prime")
        chosen.append(best)
        remaining -= covered
    return chosen


def _petrick_covers(
    residue: Sequence[int], candidates: Sequence[Implicant]
) -> Optional[list[frozenset[int]]]:
    """All irredundant residue covers as sets of candidate indices.

    Product-of-sums expansion with absorption. Returns None when the
    intermediate product exceeds the term cap (caller falls back to greedy).
    """
    product: list[frozenset[int]] = [frozenset()]
    for m in residue:
        covering = frozenset(i for i, p in enumerate(candidates) if p.covers(m))
        expanded: list[frozenset[int]] = []
        for term in product:
            if term & covering:
                expanded.append(term)
                continue
            for i in sorted(covering):
                expanded.append(term | {i})
        # absorption: drop any term that is a superset of another
        expanded.sort(key=len)
        kept: list[frozenset[int]] = []
        for term in expanded:
            if not any(k <= term for k in kept):
                kept.append(term)
        if len(kept) > _PETRICK_TERM_CAP:
            return None
        product = kept
    return product


def _cover_key(cover: Sequence[Implicant]) -> tuple:
    keys = sorted((t.fixed_mask, t.value_bits) for t in cover)
    return (len(cover), sum(t.literal_count for t in cover), keys)


def minimize(tf: TruthFunction, petrick_limit: int = PETRICK_LIMIT) -> SopExpression:
    """Minimal sum-of-products cover of the function's One minterms.

    Don't-care minterms may be absorbed into implicants but are never
    required to be covered. Exact minimality holds whenever the residue
    after essential-prime extraction is <= petrick_limit.
    """
    ones = tf.minterms()
    if not ones:
        return SopExpression(terms=(), constant=False)
    dcs = tf.dont_cares()
    primes = prime_implicants(set(ones) | set(dcs), tf.num_vars)

    # essential primes: sole cover of some One minterm
    chart = {m: [p for p in primes if p.covers(m)] for m in ones}
    essentials: list[Implicant] = []
    seen: set[Implicant] = set()
    for m, covering in sorted(chart.items()):
        if len(covering) == 1 and covering[0] not in seen:
            essentials.append(covering[0])
            seen.add(covering[0])
    residue = sorted(
        m for m in ones if not any(e.covers(m) for e in essentials)
    )

    if not residue:
        cover = essentials
    else:
        candidates = [p for p in primes if p not in seen]
        solutions = None
        if len(residue) <= petrick_limit:
            solutions = _petrick_covers(residue, candidates)
        if solutions is None:
            cover = essentials + _greedy_cover(set(residue), candidates)
        else:
            best = min(
                (essentials + [candidates[i] for i in sorted(sol)] for sol in solutions),
                key=_cover_key,
            )
            cover = best

    terms = tuple(sorted(cover))
    if len(terms) == 1 and terms[0].fixed_mask == 0:
        return SopExpression(terms=(), constant=True)
    return SopExpression(terms=terms)


def detect_xor(tf: TruthFunction) -> Optional[tuple[tuple[int, ...], int]]:
    """Pure parity structure, if any: (variable indices, polarity).

    Returns (S, p) iff on every specified row the output equals the XOR of
    the variables indexed by S (MSB-first indices into var_names), inverted
    when p == 1. Requires |S| >= 2; smallest subset in (size, index) order
    wins when don't-cares admit several. Returns None for constant or
    non-parity functions.
    """
    n = tf.num_vars
    specified = [
        (m, v is CellValue.ONE)
        for m, v in enumerate(tf.values)
        if v is not CellValue.DONT_CARE
    ]
    if not specified:
        return None
    for size in range(2, n + 1):
        for subset in itertools.combinations(range(n), size):
            subset_mask = 0
            for i in subset:
                subset_mask |= 1 << (n - 1 - i)
            for polarity in (0, 1):
                ok = all(
                    ((bin(m & subset_mask).count("1") & 1) ^ polarity) == out
                    for m, out in specified
                )
                if ok:
                    return subset, polarity
    return None

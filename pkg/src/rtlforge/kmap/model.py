"""Core value types for symbolic logic solving.

Bit conventions used throughout the subpackage:

* Variables are ordered MSB-first: for ``var_names = (a, b, c)`` the minterm
  index of an assignment is ``(a << 2) | (b << 1) | c``.
* An :class:`Implicant` is a product term stored as ``(fixed_mask,
  value_bits)``; it covers minterm ``m`` iff ``m & fixed_mask == value_bits``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

MAX_VARS = 6


class CellValue(Enum):
    ZERO = "0"
    ONE = "1"
    DONT_CARE = "x"

    @classmethod
    def from_symbol(cls, symbol: str) -> "CellValue":
        s = symbol.strip().lower()
        if s == "0":
            return cls.ZERO
        if s == "1":
            return cls.ONE
        if s in ("x", "d", "-"):
            return cls.DONT_CARE
        raise ValueError(f"unrecognized cell symbol {symbol!r}")


def gray_sequence(width: int) -> list[int]:
    """Reflected Gray sequence of all width-bit values (00, 01, 11, 10, ...)."""
    return [i ^ (i >> 1) for i in range(1 << width)]


def is_gray_sequence(labels: Sequence[int]) -> bool:
    """True when consecutive labels differ in exactly one bit and none repeat."""
    if len(set(labels)) != len(labels):
        return False
    for prev, cur in zip(labels, labels[1:]):
        if bin(prev ^ cur).count("1") != 1:
            return False
    return True


@dataclass(frozen=True, order=True)
class Implicant:
    """Product term over the function's variables.

    ``fixed_mask`` selects the fixed bit positions, ``value_bits`` their
    required values. Bits outside the mask must be zero in ``value_bits``.
    Ordering is the canonical (fixed_mask, value_bits) tuple order used by
    every tie-break in the minimizer.
    """

    fixed_mask: int
    value_bits: int

    def __post_init__(self) -> None:
        if self.value_bits & ~self.fixed_mask:
            raise ValueError("value_bits sets a bit outside fixed_mask")

    def covers(self, minterm: int) -> bool:
        return (minterm & self.fixed_mask) == self.value_bits

    def covered_minterms(self, num_vars: int) -> list[int]:
        return [m for m in range(1 << num_vars) if self.covers(m)]

    @property
    def literal_count(self) -> int:
        return bin(self.fixed_mask).count("1")


@dataclass(frozen=True)
class SopExpression:
    """Sum-of-products result. ``constant`` is set iff ``terms`` is empty."""

    terms: tuple[Implicant, ...]
    constant: Optional[bool] = None

    def __post_init__(self) -> None:
        if bool(self.terms) == (self.constant is not None):
            raise ValueError("constant must be set exactly when terms is empty")

    def evaluate(self, minterm: int) -> bool:
        if self.constant is not None:
            return self.constant
        return any(t.covers(minterm) for t in self.terms)

    @property
    def term_count(self) -> int:
        return len(self.terms)

    @property
    def literal_count(self) -> int:
        return sum(t.literal_count for t in self.terms)


@dataclass(frozen=True)
class TruthFunction:
    """A (possibly partial) single-output Boolean function of 1..6 variables.

    ``values[m]`` is the output for minterm ``m`` under the MSB-first
    variable order given by ``var_names``.
    """

    var_names: tuple[str, ...]
    values: tuple[CellValue, ...]
    output_name: str = "f"

    def __post_init__(self) -> None:
        n = len(self.var_names)
        if not 1 <= n <= MAX_VARS:
            raise ValueError(f"variable count must be 1..{MAX_VARS}, got {n}")
        if len(set(self.var_names)) != n:
            raise ValueError("duplicate variable names")
        if len(self.values) != 1 << n:
            raise ValueError(
                f"expected {1 << n} cells for {n} variables, got {len(self.values)}"
            )

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    def minterms(self) -> list[int]:
        return [m for m, v in enumerate(self.values) if v is CellValue.ONE]

    def dont_cares(self) -> list[int]:
        return [m for m, v in enumerate(self.values) if v is CellValue.DONT_CARE]

    def zeros(self) -> list[int]:
        return [m for m, v in enumerate(self.values) if v is CellValue.ZERO]

    @classmethod
    def from_minterms(
        cls,
        num_vars: int,
        ones: Iterable[int],
        dont_cares: Iterable[int] = (),
        var_names: Optional[Sequence[str]] = None,
        output_name: str = "f",
    ) -> "TruthFunction":
        names = tuple(var_names) if var_names else tuple("abcdef"[:num_vars])
        ones_set, dc_set = set(ones), set(dont_cares)
        if ones_set & dc_set:
            raise ValueError("minterm listed as both One and DontCare")
        size = 1 << num_vars
        for m in ones_set | dc_set:
            if not 0 <= m < size:
                raise ValueError(f"minterm {m} out of range for {num_vars} variables")
        values = tuple(
            CellValue.ONE if m in ones_set
            else CellValue.DONT_CARE if m in dc_set
            else CellValue.ZERO
            for m in range(size)
        )
        return cls(var_names=names, values=values, output_name=output_name)

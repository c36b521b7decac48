"""Subsets of the variable index set {1, ..., l}, the elements of the lattice 2^L.

A ``VarSet`` is a bitmask tied to a fixed number of variables. Bit ``j-1``
stands for variable ``j`` (variables are 1-based in all user-facing text,
0-based as array axes). Union, intersection and the subset order are the
lattice join, meet and partial order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import LatticeCapError, RangeError

# Functions that materialize all 2**l subset values refuse beyond this cap.
# Module-level so embedders can raise it consciously.
LATTICE_CAP = 24


def check_lattice_cap(num_vars: int) -> None:
    if num_vars > LATTICE_CAP:
        raise LatticeCapError(
            f"{num_vars} variables exceed the lattice cap of {LATTICE_CAP}"
        )


@dataclass(frozen=True)
class VarSet:
    """An element of 2^L for L = {1, ..., num_vars}, stored as a bitmask."""

    mask: int
    num_vars: int

    def __post_init__(self) -> None:
        if self.num_vars < 0:
            raise RangeError(f"num_vars must be >= 0, got {self.num_vars}")
        if not 0 <= self.mask < (1 << self.num_vars):
            raise RangeError(
                f"mask {self.mask:#x} has bits above variable {self.num_vars}"
            )

    @classmethod
    def from_vars(cls, variables: Iterable[int], num_vars: int) -> "VarSet":
        """Build from 1-based variable indices."""
        mask = 0
        for v in variables:
            if not 1 <= v <= num_vars:
                raise RangeError(
                    f"variable {v} out of range 1..{num_vars}"
                )
            mask |= 1 << (v - 1)
        return cls(mask, num_vars)

    @classmethod
    def empty(cls, num_vars: int) -> "VarSet":
        return cls(0, num_vars)

    @classmethod
    def full(cls, num_vars: int) -> "VarSet":
        return cls((1 << num_vars) - 1, num_vars)

    @property
    def vars(self) -> tuple[int, ...]:
        """Member variables, 1-based, ascending."""
        return tuple(j + 1 for j in range(self.num_vars) if self.mask >> j & 1)

    @property
    def axes(self) -> tuple[int, ...]:
        """Member variables as 0-based array axes, ascending."""
        return tuple(j for j in range(self.num_vars) if self.mask >> j & 1)

    def _check_same(self, other: "VarSet") -> None:
        if self.num_vars != other.num_vars:
            raise RangeError(
                f"mixing subsets over {self.num_vars} and {other.num_vars} variables"
            )

    def __or__(self, other: "VarSet") -> "VarSet":
        self._check_same(other)
        return VarSet(self.mask | other.mask, self.num_vars)

    def __and__(self, other: "VarSet") -> "VarSet":
        self._check_same(other)
        return VarSet(self.mask & other.mask, self.num_vars)

    def __sub__(self, other: "VarSet") -> "VarSet":
        self._check_same(other)
        return VarSet(self.mask & ~other.mask, self.num_vars)

    def complement(self) -> "VarSet":
        return VarSet(~self.mask & ((1 << self.num_vars) - 1), self.num_vars)

    def __le__(self, other: "VarSet") -> bool:
        self._check_same(other)
        return self.mask & ~other.mask == 0

    def __lt__(self, other: "VarSet") -> bool:
        return self <= other and self.mask != other.mask

    def __contains__(self, variable: int) -> bool:
        return 1 <= variable <= self.num_vars and self.mask >> (variable - 1) & 1 == 1

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.vars)

    def __str__(self) -> str:
        return "{" + ",".join(str(v) for v in self.vars) + "}"

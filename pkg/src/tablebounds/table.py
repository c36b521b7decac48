"""Dense multiway contingency tables and the marginal-sum function.

A table holds nonnegative counts over a grid I_1 x ... x I_l (row-major,
last axis fastest). Marginalizing onto a subset ``a`` of the axes sums out
everything else; doing this for every subset at a fixed anchor cell gives a
function on 2^L that is decreasing and supermodular, the object all bound
computations in this package rest on.

Counts are int64 by default so oracle comparisons are bit-exact; a real
(float64) mode exists for densities. All types are immutable after
construction and safe for concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Optional, Sequence

import numpy as np

from .errors import RangeError
from .lattice import LatticeFunction, subset_sum_transform
from .varset import VarSet, check_lattice_cap

# A cell is a full multi-index, 0-based per axis.
CellIndex = tuple[int, ...]

INTEGER = "integer"
REAL = "real"


@dataclass(frozen=True)
class ContingencyTable:
    """An l-way array of nonnegative counts with optional category labels."""

    cardinalities: tuple[int, ...]
    counts: np.ndarray
    labels: Optional[tuple[tuple[str, ...], ...]] = None
    kind: str = INTEGER

    def __post_init__(self) -> None:
        cards = tuple(int(c) for c in self.cardinalities)
        if any(c < 1 for c in cards):
            raise RangeError(f"cardinalities must be positive, got {cards}")
        object.__setattr__(self, "cardinalities", cards)
        if self.kind not in (INTEGER, REAL):
            raise RangeError(f"kind must be 'integer' or 'real', got {self.kind!r}")
        dtype = np.int64 if self.kind == INTEGER else np.float64
        counts = np.asarray(self.counts)
        if self.kind == INTEGER and not np.issubdtype(counts.dtype, np.integer):
            rounded = np.rint(counts)
            if not np.allclose(counts, rounded, rtol=0, atol=0):
                raise RangeError("integer table given non-integer counts")
            counts = rounded
        counts = counts.astype(dtype).reshape(cards)
        if self.kind == REAL and not np.all(np.isfinite(counts)):
            raise RangeError("counts must be finite")
        if np.any(counts < 0):
            raise RangeError("counts must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        if self.labels is not None:
            labels = tuple(tuple(str(x) for x in axis) for axis in self.labels)
            if len(labels) != len(cards):
                raise RangeError("one label list per axis is required")
            for j, axis in enumerate(labels):
                if len(axis) != cards[j]:
                    raise RangeError(
                        f"axis {j + 1} has {cards[j]} categories but "
                        f"{len(axis)} labels"
                    )
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_flat(
        cls,
        cardinalities: Sequence[int],
        flat_counts: Sequence,
        labels=None,
        kind: str = INTEGER,
    ) -> "ContingencyTable":
        cards = tuple(int(c) for c in cardinalities)
        flat = np.asarray(flat_counts)
        if flat.size != prod(cards):
            raise RangeError(
                f"expected {prod(cards)} counts for shape {cards}, got {flat.size}"
            )
        return cls(cards, flat.reshape(cards) if cards else flat, labels, kind)

    @property
    def num_vars(self) -> int:
        return len(self.cardinalities)

    @property
    def num_cells(self) -> int:
        return prod(self.cardinalities)

    @property
    def flat(self) -> np.ndarray:
        return self.counts.reshape(-1)

    @property
    def total(self):
        return self.counts.sum().item()

    def value(self, cell: CellIndex):
        return self.counts[check_cell(self, cell)].item()

    def all_vars(self) -> VarSet:
        return VarSet.full(self.num_vars)

    def cell_from_names(self, names: Sequence[str]) -> CellIndex:
        """Translate per-axis category names into a 0-based cell index."""
        if self.labels is None:
            raise RangeError("table carries no category labels")
        if len(names) != self.num_vars:
            raise RangeError(
                f"expected {self.num_vars} coordinates, got {len(names)}"
            )
        cell = []
        for j, name in enumerate(names):
            try:
                cell.append(self.labels[j].index(str(name)))
            except ValueError:
                raise RangeError(
                    f"unknown category {name!r} on axis {j + 1}"
                ) from None
        return tuple(cell)


def check_cell(table: ContingencyTable, cell: CellIndex) -> CellIndex:
    cell = tuple(int(x) for x in cell)
    if len(cell) != table.num_vars:
        raise RangeError(
            f"cell {cell} has {len(cell)} coordinates, table has {table.num_vars}"
        )
    for j, (x, c) in enumerate(zip(cell, table.cardinalities)):
        if not 0 <= x < c:
            raise RangeError(f"coordinate {x} out of range 0..{c - 1} on axis {j + 1}")
    return cell


@dataclass(frozen=True)
class MarginalTable:
    """A table over the axes in ``vars`` (ascending), summed over the rest."""

    vars: VarSet
    table: ContingencyTable

    def __post_init__(self) -> None:
        if self.table.num_vars != len(self.vars):
            raise RangeError(
                f"marginal over {self.vars} must have {len(self.vars)} axes, "
                f"got {self.table.num_vars}"
            )

    @property
    def total(self):
        return self.table.total

    def value(self, partial_cell: CellIndex):
        return self.table.value(partial_cell)


def marginalize(table: ContingencyTable, a: VarSet) -> MarginalTable:
    """Sum the table onto the axes in ``a``.

    ``a`` equal to all variables returns the table unchanged; the empty set
    yields the grand total as a 0-way table with a single entry.
    """
    if a.num_vars != table.num_vars:
        raise RangeError(
            f"subset over {a.num_vars} variables applied to a "
            f"{table.num_vars}-way table"
        )
    drop = tuple(j for j in range(table.num_vars) if j not in a.axes)
    counts = table.counts.sum(axis=drop) if drop else table.counts
    cards = tuple(table.cardinalities[j] for j in a.axes)
    labels = (
        tuple(table.labels[j] for j in a.axes) if table.labels is not None else None
    )
    return MarginalTable(a, ContingencyTable(cards, counts, labels, table.kind))


def project_cell(cell: CellIndex, a: VarSet) -> CellIndex:
    """Restrict a full multi-index to the coordinates in ``a``, ascending."""
    if len(cell) != a.num_vars:
        raise RangeError(
            f"cell {cell} has {len(cell)} coordinates, subset is over {a.num_vars}"
        )
    return tuple(cell[j] for j in a.axes)


def cell_margin_fn(table: ContingencyTable, anchor: CellIndex) -> LatticeFunction:
    """All 2^l marginal counts at one anchor cell, as a lattice function.

    F(a) is the marginal table over ``a`` evaluated at the anchor's projected
    coordinates, so F(empty) is the grand total and F(L) the anchor's own
    count. F is decreasing and supermodular on 2^L for every table and anchor.

    Computed by collapsing each axis to (at anchor, elsewhere) and running one
    subset-sum transform, O(#cells + l 2^l) overall.
    """
    anchor = check_cell(table, anchor)
    l = table.num_vars
    check_lattice_cap(l)
    collapsed = table.counts
    for j, x0 in enumerate(anchor):
        at = np.take(collapsed, [x0], axis=j)
        rest = collapsed.sum(axis=j, keepdims=True) - at
        collapsed = np.concatenate([at, rest], axis=j)
    # Axis j out of place -> bit j; transpose so C-order ravel matches masks.
    flat = collapsed.transpose(tuple(reversed(range(l)))).reshape(-1)
    accum = subset_sum_transform(flat, l)
    full = (1 << l) - 1
    masks = np.arange(1 << l)
    return LatticeFunction(l, accum[full ^ masks])

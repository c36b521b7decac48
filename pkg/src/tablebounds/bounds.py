"""Frechet-type cell bounds computed from a family of released marginals.

Every operation here takes a ``MarginalFamily`` -- the marginals an agency
actually released -- never the underlying table; the full table, when known,
is only used by callers to validate. Families are checked for mutual
consistency at construction and rejected with a witness otherwise.

Bound families implemented, each per target cell and with provenance:

- the classical two-margin bounds on a 2-way table,
- the 3-way bounds from 1-dimensional or 2-dimensional margins,
- the d-dimensional generalization using all d-subset margins, with the
  normalized (per-unit-total) restatement of its lower bound,
- the cover/separator decomposition bound min n(C_i) vs
  sum n(C_i) - sum n(S_j),
- lower bounds rearranged out of the Fan inequality for an arbitrary
  sequence of released subsets,
- a comparison showing the decomposition bound dominates the Fan route on
  three-set covers.

Lower bounds that involve division are computed in exact rational arithmetic;
for integer families the reported value is the ceiling (a count is an
integer, so rounding up is still sound and strictly tighter).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb
from typing import Literal, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    InconsistentFamilyError,
    MissingMarginalError,
    RangeError,
)
from .table import (
    INTEGER,
    CellIndex,
    ContingencyTable,
    MarginalTable,
    marginalize,
)
from .varset import VarSet

CONSISTENCY_RTOL = 1e-9


class MarginalFamily:
    """A set of released marginal tables {n(a)} over known subsets a.

    The grand total is always implicitly available (derivable from any
    member). All members must agree exactly on common sub-marginals; this is
    validated eagerly so no bound is ever computed from crossed inputs.
    """

    def __init__(
        self,
        cardinalities: Sequence[int],
        marginals: Sequence[MarginalTable],
        labels=None,
    ):
        self.cardinalities = tuple(int(c) for c in cardinalities)
        if any(c < 1 for c in self.cardinalities):
            raise RangeError(f"cardinalities must be positive, got {cardinalities}")
        self.num_vars = len(self.cardinalities)
        self.labels = (
            tuple(tuple(str(x) for x in axis) for axis in labels)
            if labels is not None
            else None
        )
        if not marginals:
            raise RangeError("a family needs at least one marginal")
        self.released: dict[int, MarginalTable] = {}
        kinds = set()
        for m in marginals:
            if m.vars.num_vars != self.num_vars:
                raise RangeError(
                    f"marginal over {m.vars} does not match {self.num_vars} variables"
                )
            expect = tuple(self.cardinalities[j] for j in m.vars.axes)
            if m.table.cardinalities != expect:
                raise RangeError(
                    f"marginal over {m.vars} has shape {m.table.cardinalities}, "
                    f"expected {expect}"
                )
            if m.vars.mask in self.released:
                raise RangeError(f"marginal over {m.vars} released twice")
            self.released[m.vars.mask] = m
            kinds.add(m.table.kind)
        if len(kinds) > 1:
            raise RangeError("cannot mix integer and real marginals in one family")
        self.kind = kinds.pop()
        self._cache: dict[int, MarginalTable] = dict(self.released)
        self._accessors: dict[int, tuple] = {}
        self._total = None
        self._validate_consistency()

    @classmethod
    def from_table(
        cls, table: ContingencyTable, subsets: Sequence[VarSet]
    ) -> "MarginalFamily":
        """Release the given marginals of a known table."""
        return cls(
            table.cardinalities,
            [marginalize(table, a) for a in subsets],
            labels=table.labels,
        )

    def _validate_consistency(self) -> None:
        items = sorted(self.released.items())
        for (mask_a, marg_a), (mask_b, marg_b) in itertools.combinations(items, 2):
            common = VarSet(mask_a & mask_b, self.num_vars)
            if common.mask == 0:
                va = np.asarray([marg_a.table.counts.sum()])
                vb = np.asarray([marg_b.table.counts.sum()])
            else:
                sub_a = marginalize(marg_a.table, _relative(marg_a.vars, common))
                sub_b = marginalize(marg_b.table, _relative(marg_b.vars, common))
                va, vb = sub_a.table.flat, sub_b.table.flat
            if self.kind == INTEGER:
                agree = np.array_equal(va, vb)
            else:
                scale = max(1.0, float(np.max(np.abs(va)))) if va.size else 1.0
                agree = np.allclose(va, vb, rtol=0, atol=CONSISTENCY_RTOL * scale)
            if not agree:
                bad = int(np.argmax(va != vb))
                common_cards = tuple(self.cardinalities[j] for j in common.axes)
                cell = (
                    np.unravel_index(bad, common_cards) if common_cards else ()
                )
                raise InconsistentFamilyError(
                    witness={
                        "subsets": (
                            VarSet(mask_a, self.num_vars),
                            VarSet(mask_b, self.num_vars),
                        ),
                        "common": common,
                        "cell": tuple(int(x) for x in cell),
                        "values": (va[bad].item(), vb[bad].item()),
                    },
                    message=(
                        f"marginals over {VarSet(mask_a, self.num_vars)} and "
                        f"{VarSet(mask_b, self.num_vars)} disagree on {common} "
                        f"at cell {tuple(int(x) for x in cell)}: "
                        f"{va[bad].item()} vs {vb[bad].item()}"
                    ),
                )

    def subsets(self) -> tuple[VarSet, ...]:
        return tuple(VarSet(m, self.num_vars) for m in sorted(self.released))

    def is_derivable(self, a: VarSet) -> bool:
        """True when some released superset of ``a`` exists (or a is empty)."""
        if a.mask == 0 or a.mask in self.released:
            return True
        return any(a.mask & ~m == 0 for m in self.released)

    def marginal(self, a: VarSet) -> MarginalTable:
        """n(a), released directly or derived from the smallest released superset."""
        if a.num_vars != self.num_vars:
            raise RangeError("subset over a different variable count")
        if a.mask in self._cache:
            return self._cache[a.mask]
        supersets = [m for m in self.released if a.mask & ~m == 0]
        if not supersets:
            raise MissingMarginalError([a])
        src_mask = min(supersets, key=lambda m: (m.bit_count(), m))
        src = self.released[src_mask]
        derived = marginalize(src.table, _relative(src.vars, a))
        result = MarginalTable(a, derived.table)
        self._cache[a.mask] = result
        return result

    def _value(self, a: VarSet, cell: CellIndex):
        """Marginal count at the projection of an already-validated cell."""
        entry = self._accessors.get(a.mask)
        if entry is None:
            marg = self.marginal(a)
            axes = a.axes
            strides = [0] * len(axes)
            acc = 1
            for i in range(len(axes) - 1, -1, -1):
                strides[i] = acc
                acc *= self.cardinalities[axes[i]]
            entry = (marg.table.flat, tuple(zip(axes, strides)))
            self._accessors[a.mask] = entry
        flat, axstrides = entry
        idx = 0
        for ax, st in axstrides:
            idx += cell[ax] * st
        return flat[idx].item()

    def value(self, a: VarSet, cell: CellIndex):
        """The marginal count n(a) at the projection of a full cell index."""
        return self._value(a, self.check_cell(cell))

    @property
    def total(self):
        if self._total is None:
            self._total = self.marginal(VarSet.empty(self.num_vars)).table.total
        return self._total

    def check_cell(self, cell: CellIndex) -> CellIndex:
        cell = tuple(int(x) for x in cell)
        if len(cell) != self.num_vars:
            raise RangeError(
                f"cell {cell} has {len(cell)} coordinates, family has {self.num_vars}"
            )
        for j, (x, c) in enumerate(zip(cell, self.cardinalities)):
            if not 0 <= x < c:
                raise RangeError(
                    f"coordinate {x} out of range 0..{c - 1} on axis {j + 1}"
                )
        return cell

    def require(self, subsets: Sequence[VarSet]) -> None:
        missing = [a for a in subsets if not self.is_derivable(a)]
        if missing:
            raise MissingMarginalError(sorted(set(missing), key=lambda a: a.mask))


def _relative(outer: VarSet, inner: VarSet) -> VarSet:
    """Re-index ``inner`` (a subset of ``outer``) over outer's own axes."""
    if not inner <= outer:
        raise RangeError(f"{inner} is not contained in {outer}")
    positions = {v: i + 1 for i, v in enumerate(outer.vars)}
    return VarSet.from_vars([positions[v] for v in inner.vars], len(outer))


@dataclass(frozen=True)
class BoundReport:
    """Per-cell lower/upper bounds with the formula and inputs that made them."""

    cell: CellIndex
    lower: float
    upper: float
    formula: str
    subsets: tuple[VarSet, ...]
    terms: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.lower < 0:
            raise RangeError(f"negative lower bound {self.lower}")
        slack = 0.0 if isinstance(self.lower, int) else 1e-9
        if self.lower > self.upper + slack:
            raise RangeError(
                f"crossed bounds [{self.lower}, {self.upper}] from {self.formula}"
            )

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, value) -> bool:
        return self.lower <= value <= self.upper


def _emit_lower(raw, integer_mode: bool):
    """Clamp at zero; integer families report the (still sound) ceiling."""
    if raw <= 0:
        return 0 if integer_mode else 0.0
    if integer_mode:
        return raw if isinstance(raw, int) else ceil(raw)
    return float(raw)


def _as_number(x, integer_mode: bool):
    return int(x) if integer_mode else float(x)


def simple_frechet(fam: MarginalFamily, cell: CellIndex) -> BoundReport:
    """Two-margin bounds on a 2-way cell: min of the margins above,
    their sum minus the total (clamped at zero) below."""
    if fam.num_vars != 2:
        raise RangeError("simple_frechet applies to 2-way tables")
    cell = fam.check_cell(cell)
    a1, a2 = VarSet.from_vars([1], 2), VarSet.from_vars([2], 2)
    fam.require([a1, a2])
    row, col = fam._value(a1, cell), fam._value(a2, cell)
    total = fam.total
    integer_mode = fam.kind == INTEGER
    lower = _emit_lower(row + col - total, integer_mode)
    return BoundReport(
        cell=cell,
        lower=lower,
        upper=min(row, col),
        formula="simple",
        subsets=(a1, a2),
        terms={"row": row, "col": col, "total": total},
    )


def frechet_3way(
    fam: MarginalFamily, cell: CellIndex, basis: Literal["one-dim", "two-dim"]
) -> BoundReport:
    """3-way bounds from the three 1-way margins or the three 2-way margins."""
    if fam.num_vars != 3:
        raise RangeError("frechet_3way applies to 3-way tables")
    cell = fam.check_cell(cell)
    integer_mode = fam.kind == INTEGER
    if basis == "one-dim":
        singles = [VarSet.from_vars([j], 3) for j in (1, 2, 3)]
        fam.require(singles)
        vals = [fam._value(a, cell) for a in singles]
        total = fam.total
        lower = _emit_lower(sum(vals) - 2 * total, integer_mode)
        return BoundReport(
            cell=cell,
            lower=lower,
            upper=min(vals),
            formula="3way:one-dim",
            subsets=tuple(singles),
            terms={"margins": vals, "total": total},
        )
    if basis == "two-dim":
        pairs = [VarSet.from_vars(v, 3) for v in ([1, 2], [1, 3], [2, 3])]
        fam.require(pairs)
        pair_vals = {a.mask: fam._value(a, cell) for a in pairs}
        lower_terms = {}
        best = 0
        for a, b in itertools.combinations(pairs, 2):
            common = a & b
            term = pair_vals[a.mask] + pair_vals[b.mask] - fam._value(common, cell)
            lower_terms[f"{a}+{b}-{common}"] = term
            best = max(best, term)
        lower = _emit_lower(best, integer_mode)
        return BoundReport(
            cell=cell,
            lower=lower,
            upper=min(pair_vals.values()),
            formula="3way:two-dim",
            subsets=tuple(pairs),
            terms=lower_terms,
        )
    raise RangeError(f"unknown basis {basis!r}")


def frechet_ddim(fam: MarginalFamily, cell: CellIndex, d: int) -> BoundReport:
    """Bounds on the full cell from all C(l, d) margins of dimension d.

    Upper: the minimum d-subset margin. Lower: the margin sum scaled by
    1/C(l-1, d-1), minus (C(l,d)/C(l-1,d-1) - 1) times the total, clamped at
    zero. Exact rationals internally; integer families report the ceiling.
    """
    l = fam.num_vars
    if not 1 <= d <= l:
        raise RangeError(f"d={d} out of range 1..{l}")
    cell = fam.check_cell(cell)
    subsets = [
        VarSet.from_vars(combo, l)
        for combo in itertools.combinations(range(1, l + 1), d)
    ]
    fam.require(subsets)
    vals = [fam._value(a, cell) for a in subsets]
    total = fam.total
    denom = comb(l - 1, d - 1)
    integer_mode = fam.kind == INTEGER
    if integer_mode:
        raw = Fraction(sum(vals), denom) - (Fraction(comb(l, d), denom) - 1) * total
    else:
        raw = sum(vals) / denom - (comb(l, d) / denom - 1) * total
    return BoundReport(
        cell=cell,
        lower=_emit_lower(raw, integer_mode),
        upper=min(vals),
        formula=f"ddim:{d}",
        subsets=tuple(subsets),
        terms={
            "margin_sum": sum(vals),
            "total": total,
            "denominator": denom,
            "lower_exact": raw,
        },
    )


@dataclass(frozen=True)
class KwerelStats:
    """The d-dimensional lower bound restated per unit of the grand total."""

    s_d: Fraction
    p_full: Fraction
    d: int
    num_vars: int

    def __post_init__(self) -> None:
        if self.s_d < 0:
            raise RangeError("normalized margin sum cannot be negative")


def kwerel_form(fam: MarginalFamily, cell: CellIndex, d: int) -> KwerelStats:
    """Normalized restatement: S_d = margin sum / total, and the resulting
    lower bound S_d / C(l-1, d-1) - l/d + 1 on the cell's share of the total.

    Multiplying the bound by the total recovers the unclamped d-dimensional
    lower bound exactly (rational identity, relying on C(l,d)/C(l-1,d-1)=l/d).
    """
    l = fam.num_vars
    if not 1 <= d <= l:
        raise RangeError(f"d={d} out of range 1..{l}")
    cell = fam.check_cell(cell)
    total = fam.total
    if total == 0:
        raise RangeError("normalized form undefined for a zero grand total")
    subsets = [
        VarSet.from_vars(combo, l)
        for combo in itertools.combinations(range(1, l + 1), d)
    ]
    fam.require(subsets)
    margin_sum = sum(fam._value(a, cell) for a in subsets)
    s_d = Fraction(margin_sum) / Fraction(total)
    p_full = s_d / comb(l - 1, d - 1) - Fraction(l, d) + 1
    return KwerelStats(s_d=s_d, p_full=p_full, d=d, num_vars=l)


@dataclass(frozen=True)
class Decomposition:
    """An ordered cover C_1..C_d of the variables with running-intersection
    separators S_j = (C_1 | ... | C_{j-1}) & C_j."""

    cover: tuple[VarSet, ...]

    def __post_init__(self) -> None:
        if not self.cover:
            raise RangeError("a decomposition needs at least one cover set")
        cover = tuple(self.cover)
        l = cover[0].num_vars
        union = VarSet.empty(l)
        for c in cover:
            union = union | c
        if union.mask != VarSet.full(l).mask:
            raise RangeError(f"cover {[str(c) for c in cover]} does not equal L")
        object.__setattr__(self, "cover", cover)

    @property
    def num_vars(self) -> int:
        return self.cover[0].num_vars

    @property
    def separators(self) -> tuple[VarSet, ...]:
        seps = []
        seen = self.cover[0]
        for c in self.cover[1:]:
            seps.append(seen & c)
            seen = seen | c
        return tuple(seps)


def decomposition_bound(
    fam: MarginalFamily, decomp: Decomposition, cell: CellIndex
) -> BoundReport:
    """Cover/separator bounds: min over n(C_i) above, and
    sum n(C_i) - sum n(S_j) below, clamped at zero.

    Separator marginals are obtained by marginalizing the released n(C_j),
    since each S_j sits inside its C_j.
    """
    if decomp.num_vars != fam.num_vars:
        raise RangeError("decomposition over a different variable count")
    cell = fam.check_cell(cell)
    fam.require(decomp.cover)
    cover_vals = [fam._value(c, cell) for c in decomp.cover]
    sep_vals = [fam._value(s, cell) for s in decomp.separators]
    integer_mode = fam.kind == INTEGER
    raw = sum(cover_vals) - sum(sep_vals)
    return BoundReport(
        cell=cell,
        lower=_emit_lower(raw, integer_mode),
        upper=min(cover_vals),
        formula="decomp:" + "|".join(str(c) for c in decomp.cover),
        subsets=tuple(decomp.cover),
        terms={
            "cover_values": cover_vals,
            "separator_values": sep_vals,
            "separators": tuple(str(s) for s in decomp.separators),
            "lower_exact": raw,
        },
    )


def fan_lower_bound(
    fam: MarginalFamily, xs: Sequence[VarSet], p: int, cell: CellIndex
) -> BoundReport:
    """Rearrange the Fan inequality into a lower bound on the full cell.

    Writing F(a) for the released marginal value at the cell's projection,
    the inequality bounds the sum of F over p-wise meets of ``xs`` by the
    weighted right-hand terms. Every right-hand term whose join-of-meets
    equals the full set L is an occurrence of the unknown cell count; moving
    those terms to the left and dividing by their total weight gives

        cell >= (lhs - other rhs terms) / (weight of the L terms),

    clamped at zero (integer families report the ceiling). All moved terms
    are recorded in the report. When no right-hand term realizes L, no cell
    bound exists; the raw inequality is still returned (lower bound zero,
    terms flagged) rather than raising.

    Every p-wise meet and every non-L join-of-meets must be released or
    derivable; otherwise MissingMarginalError lists the gaps.

    Folding every full-set term into the unknown can make this bound
    strictly tighter than the cover/separator bound on the same inputs; see
    compare_fan_vs_decomposition for the value-for-value comparison.
    """
    l = fam.num_vars
    q = len(xs)
    if not 1 <= p <= q:
        raise RangeError(f"p={p} out of range 1..{q}")
    cell = fam.check_cell(cell)
    for x in xs:
        if x.num_vars != l:
            raise RangeError("sequence element over a different variable count")
    full = VarSet.full(l)
    masks = [x.mask for x in xs]

    lhs_subsets = []
    for combo in itertools.combinations(masks, p):
        m = combo[0]
        for x in combo[1:]:
            m &= x
        lhs_subsets.append(VarSet(m, l))

    rhs = []  # (k, coefficient, join-of-meets subset)
    for k in range(p, q + 1):
        agg = 0
        for combo in itertools.combinations(masks, k):
            m = combo[0]
            for x in combo[1:]:
                m &= x
            agg |= m
        rhs.append((k, comb(k - 1, p - 1), VarSet(agg, l)))

    moved = [(k, c) for k, c, sub in rhs if sub.mask == full.mask]
    kept = [(k, c, sub) for k, c, sub in rhs if sub.mask != full.mask]
    fam.require(lhs_subsets + [sub for _, _, sub in kept])

    lhs = sum(fam._value(s, cell) for s in lhs_subsets)
    kept_value = sum(c * fam._value(sub, cell) for _, c, sub in kept)
    weight = sum(c for _, c in moved)

    integer_mode = fam.kind == INTEGER
    terms = {
        "lhs": lhs,
        "lhs_subsets": tuple(str(s) for s in lhs_subsets),
        "rhs_terms": tuple((k, c, str(sub)) for k, c, sub in rhs),
        "moved_k": tuple(k for k, _ in moved),
        "full_weight": weight,
        "has_cell_bound": bool(moved),
    }
    if moved:
        if integer_mode:
            raw = Fraction(lhs - kept_value, weight)
        else:
            raw = (lhs - kept_value) / weight
        terms["lower_exact"] = raw
        lower = _emit_lower(raw, integer_mode)
    else:
        lower = _as_number(0, integer_mode)

    # n decreasing makes any derivable sequence element a valid upper bound;
    # fall back to the total, always derivable and always valid.
    cand = [fam._value(x, cell) for x in xs if fam.is_derivable(x)]
    upper = min(cand) if cand else fam.total

    return BoundReport(
        cell=cell,
        lower=lower,
        upper=upper,
        formula=f"fan:p={p},q={q}",
        subsets=tuple(xs),
        terms=terms,
    )


@dataclass(frozen=True)
class FanDecompositionComparison:
    """Side-by-side lowers for a 3-set cover: separator route vs Fan route."""

    cell: CellIndex
    decomposition: BoundReport
    fan: Optional[BoundReport]
    fan_missing: tuple[VarSet, ...] = ()

    @property
    def dominance_holds(self) -> Optional[bool]:
        if self.fan is None:
            return None
        return self.decomposition.lower >= self.fan.lower


def compare_fan_vs_decomposition(
    fam: MarginalFamily, decomp: Decomposition, cell: CellIndex
) -> FanDecompositionComparison:
    """Compute both lower bounds for a 3-set cover and check dominance.

    The Fan route with the cover as the sequence and p=1 has right-hand
    terms at the join and the meet of the two separators, which here are
    kept as looked-up marginal values:

        cell >= n(C1) + n(C2) + n(C3) - n(S2 | S3) - n(S2 & S3)

    versus the separator route's n(S2) + n(S3). Supermodularity of the
    anchored marginal function makes the separator route at least as tight
    whenever both sides are defined, so a violation raises (it would falsify
    the implementation, not the inequality). When the Fan side needs a
    marginal the family cannot provide -- for covers whose separators join
    to the full set, that is the secret cell itself -- the Fan side is
    reported undefined rather than erroring.

    Note the distinction from fan_lower_bound, which treats every full-set
    right-hand term as an occurrence of the unknown and folds it into the
    left side; that rearranged bound is not dominated by the separator
    route in general.
    """
    if len(decomp.cover) != 3:
        raise RangeError("comparison is defined for covers of exactly 3 sets")
    cell = fam.check_cell(cell)
    dec = decomposition_bound(fam, decomp, cell)
    s2, s3 = decomp.separators
    join, meet = s2 | s3, s2 & s3
    needed = list(decomp.cover) + [join, meet]
    missing = tuple(a for a in needed if not fam.is_derivable(a))
    if missing:
        return FanDecompositionComparison(
            cell=cell, decomposition=dec, fan=None, fan_missing=missing
        )
    cover_vals = [fam._value(c, cell) for c in decomp.cover]
    raw = sum(cover_vals) - fam._value(join, cell) - fam._value(meet, cell)
    integer_mode = fam.kind == INTEGER
    fan = BoundReport(
        cell=cell,
        lower=_emit_lower(raw, integer_mode),
        upper=min(cover_vals),
        formula="fan-literal:d=3",
        subsets=tuple(decomp.cover),
        terms={
            "separator_join": str(join),
            "separator_meet": str(meet),
            "lower_exact": raw,
        },
    )
    if dec.lower < fan.lower:
        raise RangeError(
            f"separator bound {dec.lower} fell below the literal fan bound "
            f"{fan.lower} at cell {cell}; this falsifies the implementation"
        )
    return FanDecompositionComparison(cell=cell, decomposition=dec, fan=fan)


def best_bounds(fam: MarginalFamily, cell: CellIndex) -> BoundReport:
    """Intersect every applicable formula for this family at one cell.

    Uppers come from each released marginal directly (the marginal-sum
    function is decreasing). Lowers come from the d-dimensional formula for
    every d whose subsets are all derivable, from the pair bound
    n(a) + n(b) - n(a & b) for every released pair covering L, and from the
    exact count when the full set itself is derivable. Adding a marginal to
    the family can only add candidates, so the best bound never loosens.
    """
    cell = fam.check_cell(cell)
    l = fam.num_vars
    integer_mode = fam.kind == INTEGER
    full = VarSet.full(l)

    uppers: dict[str, float] = {}
    for a in fam.subsets():
        uppers[f"n({a})"] = fam._value(a, cell)
    uppers["total"] = fam.total

    lowers: dict[str, object] = {"zero": _as_number(0, integer_mode)}
    for d in range(1, l + 1):
        subsets = [
            VarSet.from_vars(c, l)
            for c in itertools.combinations(range(1, l + 1), d)
        ]
        if all(fam.is_derivable(a) for a in subsets):
            lowers[f"ddim:{d}"] = frechet_ddim(fam, cell, d).lower
    released = fam.subsets()
    for a, b in itertools.combinations(released, 2):
        if (a | b).mask == full.mask:
            term = fam._value(a, cell) + fam._value(b, cell) - fam._value(a & b, cell)
            lowers[f"pair:{a}|{b}"] = max(term, _as_number(0, integer_mode))
    if fam.is_derivable(full):
        exact = fam._value(full, cell)
        lowers["exact"] = exact
        uppers["exact"] = exact

    lower_name = max(lowers, key=lambda k: lowers[k])
    upper_name = min(uppers, key=lambda k: uppers[k])
    return BoundReport(
        cell=cell,
        lower=lowers[lower_name],
        upper=uppers[upper_name],
        formula="best",
        subsets=tuple(released),
        terms={
            "lowers": lowers,
            "uppers": uppers,
            "lower_from": lower_name,
            "upper_from": upper_name,
        },
    )


def validate_report_against_table(
    report: BoundReport, table: ContingencyTable
) -> bool:
    """True when the true cell entry lies inside the reported bounds."""
    return report.contains(table.value(report.cell))

"""Real-valued functions on the subset lattice 2^L and their structure checks.

A ``LatticeFunction`` stores one value per subset of {1, ..., l}, indexed by
bitmask. The checkers decide monotonicity and supermodularity

    F(a | b) + F(a & b) >= F(a) + F(b)

and return an explicit witness pair on failure. Constructors cover the
indicator of an up-set, cumulative (subset-sum) functions via the fast zeta
transform, and the two-sided Ky Fan inequality evaluator for sequences of
lattice elements.

Integer-valued functions are compared exactly; real-valued comparisons use an
absolute tolerance of 1e-9 scaled by max|F|.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Literal, Optional, Sequence

import numpy as np

from .errors import RangeError
from .varset import VarSet, check_lattice_cap

REAL_RTOL = 1e-9

# Guards for fan_evaluate: explicit failure beats silent combinatorial blowup.
FAN_SEQUENCE_CAP = 20
FAN_CHOOSE_CAP = 10**6


@dataclass(frozen=True)
class LatticeFunction:
    """A total function 2^L -> R, dense over all 2**num_vars bitmasks."""

    num_vars: int
    values: np.ndarray

    def __post_init__(self) -> None:
        check_lattice_cap(self.num_vars)
        vals = np.asarray(self.values)
        if vals.shape != (1 << self.num_vars,):
            raise RangeError(
                f"expected {1 << self.num_vars} values for {self.num_vars} "
                f"variables, got shape {vals.shape}"
            )
        if not np.issubdtype(vals.dtype, np.integer):
            vals = np.asarray(vals, dtype=np.float64)
            if not np.all(np.isfinite(vals)):
                raise RangeError("lattice function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def integer_valued(self) -> bool:
        return np.issubdtype(self.values.dtype, np.integer)

    def value(self, a: VarSet):
        if a.num_vars != self.num_vars:
            raise RangeError("subset is over a different variable count")
        return self.values[a.mask].item()

    def __call__(self, a: VarSet):
        return self.value(a)

    def tolerance(self) -> float:
        """Comparison slack: exact for integers, scaled 1e-9 for reals."""
        if self.integer_valued:
            return 0.0
        scale = float(np.max(np.abs(self.values))) if self.values.size else 0.0
        return REAL_RTOL * max(1.0, scale)


@dataclass(frozen=True)
class Witness:
    """A concrete violation of a checked inequality.

    ``a`` and ``b`` are the two lattice elements (or table cells, for the
    total-positivity checks) exhibiting the failure; re-evaluating the checked
    inequality on them reproduces ``lhs`` and ``rhs`` exactly. The violated
    comparison per kind:

    - ``monotone-violation``: lhs = F at the smaller argument of the failing
      ordered pair, rhs = F at the larger; the required direction failed.
    - ``supermodular-violation``: lhs = F(a|b) + F(a&b) < rhs = F(a) + F(b).
    - ``mtp2-violation``: lhs = combination at (a, b), rhs at (a^b, avb).
    """

    kind: str
    a: object
    b: object
    lhs: float
    rhs: float


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    witness: Optional[Witness] = None

    def __bool__(self) -> bool:
        return self.ok


def _monotone_check(fn: LatticeFunction, increasing: bool) -> CheckResult:
    """Check all covering pairs (a, a|{i}); equivalent to all pairs by transitivity."""
    vals = fn.values
    tol = fn.tolerance()
    size = 1 << fn.num_vars
    best: Optional[tuple[int, int]] = None
    masks = np.arange(size)
    for j in range(fn.num_vars):
        bit = 1 << j
        low = masks[(masks & bit) == 0]
        below, above = vals[low], vals[low | bit]
        bad = (below + tol < above) if not increasing else (above + tol < below)
        if bad.any():
            a = int(low[np.argmax(bad)])
            cand = (a, a | bit)
            if best is None or cand < best:
                best = cand
    if best is None:
        return CheckResult(True)
    a, b = best
    witness = Witness(
        kind="monotone-violation",
        a=VarSet(a, fn.num_vars),
        b=VarSet(b, fn.num_vars),
        lhs=vals[a].item(),
        rhs=vals[b].item(),
    )
    return CheckResult(False, witness)


def is_decreasing(fn: LatticeFunction) -> CheckResult:
    """True iff F(a) >= F(b) whenever a is a subset of b."""
    return _monotone_check(fn, increasing=False)


def is_increasing(fn: LatticeFunction) -> CheckResult:
    """True iff F(a) <= F(b) whenever a is a subset of b."""
    return _monotone_check(fn, increasing=True)


def _supermodular_witness(fn: LatticeFunction, a: int, b: int) -> Witness:
    vals = fn.values
    return Witness(
        kind="supermodular-violation",
        a=VarSet(a, fn.num_vars),
        b=VarSet(b, fn.num_vars),
        lhs=(vals[a | b] + vals[a & b]).item(),
        rhs=(vals[a] + vals[b]).item(),
    )


def is_supermodular(
    fn: LatticeFunction, mode: Literal["local", "exhaustive"] = "local"
) -> CheckResult:
    """Check F(a|b) + F(a&b) >= F(a) + F(b).

    ``local`` checks F(a|{i,j}) + F(a) >= F(a|{i}) + F(a|{j}) for all a and
    i != j outside a, which is equivalent on 2^L and costs O(l^2 2^l).
    ``exhaustive`` scans all 4^l ordered pairs and serves as the oracle mode.
    The witness, when present, is the lexicographically first violating pair.
    """
    vals = fn.values
    tol = fn.tolerance()
    size = 1 << fn.num_vars
    if mode == "exhaustive":
        masks = np.arange(size)
        for a in range(size):
            union = masks | a
            inter = masks & a
            bad = vals[union] + vals[inter] + tol < vals[a] + vals
            if bad.any():
                b = int(np.argmax(bad))
                return CheckResult(False, _supermodular_witness(fn, a, b))
        return CheckResult(True)
    if mode != "local":
        raise RangeError(f"unknown supermodularity mode {mode!r}")
    masks = np.arange(size)
    best: Optional[tuple[int, int]] = None
    for i in range(fn.num_vars):
        for j in range(i + 1, fn.num_vars):
            bi, bj = 1 << i, 1 << j
            base = masks[(masks & (bi | bj)) == 0]
            bad = vals[base | bi | bj] + vals[base] + tol < vals[base | bi] + vals[base | bj]
            if bad.any():
                a = int(base[np.argmax(bad)])
                cand = (a | bi, a | bj)
                if best is None or cand < best:
                    best = cand
    if best is None:
        return CheckResult(True)
    return CheckResult(False, _supermodular_witness(fn, *best))


def is_submodular(
    fn: LatticeFunction, mode: Literal["local", "exhaustive"] = "local"
) -> CheckResult:
    """Dual check, F(a|b) + F(a&b) <= F(a) + F(b); equivalent to -F supermodular."""
    negated = LatticeFunction(fn.num_vars, -np.asarray(fn.values))
    result = is_supermodular(negated, mode)
    if result.ok:
        return result
    w = result.witness
    witness = Witness(kind=w.kind, a=w.a, b=w.b, lhs=-w.lhs, rhs=-w.rhs)
    return CheckResult(False, witness)


def indicator_fn(s: VarSet, num_vars: int | None = None) -> LatticeFunction:
    """The indicator of the up-set of s: F(a) = 1 if s is a subset of a, else 0."""
    if num_vars is None:
        num_vars = s.num_vars
    if s.num_vars != num_vars:
        raise RangeError("indicator base set is over a different variable count")
    check_lattice_cap(num_vars)
    masks = np.arange(1 << num_vars)
    return LatticeFunction(num_vars, ((masks & s.mask) == s.mask).astype(np.int64))


def subset_sum_transform(values: np.ndarray, num_vars: int) -> np.ndarray:
    """Fast zeta transform: out[a] = sum of values[s] over s subset of a, O(l 2^l)."""
    out = np.array(values, copy=True)
    if out.shape != (1 << num_vars,):
        raise RangeError("value array length must be 2**num_vars")
    masks = np.arange(1 << num_vars)
    for j in range(num_vars):
        bit = 1 << j
        upper = masks[(masks & bit) != 0]
        out[upper] += out[upper ^ bit]
    return out


def cumulative_fn(g: LatticeFunction) -> LatticeFunction:
    """H(a) = sum of G(s) over s subset of a, for nonnegative G.

    Nonnegativity is what makes the result increasing and supermodular, so it
    is enforced rather than assumed.
    """
    if np.any(np.asarray(g.values) < 0):
        bad = int(np.argmax(np.asarray(g.values) < 0))
        raise RangeError(
            f"cumulative_fn requires nonnegative input; G({VarSet(bad, g.num_vars)}) < 0"
        )
    return LatticeFunction(g.num_vars, subset_sum_transform(g.values, g.num_vars))


def meet_restriction(fn: LatticeFunction, alpha: VarSet) -> LatticeFunction:
    """G(a) = F(a & alpha). Decreasing/increasing F stays so; useful for FKG."""
    if alpha.num_vars != fn.num_vars:
        raise RangeError("restriction set is over a different variable count")
    masks = np.arange(1 << fn.num_vars)
    return LatticeFunction(fn.num_vars, np.asarray(fn.values)[masks & alpha.mask])


def random_supermodular_fn(
    num_vars: int, rng: np.random.Generator, integer: bool = True, scale: int = 10
) -> LatticeFunction:
    """A guaranteed increasing + supermodular function.

    Draws i.i.d. nonnegative mass per subset and returns its cumulative
    function; no rejection sampling needed.
    """
    size = 1 << num_vars
    if integer:
        g = rng.integers(0, scale, size=size, dtype=np.int64)
    else:
        g = rng.random(size) * scale
    return cumulative_fn(LatticeFunction(num_vars, g))


@dataclass(frozen=True)
class FanTerm:
    """One k-term of the Fan right-hand side: coefficient * F(subset)."""

    k: int
    coefficient: int
    subset: VarSet
    value: float
    term: float


@dataclass(frozen=True)
class FanEvaluation:
    form: str
    p: int
    lhs: float
    rhs: float
    rhs_terms: tuple[FanTerm, ...]
    tolerance: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + self.tolerance


def _meets_of_tuples(xs_masks: Sequence[int], size: int, op) -> list[int]:
    out = []
    for combo in combinations(xs_masks, size):
        m = combo[0]
        for x in combo[1:]:
            m = op(m, x)
        out.append(m)
    return out


def fan_evaluate(
    fn: LatticeFunction,
    xs: Sequence[VarSet],
    p: int,
    form: Literal["primal", "dual"] = "primal",
) -> FanEvaluation:
    """Evaluate both sides of the Fan inequality for a sequence x_1..x_q.

    Primal form: sum of F over meets of all p-subsets of xs on the left;
    on the right, for each k = p..q, C(k-1, p-1) times F of the join of the
    meets of all k-subsets. The dual form swaps meet and join. For
    supermodular F the left side never exceeds the right; for p == q the two
    sides coincide identically.

    Returns both sides plus the per-k right-hand terms for inspection.
    Refuses q beyond FAN_SEQUENCE_CAP or C(q, p) beyond FAN_CHOOSE_CAP.
    """
    q = len(xs)
    if q == 0:
        raise RangeError("fan_evaluate needs at least one lattice element")
    if not 1 <= p <= q:
        raise RangeError(f"p={p} out of range 1..{q}")
    if q > FAN_SEQUENCE_CAP:
        raise RangeError(f"sequence length {q} exceeds cap {FAN_SEQUENCE_CAP}")
    if comb(q, p) > FAN_CHOOSE_CAP:
        raise RangeError(f"C({q},{p}) exceeds cap {FAN_CHOOSE_CAP}")
    for x in xs:
        if x.num_vars != fn.num_vars:
            raise RangeError("sequence element over a different variable count")
    if form == "primal":
        inner, outer = (lambda a, b: a & b), (lambda a, b: a | b)
    elif form == "dual":
        inner, outer = (lambda a, b: a | b), (lambda a, b: a & b)
    else:
        raise RangeError(f"unknown form {form!r}")

    vals = fn.values
    masks = [x.mask for x in xs]
    lhs = sum(vals[m].item() for m in _meets_of_tuples(masks, p, inner))
    terms = []
    rhs = 0
    for k in range(p, q + 1):
        inners = _meets_of_tuples(masks, k, inner)
        agg = inners[0]
        for m in inners[1:]:
            agg = outer(agg, m)
        coeff = comb(k - 1, p - 1)
        value = vals[agg].item()
        term = coeff * value
        rhs += term
        terms.append(FanTerm(k, coeff, VarSet(agg, fn.num_vars), value, term))
    return FanEvaluation(
        form=form,
        p=p,
        lhs=lhs,
        rhs=rhs,
        rhs_terms=tuple(terms),
        tolerance=fn.tolerance(),
    )

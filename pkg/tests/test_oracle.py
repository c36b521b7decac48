"""Enumeration correctness, sharpness, budgets, and certification."""

import itertools

import numpy as np
import pytest

from tablebounds import (
    BudgetExhaustedError,
    CertificationError,
    ContingencyTable,
    EnumerationBudget,
    MarginalFamily,
    MarginalTable,
    RangeError,
    VarSet,
    certify,
    count_tables,
    enumerate_tables,
    marginalize,
    sharp_bounds,
    sharp_bounds_all,
    simple_frechet,
)
from tablebounds.bounds import BoundReport


def two_way_family(rows, cols):
    return MarginalFamily(
        (len(rows), len(cols)),
        [
            MarginalTable(
                VarSet.from_vars([1], 2),
                ContingencyTable.from_flat((len(rows),), rows),
            ),
            MarginalTable(
                VarSet.from_vars([2], 2),
                ContingencyTable.from_flat((len(cols),), cols),
            ),
        ],
    )


def family_of(table, subsets):
    return MarginalFamily.from_table(
        table, [VarSet.from_vars(v, table.num_vars) for v in subsets]
    )


def random_table(rng, l, max_card=3, max_count=4):
    cards = tuple(int(c) for c in rng.integers(2, max_card + 1, size=l))
    return ContingencyTable.from_flat(
        cards, rng.integers(0, max_count + 1, size=int(np.prod(cards)))
    )


class TestEnumerate:
    def test_permutation_margins(self):
        fam = two_way_family([1, 1], [1, 1])
        tables = [t.flat.tolist() for t in enumerate_tables(fam)]
        assert tables == [[0, 1, 1, 0], [1, 0, 0, 1]]

    def test_two_by_two_asymmetric(self):
        fam = two_way_family([2, 1], [1, 2])
        budget = EnumerationBudget()
        assert count_tables(fam, budget) == 2
        assert budget.outcome == "complete"

    def test_lead_margins_contain_lead_table(self):
        fam = two_way_family([25, 5, 4], [8, 7, 19])
        budget = EnumerationBudget()
        seen = {tuple(t.flat.tolist()) for t in enumerate_tables(fam, budget)}
        assert budget.outcome == "complete"
        assert (7, 5, 13, 1, 1, 3, 0, 1, 3) in seen
        assert len(seen) == 309  # frozen regression count
        assert len(seen) == budget.tables

    def test_every_table_reproduces_margins(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            table = random_table(rng, int(rng.integers(2, 4)), max_count=2)
            subsets = [[j] for j in range(1, table.num_vars + 1)]
            fam = family_of(table, subsets)
            for found in itertools.islice(enumerate_tables(fam), 50):
                for v in subsets:
                    a = VarSet.from_vars(v, table.num_vars)
                    assert np.array_equal(
                        marginalize(found, a).table.counts,
                        fam.marginal(a).table.counts,
                    )

    def test_deterministic_order(self):
        fam = two_way_family([3, 2], [2, 3])
        first = [t.flat.tolist() for t in enumerate_tables(fam)]
        second = [t.flat.tolist() for t in enumerate_tables(fam)]
        assert first == second
        assert first == sorted(first)  # row-major DFS emits ascending

    def test_count_invariant_under_axis_swap(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            table = random_table(rng, 2, max_count=3)
            fam = family_of(table, [[1], [2]])
            swapped = ContingencyTable(
                table.cardinalities[::-1], np.asarray(table.counts).T
            )
            fam_swapped = family_of(swapped, [[1], [2]])
            assert count_tables(fam) == count_tables(fam_swapped)

    def test_three_way_with_pair_constraints(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            table = random_table(rng, 3, max_card=2, max_count=3)
            fam = family_of(table, [[1, 2], [1, 3], [2, 3]])
            found = [tuple(t.flat.tolist()) for t in enumerate_tables(fam)]
            assert tuple(table.flat.tolist()) in found
            # cross-check: filter a brute-force grid by all three margins
            if table.total <= 4:
                brute = 0
                for flat in itertools.product(
                    range(table.total + 1), repeat=8
                ):
                    if sum(flat) != table.total:
                        continue
                    cand = ContingencyTable.from_flat((2, 2, 2), flat)
                    if all(
                        np.array_equal(
                            marginalize(cand, a).table.counts,
                            fam.marginal(a).table.counts,
                        )
                        for a in fam.subsets()
                    ):
                        brute += 1
                assert brute == len(found)

    def test_infeasible_parity_family(self):
        # Pairwise-consistent one-way margins with pair tables forcing
        # x = y, y = z, x != z: no integer table exists.
        eq = ContingencyTable.from_flat((2, 2), [1, 0, 0, 1])
        ne = ContingencyTable.from_flat((2, 2), [0, 1, 1, 0])
        fam = MarginalFamily(
            (2, 2, 2),
            [
                MarginalTable(VarSet.from_vars([1, 2], 3), eq),
                MarginalTable(VarSet.from_vars([2, 3], 3), eq),
                MarginalTable(VarSet.from_vars([1, 3], 3), ne),
            ],
        )
        assert count_tables(fam) == 0
        with pytest.raises(RangeError):
            sharp_bounds(fam, (0, 0, 0))

    def test_real_family_rejected(self):
        t = ContingencyTable.from_flat((2, 2), [0.5, 1.0, 1.0, 0.5], kind="real")
        fam = family_of(t, [[1], [2]])
        with pytest.raises(RangeError):
            count_tables(fam)


class TestSharpBounds:
    def test_two_by_two_cell(self):
        sb = sharp_bounds(two_way_family([2, 1], [1, 2]), (0, 0))
        assert (sb.min_count, sb.max_count) == (0, 1)
        assert sb.outcome == "complete" and sb.is_sharp
        assert sb.tables_found == 2

    def test_lead_cell_matches_simple_frechet(self):
        fam = two_way_family([25, 5, 4], [8, 7, 19])
        sb = sharp_bounds(fam, (0, 0))
        assert (sb.min_count, sb.max_count) == (0, 8)

    def test_full_release_pins_every_cell(self):
        table = random_table(np.random.default_rng(3), 2)
        fam = family_of(table, [[1, 2]])
        for cell in itertools.product(*(range(c) for c in table.cardinalities)):
            sb = sharp_bounds(fam, cell)
            assert sb.min_count == sb.max_count == table.value(cell)

    def test_all_cells_matches_per_cell(self):
        fam = two_way_family([3, 2, 1], [2, 2, 2])
        mins, maxs, budget = sharp_bounds_all(fam)
        assert budget.outcome == "complete"
        for cell in itertools.product(range(3), range(3)):
            sb = sharp_bounds(two_way_family([3, 2, 1], [2, 2, 2]), cell)
            assert mins[cell] == sb.min_count
            assert maxs[cell] == sb.max_count

    def test_attaining_tables_recorded(self):
        fam = two_way_family([2, 1], [1, 2])
        sb = sharp_bounds(fam, (0, 0), keep_tables=True)
        assert sb.min_table[0] == sb.min_count
        assert sb.max_table[0] == sb.max_count


class TestBudget:
    def test_node_budget_flags_exhausted(self):
        fam = two_way_family([25, 5, 4], [8, 7, 19])
        budget = EnumerationBudget(max_nodes=200)
        sb = sharp_bounds(fam, (0, 0), budget)
        assert budget.outcome == "exhausted"
        assert not sb.is_sharp
        # partial extremes sit inside the true sharp range
        assert 0 <= sb.min_count and sb.max_count <= 8

    def test_table_budget_flags_exhausted(self):
        fam = two_way_family([25, 5, 4], [8, 7, 19])
        budget = EnumerationBudget(max_tables=5)
        n = count_tables(fam, budget)
        assert n == 5
        assert budget.outcome == "exhausted"

    def test_tiny_budget_raises_before_any_table(self):
        fam = two_way_family([25, 5, 4], [8, 7, 19])
        with pytest.raises(BudgetExhaustedError):
            sharp_bounds(fam, (0, 0), EnumerationBudget(max_nodes=1))


class TestCertify:
    def test_simple_frechet_zero_slack_on_lead(self):
        fam = two_way_family([25, 5, 4], [8, 7, 19])
        cert = certify(simple_frechet(fam, (0, 0)), fam)
        assert cert.ok
        assert (cert.slack_lower, cert.slack_upper) == (0, 0)

    def test_violating_report_hard_fails_with_table(self):
        fam = two_way_family([2, 1], [1, 2])
        bogus = BoundReport(
            cell=(0, 0), lower=1, upper=1, formula="bogus", subsets=()
        )
        with pytest.raises(CertificationError) as err:
            certify(bogus, fam)
        assert err.value.table is not None
        assert err.value.table[0] == 0  # the attaining table refutes the bound

    def test_exhausted_budget_refuses_certification(self):
        fam = two_way_family([25, 5, 4], [8, 7, 19])
        with pytest.raises(BudgetExhaustedError):
            certify(simple_frechet(fam, (0, 0)), fam, EnumerationBudget(max_nodes=50))

    def test_nonnegative_slack_random_sweep(self):
        rng = np.random.default_rng(4)
        for _ in range(40):
            table = random_table(rng, 2, max_count=3)
            fam = family_of(table, [[1], [2]])
            for cell in itertools.product(
                *(range(c) for c in table.cardinalities)
            ):
                cert = certify(simple_frechet(fam, cell), fam)
                assert cert.ok
                # 1-way margins on a 2-way table: classically zero slack
                assert (cert.slack_lower, cert.slack_upper) == (0, 0)

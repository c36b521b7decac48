"""Tables, marginalization, projection, and the anchored marginal function."""

import itertools

import numpy as np
import pytest

from tablebounds import (
    ContingencyTable,
    LatticeCapError,
    RangeError,
    VarSet,
    cell_margin_fn,
    is_decreasing,
    is_supermodular,
    marginalize,
    project_cell,
)
from tablebounds.bounds import _relative
from tablebounds.datasets import lead_table


@pytest.fixture
def lead():
    return lead_table()


def random_table(rng, max_vars=4, max_card=3, max_count=5):
    l = int(rng.integers(1, max_vars + 1))
    cards = tuple(int(c) for c in rng.integers(2, max_card + 1, size=l))
    flat = rng.integers(0, max_count + 1, size=int(np.prod(cards)))
    return ContingencyTable.from_flat(cards, flat)


class TestVarSet:
    def test_roundtrip_and_order(self):
        a = VarSet.from_vars([1, 3], 3)
        assert a.vars == (1, 3)
        assert a.axes == (0, 2)
        assert len(a) == 2
        assert 1 in a and 2 not in a
        assert str(a) == "{1,3}"

    def test_lattice_ops(self):
        a = VarSet.from_vars([1, 2], 3)
        b = VarSet.from_vars([2, 3], 3)
        assert (a | b) == VarSet.full(3)
        assert (a & b) == VarSet.from_vars([2], 3)
        assert (a - b) == VarSet.from_vars([1], 3)
        assert a.complement() == VarSet.from_vars([3], 3)
        assert VarSet.empty(3) <= a <= VarSet.full(3)
        assert not a <= b

    def test_validation(self):
        with pytest.raises(RangeError):
            VarSet.from_vars([4], 3)
        with pytest.raises(RangeError):
            VarSet(mask=8, num_vars=3)
        with pytest.raises(RangeError):
            VarSet.from_vars([1], 2) | VarSet.from_vars([1], 3)


class TestContingencyTable:
    def test_lead_golden(self, lead):
        assert lead.cardinalities == (3, 3)
        assert lead.total == 34
        assert lead.value((0, 0)) == 7
        assert lead.cell_from_names(["Good", "High"]) == (2, 2)

    def test_invariants_enforced(self):
        with pytest.raises(RangeError):
            ContingencyTable.from_flat((2, 2), [1, 2, 3])  # wrong length
        with pytest.raises(RangeError):
            ContingencyTable.from_flat((2,), [1, -1])  # negative
        with pytest.raises(RangeError):
            ContingencyTable.from_flat((2,), [1, 2], labels=[["a"]])
        with pytest.raises(RangeError):
            ContingencyTable.from_flat((2,), [1.5, 2.5])  # non-integer counts

    def test_real_kind(self):
        t = ContingencyTable.from_flat((2,), [0.5, 1.25], kind="real")
        assert t.total == 1.75

    def test_counts_frozen(self, lead):
        with pytest.raises(ValueError):
            lead.counts[0, 0] = 99


class TestMarginalize:
    def test_lead_rows(self, lead):
        assert marginalize(lead, VarSet.from_vars([1], 2)).table.flat.tolist() == [
            25,
            5,
            4,
        ]

    def test_lead_cols(self, lead):
        assert marginalize(lead, VarSet.from_vars([2], 2)).table.flat.tolist() == [
            8,
            7,
            19,
        ]

    def test_lead_total(self, lead):
        m = marginalize(lead, VarSet.empty(2))
        assert m.table.num_vars == 0
        assert m.table.total == 34

    def test_full_subset_is_identity(self, lead):
        m = marginalize(lead, VarSet.full(2))
        assert np.array_equal(m.table.counts, lead.counts)
        assert m.table.labels == lead.labels

    def test_out_of_range_subset(self, lead):
        with pytest.raises(RangeError):
            marginalize(lead, VarSet.from_vars([1], 3))

    def test_composition_exhaustive(self):
        # marginalize(marginalize(n, b), a) == marginalize(n, a) for a <= b
        rng = np.random.default_rng(42)
        for _ in range(25):
            table = random_table(rng)
            l = table.num_vars
            for b_mask in range(1 << l):
                b = VarSet(b_mask, l)
                outer = marginalize(table, b)
                for a_mask in range(1 << l):
                    if a_mask & ~b_mask:
                        continue
                    a = VarSet(a_mask, l)
                    via_b = marginalize(outer.table, _relative(b, a))
                    direct = marginalize(table, a)
                    assert np.array_equal(via_b.table.counts, direct.table.counts)

    def test_totals_conserved(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            table = random_table(rng)
            for mask in range(1 << table.num_vars):
                m = marginalize(table, VarSet(mask, table.num_vars))
                assert m.table.total == table.total


class TestProjectCell:
    def test_examples(self):
        assert project_cell((0, 2), VarSet.from_vars([2], 2)) == (2,)
        assert project_cell((1, 0, 2), VarSet.from_vars([1, 3], 3)) == (1, 2)
        assert project_cell((1, 0, 2), VarSet.empty(3)) == ()
        assert project_cell((1, 0, 2), VarSet.full(3)) == (1, 0, 2)

    def test_length_mismatch(self):
        with pytest.raises(RangeError):
            project_cell((1, 0), VarSet.full(3))


class TestCellMarginFn:
    def test_lead_anchor(self, lead):
        fn = cell_margin_fn(lead, (0, 0))
        assert fn(VarSet.full(2)) == 7
        assert fn(VarSet.from_vars([1], 2)) == 25
        assert fn(VarSet.from_vars([2], 2)) == 8
        assert fn(VarSet.empty(2)) == 34

    def test_one_way(self):
        t = ContingencyTable.from_flat((2,), [3, 4])
        fn = cell_margin_fn(t, (0,))
        assert fn(VarSet.full(1)) == 3
        assert fn(VarSet.empty(1)) == 7

    def test_uniform_symmetry(self):
        t = ContingencyTable.from_flat((2, 2, 2), [1] * 8)
        for anchor in itertools.product(range(2), repeat=3):
            fn = cell_margin_fn(t, anchor)
            for mask in range(8):
                assert fn.values[mask] == 2 ** (3 - bin(mask).count("1"))

    def test_matches_marginalize_per_subset(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            table = random_table(rng)
            l = table.num_vars
            anchor = tuple(int(rng.integers(0, c)) for c in table.cardinalities)
            fn = cell_margin_fn(table, anchor)
            for mask in range(1 << l):
                a = VarSet(mask, l)
                expected = marginalize(table, a).value(project_cell(anchor, a))
                assert fn.values[mask] == expected

    def test_decreasing_and_supermodular(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            table = random_table(rng)
            anchor = tuple(int(rng.integers(0, c)) for c in table.cardinalities)
            fn = cell_margin_fn(table, anchor)
            assert is_decreasing(fn)
            assert is_supermodular(fn, "exhaustive")

    def test_lattice_cap(self):
        import tablebounds.varset as vs

        old = vs.LATTICE_CAP
        vs.LATTICE_CAP = 2
        try:
            t = ContingencyTable.from_flat((2, 2, 2), [1] * 8)
            with pytest.raises(LatticeCapError):
                cell_margin_fn(t, (0, 0, 0))
        finally:
            vs.LATTICE_CAP = old

    def test_bad_anchor(self, lead):
        with pytest.raises(RangeError):
            cell_margin_fn(lead, (3, 0))

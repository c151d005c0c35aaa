import pytest
from hypothesis import given, settings, strategies as hst

import smtrace as st
from smtrace.frontend import FAnd, FFalse, FLit, Formula, AtomTable, Literal


def test_gap_xy_counts(gap_xy):
    assert st.brute_counts(gap_xy) == (4, 3)


def test_gap01_counts(gap01):
    assert st.brute_counts(gap01) == (5, 3)


def test_true_empty():
    f = st.parse_smt2("(assert true)")
    assert st.brute_counts(f) == (1, 1)


def test_enumerate_gap_xy(gap_xy):
    models = st.brute_enumerate(gap_xy)
    assert len(models) == 3
    keys = [tuple(m[v] for v in sorted(m)) for m in models]
    assert keys == sorted(keys)  # lexicographic atom order


def test_enumerate_false():
    table = AtomTable()
    f = Formula(FFalse(), table)
    assert st.brute_enumerate(f) == []


def test_enumerate_single_atom():
    table = AtomTable()
    a = table.intern_bool("a")
    f = Formula(FLit(Literal(a, True)), table)
    assert st.brute_enumerate(f) == [{1: True}]


def test_too_large():
    table = AtomTable()
    lits = tuple(FLit(Literal(table.intern_bool(f"p{i}"), True)) for i in range(25))
    f = Formula(FAnd(lits), table)
    with pytest.raises(st.TooLargeError):
        st.brute_counts(f)
    with pytest.raises(st.TooLargeError):
        st.brute_enumerate(f)


@settings(max_examples=30)
@given(hst.integers(0, 10_000))
def test_internal_consistency(seed):
    f = st.random_formula(seed, max_atoms=6, max_clauses=8)
    agnostic, aware = st.brute_counts(f)
    assert aware <= agnostic
    assert len(st.brute_enumerate(f)) == aware

from fractions import Fraction

import pytest
from hypothesis import settings

import smtrace as st
from smtrace.frontend import AtomTable, FAnd, FLit, FOr, Formula, LinTerm, normalize_comparison

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


GAP_XY_SMT2 = """
(set-logic QF_LRA)
(declare-const x Real)
(declare-const y Real)
(assert (and (or (< x (- y 1)) (> x (+ y 1)))
             (or (not (< x (- y 1))) (> x 20))))
"""

# F = [(x <= 0) or (x >= 1)] and [A or (x <= 0)]
GAP01_SMT2 = """
(declare-const x Real)
(declare-const A Bool)
(assert (and (or (<= x 0) (>= x 1)) (or A (<= x 0))))
"""


@pytest.fixture
def gap_xy():
    return st.parse_smt2(GAP_XY_SMT2)


@pytest.fixture
def gap01():
    return st.parse_smt2(GAP01_SMT2)


def pipeline(formula, mode="lazy", eager_k=None, **cfg_kwargs):
    """parse result -> (graph, db, amap) through the standard pipeline."""
    prop, amap = st.boolean_abstract(formula)
    db = st.to_cnf(prop)
    if mode == "eager":
        db = st.eager_encode(db, amap, eager_k)
    cfg = st.CompileConfig(mode=mode, **cfg_kwargs)
    return st.compile(db, amap, cfg), db, amap


def entangled_setup():
    """The two-clause interval formula with an extra entangling sum atom.

    Returns (formula, literals dict) where lits["xy"] is the x+y < 5 literal
    whose atom is interned in the same table but not part of the formula.
    """
    table = AtomTable()
    x, y = table.real_var("x"), table.real_var("y")

    def cmp(op, coeffs, rhs):
        return normalize_comparison(
            table, op, LinTerm.make({k: Fraction(v) for k, v in coeffs.items()}), LinTerm.constant(rhs)
        )

    lits = {
        "x<3": cmp("<", {x: 1}, 3),
        "x>5": cmp(">", {x: 1}, 5),
        "y<0": cmp("<", {y: 1}, 0),
        "y>4": cmp(">", {y: 1}, 4),
        "xy": cmp("<", {x: 1, y: 1}, 5),
    }
    root = FAnd(
        (
            FOr((FLit(lits["x<3"]), FLit(lits["x>5"]))),
            FOr((FLit(lits["y<0"]), FLit(lits["y>4"]))),
        )
    )
    return Formula(root, table), lits

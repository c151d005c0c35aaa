from fractions import Fraction

import pytest

import smtrace as st
from smtrace.ddnnf import GraphBuilder
from conftest import pipeline


def or_both(builder, var):
    return builder.or_node(var, builder.lit(var), builder.lit(-var))


@pytest.fixture
def single_or():
    b = GraphBuilder(1, 1)
    return b.finish(or_both(b, 1), None, has_tags=False)


# ---------------------------------------------------------------------------
# count


def test_count_or(single_or):
    assert st.count(single_or) == 2


def test_count_false():
    b = GraphBuilder(1, 1)
    g = b.finish(b.false_id, None, has_tags=False)
    assert st.count(g) == 0


def test_count_gap_xy(gap_xy):
    g, _, _ = pipeline(gap_xy)
    assert st.count(g) == 3


def test_count_rejects_non_total():
    b = GraphBuilder(2, 2)
    g = b.finish(b.or_node(1, b.lit(1), b.and_node([b.lit(-1), b.lit(2)])), None, False)
    with pytest.raises(st.NotTotalError):
        st.count(g)


def test_count_ignores_auxiliaries():
    # var 2 is auxiliary: Or over it sums atom-projected counts
    b = GraphBuilder(2, 1)
    left = b.and_node([b.lit(2), b.lit(1)])
    right = b.and_node([b.lit(-2), b.lit(-1)])
    g = b.finish(b.or_node(2, left, right), None, False)
    assert st.count(g) == 2


# ---------------------------------------------------------------------------
# weighted count


def test_weighted_normalized(single_or):
    w = st.WeightMap()
    w.set(1, True, Fraction(1, 2))
    w.set(1, False, Fraction(1, 2))
    assert st.weighted_count(single_or, w) == 1


def test_weighted_unit_equals_count(gap_xy):
    g, _, _ = pipeline(gap_xy)
    assert st.weighted_count(g, st.WeightMap()) == st.count(g) == 3


def test_weighted_product():
    b = GraphBuilder(2, 2)
    g = b.finish(b.and_node([b.lit(1), b.lit(2)]), None, False)
    w = st.WeightMap()
    w.set(1, True, 2)
    w.set(2, True, 3)
    assert st.weighted_count(g, w) == 6


def test_weighted_missing_weight(single_or):
    w = st.WeightMap(default_one=False)
    w.set(1, True, 1)
    with pytest.raises(st.MissingWeightError):
        st.weighted_count(single_or, w)


# ---------------------------------------------------------------------------
# enumeration


def test_enumerate_gap_xy(gap_xy):
    g, _, _ = pipeline(gap_xy)
    # every input comparison is strict, so each is the negation of its atom
    as_b = {(not m[1], not m[2], not m[3]) for m in st.enumerate_models(g)}
    expected = {(False, True, True), (False, True, False), (True, False, True)}
    assert as_b == expected


def test_enumerate_false():
    b = GraphBuilder(1, 1)
    g = b.finish(b.false_id, None, False)
    assert st.enumerate_models(g) == []


def test_enumerate_cap(single_or):
    assert len(st.enumerate_models(single_or, cap=1)) == 1


def test_enumerate_matches_count(gap_xy, gap01):
    for f in (gap_xy, gap01):
        for mode in ("lazy", "agnostic"):
            g, _, _ = pipeline(f, mode=mode)
            models = st.enumerate_models(g)
            assert len(models) == st.count(g)
            assert len({tuple(sorted(m.items())) for m in models}) == len(models)


# ---------------------------------------------------------------------------
# validation


def test_validate_decomposability_violation():
    b = GraphBuilder(1, 1)
    g = b.finish(b.and_node([b.lit(1), b.lit(1)]), None, False)
    report = st.validate(g)
    assert any(v.kind == "decomposability" for v in report.violations)

    b = GraphBuilder(1, 1)
    g = b.finish(b.and_node([b.lit(1), or_both(b, 1)]), None, False)
    assert any(v.kind == "decomposability" for v in st.validate(g).violations)


def test_validate_determinism_violation():
    b = GraphBuilder(2, 2)
    left = b.and_node([b.lit(1), b.lit(2)])
    right = b.and_node([b.lit(1), b.lit(-2)])
    g = b.finish(b.or_node(1, left, right), None, False)
    report = st.validate(g)
    assert any(v.kind == "determinism" for v in report.violations)


def test_validate_agnostic_gap_xy_theory(gap_xy):
    g, _, _ = pipeline(gap_xy, mode="agnostic")
    report = st.validate(g, level="theory", table=gap_xy.table)
    assert len(report.violations) == 1
    (violation,) = report.violations
    # the one bad captured assignment: all strict comparisons true (atoms false)
    assert violation.assignment == ((1, False), (2, False), (3, False))


def test_validate_lazy_gap_xy_clean(gap_xy):
    g, _, _ = pipeline(gap_xy)
    assert st.validate(g, level="theory", table=gap_xy.table).ok


def test_validate_or_inference_without_decision():
    nnf = "nnf 3 2 1\nL 1\nL -1\nO 0 2 0 1\n"
    atoms = "1 bool a\n"
    g, _ = st.import_nnf(nnf, atoms)
    assert st.validate(g).ok


def _models_from(g, node_id):
    sub = st.DdnnfGraph(
        nodes=g.nodes, root=node_id, num_vars=g.num_vars, num_atom_vars=g.num_atom_vars
    )
    return {tuple(sorted(m.items())) for m in st.enumerate_models(sub)}


def test_or_children_share_no_models():
    """Determinism is semantic, not just syntactic: child model sets are
    disjoint, including when the decision variable is a Tseitin auxiliary."""
    for seed in range(12):
        f = st.random_formula(seed + 500, max_atoms=6, max_clauses=8)
        g, _, _ = pipeline(f)
        if st.count(g) > 4096:
            continue
        for node in g.nodes:
            if node.kind == "O":
                left, right = (_models_from(g, c) for c in node.children)
                assert not (left & right)


# ---------------------------------------------------------------------------
# condensation


def tagged_trace_graph():
    """Hand-built decision trace with theory-implied literal tags."""
    b = GraphBuilder(3, 3)
    left = b.and_node([b.lit(2), b.lit(-1, implied=True)])
    right = b.and_node([b.lit(-2, implied=True), b.and_node([b.lit(1), b.lit(3)])])
    return b.finish(b.or_node(2, left, right), None, has_tags=True)


def test_condense_drops_tagged_literals():
    g = st.condense(tagged_trace_graph())
    root = g.nodes[g.root]
    assert root.kind == "O"
    kinds = sorted(g.nodes[c].kind for c in root.children)
    assert kinds == ["A", "L"]
    lit_child = next(c for c in root.children if g.nodes[c].kind == "L")
    and_child = next(c for c in root.children if g.nodes[c].kind == "A")
    assert g.nodes[lit_child].lit == 2
    assert sorted(g.nodes[c].lit for c in g.nodes[and_child].children) == [1, 3]


def test_condense_identity_without_tags(gap_xy):
    g, _, _ = pipeline(gap_xy, mode="eager")
    assert not any(n.implied for n in g.nodes)
    h = st.condense(g)
    assert len(h) == len(g) and st.count(h) == st.count(g)


def test_condense_count_rejected():
    g = st.condense(tagged_trace_graph())
    with pytest.raises(st.NotTotalError):
        st.count(g)


def test_condense_requires_tags(single_or):
    with pytest.raises(st.NotTaggedError):
        st.condense(single_or)


# ---------------------------------------------------------------------------
# export / import


def test_export_single_literal_bytes():
    b = GraphBuilder(1, 1)
    g = b.finish(b.lit(1), None, False)
    nnf, _ = st.export_nnf(g)
    assert nnf == "nnf 1 0 1\nL 1\n"


def test_export_conjunction_bytes():
    b = GraphBuilder(2, 2)
    g = b.finish(b.and_node([b.lit(1), b.lit(2)]), None, False)
    nnf, _ = st.export_nnf(g)
    assert nnf == "nnf 3 2 2\nL 1\nL 2\nA 2 0 1\n"


def test_roundtrip_gap_xy(gap_xy):
    g, _, amap = pipeline(gap_xy)
    nnf, atoms = st.export_nnf(g, amap)
    g2, amap2 = st.import_nnf(nnf, atoms)
    assert st.count(g2) == 3
    assert g2.has_tags == g.has_tags
    assert amap2.num_atom_vars == amap.num_atom_vars
    assert {v: st.frontend.atom_to_str(a, amap2.real_names) for v, a in amap2.atoms.items()} == {
        v: st.frontend.atom_to_str(a, amap.real_names) for v, a in amap.atoms.items()
    }
    nnf2, atoms2 = st.export_nnf(g2, amap2)
    assert nnf2 == nnf and atoms2 == atoms


def test_roundtrip_preserves_validators(gap01):
    g, _, amap = pipeline(gap01)
    g2, amap2 = st.import_nnf(*st.export_nnf(g, amap))
    assert st.validate(g2).ok
    assert st.validate(g2, level="theory", table=amap2).ok


def test_import_format_errors():
    with pytest.raises(st.FormatError):
        st.import_nnf("garbage\n", "")
    with pytest.raises(st.FormatError):
        st.import_nnf("nnf 2 0 1\nL 1\n", "")  # node count mismatch
    with pytest.raises(st.FormatError):
        st.import_nnf("nnf 1 0 1\nL 2\n", "")  # literal out of range
    with pytest.raises(st.FormatError):
        st.import_nnf("nnf 1 0 1\nX 1\n", "")
    with pytest.raises(st.FormatError):
        st.import_nnf("nnf 1 0 1\nL 1\n", "1 frobnicate a\n")
    with pytest.raises(st.FormatError):
        st.import_nnf("nnf 1 0 1\nL 1\n", "2 bool a\n")  # non-contiguous vars


def test_import_c2d_constants():
    g, _ = st.import_nnf("nnf 1 0 1\nA 0\n", "1 bool a\n")
    assert g.nodes[g.root].kind == "T"
    g, _ = st.import_nnf("nnf 1 0 1\nO 0 0\n", "1 bool a\n")
    assert g.nodes[g.root].kind == "F"

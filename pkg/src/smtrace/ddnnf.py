"""The compiled target language: d-DNNF graphs and their queries.

Nodes are stored in topological order (children precede parents).  Or nodes
are binary decision nodes carrying the decision variable.  Literal nodes can
be tagged as theory-implied, which drives the condensed export.  Counting and
enumeration range over non-auxiliary atom variables only; Tseitin auxiliaries
are functionally determined and contribute factor one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

from .abstraction import AtomMap
from .frontend import (
    BOOL,
    EQ,
    LEQ,
    Atom,
    AtomTable,
    LinTerm,
    Literal,
    atom_to_str,
)
from . import lra

KTRUE = "T"
KFALSE = "F"
KLIT = "L"
KAND = "A"
KOR = "O"


class DdnnfError(Exception):
    pass


class NotTotalError(DdnnfError):
    """The graph does not assign every scope atom on every accepted path."""


class MissingWeightError(DdnnfError):
    pass


class NotTaggedError(DdnnfError):
    """condense() needs implied-literal provenance, which this graph lacks."""


class FormatError(DdnnfError):
    """Malformed .nnf or .atoms input."""


@dataclass(frozen=True)
class Node:
    kind: str
    lit: int = 0  # signed var, for KLIT
    children: tuple[int, ...] = ()
    decision: int = 0  # decision variable, for KOR (0 if unknown)
    implied: bool = False  # theory-implied tag, for KLIT


@dataclass
class DdnnfGraph:
    nodes: list[Node]
    root: int
    num_vars: int
    num_atom_vars: int
    amap: AtomMap | None = None
    has_tags: bool = False
    stats: object | None = None
    _scopes: list[frozenset[int]] | None = None

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return sum(len(n.children) for n in self.nodes)

    def scopes(self) -> list[frozenset[int]]:
        """Per-node atom-variable scope (auxiliary variables excluded)."""
        if self._scopes is None:
            out: list[frozenset[int]] = []
            for node in self.nodes:
                if node.kind == KLIT and abs(node.lit) <= self.num_atom_vars:
                    out.append(frozenset((abs(node.lit),)))
                elif node.kind in (KAND, KOR):
                    acc: frozenset[int] = frozenset()
                    for c in node.children:
                        acc = acc | out[c]
                    out.append(acc)
                else:
                    out.append(frozenset())
            self._scopes = out
        return self._scopes


class GraphBuilder:
    """Incremental construction with constant/unary simplification.

    Literal nodes are interned per (literal, implied-tag); And/Or nodes are
    created fresh so node counts reflect the recorded trace, with sharing
    arising through the compiler's component cache.
    """

    def __init__(self, num_vars: int, num_atom_vars: int) -> None:
        self.nodes: list[Node] = [Node(KTRUE), Node(KFALSE)]
        self.true_id = 0
        self.false_id = 1
        self.num_vars = num_vars
        self.num_atom_vars = num_atom_vars
        self._lits: dict[tuple[int, bool], int] = {}

    def lit(self, signed: int, implied: bool = False) -> int:
        key = (signed, implied)
        nid = self._lits.get(key)
        if nid is None:
            nid = len(self.nodes)
            self.nodes.append(Node(KLIT, lit=signed, implied=implied))
            self._lits[key] = nid
        return nid

    def and_node(self, children: list[int]) -> int:
        kept = []
        for c in children:
            if c == self.false_id:
                return self.false_id
            if c != self.true_id:
                kept.append(c)
        if not kept:
            return self.true_id
        if len(kept) == 1:
            return kept[0]
        nid = len(self.nodes)
        self.nodes.append(Node(KAND, children=tuple(kept)))
        return nid

    def or_node(self, decision: int, hi: int, lo: int) -> int:
        # a dead branch collapses the Or onto the surviving conjunction
        if hi == self.false_id and lo == self.false_id:
            return self.false_id
        if hi == self.false_id:
            return lo
        if lo == self.false_id:
            return hi
        nid = len(self.nodes)
        self.nodes.append(Node(KOR, children=(hi, lo), decision=decision))
        return nid

    def finish(self, root: int, amap: AtomMap | None, has_tags: bool) -> DdnnfGraph:
        """Extract the subgraph reachable from the root, renumbered."""
        reachable = [False] * len(self.nodes)
        stack = [root]
        while stack:
            nid = stack.pop()
            if reachable[nid]:
                continue
            reachable[nid] = True
            stack.extend(self.nodes[nid].children)
        remap: dict[int, int] = {}
        nodes: list[Node] = []
        for nid, node in enumerate(self.nodes):
            if not reachable[nid]:
                continue
            remap[nid] = len(nodes)
            if node.children:
                node = Node(
                    node.kind,
                    lit=node.lit,
                    children=tuple(remap[c] for c in node.children),
                    decision=node.decision,
                    implied=node.implied,
                )
            nodes.append(node)
        return DdnnfGraph(
            nodes=nodes,
            root=remap[root],
            num_vars=self.num_vars,
            num_atom_vars=self.num_atom_vars,
            amap=amap,
            has_tags=has_tags,
        )


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str  # dag | determinism | decomposability | totality | theory
    node: int | None = None
    assignment: tuple[tuple[int, bool], ...] | None = None
    message: str = ""


@dataclass
class Report:
    level: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _top_level_polarity(g: DdnnfGraph, child: int, var: int) -> bool | None:
    """Polarity of a top-level literal conjunct of var in the child, if any."""
    node = g.nodes[child]
    if node.kind == KLIT and abs(node.lit) == var:
        return node.lit > 0
    if node.kind == KAND:
        for c in node.children:
            sub = g.nodes[c]
            if sub.kind == KLIT and abs(sub.lit) == var:
                return sub.lit > 0
    return None


def _check_or(g: DdnnfGraph, nid: int, node: Node, report: Report) -> None:
    if len(node.children) != 2:
        report.violations.append(
            Violation("determinism", nid, message=f"Or node with {len(node.children)} children")
        )
        return
    candidates = [node.decision] if node.decision else sorted(
        g.scopes()[node.children[0]] & g.scopes()[node.children[1]]
    )
    for var in candidates:
        pols = [_top_level_polarity(g, c, var) for c in node.children]
        if None not in pols and pols[0] != pols[1]:
            return
    report.violations.append(
        Violation(
            "determinism",
            nid,
            message="children do not assert complementary literals of the decision variable",
        )
    )


def validate(
    g: DdnnfGraph,
    level: str = "structural",
    table=None,
    enum_bound: int = 4096,
) -> Report:
    """Check the structural d-DNNF properties, optionally with the theory.

    Structural: topological well-formedness, determinism (each Or's children
    carry complementary top-level literals of the decision variable),
    decomposability (And children have pairwise disjoint atom scopes) and
    totality (Or children have equal atom scopes).  Theory level additionally
    enumerates every captured assignment (count must stay within enum_bound)
    and checks its linear literals for feasibility.
    """
    if level not in ("structural", "theory"):
        raise ValueError(f"unknown validation level: {level}")
    report = Report(level)
    scopes = g.scopes()
    for nid, node in enumerate(g.nodes):
        if any(c >= nid for c in node.children):
            report.violations.append(Violation("dag", nid, message="child after parent"))
            return report
        if node.kind == KAND:
            seen: frozenset[int] = frozenset()
            for c in node.children:
                if seen & scopes[c]:
                    report.violations.append(
                        Violation(
                            "decomposability",
                            nid,
                            message=f"And children share atoms {sorted(seen & scopes[c])}",
                        )
                    )
                    break
                seen = seen | scopes[c]
        elif node.kind == KOR:
            _check_or(g, nid, node, report)
            if len(node.children) == 2 and scopes[node.children[0]] != scopes[node.children[1]]:
                report.violations.append(
                    Violation("totality", nid, message="Or children have unequal atom scopes")
                )

    if level == "theory" and not any(v.kind in ("totality", "decomposability") for v in report.violations):
        if table is None:
            if g.amap is None:
                raise ValueError("theory validation needs an atom map")
            table = g.amap
        n = count(g)
        if n > enum_bound:
            raise DdnnfError(f"count {n} exceeds enumeration bound {enum_bound}")
        for assignment in enumerate_models(g):
            lits = [
                Literal(var, val)
                for var, val in sorted(assignment.items())
                if table.atom(var).is_linear
            ]
            if lits and not lra.check_feasible(table, lits).sat:
                report.violations.append(
                    Violation(
                        "theory",
                        assignment=tuple(sorted(assignment.items())),
                        message="captured assignment is theory-unsatisfiable",
                    )
                )
    return report


def _totality_gate(g: DdnnfGraph) -> None:
    scopes = g.scopes()
    for nid, node in enumerate(g.nodes):
        if node.kind == KOR:
            if len(node.children) != 2 or scopes[node.children[0]] != scopes[node.children[1]]:
                raise NotTotalError(f"Or node {nid} has unequal children scopes")
        elif node.kind == KAND:
            seen: frozenset[int] = frozenset()
            for c in node.children:
                if seen & scopes[c]:
                    raise NotTotalError(f"And node {nid} has overlapping children scopes")
                seen = seen | scopes[c]


# ---------------------------------------------------------------------------
# queries


def count(g: DdnnfGraph) -> int:
    """Number of total truth assignments over atom variables captured by g."""
    _totality_gate(g)
    memo: list[int] = []
    for node in g.nodes:
        if node.kind == KTRUE or node.kind == KLIT:
            memo.append(1)
        elif node.kind == KFALSE:
            memo.append(0)
        elif node.kind == KAND:
            value = 1
            for c in node.children:
                value *= memo[c]
            memo.append(value)
        else:
            memo.append(sum(memo[c] for c in node.children))
    return memo[g.root]


@dataclass
class WeightMap:
    """Nonnegative rational weight per literal; unspecified default to 1."""

    weights: dict[tuple[int, bool], Fraction] = field(default_factory=dict)
    default_one: bool = True

    def set(self, var: int, positive: bool, value: Fraction | int) -> None:
        value = Fraction(value)
        if value < 0:
            raise ValueError("weights must be nonnegative")
        self.weights[(var, positive)] = value

    def get(self, var: int, positive: bool) -> Fraction:
        w = self.weights.get((var, positive))
        if w is not None:
            return w
        if self.default_one:
            return Fraction(1)
        raise MissingWeightError(f"no weight for {'+' if positive else '-'}{var}")


def weighted_count(g: DdnnfGraph, w: WeightMap) -> Fraction:
    _totality_gate(g)
    memo: list[Fraction] = []
    for node in g.nodes:
        if node.kind == KTRUE:
            memo.append(Fraction(1))
        elif node.kind == KFALSE:
            memo.append(Fraction(0))
        elif node.kind == KLIT:
            var = abs(node.lit)
            if var <= g.num_atom_vars:
                memo.append(w.get(var, node.lit > 0))
            else:
                memo.append(Fraction(1))  # auxiliaries carry no weight
        elif node.kind == KAND:
            value = Fraction(1)
            for c in node.children:
                value *= memo[c]
            memo.append(value)
        else:
            memo.append(sum((memo[c] for c in node.children), Fraction(0)))
    return memo[g.root]


def enumerate_models(g: DdnnfGraph, cap: int | None = None) -> list[dict[int, bool]]:
    """Distinct total assignments over atom variables captured by g."""
    _totality_gate(g)

    def gen(nid: int) -> Iterator[dict[int, bool]]:
        node = g.nodes[nid]
        if node.kind == KTRUE:
            yield {}
        elif node.kind == KFALSE:
            return
        elif node.kind == KLIT:
            var = abs(node.lit)
            yield {var: node.lit > 0} if var <= g.num_atom_vars else {}
        elif node.kind == KOR:
            for c in node.children:
                yield from gen(c)
        else:

            def product(children: tuple[int, ...]) -> Iterator[dict[int, bool]]:
                if not children:
                    yield {}
                    return
                for head in gen(children[0]):
                    for rest in product(children[1:]):
                        merged = dict(head)
                        merged.update(rest)
                        yield merged

            yield from product(node.children)

    it = gen(g.root)
    if cap is not None:
        it = itertools.islice(it, cap)
    return list(it)


# ---------------------------------------------------------------------------
# condensation (export-time view that omits theory-implied literals)


def condense(g: DdnnfGraph) -> DdnnfGraph:
    """Drop theory-implied literal nodes; unary Ands collapse.

    The result is for export and inspection only: it loses totality, so
    counting on it is rejected.
    """
    if not g.has_tags:
        raise NotTaggedError("graph carries no implied-literal provenance")
    builder = GraphBuilder(g.num_vars, g.num_atom_vars)
    remap: dict[int, int | None] = {}
    for nid, node in enumerate(g.nodes):
        if node.kind == KTRUE:
            remap[nid] = builder.true_id
        elif node.kind == KFALSE:
            remap[nid] = builder.false_id
        elif node.kind == KLIT:
            remap[nid] = None if node.implied else builder.lit(node.lit)
        elif node.kind == KAND:
            kept = [remap[c] for c in node.children if remap[c] is not None]
            remap[nid] = builder.and_node(kept)
        else:
            kept = [remap[c] for c in node.children if remap[c] is not None]
            if len(kept) == 2:
                remap[nid] = builder.or_node(node.decision, kept[0], kept[1])
            elif len(kept) == 1:  # cannot happen for compiler output
                remap[nid] = kept[0]
            else:
                remap[nid] = builder.true_id
    root = remap[g.root]
    if root is None:
        root = builder.true_id
    out = builder.finish(root, g.amap, has_tags=True)
    return out


# ---------------------------------------------------------------------------
# c2d-compatible file format


def export_nnf(g: DdnnfGraph, amap: AtomMap | None = None) -> tuple[str, str]:
    """Serialize to (nnf text, atom sidecar text).

    nnf: header ``nnf V E n``, then one node per line in topological order:
    ``L l`` / ``A c i...`` / ``O j c i...`` with 0-based indices; True is
    ``A 0`` and False is ``O 0 0``.  Sidecar: ``<var> <atom>`` per atom
    variable, plus ``c implied <node>`` tags and a ``c tagged`` marker.
    """
    if amap is None:
        amap = g.amap
    lines = []
    implied_nodes = []
    edges = 0
    for nid, node in enumerate(g.nodes):
        if node.kind == KTRUE:
            lines.append("A 0")
        elif node.kind == KFALSE:
            lines.append("O 0 0")
        elif node.kind == KLIT:
            lines.append(f"L {node.lit}")
            if node.implied:
                implied_nodes.append(nid)
        elif node.kind == KAND:
            lines.append(f"A {len(node.children)} " + " ".join(map(str, node.children)))
            edges += len(node.children)
        else:
            lines.append(
                f"O {node.decision} {len(node.children)} " + " ".join(map(str, node.children))
            )
            edges += len(node.children)
    header = f"nnf {len(g.nodes)} {edges} {g.num_vars}"
    nnf_text = "\n".join([header] + lines) + "\n"

    atom_lines = []
    for var in range(1, g.num_atom_vars + 1):
        if amap is not None and var in amap.atoms:
            atom_lines.append(f"{var} {atom_to_str(amap.atoms[var], amap.real_names)}")
        else:
            atom_lines.append(f"{var} bool v{var}")
    if g.has_tags:
        atom_lines.append("c tagged")
    for nid in implied_nodes:
        atom_lines.append(f"c implied {nid}")
    atoms_text = "\n".join(atom_lines) + ("\n" if atom_lines else "")
    return nnf_text, atoms_text


def _parse_atom_line(line: str, table: AtomTable) -> tuple[int, Atom]:
    parts = line.split()
    if len(parts) < 3:
        raise FormatError(f"bad atom line: {line!r}")
    try:
        var = int(parts[0])
    except ValueError as exc:
        raise FormatError(f"bad atom line: {line!r}") from exc
    kind = parts[1]
    if kind == BOOL:
        if len(parts) != 3:
            raise FormatError(f"bad bool atom line: {line!r}")
        return var, table.atoms[table.intern_bool(parts[2]) - 1]
    if kind not in (LEQ, EQ):
        raise FormatError(f"unknown atom kind {kind!r}")
    coeffs: dict[int, Fraction] = {}
    for chunk in parts[2:-1]:
        if "*" not in chunk:
            raise FormatError(f"bad coefficient {chunk!r} in {line!r}")
        c, name = chunk.split("*", 1)
        try:
            coeffs[table.real_var(name)] = Fraction(int(c))
        except ValueError as exc:
            raise FormatError(f"bad coefficient {chunk!r}") from exc
    try:
        const = Fraction(int(parts[-1]))
    except ValueError as exc:
        raise FormatError(f"bad constant in {line!r}") from exc
    term = LinTerm.make(coeffs, const)
    return var, table.atoms[table.intern_linear(kind, term) - 1]


def import_nnf(nnf_text: str, atoms_text: str) -> tuple[DdnnfGraph, AtomMap]:
    """Inverse of export_nnf, up to node reordering; counts are preserved."""
    implied_file_idx: set[int] = set()
    tagged = False
    table = AtomTable()
    atoms: dict[int, Atom] = {}
    for raw in atoms_text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c "):
            parts = line.split()
            if parts[:2] == ["c", "tagged"]:
                tagged = True
            elif parts[:2] == ["c", "implied"] and len(parts) == 3:
                try:
                    implied_file_idx.add(int(parts[2]))
                except ValueError as exc:
                    raise FormatError(f"bad implied tag: {line!r}") from exc
            continue
        var, atom = _parse_atom_line(line, table)
        if var in atoms:
            raise FormatError(f"variable {var} mapped twice")
        atoms[var] = atom
    if atoms and sorted(atoms) != list(range(1, len(atoms) + 1)):
        raise FormatError("atom variables are not contiguous from 1")

    lines = [l.strip() for l in nnf_text.splitlines() if l.strip()]
    if not lines:
        raise FormatError("empty nnf input")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "nnf":
        raise FormatError(f"bad header: {lines[0]!r}")
    try:
        v_decl, _e_decl, n_vars = int(header[1]), int(header[2]), int(header[3])
    except ValueError as exc:
        raise FormatError(f"bad header: {lines[0]!r}") from exc
    if len(lines) - 1 != v_decl:
        raise FormatError(f"header declares {v_decl} nodes, found {len(lines) - 1}")

    num_atom_vars = len(atoms) if atoms else n_vars
    builder = GraphBuilder(n_vars, num_atom_vars)
    ids: list[int] = []

    def child(tok: str) -> int:
        try:
            idx = int(tok)
        except ValueError as exc:
            raise FormatError(f"bad child index {tok!r}") from exc
        if not 0 <= idx < len(ids):
            raise FormatError(f"child index {idx} out of range")
        return ids[idx]

    for file_idx, line in enumerate(lines[1:]):
        parts = line.split()
        if parts[0] == "L" and len(parts) == 2:
            try:
                lit = int(parts[1])
            except ValueError as exc:
                raise FormatError(f"bad literal line: {line!r}") from exc
            if lit == 0 or abs(lit) > n_vars:
                raise FormatError(f"literal {lit} out of range")
            ids.append(builder.lit(lit, implied=file_idx in implied_file_idx))
        elif parts[0] == "A" and len(parts) >= 2:
            try:
                c = int(parts[1])
            except ValueError as exc:
                raise FormatError(f"bad And line: {line!r}") from exc
            if len(parts) != 2 + c:
                raise FormatError(f"And arity mismatch: {line!r}")
            ids.append(builder.and_node([child(t) for t in parts[2:]]))
        elif parts[0] == "O" and len(parts) >= 3:
            try:
                decision, c = int(parts[1]), int(parts[2])
            except ValueError as exc:
                raise FormatError(f"bad Or line: {line!r}") from exc
            if len(parts) != 3 + c:
                raise FormatError(f"Or arity mismatch: {line!r}")
            if c == 0:
                ids.append(builder.false_id)
            elif c == 2:
                ids.append(builder.or_node(decision, child(parts[3]), child(parts[4])))
            else:
                raise FormatError(f"Or nodes must have 0 or 2 children: {line!r}")
        else:
            raise FormatError(f"unknown node line: {line!r}")

    if not ids:
        raise FormatError("nnf file has no nodes")
    amap = AtomMap(atoms=atoms, real_names=list(table.real_names))
    graph = builder.finish(ids[-1], amap, has_tags=tagged or bool(implied_file_idx))
    return graph, amap

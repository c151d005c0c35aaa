"""Exhaustive DPLL(T) search whose trace is recorded as a d-DNNF graph.

The search branches on every variable (totality: after all clauses are
satisfied, remaining atoms are still branched under theory pruning, so counts
need no smoothing).  Backtracking is chronological; theory conflicts yield
minimized cores learned as globally scoped clauses.  Residual subproblems are
decomposed at the variable level: clauses connect through Boolean variables,
through shared real variables, and transitively through real variables
co-occurring in asserted trail atoms.  Component results are cached under a
key that includes the trail literals projected onto the component's (closed)
real-variable scope, since the same residual clauses compile differently
under different entangling decisions.
"""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import lra
from .abstraction import AtomMap, ClauseDb
from .ddnnf import DdnnfGraph, GraphBuilder
from .frontend import Literal


class CompileError(Exception):
    pass


class NoUnassignedError(CompileError):
    """decide() was called on a component without unassigned variables."""


MODES = ("lazy", "eager", "agnostic")
HEURISTICS = ("dlcs", "fixed_order")


@dataclass
class CompileConfig:
    mode: str = "lazy"
    components: bool = True
    cache: bool = True
    learning: bool = True
    propagation_budget: int | None = None  # None: 2 x unassigned candidate atoms
    decision_heuristic: str = "dlcs"
    condense_output: bool = False  # applied at export time only
    random_seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.decision_heuristic not in HEURISTICS:
            raise ValueError(f"heuristic must be one of {HEURISTICS}")


STAT_KEYS = (
    "decisions",
    "bool_props",
    "theory_props",
    "theory_checks",
    "conflicts",
    "learned",
    "components",
    "cache_hits",
    "cache_misses",
    "nodes",
    "edges",
    "wall_ms",
)


@dataclass
class CompileStats:
    decisions: int = 0
    bool_props: int = 0
    theory_props: int = 0
    theory_checks: int = 0  # feasibility computations (memoized queries excluded)
    conflicts: int = 0
    learned: int = 0
    components: int = 0
    cache_hits: int = 0
    cache_misses: int = 0
    nodes: int = 0
    edges: int = 0
    wall_ms: float = 0.0

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in STAT_KEYS}


@dataclass(frozen=True)
class Component:
    """A residual subproblem: clauses plus the unassigned variables they own.

    ``residual`` holds the live-literal view of each member clause under the
    current assignment.  ``reals`` is the real-variable scope closed under
    trail entanglement; ``projected`` are the trail literals touching it,
    which is exactly the theory context a cache entry must match.
    """

    clauses: tuple[int, ...]
    residual: tuple[tuple[int, ...], ...]
    scope: tuple[int, ...]
    reals: frozenset[int]
    trail_links: tuple[int, ...]
    projected: tuple[tuple[int, bool], ...]


@dataclass(frozen=True)
class BoolConflict:
    clause: tuple[int, ...]


# ---------------------------------------------------------------------------
# unit propagation (two watched literals)


class WatchedClauses:
    """Two-watched-literal bookkeeping over a fixed clause list.

    Watches never need undoing on backtrack.  Unit and empty clauses are
    recorded at construction for the caller to bootstrap with.
    """

    def __init__(self, clauses: Sequence[tuple[int, ...]]) -> None:
        self.clauses = [tuple(c) for c in clauses]
        self.watches: dict[int, list[int]] = defaultdict(list)
        self.pairs: list[list[int]] = []
        self.units: list[int] = []
        self.has_empty = False
        for i, cl in enumerate(self.clauses):
            if len(cl) == 0:
                self.has_empty = True
                self.pairs.append([])
            elif len(cl) == 1:
                self.units.append(cl[0])
                self.pairs.append([])
            else:
                self.pairs.append([cl[0], cl[1]])
                self.watches[cl[0]].append(i)
                self.watches[cl[1]].append(i)

    def propagate(self, values, assign, queue: list[int]):
        """Run to fixpoint from the literals in queue; returns the falsified
        clause on conflict, else None.  assign(lit) must record lit as true
        (including values[]); implied literals are appended to queue."""
        qi = 0
        while qi < len(queue):
            falsified = -queue[qi]
            qi += 1
            wlist = self.watches[falsified]
            j = 0
            while j < len(wlist):
                ci = wlist[j]
                pair = self.pairs[ci]
                other = pair[0] if pair[1] == falsified else pair[1]
                oval = values[abs(other)]
                if oval is not None and oval == (other > 0):
                    j += 1
                    continue
                moved = False
                for cand in self.clauses[ci]:
                    if cand == other or cand == falsified:
                        continue
                    cval = values[abs(cand)]
                    if cval is None or cval == (cand > 0):
                        if pair[0] == falsified:
                            pair[0] = cand
                        else:
                            pair[1] = cand
                        self.watches[cand].append(ci)
                        wlist[j] = wlist[-1]
                        wlist.pop()
                        moved = True
                        break
                if moved:
                    continue
                if oval is not None:  # other watch is false too
                    return self.clauses[ci]
                assign(other)
                queue.append(other)
                j += 1
        return None


def unit_propagate(db: ClauseDb, assignment: Mapping[int, bool]):
    """Fixpoint of unit clause implications under the given assignment.

    Returns the list of implied literals in propagation order, or a
    BoolConflict holding the falsified clause.
    """
    values: list[bool | None] = [None] * (db.num_vars + 1)
    for var, val in assignment.items():
        values[var] = val
    engine = WatchedClauses(db.clauses)
    if engine.has_empty:
        return BoolConflict(())
    implied: list[int] = []

    def assign(lit: int) -> None:
        values[abs(lit)] = lit > 0
        implied.append(lit)

    queue: list[int] = []
    for u in engine.units:
        uval = values[abs(u)]
        if uval is None:
            assign(u)
            queue.append(u)
        elif uval != (u > 0):
            return BoolConflict((u,))
    for var in sorted(assignment):
        queue.append(var if assignment[var] else -var)
    conflict = engine.propagate(values, assign, queue)
    if conflict is not None:
        return BoolConflict(conflict)
    return implied


# ---------------------------------------------------------------------------
# component splitting


def split_components(
    db: ClauseDb,
    amap: AtomMap,
    assignment,
    trail: Sequence[Literal],
    cfg: CompileConfig | None = None,
    scope=None,
) -> list[Component]:
    """Partition the residual problem at the variable level.

    Connectivity joins clauses sharing a Boolean variable, linear atoms
    sharing a real variable, and real variables co-occurring in any asserted
    trail atom (which is what entangles otherwise independent clause sets).
    Unassigned atoms outside all residual clauses still form components, so
    totality branching stays scoped.  With components disabled, a single
    component holding everything is returned.
    """
    cfg = cfg or CompileConfig()
    if isinstance(assignment, Mapping):
        values: list[bool | None] = [None] * (db.num_vars + 1)
        for var, val in assignment.items():
            values[var] = val
    else:
        values = assignment

    if scope is None:
        scope_vars = [v for v in range(1, db.num_vars + 1) if values[v] is None]
    else:
        scope_vars = sorted(v for v in scope if values[v] is None)
    scope_set = set(scope_vars)

    residuals: list[tuple[int, tuple[int, ...]]] = []
    for ci, cl in enumerate(db.clauses):
        live: list[int] = []
        satisfied = False
        for l in cl:
            val = values[abs(l)]
            if val is None:
                live.append(l)
            elif val == (l > 0):
                satisfied = True
                break
        if satisfied or not live:
            continue
        if any(abs(l) not in scope_set for l in live):
            continue  # residual clause of a sibling component
        residuals.append((ci, tuple(sorted(live, key=lambda l: (abs(l), l < 0)))))

    parent: dict[object, object] = {}

    def find(x):
        parent.setdefault(x, x)
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    seen_reals: set[int] = set()
    for lit in trail:
        reals = sorted(amap.atom(lit.atom).term.real_vars)
        seen_reals.update(reals)
        for r in reals[1:]:
            union(("r", reals[0]), ("r", r))
    for v in scope_vars:
        for r in amap.real_vars_of(v):
            seen_reals.add(r)
            union(("b", v), ("r", r))
    for _, live in residuals:
        first = abs(live[0])
        for l in live[1:]:
            union(("b", first), ("b", abs(l)))

    def project(reals: frozenset[int]) -> tuple[tuple[int, ...], tuple[tuple[int, bool], ...]]:
        links = []
        keys = []
        for idx, lit in enumerate(trail):
            if amap.atom(lit.atom).term.real_vars & reals:
                links.append(idx)
                keys.append((lit.atom, lit.positive))
        return tuple(links), tuple(sorted(keys))

    if not cfg.components:
        reals = frozenset(seen_reals)
        links, keys = project(reals)
        if not scope_vars and not residuals:
            return []
        return [
            Component(
                clauses=tuple(ci for ci, _ in residuals),
                residual=tuple(view for _, view in residuals),
                scope=tuple(scope_vars),
                reals=reals,
                trail_links=links,
                projected=keys,
            )
        ]

    groups: dict[object, dict] = {}
    for v in scope_vars:
        root = find(("b", v))
        groups.setdefault(root, {"vars": [], "clauses": [], "views": [], "reals": set()})
        groups[root]["vars"].append(v)
    for (ci, view) in residuals:
        root = find(("b", abs(view[0])))
        groups[root]["clauses"].append(ci)
        groups[root]["views"].append(view)
    for r in seen_reals:
        root = find(("r", r))
        if root in groups:
            groups[root]["reals"].add(r)

    out = []
    for info in sorted(groups.values(), key=lambda g: g["vars"][0]):
        reals = frozenset(info["reals"])
        links, keys = project(reals)
        out.append(
            Component(
                clauses=tuple(info["clauses"]),
                residual=tuple(info["views"]),
                scope=tuple(info["vars"]),
                reals=reals,
                trail_links=links,
                projected=keys,
            )
        )
    return out


def cache_key(component: Component) -> tuple:
    """Identity of a residual subproblem: residual clauses, scope and the
    syntactic projection of the theory trail onto the component's reals."""
    return (
        tuple(sorted(component.residual)),
        component.scope,
        component.projected,
    )


# ---------------------------------------------------------------------------
# branching and clause learning


def decide(component: Component, heuristic: str = "dlcs", seed: int = 0) -> int:
    """Pick the decision literal for a component.

    dlcs: positive literal of the variable occurring most often in the
    residual clauses (ties: lowest id).  fixed_order: lowest unassigned id.
    Both are deterministic; the seed is reserved for randomized heuristics.
    """
    if not component.scope:
        raise NoUnassignedError("component has no unassigned variables")
    if heuristic == "fixed_order":
        return component.scope[0]
    if heuristic != "dlcs":
        raise ValueError(f"unknown heuristic {heuristic!r}")
    counts: dict[int, int] = {}
    for view in component.residual:
        for l in view:
            counts[abs(l)] = counts.get(abs(l), 0) + 1
    if not counts:
        return component.scope[0]
    return min(counts, key=lambda v: (-counts[v], v))


def learn_theory_clause(core) -> tuple[int, ...]:
    """Blocking clause for a theory core: the disjunction of its negations.

    The clause is theory-entailed, so adding it preserves the model set and
    every count.
    """
    lits = []
    for lit in core:
        signed = lit.atom if lit.positive else -lit.atom
        lits.append(-signed)
    return tuple(sorted(lits, key=lambda l: (abs(l), l < 0)))


# ---------------------------------------------------------------------------
# the search


class _Search:
    def __init__(self, db: ClauseDb, amap: AtomMap, cfg: CompileConfig):
        self.db = db
        self.amap = amap
        self.cfg = cfg
        self.values: list[bool | None] = [None] * (db.num_vars + 1)
        self.trail: list[int] = []
        self.tags: list[bool] = []
        self.engine = WatchedClauses(db.clauses)
        self.learned: list[tuple[int, ...]] = []
        self._learned_keys: set[frozenset[int]] = set()
        self.theory_on = cfg.mode == "lazy"
        self.theory = lra.TheoryState(amap) if self.theory_on else None
        self.builder = GraphBuilder(db.num_vars, db.num_atom_vars)
        self.cache: dict[tuple, int] = {}
        self.stats = CompileStats()
        self.level = 0
        self._theory_seen = 0

    # -- assignment bookkeeping

    def _assign(self, lit: int, tag: bool = False) -> None:
        self.values[abs(lit)] = lit > 0
        self.trail.append(lit)
        self.tags.append(tag)

    def _undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            lit = self.trail.pop()
            self.tags.pop()
            self.values[abs(lit)] = None
        self._theory_seen = min(self._theory_seen, mark)

    # -- propagation

    def _scan_learned(self, scope_set, queue: list[int]):
        fired = False
        for cl in self.learned:
            unassigned = None
            satisfied = False
            dead = True
            for l in cl:
                val = self.values[abs(l)]
                if val is None:
                    if unassigned is None:
                        unassigned = l
                        dead = False
                    else:
                        dead = False
                        unassigned = "many"
                elif val == (l > 0):
                    satisfied = True
                    break
            if satisfied:
                continue
            if dead:
                return fired, True  # theory-entailed clause fully falsified
            if unassigned != "many" and unassigned is not None:
                if scope_set is None or abs(unassigned) in scope_set:
                    self._assign(unassigned)
                    self.stats.bool_props += 1
                    queue.append(unassigned)
                    fired = True
        return fired, False

    def _theory_sync(self) -> bool:
        while self._theory_seen < len(self.trail):
            lit = self.trail[self._theory_seen]
            self._theory_seen += 1
            var = abs(lit)
            if var <= self.db.num_atom_vars and self.amap.is_linear_var(var):
                conflict = self.theory.assert_literal(Literal(var, lit > 0), self.level)
                if conflict is not None:
                    self.stats.conflicts += 1
                    core = lra.minimize_core(self.amap, conflict.core, check=self.theory._check)
                    if self.cfg.learning:
                        clause = learn_theory_clause(core)
                        key = frozenset(clause)
                        if key not in self._learned_keys:
                            self._learned_keys.add(key)
                            self.learned.append(clause)
                            self.stats.learned += 1
                    return False
        return True

    def _theory_candidates(self, scope_set) -> list[int]:
        cand: set[int] = set()
        for cl in self.db.clauses:
            live: list[int] = []
            satisfied = False
            for l in cl:
                val = self.values[abs(l)]
                if val is None:
                    live.append(l)
                elif val == (l > 0):
                    satisfied = True
                    break
            if satisfied:
                continue
            for l in live:
                var = abs(l)
                if scope_set is not None and var not in scope_set:
                    continue
                if var <= self.db.num_atom_vars and self.amap.is_linear_var(var):
                    cand.add(var)
        return sorted(cand)

    def _fixpoint(self, scope_set, queue: list[int]) -> bool:
        def on_implied(lit: int) -> None:
            self._assign(lit)
            self.stats.bool_props += 1

        while True:
            conflict = self.engine.propagate(self.values, on_implied, queue)
            if conflict is not None:
                self.stats.conflicts += 1
                return False
            fired, dead = self._scan_learned(scope_set, queue)
            if dead:
                self.stats.conflicts += 1
                return False
            if fired:
                continue
            if self.theory_on:
                if not self._theory_sync():
                    return False
                cand = self._theory_candidates(scope_set)
                if cand:
                    budget = self.cfg.propagation_budget
                    if budget is None:
                        budget = 2 * len(cand)
                    props = lra.propagate_candidates(self.theory, cand, budget)
                    if props:
                        self.stats.theory_props += len(props)
                        for tl in props:
                            signed = tl.atom if tl.positive else -tl.atom
                            self._assign(signed, tag=True)
                            queue.append(signed)
                        continue
            return True

    # -- trace construction

    def _trail_literals(self) -> list[Literal]:
        if not self.theory_on:
            return []
        return self.theory.literals()

    def _compile_children(self, scope) -> list[int] | None:
        comps = split_components(
            self.db, self.amap, self.values, self._trail_literals(), self.cfg, scope=scope
        )
        if len(comps) > 1:
            self.stats.components += len(comps)
        children = []
        for comp in comps:
            node = self._compile_component(comp)
            if node == self.builder.false_id:
                return None
            children.append(node)
        return children

    def _compile_component(self, comp: Component) -> int:
        if self.cfg.cache:
            key = cache_key(comp)
            hit = self.cache.get(key)
            if hit is not None:
                self.stats.cache_hits += 1
                return hit
            self.stats.cache_misses += 1
        lit = decide(comp, self.cfg.decision_heuristic, self.cfg.random_seed)
        self.stats.decisions += 1
        hi = self._branch(comp, lit)
        lo = self._branch(comp, -lit)
        node = self.builder.or_node(abs(lit), hi, lo)
        if self.cfg.cache:
            self.cache[key] = node
        return node

    def _branch(self, comp: Component, lit: int) -> int:
        self.level += 1
        mark = len(self.trail)
        self._assign(lit)
        queue = [lit]
        node = self.builder.false_id
        if self._fixpoint(set(comp.scope), queue):
            parts = [self.builder.lit(lit)]
            for i in range(mark + 1, len(self.trail)):
                parts.append(self.builder.lit(self.trail[i], implied=self.tags[i]))
            remaining = [v for v in comp.scope if self.values[v] is None]
            children = self._compile_children(remaining)
            if children is not None:
                node = self.builder.and_node(parts + children)
        self._undo_to(mark)
        if self.theory_on:
            self.theory.pop_to_level(self.level - 1)
        self.level -= 1
        return node

    def run(self) -> int:
        if self.engine.has_empty:
            return self.builder.false_id
        queue: list[int] = []
        for u in self.engine.units:
            val = self.values[abs(u)]
            if val is None:
                self._assign(u)
                self.stats.bool_props += 1
                queue.append(u)
            elif val != (u > 0):
                self.stats.conflicts += 1
                return self.builder.false_id
        if not self._fixpoint(None, queue):
            return self.builder.false_id
        parts = [
            self.builder.lit(self.trail[i], implied=self.tags[i]) for i in range(len(self.trail))
        ]
        children = self._compile_children(None)
        if children is None:
            return self.builder.false_id
        return self.builder.and_node(parts + children)


def compile(db: ClauseDb, amap: AtomMap, cfg: CompileConfig | None = None) -> DdnnfGraph:
    """Compile a CNF with its atom map into a d-DNNF graph.

    In lazy mode the theory solver prunes and propagates during search, so
    every captured total assignment is theory-satisfiable.  In eager mode the
    clause set is assumed to carry theory blocking clauses already; agnostic
    mode compiles the Boolean abstraction as-is.  Statistics are attached to
    the returned graph.
    """
    cfg = cfg or CompileConfig()
    start = time.perf_counter()
    search = _Search(db, amap, cfg)
    root = search.run()
    graph = search.builder.finish(root, amap, has_tags=cfg.mode in ("lazy", "eager"))
    stats = search.stats
    if search.theory is not None:
        stats.theory_checks = search.theory.checks
    stats.nodes = len(graph)
    stats.edges = graph.edge_count
    stats.wall_ms = (time.perf_counter() - start) * 1000.0
    graph.stats = stats
    return graph

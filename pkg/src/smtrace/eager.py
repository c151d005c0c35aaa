"""Eager strategy: block theory-infeasible literal combinations up front.

Minimal infeasible cores over the linear atoms (one literal per atom, both
polarities considered) are enumerated by increasing size with superset
pruning, then negated into blocking clauses.  The scheme adds clauses but no
variables; with k equal to the number of linear atoms it is complete, so a
purely propositional compile of the result is theory-sound.
"""

from __future__ import annotations

from itertools import combinations, product

from .abstraction import AtomMap, ClauseDb
from .compiler import learn_theory_clause
from .frontend import Literal
from .lra import check_feasible


def enumerate_infeasible_cores(table, atom_ids, k: int) -> list[frozenset[Literal]]:
    """All minimal theory-infeasible literal sets of size <= k over the atoms."""
    atoms = sorted(atom_ids)
    cores: list[frozenset[Literal]] = []
    for size in range(1, min(k, len(atoms)) + 1):
        for combo in combinations(atoms, size):
            for pols in product((True, False), repeat=size):
                lits = frozenset(Literal(a, p) for a, p in zip(combo, pols))
                if any(core <= lits for core in cores):
                    continue
                if not check_feasible(table, lits).sat:
                    cores.append(lits)
    return cores


def eager_encode(db: ClauseDb, amap: AtomMap, k: int | None = None) -> ClauseDb:
    """Augment the CNF with one blocking clause per infeasible core."""
    linear = amap.linear_vars()
    if k is None:
        k = len(linear)
    if not linear or k < 1:
        return ClauseDb(db.num_vars, db.num_atom_vars, list(db.clauses))
    cores = enumerate_infeasible_cores(amap, linear, k)
    clauses = list(db.clauses)
    for core in sorted(cores, key=sorted):
        clauses.append(learn_theory_clause(core))
    return ClauseDb(db.num_vars, db.num_atom_vars, clauses)

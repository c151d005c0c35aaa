"""Exact theory solver for conjunctions of linear rational arithmetic literals.

Feasibility is decided by Fourier-Motzkin elimination over exact rationals,
eliminating variables in ascending id order.  Equalities are split into two
inequalities.  A disequality t != 0 is handled after the relaxed polyhedron P
is known feasible: the system is infeasible iff P is contained in the
hyperplane t = 0, which is checked as infeasibility of both P and t < 0 and
P and t > 0 (sound by convexity: a convex set not contained in any of
finitely many hyperplanes contains a point avoiding all of them).

Every answer carries evidence.  SAT results return a rational witness that
satisfies each asserted literal exactly; UNSAT results return nonnegative
multipliers deriving a contradiction (0 < 0 or c <= 0 with c > 0), or, for
the disequality case, a pair of such certificates showing containment.  Both
are re-verified mechanically before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .frontend import EQ, LEQ, Atom, LinTerm, Literal, literal_holds


class TheoryError(Exception):
    pass


class NonTheoryLiteralError(TheoryError):
    """A propositional literal was handed to the theory solver."""


class NotInfeasibleError(TheoryError):
    """minimize_core was called on a feasible literal set."""


@dataclass(frozen=True)
class FarkasEntry:
    """One row of a certificate: mult * (term REL 0) with REL in {<=, <}."""

    mult: Fraction
    term: LinTerm
    strict: bool
    source: Literal


@dataclass(frozen=True)
class Certificate:
    """Farkas-style infeasibility evidence.

    Plain case: ``entries`` combine to a constant contradiction.  Disequality
    case: ``diseq`` is a != literal whose hyperplane contains the relaxed
    polyhedron, evidenced by ``below``/``above`` certificates for the two
    strict half-space augmentations.
    """

    entries: tuple[FarkasEntry, ...] = ()
    diseq: Literal | None = None
    below: "Certificate | None" = None
    above: "Certificate | None" = None

    def sources(self) -> frozenset[Literal]:
        if self.diseq is not None:
            return self.below.sources() | self.above.sources() | {self.diseq}
        return frozenset(e.source for e in self.entries)


@dataclass
class FeasibilityResult:
    sat: bool
    witness: dict[int, Fraction] | None = None
    certificate: Certificate | None = None

    @property
    def core(self) -> frozenset[Literal]:
        if self.sat:
            raise ValueError("feasible result has no core")
        return self.certificate.sources()


@dataclass(frozen=True)
class Conflict:
    core: frozenset[Literal]


# ---------------------------------------------------------------------------
# constraint assembly

def _ineq_rows(atom: Atom, positive: bool) -> list[tuple[LinTerm, bool]]:
    """Inequality rows (term, strict) entailed by a non-diseq literal."""
    if atom.kind == LEQ:
        if positive:
            return [(atom.term, False)]
        return [(atom.term.neg(), True)]  # not(t <= 0)  ==  -t < 0
    if atom.kind == EQ and positive:
        return [(atom.term, False), (atom.term.neg(), False)]
    raise ValueError("disequalities have no direct inequality form")


def _allowed_rows(atom: Atom, positive: bool) -> list[tuple[LinTerm, bool]]:
    """Rows a certificate entry may legitimately cite for this literal."""
    if atom.kind == EQ and not positive:
        return [(atom.term, True), (atom.term.neg(), True)]
    return _ineq_rows(atom, positive)


@dataclass(frozen=True)
class _Row:
    term: LinTerm
    strict: bool
    source: Literal


def _contradictory(const: Fraction, strict: bool) -> bool:
    return const > 0 or (strict and const == 0)


def _fourier_motzkin(rows: Sequence[_Row]):
    """Decide a pure inequality system.

    Returns ("unsat", comb) with comb mapping row index -> positive multiplier,
    or ("sat", witness) with a full rational point.
    """
    # live rows: (coeffs dict, const, strict, comb dict)
    live = []
    for i, row in enumerate(rows):
        live.append((row.term.as_dict(), row.term.const, row.strict, {i: Fraction(1)}))

    variables = sorted({v for coeffs, _, _, _ in live for v in coeffs})
    stages = []

    for var in variables:
        uppers, lowers, rest = [], [], []
        for entry in live:
            c = entry[0].get(var)
            if c is None or c == 0:
                rest.append(entry)
            elif c > 0:
                uppers.append(entry)
            else:
                lowers.append(entry)
        stages.append((var, uppers, lowers))
        live = rest
        for uc, uk, us, ucomb in uppers:
            for lc, lk, ls, lcomb in lowers:
                mu = -lc[var]  # positive
                ml = uc[var]  # positive
                coeffs: dict[int, Fraction] = {}
                for v, c in uc.items():
                    coeffs[v] = coeffs.get(v, Fraction(0)) + mu * c
                for v, c in lc.items():
                    coeffs[v] = coeffs.get(v, Fraction(0)) + ml * c
                coeffs = {v: c for v, c in coeffs.items() if c != 0}
                const = mu * uk + ml * lk
                strict = us or ls
                comb: dict[int, Fraction] = {}
                for i, m in ucomb.items():
                    comb[i] = comb.get(i, Fraction(0)) + mu * m
                for i, m in lcomb.items():
                    comb[i] = comb.get(i, Fraction(0)) + ml * m
                if not coeffs:
                    if _contradictory(const, strict):
                        return "unsat", comb
                    continue
                live.append((coeffs, const, strict, comb))

    for coeffs, const, strict, comb in live:
        # everything left is constant
        if _contradictory(const, strict):
            return "unsat", comb

    witness: dict[int, Fraction] = {}
    for var, uppers, lowers in reversed(stages):
        lo: tuple[Fraction, bool] | None = None
        hi: tuple[Fraction, bool] | None = None
        for coeffs, const, strict, _ in uppers + lowers:
            c = coeffs[var]
            rest_val = const
            for v, cv in coeffs.items():
                if v != var:
                    rest_val += cv * witness[v]
            bound = -rest_val / c
            if c > 0:  # x <= bound
                if hi is None or bound < hi[0] or (bound == hi[0] and strict):
                    hi = (bound, strict)
            else:  # x >= bound
                if lo is None or bound > lo[0] or (bound == lo[0] and strict):
                    lo = (bound, strict)
        if lo is None and hi is None:
            value = Fraction(0)
        elif lo is None:
            value = hi[0] - 1 if hi[1] else hi[0]
        elif hi is None:
            value = lo[0] + 1 if lo[1] else lo[0]
        elif lo[0] < hi[0]:
            value = (lo[0] + hi[0]) / 2
        else:
            # feasible elimination guarantees lo == hi with both non-strict
            value = lo[0]
        witness[var] = value
    return "sat", witness


def _certificate_from(rows: Sequence[_Row], comb: Mapping[int, Fraction]) -> Certificate:
    entries = tuple(
        FarkasEntry(m, rows[i].term, rows[i].strict, rows[i].source)
        for i, m in sorted(comb.items())
        if m > 0
    )
    return Certificate(entries=entries)


def verify_certificate(table, literals: Iterable[Literal], cert: Certificate) -> bool:
    """Mechanically re-derive the contradiction claimed by a certificate."""
    lits = set(literals)
    if cert.diseq is not None:
        if cert.diseq not in lits:
            return False
        atom = table.atom(cert.diseq.atom)
        if atom.kind != EQ or cert.diseq.positive:
            return False
        if cert.below is None or cert.above is None:
            return False
        return _verify_plain(table, lits, cert.below, cert.diseq) and _verify_plain(
            table, lits, cert.above, cert.diseq
        )
    return _verify_plain(table, lits, cert, None)


def _verify_plain(table, lits, cert: Certificate, diseq: Literal | None) -> bool:
    if cert.diseq is not None or not cert.entries:
        return False
    total = LinTerm.constant(0)
    strict = False
    for e in cert.entries:
        if e.mult <= 0:
            return False
        if e.source == diseq:
            allowed = _allowed_rows(table.atom(e.source.atom), e.source.positive)
        elif e.source in lits:
            allowed = _allowed_rows(table.atom(e.source.atom), e.source.positive)
        else:
            return False
        if (e.term, e.strict) not in allowed:
            return False
        total = total.add(e.term.scale(e.mult))
        strict = strict or e.strict
    return total.is_constant and _contradictory(total.const, strict)


def witness_satisfies(table, literals: Iterable[Literal], witness: Mapping[int, Fraction]) -> bool:
    return all(literal_holds(table, lit, witness) for lit in literals)


def _split_literals(table, literals: Sequence[Literal]):
    rows: list[_Row] = []
    diseqs: list[tuple[LinTerm, Literal]] = []
    for lit in literals:
        atom = table.atom(lit.atom)
        if not atom.is_linear:
            raise NonTheoryLiteralError(f"literal over propositional atom {lit.atom}")
        if atom.kind == EQ and not lit.positive:
            diseqs.append((atom.term, lit))
        else:
            for term, strict in _ineq_rows(atom, lit.positive):
                rows.append(_Row(term, strict, lit))
    return rows, diseqs


def _avoid_hyperplanes(
    witness: dict[int, Fraction],
    diseqs: Sequence[tuple[LinTerm, Literal]],
    side_points: Sequence[dict[int, Fraction]],
) -> dict[int, Fraction]:
    """Move the witness inside the polyhedron off every diseq hyperplane.

    Each step walks along the segment towards a point strictly off one
    hyperplane; by convexity the segment stays feasible, and all previously
    fixed disequalities admit at most one bad step size each.
    """
    point = dict(witness)
    for j, (term, _) in enumerate(diseqs):
        if term.evaluate(point) != 0:
            continue
        target = side_points[j]
        keys = set(point) | set(target)
        for k in range(1, len(diseqs) + 3):
            lam = Fraction(1, k)
            cand = {
                v: (1 - lam) * point.get(v, Fraction(0)) + lam * Fraction(target.get(v, 0))
                for v in keys
            }
            if all(t.evaluate(cand) != 0 for t, _ in diseqs[: j + 1]):
                point = cand
                break
        else:  # pragma: no cover - impossible by the counting argument
            raise AssertionError("failed to avoid disequality hyperplanes")
    return point


def check_feasible(table, literals: Iterable[Literal]) -> FeasibilityResult:
    """Exact feasibility of a conjunction of linear literals, with evidence."""
    lits = sorted(set(literals))
    rows, diseqs = _split_literals(table, lits)
    status, payload = _fourier_motzkin(rows)
    if status == "unsat":
        result = FeasibilityResult(False, certificate=_certificate_from(rows, payload))
        _audit(table, lits, result)
        return result

    witness: dict[int, Fraction] = payload
    side_points: list[dict[int, Fraction]] = []
    for term, lit in diseqs:
        aug_lo = list(rows) + [_Row(term, True, lit)]
        lo_status, lo_payload = _fourier_motzkin(aug_lo)
        if lo_status == "sat":
            side_points.append(lo_payload)
            continue
        aug_hi = list(rows) + [_Row(term.neg(), True, lit)]
        hi_status, hi_payload = _fourier_motzkin(aug_hi)
        if hi_status == "sat":
            side_points.append(hi_payload)
            continue
        cert = Certificate(
            diseq=lit,
            below=_certificate_from(aug_lo, lo_payload),
            above=_certificate_from(aug_hi, hi_payload),
        )
        result = FeasibilityResult(False, certificate=cert)
        _audit(table, lits, result)
        return result

    if diseqs:
        witness = _avoid_hyperplanes(witness, diseqs, side_points)
    result = FeasibilityResult(True, witness=witness)
    _audit(table, lits, result)
    return result


def _audit(table, lits, result: FeasibilityResult) -> None:
    if result.sat:
        if not witness_satisfies(table, lits, result.witness):
            raise AssertionError(f"witness audit failed for {lits}")
    else:
        if not verify_certificate(table, lits, result.certificate):
            raise AssertionError(f"certificate audit failed for {lits}")


# ---------------------------------------------------------------------------
# incremental trail


class TheoryState:
    """Assertion trail of theory literals with decision levels.

    Single-owner: one search uses one state.  Feasibility over the trail is
    recomputed on demand and memoized per literal set, which makes push/pop
    exact by construction.
    """

    def __init__(self, table) -> None:
        self.table = table
        self.trail: list[tuple[Literal, int]] = []
        self._memo: dict[frozenset[Literal], FeasibilityResult] = {}
        self.checks = 0

    def literals(self) -> list[Literal]:
        return [lit for lit, _ in self.trail]

    @property
    def top_level(self) -> int:
        return self.trail[-1][1] if self.trail else 0

    def _check(self, lits: frozenset[Literal]) -> FeasibilityResult:
        cached = self._memo.get(lits)
        if cached is None:
            cached = check_feasible(self.table, lits)
            self._memo[lits] = cached
            self.checks += 1
        return cached

    def assert_literal(self, lit: Literal, level: int) -> Conflict | None:
        atom = self.table.atom(lit.atom)
        if not atom.is_linear:
            raise NonTheoryLiteralError(f"atom {lit.atom} is propositional")
        if level < self.top_level:
            raise ValueError(f"level {level} below current top {self.top_level}")
        result = self._check(frozenset(self.literals()) | {lit})
        if result.sat:
            self.trail.append((lit, level))
            return None
        core = result.core
        if lit not in core:  # certificates of a newly infeasible system use lit
            core = core | {lit}
        return Conflict(core)

    def pop_to_level(self, level: int) -> None:
        while self.trail and self.trail[-1][1] > level:
            self.trail.pop()

    def entails(self, lit: Literal) -> bool:
        atom = self.table.atom(lit.atom)
        if not atom.is_linear:
            raise NonTheoryLiteralError(f"atom {lit.atom} is propositional")
        return not self._check(frozenset(self.literals()) | {lit.negated()}).sat


def minimize_core(
    table,
    core: Iterable[Literal],
    check: Callable[[frozenset[Literal]], FeasibilityResult] | None = None,
) -> frozenset[Literal]:
    """Deletion-based minimization: one feasibility call per element."""
    if check is None:
        check = lambda fs: check_feasible(table, fs)
    current = frozenset(core)
    if check(current).sat:
        raise NotInfeasibleError("core is feasible")
    for lit in sorted(current):
        trial = current - {lit}
        if trial and not check(trial).sat:
            current = trial
    return current


def propagate_candidates(
    state: TheoryState, atoms: Sequence[int], budget: int
) -> list[Literal]:
    """Trail-entailed literals over the given atoms, within a check budget.

    Sound but deliberately incomplete: at most ``budget`` entailment checks
    are spent, two per atom at worst.
    """
    out: list[Literal] = []
    used = 0
    for aid in atoms:
        if used >= budget:
            break
        pos = Literal(aid, True)
        used += 1
        if state.entails(pos):
            out.append(pos)
            continue
        if used >= budget:
            break
        used += 1
        if state.entails(pos.negated()):
            out.append(pos.negated())
    return out

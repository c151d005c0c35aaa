"""QF_LRA frontend: rational linear terms, canonical atoms, formula trees and
an SMT-LIB2 subset parser.

Atoms are interned: two comparisons that canonicalize to the same linear
constraint share one atom id.  Strict inequalities are stored as negated
non-strict atoms (t < 0 is the negation of -t <= 0), so a constraint and its
complement share a single Boolean variable downstream.  Comparisons between
two constants fold onto the reserved top/bottom atoms instead of erroring.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping


class SmtError(Exception):
    """Base class for frontend errors."""


class SmtSyntaxError(SmtError):
    """Malformed s-expression or ill-sorted term."""


class UnsupportedFeatureError(SmtError):
    """Input is valid SMT-LIB but outside the supported QF_LRA subset."""


class UndeclaredSymbolError(SmtError):
    """A symbol is used before being declared."""


# ---------------------------------------------------------------------------
# linear terms


@dataclass(frozen=True)
class LinTerm:
    """A rational linear expression sum(c_i * x_i) + const.

    ``coeffs`` holds (real-variable id, coefficient) pairs with strictly
    increasing ids and no zero coefficients, which makes the representation
    canonical and hashable.
    """

    coeffs: tuple[tuple[int, Fraction], ...]
    const: Fraction

    @staticmethod
    def make(coeffs: Mapping[int, Fraction | int], const: Fraction | int = 0) -> "LinTerm":
        items = tuple(
            sorted((v, Fraction(c)) for v, c in coeffs.items() if Fraction(c) != 0)
        )
        return LinTerm(items, Fraction(const))

    @staticmethod
    def constant(value: Fraction | int) -> "LinTerm":
        return LinTerm((), Fraction(value))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.coeffs)

    def add(self, other: "LinTerm") -> "LinTerm":
        acc = self.as_dict()
        for v, c in other.coeffs:
            acc[v] = acc.get(v, Fraction(0)) + c
        return LinTerm.make(acc, self.const + other.const)

    def sub(self, other: "LinTerm") -> "LinTerm":
        return self.add(other.scale(-1))

    def scale(self, k: Fraction | int) -> "LinTerm":
        k = Fraction(k)
        if k == 0:
            return LinTerm.constant(0)
        return LinTerm(tuple((v, c * k) for v, c in self.coeffs), self.const * k)

    def neg(self) -> "LinTerm":
        return self.scale(-1)

    def evaluate(self, point: Mapping[int, Fraction]) -> Fraction:
        total = self.const
        for v, c in self.coeffs:
            total += c * Fraction(point.get(v, 0))
        return total

    @property
    def real_vars(self) -> frozenset[int]:
        return frozenset(v for v, _ in self.coeffs)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs


# ---------------------------------------------------------------------------
# atoms and literals

BOOL = "bool"
LEQ = "leq"  # term <= 0
EQ = "eq"  # term = 0

TOP_ATOM_ID = 0
BOT_ATOM_ID = -1


@dataclass(frozen=True)
class Atom:
    id: int
    kind: str
    name: str | None = None
    term: LinTerm | None = None

    @property
    def is_linear(self) -> bool:
        return self.kind in (LEQ, EQ)


TOP_ATOM = Atom(TOP_ATOM_ID, LEQ, term=LinTerm.constant(0))  # 0 <= 0, always true
BOT_ATOM = Atom(BOT_ATOM_ID, LEQ, term=LinTerm.constant(1))  # 1 <= 0, always false


@dataclass(frozen=True, order=True)
class Literal:
    atom: int
    positive: bool

    def negated(self) -> "Literal":
        # The reserved constant atoms negate onto each other so that the
        # result stays a constant-true/constant-false literal.
        if self.atom == TOP_ATOM_ID:
            return FALSE_LIT
        if self.atom == BOT_ATOM_ID:
            return TRUE_LIT
        return Literal(self.atom, not self.positive)


TRUE_LIT = Literal(TOP_ATOM_ID, True)
FALSE_LIT = Literal(BOT_ATOM_ID, True)


class AtomTable:
    """Interning table assigning dense ids 1..n in first-occurrence order."""

    def __init__(self) -> None:
        self.atoms: list[Atom] = []
        self._ids: dict[object, int] = {}
        self.real_names: list[str] = []
        self._real_ids: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self.atoms)

    def real_var(self, name: str) -> int:
        rid = self._real_ids.get(name)
        if rid is None:
            rid = len(self.real_names)
            self.real_names.append(name)
            self._real_ids[name] = rid
        return rid

    def real_name(self, rid: int) -> str:
        return self.real_names[rid]

    def atom(self, aid: int) -> Atom:
        if aid == TOP_ATOM_ID:
            return TOP_ATOM
        if aid == BOT_ATOM_ID:
            return BOT_ATOM
        return self.atoms[aid - 1]

    def intern_bool(self, name: str) -> int:
        return self._intern((BOOL, name), lambda aid: Atom(aid, BOOL, name=name))

    def intern_linear(self, kind: str, term: LinTerm) -> int:
        if kind not in (LEQ, EQ):
            raise ValueError(f"not a linear atom kind: {kind}")
        return self._intern((kind, term), lambda aid: Atom(aid, kind, term=term))

    def _intern(self, key: object, build) -> int:
        aid = self._ids.get(key)
        if aid is None:
            aid = len(self.atoms) + 1
            self.atoms.append(build(aid))
            self._ids[key] = aid
        return aid


# ---------------------------------------------------------------------------
# canonicalization

def _int_normalized(items: tuple[tuple[int, Fraction], ...], const: Fraction):
    """Scale by a positive rational so all values are integers with gcd 1."""
    lcm = 1
    for _, c in items:
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    lcm = lcm * const.denominator // gcd(lcm, const.denominator)
    scaled = [(v, c * lcm) for v, c in items]
    sconst = const * lcm
    g = abs(sconst.numerator)
    for _, c in scaled:
        g = gcd(g, abs(c.numerator))
    if g > 1:
        scaled = [(v, c / g) for v, c in scaled]
        sconst = sconst / g
    return tuple(scaled), sconst


def canonical_leq(term: LinTerm):
    """Canonical form of ``term <= 0``; a bool when the term is constant."""
    if term.is_constant:
        return term.const <= 0
    items, const = _int_normalized(term.coeffs, term.const)
    return LinTerm(items, const)


def canonical_eq(term: LinTerm):
    """Canonical form of ``term = 0``: first nonzero coefficient positive."""
    if term.is_constant:
        return term.const == 0
    items, const = _int_normalized(term.coeffs, term.const)
    if items[0][1] < 0:
        items = tuple((v, -c) for v, c in items)
        const = -const
    return LinTerm(items, const)


_CMP_OPS = ("<", ">", "<=", ">=", "=", "!=")


def normalize_comparison(table: AtomTable, op: str, lhs: LinTerm, rhs: LinTerm) -> Literal:
    """Turn ``lhs op rhs`` into a literal over a canonical interned atom.

    <= and >= map to positive LinLeq literals, < and > to negated ones via
    t < 0 == not(-t <= 0), = to a positive LinEq and != to a negated LinEq.
    Comparisons between constants fold to the reserved constant literals.
    """
    if op == "distinct":
        op = "!="
    if op not in _CMP_OPS:
        raise ValueError(f"unknown comparison operator: {op}")
    diff = lhs.sub(rhs)
    if op == "<=":
        kind, term, positive = LEQ, diff, True
    elif op == ">=":
        kind, term, positive = LEQ, diff.neg(), True
    elif op == "<":
        kind, term, positive = LEQ, diff.neg(), False
    elif op == ">":
        kind, term, positive = LEQ, diff, False
    elif op == "=":
        kind, term, positive = EQ, diff, True
    else:  # "!="
        kind, term, positive = EQ, diff, False

    canon = canonical_leq(term) if kind == LEQ else canonical_eq(term)
    if isinstance(canon, bool):
        truth = canon if positive else not canon
        return TRUE_LIT if truth else FALSE_LIT
    return Literal(table.intern_linear(kind, canon), positive)


def literal_holds(table: AtomTable, lit: Literal, point: Mapping[int, Fraction]) -> bool:
    """Truth of a linear or constant literal at a rational point."""
    if lit.atom == TOP_ATOM_ID:
        return lit.positive
    if lit.atom == BOT_ATOM_ID:
        return not lit.positive
    atom = table.atom(lit.atom)
    if atom.kind == LEQ:
        value = atom.term.evaluate(point) <= 0
    elif atom.kind == EQ:
        value = atom.term.evaluate(point) == 0
    else:
        raise ValueError(f"literal over non-linear atom {lit.atom}")
    return value if lit.positive else not value


def atom_to_str(atom: Atom, real_names: list[str]) -> str:
    """Canonical one-line serialization, shared by DIMACS and sidecar files."""
    if atom.kind == BOOL:
        return f"bool {atom.name}"
    parts = [atom.kind]
    for v, c in atom.term.coeffs:
        parts.append(f"{int(c)}*{real_names[v]}")
    parts.append(str(int(atom.term.const)))
    return " ".join(parts)


# ---------------------------------------------------------------------------
# formula trees


class FNode:
    __slots__ = ()


@dataclass(frozen=True)
class FTrue(FNode):
    pass


@dataclass(frozen=True)
class FFalse(FNode):
    pass


@dataclass(frozen=True)
class FLit(FNode):
    lit: Literal


@dataclass(frozen=True)
class FNot(FNode):
    child: FNode


@dataclass(frozen=True)
class FAnd(FNode):
    children: tuple[FNode, ...]


@dataclass(frozen=True)
class FOr(FNode):
    children: tuple[FNode, ...]


@dataclass(frozen=True)
class FImplies(FNode):
    left: FNode
    right: FNode


def literal_node(lit: Literal) -> FNode:
    """Wrap a literal, folding the reserved constant atoms to True/False."""
    if lit == TRUE_LIT:
        return FTrue()
    if lit == FALSE_LIT:
        return FFalse()
    return FLit(lit)


@dataclass
class Formula:
    root: FNode
    table: AtomTable


def atoms_of(f: Formula) -> tuple[Atom, ...]:
    """Atom table in first-occurrence order; ids are dense 1..n."""
    return tuple(f.table.atoms)


def evaluate_formula(node: FNode, assignment: Mapping[int, bool]) -> bool:
    if isinstance(node, FTrue):
        return True
    if isinstance(node, FFalse):
        return False
    if isinstance(node, FLit):
        value = assignment[node.lit.atom]
        return value if node.lit.positive else not value
    if isinstance(node, FNot):
        return not evaluate_formula(node.child, assignment)
    if isinstance(node, FAnd):
        return all(evaluate_formula(c, assignment) for c in node.children)
    if isinstance(node, FOr):
        return any(evaluate_formula(c, assignment) for c in node.children)
    if isinstance(node, FImplies):
        return (not evaluate_formula(node.left, assignment)) or evaluate_formula(
            node.right, assignment
        )
    raise TypeError(f"not a formula node: {node!r}")


# ---------------------------------------------------------------------------
# SMT-LIB2 subset parser

_IGNORED_COMMANDS = {"set-info", "set-option", "check-sat", "exit", "get-model"}
_UNSUPPORTED_HEADS = {
    "let",
    "ite",
    "forall",
    "exists",
    "!",
    "push",
    "pop",
    "define-fun",
}


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in "()":
            tokens.append(ch)
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise SmtSyntaxError("unterminated string literal")
            tokens.append(text[i : j + 1])
            i = j + 1
        elif ch == "|":
            j = i + 1
            while j < n and text[j] != "|":
                j += 1
            if j >= n:
                raise SmtSyntaxError("unterminated quoted symbol")
            tokens.append(text[i + 1 : j])
            i = j + 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();"|':
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def _read_sexprs(tokens: list[str]):
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise SmtSyntaxError("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while True:
                if pos >= len(tokens):
                    raise SmtSyntaxError("unbalanced parenthesis")
                if tokens[pos] == ")":
                    pos += 1
                    return items
                items.append(read())
        if tok == ")":
            raise SmtSyntaxError("unexpected ')'")
        return tok

    exprs = []
    while pos < len(tokens):
        exprs.append(read())
    return exprs


def _numeral(tok: str) -> Fraction | None:
    body = tok[1:] if tok.startswith("-") else tok
    if not body:
        return None
    if body.isdigit():
        return Fraction(tok)
    if body.count(".") == 1:
        a, b = body.split(".")
        if a.isdigit() and b.isdigit():
            return Fraction(tok)
    return None


class _Parser:
    def __init__(self) -> None:
        self.table = AtomTable()
        self.sorts: dict[str, str] = {}
        self.asserts: list[FNode] = []

    def run(self, text: str) -> Formula:
        for expr in _read_sexprs(_tokenize(text)):
            self.command(expr)
        if not self.asserts:
            root: FNode = FTrue()
        elif len(self.asserts) == 1:
            root = self.asserts[0]
        else:
            root = FAnd(tuple(self.asserts))
        return Formula(root, self.table)

    def command(self, expr) -> None:
        if not isinstance(expr, list) or not expr:
            raise SmtSyntaxError(f"expected a command, got {expr!r}")
        head = expr[0]
        if head in _IGNORED_COMMANDS:
            return
        if head == "set-logic":
            if len(expr) != 2 or expr[1] != "QF_LRA":
                raise UnsupportedFeatureError(f"logic {expr[1:]} is not QF_LRA")
            return
        if head == "declare-const":
            if len(expr) != 3:
                raise SmtSyntaxError("declare-const expects a name and a sort")
            self.declare(expr[1], expr[2])
            return
        if head == "declare-fun":
            if len(expr) != 4:
                raise SmtSyntaxError("declare-fun expects name, arguments and sort")
            if expr[2] != []:
                raise UnsupportedFeatureError("uninterpreted functions of arity > 0")
            self.declare(expr[1], expr[3])
            return
        if head == "assert":
            if len(expr) != 2:
                raise SmtSyntaxError("assert expects exactly one term")
            self.asserts.append(self.bool_term(expr[1]))
            return
        raise UnsupportedFeatureError(f"unsupported command {head}")

    def declare(self, name, sort) -> None:
        if not isinstance(name, str) or isinstance(name, list):
            raise SmtSyntaxError(f"bad symbol {name!r}")
        if sort not in ("Real", "Bool"):
            raise UnsupportedFeatureError(f"sort {sort} (only Real and Bool)")
        if name in self.sorts:
            raise SmtSyntaxError(f"symbol {name} declared twice")
        self.sorts[name] = sort

    def bool_term(self, expr) -> FNode:
        if isinstance(expr, str):
            if expr == "true":
                return FTrue()
            if expr == "false":
                return FFalse()
            sort = self.sorts.get(expr)
            if sort is None:
                if _numeral(expr) is not None:
                    raise SmtSyntaxError(f"number {expr} where a Boolean term is expected")
                raise UndeclaredSymbolError(f"undeclared symbol {expr!r}")
            if sort != "Bool":
                raise SmtSyntaxError(f"{expr} is Real, expected a Boolean term")
            return FLit(Literal(self.table.intern_bool(expr), True))
        if not expr:
            raise SmtSyntaxError("empty application")
        head = expr[0]
        args = expr[1:]
        if head in _UNSUPPORTED_HEADS:
            raise UnsupportedFeatureError(f"unsupported construct {head!r}")
        if head == "and" or head == "or":
            if not args:
                raise SmtSyntaxError(f"{head} expects at least one argument")
            children = tuple(self.bool_term(a) for a in args)
            return FAnd(children) if head == "and" else FOr(children)
        if head == "not":
            if len(args) != 1:
                raise SmtSyntaxError("not expects one argument")
            return FNot(self.bool_term(args[0]))
        if head == "=>":
            if len(args) < 2:
                raise SmtSyntaxError("=> expects at least two arguments")
            node = self.bool_term(args[-1])
            for a in reversed(args[:-1]):
                node = FImplies(self.bool_term(a), node)
            return node
        if head in ("<", ">", "<=", ">=", "=", "distinct"):
            if len(args) != 2:
                raise UnsupportedFeatureError(f"chained {head} comparison")
            if head == "=" and self.is_bool_expr(args[0]):
                raise UnsupportedFeatureError("Boolean equality")
            lhs = self.real_term(args[0])
            rhs = self.real_term(args[1])
            return literal_node(normalize_comparison(self.table, head, lhs, rhs))
        if head in ("+", "-", "*", "/"):
            self.real_term(expr)  # raises on nonlinearity first
            raise SmtSyntaxError(f"arithmetic term ({head} ...) where a Boolean term is expected")
        raise UndeclaredSymbolError(f"undeclared symbol {head!r}")

    def is_bool_expr(self, expr) -> bool:
        if isinstance(expr, str):
            return expr in ("true", "false") or self.sorts.get(expr) == "Bool"
        return bool(expr) and expr[0] in ("and", "or", "not", "=>", "<", ">", "<=", ">=", "=", "distinct")

    def real_term(self, expr) -> LinTerm:
        if isinstance(expr, str):
            num = _numeral(expr)
            if num is not None:
                return LinTerm.constant(num)
            sort = self.sorts.get(expr)
            if sort is None:
                raise UndeclaredSymbolError(f"undeclared symbol {expr!r}")
            if sort != "Real":
                raise SmtSyntaxError(f"{expr} is Bool, expected a Real term")
            return LinTerm.make({self.table.real_var(expr): Fraction(1)})
        if not expr:
            raise SmtSyntaxError("empty application")
        head = expr[0]
        args = expr[1:]
        if head in _UNSUPPORTED_HEADS:
            raise UnsupportedFeatureError(f"unsupported construct {head!r}")
        if head == "+":
            if not args:
                raise SmtSyntaxError("+ expects at least one argument")
            total = LinTerm.constant(0)
            for a in args:
                total = total.add(self.real_term(a))
            return total
        if head == "-":
            if not args:
                raise SmtSyntaxError("- expects at least one argument")
            if len(args) == 1:
                return self.real_term(args[0]).neg()
            total = self.real_term(args[0])
            for a in args[1:]:
                total = total.sub(self.real_term(a))
            return total
        if head == "*":
            if not args:
                raise SmtSyntaxError("* expects at least one argument")
            terms = [self.real_term(a) for a in args]
            nonconst = [t for t in terms if not t.is_constant]
            if len(nonconst) > 1:
                raise UnsupportedFeatureError("nonlinear term (product of variables)")
            factor = Fraction(1)
            for t in terms:
                if t.is_constant:
                    factor *= t.const
            return (nonconst[0].scale(factor)) if nonconst else LinTerm.constant(factor)
        if head == "/":
            if len(args) != 2:
                raise SmtSyntaxError("/ expects two arguments")
            num = self.real_term(args[0])
            den = self.real_term(args[1])
            if not den.is_constant:
                raise UnsupportedFeatureError("division by a non-constant")
            if den.const == 0:
                raise SmtSyntaxError("division by zero")
            return num.scale(Fraction(1) / den.const)
        raise SmtSyntaxError(f"{head} is not a Real operator")


def parse_smt2(text: str) -> Formula:
    """Parse the supported SMT-LIB2 subset into a Formula.

    The result is the conjunction of all assert commands; atoms are canonical
    and interned in first-occurrence order.
    """
    return _Parser().run(text)

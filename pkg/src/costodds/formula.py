"""Cost formulas: Boolean combinations of budget atoms over one variable.

A cost formula talks about a single non-negative integer, the accumulated
cost ``x``, through atoms ``x <= B``. Negation, conjunction, and
disjunction build arbitrary Boolean combinations on top. The concrete
grammar also accepts ``x >= B``, ``x = B``, and two-sided ``A <= x <= B``
forms, which are rewritten into the three core connectives while parsing,
so the AST only ever contains ``Atom``, ``Not``, ``And``, ``Or``.

Every formula is eventually constant: above its largest atom bound the
truth value cannot change again. ``normalize`` exploits that to compute
the exact satisfying set as a canonical ``IntervalSet``, which is what the
solvers consume.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .errors import FormulaSyntaxError

__all__ = [
    "Atom",
    "Not",
    "And",
    "Or",
    "CostFormula",
    "Formula",
    "IntervalSet",
    "parse",
    "satisfies",
    "normalize",
    "max_constant",
    "is_constant_formula",
    "to_text",
]


@dataclass(frozen=True)
class Atom:
    """The atom ``x <= bound``."""

    bound: int

    def __post_init__(self) -> None:
        if not isinstance(self.bound, int) or isinstance(self.bound, bool):
            raise FormulaSyntaxError(f"atom bound must be an int, got {self.bound!r}")
        if self.bound < 0:
            raise FormulaSyntaxError(f"atom bound must be non-negative, got {self.bound}")


@dataclass(frozen=True)
class Not:
    inner: "CostFormula"


@dataclass(frozen=True)
class And:
    left: "CostFormula"
    right: "CostFormula"


@dataclass(frozen=True)
class Or:
    left: "CostFormula"
    right: "CostFormula"


CostFormula = Atom | Not | And | Or

# Short name used in signatures throughout the package.
Formula = CostFormula


@dataclass(frozen=True)
class IntervalSet:
    """Canonical satisfying set: disjoint, non-adjacent, sorted intervals.

    ``spans`` holds pairs ``(lo, hi)`` of inclusive bounds; ``hi`` is None
    on the last span when the set is unbounded above. Two formulas have
    equal satisfying sets exactly when their IntervalSets are equal.
    """

    spans: tuple[tuple[int, int | None], ...]

    def __contains__(self, value: int) -> bool:
        lows = [lo for lo, _ in self.spans]
        idx = bisect_right(lows, value) - 1
        if idx < 0:
            return False
        lo, hi = self.spans[idx]
        return value >= lo and (hi is None or value <= hi)

    @property
    def is_empty(self) -> bool:
        return not self.spans

    @property
    def is_universal(self) -> bool:
        return self.spans == ((0, None),)

    def complement(self) -> "IntervalSet":
        """The exact complement within the non-negative integers."""
        gaps: list[tuple[int, int | None]] = []
        cursor = 0
        for lo, hi in self.spans:
            if lo > cursor:
                gaps.append((cursor, lo - 1))
            if hi is None:
                return IntervalSet(tuple(gaps))
            cursor = hi + 1
        gaps.append((cursor, None))
        return IntervalSet(tuple(gaps))

    def issubset(self, other: "IntervalSet") -> bool:
        for lo, hi in self.spans:
            if not other._covers(lo, hi):
                return False
        return True

    def _covers(self, lo: int, hi: int | None) -> bool:
        for olo, ohi in self.spans:
            if olo <= lo and (ohi is None or (hi is not None and hi <= ohi)):
                return True
        return False


# Tokenizer: the grammar has single-character operators plus <= and >=.

_SIMPLE = {"!": "not", "&": "and", "|": "or", "(": "lparen", ")": "rparen"}


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens: list[tuple[str, object, int]] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _SIMPLE:
            tokens.append((_SIMPLE[ch], ch, i))
            i += 1
        elif ch == "x":
            tokens.append(("var", "x", i))
            i += 1
        elif text.startswith("<=", i):
            tokens.append(("le", "<=", i))
            i += 2
        elif text.startswith(">=", i):
            tokens.append(("ge", ">=", i))
            i += 2
        elif ch == "=":
            tokens.append(("eq", "=", i))
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
        else:
            raise FormulaSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    """Recursive descent with precedence ! > & > |."""

    def __init__(self, text: str) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, object, int]:
        return self.tokens[self.pos]

    def take(self, kind: str) -> tuple[str, object, int]:
        tok = self.tokens[self.pos]
        if tok[0] != kind:
            raise FormulaSyntaxError(f"expected {kind}, found {tok[1]!r}", tok[2])
        self.pos += 1
        return tok

    def parse(self) -> CostFormula:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise FormulaSyntaxError(f"trailing input {tok[1]!r}", tok[2])
        return node

    def expr(self) -> CostFormula:
        node = self.term()
        while self.peek()[0] == "or":
            self.take("or")
            node = Or(node, self.term())
        return node

    def term(self) -> CostFormula:
        node = self.factor()
        while self.peek()[0] == "and":
            self.take("and")
            node = And(node, self.factor())
        return node

    def factor(self) -> CostFormula:
        kind, _, pos = self.peek()
        if kind == "not":
            self.take("not")
            return Not(self.factor())
        if kind == "lparen":
            self.take("lparen")
            node = self.expr()
            self.take("rparen")
            return node
        if kind in ("var", "int"):
            return self.atom()
        raise FormulaSyntaxError("expected an atom, '!', or '('", pos)

    def atom(self) -> CostFormula:
        kind, value, pos = self.peek()
        if kind == "var":
            self.take("var")
            op_kind, _, op_pos = self.peek()
            if op_kind == "le":
                self.take("le")
                bound = self._int()
                return Atom(bound)
            if op_kind == "ge":
                self.take("ge")
                return _at_least(self._int())
            if op_kind == "eq":
                self.take("eq")
                return _exactly(self._int())
            raise FormulaSyntaxError("expected <=, >=, or = after x", op_pos)
        # Two-sided form: INT <= x <= INT.
        self.take("int")
        self.take("le")
        self.take("var")
        self.take("le")
        upper = self._int()
        lower = value
        assert isinstance(lower, int)
        return _between(lower, upper)

    def _int(self) -> int:
        tok = self.take("int")
        value = tok[1]
        assert isinstance(value, int)
        return value


def _at_least(bound: int) -> CostFormula:
    # x >= 0 is vacuously true; there is no literal "true", so encode it.
    if bound == 0:
        return Or(Atom(0), Not(Atom(0)))
    return Not(Atom(bound - 1))


def _exactly(bound: int) -> CostFormula:
    if bound == 0:
        return Atom(0)
    return And(Atom(bound), Not(Atom(bound - 1)))


def _between(lower: int, upper: int) -> CostFormula:
    # An inverted range (lower > upper) yields an unsatisfiable conjunction,
    # which is the natural reading rather than an error.
    if lower == 0:
        return Atom(upper)
    return And(Atom(upper), Not(Atom(lower - 1)))


def parse(text: str) -> CostFormula:
    """Parse formula text into an AST.

    The surface syntax is ``x<=B``, ``x>=B``, ``x=B``, ``A<=x<=B``, the
    connectives ``!``, ``&``, ``|`` (tightest first), and parentheses.
    Whitespace is insignificant. Bounds are arbitrary-precision decimals.
    """
    return _Parser(text).parse()


def satisfies(value: int, formula: CostFormula) -> bool:
    """Evaluate the formula with ``x := value``."""
    if isinstance(formula, Atom):
        return value <= formula.bound
    if isinstance(formula, Not):
        return not satisfies(value, formula.inner)
    if isinstance(formula, And):
        return satisfies(value, formula.left) and satisfies(value, formula.right)
    if isinstance(formula, Or):
        return satisfies(value, formula.left) or satisfies(value, formula.right)
    raise TypeError(f"not a cost formula: {formula!r}")


def max_constant(formula: CostFormula) -> int:
    """The largest atom bound; beyond it the formula's verdict is fixed.

    Every AST produced here contains at least one atom, so the edge case
    of an atom-free formula only matters for hand-built trees; it returns
    0, and constancy can be checked with ``is_constant_formula``.
    """
    if isinstance(formula, Atom):
        return formula.bound
    if isinstance(formula, Not):
        return max_constant(formula.inner)
    if isinstance(formula, (And, Or)):
        return max(max_constant(formula.left), max_constant(formula.right))
    raise TypeError(f"not a cost formula: {formula!r}")


def normalize(formula: CostFormula) -> IntervalSet:
    """The exact satisfying set of the formula as disjoint intervals.

    Truth is sampled on [0, B+1] for B the largest atom bound; the value
    at B+1 decides whether the final interval extends to infinity. The
    result is canonical: semantically equal formulas normalize equally.
    """
    top = max_constant(formula)
    spans: list[tuple[int, int | None]] = []
    run_start: int | None = None
    for n in range(top + 2):
        if satisfies(n, formula):
            if run_start is None:
                run_start = n
        elif run_start is not None:
            spans.append((run_start, n - 1))
            run_start = None
    if run_start is not None:
        # The run reaches B+1, where the verdict has gone constant.
        spans.append((run_start, None))
    return IntervalSet(tuple(spans))


def is_constant_formula(formula: CostFormula) -> bool:
    """True when the formula is vacuously true or unsatisfiable."""
    result = normalize(formula)
    return result.is_empty or result.is_universal


def to_text(formula: CostFormula) -> str:
    """Render the AST back to parseable text (atoms only as ``x<=B``)."""
    if isinstance(formula, Atom):
        return f"x<={formula.bound}"
    if isinstance(formula, Not):
        inner = to_text(formula.inner)
        if isinstance(formula.inner, (And, Or)):
            inner = f"({inner})"
        return f"!{inner}"
    if isinstance(formula, And):
        parts = []
        for side in (formula.left, formula.right):
            text = to_text(side)
            if isinstance(side, Or):
                text = f"({text})"
            parts.append(text)
        return " & ".join(parts)
    if isinstance(formula, Or):
        return f"{to_text(formula.left)} | {to_text(formula.right)}"
    raise TypeError(f"not a cost formula: {formula!r}")

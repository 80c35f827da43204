"""Formula AST for the bimodal language, with parser, printer and closures.

The core syntax is atoms, falsum, negation, conjunction and the two boxes
``[a]``/``[b]``.  Everything else (``true``, ``|``, ``->``, ``<a>``, ``<b>``)
is surface sugar eliminated by the parser.  Formulas are interned, so
structurally equal formulas are the same object and carry precomputed
size, modal degree and a canonical sort key.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator

ATOM = "atom"
BOT = "bot"
NEG = "neg"
AND = "and"
BOXA = "boxa"
BOXB = "boxb"


class Formula:
    """One interned AST node; build instances via the module factories."""

    __slots__ = ("kind", "name", "left", "right", "size", "degree", "key", "_hash")

    def __init__(self, kind: str, name: str | None, left: "Formula | None",
                 right: "Formula | None", size: int, degree: int, key: str):
        self.kind = kind
        self.name = name
        self.left = left
        self.right = right
        self.size = size
        self.degree = degree
        self.key = key
        self._hash = hash(key)

    @property
    def sort_key(self) -> tuple[int, str]:
        return (self.size, self.key)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Formula") -> bool:
        return self.sort_key < other.sort_key

    def __repr__(self) -> str:
        return f"Formula({print_formula(self)!r})"

    def __str__(self) -> str:
        return print_formula(self)


_TABLE: dict[str, Formula] = {}


def _intern(kind: str, name: str | None, left: Formula | None, right: Formula | None,
            size: int, degree: int, key: str) -> Formula:
    f = _TABLE.get(key)
    if f is None:
        f = Formula(kind, name, left, right, size, degree, key)
        _TABLE[key] = f
    return f


def atom(name: str) -> Formula:
    if not name or not (name[0].isalpha() and name[0].islower()):
        raise ValueError(f"atom name must start with a lowercase letter: {name!r}")
    return _intern(ATOM, name, None, None, 1, 0, name)


def neg(f: Formula) -> Formula:
    return _intern(NEG, None, f, None, f.size + 1, f.degree, "~" + f.key)


def conj(left: Formula, right: Formula) -> Formula:
    key = f"&({left.key},{right.key})"
    return _intern(AND, None, left, right, left.size + right.size + 1,
                   max(left.degree, right.degree), key)


def box_a(f: Formula) -> Formula:
    return _intern(BOXA, None, f, None, f.size + 1, f.degree + 1, "[a]" + f.key)


def box_b(f: Formula) -> Formula:
    return _intern(BOXB, None, f, None, f.size + 1, f.degree + 1, "[b]" + f.key)


FALSUM = _intern(BOT, None, None, None, 1, 0, "#f")


def truth() -> Formula:
    return neg(FALSUM)


def disj(left: Formula, right: Formula) -> Formula:
    return neg(conj(neg(left), neg(right)))


def implies(left: Formula, right: Formula) -> Formula:
    return neg(conj(left, neg(right)))


def dia_a(f: Formula) -> Formula:
    return neg(box_a(neg(f)))


def dia_b(f: Formula) -> Formula:
    return neg(box_b(neg(f)))


def degree(f: Formula) -> int:
    """Modal depth: boxes of either flavour count one level each."""
    return f.degree


def size(f: Formula) -> int:
    """Number of symbol occurrences, one per AST node."""
    return f.size


def atoms_of(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g.kind == ATOM:
            out.add(g.name)  # type: ignore[arg-type]
        else:
            if g.left is not None:
                stack.append(g.left)
            if g.right is not None:
                stack.append(g.right)
    return frozenset(out)


def subformulas(f: Formula) -> frozenset[Formula]:
    """All AST nodes of f, f included."""
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if g.left is not None:
            stack.append(g.left)
        if g.right is not None:
            stack.append(g.right)
    return frozenset(out)


# --------------------------------------------------------------------------
# Formula sets
# --------------------------------------------------------------------------

class FormulaSet:
    """Immutable set of formulas iterated in the canonical (size, key) order."""

    __slots__ = ("fs", "_sorted", "_hash")

    def __init__(self, items: Iterable[Formula] = ()):
        fs = items.fs if isinstance(items, FormulaSet) else frozenset(items)
        self.fs: frozenset[Formula] = fs
        self._sorted: tuple[Formula, ...] | None = None
        self._hash = hash(fs)

    def sorted(self) -> tuple[Formula, ...]:
        if self._sorted is None:
            self._sorted = tuple(sorted(self.fs, key=lambda f: f.sort_key))
        return self._sorted

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.sorted())

    def __contains__(self, f: Formula) -> bool:
        return f in self.fs

    def __len__(self) -> int:
        return len(self.fs)

    def __bool__(self) -> bool:
        return bool(self.fs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FormulaSet):
            return self.fs == other.fs
        return NotImplemented

    def __hash__(self) -> int:
        return self._hash

    def __or__(self, other: "FormulaSet") -> "FormulaSet":
        return FormulaSet(self.fs | other.fs)

    def __and__(self, other: "FormulaSet") -> "FormulaSet":
        return FormulaSet(self.fs & other.fs)

    def __sub__(self, other: "FormulaSet") -> "FormulaSet":
        return FormulaSet(self.fs - other.fs)

    def __le__(self, other: "FormulaSet") -> bool:
        return self.fs <= other.fs

    def add(self, f: Formula) -> "FormulaSet":
        return self if f in self.fs else FormulaSet(self.fs | {f})

    @property
    def degree(self) -> int:
        # max over an empty set is taken to be 0
        return max((f.degree for f in self.fs), default=0)

    @property
    def total_size(self) -> int:
        return sum(f.size for f in self.fs)

    def __repr__(self) -> str:
        return "{" + ", ".join(print_formula(f) for f in self) + "}"


EMPTY_SET = FormulaSet()


def fset(*items: Formula) -> FormulaSet:
    return FormulaSet(items)


# --------------------------------------------------------------------------
# Closure operators
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _csf1(f: Formula) -> frozenset[Formula]:
    out = {f}
    if f.kind == AND:
        out |= _csf1(f.left) | _csf1(f.right)
    elif f.kind == NEG:
        g = f.left
        out |= _csf1(g)
        if g.kind == AND:
            out |= _csf1(neg(g.left)) | _csf1(neg(g.right))
    return frozenset(out)


@lru_cache(maxsize=None)
def _sf1(f: Formula) -> frozenset[Formula]:
    out = {f}
    if f.kind == AND:
        out |= _sf1(f.left) | _sf1(f.right)
    elif f.kind in (BOXA, BOXB):
        out |= _sf1(f.left)
    elif f.kind == NEG:
        g = f.left
        out |= _sf1(g)
        if g.kind == AND:
            out |= _sf1(neg(g.left)) | _sf1(neg(g.right))
        elif g.kind in (BOXA, BOXB):
            out |= _sf1(neg(g.left))
    return frozenset(out)


def csf(w: FormulaSet) -> FormulaSet:
    """Least superset of w closed under the classical decomposition rules."""
    out: frozenset[Formula] = frozenset()
    for f in w.fs:
        out |= _csf1(f)
    return FormulaSet(out)


def sf(w: FormulaSet) -> FormulaSet:
    """Like csf, but additionally closed under box decomposition."""
    out: frozenset[Formula] = frozenset()
    for f in w.fs:
        out |= _sf1(f)
    return FormulaSet(out)


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

class FormulaSyntaxError(ValueError):
    """Raised on malformed input, with the character offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_KEYWORDS = {"false", "true"}


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, str, int]] = []
        self._scan()
        self.index = 0

    def _scan(self) -> None:
        text = self.text
        i = 0
        n = len(text)
        while i < n:
            c = text[i]
            if c.isspace():
                i += 1
                continue
            if c in "~&|()":
                self.tokens.append((c, c, i))
                i += 1
            elif text.startswith("->", i):
                self.tokens.append(("->", "->", i))
                i += 2
            elif c in "[<":
                close = "]" if c == "[" else ">"
                if i + 2 < n and text[i + 1] in "ab" and text[i + 2] == close:
                    self.tokens.append((c + text[i + 1] + close, text[i + 1], i))
                    i += 3
                else:
                    raise FormulaSyntaxError(f"malformed modality starting with {c!r}", i)
            elif c.isalpha() and c.islower():
                j = i + 1
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                word = text[i:j]
                if word in _KEYWORDS:
                    self.tokens.append((word, word, i))
                else:
                    self.tokens.append(("ident", word, i))
                i = j
            else:
                raise FormulaSyntaxError(f"unexpected character {c!r}", i)
        self.tokens.append(("eof", "", n))

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.index]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.index]
        self.index += 1
        return tok


def parse(text: str) -> Formula:
    """Parse the surface grammar; derived connectives are eliminated."""
    toks = _Tokenizer(text)
    f = _parse_implies(toks)
    kind, _, pos = toks.peek()
    if kind != "eof":
        raise FormulaSyntaxError(f"unexpected trailing input {kind!r}", pos)
    return f


def _parse_implies(toks: _Tokenizer) -> Formula:
    left = _parse_or(toks)
    if toks.peek()[0] == "->":
        toks.next()
        right = _parse_implies(toks)  # right-associative
        return implies(left, right)
    return left


def _parse_or(toks: _Tokenizer) -> Formula:
    f = _parse_and(toks)
    while toks.peek()[0] == "|":
        toks.next()
        f = disj(f, _parse_and(toks))
    return f


def _parse_and(toks: _Tokenizer) -> Formula:
    f = _parse_unary(toks)
    while toks.peek()[0] == "&":
        toks.next()
        f = conj(f, _parse_unary(toks))
    return f


def _parse_unary(toks: _Tokenizer) -> Formula:
    kind, value, pos = toks.peek()
    if kind == "~":
        toks.next()
        return neg(_parse_unary(toks))
    if kind in ("[a]", "[b]"):
        toks.next()
        child = _parse_unary(toks)
        return box_a(child) if value == "a" else box_b(child)
    if kind in ("<a>", "<b>"):
        toks.next()
        child = _parse_unary(toks)
        return dia_a(child) if value == "a" else dia_b(child)
    return _parse_primary(toks)


def _parse_primary(toks: _Tokenizer) -> Formula:
    kind, value, pos = toks.next()
    if kind == "ident":
        return atom(value)
    if kind == "false":
        return FALSUM
    if kind == "true":
        return truth()
    if kind == "(":
        f = _parse_implies(toks)
        k2, _, pos2 = toks.next()
        if k2 != ")":
            raise FormulaSyntaxError("expected ')'", pos2)
        return f
    raise FormulaSyntaxError(f"expected a formula, found {kind!r}", pos)


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------

# Precedence levels used for minimal parenthesisation.  The printer only
# emits core connectives, so '|' and '->' never appear in output.
_LEVEL_AND = 3
_LEVEL_UNARY = 4
_LEVEL_ATOM = 5


def _level(f: Formula) -> int:
    if f.kind == AND:
        return _LEVEL_AND
    if f.kind in (NEG, BOXA, BOXB):
        return _LEVEL_UNARY
    return _LEVEL_ATOM


def print_formula(f: Formula) -> str:
    """Render with minimal parentheses; inverse of parse on core syntax."""
    return _print(f)


def _print(f: Formula) -> str:
    if f.kind == ATOM:
        return f.name  # type: ignore[return-value]
    if f.kind == BOT:
        return "false"
    if f.kind == NEG:
        return "~" + _wrap(f.left, _LEVEL_UNARY)
    if f.kind == BOXA:
        return "[a]" + _wrap(f.left, _LEVEL_UNARY)
    if f.kind == BOXB:
        return "[b]" + _wrap(f.left, _LEVEL_UNARY)
    # conjunction is left-associative: the right child needs parens at equal level
    left = _wrap(f.left, _LEVEL_AND)
    right = _wrap(f.right, _LEVEL_AND + 1)
    return f"{left} & {right}"


def _wrap(f: Formula, minimum: int) -> str:
    s = _print(f)
    return "(" + s + ")" if _level(f) < minimum else s

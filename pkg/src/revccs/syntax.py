"""Process terms: abstract syntax, concrete grammar, and term equivalences.

The term language is the recursion-free fragment: guarded sums of
action-prefixed continuations, binary parallel composition, and name
restriction.  The empty sum is the inactive process ``0``.

Concrete syntax (whitespace insignificant)::

    proc     ::= par
    par      ::= sum ("|" sum)*
    sum      ::= prefixed ("+" prefixed)* | "0" | atom
    prefixed ::= label "." (prefixed | atom) | label
    atom     ::= "0" | "(" proc ")" | atom "\\" name
    label    ::= name | "~" name
    name     ::= [a-z][a-zA-Z0-9_]*

A bare label abbreviates ``label.0``.  ``.`` binds tightest, then ``\\``,
then ``+``, then ``|``.  Operands of ``+`` must be prefixed terms, so sums
are guarded by construction.  The name ``tau`` denotes the silent action
and is not a legal prefix or restriction subject.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

__all__ = [
    "Label",
    "TAU",
    "inp",
    "out",
    "Sum",
    "Par",
    "Restrict",
    "Proc",
    "NIL",
    "ParseError",
    "parse_ccs",
    "pretty_ccs",
    "free_names",
    "all_names",
    "alpha_eq",
    "ccs_canonical",
    "ccs_congruent",
    "prefix_count",
    "proc_key",
]

_NAME_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")


# --------------------------------------------------------------------------
# Actions
# --------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Label:
    """An action: an input name, an output co-name, or the silent ``tau``."""

    kind: str  # "in" | "out" | "tau"
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ("in", "out", "tau"):
            raise ValueError(f"bad label kind {self.kind!r}")
        if self.kind == "tau" and self.name:
            raise ValueError("tau carries no name")
        if self.kind != "tau" and not _NAME_RE.fullmatch(self.name):
            raise ValueError(f"bad name {self.name!r}")

    @property
    def is_tau(self) -> bool:
        return self.kind == "tau"

    def complement(self) -> "Label":
        """Swap input and output; ``tau`` is its own complement."""
        if self.kind == "in":
            return Label("out", self.name)
        if self.kind == "out":
            return Label("in", self.name)
        return self

    def rename(self, mapping: dict) -> "Label":
        if self.kind == "tau" or self.name not in mapping:
            return self
        return Label(self.kind, mapping[self.name])

    def __str__(self) -> str:
        if self.kind == "tau":
            return "tau"
        return self.name if self.kind == "in" else "~" + self.name


TAU = Label("tau")


def inp(name: str) -> Label:
    return Label("in", name)


def out(name: str) -> Label:
    return Label("out", name)


# --------------------------------------------------------------------------
# Terms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Sum:
    """Guarded sum; each branch is (non-tau prefix, continuation).

    The empty sum is the inactive process.
    """

    branches: tuple = ()

    def __post_init__(self) -> None:
        for label, _ in self.branches:
            if label.is_tau:
                raise ValueError("tau cannot prefix a summand")


@dataclass(frozen=True)
class Par:
    left: "Proc"
    right: "Proc"


@dataclass(frozen=True)
class Restrict:
    body: "Proc"
    name: str


Proc = Union[Sum, Par, Restrict]

NIL = Sum()


def prefix_count(p: Proc) -> int:
    """Number of action prefixes occurring in the term."""
    if isinstance(p, Sum):
        return sum(1 + prefix_count(cont) for _, cont in p.branches)
    if isinstance(p, Par):
        return prefix_count(p.left) + prefix_count(p.right)
    return prefix_count(p.body)


def free_names(p: Proc) -> frozenset:
    if isinstance(p, Sum):
        names = set()
        for label, cont in p.branches:
            if not label.is_tau:
                names.add(label.name)
            names |= free_names(cont)
        return frozenset(names)
    if isinstance(p, Par):
        return free_names(p.left) | free_names(p.right)
    return free_names(p.body) - {p.name}


def all_names(p: Proc) -> frozenset:
    """Every name occurring in the term, bound or free."""
    if isinstance(p, Sum):
        names = set()
        for label, cont in p.branches:
            if not label.is_tau:
                names.add(label.name)
            names |= all_names(cont)
        return frozenset(names)
    if isinstance(p, Par):
        return all_names(p.left) | all_names(p.right)
    return all_names(p.body) | {p.name}


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

class ParseError(ValueError):
    """Syntax error with a source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<name>[a-z][a-zA-Z0-9_]*)|(?P<op>[~.+|\\()0])"
)


class _Tokens:
    def __init__(self, text: str):
        self.tokens = []
        line, col = 1, 1
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", line, col)
            value = m.group(0)
            if not m.lastgroup == "ws":
                self.tokens.append((m.lastgroup, value, line, col))
            for ch in value:
                if ch == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
            pos = m.end()
        self.tokens.append(("eof", "", line, col))
        self.index = 0

    def peek(self):
        return self.tokens[self.index]

    def next(self):
        tok = self.tokens[self.index]
        if tok[0] != "eof":
            self.index += 1
        return tok

    def error(self, message: str):
        _, _, line, col = self.peek()
        raise ParseError(message, line, col)


def parse_ccs(text: str) -> Proc:
    """Parse the concrete syntax into a term.

    Raises :class:`ParseError` (with line and column) on malformed input,
    on ``tau`` used as a prefix, and on restriction of anything but a name.
    """
    toks = _Tokens(text)
    proc = _parse_par(toks)
    if toks.peek()[0] != "eof":
        toks.error(f"unexpected {toks.peek()[1]!r}")
    return proc


def _parse_par(toks: _Tokens) -> Proc:
    parts = [_parse_sum(toks)]
    while toks.peek()[1] == "|":
        toks.next()
        parts.append(_parse_sum(toks))
    proc = parts[0]
    for part in parts[1:]:
        proc = Par(proc, part)
    return proc


def _at_label(toks: _Tokens) -> bool:
    kind, value, _, _ = toks.peek()
    return kind == "name" or value == "~"


def _parse_sum(toks: _Tokens) -> Proc:
    if _at_label(toks):
        branches = [_parse_prefixed(toks)]
        while toks.peek()[1] == "+":
            toks.next()
            if not _at_label(toks):
                toks.error("summands must be action-prefixed")
            branches.append(_parse_prefixed(toks))
        merged = []
        for b in branches:
            merged.extend(b)
        return Sum(tuple(merged))
    return _parse_atom(toks)


def _parse_prefixed(toks: _Tokens) -> tuple:
    """One summand; returns a branch tuple suitable for Sum."""
    label = _parse_label(toks)
    if toks.peek()[1] == ".":
        toks.next()
        if _at_label(toks):
            cont_branches = _parse_prefixed(toks)
            cont: Proc = Sum(cont_branches)
        else:
            cont = _parse_atom(toks)
        return ((label, cont),)
    return ((label, NIL),)


def _parse_label(toks: _Tokens) -> Label:
    kind, value, line, col = toks.next()
    if value == "~":
        kind, value, line, col = toks.next()
        if kind != "name":
            raise ParseError("expected a name after '~'", line, col)
        if value == "tau":
            raise ParseError("tau cannot be used as a prefix", line, col)
        return Label("out", value)
    if kind != "name":
        raise ParseError(f"expected a label, got {value!r}", line, col)
    if value == "tau":
        raise ParseError("tau cannot be used as a prefix", line, col)
    return Label("in", value)


def _parse_atom(toks: _Tokens) -> Proc:
    kind, value, line, col = toks.peek()
    if value == "0":
        toks.next()
        return _postfix_restrictions(toks, NIL)
    if value == "(":
        toks.next()
        inner = _parse_par(toks)
        if toks.peek()[1] != ")":
            toks.error("expected ')'")
        toks.next()
        return _postfix_restrictions(toks, inner)
    raise ParseError(f"expected a process, got {value!r}" if value else "unexpected end of input", line, col)


def _postfix_restrictions(toks: _Tokens, proc: Proc) -> Proc:
    while toks.peek()[1] == "\\":
        toks.next()
        kind, value, line, col = toks.next()
        if kind != "name" or value == "tau":
            raise ParseError("restriction expects a name", line, col)
        proc = Restrict(proc, value)
    return proc


# --------------------------------------------------------------------------
# Pretty-printing
# --------------------------------------------------------------------------

def pretty_ccs(p: Proc) -> str:
    """Render a term so that re-parsing yields a structurally equal term."""
    return _pretty_par(p)


def _pretty_par(p: Proc) -> str:
    if isinstance(p, Par):
        return f"{_pretty_par(p.left)} | {_pretty_par(p.right)}"
    return _pretty_sum(p)


def _pretty_sum(p: Proc) -> str:
    if isinstance(p, Sum) and p.branches:
        return " + ".join(_pretty_branch(label, cont) for label, cont in p.branches)
    return _pretty_atom(p)


def _pretty_branch(label: Label, cont: Proc) -> str:
    if cont == NIL:
        return str(label)
    if isinstance(cont, Sum) and len(cont.branches) == 1:
        inner_label, inner_cont = cont.branches[0]
        return f"{label}.{_pretty_branch(inner_label, inner_cont)}"
    return f"{label}.{_pretty_atom(cont)}"


def _pretty_atom(p: Proc) -> str:
    if p == NIL:
        return "0"
    if isinstance(p, Restrict):
        return f"{_pretty_atom(p.body)} \\ {p.name}"
    return f"({_pretty_par(p)})"


# --------------------------------------------------------------------------
# Alpha-equivalence
# --------------------------------------------------------------------------

def alpha_eq(p: Proc, q: Proc) -> bool:
    """Equality up to consistent renaming of restriction-bound names."""
    return _alpha_eq(p, q, {}, {})


def _alpha_eq(p: Proc, q: Proc, fwd: dict, bwd: dict) -> bool:
    if isinstance(p, Sum) and isinstance(q, Sum):
        if len(p.branches) != len(q.branches):
            return False
        return all(
            _label_eq(lp, lq, fwd, bwd) and _alpha_eq(cp, cq, fwd, bwd)
            for (lp, cp), (lq, cq) in zip(p.branches, q.branches)
        )
    if isinstance(p, Par) and isinstance(q, Par):
        return _alpha_eq(p.left, q.left, fwd, bwd) and _alpha_eq(p.right, q.right, fwd, bwd)
    if isinstance(p, Restrict) and isinstance(q, Restrict):
        fwd2 = {**fwd, p.name: q.name}
        bwd2 = {**bwd, q.name: p.name}
        return _alpha_eq(p.body, q.body, fwd2, bwd2)
    return False


def _label_eq(lp: Label, lq: Label, fwd: dict, bwd: dict) -> bool:
    if lp.kind != lq.kind:
        return False
    if lp.is_tau:
        return True
    # Names must correspond under the bound-name bijection; free names map
    # to themselves.
    return fwd.get(lp.name, lp.name) == lq.name and bwd.get(lq.name, lq.name) == lp.name


# --------------------------------------------------------------------------
# Structural congruence via canonical forms
# --------------------------------------------------------------------------

def _label_key(label: Label):
    return ({"in": 0, "out": 1, "tau": 2}[label.kind], label.name)


def proc_key(p: Proc):
    """Total order on terms, used for canonical sorting."""
    if isinstance(p, Sum):
        return (0, tuple((_label_key(l), proc_key(c)) for l, c in p.branches))
    if isinstance(p, Par):
        return (1, proc_key(p.left), proc_key(p.right))
    return (2, proc_key(p.body), p.name)


def _canon_binder_name(body: Proc, depth: int, taken: frozenset) -> str:
    base = f"n{depth}"
    if base not in taken:
        return base
    k = 0
    while f"n{depth}_{k}" in taken:
        k += 1
    return f"n{depth}_{k}"


def ccs_canonical(p: Proc) -> Proc:
    """Canonical representative modulo structural congruence.

    The congruence is: associativity and commutativity of both ``|`` and
    ``+``, ``P | 0 = P``, and alpha-conversion of restriction-bound names.
    Sums are sorted as multisets, parallel components are flattened, sorted
    and re-folded, and binders are renamed depth-canonically.
    """
    return _canon(p, {}, 0)


def _canon(p: Proc, env: dict, depth: int) -> Proc:
    if isinstance(p, Sum):
        branches = sorted(
            ((label.rename(env), _canon(cont, env, depth)) for label, cont in p.branches),
            key=lambda b: (_label_key(b[0]), proc_key(b[1])),
        )
        return Sum(tuple(branches))
    if isinstance(p, Par):
        parts = []
        for child in _par_factors(p):
            c = _canon(child, env, depth)
            if c == NIL:
                continue
            parts.extend(_par_factors(c))
        if not parts:
            return NIL
        parts.sort(key=proc_key)
        result = parts[-1]
        for part in reversed(parts[:-1]):
            result = Par(part, result)
        return result
    # Restriction: pick a canonical bound name that cannot capture any
    # (already renamed) free name of the body.
    taken = frozenset(env.get(n, n) for n in free_names(p.body) if n != p.name)
    fresh = _canon_binder_name(p.body, depth, taken)
    env2 = {**env, p.name: fresh}
    return Restrict(_canon(p.body, env2, depth + 1), fresh)


def _par_factors(p: Proc) -> Iterator[Proc]:
    if isinstance(p, Par):
        yield from _par_factors(p.left)
        yield from _par_factors(p.right)
    else:
        yield p


def ccs_congruent(p: Proc, q: Proc) -> bool:
    """Structural congruence, decided as equality of canonical forms."""
    return ccs_canonical(p) == ccs_canonical(q)

"""Loop description language.

::

    vars x, y;                         # declared variables
    path: x < y, x' = x + y, 2*y' = y;  # one conjunctive path
    path fast: x >= 10, x' = x - 2;     # optional label

Linear expressions use integer literals, variables, primed variables and
``+ - *``; ``*`` may only join a literal and a variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..lincons import Conj, Dnf, normalize_atom
from ..relk import Rel, StateSet

Lin = Tuple[Tuple[Tuple[str, int], ...], int]   # ((var, coeff), ...), constant
Constraint = Tuple[Lin, str, Lin]

OPS = ("<=", ">=", "==", "=", "<", ">")


class LoopSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class LoopPath:
    label: Optional[str]
    constraints: Tuple[Constraint, ...]


@dataclass(frozen=True)
class LoopSpec:
    name: str
    vars: Tuple[str, ...]
    paths: Tuple[LoopPath, ...]

    def to_rel(self) -> Rel:
        conjs = []
        for p in self.paths:
            atoms = []
            for lhs, op, rhs in p.constraints:
                atoms += normalize_atom((dict(lhs[0]), lhs[1]), op, (dict(rhs[0]), rhs[1]))
            conjs.append(Conj.of(atoms))
        return Rel(self.vars, Dnf(tuple(c for c in conjs)))


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<num>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*'?)
  | (?P<op><=|>=|==|=|<|>)
  | (?P<punct>[,;:+\-*\[\]()])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> List[_Tok]:
    toks: List[_Tok] = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise LoopSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0
        self.vars: List[str] = []

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.peek()
        raise LoopSyntaxError(msg, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            self.fail(f"expected {text!r}, found {t.text or 'end of input'!r}", t)
        return t

    def spec(self, name: str) -> LoopSpec:
        t = self.next()
        if t.text != "vars":
            self.fail("expected 'vars' declaration", t)
        while True:
            v = self.next()
            if v.kind != "id" or v.text.endswith("'") or v.text in ("vars", "path"):
                self.fail("expected a variable name", v)
            if v.text in self.vars:
                self.fail(f"variable {v.text!r} declared twice", v)
            self.vars.append(v.text)
            if self.peek().text == ",":
                self.next()
                continue
            self.expect(";")
            break
        paths: List[LoopPath] = []
        while self.peek().kind != "eof":
            paths.append(self.path())
        if not paths:
            self.fail("expected at least one 'path'")
        return LoopSpec(name, tuple(self.vars), tuple(paths))

    def path(self) -> LoopPath:
        t = self.next()
        if t.text != "path":
            self.fail("expected 'path'", t)
        label = None
        if self.peek().text == "[":
            self.next()
            lt = self.next()
            if lt.kind != "id":
                self.fail("expected a path label", lt)
            label = lt.text
            self.expect("]")
        elif self.peek().kind == "id":
            label = self.next().text
        self.expect(":")
        cons = [self.constraint()]
        while self.peek().text == ",":
            self.next()
            cons.append(self.constraint())
        self.expect(";")
        return LoopPath(label, tuple(cons))

    def constraint(self) -> Constraint:
        lhs = self.linexpr()
        op = self.next()
        if op.kind != "op":
            self.fail("expected a comparison operator", op)
        rhs = self.linexpr()
        return lhs, ("=" if op.text == "==" else op.text), rhs

    def linexpr(self) -> Lin:
        coeffs: Dict[str, int] = {}
        const = 0
        sign = 1
        if self.peek().text in "+-" and self.peek().kind == "punct":
            sign = -1 if self.next().text == "-" else 1
        while True:
            k, v = self.term()
            if v is None:
                const += sign * k
            else:
                coeffs[v] = coeffs.get(v, 0) + sign * k
            if self.peek().text in ("+", "-"):
                sign = -1 if self.next().text == "-" else 1
            else:
                break
        return tuple(sorted((v, c) for v, c in coeffs.items() if c)), const

    def var(self, t: _Tok) -> str:
        base = t.text.rstrip("'")
        if base not in self.vars:
            self.fail(f"undeclared variable {base!r}", t)
        return t.text

    def term(self) -> Tuple[int, Optional[str]]:
        t = self.next()
        if t.kind == "num":
            if self.peek().text == "*":
                self.next()
                v = self.next()
                if v.kind == "num":
                    return int(t.text) * int(v.text), None
                if v.kind != "id":
                    self.fail("expected a variable after '*'", v)
                self._no_product()
                return int(t.text), self.var(v)
            return int(t.text), None
        if t.kind == "id":
            name = self.var(t)
            if self.peek().text == "*":
                self.next()
                k = self.next()
                if k.kind != "num":
                    self.fail("non-linear term: '*' must join a literal and a variable", k)
                self._no_product()
                return int(k.text), name
            return 1, name
        self.fail(f"expected a term, found {t.text or 'end of input'!r}", t)

    def _no_product(self):
        if self.peek().text == "*":
            self.fail("non-linear term: '*' must join a literal and a variable")


def parse_loop(text: str, name: str = "loop") -> LoopSpec:
    return _Parser(text).spec(name)


def load_loop(path) -> LoopSpec:
    path = Path(path)
    return parse_loop(path.read_text(encoding="utf-8"), path.stem)


def _render_lin(lin: Lin) -> str:
    coeffs, const = lin
    parts: List[str] = []
    for v, c in coeffs:
        mag = abs(c)
        term = v if mag == 1 else f"{mag}*{v}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(("+ " if c > 0 else "- ") + term)
    if const or not parts:
        if not parts:
            parts.append(str(const))
        else:
            parts.append(("+ " if const > 0 else "- ") + str(abs(const)))
    return " ".join(parts)


def render_loop(spec: LoopSpec) -> str:
    lines = [f"vars {', '.join(spec.vars)};"]
    for p in spec.paths:
        head = "path" if p.label is None else f"path {p.label}"
        body = ", ".join(f"{_render_lin(l)} {op} {_render_lin(r)}"
                         for l, op, r in p.constraints)
        lines.append(f"{head}: {body};")
    return "\n".join(lines) + "\n"


# -- formulas as text ---------------------------------------------------------

def parse_formula(text: str, vars: Sequence[str], primed: bool = False) -> Dnf:
    """Read ``a && b || (c && d)`` style formulas; ``,`` also separates atoms."""
    text = text.strip()
    if text in ("true", ""):
        return Dnf.of([Conj(())])
    if text == "false":
        return Dnf(())
    p = _Parser("")
    p.vars = list(vars)
    conjs = []
    for disj in text.split("||"):
        disj = disj.strip()
        if disj.startswith("(") and disj.endswith(")"):
            disj = disj[1:-1]
        if disj.strip() == "true":
            conjs.append(Conj(()))
            continue
        atoms = []
        for piece in re.split(r"&&|,", disj):
            p.toks = _lex(piece)
            p.i = 0
            lhs, op, rhs = p.constraint()
            if p.peek().kind != "eof":
                p.fail("trailing input in atom")
            if not primed and any(v.endswith("'") for v, _ in lhs[0] + rhs[0]):
                p.fail("primed variable in a state formula")
            atoms += normalize_atom((dict(lhs[0]), lhs[1]), op, (dict(rhs[0]), rhs[1]))
        conjs.append(Conj.of(atoms))
    return Dnf.of(conjs)


def parse_stateset(text: str, vars: Sequence[str]) -> StateSet:
    return StateSet(tuple(vars), parse_formula(text, vars))


def parse_rel(text: str, vars: Sequence[str]) -> Rel:
    return Rel(tuple(vars), parse_formula(text, vars, primed=True))

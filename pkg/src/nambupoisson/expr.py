"""Scalar expression language for user-defined first integrals.

Grammar, loosest binding first::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right-associative
    atom    := NUMBER | NAME | NAME '(' args ')' | '(' expr ')'

So ``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import ExprNameError, ExprSyntaxError, SingularEvaluationError
from .jets import BINARY_FUNCTIONS, UNARY_FUNCTIONS, Jet2, jet_const, jet_func

__all__ = [
    "Num",
    "Name",
    "Neg",
    "BinOp",
    "Call",
    "ExprAst",
    "parse",
    "to_source",
    "names",
    "bind",
    "eval_jet",
    "eval_float",
    "CONSTANTS",
    "FUNCTION_ARITY",
]

CONSTANTS = {"pi": math.pi}
FUNCTION_ARITY = {**{k: 1 for k in UNARY_FUNCTIONS}, **{k: 2 for k in BINARY_FUNCTIONS}}

# |n| above this goes through pow instead of repeated multiplication
_MAX_UNROLL = 32


@dataclass(frozen=True)
class Num:
    value: float
    span: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Name:
    id: str
    span: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    operand: "ExprAst"
    span: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "ExprAst"
    right: "ExprAst"
    span: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["ExprAst", ...]
    span: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


ExprAst = Union[Num, Name, Neg, BinOp, Call]


# -- tokenizer --------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'num', 'name', 'op', 'end'
    text: str
    pos: int


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos, source=src)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, expected: str):
        t = self.tok
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"unexpected {what}", t.pos, expected=expected, source=self.src)

    def expect(self, text: str) -> _Tok:
        if self.tok.kind == "op" and self.tok.text == text:
            return self.advance()
        self.fail(repr(text))

    def at(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def parse(self) -> ExprAst:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail("operator or end of input")
        return node

    def expr(self) -> ExprAst:
        left = self.term()
        while self.at("+", "-"):
            op = self.advance().text
            right = self.term()
            left = BinOp(op, left, right, (left.span[0], right.span[1]))
        return left

    def term(self) -> ExprAst:
        left = self.unary()
        while self.at("*", "/"):
            op = self.advance().text
            right = self.unary()
            left = BinOp(op, left, right, (left.span[0], right.span[1]))
        return left

    def unary(self) -> ExprAst:
        if self.at("-"):
            start = self.advance().pos
            operand = self.unary()
            return Neg(operand, (start, operand.span[1]))
        return self.power()

    def power(self) -> ExprAst:
        base = self.atom()
        if self.at("^"):
            self.advance()
            exp = self.unary()
            return BinOp("^", base, exp, (base.span[0], exp.span[1]))
        return base

    def atom(self) -> ExprAst:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text), (t.pos, t.pos + len(t.text)))
        if t.kind == "name":
            self.advance()
            if self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.at(","):
                        self.advance()
                        args.append(self.expr())
                end = self.expect(")").pos + 1
                return Call(t.text, tuple(args), (t.pos, end))
            return Name(t.text, (t.pos, t.pos + len(t.text)))
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        self.fail("expression")


def parse(source: str) -> ExprAst:
    """Parse ``source`` into an immutable AST.

    Raises :class:`ExprSyntaxError` with the character offset of the first
    offending token.
    """
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0, expected="expression", source=source)
    return _Parser(source).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_UNARY_PREC = 3


def to_source(node: ExprAst) -> str:
    """Canonical printout; ``parse(to_source(a)) == a`` for any parsed ``a``."""
    return _print(node, 0)


def _print(node: ExprAst, ctx: int) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Name):
        return node.id
    if isinstance(node, Call):
        return f"{node.func}(" + ", ".join(_print(a, 0) for a in node.args) + ")"
    if isinstance(node, Neg):
        s = "-" + _print(node.operand, _UNARY_PREC)
        return f"({s})" if ctx > _UNARY_PREC else s
    p = _PREC[node.op]
    if node.op == "^":
        # base must bind tighter than '^'; the exponent is a unary slot
        s = f"{_print(node.left, p + 1)}^{_print(node.right, _UNARY_PREC)}"
    else:
        s = f"{_print(node.left, p)} {node.op} {_print(node.right, p + 1)}"
    return f"({s})" if ctx > p else s


def names(node: ExprAst) -> set[str]:
    """Identifiers referenced by ``node`` (function names excluded)."""
    if isinstance(node, Name):
        return {node.id}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Neg):
        return names(node.operand)
    if isinstance(node, BinOp):
        return names(node.left) | names(node.right)
    return set().union(*(names(a) for a in node.args)) if node.args else set()


def bind(node: ExprAst, coordinates: Iterable[str], parameters: Iterable[str]) -> ExprAst:
    """Check every identifier and call in ``node`` against the declared names.

    Returns ``node`` unchanged so the call can be chained.
    """
    known = set(coordinates) | set(parameters) | set(CONSTANTS)
    _check(node, known)
    return node


def _check(node: ExprAst, known: set[str]) -> None:
    if isinstance(node, Name):
        if node.id not in known:
            raise ExprNameError(f"unknown identifier {node.id!r} at offset {node.span[0]}")
    elif isinstance(node, Neg):
        _check(node.operand, known)
    elif isinstance(node, BinOp):
        _check(node.left, known)
        _check(node.right, known)
    elif isinstance(node, Call):
        if node.func not in FUNCTION_ARITY:
            raise ExprNameError(f"unknown function {node.func!r} at offset {node.span[0]}")
        if len(node.args) != FUNCTION_ARITY[node.func]:
            raise ExprNameError(
                f"{node.func} takes {FUNCTION_ARITY[node.func]} argument(s), got {len(node.args)}"
            )
        for a in node.args:
            _check(a, known)


def eval_jet(node: ExprAst, env: Mapping[str, Jet2], params: Mapping[str, float]) -> Jet2:
    """Evaluate ``node`` with coordinates bound to jets in ``env``.

    Every jet in ``env`` must share a dimension. Names found in neither
    ``env``, ``params`` nor the constant table raise :class:`ExprNameError`.
    """
    if not env:
        raise ExprNameError("eval_jet needs at least one jet in env to fix the dimension")
    dim = next(iter(env.values())).dim
    return _Evaluator(env, params, dim).ev(node)


def eval_float(node: ExprAst, values: Mapping[str, float]) -> float:
    """Plain float evaluation (no derivatives); ``values`` covers every name."""
    env = {k: jet_const(v, 1) for k, v in values.items()}
    return _Evaluator(env, {}, 1).ev(node).value


class _Evaluator:
    def __init__(self, env, params, dim):
        self.env = env
        self.params = params
        self.dim = dim

    def const_value(self, node: ExprAst) -> float | None:
        """Value of ``node`` if it does not depend on any jet, else None."""
        if names(node) & set(self.env):
            return None
        return self.ev(node).value

    def lookup(self, node: Name) -> Jet2:
        if node.id in self.env:
            return self.env[node.id]
        if node.id in self.params:
            return jet_const(self.params[node.id], self.dim)
        if node.id in CONSTANTS:
            return jet_const(CONSTANTS[node.id], self.dim)
        raise ExprNameError(f"unbound identifier {node.id!r} at offset {node.span[0]}")

    def ev(self, node: ExprAst) -> Jet2:
        try:
            return self._ev(node)
        except SingularEvaluationError as err:
            if err.span is None:
                err.span = node.span
            raise

    def _ev(self, node: ExprAst) -> Jet2:
        if isinstance(node, Num):
            return jet_const(node.value, self.dim)
        if isinstance(node, Name):
            return self.lookup(node)
        if isinstance(node, Neg):
            return -self.ev(node.operand)
        if isinstance(node, Call):
            if node.func not in FUNCTION_ARITY:
                raise ExprNameError(f"unknown function {node.func!r} at offset {node.span[0]}")
            args = [self.ev(a) for a in node.args]
            return jet_func(node.func, *args)
        if node.op == "^":
            return self.power(node)
        a, b = self.ev(node.left), self.ev(node.right)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b

    def power(self, node: BinOp) -> Jet2:
        base = self.ev(node.left)
        p = self.const_value(node.right)
        if p is None:
            return jet_func("exp", self.ev(node.right) * jet_func("log", base))
        if p.is_integer() and abs(p) <= _MAX_UNROLL:
            n = int(abs(p))
            if n == 0:
                return jet_const(1.0, self.dim)
            out = base
            for _ in range(n - 1):
                out = out * base
            return 1.0 / out if p < 0 else out
        return jet_func("pow", base, exponent=p)

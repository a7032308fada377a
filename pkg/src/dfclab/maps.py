"""Scalar 1-D maps f: R -> R with exact first derivatives.

Maps come in two flavors: parameterized builtins (``logistic``, ``quadratic``,
``cubic``) and user expressions over the variable ``x`` with named parameters.
Expressions are parsed into a small AST; derivatives are obtained by
forward-mode dual numbers, so f'(x) is exact to rounding rather than a
finite-difference approximation.

The expression grammar supports real literals, ``x``, named parameters,
``+ - * /``, ``^`` with an integer-literal exponent, unary minus, and the
functions sin, cos, exp, tanh, abs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

__all__ = [
    "MapError",
    "MapSyntaxError",
    "MapEvalError",
    "MapOverflowError",
    "Dual",
    "MapSpec",
    "parse_map",
    "eval_map",
    "eval_map_deriv",
    "format_ast",
    "BUILTIN_MAPS",
]


class MapError(Exception):
    """Base error for map parsing and evaluation."""


class MapSyntaxError(MapError):
    """Malformed map source; ``position`` is the 0-based offset of the fault."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class MapEvalError(MapError):
    """Domain error during evaluation (e.g. division by zero)."""


class MapOverflowError(MapEvalError):
    """Evaluation produced a non-finite value."""


# ---------------------------------------------------------------------------
# Dual numbers
# ---------------------------------------------------------------------------

Number = Union[int, float]


@dataclass(frozen=True)
class Dual:
    """First-order dual number value + deriv*eps.

    Propagates derivatives through arithmetic: (a*b).deriv =
    a.value*b.deriv + a.deriv*b.value, with analogous rules for the other
    supported operations and functions.
    """

    value: float
    deriv: float = 0.0

    @staticmethod
    def _lift(other) -> "Dual":
        if isinstance(other, Dual):
            return other
        if isinstance(other, (int, float)):
            return Dual(float(other), 0.0)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return Dual(self.value + o.value, self.deriv + o.deriv)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return Dual(self.value - o.value, self.deriv - o.deriv)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return Dual(self.value * o.value, self.value * o.deriv + self.deriv * o.value)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if o.value == 0.0:
            raise MapEvalError("division by zero")
        return Dual(
            self.value / o.value,
            (self.deriv * o.value - self.value * o.deriv) / (o.value * o.value),
        )

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __neg__(self):
        return Dual(-self.value, -self.deriv)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise MapEvalError("exponent must be an integer")
        if n == 0:
            return Dual(1.0, 0.0)
        if n < 0:
            if self.value == 0.0:
                raise MapEvalError("zero raised to a negative power")
            return Dual(1.0, 0.0) / (self ** (-n))
        # d(u^n) = n*u^(n-1)*u'
        return Dual(self.value**n, n * self.value ** (n - 1) * self.deriv)

    def sin(self):
        return Dual(math.sin(self.value), math.cos(self.value) * self.deriv)

    def cos(self):
        return Dual(math.cos(self.value), -math.sin(self.value) * self.deriv)

    def exp(self):
        v = math.exp(self.value)
        return Dual(v, v * self.deriv)

    def tanh(self):
        v = math.tanh(self.value)
        return Dual(v, (1.0 - v * v) * self.deriv)

    def abs(self):
        # At 0 the right-hand derivative (+1) is used, by convention.
        sign = 1.0 if self.value >= 0.0 else -1.0
        return Dual(builtins_abs(self.value), sign * self.deriv)


builtins_abs = abs


def _apply_func(name: str, v):
    if isinstance(v, Dual):
        return getattr(v, name if name != "abs" else "abs")()
    try:
        if name == "abs":
            return builtins_abs(v)
        return getattr(math, name)(v)
    except (OverflowError, ValueError) as exc:
        raise MapOverflowError(f"{name} overflow: {exc}") from exc


# ---------------------------------------------------------------------------
# Expression AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Bin, Pow, Neg, Call]

_FUNCTIONS = ("sin", "cos", "exp", "tanh", "abs")


def _eval_node(node: Node, env: dict):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval_node(node.operand, env)
    if isinstance(node, Call):
        return _apply_func(node.func, _eval_node(node.arg, env))
    if isinstance(node, Pow):
        base = _eval_node(node.base, env)
        if isinstance(base, Dual):
            return base**node.exponent
        if node.exponent < 0 and base == 0.0:
            raise MapEvalError("zero raised to a negative power")
        return base**node.exponent
    if isinstance(node, Bin):
        lhs = _eval_node(node.left, env)
        rhs = _eval_node(node.right, env)
        if node.op == "+":
            return lhs + rhs
        if node.op == "-":
            return lhs - rhs
        if node.op == "*":
            return lhs * rhs
        if node.op == "/":
            rv = rhs.value if isinstance(rhs, Dual) else rhs
            if rv == 0.0:
                raise MapEvalError("division by zero")
            return lhs / rhs
    raise TypeError(f"unknown AST node {node!r}")


def _free_names(node: Node, out: set):
    if isinstance(node, Var):
        out.add(node.name)
    elif isinstance(node, Bin):
        _free_names(node.left, out)
        _free_names(node.right, out)
    elif isinstance(node, (Neg,)):
        _free_names(node.operand, out)
    elif isinstance(node, Pow):
        _free_names(node.base, out)
    elif isinstance(node, Call):
        _free_names(node.arg, out)


def format_ast(node: Node) -> str:
    """Render an AST back to parseable source text."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"-({format_ast(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({format_ast(node.arg)})"
    if isinstance(node, Pow):
        base = format_ast(node.base)
        # A negative literal must keep its parens: -2^4 reparses as -(2^4).
        atomic = isinstance(node.base, (Var, Call)) or (
            isinstance(node.base, Num) and node.base.value >= 0
        )
        if not atomic:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Bin):
        lhs = format_ast(node.left)
        rhs = format_ast(node.right)
        return f"({lhs} {node.op} {rhs})"
    raise TypeError(f"unknown AST node {node!r}")


# ---------------------------------------------------------------------------
# Tokenizer / recursive-descent parser
# ---------------------------------------------------------------------------


@dataclass
class _Token:
    kind: str  # num, ident, op, lparen, rparen, end
    text: str
    pos: int
    value: float = 0.0


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            seen_e = False
            while j < n:
                cj = source[j]
                if cj.isdigit() or cj == ".":
                    j += 1
                elif cj in "eE" and not seen_e and j + 1 < n and (
                    source[j + 1].isdigit() or source[j + 1] in "+-"
                ):
                    seen_e = True
                    j += 2 if source[j + 1] in "+-" else 1
                else:
                    break
            text = source[i:j]
            try:
                value = float(text)
            except ValueError:
                raise MapSyntaxError(f"bad number literal {text!r}", i) from None
            tokens.append(_Token("num", text, i, value))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(_Token("ident", source[i:j], i))
            i = j
        elif c in "+-*/^":
            tokens.append(_Token("op", c, i))
            i += 1
        elif c == "(":
            tokens.append(_Token("lparen", c, i))
            i += 1
        elif c == ")":
            tokens.append(_Token("rparen", c, i))
            i += 1
        else:
            raise MapSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            what = text or kind
            raise MapSyntaxError(f"expected {what!r}", tok.pos)
        return self.next()

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise MapSyntaxError(f"unexpected {tok.text!r}", tok.pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next().text
            node = Bin(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.next().text
            node = Bin(op, node, self.factor())
        return node

    def factor(self) -> Node:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.next()
            return Neg(self.factor())
        if tok.kind == "op" and tok.text == "+":
            self.next()
            return self.factor()
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        while self.peek().kind == "op" and self.peek().text == "^":
            self.next()
            node = Pow(node, self.int_exponent())
        return node

    def int_exponent(self) -> int:
        sign = 1
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.next()
            if tok.text == "-":
                sign = -1
            tok = self.peek()
        if tok.kind != "num":
            raise MapSyntaxError("expected integer exponent", tok.pos)
        if not float(tok.value).is_integer():
            raise MapSyntaxError("non-integer exponent", tok.pos)
        self.next()
        return sign * int(tok.value)

    def atom(self) -> Node:
        tok = self.next()
        if tok.kind == "num":
            return Num(tok.value)
        if tok.kind == "ident":
            if self.peek().kind == "lparen":
                if tok.text not in _FUNCTIONS:
                    raise MapSyntaxError(f"unknown function {tok.text!r}", tok.pos)
                self.next()
                arg = self.expr()
                self.expect("rparen")
                return Call(tok.text, arg)
            return Var(tok.text)
        if tok.kind == "lparen":
            node = self.expr()
            self.expect("rparen")
            return node
        raise MapSyntaxError(f"unexpected {tok.text or 'end of input'!r}", tok.pos)


# ---------------------------------------------------------------------------
# MapSpec and builtins
# ---------------------------------------------------------------------------

# name -> (parameter names, f(x, params), default domain)
BUILTIN_MAPS = {
    "logistic": (("r",), lambda x, p: p["r"] * x * (1 - x), (0.0, 1.0)),
    "quadratic": (("c",), lambda x, p: x**2 + p["c"], (-2.0, 2.0)),
    "cubic": (("b",), lambda x, p: p["b"] * x - x**3, (-2.0, 2.0)),
}

_DEFAULT_EXPR_DOMAIN = (0.0, 1.0)


@dataclass(frozen=True)
class MapSpec:
    """Immutable description of a scalar map; all operations on it are pure.

    ``kind`` is ``"builtin"`` or ``"expression"``. Builtins carry ``name`` and
    the bound ``params``; expressions carry the parsed ``ast`` (parameters
    bound in ``params`` as well). ``domain`` is the closed interval searched
    for cycles.
    """

    kind: str
    domain: tuple[float, float]
    name: str | None = None
    params: dict[str, float] = field(default_factory=dict)
    ast: Node | None = None
    source: str = ""

    def __post_init__(self):
        lo, hi = self.domain
        if not (lo < hi):
            raise ValueError(f"domain requires lo < hi, got [{lo}, {hi}]")


def parse_map(
    source: str,
    params: dict[str, float] | None = None,
    domain: tuple[float, float] | None = None,
) -> MapSpec:
    """Parse a map designator or expression into a MapSpec.

    Designator format for builtins: ``"name:key=val,key=val"`` (e.g.
    ``"logistic:r=4"``). Anything else is treated as an expression in ``x``;
    free identifiers must be bound through ``params``.
    """
    params = dict(params or {})
    text = source.strip()
    head = text.split(":", 1)[0].strip()
    if head in BUILTIN_MAPS:
        required, _, default_domain = BUILTIN_MAPS[head]
        if ":" in text:
            for item in text.split(":", 1)[1].split(","):
                item = item.strip()
                if not item:
                    continue
                if "=" not in item:
                    raise MapSyntaxError(
                        f"expected key=val in designator, got {item!r}",
                        source.find(item),
                    )
                key, val = item.split("=", 1)
                try:
                    params[key.strip()] = float(val)
                except ValueError:
                    raise MapSyntaxError(
                        f"bad parameter value {val!r}", source.find(val)
                    ) from None
        missing = [p for p in required if p not in params]
        if missing:
            raise MapError(f"builtin {head!r} missing parameter(s): {missing}")
        extra = [p for p in params if p not in required]
        if extra:
            raise MapError(f"builtin {head!r} got unknown parameter(s): {extra}")
        return MapSpec(
            kind="builtin",
            domain=domain or default_domain,
            name=head,
            params=params,
            source=text,
        )

    ast = _Parser(text).parse()
    names: set = set()
    _free_names(ast, names)
    unknown = sorted(n for n in names if n != "x" and n not in params)
    if unknown:
        raise MapError(
            f"unknown identifier(s) {unknown}; bind parameters via params/--param"
        )
    return MapSpec(
        kind="expression",
        domain=domain or _DEFAULT_EXPR_DOMAIN,
        ast=ast,
        params={k: float(v) for k, v in params.items()},
        source=text,
    )


def _eval(m: MapSpec, x):
    if m.kind == "builtin":
        _, fn, _ = BUILTIN_MAPS[m.name]
        return fn(x, m.params)
    env: dict = {"x": x}
    env.update(m.params)
    return _eval_node(m.ast, env)


def eval_map(m: MapSpec, x: float) -> float:
    """Evaluate f(x). Raises MapOverflowError on a non-finite result."""
    if not math.isfinite(x):
        raise MapEvalError(f"non-finite input x={x!r}")
    y = _eval(m, x)
    if not math.isfinite(y):
        raise MapOverflowError(f"f({x}) is not finite")
    return float(y)


def eval_map_deriv(m: MapSpec, x: float) -> float:
    """Evaluate f'(x) by dual-number propagation (exact to rounding)."""
    if not math.isfinite(x):
        raise MapEvalError(f"non-finite input x={x!r}")
    out = _eval(m, Dual(float(x), 1.0))
    if not isinstance(out, Dual):  # constant expression
        out = Dual(float(out), 0.0)
    if not (math.isfinite(out.value) and math.isfinite(out.deriv)):
        raise MapOverflowError(f"f'({x}) is not finite")
    return out.deriv

"""Arithmetic terms over the naturals.

A term is built from constants, variables and five base operations: ``+``,
truncated ``-``, ``*``, floor ``/`` and ``2^x``.  Sugar nodes (mod, general
power, |a-b|, min, binomial, factorial, gcd, 2-adic valuation, Hamming
weight) are evaluated by their mathematical definition and can be rewritten
into the base operations with :func:`expand_sugar`.

Text syntax::

    expr := sum
    sum  := prod (("+" | "-") prod)*
    prod := pow (("*" | "/" | "%") pow)*
    pow  := atom ("^" pow)?
    atom := NAT | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"

``-`` is truncated subtraction and ``^`` is right-associative.  A literal
``2`` in base position produces a :class:`Pow2` node; any other base
produces a :class:`Pow` sugar node.
"""
from __future__ import annotations

import enum
import math
import re
from collections import Counter
from dataclasses import dataclass, fields

from .config import bit_budget as _bit_budget
from .errors import (BudgetExceeded, DivisionByZero, DomainError, ParseError,
                     UnboundVariable, show_int)


class Term:
    """Base class of all term nodes."""

    __slots__ = ()
    op: str = ""

    @property
    def children(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Monus(self, _lift(other))

    def __rsub__(self, other):
        return Monus(_lift(other), self)

    def __mul__(self, other):
        return Mul(self, _lift(other))

    def __rmul__(self, other):
        return Mul(_lift(other), self)

    def __floordiv__(self, other):
        return DivFloor(self, _lift(other))

    def __rfloordiv__(self, other):
        return DivFloor(_lift(other), self)

    def __mod__(self, other):
        return Mod(self, _lift(other))

    def __rmod__(self, other):
        return Mod(_lift(other), self)

    def __pow__(self, other):
        return Pow(self, _lift(other))

    def __rpow__(self, other):
        base = _lift(other)
        if isinstance(base, Const) and base.value == 2:
            return Pow2(self)
        return Pow(base, self)

    def __str__(self):
        return render(self)


def _lift(x) -> Term:
    if isinstance(x, Term):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Const(x)
    if isinstance(x, str):
        return Var(x)
    raise TypeError(f"cannot use {type(x).__name__} as a term")


@dataclass(frozen=True, repr=False)
class Const(Term):
    value: int
    op = "const"

    def __post_init__(self):
        if self.value < 0:
            raise DomainError("negative constants are not terms")

    @property
    def children(self):
        return ()

    def __repr__(self):
        return f"Const({self.value})"


@dataclass(frozen=True, repr=False)
class Var(Term):
    name: str
    op = "var"

    @property
    def children(self):
        return ()

    def __repr__(self):
        return f"Var({self.name!r})"


def _binary(name, op):
    cls = dataclass(frozen=True, repr=False)(
        type(name, (Term,), {"__annotations__": {"l": Term, "r": Term}, "op": op,
                             "__repr__": lambda s: f"{name}({s.l!r}, {s.r!r})"}))
    return cls


def _unary(name, op, field="e"):
    cls = dataclass(frozen=True, repr=False)(
        type(name, (Term,), {"__annotations__": {field: Term}, "op": op,
                             "__repr__": lambda s: f"{name}({getattr(s, field)!r})"}))
    return cls


Add = _binary("Add", "add")
Monus = _binary("Monus", "monus")
Mul = _binary("Mul", "mul")
DivFloor = _binary("DivFloor", "divfloor")
Pow2 = _unary("Pow2", "pow2")
# sugar
Mod = _binary("Mod", "mod")
Pow = _binary("Pow", "pow")
AbsDiff = _binary("AbsDiff", "absdiff")
Min = _binary("Min", "min")
Binom = _binary("Binom", "binom")
Gcd = _binary("Gcd", "gcd")
Fact = _unary("Fact", "fact", "n")
Nu2 = _unary("Nu2", "nu2", "n")
HW = _unary("HW", "hw", "n")

BASE_OPS = frozenset({"const", "var", "add", "monus", "mul", "divfloor", "pow2"})
NODE_TYPES = {cls.op: cls for cls in (Const, Var, Add, Monus, Mul, DivFloor, Pow2,
                                      Mod, Pow, AbsDiff, Min, Binom, Gcd, Fact, Nu2, HW)}


def is_pure(t: Term) -> bool:
    return all(node.op in BASE_OPS for node in _walk_unique(t))


def _walk_unique(t):
    seen = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        stack.extend(node.children)


def free_vars(t: Term) -> set:
    return {node.name for node in _walk_unique(t) if isinstance(node, Var)}


def substitute(t: Term, mapping: dict) -> Term:
    """Replace variables by terms (or ints)."""
    mapping = {k: _lift(v) for k, v in mapping.items()}
    memo = {}

    def go(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            out = mapping.get(node.name, node)
        elif isinstance(node, Const):
            out = node
        else:
            out = type(node)(*(go(c) for c in node.children))
        memo[key] = out
        return out

    return go(t)


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<nat>\d+)|(?P<ident>[a-z][a-z0-9_]*)|(?P<sym>[-+*/%^(),]))")

FUNCTIONS = {
    "min": (Min, 2), "absdiff": (AbsDiff, 2), "binom": (Binom, 2), "fact": (Fact, 1),
    "gcd": (Gcd, 2), "nu2": (Nu2, 1), "hw": (HW, 1), "mod": (Mod, 2),
    "pow": (Pow, 2), "pow2": (Pow2, 1),
}


def _position(text, offset):
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                rest = text[pos:]
                if rest.strip() == "":
                    break
                off = pos + len(rest) - len(rest.lstrip())
                raise ParseError(f"unexpected character {text[off]!r}", *_position(text, off))
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.tokens.append(("eof", "", len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        what = "end of input" if tok[0] == "eof" else repr(tok[1])
        raise ParseError(f"{message}, found {what}", *_position(self.text, tok[2]))

    def expect(self, sym):
        tok = self.peek()
        if tok[0] != "sym" or tok[1] != sym:
            self.error(f"expected {sym!r}")
        return self.take()

    def parse(self):
        t = self.sum()
        if self.peek()[0] != "eof":
            self.error("expected operator")
        return t

    def sum(self):
        t = self.prod()
        while self.peek()[0] == "sym" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.prod()
            t = Add(t, rhs) if op == "+" else Monus(t, rhs)
        return t

    def prod(self):
        t = self.pow()
        while self.peek()[0] == "sym" and self.peek()[1] in "*/%":
            op = self.take()[1]
            rhs = self.pow()
            t = {"*": Mul, "/": DivFloor, "%": Mod}[op](t, rhs)
        return t

    def pow(self):
        literal_two = self.peek()[0] == "nat" and int(self.peek()[1]) == 2
        base = self.atom()
        if self.peek()[0] == "sym" and self.peek()[1] == "^":
            self.take()
            exp = self.pow()
            return Pow2(exp) if literal_two else Pow(base, exp)
        return base

    def atom(self):
        kind, value, _ = tok = self.peek()
        if kind == "nat":
            self.take()
            return Const(int(value))
        if kind == "ident":
            self.take()
            if self.peek()[0] == "sym" and self.peek()[1] == "(":
                if value not in FUNCTIONS:
                    self.error(f"unknown function {value!r}", tok)
                cls, arity = FUNCTIONS[value]
                self.take()
                args = [self.sum()]
                while self.peek()[0] == "sym" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.sum())
                self.expect(")")
                if len(args) != arity:
                    self.error(f"{value} takes {arity} argument(s), got {len(args)}", tok)
                return cls(*args)
            return Var(value)
        if kind == "sym" and value == "(":
            self.take()
            t = self.sum()
            self.expect(")")
            return t
        self.error("expected a number, name or '('")


def parse(text: str) -> Term:
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# rendering

_INFIX = {"add": ("+", 1), "monus": ("-", 1), "mul": ("*", 2), "divfloor": ("/", 2),
          "mod": ("%", 2)}
_FUNC_NAME = {"min": "min", "absdiff": "absdiff", "binom": "binom", "fact": "fact",
              "gcd": "gcd", "nu2": "nu2", "hw": "hw"}


def _prec(t):
    if t.op in _INFIX:
        return _INFIX[t.op][1]
    if t.op == "pow2" or (t.op == "pow" and not _is_two(t.l)):
        return 3
    return 4


def _is_two(t):
    return isinstance(t, Const) and t.value == 2


def render(t: Term) -> str:
    parts = []
    _render(t, parts)
    return "".join(parts)


def _render(t, out):
    op = t.op
    if op == "const":
        out.append(str(t.value))
    elif op == "var":
        out.append(t.name)
    elif op in _INFIX:
        sym, level = _INFIX[op]
        _wrap(t.l, _prec(t.l) < level, out)
        out.append(f" {sym} ")
        _wrap(t.r, _prec(t.r) <= level, out)
    elif op == "pow2":
        out.append("2^")
        _wrap(t.e, _prec(t.e) < 3, out)
    elif op == "pow":
        if _is_two(t.l):
            out.append("pow(2, ")
            _render(t.r, out)
            out.append(")")
        else:
            _wrap(t.l, _prec(t.l) <= 3, out)
            out.append("^")
            _wrap(t.r, _prec(t.r) < 3, out)
    else:
        out.append(_FUNC_NAME[op] + "(")
        for i, c in enumerate(t.children):
            if i:
                out.append(", ")
            _render(c, out)
        out.append(")")


def _wrap(t, parens, out):
    if parens:
        out.append("(")
        _render(t, out)
        out.append(")")
    else:
        _render(t, out)


# --------------------------------------------------------------------------
# JSON

def to_json(t: Term):
    if isinstance(t, Const):
        return {"const": str(t.value)}
    if isinstance(t, Var):
        return {"var": t.name}
    return {"op": t.op, "args": [to_json(c) for c in t.children]}


def from_json(obj) -> Term:
    if "const" in obj:
        return Const(int(obj["const"]))
    if "var" in obj:
        return Var(obj["var"])
    cls = NODE_TYPES.get(obj.get("op"))
    if cls is None or cls in (Const, Var):
        raise ValueError(f"unknown op {obj.get('op')!r}")
    args = [from_json(a) for a in obj["args"]]
    if len(args) != len(fields(cls)):
        raise ValueError(f"{obj['op']} takes {len(fields(cls))} argument(s)")
    return cls(*args)


# --------------------------------------------------------------------------
# evaluation

def evaluate(t: Term, env: dict | None = None, bit_budget: int | None = None) -> int:
    """Exact value of ``t`` under ``env``.

    Sugar nodes use their mathematical definitions.  Any intermediate result
    that would exceed ``bit_budget`` bits raises :class:`BudgetExceeded`.
    """
    env = env or {}
    budget = _bit_budget(bit_budget)
    memo = {}

    def go(node):
        key = id(node)
        if key in memo:
            return memo[key]
        value = _eval_node(node, env, budget, go)
        memo[key] = value
        return value

    return go(t)


def _eval_node(node, env, budget, go):
    op = node.op
    if op == "const":
        return node.value
    if op == "var":
        try:
            value = env[node.name]
        except KeyError:
            raise UnboundVariable(node.name) from None
        if value < 0:
            raise DomainError(f"{node.name} is bound to a negative value")
        return int(value)
    if op == "pow2":
        e = go(node.e)
        if e > budget:
            raise BudgetExceeded(f"2^{show_int(e)} exceeds the {budget}-bit budget")
        return 1 << e
    if op in ("fact", "nu2", "hw"):
        n = go(node.n)
        if op == "hw":
            return n.bit_count()
        if op == "nu2":
            if n == 0:
                raise DomainError("nu2(0) is undefined")
            return (n & -n).bit_length() - 1
        if n > 1 and math.lgamma(n + 1) / math.log(2) > budget:
            raise BudgetExceeded(f"{show_int(n)}! exceeds the {budget}-bit budget")
        return math.factorial(n)
    a = go(node.l)
    b = go(node.r)
    if op == "add":
        return a + b
    if op == "monus":
        return a - b if a > b else 0
    if op == "mul":
        if a.bit_length() + b.bit_length() > budget + 1:
            raise BudgetExceeded("product exceeds the bit budget")
        return a * b
    if op in ("divfloor", "mod"):
        if b == 0:
            raise DivisionByZero(f"{'division' if op == 'divfloor' else 'mod'} by zero")
        return a // b if op == "divfloor" else a % b
    if op == "pow":
        if a <= 1 or b == 0:
            return 1 if b == 0 else a
        if b > budget or b * (a.bit_length() - 1) > budget:
            raise BudgetExceeded(f"{show_int(a)}^{show_int(b)} exceeds the bit budget")
        return a ** b
    if op == "absdiff":
        return abs(a - b)
    if op == "min":
        return min(a, b)
    if op == "gcd":
        return math.gcd(a, b)
    if op == "binom":
        if b > a:
            return 0
        k = min(b, a - b)
        if k * a.bit_length() > budget:
            raise BudgetExceeded(f"binom({show_int(a)}, {show_int(b)}) exceeds the bit budget")
        return math.comb(a, b)
    raise TypeError(f"unknown node {node!r}")


# --------------------------------------------------------------------------
# sugar expansion

class FactorialScheme(enum.Enum):
    """Choice of the bound r(n) >= (n+1)^(n+2) used by the factorial term."""

    POW8SQ = "pow8sq"      # r(n) = 8^(n^2)
    MINIMAL = "minimal"    # r(n) = (n+1)^(n+2)

    def r_term(self, n: Term) -> Term:
        if self is FactorialScheme.POW8SQ:
            return Pow(Const(8), Mul(n, n))
        return Pow(Add(n, Const(1)), Add(n, Const(2)))

    def r_value(self, n: int) -> int:
        return 8 ** (n * n) if self is FactorialScheme.POW8SQ else (n + 1) ** (n + 2)


def marchenkov_pow(a: Term, b: Term) -> Term:
    """a^b as 2^((ab+a+1)b) mod (2^(ab+a+1) - a), still using the Mod sugar."""
    x = Add(Mul(a, b), Add(a, Const(1)))
    return Mod(Pow2(Mul(x, b)), Monus(Pow2(x), a))


def binom_term(a: Term, b: Term) -> Term:
    """binom(a, b) as floor((2^s+1)^a / 2^(s*b)) mod 2^s with s = a+1 (sugar form)."""
    s = Add(a, Const(1))
    return Mod(DivFloor(Pow(Add(Pow2(s), Const(1)), a), Pow2(Mul(s, b))), Pow2(s))


def gcd_term(a: Term, b: Term) -> Term:
    """Base-5 gcd formula; defined for a, b >= 1."""
    ab = Mul(a, b)
    five = Const(5)
    num = Pow(five, Mul(ab, Add(ab, Add(a, b))))
    den = Mul(Monus(Pow(five, Mul(Mul(a, a), b)), Const(1)),
              Monus(Pow(five, Mul(a, Mul(b, b))), Const(1)))
    return Monus(Mod(DivFloor(num, den), Pow(five, ab)), Const(1))


def nu2_term(n: Term) -> Term:
    m = Monus(Pow2(Add(n, Const(1))), Const(1))
    return DivFloor(Mod(Pow(Gcd(n, Pow2(n)), Add(n, Const(1))), Mul(m, m)), m)


def min_term(a: Term, b: Term) -> Term:
    return DivFloor(Monus(Add(a, b), AbsDiff(a, b)), Const(2))


def factorial_term(n: Term, scheme: FactorialScheme = FactorialScheme.POW8SQ) -> Term:
    """n! = floor(r(n)^n / binom(r(n), n)) with Pow/Binom left as sugar."""
    r = scheme.r_term(n)
    return DivFloor(Pow(r, n), Binom(r, n))


def expand_sugar(t: Term, scheme: FactorialScheme = FactorialScheme.POW8SQ) -> Term:
    """Rewrite every sugar node into the five base operations."""
    memo = {}

    # keep the source node alive alongside its image: ids of freed
    # temporaries would otherwise be reused
    def go(node):
        key = id(node)
        if key in memo:
            return memo[key][1]
        out = _expand(node, go, scheme)
        memo[key] = (node, out)
        return out

    return go(t)


def _expand(node, go, scheme):
    op = node.op
    if op in ("const", "var"):
        return node
    if op == "pow2":
        return Pow2(go(node.e))
    if op in ("add", "monus", "mul", "divfloor"):
        return type(node)(go(node.l), go(node.r))
    if op == "mod":
        a, b = go(node.l), go(node.r)
        return Monus(a, Mul(b, DivFloor(a, b)))
    if op == "pow":
        a, b = go(node.l), go(node.r)
        if _is_two(a):
            return Pow2(b)
        return go(marchenkov_pow(a, b))
    if op == "absdiff":
        a, b = go(node.l), go(node.r)
        return Add(Monus(a, b), Monus(b, a))
    if op == "min":
        return go(min_term(node.l, node.r))
    if op == "binom":
        return go(binom_term(node.l, node.r))
    if op == "gcd":
        return go(gcd_term(node.l, node.r))
    if op == "nu2":
        return go(nu2_term(node.n))
    if op == "hw":
        n = node.n
        return go(Nu2(Binom(Mul(Const(2), n), n)))
    if op == "fact":
        return go(factorial_term(node.n, scheme))
    raise TypeError(f"unknown node {node!r}")


# --------------------------------------------------------------------------
# size metrics

@dataclass(frozen=True)
class Metrics:
    node_count: int
    depth: int
    histogram: dict

    def to_json(self):
        return {"node_count": self.node_count, "depth": self.depth,
                "histogram": dict(sorted(self.histogram.items()))}


def metrics(t: Term) -> Metrics:
    """Tree size, depth and per-operator counts (shared subterms counted per use)."""
    memo = {}

    def go(node):
        key = id(node)
        if key not in memo:
            hist = Counter({node.op: 1})
            count, depth = 1, 0
            for c in node.children:
                cc, cd, ch = go(c)
                count += cc
                depth = max(depth, cd)
                hist.update(ch)
            memo[key] = (count, depth + 1, hist)
        return memo[key]

    count, depth, hist = go(t)
    return Metrics(count, depth, dict(hist))

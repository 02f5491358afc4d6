"""Simple exponential polynomials and sum-of-squares systems.

A monomial is ``c * prod(v_i ** x_i * x_i ** r_i)`` over named unknowns.
Factors with ``(v, r) == (1, 0)`` are omitted, so a monomial does not depend
on the ordering of its owning polynomial; orderings only matter for JSON and
for the lattice packing in :mod:`arithterm.mazzanti`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import gmpy2

from .config import DEFAULT_POINT_BUDGET
from .errors import BudgetExceeded, DomainError, UnboundVariable, show_int
from .sparse import SparseInt, normalize

# 2-power factors wider than this are kept sparse during evaluation
SPARSE_BITS = 1 << 20
# dense factors wider than this are refused
DENSE_BITS = 1 << 28


@dataclass(frozen=True, order=True)
class ExpMonomial:
    coeff: int
    factors: tuple = ()  # sorted ((name, v, r), ...)

    def __post_init__(self):
        for name, v, r in self.factors:
            if v < 1 or r < 0:
                raise DomainError(f"bad factor for {name}: base {v}, power {r}")

    @property
    def signature(self) -> tuple:
        return self.factors

    def factor(self, name) -> tuple:
        for n, v, r in self.factors:
            if n == name:
                return v, r
        return 1, 0

    def names(self) -> set:
        return {n for n, _, _ in self.factors}

    def is_constant(self) -> bool:
        return not self.factors

    def __mul__(self, other):
        if isinstance(other, int):
            return ExpMonomial(self.coeff * other, self.factors)
        acc = {n: (v, r) for n, v, r in self.factors}
        for n, v, r in other.factors:
            v0, r0 = acc.get(n, (1, 0))
            acc[n] = (v0 * v, r0 + r)
        return monomial(self.coeff * other.coeff, acc)

    __rmul__ = __mul__

    def __neg__(self):
        return ExpMonomial(-self.coeff, self.factors)

    def render(self) -> str:
        parts = [] if abs(self.coeff) == 1 and self.factors else [str(abs(self.coeff))]
        for n, v, r in self.factors:
            if v != 1:
                parts.append(f"{v}^{n}")
            if r == 1:
                parts.append(n)
            elif r > 1:
                parts.append(f"{n}^{r}")
        body = "*".join(parts)
        return ("-" if self.coeff < 0 else "") + body


def monomial(coeff=1, factors=None) -> ExpMonomial:
    """Build a monomial from ``{name: (v, r)}``, dropping trivial factors."""
    items = tuple(sorted((n, v, r) for n, (v, r) in (factors or {}).items()
                         if (v, r) != (1, 0)))
    return ExpMonomial(coeff, items)


def const(c: int) -> ExpMonomial:
    return ExpMonomial(c)


def var(name: str, coeff: int = 1) -> ExpMonomial:
    """coeff * name"""
    return monomial(coeff, {name: (1, 1)})


def expo(name: str, base: int = 2, coeff: int = 1) -> ExpMonomial:
    """coeff * base^name"""
    return monomial(coeff, {name: (base, 0)})


def exp_sum(names, base: int = 2, coeff: int = 1) -> ExpMonomial:
    """coeff * base^(n1 + n2 + ...); repeated names raise the base."""
    out = const(coeff)
    for n in names:
        out = out * expo(n, base)
    return out


def canonical(monos) -> tuple:
    """Merge equal signatures, drop zero coefficients, sort."""
    acc = {}
    for m in monos:
        acc[m.factors] = acc.get(m.factors, 0) + m.coeff
    return tuple(sorted((ExpMonomial(c, f) for f, c in acc.items() if c),
                        key=lambda m: (m.factors, m.coeff)))


@dataclass(frozen=True)
class ExpPolynomial:
    unknowns: tuple
    monomials: tuple
    params: tuple = ()

    @classmethod
    def build(cls, monos, unknowns=None, params=()):
        monos = canonical(monos)
        params = tuple(params)
        if unknowns is None:
            names = set().union(*(m.names() for m in monos)) if monos else set()
            unknowns = sorted(names - set(params))
        poly = cls(tuple(unknowns), monos, params)
        poly._check_names()
        return poly

    def _check_names(self):
        known = set(self.unknowns) | set(self.params)
        for m in self.monomials:
            extra = m.names() - known
            if extra:
                raise DomainError(f"monomial uses undeclared names {sorted(extra)}")

    @property
    def k(self) -> int:
        return len(self.unknowns)

    def is_canonical(self) -> bool:
        return canonical(self.monomials) == self.monomials

    def constant_term(self) -> int:
        return sum(m.coeff for m in self.monomials if m.is_constant())

    def substitute(self, values: dict) -> ExpPolynomial:
        """Fix some names (typically the parameters) to numbers."""
        out = []
        for m in self.monomials:
            c = m.coeff
            rest = {}
            for n, v, r in m.factors:
                if n in values:
                    x = values[n]
                    c *= v ** x * x ** r
                else:
                    rest[n] = (v, r)
            out.append(monomial(c, rest))
        unknowns = [u for u in self.unknowns if u not in values]
        params = [p for p in self.params if p not in values]
        return ExpPolynomial.build(out, unknowns, params)

    def render(self) -> str:
        if not self.monomials:
            return "0"
        s = " + ".join(m.render() for m in self.monomials)
        return s.replace("+ -", "- ")

    def to_json(self):
        order = list(self.unknowns) + list(self.params)
        obj = {"unknowns": list(self.unknowns),
               "monomials": [_mono_json(m, order) for m in self.monomials]}
        if self.params:
            obj["params"] = list(self.params)
        return obj

    @classmethod
    def from_json(cls, obj):
        unknowns = list(obj["unknowns"])
        params = list(obj.get("params", []))
        order = unknowns + params
        monos = [_mono_from_json(m, order) for m in obj["monomials"]]
        return cls.build(monos, unknowns, params)


def _mono_json(m, order):
    return {"c": str(m.coeff),
            "factors": [{"v": str(v), "r": r} for v, r in (m.factor(n) for n in order)]}


def _mono_from_json(obj, order):
    facs = obj["factors"]
    if len(facs) != len(order):
        raise DomainError("factor list does not match the unknowns")
    return monomial(int(obj["c"]), {n: (int(f["v"]), int(f["r"])) for n, f in zip(order, facs)})


# ---------------------------------------------------------------------------
# square systems

@dataclass(frozen=True)
class SquareSystem:
    """sum over pairs of (sum(L) - sum(R))^2 with nonnegative coefficients."""

    unknowns: tuple
    squares: tuple  # ((L monomials), (R monomials))
    params: tuple = ()
    labels: tuple = field(default=(), compare=False)

    @classmethod
    def build(cls, squares, unknowns=None, params=(), labels=()):
        sq = tuple((tuple(l), tuple(r)) for l, r in squares)
        for l, r in sq:
            for m in l + r:
                if m.coeff < 0:
                    raise DomainError("square sides need nonnegative coefficients")
        params = tuple(params)
        if unknowns is None:
            names = set()
            for l, r in sq:
                for m in l + r:
                    names |= m.names()
            unknowns = sorted(names - set(params))
        system = cls(tuple(unknowns), sq, params, tuple(labels))
        known = set(system.unknowns) | set(params)
        for l, r in sq:
            for m in l + r:
                if m.names() - known:
                    raise DomainError(f"undeclared names {sorted(m.names() - known)}")
        return system

    @property
    def k(self) -> int:
        return len(self.unknowns)

    def render(self) -> str:
        def side(ms):
            return " + ".join(m.render() for m in ms) if ms else "0"
        return " +\n".join(f"({side(l)} - ({side(r)}))^2" for l, r in self.squares)

    def to_json(self):
        order = list(self.unknowns) + list(self.params)
        obj = {"unknowns": list(self.unknowns),
               "squares": [{"l": [_mono_json(m, order) for m in l],
                            "r": [_mono_json(m, order) for m in r]} for l, r in self.squares]}
        if self.params:
            obj["params"] = list(self.params)
        return obj

    @classmethod
    def from_json(cls, obj):
        unknowns = list(obj["unknowns"])
        params = list(obj.get("params", []))
        order = unknowns + params
        squares = [([_mono_from_json(m, order) for m in s["l"]],
                    [_mono_from_json(m, order) for m in s["r"]]) for s in obj["squares"]]
        return cls.build(squares, unknowns, params)


def _square_terms(l, r):
    return list(l) + [-m for m in r]


def square_expansion(l, r) -> list:
    """Monomials of (sum(l) - sum(r))^2, one per unordered pair, unmerged."""
    terms = _square_terms(l, r)
    out = []
    for i, a in enumerate(terms):
        out.append(a * a)
        for b in terms[i + 1:]:
            out.append((a * b) * 2)
    return out


def raw_monomial_count(s: SquareSystem) -> int:
    """Monomials generated by the squares before any merging."""
    return sum(len(square_expansion(l, r)) for l, r in s.squares)


def expand_squares(s: SquareSystem) -> ExpPolynomial:
    monos = []
    for l, r in s.squares:
        monos.extend(square_expansion(l, r))
    return ExpPolynomial.build(monos, s.unknowns, s.params)


# ---------------------------------------------------------------------------
# evaluation

def _power(v: int, x):
    """v ** x, kept sparse when v is a power of two and the result is huge."""
    if v == 1:
        return 1
    if x == 0:
        return 1
    if isinstance(x, SparseInt):
        raise BudgetExceeded("exponent too large to evaluate")
    bits = (v.bit_length() - 1) * x
    if v & (v - 1) == 0:
        return SparseInt.pow2(bits) if bits > SPARSE_BITS else 1 << bits
    if bits > DENSE_BITS:
        raise BudgetExceeded(f"{show_int(v)}^{show_int(x)} needs about {show_int(bits)} bits")
    return int(gmpy2.mpz(v) ** x)


def _mul(a, b):
    if isinstance(a, SparseInt) or isinstance(b, SparseInt):
        return SparseInt.of(a) * SparseInt.of(b)
    return a * b


def _lookup(env, name):
    try:
        x = env[name]
    except KeyError:
        raise UnboundVariable(name) from None
    if not isinstance(x, SparseInt) and x < 0:
        raise DomainError(f"{name} must be a natural number")
    return x


def eval_monomial(m: ExpMonomial, env: dict):
    val = m.coeff
    for n, v, r in m.factors:
        x = _lookup(env, n)
        val = _mul(val, _power(v, x))
        if r:
            val = _mul(val, x ** r)
    return val


def eval_sum(monos, env: dict):
    sparse = None
    dense = 0
    for m in monos:
        val = eval_monomial(m, env)
        if isinstance(val, SparseInt):
            sparse = val if sparse is None else sparse + val
        else:
            dense += val
    if sparse is None:
        return dense
    return normalize(sparse + dense)


def eval_poly(p: ExpPolynomial, w: dict):
    """Exact value of p at w; returns a SparseInt when the value is huge."""
    return eval_sum(p.monomials, w)


def square_residuals(s: SquareSystem, w: dict) -> list:
    """Per square, sum(L) - sum(R) at w."""
    out = []
    for l, r in s.squares:
        lv, rv = eval_sum(l, w), eval_sum(r, w)
        if isinstance(lv, SparseInt) or isinstance(rv, SparseInt):
            out.append(normalize(SparseInt.of(lv) - SparseInt.of(rv)))
        else:
            out.append(lv - rv)
    return out


def satisfies(s: SquareSystem, w: dict) -> bool:
    """True iff every square vanishes, i.e. the whole sum is zero."""
    for d in square_residuals(s, w):
        if isinstance(d, SparseInt):
            if not d.is_zero():
                return False
        elif d != 0:
            return False
    return True


def eval_system(s: SquareSystem, w: dict):
    acc = 0
    for d in square_residuals(s, w):
        acc = acc + _mul(d, d) if isinstance(d, SparseInt) else acc + d * d
    return normalize(acc) if isinstance(acc, SparseInt) else acc


# ---------------------------------------------------------------------------
# counting by enumeration

def _factor_tables(p: ExpPolynomial, ranges):
    tables = []
    for m in p.monomials:
        per = []
        for name, rng in zip(p.unknowns, ranges):
            v, r = m.factor(name)
            per.append([v ** x * x ** r for x in rng] if (v, r) != (1, 0) else None)
        tables.append((m.coeff, per))
    return tables


def brute_count(p: ExpPolynomial, t: int, bounds: dict | None = None,
                point_budget: int | None = None, env: dict | None = None) -> int:
    """Number of zeros of p in [0, t-1]^k (per-unknown bounds override t)."""
    if p.params:
        if not env:
            raise UnboundVariable(p.params[0])
        p = p.substitute({n: env[n] for n in p.params})
    budget = DEFAULT_POINT_BUDGET if point_budget is None else point_budget
    bounds = bounds or {}
    sides = [bounds.get(n, t) for n in p.unknowns]
    if math.prod(sides) > budget:
        raise BudgetExceeded(f"{show_int(math.prod(sides))} points exceed the budget of {budget}")
    ranges = [range(s) for s in sides]
    tables = _factor_tables(p, ranges)
    count = 0
    for point in itertools.product(*[range(s) for s in sides]):
        total = 0
        for c, per in tables:
            term = c
            for tab, x in zip(per, point):
                if tab is not None:
                    term *= tab[x]
            total += term
        if total == 0:
            count += 1
    return count


# ---------------------------------------------------------------------------
# nonnegativity transform

def nonneg_singlefold_transform(pos, neg, unknowns=None) -> SquareSystem:
    """E = sum(pos) - sum(neg) rewritten as a sum of squares F.

    Each monomial m_i gets a fresh unknown y_i with square (y_i - m_i)^2, and
    (2^(sum of y over pos) - 2^(sum of y over neg))^2 forces the two sums to
    agree.  The y_i are determined by x, so the solution sets correspond
    one to one.
    """
    pos, neg = list(pos), list(neg)
    for m in pos + neg:
        if m.coeff < 0:
            raise DomainError("transform needs nonnegative monomials")
    if unknowns is None:
        names = set()
        for m in pos + neg:
            names |= m.names()
        unknowns = sorted(names)
    taken = set(unknowns)
    fresh = []
    i = 1
    while len(fresh) < len(pos) + len(neg):
        name = f"y_{i}"
        if name not in taken:
            fresh.append(name)
        i += 1
    squares = [([var(y)], [m]) for y, m in zip(fresh, pos + neg)]
    squares.append(([exp_sum(fresh[:len(pos)])], [exp_sum(fresh[len(pos):])]))
    return SquareSystem.build(squares, list(unknowns) + fresh)


def monomial_max(m: ExpMonomial, t: int, bounds: dict | None = None) -> int:
    """Value of |m| with every unknown at its largest cube value."""
    bounds = bounds or {}
    val = abs(m.coeff)
    for n, v, r in m.factors:
        x = bounds.get(n, t) - 1
        val *= v ** x * x ** r
    return val


# ---------------------------------------------------------------------------
# magnitude bounds

def magnitude_bound(p: ExpPolynomial, t: int) -> int:
    """Sum of |monomial| at all coordinates t-1 (triangle inequality)."""
    return sum(monomial_max(m, t) for m in p.monomials)


def choose_w(p: ExpPolynomial, t: int) -> int:
    """A w with |p| < 2^w on [0, t-1]^k; params are bounded by t as well."""
    return max(magnitude_bound(p, t).bit_length(), 1)


@dataclass(frozen=True)
class LinearBound:
    """w(t) = alpha * t + beta."""

    alpha: int
    beta: int

    def __call__(self, t: int) -> int:
        return self.alpha * t + self.beta

    def render(self, var_name="t") -> str:
        return f"{self.alpha}{var_name} + {self.beta}"


def symbolic_w(p: ExpPolynomial) -> LinearBound:
    """A bound |p| < 2^(alpha*t + beta) valid for every t >= 1 on [0, t-1]^k.

    Each unknown is at most t; v^t <= 2^(ceil(log2 v) t) and t^r <= 2^(r t),
    so a monomial is at most |c| 2^(e t) with e = sum(ceil(log2 v) + r).
    Summing gives sum|c| 2^(alpha t) < 2^(alpha t + bitlen(sum|c|)).
    """
    alpha = 0
    for m in p.monomials:
        e = sum((v - 1).bit_length() + r for _, v, r in m.factors)
        alpha = max(alpha, e)
    total = sum(abs(m.coeff) for m in p.monomials)
    return LinearBound(alpha, max(total.bit_length(), 1))

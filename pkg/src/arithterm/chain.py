"""Deterministic definition chains for singlefold square systems.

A chain is a sequence of steps, each introducing new unknowns whose values
are forced by the earlier ones:

* ``Define(x, expr)``: x = expr;
* ``DivMod(num, den, q, rem, slack)``: num = q*den + rem, rem + slack + 1 = den;
* ``ExactDiv(num, den, q)``: num = q*den with den >= 1 everywhere;
* ``Free(x)``: an unknown left open (the counted index).

From a chain we derive the square system, witnesses, monotone upper bounds
on every unknown, and a structural audit that an existing system is exactly
the image of a chain (hence has at most one solution per choice of the free
unknowns and parameters).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2

from .errors import BudgetExceeded, DomainError
from .expdio import (ExpMonomial, ExpPolynomial, SquareSystem, canonical, const,
                     eval_sum, expo, monomial, var)
from .sparse import SparseInt, normalize
from .terms import Add, Const, Mul, Pow, Pow2, Term


def _names(monos) -> set:
    out = set()
    for m in monos:
        out |= m.names()
    return out


def _times(monos_a, monos_b) -> list:
    return [a * b for a in monos_a for b in monos_b]


@dataclass(frozen=True)
class Free:
    name: str

    @property
    def new(self):
        return (self.name,)


@dataclass(frozen=True)
class Define:
    name: str
    expr: tuple  # signed monomials over known unknowns

    @property
    def new(self):
        return (self.name,)

    def relations(self):
        return [[var(self.name)] + [-m for m in self.expr]]


@dataclass(frozen=True)
class DivMod:
    num: tuple
    den: tuple
    q: str
    rem: str
    slack: str
    aux: tuple = ()   # (name, monomials) products written as fresh unknowns

    @property
    def new(self):
        return (self.q, self.rem, self.slack) + tuple(n for n, _ in self.aux)

    def relations(self):
        main = list(self.num) + [-m for m in _times([var(self.q)], self.den)] + [-var(self.rem)]
        bound = [var(self.rem), var(self.slack), const(1)] + [-m for m in self.den]
        return [main, bound]


@dataclass(frozen=True)
class ExactDiv:
    num: tuple
    den: tuple
    q: str
    aux: tuple = ()

    @property
    def new(self):
        return (self.q,) + tuple(n for n, _ in self.aux)

    def relations(self):
        return [list(self.num) + [-m for m in _times([var(self.q)], self.den)]]


def marchenkov_steps(A, B, tag: str, out: str) -> list:
    """out = A^B via 2^(XB) mod (2^X - A) with X = AB + A + 1."""
    A, B = tuple(A), tuple(B)
    X, T = f"{tag}x", f"{tag}t"
    return [
        Define(X, tuple(_times(A, B)) + A + (const(1),)),
        Define(T, tuple(_times([var(X)], B))),
        DivMod((expo(T),), (expo(X),) + tuple(-m for m in A), f"{tag}q", out, f"{tag}s"),
    ]


@dataclass
class Chain:
    params: tuple
    steps: list = field(default_factory=list)

    def add(self, *steps):
        self.steps.extend(steps)
        return self

    @property
    def unknowns(self) -> list:
        out = []
        for s in self.steps:
            out.extend(s.new)
        return out

    def relations(self) -> list:
        rels = []
        for s in self.steps:
            if isinstance(s, Free):
                continue
            for name, monos in getattr(s, "aux", ()):
                rels.append([var(name)] + [-m for m in monos])
            rels.extend(s.relations())
        return rels

    def system(self) -> SquareSystem:
        squares = []
        for rel in self.relations():
            mon = canonical(rel)
            squares.append(([m for m in mon if m.coeff > 0], [-m for m in mon if m.coeff < 0]))
        return SquareSystem.build(squares, sorted(self.unknowns), self.params)


# ---------------------------------------------------------------------------
# structural audit

def _pow2_exponent(m: ExpMonomial):
    """Linear exponent of a pure power-of-two monomial, else None."""
    c = m.coeff
    if c <= 0 or c & (c - 1):
        return None
    out = [const(c.bit_length() - 1)] if c > 1 else []
    for n, v, r in m.factors:
        if r or v & (v - 1):
            return None
        out.append(var(n, v.bit_length() - 1))
    return out


def square_relation(l, r) -> tuple:
    """The relation a square encodes; 2^A = 2^B squares become A = B."""
    if len(l) == 1 and len(r) == 1:
        el, er = _pow2_exponent(l[0]), _pow2_exponent(r[0])
        if el is not None and er is not None and (not l[0].is_constant() or not r[0].is_constant()):
            return canonical(el + [-m for m in er])
    return canonical(list(l) + [-m for m in r])


def _rewrite(monos, defs, rounds=8):
    """Replace linear occurrences of defined unknowns by their definitions."""
    cur = list(monos)
    for _ in range(rounds):
        changed = False
        nxt = []
        for m in cur:
            hit = next(((n, v, r) for n, v, r in m.factors if n in defs and v == 1 and r > 0), None)
            if hit is None:
                nxt.append(m)
                continue
            n, _, r = hit
            rest = monomial(m.coeff, {k: (v, rr) for k, v, rr in m.factors if k != n})
            prod = [rest]
            for _ in range(r):
                prod = _times(prod, defs[n])
            nxt.extend(prod)
            changed = True
        cur = list(canonical(nxt))
        if not changed:
            break
    return tuple(canonical(cur))


def _key(rel):
    rel = canonical(rel)
    if rel and rel[0].coeff < 0:
        rel = canonical([-m for m in rel])
    return rel


@dataclass
class ChainAudit:
    ok: bool
    problems: list
    steps: int
    squares: int

    def to_json(self):
        return {"ok": self.ok, "problems": self.problems, "steps": self.steps,
                "squares": self.squares}


def audit_chain(system: SquareSystem, chain: Chain) -> ChainAudit:
    """Check that ``system`` is exactly the image of ``chain``.

    Every square must be consumed by exactly one step, every step may only
    use unknowns introduced before it, and every unknown is introduced once.
    Definitions are compared literally; division relations are compared
    after substituting linear occurrences of already defined unknowns.
    """
    problems = []
    remaining = [square_relation(l, r) for l, r in system.squares]
    known = set(system.params)
    defs = {}

    def take(rel, rewrite):
        target = _key(_rewrite(rel, defs) if rewrite else rel)
        for i, cand in enumerate(remaining):
            c = _key(_rewrite(cand, defs) if rewrite else cand)
            if c == target:
                remaining.pop(i)
                return True
        return False

    for idx, step in enumerate(chain.steps):
        for n in step.new:
            if n in known:
                problems.append(f"step {idx}: {n} introduced twice")
        if isinstance(step, Free):
            known.add(step.name)
            continue
        if isinstance(step, Define):
            if _names(step.expr) - known:
                problems.append(f"step {idx}: {step.name} uses later unknowns {sorted(_names(step.expr) - known)}")
            if not take(step.relations()[0], False):
                problems.append(f"step {idx}: no square defines {step.name}")
            known.add(step.name)
            defs[step.name] = list(step.expr)
            continue
        inputs = _names(step.num) | _names(step.den)
        if inputs - known:
            problems.append(f"step {idx}: inputs use later unknowns {sorted(inputs - known)}")
        if isinstance(step, ExactDiv) and not _den_positive(step.den):
            problems.append(f"step {idx}: divisor not provably positive")
        for name, monos in step.aux:
            allowed = known | {step.q}
            if _names(monos) - allowed:
                problems.append(f"step {idx}: auxiliary {name} uses {sorted(_names(monos) - allowed)}")
            if not take([var(name)] + [-m for m in monos], False):
                problems.append(f"step {idx}: no square defines auxiliary {name}")
        known.update(step.new)
        for name, monos in step.aux:
            defs[name] = list(monos)
        for rel in step.relations():
            if not take(rel, True):
                problems.append(f"step {idx}: relation {ExpPolynomial.build(rel, None).render()} not found")
    if remaining:
        problems.append(f"{len(remaining)} squares not explained by the chain")
    missing = set(system.unknowns) - known
    if missing:
        problems.append(f"unknowns never introduced: {sorted(missing)}")
    return ChainAudit(not problems, problems, len(chain.steps), len(system.squares))


def _den_positive(den) -> bool:
    """Negative part constant and den(0) >= 1 (positive monomials are nondecreasing)."""
    if any(m.coeff < 0 and not m.is_constant() for m in den):
        return False
    at_zero = sum(m.coeff * math.prod(0 ** r for _, _, r in m.factors) for m in den)
    return at_zero >= 1


# ---------------------------------------------------------------------------
# evaluation

DEFERRED = None


def _as_sparse_divisor(den):
    """(X, a) when den = 2^X - a with 0 <= a small, for sparse division."""
    d = SparseInt.of(den)
    if not d.terms:
        return None
    top = max(d.terms)
    if d.terms[top] != 1:
        return None
    rest = d - SparseInt.pow2(top)
    if rest.sign() > 0 or not rest.is_small(1 << 24):
        return None
    return top, -rest.to_int()


def _divmod(num, den, bit_budget):
    if isinstance(num, SparseInt) or isinstance(den, SparseInt):
        if isinstance(den, SparseInt):
            xa = _as_sparse_divisor(den)
            if xa is None:
                raise BudgetExceeded("sparse divisor of unsupported shape")
            x, a = xa
            # quotient has about top/x blocks, the i-th with a coefficient near a^i
            blocks = _size(num) // max(x, 1) + 1
            if blocks > bit_budget or blocks * blocks * max(a.bit_length(), 1) // 2 > bit_budget:
                raise BudgetExceeded("sparse quotient too large")
            q, r = SparseInt.of(num).divmod_pow2_minus(x, a)
            return normalize(q), normalize(r)
        if isinstance(num, SparseInt):
            if den & (den - 1) == 0:
                q, r = SparseInt.of(num).divmod_pow2_minus(den.bit_length() - 1, 0)
                return normalize(q), normalize(r)
            raise BudgetExceeded("sparse dividend with a dense divisor")
    if den <= 0:
        raise DomainError("divisor is not positive")
    q, r = gmpy2.f_divmod(num, den)
    return int(q), int(r)


def _size(x) -> int:
    return x.top_bits() if isinstance(x, SparseInt) else int(x).bit_length()


@dataclass
class ChainValues:
    values: dict
    deferred: list
    failed: str | None = None

    @property
    def complete(self) -> bool:
        return not self.deferred and self.failed is None


def evaluate_chain(chain: Chain, env: dict, bit_budget: int = 1 << 24,
                   shortcuts: dict | None = None) -> ChainValues:
    """Run the chain forward from the params and free unknowns in ``env``.

    Values that would need more than ``bit_budget`` dense bits are deferred,
    as is everything depending on them.  ``shortcuts`` maps a name to a
    callable computing its value directly from available values; it is used
    when the step itself is deferred.
    """
    vals = dict(env)
    deferred = []
    shortcuts = shortcuts or {}

    def ready(monos):
        return all(vals.get(n) is not None for n in _names(monos))

    def value(monos):
        v = eval_sum(monos, vals)
        if _size(v) > bit_budget and not isinstance(v, SparseInt):
            raise BudgetExceeded("value exceeds the budget")
        return v

    for step in chain.steps:
        if isinstance(step, Free):
            if step.name not in vals:
                raise DomainError(f"free unknown {step.name} must be given")
            continue
        try:
            if isinstance(step, Define):
                if not ready(step.expr):
                    raise BudgetExceeded("inputs deferred")
                v = value(step.expr)
                if not isinstance(v, SparseInt) and v < 0:
                    return ChainValues(vals, deferred, f"{step.name} would be negative")
                vals[step.name] = v
                continue
            if not (ready(step.num) and ready(step.den)):
                raise BudgetExceeded("inputs deferred")
            num, den = value(step.num), value(step.den)
            if isinstance(step, DivMod):
                if not isinstance(den, SparseInt) and den <= 0:
                    return ChainValues(vals, deferred, f"divisor for {step.q} is not positive")
                q, r = _divmod(num, den, bit_budget)
                vals[step.q], vals[step.rem] = q, r
                vals[step.slack] = normalize(SparseInt.of(den) - r - 1) if isinstance(den, SparseInt) else den - r - 1
            else:
                q, r = _divmod(num, den, bit_budget)
                if r != 0:
                    return ChainValues(vals, deferred, f"{step.q}: division is not exact")
                vals[step.q] = q
            for name, monos in step.aux:
                vals[name] = value(monos)
        except BudgetExceeded:
            for n in step.new:
                if n in shortcuts and vals.get(n) is None:
                    try:
                        vals[n] = shortcuts[n](vals)
                        continue
                    except (BudgetExceeded, KeyError, TypeError):
                        pass
                if vals.get(n) is None:
                    vals[n] = DEFERRED
                    deferred.append(n)
    return ChainValues(vals, deferred)


# ---------------------------------------------------------------------------
# monotone bounds

def _bound_monomial(m: ExpMonomial, bounds: dict) -> Term:
    parts = [] if m.coeff == 1 else [Const(m.coeff)]
    for n, v, r in m.factors:
        b = bounds[n]
        if v == 2:
            parts.append(Pow2(b))
        elif v > 1:
            parts.append(Pow(Const(v), b))
        for _ in range(r):
            parts.append(b)
    if not parts:
        return Const(1)
    acc = parts[0]
    for p in parts[1:]:
        acc = Mul(acc, p)
    return acc


def _bound_sum(monos, bounds) -> Term:
    pos = [m for m in monos if m.coeff > 0]
    if not pos:
        return Const(0)
    acc = _bound_monomial(pos[0], bounds)
    for m in pos[1:]:
        acc = Add(acc, _bound_monomial(m, bounds))
    return acc


def chain_bounds(chain: Chain, base: dict) -> dict:
    """Upper bounds (Terms in the params) for every unknown.

    ``base`` supplies bounds for params and free unknowns.  Monomials are
    nondecreasing, so dropping negative monomials bounds a sum from above;
    quotients are at most the dividend and remainders below the divisor.
    """
    bounds = dict(base)
    for step in chain.steps:
        if isinstance(step, Free):
            if step.name not in bounds:
                raise DomainError(f"no bound for free unknown {step.name}")
            continue
        if isinstance(step, Define):
            bounds[step.name] = _bound_sum(step.expr, bounds)
            continue
        nb = _bound_sum(step.num, bounds)
        bounds[step.q] = nb
        if isinstance(step, DivMod):
            db = _bound_sum(step.den, bounds)
            bounds[step.rem] = db
            bounds[step.slack] = db
        for name, monos in step.aux:
            bounds[name] = _bound_sum(monos, bounds)
    return bounds


def sum_terms(terms) -> Term:
    terms = list(terms)
    acc = terms[0]
    for t in terms[1:]:
        acc = Add(acc, t)
    return acc


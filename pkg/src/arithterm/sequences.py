"""C-recursive sequences and their div-mod closed forms.

A sequence with rational generating function A(z)/B(z), deg A < deg B = d,
has the representation

    t(n) = floor(c^(n^2) * A~(c^n) / B~(c^n)) mod c^n,

where A~(X) = sum A_i X^(d-i) and B~ likewise, provided the base c is large
enough compared with the growth of t.  The Pell solutions x(n) of
X^2 - 3Y^2 = 1 and the Lucas-Lehmer numbers s(n) = 2 x(2^(n-1)) are the
instances used by the Mersenne counter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, DomainError, ValidityCheckFailed
from .terms import Add, Const, DivFloor, Mod, Monus, Mul, Pow, Pow2, Term, Var, evaluate, parse

DEFAULT_PREFIX = 60


@dataclass(frozen=True)
class CRecSpec:
    A: tuple
    B: tuple
    c: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(int(a) for a in self.A))
        object.__setattr__(self, "B", tuple(int(b) for b in self.B))
        if not self.B or self.B[0] != 1:
            raise DomainError("B(0) must be 1")
        if _degree(self.A) >= _degree(self.B):
            raise DomainError("need deg A < deg B")
        if self.c is not None and self.c < 2:
            raise DomainError("base must be at least 2")

    @property
    def d(self) -> int:
        return _degree(self.B)

    def to_json(self):
        obj = {"A": [str(a) for a in self.A], "B": [str(b) for b in self.B]}
        if self.c is not None:
            obj["c"] = str(self.c)
        return obj

    @classmethod
    def from_json(cls, obj):
        c = obj.get("c")
        return cls(tuple(int(a) for a in obj["A"]), tuple(int(b) for b in obj["B"]),
                   None if c is None else int(c))


def _degree(coeffs) -> int:
    for i in range(len(coeffs) - 1, -1, -1):
        if coeffs[i]:
            return i
    return -1


PELL_X = CRecSpec((1, -2), (1, -4, 1), 11)
FIBONACCI = CRecSpec((0, 1), (1, -1, -1), 8)
CONSTANT_ONE = CRecSpec((1,), (1, -1), 8)


def crec_values(spec: CRecSpec, count: int) -> list:
    """First ``count`` series coefficients of A/B, from the recurrence."""
    out = []
    B = spec.B
    for n in range(count):
        v = spec.A[n] if n < len(spec.A) else 0
        for i in range(1, min(n, len(B) - 1) + 1):
            v -= B[i] * out[n - i]
        out.append(v)
    return out


def crec_eval(spec: CRecSpec, n: int) -> int:
    if n < 0:
        raise DomainError("index must be nonnegative")
    v = crec_values(spec, n + 1)[n]
    if v < 0:
        raise DomainError(f"coefficient {n} is negative ({v})")
    return v


# ---------------------------------------------------------------------------
# validity of the representation

def radius_of_convergence(spec: CRecSpec) -> float:
    """Smallest modulus of a root of B (a lower bound for the true radius)."""
    d = spec.d
    if d <= 0:
        return math.inf
    roots = np.roots(list(reversed(spec.B[:d + 1])))
    return float(min(abs(roots)))


@dataclass(frozen=True)
class Validity:
    c: int
    radius: float
    variant1_m: int | None    # least m satisfying the (c, m) conditions
    variant2: bool            # the c >= 8, t(n)^3 < c^n conditions
    prefix: int

    @property
    def ok(self) -> bool:
        return self.variant1_m is not None or self.variant2

    @property
    def valid_from(self) -> int | None:
        if self.variant2:
            return 1
        return self.variant1_m

    def reason(self) -> str:
        if self.ok:
            return "ok"
        return (f"base {self.c}: no m >= 2 with c^-m < R = {self.radius:.6g} and "
                f"t(n) < c^(n-2) on the checked prefix, and the c >= 8 variant fails")

    def to_json(self):
        return {"c": self.c, "radius": self.radius, "variant1_m": self.variant1_m,
                "variant2": self.variant2, "valid_from": self.valid_from, "prefix": self.prefix}


def check_validity(spec: CRecSpec, c: int, prefix: int = DEFAULT_PREFIX) -> Validity:
    """Numeric check of the two sufficient conditions over n < prefix.

    Both conditions quantify over all n; beyond the prefix we also demand
    1/R < c, which makes t(n) < c^(n-2) hold eventually.
    """
    vals = crec_values(spec, prefix)
    if any(v < 0 for v in vals):
        raise ValidityCheckFailed("sequence has negative terms on the prefix")
    R = radius_of_convergence(spec)
    growth_ok = R == math.inf or 1.0 / R < c

    m1 = None
    if growth_ok:
        # t(n) < c^(n-2) must hold for all n >= m: find the last failure
        last_bad = 1
        for n in range(2, prefix):
            if vals[n] >= c ** (n - 2):
                last_bad = n
        m = max(2, last_bad + 1)
        while m < prefix and not (R == math.inf or c ** (-m) < R):
            m += 1
        if m < prefix:
            m1 = m
    v2 = (c >= 8 and (R == math.inf or 1.0 / c < R)
          and all(vals[n] ** 3 < c ** n for n in range(1, prefix))
          and growth_ok)
    return Validity(c, R, m1, v2, prefix)


def minimal_base(spec: CRecSpec, prefix: int = DEFAULT_PREFIX, start: int = 8,
                 limit: int = 1 << 16) -> Validity:
    c = start
    while c <= limit:
        v = check_validity(spec, c, prefix)
        if v.ok:
            return v
        c += 1
    raise ValidityCheckFailed(f"no admissible base up to {limit}")


# ---------------------------------------------------------------------------
# term extraction

def _power(c: int, e: Term) -> Term:
    return Pow2(e) if c == 2 else Pow(Const(c), e)


def _poly_at(coeffs, d, c, n: Term, shift: Term | None):
    """(positive part, negative part) of sum coeffs[i] * c^(n(d-i)) * c^shift."""
    pos, neg = [], []
    for i, a in enumerate(coeffs):
        if not a:
            continue
        if d - i == 0 and shift is None:
            (pos if a > 0 else neg).append(Const(abs(a)))
            continue
        exp: Term = n if d - i == 1 else Mul(Const(d - i), n)
        if shift is not None:
            exp = Add(shift, exp) if d - i else shift
        p = _power(c, exp)
        if abs(a) != 1:
            p = Mul(Const(abs(a)), p)
        (pos if a > 0 else neg).append(p)

    def total(parts):
        if not parts:
            return Const(0)
        acc = parts[0]
        for p in parts[1:]:
            acc = Add(acc, p)
        return acc

    return total(pos), (total(neg) if neg else None)


def _signed(pos, neg):
    return pos if neg is None else Monus(pos, neg)


@dataclass(frozen=True)
class Extraction:
    term: Term
    validity: Validity


def extract_divmod_term(spec: CRecSpec, c: int | None = None, var: str = "n",
                        prefix: int = DEFAULT_PREFIX) -> Extraction:
    """The div-mod term for ``spec`` in one free variable.

    With no base given (here or as spec.c) the least admissible c >= 8 is
    used.  Raises ValidityCheckFailed when the chosen base is not admissible.
    """
    base = c if c is not None else spec.c
    if base is None:
        validity = minimal_base(spec, prefix)
        base = validity.c
    else:
        validity = check_validity(spec, base, prefix)
        if not validity.ok:
            raise ValidityCheckFailed(validity.reason())
    n = Var(var)
    d = spec.d
    num = _signed(*_poly_at(spec.A, d, base, n, Mul(n, n)))
    den = _signed(*_poly_at(spec.B, d, base, n, None))
    term = Mod(DivFloor(num, den), _power(base, n))
    return Extraction(term, validity)


# ---------------------------------------------------------------------------
# Pell and Lucas-Lehmer instances

PELL_X_TERM = parse("((11^(n*n + 2*n) - 2*11^(n*n + n)) / (11^(2*n) - 4*11^n + 1)) % 11^n")

LEHMER_S_TERM = parse(
    "2 * (((11^(2^(2*n - 2) + 2^n) - 2*11^(2^(2*n - 2) + 2^(n - 1)))"
    " / (11^(2^n) - 4*11^(2^(n - 1)) + 1)) % 11^(2^(n - 1)))")


def pell_x(n: int) -> int:
    return crec_eval(PELL_X, n)


def pell_x_term_eval(n: int) -> int:
    if n < 1:
        raise DomainError("the closed form is stated for n >= 1")
    return evaluate(PELL_X_TERM, {"n": n})


LEHMER_UNBOUNDED_MAX = 25


def lehmer_s(n: int, modulus: int | None = None) -> int:
    """s(1) = 4, s(n+1) = s(n)^2 - 2, optionally reduced mod ``modulus``."""
    if n < 1:
        raise DomainError("s is defined for n >= 1")
    if modulus is None:
        if n > LEHMER_UNBOUNDED_MAX:
            raise BudgetExceeded(f"s({n}) has about 2^{n - 2} digits; pass a modulus")
        s = 4
        for _ in range(n - 1):
            s = s * s - 2
        return s
    if modulus < 1:
        raise DomainError("modulus must be positive")
    s = 4 % modulus
    for _ in range(n - 1):
        s = (s * s - 2) % modulus
    return s


def lehmer_s_term_eval(n: int, limit: int = 8) -> int:
    if n < 1:
        raise DomainError("s is defined for n >= 1")
    if n > limit:
        raise BudgetExceeded(f"n = {n} exceeds the evaluation limit {limit}")
    return evaluate(LEHMER_S_TERM, {"n": n})

"""Counting systems for special primes, their witnesses and oracle tests.

Each family is a sum-of-squares system whose solutions in a cube are in
bijection with the primes being counted, together with bounds t(n) for the
cube and w(n) for the block width.  Plugging a system into the concatenation
number of :mod:`arithterm.mazzanti` gives the counting term.  At the real
t(n) the concatenation has far more bits than can ever be materialised, so
the systems are exercised through witnesses, structural checks, surrogate
bounds and independent oracle counts.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext

import gmpy2

from .chain import (Chain, ChainAudit, Define, DivMod, ExactDiv, Free, audit_chain,
                    chain_bounds, evaluate_chain, marchenkov_steps, sum_terms)
from .config import bit_budget as _bit_budget
from .errors import BudgetExceeded, DomainError, InvariantViolation
from .expdio import (LinearBound, SquareSystem, const, expand_squares, expo, monomial,
                     raw_monomial_count, satisfies, square_residuals, symbolic_w, var)
from .generators import factorial_mod
from .mazzanti import CountingInstance, count_solutions, m_bits, m_profile
from .sequences import lehmer_s
from .sparse import SparseInt
from .terms import Add, Const, FactorialScheme, Mul, Pow, Pow2, Term, Var, evaluate, metrics


class SpecialPrimeFamily(enum.Enum):
    MERSENNE = "mersenne"
    FERMAT = "fermat"
    TWIN = "twin"
    SOPHIE = "sophie"


N = Var("n")


@dataclass(frozen=True)
class CountingSpec:
    """A counting system with its cube and width bounds.

    The count for parameter n is HW(M)/w(n) - t(n)^k_vars + offset.
    """

    family: str
    system: SquareSystem
    t_of_n: Term
    w_bound: LinearBound      # w(n) = alpha * t(n) + beta
    offset: int
    counted: str = "k"
    chain: Chain | None = field(default=None, compare=False)

    @property
    def w_of_n(self) -> Term:
        return Add(Mul(Const(self.w_bound.alpha), self.t_of_n), Const(self.w_bound.beta))

    @property
    def k_vars(self) -> int:
        return self.system.k

    @property
    def unknowns(self) -> tuple:
        return self.system.unknowns

    def t(self, n: int, bit_budget: int | None = None) -> int:
        return evaluate(self.t_of_n, {"n": n}, bit_budget)

    def w(self, n: int, bit_budget: int | None = None) -> int:
        return evaluate(self.w_of_n, {"n": n}, bit_budget)


# ---------------------------------------------------------------------------
# Mersenne primes

def _m(coeff=1, **factors):
    return monomial(coeff, factors)


def _r_squares():
    E = lambda **f: _m(**{k: (v, 0) for k, v in f.items()})  # noqa: E731
    return [
        ([var("a")], [expo("k")]),
        ([var("f")], [expo("k", 4)]),
        ([var("g")], [E(f=11, a=121)]),
        ([var("h")], [E(f=11, a=11)]),
        ([var("i")], [expo("a", 11)]),
        ([var("j")], [expo("a", 121)]),
        ([var("K")], [_m(a=(121, 0), b=(1, 1))]),
        ([var("l")], [_m(a=(11, 0), b=(1, 1))]),
        ([var("m")], [_m(a=(11, 0), e=(1, 1))]),
        ([var("p")], [_m(4, k=(2, 0), z=(1, 1))]),
        ([E(g=2, l=16)], [E(h=4, K=2, b=2, c=2)]),
        ([expo("j")], [E(i=16, c=2, d=2)]),
        ([expo("b")], [E(m=2, x=2)]),
        ([expo("i")], [_m(2, x=(2, 0), y=(2, 0))]),
        ([expo("p")], [E(x=2, z=2)]),
        ([expo("n")], [E(k=2, v=2)]),
    ]


R_UNKNOWNS = ("k", "v", "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "K", "l", "m",
              "p", "x", "y", "z")


def build_R() -> CountingSpec:
    """The Mersenne system over 19 unknowns, t = 11^(2^(2n+1)), w = 36t + 6, offset +1."""
    system = SquareSystem.build(_r_squares(), R_UNKNOWNS, ("n",))
    t = Pow(Const(11), Pow2(Add(Mul(Const(2), N), Const(1))))
    return CountingSpec("mersenne", system, t, LinearBound(36, 6), 1, "k", mersenne_chain())


def mersenne_chain() -> Chain:
    """The order in which the squares of R force their unknowns."""
    return Chain(("n",)).add(
        Free("k"),
        Define("v", (var("n"), var("k", -1))),
        Define("a", (expo("k"),)),
        Define("f", (expo("k", 4),)),
        Define("g", (_m(f=(11, 0), a=(121, 0)),)),
        Define("h", (_m(f=(11, 0), a=(11, 0)),)),
        Define("i", (expo("a", 11),)),
        Define("j", (expo("a", 121),)),
        DivMod((var("g"), var("h", -2)), (var("j"), var("i", -4), const(1)), "b", "c", "d",
               (("K", (_m(a=(121, 0), b=(1, 1)),)), ("l", (_m(a=(11, 0), b=(1, 1)),)))),
        DivMod((var("b"),), (var("i"),), "e", "x", "y", (("m", (_m(a=(11, 0), e=(1, 1)),)),)),
        ExactDiv((var("x"),), (_m(4, k=(2, 0)), const(-1)), "z",
                 (("p", (_m(4, k=(2, 0), z=(1, 1)),)),)),
    )


MERSENNE_WITNESS_MAX = 11


@dataclass
class Witness:
    family: str
    index: int
    n: int
    values: dict
    complete: bool = True
    checked: int = 0
    squares: int = 0
    satisfied: bool = False
    note: str = ""

    def assignment(self) -> dict:
        out = {k: v for k, v in self.values.items() if v is not None}
        out["n"] = self.n
        return out

    def to_json(self):
        def enc(v):
            if v is None:
                return None
            if isinstance(v, SparseInt):
                return {"sparse": v.to_json()}
            return str(v)
        return {"family": self.family, "index": self.index, "n": self.n,
                "complete": self.complete, "checked_squares": self.checked,
                "squares": self.squares, "satisfied": self.satisfied, "note": self.note,
                "values": {k: enc(v) for k, v in sorted(self.values.items())}}


def _check(system: SquareSystem, w: Witness) -> Witness:
    """Evaluate every square whose unknowns are all known."""
    env = w.assignment()
    ok = True
    checked = 0
    for sq in system.squares:
        names = set()
        for m in sq[0] + sq[1]:
            names |= m.names()
        if names - set(env):
            continue
        single = SquareSystem(system.unknowns, (sq,), system.params)
        if not satisfies(single, env):
            ok = False
        checked += 1
    w.checked = checked
    w.squares = len(system.squares)
    w.satisfied = ok and checked == len(system.squares)
    if not ok:
        raise InvariantViolation(f"{w.family} witness for {w.index} violates a square")
    return w


def mersenne_witness(k: int, n: int | None = None, verify: bool = True) -> Witness | None:
    """The unique solution of R with this k, or None when 2^(k+2)-1 is composite."""
    if k < 1:
        raise DomainError("k >= 1 (the value 3 is covered by the offset)")
    if k > MERSENNE_WITNESS_MAX:
        raise BudgetExceeded(f"k <= {MERSENNE_WITNESS_MAX}")
    n = k if n is None else n
    if n < k:
        raise DomainError("need n >= k")
    mpz = gmpy2.mpz
    a = 1 << k
    f = 1 << (2 * k)
    i = mpz(11) ** a
    j = i * i
    h = mpz(11) ** f * i
    g = h * i
    b, c = gmpy2.f_divmod(g - 2 * h, j - 4 * i + 1)
    d = j - 4 * i - c
    e, x = gmpy2.f_divmod(b, i)
    y = i - x - 1
    z, rem = gmpy2.f_divmod(x, (1 << (k + 2)) - 1)
    if rem:
        return None
    vals = dict(k=k, v=n - k, a=a, b=b, c=c, d=d, e=e, f=f, g=g, h=h, i=i, j=j, K=j * b,
                l=i * b, m=i * e, p=(1 << (k + 2)) * z, x=x, y=y, z=z)
    w = Witness("mersenne", k, n, {name: int(val) for name, val in vals.items()})
    return _check(build_R().system, w) if verify else w


def coordinates_below(w: Witness, t: int) -> bool:
    return all(v < t for v in w.values.values() if not isinstance(v, SparseInt))


def lucas_lehmer_test(p: int) -> bool:
    """2^p - 1 is prime iff it divides s(p-1); p = 2 is special-cased."""
    if p < 2:
        raise DomainError("p >= 2")
    if p == 2:
        return True
    mod = (1 << p) - 1
    return lehmer_s(p - 1, mod) == 0


MERSENNE_ORACLE_MAX = 60


def mersenne_count_oracle(n: int) -> int:
    """#{k <= n : 2^(k+2) - 1 prime}."""
    if n > MERSENNE_ORACLE_MAX:
        raise BudgetExceeded(f"n <= {MERSENNE_ORACLE_MAX}")
    return sum(lucas_lehmer_test(k + 2) for k in range(n + 1))


# ---------------------------------------------------------------------------
# Fermat primes

def build_S() -> CountingSpec:
    """The Fermat system over 7 unknowns, t = 12^(3n+3), w = 22t + 27."""
    squares = [
        ([var("c")], [_m(144, g=(1728, 0))]),
        ([var("d")], [_m(a=(1, 1), g=(1, 1))]),
        ([var("e")], [_m(b=(1, 1), g=(1, 1))]),
        ([expo("n")], [_m(g=(2, 0), v=(2, 0))]),
        ([expo("c")], [_m(d=(8, 0), a=(4, 0))]),
        ([_m(2, c=(2, 0))], [_m(e=(64, 0), b=(32, 0))]),
    ]
    system = SquareSystem.build(squares, ("g", "v", "a", "b", "c", "d", "e"), ("n",))
    t = Pow(Const(12), Add(Mul(Const(3), N), Const(3)))
    return CountingSpec("fermat", system, t, LinearBound(22, 27), 0, "g")


def jones_test(g: int) -> bool:
    """(3g+2) | 12^(3g+2) and (6g+5) | 12^(3g+2) + 1."""
    if g < 0:
        raise DomainError("g >= 0")
    e = 3 * g + 2
    return gmpy2.powmod(12, e, e) == 0 and gmpy2.powmod(12, e, 6 * g + 5) == 6 * g + 4


def pepin_test(m: int) -> bool:
    """12^((N-1)/2) == -1 mod N for N = 2^m + 1.

    Base 12 is divisible by 3, so m = 1 (N = 3) is rejected by the test.
    """
    if m < 1:
        raise DomainError("m >= 1")
    N = (1 << m) + 1
    return gmpy2.powmod(12, (N - 1) // 2, N) == N - 1


FERMAT_WITNESS_MAX = 11000
FERMAT_ORACLE_MAX = 20000


def fermat_witness(g: int, n: int | None = None, verify: bool = True) -> Witness | None:
    if g < 0:
        raise DomainError("g >= 0")
    if g > FERMAT_WITNESS_MAX:
        raise BudgetExceeded(f"g <= {FERMAT_WITNESS_MAX}")
    n = g if n is None else n
    if n < g:
        raise DomainError("need n >= g")
    if not jones_test(g):
        return None
    c = gmpy2.mpz(12) ** (3 * g + 2)
    a = gmpy2.divexact(c, 3 * g + 2)
    b = gmpy2.divexact(c + 1, 6 * g + 5)
    vals = dict(g=g, v=n - g, a=a, b=b, c=c, d=a * g, e=b * g)
    w = Witness("fermat", g, n, {name: int(val) for name, val in vals.items()})
    return _check(build_S().system, w) if verify else w


def fermat_count_oracle(n: int) -> int:
    """#{g <= n : 6g + 5 is a Fermat prime}."""
    if n > FERMAT_ORACLE_MAX:
        raise BudgetExceeded(f"n <= {FERMAT_ORACLE_MAX}")
    return sum(jones_test(g) for g in range(n + 1))


# ---------------------------------------------------------------------------
# twin primes

ORACLE_MAX = 10**5


def clement_test(k: int) -> bool:
    """(k+2)(k+4) | 4 (k+1)! + k + 6, i.e. k+2 and k+4 both prime."""
    if k < 0:
        raise DomainError("k >= 0")
    if k > ORACLE_MAX:
        raise BudgetExceeded(f"k <= {ORACLE_MAX}")
    mod = (k + 2) * (k + 4)
    return (4 * factorial_mod(k + 1, mod) + k + 6) % mod == 0


def twin_count_oracle(n: int) -> int:
    """#{0 < p <= n : p and p + 2 prime}."""
    if n > ORACLE_MAX:
        raise BudgetExceeded(f"n <= {ORACLE_MAX}")
    return sum(clement_test(p - 2) for p in range(2, n + 1))


def twin_chain(scheme: FactorialScheme = FactorialScheme.POW8SQ) -> Chain:
    """f = (k+1)! through r^N // binom(r, N), then the Clement divisibility.

    With N = k+1, binom(r, N) = floor((2^r + 1)^r / 2^(rN)) mod 2^r and the
    powers with non-constant bases go through 2^(XB) mod (2^X - A).
    """
    k1 = (var("k"), const(1))
    chain = Chain(("n",)).add(Free("k"), Define("a", (var("n"), var("k", -1), const(-2))))
    if scheme is FactorialScheme.MINIMAL:
        chain.add(*marchenkov_steps((var("k"), const(2)), (var("k"), const(3)), "m1", "r"))
    else:
        chain.add(Define("s", (_m(k=(1, 2)), var("k", 2), const(1))),
                  Define("r", (expo("s", 8),)))
    chain.add(*marchenkov_steps((var("r"),), k1, "m2", "pw"))
    chain.add(Define("e2", (expo("r"),)))
    chain.add(*marchenkov_steps((var("e2"), const(1)), (var("r"),), "m3", "y"))
    chain.add(
        Define("dd", (_m(r=(1, 1), k=(1, 1)), var("r"))),
        Define("ee", (expo("dd"),)),
        DivMod((var("y"),), (var("ee"),), "q1", "u1", "s1"),
        DivMod((var("q1"),), (var("e2"),), "q2", "cb", "s2"),
        DivMod((var("pw"),), (var("cb"),), "f", "u3", "s3"),
        ExactDiv((var("f", 4), var("k"), const(6)),
                 (_m(k=(1, 2)), var("k", 6), const(8)), "b"),
    )
    return chain


def build_twin_system(scheme: FactorialScheme = FactorialScheme.POW8SQ) -> CountingSpec:
    chain = twin_chain(scheme)
    system = chain.system()
    bounds = chain_bounds(chain, {"n": N, "k": N})
    t = Add(sum_terms(bounds[u] for u in system.unknowns), Const(1))
    return CountingSpec("twin", system, t, symbolic_w(expand_squares(system)), 0, "k", chain)


def _twin_shortcuts(k: int):
    """Closed-form values used when a chain step is too large to run."""
    def cb(vals):
        return math.comb(int(vals["r"]), k + 1)

    def s2(vals):
        return vals["e2"] - vals["cb"] - 1

    def f(_):
        return math.factorial(k + 1)

    return {"cb": cb, "s2": s2, "f": f}


def twin_witness(k: int, n: int | None = None,
                 scheme: FactorialScheme = FactorialScheme.MINIMAL,
                 bit_budget: int | None = None) -> Witness | None:
    """The unique solution with this k, or None unless k+2, k+4 are twin primes.

    Chain values beyond the bit budget are left as None and the squares that
    mention them are skipped; ``complete`` tells whether every square was
    checked.
    """
    if k < 0:
        raise DomainError("k >= 0")
    n = k + 2 if n is None else n
    if n < k + 2:
        raise DomainError("need n >= k + 2")
    if not clement_test(k):
        return None
    spec = build_twin_system(scheme)
    cv = evaluate_chain(spec.chain, {"n": n, "k": k}, _bit_budget(bit_budget),
                        _twin_shortcuts(k))
    if cv.failed:
        raise InvariantViolation(f"twin chain failed at k = {k}: {cv.failed}")
    values = {u: cv.values.get(u) for u in spec.system.unknowns}
    if values["f"] != math.factorial(k + 1):
        raise InvariantViolation("chain factorial disagrees with (k+1)!")
    w = Witness("twin", k, n, values, complete=cv.complete,
                note="" if cv.complete else f"deferred: {', '.join(cv.deferred)}")
    return _check(spec.system, w)


@dataclass
class DeterminismReport:
    audit: ChainAudit
    per_k: dict

    @property
    def ok(self) -> bool:
        return self.audit.ok and all(r["ok"] for r in self.per_k.values())

    def to_json(self):
        return {"ok": self.ok, "audit": self.audit.to_json(),
                "per_k": {str(k): v for k, v in self.per_k.items()}}


def twin_determinism(k_max: int = 10, scheme: FactorialScheme = FactorialScheme.MINIMAL,
                     bit_budget: int = 1 << 20) -> DeterminismReport:
    """Structural singlefoldness of the twin system plus a forward run per k.

    The audit shows the system is exactly the image of its chain, so once n
    and k are fixed every other unknown is forced.  For each k the chain is
    run as far as the budget allows; it must produce b exactly for twin k.
    """
    spec = build_twin_system(scheme)
    audit = audit_chain(spec.system, spec.chain)
    per_k = {}
    for k in range(k_max + 1):
        cv = evaluate_chain(spec.chain, {"n": k + 2, "k": k}, bit_budget, _twin_shortcuts(k))
        twin = clement_test(k)
        has_b = cv.failed is None and cv.values.get("b") is not None
        factorial_ok = cv.values.get("f") in (None, math.factorial(k + 1))
        per_k[k] = {"twin": twin, "solution": has_b, "deferred": len(cv.deferred),
                    "ok": factorial_ok and has_b == twin}
    return DeterminismReport(audit, per_k)


def mersenne_determinism() -> ChainAudit:
    return audit_chain(build_R().system, mersenne_chain())


# ---------------------------------------------------------------------------
# Sophie Germain primes

def sg_rotondo(p: int) -> bool:
    if p == 2:
        return True
    if p < 2:
        return False
    mod = p * (2 * p + 1)
    fm = factorial_mod(p - 1, mod)
    return (fm * fm + 6 * p - 1) % mod == 0


def sg_wilson(p: int) -> bool:
    if p < 2:
        return False
    return ((factorial_mod(p - 1, p) + 1) % p == 0
            and (factorial_mod(2 * p, 2 * p + 1) + 1) % (2 * p + 1) == 0)


def sg_test(p: int) -> bool:
    """p and 2p + 1 both prime; the two criteria must agree."""
    if p > ORACLE_MAX:
        raise BudgetExceeded(f"p <= {ORACLE_MAX}")
    a, b = sg_rotondo(p), sg_wilson(p)
    if a != b:
        raise InvariantViolation(f"Sophie Germain criteria disagree at p = {p}")
    return a


def sg_count_oracle(n: int) -> int:
    if n > ORACLE_MAX:
        raise BudgetExceeded(f"n <= {ORACLE_MAX}")
    return sum(sg_test(p) for p in range(2, n + 1))


# ---------------------------------------------------------------------------
# counting through the term

def toy_spec() -> CountingSpec:
    """(x + 2 - y)^2 on [0, 5]^2: four solutions."""
    system = SquareSystem.build([([var("x"), const(2)], [var("y")])], ("x", "y"))
    return CountingSpec("toy", system, Const(6), symbolic_w(expand_squares(system)), 0, "x")


def family_spec(family, scheme: FactorialScheme = FactorialScheme.POW8SQ) -> CountingSpec | None:
    fam = _family(family)
    if fam == "mersenne":
        return build_R()
    if fam == "fermat":
        return build_S()
    if fam == "twin":
        return build_twin_system(scheme)
    if fam == "toy":
        return toy_spec()
    return None


def _family(family) -> str:
    name = family.value if isinstance(family, SpecialPrimeFamily) else str(family).lower()
    if name not in {f.value for f in SpecialPrimeFamily} | {"toy"}:
        raise DomainError(f"unknown family {family!r}")
    return name


ORACLES = {
    "mersenne": mersenne_count_oracle,
    "fermat": fermat_count_oracle,
    "twin": twin_count_oracle,
    "sophie": sg_count_oracle,
}


def _digits(x) -> int:
    return len(gmpy2.mpz(x).digits())


def power_digits(base: int, exponent: int, mult: int = 1, add: int = 0,
                 exact_limit: int = 200_000) -> int:
    """Decimal digits of mult * base^exponent + add.

    Large values go through high-precision logarithms; ``add`` is assumed
    too small to carry into a new digit there.
    """
    if exponent < 0 or base < 1 or mult < 1 or add < 0:
        raise DomainError("need base, mult >= 1 and exponent, add >= 0")
    if exponent * base.bit_length() < exact_limit:
        return _digits(mult * gmpy2.mpz(base) ** exponent + add)
    prec = len(str(exponent)) + 40
    with localcontext() as ctx:
        ctx.prec = prec
        lg = Decimal(mult).log10() + Decimal(exponent) * Decimal(base).log10()
        whole = int(lg)
        if lg - whole > 1 - Decimal(10) ** (-(prec - len(str(exponent)) - 10)):
            raise InvariantViolation("digit count too close to a power of ten")
    return whole + 1


def _t_exponent(fam: str, n: int):
    """(base, exponent) with t(n) = base^exponent for the closed-form families."""
    if fam == "mersenne":
        return 11, 1 << (2 * n + 1)
    if fam == "fermat":
        return 12, 3 * n + 3
    return None


@dataclass
class CountReport:
    family: str
    n: int
    count: int | None
    oracle: int | None
    symbolic: dict | None = None

    def to_json(self):
        return {"family": self.family, "n": self.n, "count": self.count,
                "oracle": self.oracle, "symbolic": self.symbolic}


def count_via_term(family, n: int, bit_budget: int | None = None,
                   scheme: FactorialScheme = FactorialScheme.POW8SQ) -> CountReport:
    """The counting term at n, or a quantitative account of why it is out of reach."""
    fam = _family(family)
    if n < 0:
        raise DomainError("n >= 0")
    oracle = None
    if fam in ORACLES:
        try:
            oracle = ORACLES[fam](n)
        except BudgetExceeded:
            oracle = None
    spec = family_spec(fam, scheme)
    if spec is None:
        return CountReport(fam, n, None, oracle, {"reason": "no counting system for this family"})
    limit = _bit_budget(bit_budget)
    k = spec.k_vars
    closed = _t_exponent(fam, n)
    t = w = None
    if closed is None:
        try:
            t = spec.t(n, limit)
            w = spec.w(n, limit)
        except (BudgetExceeded, OverflowError, MemoryError):
            pass
    if t is not None and m_bits(k, t, w) <= limit:
        poly = expand_squares(spec.system).substitute({"n": n}) if spec.system.params \
            else expand_squares(spec.system)
        count = count_solutions(CountingInstance(poly, t, w), limit) + spec.offset
        return CountReport(fam, n, count, oracle)

    sym = {
        "unknowns": k,
        "squares": len(spec.system.squares),
        "monomials_raw": raw_monomial_count(spec.system),
        "monomials": len(expand_squares(spec.system).monomials),
        "profile": m_profile(expand_squares(spec.system)).to_json(),
        "offset": spec.offset,
        "t_term_nodes": metrics(spec.t_of_n).node_count,
        "w_term_nodes": metrics(spec.w_of_n).node_count,
    }
    if closed is not None:
        base, e = closed
        lw = spec.w_bound.alpha
        sym["t_digits"] = power_digits(base, e)
        sym["w_digits"] = power_digits(base, e, lw, spec.w_bound.beta)
        with localcontext() as ctx:
            ctx.prec = 60
            log_t = Decimal(e) * Decimal(base).log10()
            # log10(2w) = log10(2) + log_t + log10(alpha + beta / t)
            ratio = Decimal(lw)
            if log_t < 60:
                ratio += Decimal(spec.w_bound.beta) / Decimal(10) ** log_t
            log_bits = Decimal(2).log10() + ratio.log10() + log_t + Decimal(k) * log_t
        sym["log10_M_bits"] = float(log_bits)
    elif t is not None:
        sym["t_digits"] = _digits(t)
        sym["w_digits"] = _digits(w)
        sym["log10_M_bits"] = math.log10(2 * w) + k * math.log10(t)
    else:
        sym["t_digits"] = None
        sym["w_digits"] = None
        sym["log10_M_bits"] = None
        sym["note"] = "t(n) itself exceeds the bit budget"
    return CountReport(fam, n, None, oracle, sym)


def residuals(spec: CountingSpec, w: Witness) -> list:
    return square_residuals(spec.system, w.assignment())

"""Counting lattice zeros of an exponential polynomial through one big integer.

For f >= 0 on the cube [0, t-1]^k and f < 2^w there, the number

    M = sum over a of 2^(2w * beta(a)) * delta(f(a), w),
    beta(a) = a_1 + a_2 t + ... + a_k t^(k-1),

concatenates one 2w-bit block per lattice point.  A block has w ones when
f(a) != 0 and 2w ones when f(a) = 0, so the zero count is HW(M)/w - t^k.
M also has a closed form: a constant part C_k(c0, t, w) plus, for every
non-constant monomial c * prod v_i^x_i x_i^r_i,

    -(2^w - 1) * c * prod_i S_{r_i}(2^(2w t^(i-1)) * v_i, t),

where S_r(q, t) = sum_{j<t} j^r q^j.  Both routes are implemented; the
direct sum serves as the test oracle for the closed form.
"""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass

import gmpy2

from .config import bit_budget as _bit_budget
from .errors import BudgetExceeded, DomainError, InvariantViolation, show_int
from .expdio import (ExpPolynomial, SquareSystem, brute_count, choose_w,
                     eval_poly, expand_squares, monomial)
from .formulas import hw_via_term  # noqa: F401  (re-exported)


def popcount(n: int) -> int:
    if n < 0:
        raise DomainError("popcount of a negative number")
    return int(gmpy2.popcount(n))


def delta(a: int, b: int) -> int:
    """(2^b - 1)(2^b - a + 1) for 0 <= a < 2^b."""
    if b < 1:
        raise DomainError("block width must be positive")
    if not 0 <= a < (1 << b):
        raise DomainError(f"delta needs 0 <= a < 2^{b}, got {a}")
    return ((1 << b) - 1) * ((1 << b) - a + 1)


def _faulhaber(r: int, t: int) -> int:
    n = t - 1
    if r == 0:
        return t
    if r == 1:
        return n * (n + 1) // 2
    if r == 2:
        return n * (n + 1) * (2 * n + 1) // 6
    return sum(j ** r for j in range(t))


def geo_sum(r: int, q: int, t: int) -> int:
    """S_r(q, t) = sum_{j=0}^{t-1} j^r q^j."""
    if r < 0 or q < 1 or t < 0:
        raise DomainError("geo_sum needs r >= 0, q >= 1, t >= 0")
    if t == 0:
        return 0
    if q == 1:
        return _faulhaber(r, t)
    if r > 2:
        return geo_sum_direct(r, q, t)
    q = gmpy2.mpz(q)
    qt = q ** t
    d = q - 1
    if r == 0:
        return int(gmpy2.divexact(qt - 1, d))
    if r == 1:
        return int(gmpy2.divexact(q - t * qt + (t - 1) * qt * q, d * d))
    # r == 2, written over (q - 1)^3 to keep the divisor positive
    num = q * (1 + q - t * t * (qt // q) + (2 * t * t - 2 * t - 1) * qt - (t - 1) ** 2 * qt * q)
    return int(gmpy2.divexact(-num, d * d * d))


def geo_sum_direct(r: int, q: int, t: int) -> int:
    return sum(j ** r * q ** j for j in range(t))


@dataclass(frozen=True)
class CountingInstance:
    poly: ExpPolynomial
    t: int
    w: int

    def to_json(self):
        obj = self.poly.to_json()
        obj["t"] = str(self.t)
        obj["w"] = str(self.w)
        return obj

    @classmethod
    def from_json(cls, obj):
        t = int(obj["t"])
        poly = ExpPolynomial.from_json(obj)
        w = int(obj["w"]) if "w" in obj else choose_w(poly, t)
        return cls(poly, t, w)


def _check_instance(poly, t, w):
    if poly.params:
        raise DomainError(f"parameters {list(poly.params)} must be substituted first")
    if t < 1 or w < 1:
        raise DomainError("t and w must be positive")


def m_bits(k: int, t: int, w: int) -> int:
    """Bit size of the concatenation number."""
    return 2 * w * t ** k


def constant_block(c0: int, k: int, t: int, w: int) -> int:
    """C_k(c0, t, w) = (2^w - c0 + 1)(2^(2w t^k) - 1) / (2^w + 1)."""
    one = gmpy2.mpz(1)
    num = ((one << w) - c0 + 1) * ((one << (2 * w * t ** k)) - 1)
    den = (one << w) + 1
    q, rem = gmpy2.f_divmod(num, den)
    if rem:
        raise InvariantViolation("constant block division is not exact")
    return q


def monomial_block(m, unknowns, t: int, w: int):
    """-(2^w - 1) * c * prod_i S_{r_i}(2^(2w t^(i-1)) v_i, t)."""
    prod = gmpy2.mpz(-((1 << w) - 1) * m.coeff)
    for i, name in enumerate(unknowns):
        v, r = m.factor(name)
        q = (gmpy2.mpz(1) << (2 * w * t ** i)) * v
        prod *= geo_sum(r, q, t)
    return prod


def build_M(ci: CountingInstance, bit_budget: int | None = None) -> int:
    poly, t, w = ci.poly, ci.t, ci.w
    _check_instance(poly, t, w)
    size = m_bits(poly.k, t, w)
    limit = _bit_budget(bit_budget)
    if size > limit:
        raise BudgetExceeded(f"M needs {show_int(size)} bits, budget is {limit}")
    c0 = poly.constant_term()
    if not 0 <= c0 < (1 << w):
        raise DomainError(f"f(0) = {c0} is outside [0, 2^{w})")
    total = constant_block(c0, poly.k, t, w)
    for m in poly.monomials:
        if not m.is_constant():
            total += monomial_block(m, poly.unknowns, t, w)
    if total < 0:
        raise InvariantViolation("M came out negative; f leaves [0, 2^w)")
    return int(total)


def build_M_direct(ci: CountingInstance, bit_budget: int | None = None) -> int:
    """The defining sum over all lattice points; the oracle for build_M."""
    poly, t, w = ci.poly, ci.t, ci.w
    _check_instance(poly, t, w)
    size = m_bits(poly.k, t, w)
    if size > _bit_budget(bit_budget):
        raise BudgetExceeded(f"M needs {show_int(size)} bits")
    total = gmpy2.mpz(0)
    for point in itertools.product(range(t), repeat=poly.k):
        beta = sum(x * t ** i for i, x in enumerate(point))
        f = eval_poly(poly, dict(zip(poly.unknowns, point)))
        total += delta(f, w) << (2 * w * beta)
    return int(total)


def count_from_M(M: int, k: int, t: int, w: int) -> int:
    q, rem = divmod(popcount(M), w)
    if rem:
        raise InvariantViolation(f"HW(M) is not a multiple of w = {w}")
    return q - t ** k


def count_solutions(ci: CountingInstance, bit_budget: int | None = None) -> int:
    """Zeros of f in [0, t-1]^k read off the Hamming weight of M."""
    M = build_M(ci, bit_budget)
    return count_from_M(M, ci.poly.k, ci.t, ci.w)


def auto_instance(poly: ExpPolynomial, t: int) -> CountingInstance:
    return CountingInstance(poly, t, choose_w(poly, t))


@dataclass(frozen=True)
class MProfile:
    """Non-constant monomials grouped by their nonzero powers r_i."""

    groups: dict      # sorted tuple of nonzero r values -> count
    constants: int    # monomials without any unknown
    k: int

    @property
    def total(self) -> int:
        return sum(self.groups.values())

    @staticmethod
    def label(key) -> str:
        if not key:
            return "G0 only"
        c = Counter(key)
        return " * ".join(f"{n} x G{r}" for r, n in sorted(c.items(), reverse=True))

    def with_constants(self) -> dict:
        """Counting the constant monomials as G0-only products."""
        out = dict(self.groups)
        if self.constants:
            out[()] = out.get((), 0) + self.constants
        return out

    def to_json(self):
        return {"k": self.k, "constants": self.constants, "total": self.total,
                "groups": {self.label(g): n for g, n in sorted(self.groups.items())}}


def m_profile(p: ExpPolynomial) -> MProfile:
    groups = Counter()
    constants = 0
    unknowns = set(p.unknowns)
    for m in p.monomials:
        facs = [(n, v, r) for n, v, r in m.factors if n in unknowns]
        if not facs:
            constants += 1
            continue
        groups[tuple(sorted((r for _, _, r in facs if r), reverse=True))] += 1
    return MProfile(dict(groups), constants, p.k)


# ---------------------------------------------------------------------------
# random instances for cross-checking

def random_square_poly(rng: random.Random, k: int, squares: int = 2, terms: int = 2,
                       coeff_range=(-4, 4), bases=(1, 2, 3), max_r: int = 2) -> ExpPolynomial:
    """A sum of squares of random signed monomial sums (so f >= 0)."""
    names = [f"x{i}" for i in range(1, k + 1)]
    sq = []
    for _ in range(squares):
        left, right = [], []
        for _ in range(rng.randint(1, terms)):
            c = rng.randint(*coeff_range)
            if c == 0:
                continue
            facs = {n: (rng.choice(bases), rng.randint(0, max_r)) for n in names
                    if rng.random() < 0.6}
            m = monomial(abs(c), facs)
            (left if c > 0 else right).append(m)
        sq.append((left, right))
    return expand_squares(SquareSystem.build(sq, names))


def random_instance(rng: random.Random, k_max: int = 3, t_max: int = 5) -> CountingInstance:
    k = rng.randint(1, k_max)
    t = rng.randint(1, t_max)
    poly = random_square_poly(rng, k)
    return auto_instance(poly, t)


def cross_check(ci: CountingInstance) -> tuple:
    """(closed-form count, enumeration count)"""
    return count_solutions(ci), brute_count(ci.poly, ci.t)

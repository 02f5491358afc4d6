"""Value-level evaluation of the closed-form term identities.

Each function evaluates one closed form exactly with big integers, in the
way the term itself prescribes, without falling back on the function it
represents.  Where a literal evaluation would need an astronomically large
intermediate, an exact reduction of the same expression is used instead
(modular windows for the binomial, the cyclic structure of ``5^E mod D``
for gcd, sparse binary arithmetic for the 2-adic valuation).
"""
from __future__ import annotations

import math

import gmpy2

from .errors import BudgetExceeded, DomainError, show_int
from .sparse import SparseInt
from .terms import FactorialScheme

# largest power-of-two exponent materialised directly
LITERAL_BITS = 1 << 22


def marchenkov_pow_value(a: int, b: int) -> int:
    """a^b through 2^((ab+a+1)b) mod (2^(ab+a+1) - a)."""
    if a < 0 or b < 0:
        raise DomainError("arguments must be natural numbers")
    x = a * b + a + 1
    mod = (1 << x) - a
    if mod == 0:
        raise DomainError("modulus vanishes")
    if x * b <= LITERAL_BITS:
        return int(gmpy2.mpz(1) << (x * b)) % mod
    return int(gmpy2.powmod(2, x * b, mod))


def binom_formula(a: int, b: int, width: int | None = None) -> int:
    """floor((2^s+1)^a / 2^(s*b)) mod 2^s, with s = a by default.

    Only the window of bits [s*b, s*(b+1)) of (2^s+1)^a matters, so the power
    is taken modulo 2^(s*(b+1)).  With s = a the identity needs a >= 1;
    s = a+1 also covers a = 0.
    """
    if a < 0 or b < 0:
        raise DomainError("arguments must be natural numbers")
    s = a if width is None else width
    if s == 0:
        # 2^0 = 1, everything is 0 mod 1
        return 0
    mod_bits = s * (b + 1)
    if mod_bits > LITERAL_BITS * 8:
        raise BudgetExceeded(f"binomial window needs {show_int(mod_bits)} bits")
    base = (gmpy2.mpz(1) << s) + 1
    window = gmpy2.powmod(base, a, gmpy2.mpz(1) << mod_bits)
    return int(window >> (s * b))


def binom_formula_literal(a: int, b: int, width: int | None = None) -> int:
    """The same identity evaluated without any modular shortcut."""
    s = a if width is None else width
    if s * a > LITERAL_BITS:
        raise BudgetExceeded("literal binomial power too large")
    base = (gmpy2.mpz(1) << s) + 1
    return int((base ** a >> (s * b)) % (gmpy2.mpz(1) << s))


def _gcd_parts(a, b):
    ab = a * b
    return ab * (ab + a + b), a * a * b, a * b * b, ab


def gcd_formula(a: int, b: int) -> int:
    """(floor(5^E / ((5^A-1)(5^B-1))) mod 5^(ab)) - 1 for a, b >= 1.

    E = ab(ab+a+b), A = a^2 b, B = a b^2.  The remainder r = 5^E mod D is
    assembled from 5^E = 5^e1 * (5^A)^m, and the quotient modulo 5^(ab)
    then follows from q*D = 5^E - r, since 5^(ab) divides 5^E.
    """
    if a < 1 or b < 1:
        raise DomainError("gcd formula needs a, b >= 1")
    e, ea, eb, ab = _gcd_parts(a, b)
    fa = gmpy2.mpz(5) ** ea - 1
    fb = gmpy2.mpz(5) ** eb - 1
    d = fa * fb
    m, e1 = divmod(e, ea)
    inner = gmpy2.mpz(0)
    for i in range(m):
        inner += gmpy2.mpz(5) ** ((e1 + i * ea) % eb)
    r = (gmpy2.mpz(5) ** e1 + fa * inner) % d
    mod = gmpy2.mpz(5) ** ab
    q = (-r * gmpy2.invert(d % mod, mod)) % mod
    return int(q) - 1


def gcd_formula_literal(a: int, b: int) -> int:
    """Direct evaluation of the gcd closed form with full-size integers."""
    if a < 1 or b < 1:
        raise DomainError("gcd formula needs a, b >= 1")
    e, ea, eb, ab = _gcd_parts(a, b)
    five = gmpy2.mpz(5)
    d = (five ** ea - 1) * (five ** eb - 1)
    return int((five ** e // d) % five ** ab) - 1


def _semantic_gcd_with_pow2(n: int) -> int:
    """gcd(n, 2^n), using gcd(n, 2^j) = gcd(n, 2^n) for bitlen(n) <= j <= n."""
    return int(gmpy2.gcd(n, gmpy2.mpz(1) << n.bit_length()))


def nu2_formula(n: int) -> int:
    """floor((gcd(n, 2^n)^(n+1) mod (2^(n+1)-1)^2) / (2^(n+1)-1)) for n >= 1."""
    if n < 1:
        raise DomainError("nu2 is undefined at 0")
    g = _semantic_gcd_with_pow2(n)
    L = n + 1
    if g.bit_length() * L <= LITERAL_BITS:
        m = (gmpy2.mpz(1) << L) - 1
        return int((gmpy2.mpz(g) ** L % (m * m)) // m)
    # g divides 2^n, so it is a power of two and g^(n+1) is a single bit
    if g & (g - 1):
        raise DomainError("gcd(n, 2^n) is not a power of two")
    top = SparseInt.pow2((g.bit_length() - 1) * L)
    # x mod m^2 = r2*m + r1 where x = q1*m + r1 and q1 = q2*m + r2
    q1, r1 = top.divmod_pow2_minus(L, 1)
    _, r2 = q1.divmod_pow2_minus(L, 1)
    # floor((r2*m + r1) / m) = r2 because 0 <= r1 < m
    return int(r2.normalize())


def nu2_formula_literal(n: int) -> int:
    """Literal evaluation, 2^n included; tiny n only."""
    if n < 1:
        raise DomainError("nu2 is undefined at 0")
    if n > 1 << 16:
        raise BudgetExceeded("literal nu2 needs 2^n")
    g = math.gcd(n, 1 << n)
    m = (1 << (n + 1)) - 1
    return (g ** (n + 1) % (m * m)) // m


# binomial windows above this size fall back to math.comb
HW_WINDOW_BITS = 1 << 16


def central_binomial(n: int) -> int:
    """C(2n, n) by the binomial closed form when the window is small."""
    a, b = 2 * n, n
    if a * (b + 1) <= HW_WINDOW_BITS:
        return binom_formula(a, b)
    return int(gmpy2.comb(a, b))


def hw_via_term(n: int) -> int:
    """Hamming weight of n as nu2(C(2n, n)), through the closed forms."""
    if n < 1:
        raise DomainError("hw_via_term needs n >= 1")
    return nu2_formula(central_binomial(n))


def min_formula(a: int, b: int) -> int:
    return ((a + b) - abs(a - b)) // 2


def factorial_formula(n: int, scheme: FactorialScheme = FactorialScheme.POW8SQ,
                      bit_budget: int = 1 << 26) -> int:
    """floor(r^n / C(r, n)) with r = r(n)."""
    if n < 0:
        raise DomainError("negative argument")
    r = scheme.r_value(n)
    if n * r.bit_length() > bit_budget:
        raise BudgetExceeded(f"r(n)^n needs about {show_int(n * r.bit_length())} bits")
    return r ** n // math.comb(r, n)

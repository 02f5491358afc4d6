"""Exact integers of the form sum(c_i * 2**e_i) with few terms.

Witnesses of the counting systems contain values such as ``2**(2**87)`` or
quotients of those by ``2**X - a``.  They cannot be materialised, but they
have only a handful of nonzero "blocks" in binary.  :class:`SparseInt`
stores those blocks as ``{exponent: signed coefficient}`` and supports the
ring operations, exact sign/zero tests and division by ``2**X - a``.
"""
from __future__ import annotations

from functools import total_ordering

# Terms whose exponents are this close get folded into a single coefficient.
FOLD_GAP = 1 << 12
# Values below this many bits are returned as plain ints by ``normalize``.
SMALL_BITS = 1 << 16


@total_ordering
class SparseInt:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for e, c in (terms or {}).items():
            if c:
                self.terms[e] = self.terms.get(e, 0) + c
        self._fold()

    # construction ---------------------------------------------------------

    @classmethod
    def of(cls, value) -> SparseInt:
        if isinstance(value, SparseInt):
            return value
        return cls({0: int(value)}) if value else cls()

    @classmethod
    def pow2(cls, e: int, coeff: int = 1) -> SparseInt:
        if e < 0:
            raise ValueError("negative exponent")
        return cls({e: coeff})

    def _fold(self):
        items = []
        for e, c in self.terms.items():
            if c:
                # strip trailing zero bits into the exponent
                tz = (c & -c).bit_length() - 1
                items.append((e + tz, c >> tz))
        items.sort()
        out = []
        for e, c in items:
            if out and e - out[-1][0] <= FOLD_GAP:
                e0, c0 = out[-1]
                out[-1] = (e0, c0 + (c << (e - e0)))
            else:
                out.append((e, c))
        self.terms = {e: c for e, c in out if c}

    # conversion ---------------------------------------------------------

    def top_bits(self) -> int:
        """An upper bound on the bit length of |self|."""
        if not self.terms:
            return 0
        return max(e + abs(c).bit_length() for e, c in self.terms.items()) + len(self.terms).bit_length()

    def is_small(self, limit=SMALL_BITS) -> bool:
        return self.top_bits() <= limit

    def to_int(self) -> int:
        return sum(c << e for e, c in self.terms.items())

    def normalize(self, limit=SMALL_BITS):
        """Plain ``int`` when the value is small enough, else ``self``."""
        return self.to_int() if self.is_small(limit) else self

    def __int__(self):
        if not self.is_small(1 << 26):
            raise OverflowError("value too large to materialise")
        return self.to_int()

    # arithmetic ---------------------------------------------------------

    def __neg__(self):
        return SparseInt({e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        other = SparseInt.of(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return SparseInt(terms)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-SparseInt.of(other))

    def __rsub__(self, other):
        return SparseInt.of(other) - self

    def __mul__(self, other):
        other = SparseInt.of(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                terms[e1 + e2] = terms.get(e1 + e2, 0) + c1 * c2
        return SparseInt(terms)

    __rmul__ = __mul__

    def __pow__(self, r: int):
        if r < 0:
            raise ValueError("negative power")
        out = SparseInt.of(1)
        base = self
        while r:
            if r & 1:
                out = out * base
            r >>= 1
            if r:
                base = base * base
        return out

    def shift(self, k: int) -> SparseInt:
        """self * 2**k"""
        return SparseInt({e + k: c for e, c in self.terms.items()})

    # comparison ---------------------------------------------------------

    def sign(self) -> int:
        items = sorted(self.terms.items(), reverse=True)
        if not items:
            return 0
        # suffix bound: |sum of items[i:]| < 2**bound[i]
        bounds = [0] * (len(items) + 1)
        for i in range(len(items) - 1, -1, -1):
            e, c = items[i]
            bounds[i] = max(bounds[i + 1], e + abs(c).bit_length()) + 1
        acc_e, acc_c = items[0]
        for i in range(1, len(items)):
            if acc_c and acc_e + abs(acc_c).bit_length() - 1 > bounds[i]:
                break
            e, c = items[i]
            if acc_c == 0:
                acc_e, acc_c = e, c
            else:
                acc_c = (acc_c << (acc_e - e)) + c
                acc_e = e
        return (acc_c > 0) - (acc_c < 0)

    def is_zero(self) -> bool:
        return self.sign() == 0

    def __eq__(self, other):
        if not isinstance(other, (SparseInt, int)):
            return NotImplemented
        return (self - other).sign() == 0

    def __lt__(self, other):
        if not isinstance(other, (SparseInt, int)):
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self):
        raise TypeError("SparseInt is unhashable")

    def bit_length(self) -> int:
        """Exact bit length of a nonnegative value."""
        s = self.sign()
        if s < 0:
            raise ValueError("bit_length of a negative value")
        if s == 0:
            return 0
        hi = self.top_bits()
        lo = max(hi - 2 * len(self.terms).bit_length() - 4, 0)
        # smallest m with self < 2**m, searched upward from a safe lower bound
        for m in range(lo, hi + 1):
            if self < SparseInt.pow2(m):
                return m
        return hi

    def __repr__(self):
        body = " + ".join(f"{c}*2^{e}" for e, c in sorted(self.terms.items(), reverse=True))
        return f"SparseInt({body or '0'})"

    def to_json(self):
        return {"sparse": [[str(e), str(c)] for e, c in sorted(self.terms.items(), reverse=True)]}

    # division -----------------------------------------------------------

    def divmod_pow2_minus(self, x: int, a: int):
        """(q, r) with self = q*(2**x - a) + r and 0 <= r < 2**x - a.

        Requires self >= 0 and 2**x > a >= 0.  Work is proportional to the
        number of times the value shrinks by roughly 2**x / a.
        """
        if a < 0 or (x < a.bit_length()) or (x == a.bit_length() - 1):
            raise ValueError("need 2**x > a >= 0")
        if (1 << min(x, 64)) <= a and x <= 64:
            raise ValueError("need 2**x > a >= 0")
        if self.sign() < 0:
            raise ValueError("dividend must be nonnegative")
        q = SparseInt()
        v = self
        for _ in range(1 << 20):
            high = {}
            low = {}
            for e, c in v.terms.items():
                if e >= x:
                    high[e - x] = high.get(e - x, 0) + c
                elif e + abs(c).bit_length() > x:
                    hi = c >> (x - e)
                    high[0] = high.get(0, 0) + hi
                    low[e] = low.get(e, 0) + c - (hi << (x - e))
                else:
                    low[e] = low.get(e, 0) + c
            h = SparseInt(high)
            if h.is_zero():
                break
            q = q + h
            v = SparseInt(low) + h * a
        else:
            raise RuntimeError("division did not converge")
        d = SparseInt.pow2(x) - a
        while v.sign() < 0:
            v = v + d
            q = q - 1
        while v >= d:
            v = v - d
            q = q + 1
        return q, v


def as_sparse(value) -> SparseInt:
    return SparseInt.of(value)


def normalize(value):
    """Collapse small SparseInts to int; pass ints through."""
    if isinstance(value, SparseInt):
        return value.normalize()
    return value

"""Exact truncated power series and sparse marked series.

``PowerSeries`` is a univariate series in z truncated at a fixed order,
with exact rational coefficients stored as integer numerators over one
shared denominator.  Counting series therefore stay in pure big-integer
arithmetic, and multiplication packs both operands into single large
integers (Kronecker substitution) so the convolution runs through one
GMP multiply instead of a Python-level double loop.  This is what makes
truncation orders in the thousands practical.

``MarkedSeries`` is a series in z whose z^n coefficient is a sparse
polynomial in a fixed number of mark variables, used for the bivariate
and multivariate counting series.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _mpz = None

Scalar = Union[int, Fraction]

# Below this many coefficient pairs a plain double loop beats the packing
# overhead.
_SCHOOLBOOK_CUTOFF = 4096


def _bigmul(x: int, y: int) -> int:
    if _mpz is not None and (x.bit_length() + y.bit_length()) > 1 << 16:
        return int(_mpz(x) * _mpz(y))
    return x * y


def _pack(vec: Sequence[int], slot_bytes: int) -> int:
    buf = bytearray(len(vec) * slot_bytes)
    for i, v in enumerate(vec):
        if v:
            buf[i * slot_bytes:(i + 1) * slot_bytes] = v.to_bytes(slot_bytes, "little")
    return int.from_bytes(buf, "little")


def _conv_nonneg(a: Sequence[int], b: Sequence[int], n_terms: int) -> list[int]:
    """Convolution of nonnegative integer vectors via one big multiply."""
    bits_a = max(v.bit_length() for v in a)
    bits_b = max(v.bit_length() for v in b)
    slot_bits = bits_a + bits_b + (min(len(a), len(b))).bit_length() + 1
    slot_bytes = (slot_bits + 7) // 8
    prod = _bigmul(_pack(a, slot_bytes), _pack(b, slot_bytes))
    total = len(a) + len(b) - 1
    data = prod.to_bytes(total * slot_bytes, "little")
    out_len = min(n_terms, total)
    return [
        int.from_bytes(data[i * slot_bytes:(i + 1) * slot_bytes], "little")
        for i in range(out_len)
    ]


def convolve(a: Sequence[int], b: Sequence[int], n_terms: int) -> list[int]:
    """First ``n_terms`` coefficients of the product of two integer polys."""
    if not a or not b:
        return []
    if len(a) * len(b) <= _SCHOOLBOOK_CUTOFF:
        out = [0] * min(n_terms, len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if not ai or i >= n_terms:
                continue
            hi = min(len(b), n_terms - i)
            for j in range(hi):
                out[i + j] += ai * b[j]
        return out
    # Split into nonnegative parts so the packed multiply never sees signs.
    a_pos = [v if v > 0 else 0 for v in a]
    a_neg = [-v if v < 0 else 0 for v in a]
    b_pos = [v if v > 0 else 0 for v in b]
    b_neg = [-v if v < 0 else 0 for v in b]
    out_len = min(n_terms, len(a) + len(b) - 1)
    out = [0] * out_len
    for av, bv, sign in (
        (a_pos, b_pos, 1),
        (a_neg, b_neg, 1),
        (a_pos, b_neg, -1),
        (a_neg, b_pos, -1),
    ):
        if any(av) and any(bv):
            part = _conv_nonneg(av, bv, out_len)
            for i, v in enumerate(part):
                if v:
                    out[i] += sign * v
    return out


def _normalize(nums: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        den = -den
        nums = [-v for v in nums]
    if den != 1:
        g = den
        for v in nums:
            if v:
                g = gcd(g, v)
                if g == 1:
                    break
        if g > 1:
            den //= g
            nums = [v // g for v in nums]
    return tuple(nums), den


class PowerSeries:
    """Truncated series in z with exact rational coefficients.

    The truncation order is fixed at construction; arithmetic never reads
    or fabricates coefficients beyond it, so results of binary operations
    carry the smaller of the two truncations.
    """

    __slots__ = ("_num", "_den", "trunc")

    def __init__(self, coeffs: Iterable[Scalar], trunc: int | None = None):
        coeffs = list(coeffs)
        if trunc is None:
            trunc = len(coeffs) - 1
        if trunc < 0 or len(coeffs) != trunc + 1:
            raise ValueError(f"need exactly trunc+1={trunc + 1} coefficients, got {len(coeffs)}")
        if all(isinstance(c, int) for c in coeffs):
            self._num, self._den = tuple(coeffs), 1
        else:
            fracs = [Fraction(c) for c in coeffs]
            den = 1
            for f in fracs:
                den = den * f.denominator // gcd(den, f.denominator)
            self._num, self._den = tuple(f.numerator * (den // f.denominator) for f in fracs), den
        self.trunc = trunc

    @classmethod
    def _raw(cls, nums: list[int], den: int, trunc: int) -> "PowerSeries":
        obj = object.__new__(cls)
        nums = nums[:trunc + 1] + [0] * (trunc + 1 - len(nums))
        obj._num, obj._den = _normalize(nums, den)
        obj.trunc = trunc
        return obj

    @classmethod
    def zero(cls, trunc: int) -> "PowerSeries":
        return cls._raw([0] * (trunc + 1), 1, trunc)

    @classmethod
    def constant(cls, value: Scalar, trunc: int) -> "PowerSeries":
        s = cls.zero(trunc)
        return s + value

    @classmethod
    def monomial(cls, k: int, trunc: int, value: Scalar = 1) -> "PowerSeries":
        if not 0 <= k <= trunc:
            raise ValueError(f"monomial degree {k} outside truncation {trunc}")
        coeffs: list[Scalar] = [0] * (trunc + 1)
        coeffs[k] = value
        return cls(coeffs, trunc)

    # -- accessors ---------------------------------------------------------

    def coeff(self, n: int) -> Fraction:
        """Exact coefficient of z^n; errors outside the truncation."""
        if not 0 <= n <= self.trunc:
            raise IndexError(f"coefficient {n} outside truncation {self.trunc}")
        return Fraction(self._num[n], self._den)

    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, self._den) for v in self._num)

    def int_prefix(self, count: int) -> tuple[int, ...]:
        """First ``count`` coefficients, which must be integers."""
        if count - 1 > self.trunc:
            raise IndexError(f"prefix {count} outside truncation {self.trunc}")
        out = []
        for v in self._num[:count]:
            q, r = divmod(v, self._den)
            if r:
                raise ValueError("coefficient is not an integer")
            out.append(q)
        return tuple(out)

    def is_integral(self) -> bool:
        return self._den == 1

    @property
    def valuation(self) -> int:
        """Index of the first nonzero coefficient; trunc+1 if all zero."""
        for i, v in enumerate(self._num):
            if v:
                return i
        return self.trunc + 1

    # -- structural ops ----------------------------------------------------

    def cut(self, trunc: int) -> "PowerSeries":
        if trunc > self.trunc:
            raise ValueError(f"cannot extend truncation {self.trunc} to {trunc}")
        if trunc == self.trunc:
            return self
        return PowerSeries._raw(list(self._num[:trunc + 1]), self._den, trunc)

    def _extend(self, trunc: int) -> "PowerSeries":
        # Zero-pad; only valid where the series is treated as a polynomial
        # (Newton iteration), never as a claim about unknown coefficients.
        if trunc <= self.trunc:
            return self.cut(trunc)
        return PowerSeries._raw(list(self._num), self._den, trunc)

    def shift(self, k: int) -> "PowerSeries":
        """Multiply by z^k (k may be negative if the valuation allows it)."""
        if k >= 0:
            return PowerSeries._raw([0] * k + list(self._num), self._den, self.trunc + k)
        if self.valuation < -k:
            raise ValueError(f"valuation {self.valuation} too small to shift by {k}")
        return PowerSeries._raw(list(self._num[-k:]), self._den, self.trunc + k)

    def derivative(self) -> "PowerSeries":
        if self.trunc == 0:
            return PowerSeries.zero(0)
        nums = [(i + 1) * v for i, v in enumerate(self._num[1:])]
        return PowerSeries._raw(nums, self._den, self.trunc - 1)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, PowerSeries):
            t = min(self.trunc, other.trunc)
            if self._den == other._den:
                nums = [a + b for a, b in zip(self._num[:t + 1], other._num[:t + 1])]
                return PowerSeries._raw(nums, self._den, t)
            da, db = self._den, other._den
            nums = [a * db + b * da for a, b in zip(self._num[:t + 1], other._num[:t + 1])]
            return PowerSeries._raw(nums, da * db, t)
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            nums = list(self._num)
            den = self._den
            if f.denominator != den:
                scale = f.denominator
                nums = [v * scale for v in nums]
                den *= scale
                add = f.numerator * (den // f.denominator)
            else:
                add = f.numerator
            nums[0] += add
            return PowerSeries._raw(nums, den, self.trunc)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries._raw([-v for v in self._num], self._den, self.trunc)

    def __sub__(self, other):
        if isinstance(other, (PowerSeries, int, Fraction)):
            return self + (-other if isinstance(other, PowerSeries) else -Fraction(other))
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            t = min(self.trunc, other.trunc)
            nums = convolve(self._num[:t + 1], other._num[:t + 1], t + 1)
            return PowerSeries._raw(nums, self._den * other._den, t)
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            nums = [v * f.numerator for v in self._num]
            return PowerSeries._raw(nums, self._den * f.denominator, self.trunc)
        return NotImplemented

    __rmul__ = __mul__

    def square(self) -> "PowerSeries":
        return self * self

    def __pow__(self, k: int) -> "PowerSeries":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = PowerSeries.constant(1, self.trunc)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base.square()
        return result

    def inverse(self) -> "PowerSeries":
        """Multiplicative inverse; requires a nonzero constant term."""
        c0 = self.coeff(0)
        if c0 == 0:
            raise ZeroDivisionError("series has zero constant term; divide with a valuation shift")
        v = PowerSeries([1 / c0])
        while v.trunc < self.trunc:
            t = min(2 * v.trunc + 1, self.trunc)
            ve = v._extend(t)
            v = ve * (PowerSeries.constant(2, t) - self.cut(t) * ve)
        return v

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            if f == 0:
                raise ZeroDivisionError("division by zero scalar")
            return self * (1 / f)
        if isinstance(other, PowerSeries):
            vb = other.valuation
            if vb > other.trunc:
                raise ZeroDivisionError("division by zero series")
            if vb == 0:
                t = min(self.trunc, other.trunc)
                return self.cut(t) * other.cut(t).inverse()
            # Explicit valuation cancellation: both sides divided by z^vb.
            if self.valuation < vb:
                raise ValueError(
                    f"numerator valuation {self.valuation} below denominator valuation {vb}"
                )
            t = min(self.trunc, other.trunc) - vb
            return self.shift(-vb).cut(t) * other.shift(-vb).cut(t).inverse()
        return NotImplemented

    # -- evaluation and comparison ------------------------------------------

    def evaluate(self, x: Scalar) -> Fraction:
        """Exact value of the truncated polynomial at a rational point."""
        x = Fraction(x)
        acc = Fraction(0)
        for v in reversed(self._num):
            acc = acc * x + v
        return acc / self._den

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return (self.trunc, self._den, self._num) == (other.trunc, other._den, other._num)

    def __hash__(self):
        return hash((self.trunc, self._den, self._num))

    def agrees_with(self, other: "PowerSeries", upto: int | None = None) -> bool:
        """Coefficientwise equality up to the smaller truncation."""
        t = min(self.trunc, other.trunc)
        if upto is not None:
            t = min(t, upto)
        return all(self.coeff(n) == other.coeff(n) for n in range(t + 1))

    def __repr__(self):
        head = ", ".join(str(self.coeff(n)) for n in range(min(6, self.trunc + 1)))
        tail = ", ..." if self.trunc >= 6 else ""
        return f"PowerSeries(trunc={self.trunc}, [{head}{tail}])"

    def dump_csv(self) -> str:
        """CSV dump: ``n,value`` for integral series, ``n,num,den`` otherwise."""
        lines = []
        if self.is_integral():
            lines.append("n,coefficient")
            lines.extend(f"{n},{v}" for n, v in enumerate(self._num))
        else:
            lines.append("n,numerator,denominator")
            for n in range(self.trunc + 1):
                c = self.coeff(n)
                lines.append(f"{n},{c.numerator},{c.denominator}")
        return "\n".join(lines) + "\n"


Monomial = tuple[int, ...]
Poly = dict[Monomial, Scalar]


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            key = tuple(x + y for x, y in zip(ka, kb))
            val = out.get(key, 0) + va * vb
            if val:
                out[key] = val
            elif key in out:
                del out[key]
    return out


def _poly_add_into(acc: Poly, other: Poly, scale: Scalar = 1) -> None:
    for k, v in other.items():
        val = acc.get(k, 0) + v * scale
        if val:
            acc[k] = val
        elif k in acc:
            del acc[k]


class MarkedSeries:
    """Truncated series in z whose coefficients are sparse mark polynomials.

    Coefficient ``coeffs[n]`` maps an exponent tuple (one entry per mark
    variable) to an exact value.  Setting every mark to 1 recovers an
    ordinary counting series.
    """

    __slots__ = ("coeffs", "trunc", "nvars")

    def __init__(self, coeffs: Sequence[Poly], nvars: int, trunc: int | None = None):
        if trunc is None:
            trunc = len(coeffs) - 1
        if len(coeffs) != trunc + 1:
            raise ValueError("need exactly trunc+1 coefficient polynomials")
        self.coeffs = tuple(dict(c) for c in coeffs)
        self.nvars = nvars
        self.trunc = trunc

    @classmethod
    def constant(cls, value: Scalar, nvars: int, trunc: int) -> "MarkedSeries":
        zero_key = (0,) * nvars
        polys: list[Poly] = [{} for _ in range(trunc + 1)]
        if value:
            polys[0][zero_key] = value
        return cls(polys, nvars, trunc)

    @classmethod
    def from_power_series(cls, ps: PowerSeries, nvars: int) -> "MarkedSeries":
        zero_key = (0,) * nvars
        polys: list[Poly] = []
        for n in range(ps.trunc + 1):
            c = ps.coeff(n)
            if c.denominator == 1:
                c = c.numerator
            polys.append({zero_key: c} if c else {})
        return cls(polys, nvars, ps.trunc)

    def coeff(self, n: int, exponents: Monomial) -> Scalar:
        if not 0 <= n <= self.trunc:
            raise IndexError(f"coefficient {n} outside truncation {self.trunc}")
        if len(exponents) != self.nvars:
            raise ValueError(f"expected {self.nvars} exponents")
        return self.coeffs[n].get(tuple(exponents), 0)

    def __add__(self, other):
        if isinstance(other, MarkedSeries):
            if other.nvars != self.nvars:
                raise ValueError("mark variable counts differ")
            t = min(self.trunc, other.trunc)
            polys = [dict(self.coeffs[n]) for n in range(t + 1)]
            for n in range(t + 1):
                _poly_add_into(polys[n], other.coeffs[n])
            return MarkedSeries(polys, self.nvars, t)
        if isinstance(other, (int, Fraction)):
            polys = [dict(c) for c in self.coeffs]
            _poly_add_into(polys[0], {(0,) * self.nvars: other})
            return MarkedSeries(polys, self.nvars, self.trunc)
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, MarkedSeries):
            if other.nvars != self.nvars:
                raise ValueError("mark variable counts differ")
            t = min(self.trunc, other.trunc)
            polys: list[Poly] = [{} for _ in range(t + 1)]
            for i in range(t + 1):
                a = self.coeffs[i]
                if not a:
                    continue
                for j in range(t + 1 - i):
                    b = other.coeffs[j]
                    if b:
                        _poly_add_into(polys[i + j], _poly_mul(a, b))
            return MarkedSeries(polys, self.nvars, t)
        if isinstance(other, (int, Fraction)):
            polys = []
            for c in self.coeffs:
                scaled: Poly = {}
                _poly_add_into(scaled, c, other)
                polys.append(scaled)
            return MarkedSeries(polys, self.nvars, self.trunc)
        return NotImplemented

    __rmul__ = __mul__

    def mul_monomial(self, z_shift: int = 0, mark_exponents: Monomial | None = None,
                     value: Scalar = 1) -> "MarkedSeries":
        """Multiply by value * z^z_shift * (product of marks)."""
        marks = mark_exponents or (0,) * self.nvars
        polys: list[Poly] = [{} for _ in range(self.trunc + 1)]
        for n in range(self.trunc + 1 - z_shift):
            for key, v in self.coeffs[n].items():
                nk = tuple(x + e for x, e in zip(key, marks))
                polys[n + z_shift][nk] = v * value
        return MarkedSeries(polys, self.nvars, self.trunc)

    def at_ones(self) -> PowerSeries:
        """Substitute 1 for every mark variable."""
        return PowerSeries([sum(c.values()) if c else 0 for c in self.coeffs], self.trunc)

    def mark_moment(self, var: int) -> PowerSeries:
        """Partial derivative in mark ``var`` evaluated at all marks = 1."""
        vals: list[Scalar] = []
        for c in self.coeffs:
            vals.append(sum(key[var] * v for key, v in c.items()) if c else 0)
        return PowerSeries(vals, self.trunc)

    def reindexed(self, nvars: int, positions: Sequence[int]) -> "MarkedSeries":
        """Embed into a larger variable set; ``positions[i]`` is the new slot."""
        polys: list[Poly] = []
        for c in self.coeffs:
            nc: Poly = {}
            for key, v in c.items():
                nk = [0] * nvars
                for old, pos in enumerate(positions):
                    nk[pos] += key[old]
                nc[tuple(nk)] = v
            polys.append(nc)
        return MarkedSeries(polys, nvars, self.trunc)

    def substituted(self, images: Sequence[Monomial], z_to_mark: int | None = None) -> "MarkedSeries":
        """Map each mark variable to a product of marks; optionally z -> z*mark.

        ``images[i]`` lists the target variable indices that receive old
        variable i's exponent (empty tuple sets that variable to 1).  With
        ``z_to_mark=j`` the coefficient of z^n additionally gains mark j
        raised to the n-th power.
        """
        if len(images) != self.nvars:
            raise ValueError("need one image per mark variable")
        polys: list[Poly] = []
        for n, c in enumerate(self.coeffs):
            nc: Poly = {}
            for key, v in c.items():
                nk = [0] * self.nvars
                for old, exp in enumerate(key):
                    if exp:
                        for pos in images[old]:
                            nk[pos] += exp
                if z_to_mark is not None:
                    nk[z_to_mark] += n
                _poly_add_into(nc, {tuple(nk): v})
            polys.append(nc)
        return MarkedSeries(polys, self.nvars, self.trunc)

    def geometric(self) -> "MarkedSeries":
        """Return 1/(1 - self); requires valuation >= 1 in z."""
        if self.coeffs[0]:
            raise ValueError("geometric inverse needs z-valuation >= 1")
        polys: list[Poly] = [{(0,) * self.nvars: 1}]
        for n in range(1, self.trunc + 1):
            acc: Poly = {}
            for i in range(1, n + 1):
                a = self.coeffs[i]
                if a and polys[n - i]:
                    _poly_add_into(acc, _poly_mul(a, polys[n - i]))
            polys.append(acc)
        return MarkedSeries(polys, self.nvars, self.trunc)

    def __eq__(self, other):
        if not isinstance(other, MarkedSeries):
            return NotImplemented
        if (self.nvars, self.trunc) != (other.nvars, other.trunc):
            return False
        return all(
            {k: Fraction(v) for k, v in a.items()} == {k: Fraction(v) for k, v in b.items()}
            for a, b in zip(self.coeffs, other.coeffs)
        )

    def __repr__(self):
        return f"MarkedSeries(nvars={self.nvars}, trunc={self.trunc})"

    def dump_lines(self) -> str:
        """One line per monomial: ``n; k1,k2,..; value``, sorted."""
        lines = []
        for n, c in enumerate(self.coeffs):
            for key in sorted(c):
                lines.append(f"{n}; {','.join(map(str, key))}; {c[key]}")
        return "\n".join(lines) + "\n"

"""Arithmetic of the exact series types, cross-checked against plain loops."""

import random
from fractions import Fraction

import pytest

from ransdist.series import MarkedSeries, PowerSeries, convolve


def naive_conv(a, b, n_terms):
    out = [0] * min(n_terms, len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            if i + j < len(out):
                out[i + j] += ai * bj
    return out


def test_convolve_matches_naive_small_and_packed():
    rng = random.Random(1)
    for trial in range(30):
        la, lb = rng.randrange(1, 90), rng.randrange(1, 90)
        bits = rng.choice((8, 64, 900))
        a = [rng.randrange(-(1 << bits), 1 << bits) for _ in range(la)]
        b = [rng.randrange(-(1 << bits), 1 << bits) for _ in range(lb)]
        n = rng.randrange(1, la + lb + 3)
        assert convolve(a, b, n) == naive_conv(a, b, n)


def test_convolve_forces_packed_path():
    # large enough that the Kronecker path is taken regardless of cutoff
    rng = random.Random(2)
    a = [rng.randrange(-(1 << 200), 1 << 200) for _ in range(120)]
    b = [rng.randrange(0, 1 << 200) for _ in range(130)]
    assert convolve(a, b, 260) == naive_conv(a, b, 260)


def test_constructor_validation():
    with pytest.raises(ValueError):
        PowerSeries([1, 2], trunc=5)
    s = PowerSeries([1, Fraction(1, 2), 3])
    assert s.coeff(1) == Fraction(1, 2)
    assert not s.is_integral()


def test_coeff_out_of_range():
    s = PowerSeries([1, 2, 3])
    with pytest.raises(IndexError):
        s.coeff(3)
    with pytest.raises(IndexError):
        s.int_prefix(5)


def test_add_mul_scalar_and_truncation_rules():
    a = PowerSeries([1, 2, 3, 4])
    b = PowerSeries([5, 6, 7])
    assert (a + b).trunc == 2
    assert (a * b).int_prefix(3) == (5, 16, 34)
    assert (3 * a).int_prefix(4) == (3, 6, 9, 12)
    assert (a - a).valuation == 4
    half = a * Fraction(1, 2)
    assert half.coeff(1) == 1
    assert half.coeff(0) == Fraction(1, 2)


def test_geometric_series_inverse():
    n = 40
    one_minus_z = PowerSeries.constant(1, n) - PowerSeries.monomial(1, n)
    geo = one_minus_z.inverse()
    assert geo.int_prefix(n + 1) == tuple([1] * (n + 1))
    assert (geo * one_minus_z).int_prefix(n + 1) == tuple([1] + [0] * n)


def test_inverse_rational_constant_term():
    s = PowerSeries([2, 1, 1], trunc=2)
    inv = s.inverse()
    assert (s * inv).coeffs() == (1, 0, 0)
    with pytest.raises(ZeroDivisionError):
        PowerSeries([0, 1]).inverse()


def test_division_with_valuation_shift():
    # (z^2 + z^3) / (z + z^2) = z exactly; truncation drops by one
    num = PowerSeries([0, 0, 1, 1], trunc=3)
    den = PowerSeries([0, 1, 1, 0], trunc=3)
    q = num / den
    assert q.trunc == 2
    assert q.int_prefix(3) == (0, 1, 0)
    with pytest.raises(ValueError):
        PowerSeries([1, 0]) / PowerSeries([0, 1])


def test_pow_and_square():
    a = PowerSeries([1, 1, 0, 0, 0])
    assert (a ** 4).int_prefix(5) == (1, 4, 6, 4, 1)
    assert a.square() == a * a
    with pytest.raises(ValueError):
        a ** -1


def test_shift_and_derivative():
    a = PowerSeries([1, 2, 3])
    up = a.shift(2)
    assert up.trunc == 4 and up.int_prefix(5) == (0, 0, 1, 2, 3)
    assert up.shift(-2) == a
    with pytest.raises(ValueError):
        a.shift(-1)
    assert a.derivative().int_prefix(2) == (2, 6)


def test_evaluate_horner():
    a = PowerSeries([1, 2, 3])
    x = Fraction(1, 2)
    assert a.evaluate(x) == 1 + 2 * x + 3 * x * x


def test_marked_series_roundtrip_and_moments():
    # f = 1 + z(u1 + u2^2) + z^2 * 3 u1 u2
    coeffs = [{(0, 0): 1}, {(1, 0): 1, (0, 2): 1}, {(1, 1): 3}]
    f = MarkedSeries(coeffs, nvars=2)
    assert f.at_ones().int_prefix(3) == (1, 2, 3)
    assert f.mark_moment(0).int_prefix(3) == (0, 1, 3)
    assert f.mark_moment(1).int_prefix(3) == (0, 2, 3)
    assert f.coeff(1, (0, 2)) == 1
    with pytest.raises(IndexError):
        f.coeff(5, (0, 0))


def test_marked_series_mul_matches_power_series():
    rng = random.Random(3)
    a = PowerSeries([rng.randrange(-5, 6) for _ in range(8)])
    b = PowerSeries([rng.randrange(-5, 6) for _ in range(8)])
    ma = MarkedSeries.from_power_series(a, 1)
    mb = MarkedSeries.from_power_series(b, 1)
    assert (ma * mb).at_ones() == a * b


def test_marked_substituted_and_zmark():
    # g = z * u1: substituting u1 -> u2*u3 with z contributing to u1
    g = MarkedSeries([{}, {(1, 0, 0): 1}], nvars=3)
    h = g.substituted(images=((1, 2), (0,), (1,)), z_to_mark=0)
    assert h.coeff(1, (1, 1, 1)) == 1
    dropped = g.substituted(images=((), (0,), (1,)))
    assert dropped.coeff(1, (0, 0, 0)) == 1


def test_dump_formats():
    ints = PowerSeries([1, 1, 3])
    assert ints.dump_csv() == "n,coefficient\n0,1\n1,1\n2,3\n"
    rats = PowerSeries([1, Fraction(1, 2)])
    assert rats.dump_csv() == "n,numerator,denominator\n0,1,1\n1,1,2\n"
    marked = MarkedSeries([{(0, 0): 1}, {(1, 0): 2, (0, 1): 5}], nvars=2)
    assert marked.dump_lines() == "0; 0,0; 1\n1; 0,1; 5\n1; 1,0; 2\n"


def test_marked_geometric():
    # 1/(1 - z u) = sum z^k u^k
    zu = MarkedSeries([{}, {(1,): 1}, {}, {}], nvars=1)
    geo = zu.geometric()
    for k in range(4):
        assert geo.coeff(k, (k,)) == 1
    with pytest.raises(ValueError):
        MarkedSeries([{(0,): 1}], nvars=1).geometric()

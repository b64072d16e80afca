import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from surfdetect.funcfield import INF, ONE, ZERO, RatFunc, ZeroDivision, laurent_prefix, monomial, parse, t


def series_coeffs(num, den, count):
    """Power series of num/den by the long-division recurrence (den[0] != 0)."""
    num = list(num) + [Fraction(0)] * count
    out = []
    for k in range(count):
        c = Fraction(num[k]) - sum(out[j] * den[k - j] for j in range(max(0, k - len(den) + 1), k))
        out.append(c / den[0])
    return out


def sympy_of(a: RatFunc):
    x = sympy.Symbol("t")
    return sympy.sympify(str(a).replace("^", "**"), locals={"t": x})


def test_mul_and_add_trivial():
    assert t * t == monomial(2)
    assert ONE + t == parse("1 + t")


def test_cancellation_matches_sympy():
    a = parse("(1+t)/t")
    b = parse("t/(1+t)")
    assert sympy.cancel(sympy_of(a) * sympy_of(b)) == 1
    assert a * b == ONE
    assert (a * b).num == ONE.num and (a * b).den == ONE.den


def test_valuation_examples():
    assert monomial(3).valuation() == 3
    assert ZERO.valuation() == INF
    a = parse("(t^2 + t^3)/(2 - t)")
    # oracle: first nonzero coefficient of the series of (t^2+t^3)/(2-t)
    coeffs = series_coeffs([0, 0, 1, 1], [2, -1], 6)
    first = next(k for k, c in enumerate(coeffs) if c)
    assert a.valuation() == first == 2


def test_laurent_prefix_examples():
    v, c = laurent_prefix(parse("1/(1-t)"), 2)
    assert (v, c) == (0, [1, 1, 1])
    assert laurent_prefix(monomial(2), 2) == (2, [1])
    v, c = laurent_prefix(parse("(t^2 + t^3)/(2 - t)"), 3)
    assert v == 2
    assert c == series_coeffs([0, 0, 1, 1], [2, -1], 4)[2:] == [Fraction(1, 2), Fraction(3, 4)]


def test_laurent_prefix_rejects_zero():
    with pytest.raises(ValueError):
        laurent_prefix(ZERO, 3)


def test_division_by_zero():
    with pytest.raises(ZeroDivision):
        ONE / ZERO
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


@pytest.mark.parametrize(
    "text",
    ["(t^2 + t^3)/(2 - t)", "t^-3", "-1/2", "(1 + t)^3/(t^2 - 3*t + 5)", "0", "3*t^-1 + 7"],
)
def test_parse_print_round_trip(text):
    a = parse(text)
    assert parse(str(a)) == a


# -- random elements -------------------------------------------------------------


coef = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def ratfuncs(draw, nonzero=False):
    num = draw(st.lists(coef, min_size=1, max_size=4))
    den = draw(st.lists(coef, min_size=1, max_size=3).filter(any))
    shift = draw(st.integers(-3, 3))
    a = RatFunc.from_polys(num, den) * monomial(shift)
    if nonzero and not a:
        a = monomial(shift)
    return a


@settings(max_examples=200, deadline=None)
@given(ratfuncs(), ratfuncs())
def test_valuation_axioms(a, b):
    assert (a * b).valuation() == a.valuation() + b.valuation()
    s = (a + b).valuation()
    assert s >= min(a.valuation(), b.valuation())
    if a.valuation() != b.valuation():
        assert s == min(a.valuation(), b.valuation())


def test_valuation_axioms_thousand_pairs():
    rng = random.Random(7)

    def rand():
        num = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(rng.randint(1, 4))]
        den = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(rng.randint(1, 3))]
        if not any(den):
            den = [1]
        return RatFunc.from_polys(num, den) * monomial(rng.randint(-3, 3))

    for _ in range(1000):
        a, b = rand(), rand()
        assert (a * b).valuation() == a.valuation() + b.valuation()
        vs = (a + b).valuation()
        assert vs >= min(a.valuation(), b.valuation())
        if a.valuation() != b.valuation():
            assert vs == min(a.valuation(), b.valuation())


@settings(max_examples=200, deadline=None)
@given(ratfuncs(nonzero=True), ratfuncs(nonzero=True))
def test_canonical_form_is_unique(a, b):
    c = (a * b) / b
    assert (c.shift, c.num, c.den) == (a.shift, a.num, a.den)
    d = (a + b) - b
    assert (d.shift, d.num, d.den) == (a.shift, a.num, a.den)


@settings(max_examples=150, deadline=None)
@given(ratfuncs(nonzero=True), st.integers(0, 4))
def test_laurent_prefix_consistent(a, extra):
    k = a.valuation() + extra
    v, coeffs = laurent_prefix(a, k)
    assert v == a.valuation()
    approx = ZERO
    for i, c in enumerate(coeffs):
        if c:
            approx = approx + monomial(v + i, c)
    assert (a - approx).valuation() > k

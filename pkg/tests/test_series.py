from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from zinbiel5.exactmath import GaussianRational, grat
from zinbiel5.series import (
    NonExpandable,
    PuiseuxSeries,
    Radical,
    TAdd,
    TMul,
    TNum,
    TSqrt,
    TVar,
    collect_sqrt_keys,
    evaluate_numeric,
    evaluate_scalar,
    expand_series,
    infer_ramification,
    parse_expression,
    sqrt_gaussian,
    to_text,
)

F = Fraction


def rad(x):
    return Radical.from_gaussian(grat(x))


def agree(a: PuiseuxSeries, b: PuiseuxSeries) -> bool:
    """Equality of all coefficients below the coarser truncation."""
    ram = a.ram * b.ram
    a = a.lift_to_at_least(ram)
    b = b.lift_to_at_least(ram)
    precs = [p for p in (a.prec, b.prec) if p is not None]
    bound = min(precs) if precs else None
    keys = {k for k, _ in a.coeffs} | {k for k, _ in b.coeffs}
    for k in keys:
        if bound is not None and k >= bound:
            continue
        ca = dict(a.coeffs).get(k, Radical(()))
        cb = dict(b.coeffs).get(k, Radical(()))
        if ca != cb:
            return False
    return True


# parser ----------------------------------------------------------------------


def test_parse_round_trip():
    samples = [
        "t^2+3",
        "1/(t-1)",
        "sqrt(4*t^2-5)",
        "t^(3/2)",
        "t^(-2/3)",
        "(1+i)*t - 1/2",
        "-(a+1)/(a-1)",
        "2.5*t",
    ]
    for s in samples:
        e = parse_expression(s)
        assert parse_expression(to_text(e)) == e


def test_parse_decimal_is_exact():
    e = parse_expression("0.125")
    assert e == TNum(F(1, 8))


def test_parse_power_forms():
    assert parse_expression("t^2") == parse_expression("t**2")
    assert parse_expression("t^(1/2)").exponent == F(1, 2)
    assert parse_expression("t^-1").exponent == F(-1)


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_expression("t +* 2")
    with pytest.raises(ValueError):
        parse_expression("sqrt 4")
    with pytest.raises(ValueError):
        parse_expression("t^a")


def test_ramification_inference():
    assert infer_ramification(["t^(1/2)+t^(2/3)"]) == 6
    assert infer_ramification(["t^2", "1/t"]) == 1
    with pytest.raises(NonExpandable):
        infer_ramification(["t^(1/13)"])


def test_sqrt_keys():
    keys = collect_sqrt_keys(["sqrt(4*t^2-5)+sqrt(t)", "(4*t^2-5)^(1/2)"])
    assert len(keys) == 2  # the power spelling shares the sqrt key


# radicals ---------------------------------------------------------------------


def test_radical_contraction():
    r2 = sqrt_gaussian(grat(2))
    r6 = sqrt_gaussian(grat(6))
    assert r2 * r6 == rad(2) * sqrt_gaussian(grat(3))


def test_radical_inverse_single():
    r2 = sqrt_gaussian(grat(2))
    x = rad(1) + r2
    assert x * x.inverse() == rad(1)
    assert x.inverse() == r2 - rad(1)


def test_radical_inverse_two_primes():
    r2 = sqrt_gaussian(grat(2))
    r3 = sqrt_gaussian(grat(3))
    x = r2 + r3
    assert x * x.inverse() == rad(1)
    assert x.inverse() == r3 - r2


def test_sqrt_gaussian_cases():
    assert sqrt_gaussian(grat(4)) == rad(2)
    assert sqrt_gaussian(grat(F(9, 4))) == rad(F(3, 2))
    assert sqrt_gaussian(grat(-9)) == rad(3) * GaussianRational(0, 1)
    # pure imaginary: principal sqrt of 2i is 1+i, of -2i is 1-i
    assert sqrt_gaussian(GaussianRational(0, 2)) == rad(GaussianRational(1, 1))
    assert sqrt_gaussian(GaussianRational(0, -2)) == rad(GaussianRational(1, -1))
    # full complex square: (2+i)^2 = 3+4i
    assert sqrt_gaussian(GaussianRational(3, 4)) == rad(GaussianRational(2, 1))
    with pytest.raises(NonExpandable):
        sqrt_gaussian(GaussianRational(1, 1))


def test_sqrt_of_five_adjunction():
    r5 = sqrt_gaussian(grat(5))
    assert not r5.is_gaussian
    assert r5 * r5 == rad(5)
    assert str(r5) == "(1)*sqrt(5)"


# series expansion -------------------------------------------------------------


def test_expand_polynomial():
    s = expand_series("t^2+3")
    assert s.is_exact
    assert s.coefficient(0) == rad(3)
    assert s.coefficient(2) == rad(1)
    assert s.coefficient(1) == Radical(())


def test_expand_geometric():
    s = expand_series("1/(t-1)")
    for k in range(10):
        assert s.coefficient(k) == rad(-1)
    assert s.precision() == 16


def test_expand_sqrt_principal_branch():
    # sqrt(4t^2 - 1) = i (1 - 2t^2 - 2t^4 - 4t^6 - ...)
    s = expand_series("sqrt(4*t^2-1)")
    i = GaussianRational(0, 1)
    assert s.coefficient(0) == rad(i)
    assert s.coefficient(2) == rad(-2 * i)
    assert s.coefficient(4) == rad(-2 * i)
    assert s.coefficient(6) == rad(-4 * i)


def test_expand_sqrt_adjoined_root():
    # sqrt(4t^2 - 5) = i sqrt(5) (1 - (2/5) t^2 - (2/25) t^4 - ...)
    s = expand_series("sqrt(4*t^2-5)")
    i5 = sqrt_gaussian(grat(-5))
    assert s.coefficient(0) == i5
    assert s.coefficient(2) == i5 * grat(F(-2, 5))
    assert s.coefficient(4) == i5 * grat(F(-2, 25))


def test_expand_sqrt_odd_valuation():
    s = expand_series("sqrt(t+t^2)")
    assert s.valuation() == F(1, 2)
    assert s.coefficient(F(1, 2)) == rad(1)
    assert s.coefficient(F(3, 2)) == rad(F(1, 2))
    assert agree(s * s, expand_series("t+t^2"))


def test_expand_fractional_powers():
    s = expand_series("t^(3/2)")
    assert s.is_exact and s.valuation() == F(3, 2)
    s = expand_series("t^(2/3)*t^(1/2)")
    assert s.valuation() == F(7, 6)
    with pytest.raises(NonExpandable):
        expand_series("(1+t)^(1/3)")


def test_expand_exact_monomial_inverse():
    s = expand_series("1/t^3")
    assert s.is_exact
    assert s.valuation() == -3
    assert s.coefficient(-3) == rad(1)


def test_expand_negative_powers_mix():
    s = expand_series("(t^2+t^3)/t^2")
    assert s.coefficient(0) == rad(1)
    assert s.coefficient(1) == rad(1)


def test_branch_flip():
    key = collect_sqrt_keys(["sqrt(t^2)"])[0]
    plus = expand_series("sqrt(t^2)")
    minus = expand_series("sqrt(t^2)", branch={key: -1})
    assert plus == expand_series("t")
    assert minus == expand_series("-t")


def test_division_errors():
    with pytest.raises(ZeroDivisionError):
        expand_series("1/(t-t)")
    blurred = expand_series("sqrt(1+t)") - expand_series("sqrt(1+t)")
    assert not blurred.is_exact and blurred.known_zero
    with pytest.raises(NonExpandable):
        blurred.inverse()


def test_parameter_substitution_with_series():
    # substituting a series-valued parameter composes the family
    f = expand_series("t-1")
    s = expand_series("a^2+a", params={"a": f})
    assert agree(s, expand_series("(t-1)^2+(t-1)"))
    assert s.coefficient(0) == rad(0)
    assert s.coefficient(1) == rad(-1)
    assert s.coefficient(2) == rad(1)


def test_scalar_evaluation():
    a = grat(F(1, 2))
    assert evaluate_scalar("(1+a)/(1-a)", {"a": a}) == grat(3)
    assert evaluate_scalar("sqrt(4)") == grat(2)
    assert evaluate_scalar("sqrt(2*i)") == GaussianRational(1, 1)
    assert evaluate_scalar("2^(-2)") == grat(F(1, 4))
    with pytest.raises(NonExpandable):
        evaluate_scalar("sqrt(5)")
    with pytest.raises(NonExpandable):
        evaluate_scalar("t")


def test_numeric_evaluation_matches_series():
    exprs = ["1/(t-1)", "sqrt(4*t^2-5)", "t^(3/2)*(2-t)", "(1+i)/(1+t^2)"]
    with mpmath.workdps(60):
        for text in exprs:
            s = expand_series(text)
            for tval in ("1e-3", "1e-4"):
                direct = evaluate_numeric(text, tval)
                via_series = s.numeric_at(tval)
                err = abs(direct - via_series) / max(1, abs(direct))
                assert err < mpmath.mpf("1e-10"), (text, tval)


def test_numeric_branch_flip():
    key = collect_sqrt_keys(["sqrt(4*t^2-5)"])[0]
    with mpmath.workdps(30):
        plus = evaluate_numeric("sqrt(4*t^2-5)", "0.01")
        minus = evaluate_numeric("sqrt(4*t^2-5)", "0.01", branch={key: -1})
        assert abs(plus + minus) < mpmath.mpf("1e-25")


# hypothesis: ring homomorphism ------------------------------------------------

_small = st.integers(-3, 3)


@st.composite
def safe_exprs(draw, depth=2):
    """Expressions guaranteed to expand: denominators have nonzero lead."""
    if depth == 0:
        choice = draw(st.integers(0, 2))
        if choice == 0:
            return TNum(F(draw(_small.filter(bool))))
        if choice == 1:
            return TVar()
        return TMul(TNum(F(draw(_small.filter(bool)))), TVar())
    left = draw(safe_exprs(depth=depth - 1))
    right = draw(safe_exprs(depth=depth - 1))
    op = draw(st.integers(0, 3))
    if op == 0:
        return TAdd(left, right)
    if op == 1:
        return TMul(left, right)
    if op == 2:
        # divide by something with a nonzero constant term
        unit = TAdd(TNum(F(draw(st.sampled_from([1, 2, -1, 3])))), TMul(TVar(), right))
        return TMul(left, parse_expression(f"1/({to_text(unit)})"))
    return TMul(left, left)


@given(safe_exprs(), safe_exprs())
def test_product_homomorphism(e1, e2):
    s1 = expand_series(e1)
    s2 = expand_series(e2)
    assert agree(s1 * s2, expand_series(TMul(e1, e2)))


@given(safe_exprs())
def test_square_matches_product(e):
    s = expand_series(e)
    assert agree(s * s, expand_series(TMul(e, e)))


@given(st.sampled_from([1, 4, 9, -1, -4]), safe_exprs())
def test_sqrt_squares_back(c, e):
    expr = TAdd(TNum(F(c)), TMul(TVar(), e))
    s = expand_series(TSqrt(expr))
    assert agree(s * s, expand_series(expr))


@given(safe_exprs())
def test_numeric_agreement_random(e):
    s = expand_series(e)
    with mpmath.workdps(60):
        direct = evaluate_numeric(e, "1e-4")
        via = s.numeric_at("1e-4")
        assert abs(direct - via) / max(1, abs(direct)) < mpmath.mpf("1e-10")

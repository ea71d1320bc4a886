from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from zinbiel5.algebra import algebra_from_entries, change_basis, zero_algebra
from zinbiel5.degeneration import (
    DegenerationCertificate,
    FamilyTensor,
    NecessaryReport,
    RSet,
    necessary_conditions,
    rset_membership,
    transported_constants,
    verify_certificate,
)
from zinbiel5.exactmath import ExactMatrix, GaussianRational, grat
from zinbiel5.series import Radical


def alg(dim, *entries):
    return algebra_from_entries(dim, entries)


SQUARE2 = alg(2, (1, 1, 2, 1))
THREE_STEP4 = alg(4, (1, 1, 2, 1), (1, 2, 3, 1), (2, 1, 3, 2))


def identity_basis(n):
    return tuple(
        tuple("1" if i == j else "0" for j in range(n)) for i in range(n)
    )


def cert(source, target, basis, **kw):
    return DegenerationCertificate(source=source, target=target, basis=basis, **kw)


# family tensors ---------------------------------------------------------------


def test_family_instantiate():
    fam = FamilyTensor.from_entries(2, [(1, 1, 2, "a")])
    assert fam.symbols == ("a",)
    inst = fam.instantiate({"a": grat(3)})
    assert inst.c[0][0][1] == grat(3)
    assert inst.params == (("a", grat(3)),)


def test_family_from_algebra_round_trip():
    fam = FamilyTensor.from_algebra(THREE_STEP4)
    assert fam.instantiate({}) == THREE_STEP4


# transport ---------------------------------------------------------------------


def test_transport_identity_basis():
    fam = FamilyTensor.from_algebra(THREE_STEP4)
    grid, det = transported_constants(4, fam.entries, identity_basis(4))
    assert det.coefficient(0) == Radical.from_gaussian(grat(1))
    for i, j, k, v in THREE_STEP4.entries():
        assert grid[i - 1][j - 1][k - 1].coefficient(0) == Radical.from_gaussian(v)


def test_transport_scaling_basis_multiplies_by_t():
    # diag(t, ..., t) multiplies every structure constant by t
    fam = FamilyTensor.from_algebra(THREE_STEP4)
    basis = tuple(
        tuple("t" if i == j else "0" for j in range(4)) for i in range(4)
    )
    grid, det = transported_constants(4, fam.entries, basis)
    assert det.valuation() == 4
    for i, j, k, v in THREE_STEP4.entries():
        s = grid[i - 1][j - 1][k - 1]
        assert s.coefficient(1) == Radical.from_gaussian(v)
        assert s.coefficient(0) == Radical(())


def test_transport_vanishing_constant():
    # basis (t e1, e2) sends c_11^2 to t^2, which vanishes in the limit
    fam = FamilyTensor.from_algebra(SQUARE2)
    grid, _ = transported_constants(2, fam.entries, (("t", "0"), ("0", "1")))
    s = grid[0][0][1]
    assert s.coefficient(2) == Radical.from_gaussian(grat(1))
    assert s.coefficient(0) == Radical(())


def test_transport_matches_change_basis_for_constant_matrices():
    fam = FamilyTensor.from_algebra(THREE_STEP4)
    p_rows = [[1, 2, 0, 0], [0, 1, 0, 0], [0, 3, 1, 0], [1, 0, 0, 1]]
    p = ExactMatrix(p_rows)
    moved = change_basis(THREE_STEP4, p)
    basis = tuple(tuple(str(x) for x in row) for row in p_rows)
    grid, det = transported_constants(4, fam.entries, basis)
    for i in range(4):
        for j in range(4):
            for k in range(4):
                assert grid[i][j][k].coefficient(0) == Radical.from_gaussian(
                    moved.c[i][j][k]
                ), (i, j, k)
    assert det.coefficient(0) == Radical.from_gaussian(p.det())


# certificates -------------------------------------------------------------------


def test_certificate_identity():
    rep = verify_certificate(
        cert(THREE_STEP4, THREE_STEP4, identity_basis(4))
    )
    assert rep.verdict == "verified"
    assert rep.mode == "exact"
    assert rep.samples[0].det_valuation == 0


def test_certificate_to_zero_algebra():
    rep = verify_certificate(
        cert(SQUARE2, zero_algebra(2), (("t", "0"), ("0", "1")))
    )
    assert rep.verdict == "verified"
    assert rep.mode == "exact"


def test_certificate_divergence_fails():
    rep = verify_certificate(
        cert(SQUARE2, zero_algebra(2), (("1/t", "0"), ("0", "1")))
    )
    assert rep.verdict == "failed"
    assert any("diverges" in str(f) for f in rep.samples[0].failures)


def test_certificate_wrong_target_fails_exactly():
    wrong = alg(2, (1, 1, 2, 5))
    rep = verify_certificate(cert(SQUARE2, wrong, identity_basis(2)))
    assert rep.verdict == "failed"
    assert rep.mode == "exact"
    (i, j, k, diff) = rep.samples[0].failures[0]
    assert (i, j, k) == (1, 1, 2)
    assert diff == "-4"


def test_certificate_with_radical_coefficients():
    basis = (("sqrt(4*t^2-5)", "0"), ("0", "4*t^2-5"))
    rep = verify_certificate(cert(SQUARE2, SQUARE2, basis))
    assert rep.verdict == "verified"
    assert rep.mode == "exact"
    assert rep.samples[0].det_valuation == 0


def test_certificate_with_half_powers():
    basis = (("t^(1/2)", "0"), ("0", "t"))
    rep = verify_certificate(cert(SQUARE2, SQUARE2, basis))
    assert rep.verdict == "verified"
    assert rep.samples[0].det_valuation == Fraction(3, 2)


def test_certificate_numeric_fallback():
    # cube roots leave the exact coefficient field -> numeric tier
    basis = (("(1+t)^(1/3)", "0"), ("0", "(1+t)^(2/3)"))
    rep = verify_certificate(cert(SQUARE2, SQUARE2, basis))
    assert rep.verdict == "verified"
    assert rep.mode == "numeric"
    assert rep.samples[0].det_valuation == 0


def test_certificate_numeric_mode_forced():
    rep = verify_certificate(
        cert(SQUARE2, SQUARE2, identity_basis(2)), mode="numeric"
    )
    assert rep.verdict == "verified"
    assert rep.mode == "numeric"


def test_certificate_exact_mode_no_fallback():
    basis = (("(1+t)^(1/3)", "0"), ("0", "(1+t)^(2/3)"))
    rep = verify_certificate(cert(SQUARE2, SQUARE2, basis), mode="exact")
    assert rep.verdict == "inconclusive"


def test_certificate_parametrized_index():
    fam = FamilyTensor.from_entries(2, [(1, 1, 2, "a")])
    target = alg(2, (1, 1, 2, 2))
    rep = verify_certificate(
        cert(fam, target, identity_basis(2), source_index="t+2")
    )
    assert rep.verdict == "verified"
    assert rep.mode == "exact"


def test_certificate_samples():
    fam = FamilyTensor.from_algebra(SQUARE2)
    basis = (("lam", "0"), ("0", "lam^2"))
    rep = verify_certificate(
        cert(
            fam,
            SQUARE2,
            basis,
            samples=({"lam": "2"}, {"lam": "-1/2"}),
        )
    )
    assert rep.verdict == "verified"
    assert len(rep.samples) == 2
    assert rep.samples[1].params == (("lam", "-1/2"),)


def test_certificate_target_padding():
    core = alg(1, (1, 1, 1, 0))  # zero algebra dim 1
    rep = verify_certificate(
        cert(SQUARE2, core, (("t", "0"), ("0", "1")), target_pad=1)
    )
    assert rep.verdict == "verified"


def test_certificate_index_requires_parametric_source():
    with pytest.raises(ValueError):
        verify_certificate(
            cert(SQUARE2, SQUARE2, identity_basis(2), source_index="t")
        )


# necessary conditions -----------------------------------------------------------


def test_necessary_conditions_direction():
    rep = necessary_conditions(SQUARE2, zero_algebra(2))
    assert rep.ok
    back = necessary_conditions(zero_algebra(2), SQUARE2)
    assert not back.der_strictly_smaller
    assert not back.power_dims_dominate
    assert not back.ann_not_larger


def test_necessary_conditions_self():
    rep = necessary_conditions(SQUARE2, SQUARE2)
    assert not rep.der_strictly_smaller  # proper degenerations only
    assert rep.power_dims_dominate
    assert rep.ann_not_larger


# R-sets ---------------------------------------------------------------------------


def test_rset_containment():
    S = alg(3, (1, 1, 3, 1))
    ok, witness = rset_membership(S, RSet(containments=((1, 1, 3),)))
    assert ok and witness is None
    bad = alg(3, (1, 1, 2, 1))
    ok, witness = rset_membership(bad, RSet(containments=((1, 1, 3),)))
    assert not ok
    assert "A_1A_1" in witness


def test_rset_equations():
    S = alg(3, (1, 1, 3, 1))
    ok, witness = rset_membership(S, RSet(equations=("c113-1", "c223")))
    assert ok
    ok, witness = rset_membership(S, RSet(equations=("c113",)))
    assert not ok
    assert "c113" in witness


def test_rset_relabel():
    S = alg(3, (2, 2, 3, 1))  # e2 e2 = e3
    R = RSet(equations=("c113-1",), relabel=(2, 1, 3))
    ok, _ = rset_membership(S, R)
    assert ok


# property: transport at constant bases equals change_basis ------------------------


@st.composite
def invertible(draw, n=3):
    vals = st.integers(-2, 2)
    lower = [[1 if i == j else (draw(vals) if j < i else 0) for j in range(n)] for i in range(n)]
    upper = [[1 if i == j else (draw(vals) if j > i else 0) for j in range(n)] for i in range(n)]
    return ExactMatrix(lower) * ExactMatrix(upper)


@st.composite
def small_algebras(draw):
    entries = []
    for _ in range(draw(st.integers(1, 3))):
        entries.append(
            (
                draw(st.integers(1, 3)),
                draw(st.integers(1, 3)),
                draw(st.integers(1, 3)),
                draw(st.integers(-2, 2).filter(bool)),
            )
        )
    return algebra_from_entries(3, entries)


@given(small_algebras(), invertible())
def test_transport_equals_change_basis(a, p):
    fam = FamilyTensor.from_algebra(a)
    moved = change_basis(a, p)
    basis = tuple(
        tuple(str(Fraction(x.re)) for x in row) for row in p.rows
    )
    grid, _ = transported_constants(3, fam.entries, basis)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                assert grid[i][j][k].coefficient(0) == Radical.from_gaussian(
                    moved.c[i][j][k]
                )

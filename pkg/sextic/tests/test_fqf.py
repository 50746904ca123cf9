import warnings
from fractions import Fraction

import pytest

from sextic.automorphisms import FormAutomorphism, enumerate_automorphisms, orbit_partition
from sextic.corpus import random_form
from sextic.errors import BoundExceeded, DomainError
from sextic.fqf import (
    UNDEFINED_ODD_2ADIC,
    FiniteQuadraticForm,
    FormBlock,
    brown_blocks,
    brown_gauss,
    brown_invariant,
    det_p_class,
    find_isomorphism,
    format_form,
    from_blocks,
    invariant_factors,
    is_even,
    is_isomorphic,
    negate,
    normal_form,
    parse_blocks,
    parse_form,
    primary_part,
    rank_invariants,
)
from sextic.subgroups import Subgroup, isotropic_subgroups, quotient, subgroup_perp


@pytest.mark.parametrize(
    "text, brown",
    [
        ("<1/2>", 1),
        ("<-1/2>", 7),
        ("<2/3>", 2),
        ("<-2/3>", 6),
        ("<1/4>", 1),
        ("<3/4>", 3),
        ("U(2)", 0),
        ("V(2)", 4),
        ("V(4)", 0),
        ("<2/9>", 0),
        ("<2/5>+<-2/5>", 0),
    ],
)
def test_brown_of_small_forms(text, brown):
    f = parse_form(text)
    assert brown_gauss(f) == brown
    assert brown_blocks(f) == brown
    assert brown_invariant(f) == brown


def test_brown_agrees_on_random_forms(rng):
    for _ in range(40):
        f = random_form(rng, 256)
        assert brown_gauss(f) == brown_blocks(f) == brown_invariant(f), format_form(f)


@pytest.mark.slow
def test_brown_agrees_on_many_random_forms(rng):
    for _ in range(500):
        f = random_form(rng, 4096)
        assert brown_gauss(f) == brown_blocks(f) == brown_invariant(f), format_form(f)


@pytest.mark.parametrize(
    "kind, m, n",
    [("cyclic", 1, 3), ("cyclic", 2, 4), ("cyclic", 1, 1), ("U", 0, 3), ("W", 0, 2)],
)
def test_invalid_blocks_are_rejected(kind, m, n):
    with pytest.raises(DomainError):
        FormBlock(kind, m, n)


def test_cyclic_numerator_is_balanced():
    assert FormBlock.cyclic(3, 2).numerator == -1
    assert FormBlock.cyclic(4, 3).numerator == -2
    assert FormBlock.cyclic(-1, 2) == FormBlock.cyclic(3, 2)


def test_form_rejects_incompatible_values():
    with pytest.raises(DomainError):
        FiniteQuadraticForm((2,), ((Fraction(1, 3),),))
    with pytest.raises(DomainError):
        FiniteQuadraticForm((2, 2), ((Fraction(1, 2), Fraction(1, 3)), (Fraction(1, 3), Fraction(1, 2))))


def test_form_rejects_value_outside_the_generator_torsion():
    # 3 * 2/9 is not an integer, so b(g, g) has the wrong denominator
    with pytest.raises(DomainError, match="incompatible with order 3"):
        FiniteQuadraticForm((3,), ((Fraction(2, 9),),))


@pytest.mark.parametrize(
    "orders, q",
    [
        ((4,), ((Fraction(1, 2),),)),
        ((2,), ((Fraction(0),),)),
        ((3, 3), ((Fraction(2, 3), Fraction(1, 3)), (Fraction(1, 3), Fraction(2, 3)))),
        ((2, 4), ((Fraction(1), Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 2)))),
    ],
)
def test_degenerate_forms_are_rejected(orders, q):
    with pytest.raises(DomainError, match="degenerate"):
        FiniteQuadraticForm(orders, q)


def test_nondegenerate_forms_with_isotropic_socle_are_accepted():
    # the order-2 element of <1/4> and of U(2) pairs trivially with itself but not with the group
    assert FiniteQuadraticForm((4,), ((Fraction(1, 4),),)).order == 4
    assert FiniteQuadraticForm((2, 2), ((Fraction(0), Fraction(1, 2)), (Fraction(1, 2), Fraction(0)))).order == 4
    assert FiniteQuadraticForm((3, 3), ((Fraction(2, 3), Fraction(0)), (Fraction(0), Fraction(4, 3)))).order == 9


def test_parse_blocks_with_multiplicity_and_powers():
    blocks = parse_blocks("2<-1/2>+U(2^2)")
    assert len(blocks) == 3
    assert blocks[-1] == FormBlock.plane("U", 2)
    assert parse_blocks("0") == []
    assert parse_blocks("⟨1/2⟩+𝒱(2)") == [FormBlock.cyclic(1, 2), FormBlock.plane("V", 1)]


@pytest.mark.parametrize("text", ["<1/3>", "<1/2", "Q(2)", "3"])
def test_parse_errors(text):
    with pytest.raises(DomainError):
        parse_blocks(text)


def test_invariants_of_direct_sum():
    f = parse_form("<1/2>+<2/3>")
    assert f.order == 6
    assert invariant_factors(f) == (6,)
    assert rank_invariants(f).length == 1
    g = parse_form("U(2)+<1/4>+<2/3>+<2/3>")
    assert g.order == 4 * 4 * 9
    assert rank_invariants(g).ell(2) == 3
    assert rank_invariants(g).ell(3) == 2
    assert rank_invariants(g).length == 3


@pytest.mark.parametrize(
    "left, right, expected",
    [
        ("3<1/2>", "<-1/2>+V(2)", True),
        ("2<1/2>", "2<-1/2>", False),
        ("2<2/3>", "2<-2/3>", True),
        ("<2/3>", "<-2/3>", False),
        ("U(2)", "V(2)", False),
        ("2V(2)", "2U(2)", True),
        ("<1/4>", "<-3/4>", False),
        ("<1/2>+<2/3>", "<7/6>", True),
    ],
)
def test_is_isomorphic(left, right, expected):
    assert is_isomorphic(parse_form(left), parse_form(right)) is expected
    if expected:
        assert normal_form(parse_form(left)) == normal_form(parse_form(right))


def test_find_isomorphism_preserves_q():
    f, g = parse_form("3<1/2>"), parse_form("<-1/2>+V(2)")
    iso = find_isomorphism(f, g)
    assert iso is not None
    for x in f.elements():
        assert g.q(iso(x)) == f.q(x)
    assert len(set(iso.inverse_table())) == f.order
    assert find_isomorphism(parse_form("U(2)"), parse_form("V(2)")) is None


def test_negate_flips_brown():
    f = parse_form("<1/2>+<2/3>+<1/8>")
    assert (brown_invariant(f) + brown_invariant(negate(f))) % 8 == 0


def test_parity_and_det_classes():
    assert is_even(parse_form("U(2)+<1/4>"))
    assert not is_even(parse_form("<1/2>"))
    assert det_p_class(parse_form("<1/2>"), 2) == UNDEFINED_ODD_2ADIC
    assert det_p_class(parse_form("U(2)"), 2) == 7
    assert det_p_class(parse_form("V(2)"), 2) == 3
    assert det_p_class(parse_form("<2/3>"), 3) == -1
    assert det_p_class(parse_form("<2/3>"), 5) == 1


def _assert_negation_scales_det_p(f):
    g = negate(f)
    ranks = rank_invariants(f)
    for p in f.primes:
        ell = ranks.ell(p)
        before, after = det_p_class(f, p), det_p_class(g, p)
        if before == UNDEFINED_ODD_2ADIC:
            assert after == UNDEFINED_ODD_2ADIC
        elif p == 2:
            assert after == before * (-1) ** ell % 8, (format_form(f), p)
        else:
            # the class of -1 is the Legendre symbol (-1/p)
            assert after == before * (-1) ** (ell * (p - 1) // 2), (format_form(f), p)


@pytest.mark.parametrize(
    "text",
    ["<2/3>", "2<2/3>", "<2/3>+<4/9>", "<2/5>+<4/5>", "<6/7>+<2/25>", "<1/2>+<2/3>", "U(2)+<1/4>", "V(2)+<3/8>", "2<1/4>"],
)
def test_negation_scales_det_p_by_minus_one_to_the_rank(text):
    _assert_negation_scales_det_p(parse_form(text))


def test_negation_scales_det_p_on_random_forms(rng):
    for _ in range(40):
        _assert_negation_scales_det_p(random_form(rng, 512))


def test_format_form_is_canonical():
    assert format_form(parse_form("<-1/2>+V(2)")) == format_form(parse_form("3<1/2>"))
    assert format_form(parse_form("<4/3>")) == "<-2/3>"
    assert format_form(parse_form("0")) == "0"


def test_gauss_sum_respects_bound():
    with pytest.raises(BoundExceeded):
        brown_gauss(parse_form("<1/2>+<1/4>+<1/8>+<1/16>"), max_order=512)


@pytest.mark.parametrize("text, count", [("<2/3>", 2), ("U(2)", 2), ("V(2)", 6), ("2<1/2>", 2), ("<1/8>", 2)])
def test_automorphism_counts(text, count):
    f = parse_form(text)
    autos = enumerate_automorphisms(f)
    assert len(autos) == count
    assert all(a.preserves_form() for a in autos)
    assert all(FormAutomorphism.from_matrix(f, a.matrix).images == a.images for a in autos)


def test_isotropic_subgroups_and_quotient():
    f = parse_form("<1/2>+<-1/2>")
    subgroups = isotropic_subgroups(f)
    assert [K.order for K in subgroups] == [1, 2]
    assert quotient(f, subgroups[1]).form.order == 1

    u = parse_form("U(2)")
    assert [K.order for K in isotropic_subgroups(u)] == [1, 2, 2]

    g = parse_form("<2/3>+<-2/3>")
    K = Subgroup.generated(g, [(1, 1)])
    assert K.is_isotropic()
    assert quotient(g, K).form.order == 1
    with pytest.raises(DomainError):
        quotient(g, Subgroup.generated(g, [(1, 0)]))


def test_quotient_keeps_the_orthogonal_part():
    f = parse_form("<2/3>+<-2/3>+<1/2>")
    K = Subgroup.generated(f, [(1, 1, 0)])
    q = quotient(f, K)
    assert is_isomorphic(q.form, parse_form("<1/2>"))
    autos = enumerate_automorphisms(f)
    preserved = [a for a in autos if K.image(a) == K]
    assert all(q.push(a).preserves_form() for a in preserved)


def test_isotropic_lines_form_one_orbit():
    f = parse_form("<2/3>+<-2/3>")
    lines = [K for K in isotropic_subgroups(f) if K.order == 3]
    orbits = orbit_partition(lines, enumerate_automorphisms(f), lambda g, K: K.image(g))
    assert len(lines) == 2
    assert len(orbits) == 1


def test_from_blocks_and_primary_part():
    f = from_blocks([FormBlock.cyclic(1, 2), FormBlock.cyclic(2, 3), FormBlock.plane("U", 2)])
    assert f.order == 96
    assert is_isomorphic(f, parse_form("<1/2>+<2/3>+U(4)"))
    three = primary_part(f, 3)
    assert three.order == 3
    assert is_isomorphic(three, parse_form("<2/3>"))
    assert primary_part(f, 2).order == 32


def test_isotropic_line_is_its_own_perp():
    f = parse_form("<2/3>+<-2/3>")
    K = Subgroup.generated(f, [(1, 1)])
    assert K.order == 3
    assert subgroup_perp(f, K) == K


def test_odd_prime_helpers_emit_no_deprecation_warnings():
    f = parse_form("<2/3>+<4/5>+<2/7>")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert brown_blocks(f) == brown_gauss(f)
        assert det_p_class(f, 5) in (1, -1)
        assert det_p_class(negate(f), 7) in (1, -1)

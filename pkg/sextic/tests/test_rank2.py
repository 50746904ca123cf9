import pytest

from sextic.corpus import random_unimodular
from sextic.errors import DomainError
from sextic.fqf import brown_invariant, negate
from sextic.lattice import definite_isometries, discriminant_form, short_vectors
from sextic.rank2 import (
    ReducedForm,
    all_reduced_forms,
    enumerate_genus,
    has_disorienting_isometry,
    orthogonal_elements,
    orthogonal_group,
    parse_reduced,
    reduce,
)


def _transform(gram, P):
    T = P.matrix
    return [[sum(T[k][r] * gram[k][l] * T[l][s] for k in range(2) for l in range(2)) for s in range(2)] for r in range(2)]


@pytest.mark.parametrize(
    "gram, expected",
    [
        ([[4, 3], [3, 4]], "M(1,1,2)"),
        ([[2, 0], [0, 4]], "M(1,0,2)"),
        ([[38, 0], [0, 2]], "M(1,0,19)"),
        ([[8, -2], [-2, 10]], "M(4,2,5)"),
        ([[10, 7], [7, 10]], "M(3,3,5)"),
    ],
)
def test_reduce_examples(gram, expected):
    m, P = reduce(gram)
    assert str(m) == expected
    assert abs(P.det) == 1
    assert tuple(map(tuple, _transform(gram, P))) == m.gram


@pytest.mark.parametrize("gram", [[[2, 1], [1, -2]], [[3, 0], [0, 2]], [[-2, 0], [0, -2]], [[2, 2], [2, 2]]])
def test_reduce_rejects(gram):
    with pytest.raises(DomainError):
        reduce(gram)


def test_reduction_is_canonical_under_rebasing(rng):
    forms = [m for det in range(3, 80) for m in all_reduced_forms(det)]
    for i in range(200):
        m = forms[i % len(forms)]
        P = random_unimodular(rng)
        assert reduce(_transform(m.gram, P))[0] == m


def test_reduced_form_validation():
    assert parse_reduced("M(4,2,5)") == ReducedForm(4, 2, 5)
    assert parse_reduced(" M( 1 , 0 , 19 ) ").det == 76
    for text in ["M(5,2,4)", "M(4,5,6)", "M(0,0,1)", "M(4,2)", "N(1,0,1)"]:
        with pytest.raises(DomainError):
            parse_reduced(text)


@pytest.mark.parametrize(
    "form, tag, order",
    [
        (ReducedForm(4, 2, 5), "generic", 2),
        (ReducedForm(5, 0, 5), "square", 8),
        (ReducedForm(1, 1, 1), "hexagonal", 12),
        (ReducedForm(6, 6, 6), "hexagonal", 12),
        (ReducedForm(2, 1, 2), "a=c", 4),
        (ReducedForm(1, 0, 19), "b=0", 4),
        (ReducedForm(2, 2, 3), "b=a", 4),
    ],
)
def test_orthogonal_group_cases(form, tag, order):
    case = orthogonal_group(form)
    assert (case.tag, case.order) == (tag, order)
    elements = orthogonal_elements(form)
    assert len(elements) == order
    assert all(t.preserves(form.lattice) for t in elements)
    assert len(definite_isometries(form.lattice)) == order
    assert has_disorienting_isometry(form) == any(t.det == -1 for t in elements)


def test_disorienting_isometries():
    assert not has_disorienting_isometry(ReducedForm(4, 2, 5))
    assert has_disorienting_isometry(ReducedForm(1, 0, 19))
    assert has_disorienting_isometry(ReducedForm(6, 0, 12))


def test_all_reduced_forms():
    assert all_reduced_forms(76) == [ReducedForm(1, 0, 19), ReducedForm(2, 2, 10), ReducedForm(4, 2, 5)]
    assert all_reduced_forms(3) == [ReducedForm(1, 1, 1)]
    with pytest.raises(DomainError):
        all_reduced_forms(0)


@pytest.mark.parametrize("det", range(3, 61))
def test_van_der_blij_for_binary_forms(det):
    for m in all_reduced_forms(det):
        assert brown_invariant(discriminant_form(m.lattice).form) == 2


def test_minimum():
    for m in [ReducedForm(4, 2, 5), ReducedForm(6, 0, 12), ReducedForm(2, 1, 3)]:
        assert short_vectors(m.lattice, m.minimum)
        assert not any(short_vectors(m.lattice, n) for n in range(2, m.minimum, 2))


def test_enumerate_genus():
    target = discriminant_form(ReducedForm(4, 2, 5).lattice).form
    assert enumerate_genus(target) == [ReducedForm(1, 0, 19), ReducedForm(4, 2, 5)]
    assert enumerate_genus(negate(target)) == []
    assert enumerate_genus(discriminant_form(ReducedForm(1, 0, 1).lattice).form) == [ReducedForm(1, 0, 1)]
    assert enumerate_genus(discriminant_form(ReducedForm(1, 0, 2).lattice).form) == [ReducedForm(1, 0, 2)]

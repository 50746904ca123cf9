import pytest

from sextic.automorphisms import FormAutomorphism, closure
from sextic.classify import (
    Configuration,
    complement_genus,
    complement_representatives,
    configuration_fast_path,
    configurations,
    fast_path_applies,
    homological_types,
    interval_contains,
    is_abundant,
    is_reducible,
    is_symmetric,
    primitive_summands_check,
    rigid_isotopy_classes,
    root_count,
    root_count_check,
    symmetry_verdict,
    zariski_info,
    zariski_sets,
)
from sextic.config import Settings
from sextic.corpus import load_expected, random_singularity_set
from sextic.errors import DomainError, InternalInconsistency
from sextic.fqf import find_isomorphism, negate
from sextic.lattice import discriminant_form
from sextic.nikulin import unique_in_genus
from sextic.rank2 import ReducedForm
from sextic.report import add_counts
from sextic.rootdata import SingularitySet, admissible_automorphisms, build_S
from sextic.schema_validate import require_valid_report, validate_report
from sextic.subgroups import isotropic_subgroups, quotient

EXPECTED = load_expected()["classify"]
QUICK = ["D19", "A19", "A18+A1"]


def _sigma(text):
    return SingularitySet.parse(text)


def _check_golden(name, settings):
    want = EXPECTED[name]
    report = rigid_isotopy_classes(_sigma(name), settings=settings)
    assert len(report.configurations) == want["configurations"]
    assert report.class_count == want["class_count"]
    if "indices" in want:
        assert [c.index for c in report.configurations] == want["indices"]
    if "representatives" in want:
        reps = sorted({r for c in report.configurations for r in c.complement.representatives})
        assert reps == sorted(want["representatives"])
    if "types" in want:
        assert sum(len(c.types) for c in report.configurations) == want["types"]
    if want.get("reducible"):
        assert all(c.reducible for c in report.configurations)
    return report


@pytest.mark.parametrize("name", QUICK)
def test_golden_maximal_sets(name, settings):
    _check_golden(name, settings)


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(set(EXPECTED) - set(QUICK)))
def test_golden_slow_sets(name, settings):
    _check_golden(name, settings)


def test_a18_a1_type_symmetries(settings):
    report = rigid_isotopy_classes(_sigma("A18+A1"), settings=settings)
    (config,) = report.configurations
    verdicts = {t.N: t.symmetry for t in config.types}
    assert verdicts == {"M(1,0,19)": "symmetric", "M(4,2,5)": "asymmetric"}
    assert report.irreducible_class_count == 3
    assert report.zariski is None


def test_definite_complement_skips_genus_criteria(settings):
    (c,) = configurations(_sigma("A18+A1"), settings=settings)
    g = complement_genus(c)
    assert g.signature == (2, 0)
    with pytest.raises(DomainError):
        unique_in_genus(g)
    complement = complement_representatives(c, settings=settings)
    assert complement.certificate is None
    assert len(complement.representatives) == 2


def test_debug_root_check_gives_same_answer():
    settings = Settings(events_path=None, debug_full_root_check=True)
    report = rigid_isotopy_classes(_sigma("A18+A1"), settings=settings)
    assert report.class_count == 3


def test_a19_types(settings):
    (c,) = configurations(_sigma("A19"), settings=settings)
    types, certified = homological_types(c, settings=settings)
    assert certified
    assert [str(t.N) for t in types] == ["M(1,0,10)", "M(1,0,10)"]
    assert [symmetry_verdict(t)[0] for t in types] == ["symmetric", "symmetric"]
    assert all(is_symmetric(t) == "symmetric" for t in types)
    assert not configuration_fast_path(c)
    assert not is_reducible(c)


def test_d19_configuration(settings):
    (c,) = configurations(_sigma("D19"), settings=settings)
    assert c.index == 1
    assert c.s_tilde().lattice.det == -8
    g = complement_genus(c)
    assert g.signature == (2, 0)
    assert g.form.order == 8
    complement = complement_representatives(c, settings=settings)
    assert [str(m) for m in complement.representatives] == ["M(1,0,2)"]
    assert all(primitive_summands_check(c).values())


def _assert_anti_isometry(iso):
    for i in range(iso.source.rank):
        x = iso.source.unit(i)
        assert iso.target.q(iso(x)) == iso.source.q(x)


@pytest.mark.parametrize("name", QUICK)
def test_anti_isometry_exists_in_both_directions(name, settings):
    for c in configurations(_sigma(name), settings=settings):
        for N in complement_representatives(c, settings=settings).representatives:
            target = discriminant_form(N.lattice).form
            forward = find_isomorphism(negate(c.form), target)
            backward = find_isomorphism(negate(target), c.form)
            assert forward is not None and backward is not None, (str(c), str(N))
            _assert_anti_isometry(forward)
            _assert_anti_isometry(backward)


def test_no_anti_isometry_outside_the_genus(settings):
    (c,) = configurations(_sigma("A18+A1"), settings=settings)
    outsider = discriminant_form(ReducedForm(2, 2, 10).lattice).form
    assert outsider.order == c.form.order
    assert find_isomorphism(negate(c.form), outsider) is None
    assert find_isomorphism(negate(outsider), c.form) is None


def _admissible_by_lattice(sigma, K):
    """No new roots in Σ̃ and no class (r + h)/2 for an A1 root r."""
    sdata = build_S(sigma)
    f = sdata.form
    half_sums = {
        f.add(sdata.embed(i, (1,)), sdata.gamma_element()) for i, s in enumerate(sigma.components) if s == "A1"
    }
    if K.elements & half_sums:
        return False
    return root_count_check(Configuration(sigma, K, quotient(f, K)))


@pytest.mark.parametrize(
    "text",
    [
        "3A2",
        "E6+A2",
        "2A1+A3",
        pytest.param("2A3+A1", marks=pytest.mark.slow),
        pytest.param("A3+4A1", marks=pytest.mark.slow),
    ],
)
def test_configurations_are_orbit_representatives(text, settings):
    sigma = _sigma(text)
    f = build_S(sigma).form
    assert f.order <= 512
    group = closure(admissible_automorphisms(sigma).generators, FormAutomorphism.identity(f))
    reps = configurations(sigma, settings=settings, realizable_only=False)
    orbits = [frozenset(c.kernel.image(g) for g in group) for c in reps]
    covered = frozenset().union(*orbits)
    # pairwise disjoint orbits: no kernel is counted twice
    assert sum(len(o) for o in orbits) == len(covered)
    assert covered == {K for K in isotropic_subgroups(f) if _admissible_by_lattice(sigma, K)}


def test_report_matches_schema(settings):
    report = rigid_isotopy_classes(_sigma("A19"), settings=settings)
    payload = report.model_dump(mode="json")
    ok, message = validate_report(payload)
    assert ok, message
    assert require_valid_report(payload) is payload
    payload["configurations"][0]["class_count"] = [1]
    ok, message = validate_report(payload)
    assert not ok
    assert message.startswith("configurations/0/class_count:")
    with pytest.raises(InternalInconsistency):
        require_valid_report(payload)


def test_three_e6_interval(settings):
    report = rigid_isotopy_classes(_sigma("3E6"), settings=settings)
    assert [c.index for c in report.configurations] == [1, 3]
    assert [c.abundant for c in report.configurations] == [False, True]
    trivial, abundant = report.configurations
    assert trivial.complement.certificate.unique_in_genus == "unique"
    assert trivial.complement.certificate.aut_onto == "unknown"
    assert not trivial.types_certified
    assert trivial.class_count == [1, 2]
    assert abundant.class_count == 1
    assert report.class_count == [2, 3]
    assert interval_contains(report.class_count, 2)
    assert report.zariski.virtual_genus == 1
    assert not report.fast_path


def test_small_sets_have_one_certified_class(settings):
    for text in ["", "A2", "E6+A2"]:
        report = rigid_isotopy_classes(_sigma(text), settings=settings)
        assert report.class_count == 1
        (config,) = report.configurations
        assert config.complement.certificate.aut_onto == "unique_and_onto"
        assert config.types[0].symmetry == "symmetric"


@pytest.mark.parametrize("text", ["A1", "3A2", "E6+A2", "2A1"])
def test_new_roots_and_half_sums_are_excluded(text, settings):
    found = configurations(_sigma(text), settings=settings, realizable_only=False)
    assert [c.index for c in found] == [1]
    assert root_count_check(found[0])


def test_milnor_number_bound(settings):
    with pytest.raises(DomainError):
        configurations(_sigma("A20"), settings=settings)
    with pytest.raises(DomainError):
        rigid_isotopy_classes(_sigma("E8+E8+A4"), settings=settings)


@pytest.mark.parametrize("symbol, count", [("A1", 2), ("A19", 380), ("D4", 24), ("D19", 684), ("E6", 72), ("E8", 240)])
def test_root_count(symbol, count):
    assert root_count(symbol) == count


@pytest.mark.parametrize(
    "text, shape, genus",
    [
        ("6A2", (0, (6, 0, 0, 0, 0, 0), 0), 4),
        ("6A2+A1", (0, (6, 0, 0, 0, 0, 0), 1), 3),
        ("3E6", (3, (0, 0, 0, 0, 0, 0), 0), 1),
        ("2E6+A5", (2, (0, 1, 0, 0, 0, 0), 0), 1),
        ("A17", (0, (0, 0, 0, 0, 0, 1), 0), 1),
        ("2A5", (0, (0, 2, 0, 0, 0, 0), 0), 4),
    ],
)
def test_zariski_info(text, shape, genus):
    info = zariski_info(_sigma(text))
    assert (info.e, info.a, info.n) == shape
    assert info.virtual_genus == genus


@pytest.mark.parametrize("text", ["A18+A1", "5A2", "E6+A3", "D19"])
def test_zariski_info_rejects(text):
    assert zariski_info(_sigma(text)) is None


def test_zariski_sets():
    assert len(zariski_sets()) == 19
    small = zariski_sets(e_max=1)
    assert len(small) == 16
    assert _sigma("6A2") in small
    assert _sigma("E6+A11") in small
    assert all(zariski_info(s).e <= 1 and s.mu <= 19 for s in small)
    assert all(zariski_info(s).n == 1 for s in zariski_sets(e_max=0, nodes=1))


def test_fast_path():
    assert fast_path_applies(_sigma("6A2"))
    assert fast_path_applies(_sigma(""))
    assert not fast_path_applies(_sigma("A19"))
    assert not fast_path_applies(_sigma("3E6"))


@pytest.mark.slow
def test_six_cusps(settings):
    configs = configurations(_sigma("6A2"), settings=settings)
    assert [c.index for c in configs] == [1, 3]
    assert all(configuration_fast_path(c) for c in configs)
    assert [is_abundant(c) for c in configs] == [False, True]
    for c in configs:
        assert complement_representatives(c, settings=settings).certificate.square_two


@pytest.mark.slow
def test_fast_path_sets_have_two_classes(settings):
    for sigma in zariski_sets(e_max=1):
        report = rigid_isotopy_classes(sigma, settings=settings)
        assert len(report.configurations) == 2, str(sigma)
        assert report.class_count == 2, str(sigma)


@pytest.mark.slow
def test_random_fast_path_sets_have_one_type_per_configuration(rng, settings):
    for _ in range(50):
        sigma = random_singularity_set(rng)
        assert fast_path_applies(sigma), str(sigma)
        for c in configurations(sigma, settings=settings):
            assert configuration_fast_path(c), str(c)
            types, _ = homological_types(c, settings=settings)
            assert len(types) == 1, str(c)
        report = rigid_isotopy_classes(sigma, settings=settings)
        assert report.fast_path
        assert all(c.class_count == 1 for c in report.configurations), str(sigma)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["2E6+A5", "2E6+2A2"])
def test_asserted_counts_lie_in_interval(name, settings):
    report = rigid_isotopy_classes(_sigma(name), settings=settings)
    assert interval_contains(report.class_count, 2)


def test_interval_arithmetic():
    assert add_counts([1, 2]) == 3
    assert add_counts([1, [1, 2], 2]) == [4, 5]
    assert add_counts([]) == 0
    assert interval_contains([1, 2], 2)
    assert not interval_contains(3, 2)

"""Rigid isotopy classification of simple plane sextics with a given set of singularities.

The pipeline:

1. configurations: isotropic kernels 𝒦 ⊂ 𝒮 = discr(Σ ⊕ <h>) without new roots
   and without half-sums (r+h)/2, up to the admissible group Aut_h 𝒮;
2. complements: the genus (2, 19-μ; -𝒮̃) of N = S̃⊥, enumerated for μ = 19
   and certified by the genus criteria for μ < 19;
3. homological types: double cosets O(N) \\ Aut 𝒮̃ / O_h(S̃);
4. symmetry: whether a disorienting isometry of N fixes the type.

Each symmetric type is one rigid isotopy class, each asymmetric type two.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from joblib import Parallel, delayed

from .automorphisms import FormAutomorphism, closure, enumerate_automorphisms, orbit_partition, stabilizer
from .config import Settings
from .errors import DomainError, InternalInconsistency, WorkBudget
from .fqf import FiniteQuadraticForm, FormIsomorphism, find_isomorphism, format_form, negate, rank_invariants
from .fqf import direct_sum as direct_sum_forms
from .lattice import (
    DiscriminantData,
    Extension,
    Isometry,
    coset_norm_counts,
    direct_sum,
    discriminant_action,
    discriminant_form,
    finite_index_extension,
    root_sublattice,
    short_vectors,
)
from .nikulin import (
    ExistenceVerdict,
    GenusSymbol,
    aut_onto,
    exists_even_lattice,
    guaranteed_square_two,
    surjectivity_checks,
    unique_in_genus,
    uniqueness_checks,
)
from .rank2 import ReducedForm, enumerate_genus, orthogonal_elements
from .report import (
    CertificateReport,
    ClassificationReport,
    ComplementReport,
    ConfigurationReport,
    Count,
    GenusCheck,
    GenusReport,
    Symmetry,
    TypeReport,
    ZariskiReport,
    add_counts,
)
from .rootdata import (
    SData,
    SingularitySet,
    admissible_automorphisms,
    build_S,
    check_symbol,
    component_discriminant,
    make_root_lattice,
)
from .subgroups import Quotient, Subgroup, isotropic_subgroups, quotient

MAX_MU = 19


def root_count(symbol: str) -> int:
    family, n = check_symbol(symbol)
    if family == "A":
        return n * (n + 1)
    if family == "D":
        return 2 * n * (n - 1)
    return {6: 72, 7: 126, 8: 240}[n]


def _check_mu(sigma: SingularitySet) -> None:
    if sigma.mu > MAX_MU:
        raise DomainError(f"total Milnor number {sigma.mu} of {sigma} exceeds {MAX_MU}")


# Step 1: configurations


@dataclass(frozen=True, eq=False)
class Configuration:
    sigma: SingularitySet
    kernel: Subgroup
    quotient: Quotient = field(repr=False)

    @property
    def sdata(self) -> SData:
        return build_S(self.sigma)

    @property
    def index(self) -> int:
        return self.kernel.order

    @property
    def form(self) -> FiniteQuadraticForm:
        """discr S̃ = 𝒦⊥/𝒦."""
        return self.quotient.form

    @cached_property
    def sigma_kernel(self) -> Subgroup:
        """𝒦 ∩ discr Σ: the kernel of the primitive hull Σ̃ = h⊥ ⊂ S̃."""
        gamma = self.sdata.gamma
        return Subgroup(self.kernel.form, frozenset(x for x in self.kernel.elements if x[gamma] == 0))

    def _lift(self, x) -> tuple[Fraction, ...]:
        lifts = self.sdata.discr.lifts
        n = self.sdata.lattice.rank
        return tuple(sum((c * lift[r] for c, lift in zip(x, lifts)), Fraction(0)) for r in range(n))

    def s_tilde(self) -> Extension:
        return finite_index_extension(self.sdata.lattice, [self._lift(x) for x in self.kernel.generators])

    def sigma_tilde(self) -> Extension:
        """Σ̃ as an extension of the root lattice Σ (h dropped)."""
        mu = self.sigma.mu
        sigma_lattice = direct_sum(*(make_root_lattice(s) for s in self.sigma.components))
        lifts = [self._lift(x)[:mu] for x in self.sigma_kernel.generators]
        return finite_index_extension(sigma_lattice, lifts)

    def __str__(self) -> str:
        return f"{self.sigma} [index {self.index}]"


class _KernelFilter:
    """Element-level admissibility of kernel elements; both tests are monotone under inclusion."""

    def __init__(self, sdata: SData, *, debug_full_root_check: bool, budget: WorkBudget):
        self.sdata = sdata
        self.budget = budget
        self._norms: dict[tuple[int, tuple[int, ...]], frozenset[Fraction]] = {}
        self._verdict: dict[tuple[int, ...], bool] = {}
        self.half_sums = self._a1_half_sums()
        if debug_full_root_check:
            full = self._all_half_sums()
            if full != self.half_sums:
                raise InternalInconsistency("half-sum classes are not all supported on A1 components")

    def _component_norms(self, c: int, part: tuple[int, ...]) -> frozenset[Fraction]:
        key = (c, part)
        if key not in self._norms:
            symbol = self.sdata.sigma.components[c]
            data = component_discriminant(symbol)
            n = make_root_lattice(symbol).rank
            shift = [sum((v * lift[r] for v, lift in zip(part, data.lifts)), Fraction(0)) for r in range(n)]
            counts = coset_norm_counts(make_root_lattice(symbol), shift, 2, budget=self.budget)
            self._norms[key] = frozenset(counts)
        return self._norms[key]

    def has_new_roots(self, x: tuple[int, ...]) -> bool:
        """x ∈ discr Σ nonzero: does the coset x + Σ contain a vector of square -2?"""
        sums = {Fraction(0)}
        for c in range(len(self.sdata.sigma.components)):
            norms = self._component_norms(c, self.sdata.component_part(x, c))
            sums = {s + t for s in sums for t in norms if s + t <= 2}
            if not sums:
                return False
        return 2 in sums

    def _a1_half_sums(self) -> frozenset[tuple[int, ...]]:
        out = set()
        g = self.sdata.gamma_element()
        for c, symbol in enumerate(self.sdata.sigma.components):
            if symbol == "A1":
                out.add(self.sdata.form.add(self.sdata.embed(c, (1,)), g))
        return frozenset(out)

    def _all_half_sums(self) -> frozenset[tuple[int, ...]]:
        """Classes of (r + h)/2 over every root r of Σ with r/2 ∈ Σ*."""
        out = set()
        g = self.sdata.gamma_element()
        for c, symbol in enumerate(self.sdata.sigma.components):
            L = make_root_lattice(symbol)
            data = component_discriminant(symbol)
            for r in short_vectors(L, -2, budget=self.budget):
                if all(sum(L.gram[i][j] * r[j] for j in range(L.rank)) % 2 == 0 for i in range(L.rank)):
                    half = tuple(Fraction(v, 2) for v in r)
                    out.add(self.sdata.form.add(self.sdata.embed(c, data.coordinates(half)), g))
        return frozenset(out)

    def __call__(self, x: tuple[int, ...]) -> bool:
        if x not in self._verdict:
            if x in self.half_sums:
                ok = False
            elif x[self.sdata.gamma] == 0:
                ok = not self.has_new_roots(x)
            else:
                ok = True
            self._verdict[x] = ok
        return self._verdict[x]


def _budget(settings: Settings, budget: WorkBudget | None) -> WorkBudget:
    return budget if budget is not None else WorkBudget(settings.max_work)


def configurations(
    sigma: SingularitySet,
    *,
    settings: Settings | None = None,
    realizable_only: bool = True,
    budget: WorkBudget | None = None,
) -> list[Configuration]:
    """Orbit representatives of admissible kernels, sorted by (order, invariants, elements)."""
    _check_mu(sigma)
    settings = settings or Settings()
    budget = _budget(settings, budget)
    sdata = build_S(sigma)
    f = sdata.form
    accept = _KernelFilter(sdata, debug_full_root_check=settings.debug_full_root_check, budget=budget)
    kernels = isotropic_subgroups(f, max_order=settings.max_group_order, accept=accept)
    # primary parts were filtered separately; mixed elements are checked here
    kernels = [K for K in kernels if all(accept(x) for x in K.elements if any(x))]
    aut = admissible_automorphisms(sigma)
    orbits = orbit_partition(kernels, aut.generators, lambda g, K: K.image(g))
    out = []
    for orbit in orbits:
        K = orbit[0]
        config = Configuration(sigma, K, quotient(f, K, max_order=settings.max_group_order))
        if realizable_only and not is_realizable(config, settings=settings, budget=budget):
            continue
        out.append(config)
    return sorted(out, key=lambda c: (c.index, c.kernel.invariants, c.kernel.key))


def is_realizable(c: Configuration, *, settings: Settings | None = None, budget: WorkBudget | None = None) -> bool:
    settings = settings or Settings()
    g = complement_genus(c)
    if c.sigma.mu == MAX_MU:
        return bool(enumerate_genus(g.form, max_order=settings.max_group_order, budget=_budget(settings, budget)))
    return exists_even_lattice(g).holds


def root_count_check(c: Configuration, *, budget: WorkBudget | None = None) -> bool:
    """Σ̃ has exactly the roots of Σ, counted on the extension lattice itself."""
    expected = sum(root_count(s) for s in c.sigma.components)
    if not c.sigma.components:
        return True
    return root_sublattice(c.sigma_tilde().lattice, budget=budget).root_count == expected


def primitive_summands_check(c: Configuration) -> dict[str, bool]:
    """Each component of Σ, and each A1 ⊕ <h>, is primitive in S̃."""
    sdata = c.sdata
    out = {}
    for i, symbol in enumerate(c.sigma.components):
        slots = set(sdata.slots[i])
        out[f"{i}:{symbol}"] = not any(
            any(x) and all(v == 0 for j, v in enumerate(x) if j not in slots) for x in c.kernel.elements
        )
        if symbol == "A1":
            slots.add(sdata.gamma)
            out[f"{i}:A1+h"] = not any(
                any(x) and all(v == 0 for j, v in enumerate(x) if j not in slots) for x in c.kernel.elements
            )
    return out


# Step 2: complements


def complement_genus(c: Configuration) -> GenusSymbol:
    return GenusSymbol((2, MAX_MU - c.sigma.mu), negate(c.form))


@dataclass(frozen=True)
class Certificate:
    exists: bool
    unique: str
    onto: str
    square_two: bool


@dataclass(frozen=True)
class Complement:
    genus: GenusSymbol
    existence: ExistenceVerdict
    representatives: tuple[ReducedForm, ...] | None
    certificate: Certificate | None
    checks: tuple[GenusCheck, ...]


def complement_representatives(
    c: Configuration, *, settings: Settings | None = None, budget: WorkBudget | None = None
) -> Complement:
    settings = settings or Settings()
    g = complement_genus(c)
    existence = exists_even_lattice(g)
    if c.sigma.mu == MAX_MU:
        reps = tuple(enumerate_genus(g.form, max_order=settings.max_group_order, budget=_budget(settings, budget)))
        if bool(reps) != existence.holds:
            raise InternalInconsistency(f"existence criterion and rank-2 enumeration disagree on {g}")
        return Complement(g, existence, reps, None, existence.checks)
    checks = list(existence.checks)
    if existence.holds:
        unique, onto = unique_in_genus(g), aut_onto(g)
        checks += uniqueness_checks(g) + surjectivity_checks(g)
    else:
        unique = onto = "not_applicable"
    cert = Certificate(existence.holds, unique, onto, existence.holds and guaranteed_square_two(g))
    return Complement(g, existence, None, cert, tuple(checks))


# Step 3: homological types


@dataclass(frozen=True, eq=False)
class Gluing:
    """Data attached to one complement N: the anti-isometry κ and both image groups in Aut 𝒮̃."""

    N: ReducedForm
    discr: DiscriminantData = field(repr=False)
    kappa: FormIsomorphism = field(repr=False)
    kernel_image: frozenset[FormAutomorphism] = field(repr=False)
    orthogonal_image: tuple[tuple[Isometry, FormAutomorphism], ...] = field(repr=False)


@dataclass(frozen=True, eq=False)
class HomologicalType:
    configuration: Configuration
    coset_id: int
    N: ReducedForm | None = None
    certificate: Certificate | None = None
    representative: FormAutomorphism | None = field(default=None, repr=False)
    gluing: Gluing | None = field(default=None, repr=False)


def _transport(kappa: FormIsomorphism, inverse: dict, t_bar: FormAutomorphism) -> FormAutomorphism:
    """κ⁻¹ t̄ κ on 𝒮̃."""
    src = kappa.source
    return FormAutomorphism(src, (inverse[t_bar(kappa(src.unit(i)))] for i in range(src.rank)))


def kernel_image(c: Configuration, *, settings: Settings) -> frozenset[FormAutomorphism]:
    """Image of O_h(S̃) in Aut 𝒮̃: kernel-stabilizing elements of Aut_h 𝒮 pushed to 𝒦⊥/𝒦."""
    aut = admissible_automorphisms(c.sigma)
    identity = FormAutomorphism.identity(c.sdata.form)
    stab = stabilizer(aut.generators, c.kernel, lambda g, K: K.image(g), identity, limit=settings.max_group_order)
    pushed = {c.quotient.push(s) for s in stab}
    return frozenset(closure(pushed, FormAutomorphism.identity(c.form), limit=settings.max_group_order))


def _gluing(c: Configuration, N: ReducedForm, h1: frozenset[FormAutomorphism], *, settings: Settings, budget: WorkBudget) -> Gluing:
    ndata = discriminant_form(N.lattice)
    kappa = find_isomorphism(negate(c.form), ndata.form, max_order=settings.max_group_order, budget=budget)
    if kappa is None:
        raise InternalInconsistency(f"no anti-isometry from discr S̃ to discr {N}")
    inverse = kappa.inverse_table()
    orth = tuple((t, _transport(kappa, inverse, discriminant_action(ndata, t))) for t in orthogonal_elements(N))
    return Gluing(N, ndata, kappa, h1, orth)


def _double_cosets(
    elements: list[FormAutomorphism], left: set[FormAutomorphism], right: frozenset[FormAutomorphism]
) -> list[FormAutomorphism]:
    seen: set[FormAutomorphism] = set()
    reps = []
    for g in elements:
        if g in seen:
            continue
        reps.append(g)
        seen.update(a.compose(g).compose(b) for a in left for b in right)
    return reps


def homological_types(
    c: Configuration,
    complement: Complement | None = None,
    *,
    settings: Settings | None = None,
    budget: WorkBudget | None = None,
) -> tuple[list[HomologicalType], bool]:
    """Types extending c, and whether the list is certified complete."""
    settings = settings or Settings()
    budget = _budget(settings, budget)
    complement = complement or complement_representatives(c, settings=settings, budget=budget)
    if complement.representatives is None:
        cert = complement.certificate
        if cert is None or not cert.exists:
            return [], True
        return [HomologicalType(c, 0, certificate=cert)], cert.onto == "unique_and_onto"
    if not complement.representatives:
        return [], True
    elements = enumerate_automorphisms(c.form, max_order=settings.max_group_order, budget=budget)
    h1 = kernel_image(c, settings=settings)
    types = []
    for N in complement.representatives:
        gluing = _gluing(c, N, h1, settings=settings, budget=budget)
        h2 = {img for _, img in gluing.orthogonal_image}
        for i, g in enumerate(_double_cosets(elements, h2, h1)):
            types.append(HomologicalType(c, i, N=N, representative=g, gluing=gluing))
    return types, True


# Step 4: symmetry


def _full_symmetry_test(t: HomologicalType) -> bool:
    gluing = t.gluing
    g = t.representative
    g_inv = g.inverse()
    for iso, image in gluing.orthogonal_image:
        if iso.det == -1 and g_inv.compose(image).compose(g) in gluing.kernel_image:
            return True
    return False


def symmetry_verdict(t: HomologicalType) -> tuple[Symmetry, str]:
    if t.gluing is None:
        cert = t.certificate
        if cert is not None and cert.square_two:
            return "symmetric", "N has a vector of square 2 (rank >= length + 2)"
        return "undetermined", "no criterion decides the symmetry"
    full = _full_symmetry_test(t)
    if t.N.minimum == 2:
        if not full:
            raise InternalInconsistency(f"{t.N} has a vector of square 2 but the gluing test finds no symmetry")
        return "symmetric", "N has a vector of square 2"
    if full:
        return "symmetric", "a disorienting isometry of N fixes the gluing"
    if not any(iso.det == -1 for iso, _ in t.gluing.orthogonal_image):
        return "asymmetric", "N has no disorienting isometry"
    return "asymmetric", "no disorienting isometry of N fixes the gluing"


def is_symmetric(t: HomologicalType) -> Symmetry:
    return symmetry_verdict(t)[0]


def _type_count(symmetry: Symmetry) -> Count:
    return {"symmetric": 1, "asymmetric": 2, "undetermined": [1, 2]}[symmetry]


# geometric predicates


def is_reducible(c: Configuration) -> bool:
    return c.kernel.has_torsion(2)


ZARISKI_SHAPE = {f"A{3 * i - 1}": i for i in range(1, 7)}


@dataclass(frozen=True)
class ZariskiShape:
    e: int
    a: tuple[int, ...]
    n: int

    @property
    def virtual_genus(self) -> int:
        return 10 - 3 * self.e - sum(a * (3 * i // 2) for i, a in enumerate(self.a, start=1)) - self.n


def zariski_info(sigma: SingularitySet) -> ZariskiShape | None:
    counts = sigma.counts()
    e = counts.pop("E6", 0)
    n = counts.pop("A1", 0)
    a = [0] * 6
    for symbol, k in counts.items():
        if symbol not in ZARISKI_SHAPE:
            return None
        a[ZARISKI_SHAPE[symbol] - 1] = k
    if 2 * e + sum(i * k for i, k in enumerate(a, start=1)) != 6:
        return None
    return ZariskiShape(e, tuple(a), n)


def is_abundant(c: Configuration) -> bool | None:
    if zariski_info(c.sigma) is None:
        return None
    if not c.kernel.has_torsion(3):
        return False
    three = c.kernel.primary(3)
    if three.order != 3:
        raise InternalInconsistency(f"3-primary part of the kernel of {c} has order {three.order}, expected 3")
    gen = three.generators[0]
    for i, symbol in enumerate(c.sigma.components):
        if symbol != "A1" and not any(c.sdata.component_part(gen, i)):
            raise InternalInconsistency(f"3-torsion of the kernel of {c} misses the component {symbol}")
    return True


def _partitions(total: int, largest: int) -> list[tuple[int, ...]]:
    if total == 0:
        return [()]
    out = []
    for part in range(min(total, largest), 0, -1):
        out.extend((part, *rest) for rest in _partitions(total - part, part))
    return out


def zariski_sets(e_max: int = 3, nodes: int = 0) -> list[SingularitySet]:
    """Sets e E6 + Σ a_i A_{3i-1} + n A1 with 2e + Σ i a_i = 6 and μ <= 19."""
    out = []
    for e in range(min(e_max, 3) + 1):
        for parts in _partitions(6 - 2 * e, 6):
            sigma = SingularitySet(("E6",) * e + tuple(f"A{3 * i - 1}" for i in parts) + ("A1",) * nodes)
            if sigma.mu <= MAX_MU:
                out.append(sigma)
    return sorted(out, key=lambda s: (s.mu, str(s)))


def fast_path_applies(sigma: SingularitySet) -> bool:
    """ℓ(discr Σ) + μ <= 19: each configuration is realized by one symmetric class."""
    discr = direct_sum_forms(*(component_discriminant(s).form for s in sigma.components))
    return rank_invariants(discr).length + sigma.mu <= MAX_MU


def configuration_fast_path(c: Configuration) -> bool:
    return rank_invariants(c.form).length + c.sigma.mu <= MAX_MU


# reports


def _genus_report(g: GenusSymbol) -> GenusReport:
    return GenusReport(signature=list(g.signature), discriminant=format_form(g.form), determinant=g.form.order)


def analyse_configuration(c: Configuration, settings: Settings | None = None) -> ConfigurationReport:
    """Steps 2-4 for one configuration."""
    settings = settings or Settings()
    budget = WorkBudget(settings.max_work)
    complement = complement_representatives(c, settings=settings, budget=budget)
    types, certified = homological_types(c, complement, settings=settings, budget=budget)
    type_reports = []
    counts = []
    for t in types:
        symmetry, reason = symmetry_verdict(t)
        counts.append(_type_count(symmetry))
        type_reports.append(
            TypeReport(N=str(t.N) if t.N is not None else "genus", coset_id=t.coset_id, symmetry=symmetry, reason=reason)
        )
    count = add_counts(counts)
    if not certified:
        # one provisional type, completeness of the type list not certified
        count = [1, 2]
    if configuration_fast_path(c) and count != 1:
        raise InternalInconsistency(f"{c} satisfies ℓ + μ <= 19 but counts {count} classes")
    cert = complement.certificate
    comp = ComplementReport(
        genus=_genus_report(complement.genus),
        representatives=[str(m) for m in complement.representatives] if complement.representatives is not None else None,
        certificate=(
            CertificateReport(
                exists=cert.exists, unique_in_genus=cert.unique, aut_onto=cert.onto, square_two_guaranteed=cert.square_two
            )
            if cert is not None
            else None
        ),
        genus_checks=list(complement.checks),
    )
    return ConfigurationReport(
        kernel_order=c.index,
        kernel_invariants=list(c.kernel.invariants),
        kernel_generators=[list(x) for x in c.kernel.generators],
        index=c.index,
        s_tilde_discr=format_form(c.form),
        complement=comp,
        types=type_reports,
        types_certified=certified,
        reducible=is_reducible(c),
        abundant=is_abundant(c),
        class_count=count,
    )


def rigid_isotopy_classes(sigma: SingularitySet, *, settings: Settings | None = None) -> ClassificationReport:
    settings = settings or Settings()
    configs = configurations(sigma, settings=settings)
    reports = Parallel(n_jobs=settings.jobs)(delayed(analyse_configuration)(c, settings) for c in configs)
    shape = zariski_info(sigma)
    zariski = (
        ZariskiReport(e=shape.e, a=list(shape.a), n=shape.n, virtual_genus=shape.virtual_genus) if shape else None
    )
    return ClassificationReport(
        sigma=str(sigma),
        mu=sigma.mu,
        configurations=list(reports),
        class_count=add_counts([r.class_count for r in reports]),
        irreducible_class_count=add_counts([r.class_count for r in reports if not r.reducible]),
        fast_path=fast_path_applies(sigma),
        zariski=zariski,
    )


def interval_contains(count: Count, value: int) -> bool:
    low, high = (count[0], count[1]) if isinstance(count, list) else (count, count)
    return low <= value <= high

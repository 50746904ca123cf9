"""ADE root lattices, their discriminant forms and the admissible group Aut_h of S = Σ ⊕ <h>."""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import cache

from .automorphisms import FormAutomorphism
from .errors import DomainError
from .fqf import FiniteQuadraticForm, FormBlock, from_blocks
from .lattice import (
    DiscriminantData,
    GramLattice,
    Isometry,
    combine_discriminants,
    diagonal,
    direct_sum,
    discriminant_action,
    discriminant_form,
    from_rows,
)

_SYMBOL = re.compile(r"([ADE])(\d+)")
_TERM = re.compile(r"(\d*)([ADE])(\d+)")
_FAMILY_ORDER = {"E": 0, "D": 1, "A": 2}


def check_symbol(symbol: str) -> tuple[str, int]:
    match = _SYMBOL.fullmatch(symbol.upper())
    if match is None:
        raise DomainError(f"invalid root system symbol {symbol!r}")
    family, rank = match.group(1), int(match.group(2))
    if (family == "A" and rank < 1) or (family == "D" and rank < 4) or (family == "E" and rank not in (6, 7, 8)):
        raise DomainError(f"invalid root system symbol {symbol!r}")
    return family, rank


def symbol_rank(symbol: str) -> int:
    return check_symbol(symbol)[1]


def _symbol_key(symbol: str) -> tuple[int, int]:
    family, rank = check_symbol(symbol)
    return _FAMILY_ORDER[family], -rank


@dataclass(frozen=True)
class SingularitySet:
    """Multiset of ADE symbols in canonical order (E, D, A; larger ranks first)."""

    components: tuple[str, ...]

    def __post_init__(self):
        comps = tuple(sorted((s.upper() for s in self.components), key=_symbol_key))
        object.__setattr__(self, "components", comps)

    @classmethod
    def parse(cls, text: str) -> SingularitySet:
        cleaned = re.sub(r"\s+", "", text).upper()
        if cleaned in ("", "0", "∅", "EMPTY"):
            return cls(())
        comps: list[str] = []
        pos = 0
        for term in cleaned.split("+"):
            match = _TERM.fullmatch(term)
            if match is None:
                raise DomainError(f"syntax error in singularity set at position {pos}: {term!r}")
            count = int(match.group(1) or 1)
            symbol = match.group(2) + match.group(3)
            try:
                check_symbol(symbol)
            except DomainError as exc:
                raise DomainError(f"{exc} at position {pos}") from exc
            if count < 1:
                raise DomainError(f"multiplicity must be positive at position {pos}")
            comps.extend([symbol] * count)
            pos += len(term) + 1
        return cls(tuple(comps))

    @property
    def mu(self) -> int:
        return sum(symbol_rank(s) for s in self.components)

    def counts(self) -> Counter:
        return Counter(self.components)

    def __str__(self) -> str:
        if not self.components:
            return "0"
        counts = self.counts()
        seen = []
        for s in self.components:
            if s not in seen:
                seen.append(s)
        return "+".join(f"{counts[s]}{s}" if counts[s] > 1 else s for s in seen)


# root lattices


def _edges(symbol: str) -> list[tuple[int, int]]:
    family, n = check_symbol(symbol)
    if family == "A":
        return [(i, i + 1) for i in range(n - 1)]
    if family == "D":
        return [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    # Bourbaki numbering, 0-based: 1-3-4-5-6-7-8 with 2 attached to 4
    return [(0, 2), (2, 3), (3, 4)] + [(i, i + 1) for i in range(4, n - 1)] + [(1, 3)]


@cache
def make_root_lattice(symbol: str) -> GramLattice:
    """Negative definite Gram matrix in the simple-root basis."""
    _, n = check_symbol(symbol)
    rows = [[-2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j in _edges(symbol):
        rows[i][j] = rows[j][i] = 1
    return from_rows(rows)


def discriminant_table(symbol: str) -> list[FormBlock]:
    """Closed-form discr of a root lattice."""
    family, n = check_symbol(symbol)
    if family == "A":
        return [FormBlock.cyclic(-n, n + 1)]
    if family == "E":
        return {6: [FormBlock.cyclic(2, 3)], 7: [FormBlock.cyclic(1, 2)], 8: []}[n]
    if n % 2:
        return [FormBlock.cyclic(-n, 4)]
    return {
        0: [FormBlock.plane("U", 1)],
        2: [FormBlock.cyclic(-1, 2)] * 2,
        4: [FormBlock.plane("V", 1)],
        6: [FormBlock.cyclic(1, 2)] * 2,
    }[n % 8]


def table_form(symbol: str) -> FiniteQuadraticForm:
    return from_blocks(discriminant_table(symbol))


def _permutation_isometry(n: int, perm: dict[int, int]) -> Isometry:
    columns = []
    for j in range(n):
        target = perm.get(j, j)
        columns.append(tuple(int(i == target) for i in range(n)))
    return Isometry.from_columns(columns)


def dynkin_symmetries(symbol: str) -> list[Isometry]:
    """Generators of the Dynkin graph automorphisms as simple-root permutations."""
    family, n = check_symbol(symbol)
    if family == "A":
        if n == 1:
            return []
        return [_permutation_isometry(n, {i: n - 1 - i for i in range(n)})]
    if family == "D":
        fork = _permutation_isometry(n, {n - 2: n - 1, n - 1: n - 2})
        if n == 4:
            return [fork, _permutation_isometry(n, {0: 2, 2: 0})]
        return [fork]
    if n == 6:
        return [_permutation_isometry(n, {0: 5, 5: 0, 2: 4, 4: 2})]
    return []


@cache
def component_discriminant(symbol: str) -> DiscriminantData:
    return discriminant_form(make_root_lattice(symbol))


# S = Σ ⊕ <h>


@dataclass(frozen=True)
class SData:
    """S with its discriminant; generator ``gamma`` is h/2, component c owns ``slots[c]``."""

    sigma: SingularitySet
    lattice: GramLattice
    discr: DiscriminantData
    offsets: tuple[int, ...]
    slots: tuple[tuple[int, ...], ...]
    gamma: int

    @property
    def form(self) -> FiniteQuadraticForm:
        return self.discr.form

    def gamma_element(self):
        return self.form.unit(self.gamma)

    def component_part(self, x, c: int):
        return tuple(x[i] for i in self.slots[c])

    def embed(self, c: int, y) -> tuple[int, ...]:
        out = [0] * self.form.rank
        for i, v in zip(self.slots[c], y):
            out[i] = v
        return self.form.reduce(out)


@cache
def build_S(sigma: SingularitySet) -> SData:
    """S = Σ ⊕ <h>, h^2 = 2, with 𝒮 = discr Σ ⊕ <1/2>."""
    lattices = [make_root_lattice(s) for s in sigma.components]
    S = direct_sum(*lattices, diagonal(2))
    parts = [(component_discriminant(s), make_root_lattice(s).rank) for s in sigma.components]
    parts.append((discriminant_form(diagonal(2)), 1))
    data = combine_discriminants(parts)
    offsets, slots = [], []
    at_lattice = at_gen = 0
    for comp_data, rank in parts[:-1]:
        offsets.append(at_lattice)
        slots.append(tuple(range(at_gen, at_gen + comp_data.form.rank)))
        at_lattice += rank
        at_gen += comp_data.form.rank
    return SData(sigma, S, data, tuple(offsets), tuple(slots), at_gen)


@dataclass(frozen=True)
class AdmissibleGroup:
    """Generators of Aut_h 𝒮 with a tag per generator ("dynkin:<c>" or "swap:<c>-<d>")."""

    form: FiniteQuadraticForm
    generators: tuple[FormAutomorphism, ...]
    kinds: tuple[str, ...]


def _local_to_global(sdata: SData, c: int, local: FormAutomorphism) -> FormAutomorphism:
    f = sdata.form
    images = []
    for i in range(f.rank):
        if i in sdata.slots[c]:
            images.append(sdata.embed(c, local.images[sdata.slots[c].index(i)]))
        else:
            images.append(f.unit(i))
    return FormAutomorphism(f, images)


def _swap(sdata: SData, c: int, d: int) -> FormAutomorphism:
    f = sdata.form
    exchange = dict(zip(sdata.slots[c], sdata.slots[d]))
    exchange.update(zip(sdata.slots[d], sdata.slots[c]))
    return FormAutomorphism(f, (f.unit(exchange.get(i, i)) for i in range(f.rank)))


@cache
def admissible_automorphisms(sigma: SingularitySet) -> AdmissibleGroup:
    sdata = build_S(sigma)
    gens: list[FormAutomorphism] = []
    kinds: list[str] = []
    for c, symbol in enumerate(sigma.components):
        data = component_discriminant(symbol)
        for t in dynkin_symmetries(symbol):
            local = discriminant_action(data, t)
            if not local.is_identity():
                gens.append(_local_to_global(sdata, c, local))
                kinds.append(f"dynkin:{c}")
    comps = sigma.components
    for c in range(len(comps) - 1):
        if comps[c] == comps[c + 1] and sdata.slots[c]:
            gens.append(_swap(sdata, c, c + 1))
            kinds.append(f"swap:{c}-{c + 1}")
    return AdmissibleGroup(sdata.form, tuple(gens), tuple(kinds))

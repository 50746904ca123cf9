"""Genus-level predicates for even lattices of given signature and discriminant form.

Existence is decided exactly; uniqueness in the genus and surjectivity of
O(L) -> Aut discr L are sufficient criteria only, so their negative verdict
is ``unknown`` and never ``false``.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Literal

from sympy.functions.combinatorial.numbers import legendre_symbol

from .errors import DomainError
from .fqf import (
    FiniteQuadraticForm,
    FormBlock,
    brown_invariant,
    det_p_class,
    format_form,
    greedy_blocks,
    is_even,
    primary_part,
    rank_invariants,
)
from .lattice import GramLattice, discriminant_form, invariants
from .report import GenusCheck

Uniqueness = Literal["unique", "unknown"]
Surjectivity = Literal["unique_and_onto", "unknown"]


@dataclass(frozen=True)
class GenusSymbol:
    """(σ₊, σ₋; 𝓛) for an even lattice.

    A negative signature entry is not a genus at all, so construction raises
    DomainError; ``exists_even_lattice`` only evaluates well-formed symbols.
    """

    signature: tuple[int, int]
    form: FiniteQuadraticForm

    def __post_init__(self):
        pos, neg = self.signature
        if pos < 0 or neg < 0:
            raise DomainError(f"signature entries must be non-negative, got {self.signature}")

    @classmethod
    def of_lattice(cls, L: GramLattice) -> GenusSymbol:
        inv = invariants(L)
        if inv.radical:
            raise DomainError("genus of a degenerate lattice")
        return cls(inv.signature, discriminant_form(L).form)

    @property
    def rank(self) -> int:
        return sum(self.signature)

    @property
    def is_indefinite(self) -> bool:
        return min(self.signature) > 0

    def __str__(self) -> str:
        return f"({self.signature[0]},{self.signature[1]}; {format_form(greedy_blocks(self.form))})"


@dataclass(frozen=True)
class ExistenceVerdict:
    holds: bool
    checks: tuple[GenusCheck, ...]

    def __bool__(self) -> bool:
        return self.holds

    @property
    def failed(self) -> list[str]:
        return [c.condition for c in self.checks if c.holds is False]


def det_condition_target(f: FiniteQuadraticForm, p: int, sigma_minus: int = 0) -> int:
    """Class of (-1)^σ₋ |f| / |f_p|: a Legendre symbol for odd p, a residue mod 8 for p = 2."""
    value = (-1) ** sigma_minus * (f.order // primary_part(f, p).order)
    if p == 2:
        return value % 8
    return int(legendre_symbol(value % p, p))


def exists_even_lattice(g: GenusSymbol) -> ExistenceVerdict:
    f = g.form
    rk = g.rank
    inv = rank_invariants(f)
    checks = [
        GenusCheck(
            condition="existence.rank",
            holds=rk >= inv.length,
            detail=f"rank {rk}, length {inv.length}",
        )
    ]
    br = brown_invariant(f)
    diff = (g.signature[0] - g.signature[1]) % 8
    checks.append(GenusCheck(condition="existence.brown", holds=br == diff, detail=f"Br = {br}, σ₊-σ₋ = {diff} mod 8"))
    for p in f.primes:
        if p == 2:
            continue
        ell = inv.ell(p)
        if rk > ell:
            checks.append(GenusCheck(condition=f"existence.det.p={p}", holds=True, detail=f"rank {rk} > ℓ_{p} = {ell}"))
            continue
        have, want = det_p_class(f, p), det_condition_target(f, p, g.signature[1])
        checks.append(
            GenusCheck(condition=f"existence.det.p={p}", holds=have == want, detail=f"det_{p} = {have}, needed {want}")
        )
    ell2 = inv.ell(2)
    if rk > ell2:
        checks.append(GenusCheck(condition="existence.det.p=2", holds=True, detail=f"rank {rk} > ℓ_2 = {ell2}"))
    elif not is_even(primary_part(f, 2)):
        checks.append(GenusCheck(condition="existence.det.p=2", holds=True, detail="2-primary part is odd"))
    else:
        have, want = det_p_class(f, 2), det_condition_target(f, 2)
        checks.append(
            GenusCheck(
                condition="existence.det.p=2",
                holds=have in (want, -want % 8),
                detail=f"det_2 = {have}, needed ±{want} mod 8",
            )
        )
    return ExistenceVerdict(all(c.holds for c in checks), tuple(checks))


# block structure per prime


def _scales(f: FiniteQuadraticForm, p: int) -> dict[int, list[FormBlock]]:
    out: dict[int, list[FormBlock]] = defaultdict(list)
    for block in greedy_blocks(primary_part(f, p)):
        out[block.order].append(block)
    return out


def _has_plane(blocks: list[FormBlock]) -> bool:
    """A 2-adic scale contains a U or V summand."""
    cyclic = sum(1 for b in blocks if b.kind == "cyclic")
    return cyclic < len(blocks) or cyclic >= 3


def _plane_anywhere(scales: dict[int, list[FormBlock]]) -> bool:
    return any(_has_plane(blocks) for blocks in scales.values())


def _adjacent_odd(scales: dict[int, list[FormBlock]]) -> bool:
    odd = {n for n, blocks in scales.items() if any(b.kind == "cyclic" for b in blocks)}
    return any(2 * n in odd for n in odd)


def _require_indefinite_rank_three(g: GenusSymbol, what: str) -> None:
    if not g.is_indefinite or g.rank < 3:
        raise DomainError(f"{what} needs an indefinite genus of rank at least 3, got {g}")


def uniqueness_checks(g: GenusSymbol) -> list[GenusCheck]:
    _require_indefinite_rank_three(g, "uniqueness criterion")
    f, rk = g.form, g.rank
    inv = rank_invariants(f)
    checks = []
    for p in f.primes:
        ell = inv.ell(p)
        if rk >= ell + 2:
            checks.append(GenusCheck(condition=f"uniqueness.p={p}", holds=True, detail=f"rank {rk} >= ℓ_{p} + 2"))
            continue
        scales = _scales(f, p)
        if p == 2:
            if _plane_anywhere(scales):
                found = "U/V summand"
            elif _adjacent_odd(scales):
                found = "<a/2^k>+<b/2^(k+1)> summand"
            else:
                found = None
        else:
            repeated = sorted(n for n, blocks in scales.items() if len(blocks) >= 2)
            found = f"two blocks of order {repeated[0]}" if repeated else None
        checks.append(
            GenusCheck(
                condition=f"uniqueness.p={p}",
                holds=found is not None,
                detail=found or f"rank {rk} < ℓ_{p} + 2 and no suitable summand",
            )
        )
    return checks


def unique_in_genus(g: GenusSymbol) -> Uniqueness:
    return "unique" if all(c.holds for c in uniqueness_checks(g)) else "unknown"


def surjectivity_checks(g: GenusSymbol) -> list[GenusCheck]:
    _require_indefinite_rank_three(g, "surjectivity criterion")
    f, rk = g.form, g.rank
    inv = rank_invariants(f)
    checks = []
    for p in f.primes:
        ell = inv.ell(p)
        if rk >= ell + 2:
            checks.append(GenusCheck(condition=f"surjectivity.p={p}", holds=True, detail=f"rank {rk} >= ℓ_{p} + 2"))
        elif p == 2 and _has_plane(_scales(f, 2).get(2, [])):
            checks.append(GenusCheck(condition="surjectivity.p=2", holds=True, detail="U(2)/V(2) summand"))
        else:
            checks.append(
                GenusCheck(condition=f"surjectivity.p={p}", holds=False, detail=f"rank {rk} < ℓ_{p} + 2")
            )
    return checks


def aut_onto(g: GenusSymbol) -> Surjectivity:
    return "unique_and_onto" if all(c.holds for c in surjectivity_checks(g)) else "unknown"


def guaranteed_square_two(g: GenusSymbol) -> bool:
    return g.is_indefinite and g.rank >= rank_invariants(g.form).length + 2

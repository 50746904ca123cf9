"""Positive definite even binary lattices M(a,b,c) = [[2a, b], [b, 2c]].

Reduced forms satisfy 0 < a <= c and 0 <= b <= a; every positive definite
even binary lattice has exactly one such representative.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

from .errors import DomainError, WorkBudget, budget_or_default
from .fqf import DEFAULT_MAX_ORDER, FiniteQuadraticForm, brown_invariant, is_isomorphic, rank_invariants
from .lattice import GramLattice, Isometry, discriminant_form, from_rows

_REDUCED = re.compile(r"^\s*M\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")


@dataclass(frozen=True, order=True)
class ReducedForm:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if not (0 < self.a <= self.c and 0 <= self.b <= self.a):
            raise DomainError(f"M({self.a},{self.b},{self.c}) is not reduced")

    @property
    def gram(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((2 * self.a, self.b), (self.b, 2 * self.c))

    @property
    def det(self) -> int:
        return 4 * self.a * self.c - self.b * self.b

    @cached_property
    def lattice(self) -> GramLattice:
        return from_rows(self.gram)

    @property
    def minimum(self) -> int:
        return 2 * self.a

    def __str__(self) -> str:
        return f"M({self.a},{self.b},{self.c})"


def parse_reduced(text: str) -> ReducedForm:
    match = _REDUCED.match(text)
    if match is None:
        raise DomainError(f"expected M(a,b,c), got {text!r}")
    return ReducedForm(*(int(g) for g in match.groups()))


def _check_binary(gram) -> tuple[int, int, int]:
    rows = [[int(v) for v in row] for row in gram]
    if len(rows) != 2 or any(len(r) != 2 for r in rows) or rows[0][1] != rows[1][0]:
        raise DomainError("expected a symmetric 2x2 Gram matrix")
    A, B, C = rows[0][0], rows[0][1], rows[1][1]
    if A % 2 or C % 2:
        raise DomainError("binary lattice is odd")
    if A <= 0 or A * C - B * B <= 0:
        raise DomainError("binary lattice is not positive definite")
    return A, B, C


def reduce(gram) -> tuple[ReducedForm, Isometry]:
    """Reduce by swaps (u,v) -> (v,u) and shears (u,v) -> (u, v - k u).

    Returns the reduced form and the change of basis P (columns: the new
    basis in old coordinates), so that P^t G P is the reduced Gram matrix.
    """
    A, B, C = _check_binary(gram)
    u, v = [1, 0], [0, 1]
    while True:
        if A > C:
            A, C = C, A
            u, v = v, u
        # nearest integer to B/A, ties towards zero
        k = (2 * B + A) // (2 * A)
        if 2 * (B - k * A) == -A:
            k -= 1
        if k:
            C = C - 2 * k * B + k * k * A
            B = B - k * A
            v = [v[0] - k * u[0], v[1] - k * u[1]]
        if A <= C and 2 * abs(B) <= A:
            break
    if B < 0:
        B = -B
        v = [-v[0], -v[1]]
    form = ReducedForm(A // 2, B, C // 2)
    return form, Isometry.from_columns([u, v])


# orthogonal groups


@dataclass(frozen=True)
class OrthCase:
    tag: str
    generators: tuple[Isometry, ...]
    order: int


def _iso(*columns) -> Isometry:
    return Isometry.from_columns(columns)


def orthogonal_group(m: ReducedForm) -> OrthCase:
    """O(M) from the six-way case table."""
    minus = _iso((-1, 0), (0, -1))
    a, b, c = m.a, m.b, m.c
    if b == 0 and a == c:
        return OrthCase("square", (_iso((-1, 0), (0, 1)), _iso((0, 1), (1, 0))), 8)
    if b == a == c:
        # rotation u -> v, v -> v - u and the reflection in u
        return OrthCase("hexagonal", (_iso((0, 1), (-1, 1)), _iso((-1, 0), (-1, 1))), 12)
    if a == c:
        return OrthCase("a=c", (minus, _iso((0, 1), (1, 0))), 4)
    if b == 0:
        return OrthCase("b=0", (minus, _iso((-1, 0), (0, 1))), 4)
    if b == a:
        return OrthCase("b=a", (minus, _iso((-1, 0), (-1, 1))), 4)
    return OrthCase("generic", (minus,), 2)


def orthogonal_elements(m: ReducedForm) -> list[Isometry]:
    """All elements of O(M), generated from the case table."""
    case = orthogonal_group(m)
    seen = {Isometry.identity(2)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for t in frontier:
            for g in case.generators:
                s = g.compose(t)
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return sorted(seen, key=lambda t: t.matrix)


def has_disorienting_isometry(m: ReducedForm) -> bool:
    return orthogonal_group(m).tag != "generic"


# genus enumeration


def all_reduced_forms(det: int) -> list[ReducedForm]:
    if det <= 0:
        raise DomainError(f"determinant must be positive, got {det}")
    out = []
    a = 1
    while 3 * a * a <= det:
        for b in range(a + 1):
            if (det + b * b) % (4 * a) == 0:
                c = (det + b * b) // (4 * a)
                if c >= a:
                    out.append(ReducedForm(a, b, c))
        a += 1
    return sorted(out)


def enumerate_genus(
    target: FiniteQuadraticForm,
    *,
    max_order: int = DEFAULT_MAX_ORDER,
    budget: WorkBudget | None = None,
) -> list[ReducedForm]:
    """Reduced forms whose discriminant form is isomorphic to ``target``."""
    budget = budget_or_default(budget)
    inv = rank_invariants(target)
    if inv.length > 2 or brown_invariant(target) != 2:
        return []
    out = []
    for m in all_reduced_forms(target.order):
        disc = discriminant_form(m.lattice).form
        if rank_invariants(disc) != inv:
            continue
        if is_isomorphic(disc, target, max_order=max_order, budget=budget):
            out.append(m)
    return out

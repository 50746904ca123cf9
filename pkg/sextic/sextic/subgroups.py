"""Subgroups of finite quadratic forms: isotropic kernels, orthogonal complements, quotients."""
from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product

from sympy import Matrix, factorint

from .automorphisms import FormAutomorphism
from .errors import BoundExceeded, DomainError, InternalInconsistency
from .fqf import DEFAULT_MAX_ORDER, Element, FiniteQuadraticForm, trivial_form
from .intmat import apply_rows, column_basis, fraction_rows, smith


def span(f: FiniteQuadraticForm, gens: Iterable[Element], start: Iterable[Element] = ()) -> frozenset[Element]:
    current = set(start) or {f.zero}
    for g in gens:
        if g in current:
            continue
        multiples = []
        y = f.zero
        while True:
            multiples.append(y)
            y = f.add(y, g)
            if y == f.zero:
                break
        current = {f.add(x, m) for x in current for m in multiples}
    return frozenset(current)


@dataclass(frozen=True)
class Subgroup:
    form: FiniteQuadraticForm = field(compare=False, hash=False, repr=False)
    elements: frozenset[Element]

    @classmethod
    def generated(cls, f: FiniteQuadraticForm, gens: Iterable[Element]) -> Subgroup:
        return cls(f, span(f, gens))

    @classmethod
    def trivial(cls, f: FiniteQuadraticForm) -> Subgroup:
        return cls(f, frozenset({f.zero}))

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def key(self) -> tuple[Element, ...]:
        return tuple(sorted(self.elements))

    @cached_property
    def generators(self) -> tuple[Element, ...]:
        """Greedy generating set: largest orders first, ties by coordinates."""
        f = self.form
        chosen: list[Element] = []
        current = frozenset({f.zero})
        for x in sorted(self.elements, key=lambda x: (-f.element_order(x), x)):
            if x not in current:
                chosen.append(x)
                current = span(f, [x], current)
                if len(current) == self.order:
                    break
        return tuple(chosen)

    @cached_property
    def invariants(self) -> tuple[int, ...]:
        """Invariant factors d_1 | d_2 | ... of the subgroup."""
        f = self.form
        factors: list[int] = []
        for p in sorted(factorint(self.order)):
            orders = [o for o in map(f.element_order, self.elements) if _is_p_power(o, p)]
            top = max(orders)
            # ranks[j] = log_p |{x : p^j x = 0}|
            ranks = [0]
            j = 1
            while p ** (j - 1) < top:
                ranks.append(_log(sum(1 for o in orders if p**j % o == 0), p))
                j += 1
            at_least = [ranks[j] - ranks[j - 1] for j in range(1, len(ranks))]
            powers = []
            for j, count in enumerate(at_least, start=1):
                exactly = count - (at_least[j] if j < len(at_least) else 0)
                powers.extend([p**j] * exactly)
            factors = _merge(factors, sorted(powers, reverse=True))
        return tuple(sorted(factors))

    def contains(self, x: Element) -> bool:
        return x in self.elements

    def image(self, a: FormAutomorphism) -> Subgroup:
        return Subgroup(self.form, frozenset(a(x) for x in self.elements))

    def is_isotropic(self) -> bool:
        return all(self.form.is_isotropic(x) for x in self.generators) and all(
            self.form.b_num(x, y) == 0 for i, x in enumerate(self.generators) for y in self.generators[i + 1 :]
        )

    def has_torsion(self, p: int) -> bool:
        return self.order % p == 0

    def primary(self, p: int) -> Subgroup:
        f = self.form
        return Subgroup(f, frozenset(x for x in self.elements if _is_p_power(f.element_order(x), p)))


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def _log(n: int, p: int) -> int:
    k = 0
    while n > 1:
        n //= p
        k += 1
    return k


def _merge(factors: list[int], powers: list[int]) -> list[int]:
    """Multiply coprime elementary divisors into invariant factors, largest first."""
    big = sorted(factors, reverse=True)
    out = []
    for i in range(max(len(big), len(powers))):
        a = big[i] if i < len(big) else 1
        b = powers[i] if i < len(powers) else 1
        out.append(a * b)
    return out


def _element_table(f: FiniteQuadraticForm, max_order: int) -> list[Element]:
    if f.order > max_order:
        raise BoundExceeded("subgroup enumeration over a form of order", max_order)
    return list(f.elements())


def isotropic_subgroups(
    f: FiniteQuadraticForm,
    *,
    max_order: int = DEFAULT_MAX_ORDER,
    accept: Callable[[Element], bool] | None = None,
) -> list[Subgroup]:
    """All isotropic subgroups, trivial included, sorted by (order, elements).

    ``accept`` prunes: subgroups containing a rejected element are dropped
    together with everything above them.
    """
    elements = _element_table(f, max_order)
    per_prime: list[list[frozenset[Element]]] = []
    for p in f.primes:
        candidates = [
            x
            for x in elements
            if x != f.zero and _is_p_power(f.element_order(x), p) and f.is_isotropic(x) and (accept is None or accept(x))
        ]
        found = {frozenset({f.zero})}
        frontier = list(found)
        while frontier:
            nxt = []
            for group in frontier:
                gens = Subgroup(f, group).generators
                for x in candidates:
                    if x in group or any(f.b_num(x, g) for g in gens):
                        continue
                    bigger = span(f, [x], group)
                    if bigger in found:
                        continue
                    if accept is not None and not all(accept(y) for y in bigger if y != f.zero):
                        continue
                    found.add(bigger)
                    nxt.append(bigger)
            frontier = nxt
        per_prime.append(sorted(found, key=lambda s: (len(s), sorted(s))))

    out = []
    for combo in product(*per_prime):
        group = frozenset({f.zero})
        for part in combo:
            group = frozenset(f.add(x, y) for x in group for y in part)
        out.append(Subgroup(f, group))
    return sorted(out, key=lambda s: (s.order, s.key))


def subgroup_perp(f: FiniteQuadraticForm, K: Subgroup, *, max_order: int = DEFAULT_MAX_ORDER) -> Subgroup:
    gens = K.generators
    return Subgroup(f, frozenset(x for x in _element_table(f, max_order) if all(f.b_num(x, k) == 0 for k in gens)))


@dataclass(frozen=True)
class Quotient:
    """K⊥/K with lifts of its generators and the projection from K⊥."""

    form: FiniteQuadraticForm
    ambient: FiniteQuadraticForm = field(repr=False)
    kernel: Subgroup = field(repr=False)
    lifts: tuple[Element, ...]
    _coords: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    def project(self, x: Element) -> Element:
        c = apply_rows(self._coords, x)
        if any(v.denominator != 1 for v in c):
            raise DomainError(f"{x} does not lie in the orthogonal complement of the kernel")
        return self.form.reduce(int(v) for v in c)

    def push(self, a: FormAutomorphism) -> FormAutomorphism:
        """The automorphism of K⊥/K induced by an automorphism preserving K."""
        return FormAutomorphism(self.form, (self.project(a(y)) for y in self.lifts))


def quotient(f: FiniteQuadraticForm, K: Subgroup, *, max_order: int = DEFAULT_MAX_ORDER) -> Quotient:
    if not K.is_isotropic():
        raise DomainError("quotient needs an isotropic subgroup")
    n = f.rank
    if f.order == 1 or n == 0:
        return Quotient(trivial_form(), f, K, (), ())
    perp = subgroup_perp(f, K, max_order=max_order)
    moduli = [tuple(d if j == i else 0 for j in range(n)) for i, d in enumerate(f.orders)]
    outer = column_basis([*perp.generators, *moduli], n)
    inner = column_basis([*K.generators, *moduli], n)
    outer_inv = outer.inv()
    sm = smith(outer_inv * inner)
    w = outer * sm.left.inv()
    coord = sm.left * outer_inv
    keep = [i for i, d in enumerate(sm.diagonal) if d > 1]
    lifts = tuple(f.reduce(int(w[r, i]) for r in range(n)) for i in keep)
    orders = tuple(sm.diagonal[i] for i in keep)
    if len(keep):
        rows = fraction_rows(Matrix.vstack(*(coord[i, :] for i in keep)))
    else:
        rows = ()
    q = tuple(tuple(f.q(a) if i == j else f.b(a, b) for j, b in enumerate(lifts)) for i, a in enumerate(lifts))
    form = FiniteQuadraticForm(orders, q)
    if form.order * K.order * K.order != f.order:
        raise InternalInconsistency("quotient order does not match |f|/|K|^2")
    return Quotient(form, f, K, lifts, rows)


def quotient_form(f: FiniteQuadraticForm, K: Subgroup, *, max_order: int = DEFAULT_MAX_ORDER) -> FiniteQuadraticForm:
    return quotient(f, K, max_order=max_order).form

"""Automorphism groups of finite quadratic forms and small permutation-group helpers.

Aut f is the product of the automorphism groups of the primary parts; each
factor is found by backtracking on generator images.  Groups are stored by
generators; full enumeration is bounded and explicit.
"""
from __future__ import annotations

from collections import deque
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass
from itertools import product
from typing import TypeVar

from .errors import BoundExceeded, InternalInconsistency, WorkBudget, budget_or_default
from .fqf import (
    DEFAULT_MAX_ORDER,
    Element,
    FiniteQuadraticForm,
    FormIsomorphism,
    _assemble,
    _generator_images,
    primary_part,
)

T = TypeVar("T", bound=Hashable)


class FormAutomorphism:
    """An automorphism of ``form`` given by the images of its generators.

    ``matrix[i][j]`` is the i-th coordinate of the image of g_j.
    """

    __slots__ = ("form", "images")

    def __init__(self, form: FiniteQuadraticForm, images: Iterable[Element]):
        self.form = form
        self.images = tuple(form.reduce(img) for img in images)

    @classmethod
    def identity(cls, form: FiniteQuadraticForm) -> FormAutomorphism:
        return cls(form, (form.unit(i) for i in range(form.rank)))

    @classmethod
    def scalar(cls, form: FiniteQuadraticForm, k: int) -> FormAutomorphism:
        return cls(form, (form.mul(k, form.unit(i)) for i in range(form.rank)))

    @classmethod
    def from_matrix(cls, form: FiniteQuadraticForm, matrix: Sequence[Sequence[int]]) -> FormAutomorphism:
        n = form.rank
        return cls(form, (tuple(matrix[i][j] for i in range(n)) for j in range(n)))

    @property
    def matrix(self) -> list[list[int]]:
        n = self.form.rank
        return [[self.images[j][i] for j in range(n)] for i in range(n)]

    def __call__(self, x: Element) -> Element:
        out = [0] * self.form.rank
        for c, img in zip(x, self.images):
            if c:
                for k, v in enumerate(img):
                    out[k] += c * v
        return self.form.reduce(out)

    def compose(self, other: FormAutomorphism) -> FormAutomorphism:
        """self ∘ other."""
        return FormAutomorphism(self.form, (self(y) for y in other.images))

    def is_identity(self) -> bool:
        return all(img == self.form.unit(i) for i, img in enumerate(self.images))

    def inverse(self) -> FormAutomorphism:
        f = self.form
        wanted = {f.unit(i): i for i in range(f.rank)}
        pre: dict[int, Element] = {}
        for x in f.elements():
            i = wanted.get(self(x))
            if i is not None:
                pre[i] = x
                if len(pre) == len(wanted):
                    break
        if len(pre) != len(wanted):
            raise InternalInconsistency("automorphism is not invertible")
        return FormAutomorphism(f, (pre[i] for i in range(f.rank)))

    def preserves_form(self) -> bool:
        f = self.form
        for i in range(f.rank):
            if f.q(self.images[i]) != f.q_matrix[i][i]:
                return False
            for j in range(i + 1, f.rank):
                if f.b(self.images[i], self.images[j]) != f.q_matrix[i][j]:
                    return False
        return True

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FormAutomorphism) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __lt__(self, other: FormAutomorphism) -> bool:
        return self.images < other.images

    def __repr__(self) -> str:
        return f"FormAutomorphism({self.matrix})"


def closure(
    generators: Iterable[FormAutomorphism],
    identity: FormAutomorphism,
    *,
    limit: int = DEFAULT_MAX_ORDER,
) -> list[FormAutomorphism]:
    """All products of the generators, sorted."""
    generators = list(generators)
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for a in frontier:
            for g in generators:
                c = g.compose(a)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
                    if len(seen) > limit:
                        raise BoundExceeded("automorphism subgroup order", limit)
        frontier = nxt
    return sorted(seen)


def orbit_partition(
    items: Iterable[T],
    generators: Sequence[FormAutomorphism],
    act: Callable[[FormAutomorphism, T], T],
) -> list[list[T]]:
    """Orbits of the group generated by ``generators``, one per first-seen item."""
    seen: set[T] = set()
    orbits = []
    for item in items:
        if item in seen:
            continue
        seen.add(item)
        orbit = [item]
        queue = deque([item])
        while queue:
            y = queue.popleft()
            for g in generators:
                z = act(g, y)
                if z not in seen:
                    seen.add(z)
                    orbit.append(z)
                    queue.append(z)
        orbits.append(orbit)
    return orbits


def stabilizer(
    generators: Sequence[FormAutomorphism],
    point: T,
    act: Callable[[FormAutomorphism, T], T],
    identity: FormAutomorphism,
    *,
    limit: int = DEFAULT_MAX_ORDER,
) -> list[FormAutomorphism]:
    """Schreier generators of the stabilizer of ``point``."""
    transversal = {point: identity}
    queue = deque([point])
    found: set[FormAutomorphism] = set()
    while queue:
        y = queue.popleft()
        for g in generators:
            z = act(g, y)
            u = g.compose(transversal[y])
            if z not in transversal:
                transversal[z] = u
                queue.append(z)
                if len(transversal) > limit:
                    raise BoundExceeded("orbit size", limit)
            else:
                s = transversal[z].inverse().compose(u)
                if not s.is_identity():
                    found.add(s)
    return sorted(found)


@dataclass(frozen=True)
class AutomorphismGroup:
    form: FiniteQuadraticForm
    generators: tuple[FormAutomorphism, ...]
    order: int

    def identity(self) -> FormAutomorphism:
        return FormAutomorphism.identity(self.form)

    def elements(self, *, limit: int = DEFAULT_MAX_ORDER) -> list[FormAutomorphism]:
        if self.order > limit:
            raise BoundExceeded("automorphism group order", limit)
        return closure(self.generators, self.identity(), limit=limit)


def _primary_automorphisms(
    fp: FiniteQuadraticForm, p: int, *, max_order: int, budget: WorkBudget
) -> list[tuple[Element, ...]]:
    found = []
    for images in _generator_images(fp, fp, budget=budget, max_order=max_order, prime=p):
        found.append(images)
        if len(found) > max_order:
            raise BoundExceeded("automorphism group order", max_order, p)
    return found


def _lift(f: FiniteQuadraticForm, parts: dict[int, FormIsomorphism]) -> FormAutomorphism:
    return FormAutomorphism(f, _assemble(f, f, parts).images)


def _identity_parts(f: FiniteQuadraticForm) -> dict[int, FormIsomorphism]:
    parts = {}
    for p in f.primes:
        fp = primary_part(f, p)
        parts[p] = FormIsomorphism(fp, fp, tuple(fp.unit(i) for i in range(fp.rank)))
    return parts


def enumerate_automorphisms(
    f: FiniteQuadraticForm, *, max_order: int = DEFAULT_MAX_ORDER, budget: WorkBudget | None = None
) -> list[FormAutomorphism]:
    """Every element of Aut f, sorted."""
    budget = budget_or_default(budget)
    per_prime = {}
    total = 1
    for p in f.primes:
        fp = primary_part(f, p)
        per_prime[p] = (fp, _primary_automorphisms(fp, p, max_order=max_order, budget=budget))
        total *= len(per_prime[p][1])
        if total > max_order:
            raise BoundExceeded("automorphism group order", max_order, p)
    out = []
    primes = list(per_prime)
    for choice in product(*(per_prime[p][1] for p in primes)):
        parts = {p: FormIsomorphism(per_prime[p][0], per_prime[p][0], img) for p, img in zip(primes, choice)}
        out.append(_lift(f, parts))
    return sorted(out)


def automorphisms(
    f: FiniteQuadraticForm, *, max_order: int = DEFAULT_MAX_ORDER, budget: WorkBudget | None = None
) -> AutomorphismGroup:
    """Aut f as generators plus order, computed prime by prime."""
    budget = budget_or_default(budget)
    generators: list[FormAutomorphism] = []
    order = 1
    for p in f.primes:
        fp = primary_part(f, p)
        local = _primary_automorphisms(fp, p, max_order=max_order, budget=budget)
        order *= len(local)
        if order > max_order:
            raise BoundExceeded("automorphism group order", max_order, p)
        local_aut = [FormAutomorphism(fp, img) for img in local]
        span = {FormAutomorphism.identity(fp)}
        chosen = []
        for a in sorted(local_aut):
            if a not in span:
                chosen.append(a)
                span = set(closure(chosen, FormAutomorphism.identity(fp), limit=max_order))
        for a in chosen:
            parts = _identity_parts(f)
            parts[p] = FormIsomorphism(fp, fp, a.images)
            generators.append(_lift(f, parts))
    return AutomorphismGroup(f, tuple(generators), order)

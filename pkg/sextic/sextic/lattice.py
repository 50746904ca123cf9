"""Even integral lattices given by exact integer Gram matrices.

Roots have square -2 (root systems are negative definite); rank-2
complements are stored positive definite.  All arithmetic is exact.
"""
from __future__ import annotations

import re
from collections import Counter
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, isqrt, lcm
from pathlib import Path

from sympy import Matrix

from .automorphisms import FormAutomorphism
from .errors import BoundExceeded, DomainError, InternalInconsistency, WorkBudget, budget_or_default
from .fqf import FiniteQuadraticForm
from .fqf import direct_sum as direct_sum_forms
from .intmat import column_basis, fraction_rows, smith

Vector = tuple[int, ...]
RationalVector = tuple[Fraction, ...]


@dataclass(frozen=True)
class GramLattice:
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.gram)
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise DomainError("Gram matrix must be square")
        if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
            raise DomainError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", rows)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def matrix(self) -> Matrix:
        return Matrix(self.rank, self.rank, lambda i, j: self.gram[i][j])

    @property
    def det(self) -> int:
        if self.rank == 0:
            return 1
        return int(self.matrix().det(method="bareiss"))

    def dot(self, x: Sequence, y: Sequence):
        G = self.gram
        return sum(x[i] * G[i][j] * y[j] for i in range(self.rank) if x[i] for j in range(self.rank) if y[j])

    def norm(self, x: Sequence):
        return self.dot(x, x)

    def negated(self) -> GramLattice:
        return GramLattice(tuple(tuple(-v for v in row) for row in self.gram))

    def __str__(self) -> str:
        return format_gram(self)


@dataclass(frozen=True)
class Isometry:
    """Integer matrix T acting on column vectors with T^t G T = G."""

    matrix: tuple[tuple[int, ...], ...]

    @classmethod
    def identity(cls, n: int) -> Isometry:
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> Isometry:
        n = len(columns)
        return cls(tuple(tuple(int(columns[j][i]) for j in range(n)) for i in range(n)))

    def __call__(self, x: Sequence):
        return tuple(sum(row[j] * x[j] for j in range(len(x))) for row in self.matrix)

    def compose(self, other: Isometry) -> Isometry:
        """self ∘ other."""
        m = Matrix(self.matrix) * Matrix(other.matrix)
        return Isometry(tuple(tuple(int(v) for v in m.row(i)) for i in range(m.rows)))

    @property
    def det(self) -> int:
        return int(Matrix(self.matrix).det()) if self.matrix else 1

    def preserves(self, L: GramLattice) -> bool:
        T = Matrix(self.matrix)
        return T.T * L.matrix() * T == L.matrix()


@dataclass(frozen=True)
class LatticeInvariants:
    det: int
    signature: tuple[int, int]
    even: bool
    radical: int = 0


def _signature(G: Sequence[Sequence[int]]) -> tuple[int, int, int]:
    """(σ+, σ-, radical) by exact symmetric elimination."""
    n = len(G)
    A = [[Fraction(v) for v in row] for row in G]
    active = list(range(n))
    pos = neg = 0
    while active:
        pivot = next((i for i in active if A[i][i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in active for j in active if i < j and A[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # e_i -> e_i + e_j makes the diagonal entry 2 A_ij
            for k in range(n):
                A[i][k] += A[j][k]
            for k in range(n):
                A[k][i] += A[k][j]
            pivot = i
        p = A[pivot][pivot]
        if p > 0:
            pos += 1
        else:
            neg += 1
        active.remove(pivot)
        for r in active:
            if A[r][pivot]:
                factor = A[r][pivot] / p
                for c in active:
                    A[r][c] -= factor * A[pivot][c]
    return pos, neg, len(active)


def invariants(L: GramLattice) -> LatticeInvariants:
    pos, neg, rad = _signature(L.gram)
    return LatticeInvariants(L.det, (pos, neg), L.is_even, rad)


def is_unimodular(L: GramLattice) -> bool:
    return abs(L.det) == 1


# construction


def from_rows(rows: Iterable[Iterable[int]]) -> GramLattice:
    return GramLattice(tuple(tuple(row) for row in rows))


def diagonal(*values: int) -> GramLattice:
    return GramLattice(tuple(tuple(v if i == j else 0 for j in range(len(values))) for i, v in enumerate(values)))


def hyperbolic_plane() -> GramLattice:
    return GramLattice(((0, 1), (1, 0)))


def direct_sum(*lattices: GramLattice) -> GramLattice:
    n = sum(L.rank for L in lattices)
    rows = [[0] * n for _ in range(n)]
    at = 0
    for L in lattices:
        for i in range(L.rank):
            for j in range(L.rank):
                rows[at + i][at + j] = L.gram[i][j]
        at += L.rank
    return from_rows(rows)


def rescale(L: GramLattice, n: int) -> GramLattice:
    """L(n): all products multiplied by n."""
    return GramLattice(tuple(tuple(n * v for v in row) for row in L.gram))


def copies(L: GramLattice, n: int) -> GramLattice:
    return direct_sum(*([L] * n))


# Gram text format: "rank n" then n rows


def format_gram(L: GramLattice) -> str:
    lines = [f"rank {L.rank}"]
    lines.extend(" ".join(str(v) for v in row) for row in L.gram)
    return "\n".join(lines) + "\n"


def parse_gram(text: str) -> GramLattice:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise DomainError("empty Gram text")
    header = re.fullmatch(r"rank\s+(\d+)", lines[0])
    if header is None:
        raise DomainError(f"Gram text must start with 'rank n', got {lines[0]!r}")
    n = int(header.group(1))
    if len(lines) - 1 != n:
        raise DomainError(f"expected {n} Gram rows, found {len(lines) - 1}")
    try:
        rows = [[int(tok) for tok in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise DomainError(f"non-integer Gram entry: {exc}") from exc
    return from_rows(rows)


def read_gram(path: Path) -> GramLattice:
    if not path.exists():
        raise DomainError(f"Missing Gram file: {path}")
    return parse_gram(path.read_text(encoding="utf-8"))


def write_gram(path: Path, L: GramLattice, comment: str | None = None) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    header = f"# {comment}\n" if comment else ""
    path.write_text(header + format_gram(L), encoding="utf-8")


# discriminant forms


@dataclass(frozen=True)
class DiscriminantData:
    """discr L with lifts of its generators to L* and a coordinate map L* -> discr."""

    form: FiniteQuadraticForm
    lifts: tuple[RationalVector, ...]
    _coords: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    def coordinates(self, x: Sequence) -> tuple[int, ...]:
        values = [sum((a * Fraction(b) for a, b in zip(row, x)), Fraction(0)) for row in self._coords]
        if any(v.denominator != 1 for v in values):
            raise DomainError(f"{tuple(x)} is not in the dual lattice")
        return self.form.reduce(int(v) for v in values)


def discriminant_form(L: GramLattice) -> DiscriminantData:
    if not L.is_even:
        raise DomainError("discriminant form needs an even lattice")
    if L.rank == 0:
        return DiscriminantData(FiniteQuadraticForm((), ()), (), ())
    if L.det == 0:
        raise DomainError("discriminant form needs a nondegenerate lattice")
    G = L.matrix()
    sm = smith(G)
    g_inv = G.inv()
    s_inv = sm.left.inv()
    keep = [i for i, d in enumerate(sm.diagonal) if d > 1]
    lift_matrix = fraction_rows(g_inv * s_inv)
    lifts = tuple(tuple(lift_matrix[r][i] for r in range(L.rank)) for i in keep)
    coord = sm.left * G
    rows = fraction_rows(Matrix.vstack(*(coord[i, :] for i in keep))) if keep else ()
    q = tuple(
        tuple(L.dot(a, b) if i != j else L.norm(a) for j, b in enumerate(lifts)) for i, a in enumerate(lifts)
    )
    form = FiniteQuadraticForm(tuple(sm.diagonal[i] for i in keep), q)
    return DiscriminantData(form, lifts, rows)


def combine_discriminants(parts: Sequence[tuple[DiscriminantData, int]]) -> DiscriminantData:
    """discr of an orthogonal sum from (data, lattice rank) of its summands."""
    total = sum(rank for _, rank in parts)
    lifts: list[RationalVector] = []
    rows: list[tuple[Fraction, ...]] = []
    at = 0
    for data, rank in parts:
        pad_left, pad_right = (Fraction(0),) * at, (Fraction(0),) * (total - at - rank)
        lifts.extend(pad_left + tuple(v) + pad_right for v in data.lifts)
        rows.extend(pad_left + tuple(r) + pad_right for r in data._coords)
        at += rank
    form = direct_sum_forms(*(data.form for data, _ in parts))
    return DiscriminantData(form, tuple(lifts), tuple(rows))


def dual_coordinates(data: DiscriminantData, x: Sequence) -> tuple[int, ...]:
    return data.coordinates(x)


def discriminant_action(data: DiscriminantData, t: Isometry) -> FormAutomorphism:
    return FormAutomorphism(data.form, (data.coordinates(t(lift)) for lift in data.lifts))


# vector enumeration


def _ldl(G: Sequence[Sequence[int]]) -> tuple[list[Fraction], list[list[Fraction]]]:
    n = len(G)
    d = [Fraction(0)] * n
    low = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        d[j] = G[j][j] - sum((low[j][k] ** 2 * d[k] for k in range(j)), Fraction(0))
        if d[j] <= 0:
            raise DomainError("lattice is not definite")
        for i in range(j + 1, n):
            low[i][j] = (G[i][j] - sum((low[i][k] * low[j][k] * d[k] for k in range(j)), Fraction(0))) / d[j]
    return d, low


def _definite_gram(L: GramLattice) -> tuple[tuple[tuple[int, ...], ...], int]:
    """Positive definite Gram and the sign that maps norms of L to it."""
    pos, neg, rad = _signature(L.gram)
    if rad or (pos and neg):
        raise DomainError("vector enumeration needs a definite lattice")
    sign = 1 if neg == 0 else -1
    return tuple(tuple(sign * v for v in row) for row in L.gram), sign


def _enumerate(
    G: Sequence[Sequence[int]],
    bound: Fraction,
    shift: Sequence[Fraction],
    budget: WorkBudget,
) -> Iterator[tuple[Vector, Fraction]]:
    """Integer x with (x+shift)^t G (x+shift) <= bound, G positive definite."""
    n = len(G)
    if n == 0:
        yield (), Fraction(0)
        return
    d, low = _ldl(G)
    y = [Fraction(0)] * n
    x = [0] * n

    def level(i: int, remaining: Fraction) -> Iterator[tuple[Vector, Fraction]]:
        center = shift[i] + sum((low[j][i] * y[j] for j in range(i + 1, n)), Fraction(0))
        t = remaining / d[i]
        r = isqrt(ceil(t)) + 1
        for xi in range(floor(-center) - r, ceil(-center) + r + 1):
            budget.tick()
            term = d[i] * (xi + center) ** 2
            if term > remaining:
                continue
            x[i] = xi
            y[i] = xi + shift[i]
            if i == 0:
                yield tuple(x), bound - (remaining - term)
            else:
                yield from level(i - 1, remaining - term)

    yield from level(n - 1, Fraction(bound))


def short_vectors(L: GramLattice, norm_target: int, *, budget: WorkBudget | None = None) -> list[Vector]:
    """All v in L with v^2 == norm_target, sorted; L must be definite."""
    G, sign = _definite_gram(L)
    target = sign * norm_target
    if target < 0:
        return []
    budget = budget_or_default(budget)
    zero = [Fraction(0)] * L.rank
    found = [v for v, nrm in _enumerate(G, Fraction(target), zero, budget) if nrm == target]
    return sorted(found)


def coset_norm_counts(
    L: GramLattice, shift: Sequence, bound: int, *, budget: WorkBudget | None = None
) -> Counter:
    """Counter of |v^2| over v in shift + L with |v^2| <= bound; L definite, shift in L ⊗ Q."""
    G, _ = _definite_gram(L)
    budget = budget_or_default(budget)
    frac = [Fraction(s) for s in shift]
    return Counter(nrm for _, nrm in _enumerate(G, Fraction(bound), frac, budget))


# roots


_DYNKIN_E = {(1, 2, 2): "E6", (1, 2, 3): "E7", (1, 2, 4): "E8"}


@dataclass(frozen=True)
class RootSublattice:
    lattice: GramLattice
    basis: tuple[Vector, ...]
    label: str
    root_count: int


def _component_label(nodes: list[int], edges: dict[int, set[int]]) -> str:
    n = len(nodes)
    branches = [v for v in nodes if len(edges[v]) == 3]
    if not branches:
        return f"A{n}"
    center = branches[0]
    arms = []
    for start in edges[center]:
        length, prev, cur = 1, center, start
        while True:
            nxt = [w for w in edges[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return f"D{n}"
    label = _DYNKIN_E.get(tuple(arms))
    if label is None:
        raise InternalInconsistency(f"root system with arms {arms} is not simply laced ADE")
    return label


def _label_sort_key(label: str) -> tuple[int, int]:
    return ("EDA".index(label[0]), -int(label[1:]))


def root_sublattice(L: GramLattice, *, budget: WorkBudget | None = None) -> RootSublattice:
    """Sublattice generated by roots (square -2 in the negative definite convention)."""
    _, sign = _definite_gram(L)
    roots = short_vectors(L, -2 * sign, budget=budget)
    if not roots:
        return RootSublattice(GramLattice(()), (), "0", 0)
    bound = max(abs(c) for r in roots for c in r)
    weights = [(2 * bound + 1) ** i for i in range(L.rank)]
    positive = [r for r in roots if sum(w * c for w, c in zip(weights, r)) > 0]
    pos_set = set(positive)
    simple = [
        r for r in positive if not any(tuple(a - b for a, b in zip(r, s)) in pos_set for s in positive if s != r)
    ]
    edges: dict[int, set[int]] = {i: set() for i in range(len(simple))}
    for i in range(len(simple)):
        for j in range(i + 1, len(simple)):
            if L.dot(simple[i], simple[j]):
                edges[i].add(j)
                edges[j].add(i)
    seen: set[int] = set()
    labels = []
    for start in range(len(simple)):
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in edges[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        labels.append(_component_label(comp, edges))
    labels.sort(key=_label_sort_key)
    B = Matrix.hstack(*(Matrix(list(r)) for r in simple))
    sub = from_rows((B.T * L.matrix() * B).tolist())
    label = "+".join(labels)
    return RootSublattice(sub, tuple(simple), label, len(roots))


def reflection(L: GramLattice, a: Sequence[int]) -> Isometry:
    """t_a: x -> x - 2 (a.x / a^2) a."""
    a2 = L.norm(a)
    if a2 == 0:
        raise DomainError("cannot reflect in an isotropic vector")
    columns = []
    for j in range(L.rank):
        ga = sum(L.gram[j][k] * a[k] for k in range(L.rank))
        c = Fraction(2 * ga, a2)
        if c.denominator != 1:
            raise DomainError(f"reflection in {tuple(a)} is not integral")
        columns.append(tuple(int(j == i) - int(c) * a[i] for i in range(L.rank)))
    return Isometry.from_columns(columns)


# extensions


@dataclass(frozen=True)
class Extension:
    lattice: GramLattice
    basis: tuple[RationalVector, ...]
    index: int


def finite_index_extension(L: GramLattice, kernel_lifts: Sequence[Sequence]) -> Extension:
    """The overlattice generated by L and the given vectors of L*."""
    n = L.rank
    lifts = [tuple(Fraction(v) for v in x) for x in kernel_lifts]
    denom = lcm(1, *(v.denominator for x in lifts for v in x))
    gens = [tuple(int(v * denom) for v in x) for x in lifts]
    gens += [tuple(denom if i == j else 0 for j in range(n)) for i in range(n)]
    B = column_basis(gens, n) / denom
    entries = fraction_rows(B)
    basis = tuple(tuple(entries[i][j] for i in range(n)) for j in range(n))
    gram = B.T * L.matrix() * B
    if any(v.q != 1 for v in gram):
        raise DomainError("kernel is not isotropic: the extension is not integral")
    ext = from_rows(gram.tolist())
    if not ext.is_even:
        raise DomainError("kernel is not isotropic: the extension is odd")
    det_b = B.det()
    index = int(1 / abs(det_b))
    if ext.det * index * index != L.det:
        raise InternalInconsistency("extension determinant does not match det L / index^2")
    return Extension(ext, basis, index)


# isometries of definite lattices


def definite_isometries(
    L: GramLattice, *, max_rank: int = 8, budget: WorkBudget | None = None
) -> list[Isometry]:
    """The finite group O(L) of a definite lattice, by backtracking on basis images."""
    if L.rank > max_rank:
        raise BoundExceeded("isometry search rank", max_rank)
    budget = budget_or_default(budget)
    n = L.rank
    by_norm = {v: short_vectors(L, v, budget=budget) for v in {L.gram[i][i] for i in range(n)}}
    cands = [by_norm[L.gram[i][i]] for i in range(n)]
    chosen: list[Vector] = []
    out = []

    def extend(i: int) -> None:
        if i == n:
            out.append(Isometry.from_columns(chosen))
            return
        for v in cands[i]:
            budget.tick()
            if all(L.dot(v, chosen[j]) == L.gram[i][j] for j in range(i)):
                chosen.append(v)
                extend(i + 1)
                chosen.pop()

    extend(0)
    return sorted(out, key=lambda t: t.matrix)


def orientation_character(L: GramLattice, t: Isometry) -> int:
    """+1 iff t preserves the orientation of positive definite planes."""
    pos, neg, _ = _signature(L.gram)
    if (pos, neg) != (2, 0):
        raise DomainError("orientation character is implemented for positive definite rank-2 lattices")
    return t.det

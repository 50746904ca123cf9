"""Finite quadratic forms (discriminant forms of even lattices).

A form lives on the group ⊕ Z/d_i.  ``q_matrix`` carries q(g_i) mod 2 on the
diagonal and b(g_i, g_j) mod 1 off the diagonal; elements are coordinate
tuples reduced modulo the orders.  Every value is exact: rationals are
``fractions.Fraction`` and Gauss sums are evaluated in a cyclotomic ring.
"""
from __future__ import annotations

import re
from collections import Counter, defaultdict
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations, combinations_with_replacement, product
from math import gcd, lcm, prod
from typing import Literal

from sympy import factorint, multiplicity
from sympy.functions.combinatorial.numbers import legendre_symbol

from .cyclotomic import gauss_brown
from .errors import BoundExceeded, DomainError, InternalInconsistency, WorkBudget, budget_or_default
from .intmat import rank_mod_p

Element = tuple[int, ...]
BlockKind = Literal["cyclic", "U", "V"]

DEFAULT_MAX_ORDER = 4096
UNDEFINED_ODD_2ADIC = "undefined-odd-2-adic"

_KIND_RANK = {"cyclic": 0, "U": 1, "V": 2}


def _balanced(m: int, n: int) -> int:
    """Representative of m mod 2n in (-n, n]."""
    r = m % (2 * n)
    return r - 2 * n if r > n else r


def _smallest_prime(n: int) -> int:
    return min(factorint(n))


def _require_nondegenerate(orders: tuple[int, ...], norm: list[tuple[Fraction, ...]]) -> None:
    """Reject b with a kernel: some element of order p would pair trivially with every generator."""
    primes = sorted({p for d in orders if d > 1 for p in factorint(d)})
    for p in primes:
        socle = [i for i, d in enumerate(orders) if d % p == 0]
        rows = [[int(orders[i] * (norm[i][j] % 1)) % p for j in range(len(orders))] for i in socle]
        if rank_mod_p(rows, p) < len(socle):
            raise DomainError(f"degenerate form: an element of order {p} pairs trivially with the group")


@dataclass(frozen=True)
class FormBlock:
    """One orthogonal summand: ⟨m/n⟩, U(2^k) or V(2^k)."""

    kind: BlockKind
    numerator: int
    order: int

    def __post_init__(self):
        if self.kind == "cyclic":
            m, n = self.numerator, self.order
            if n < 2:
                raise DomainError(f"cyclic block <{m}/{n}> needs order at least 2")
            if gcd(m, n) != 1:
                raise DomainError(f"<{m}/{n}> is not a reduced fraction")
            if (m * n) % 2:
                raise DomainError(f"<{m}/{n}> has odd numerator and odd order")
            object.__setattr__(self, "numerator", _balanced(m, n))
        elif self.kind in ("U", "V"):
            n = self.order
            if n < 2 or n & (n - 1):
                raise DomainError(f"{self.kind}({n}) needs a power of two at least 2")
            object.__setattr__(self, "numerator", 0)
        else:
            raise DomainError(f"unknown block kind {self.kind!r}")

    @classmethod
    def cyclic(cls, m: int, n: int) -> FormBlock:
        return cls("cyclic", m, n)

    @classmethod
    def plane(cls, kind: BlockKind, k: int) -> FormBlock:
        return cls(kind, 0, 2**k)

    @property
    def prime(self) -> int:
        return _smallest_prime(self.order)

    @property
    def exponent(self) -> int:
        return multiplicity(self.prime, self.order)

    @property
    def rank(self) -> int:
        return 1 if self.kind == "cyclic" else 2

    @property
    def size(self) -> int:
        return self.order**self.rank

    @property
    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.prime, self.exponent, _KIND_RANK[self.kind], self.numerator % (2 * self.order))

    def q_matrix(self) -> list[list[Fraction]]:
        n = self.order
        if self.kind == "cyclic":
            return [[Fraction(self.numerator, n)]]
        half = Fraction(1, n)
        diag = Fraction(0) if self.kind == "U" else 2 * half
        return [[diag, half], [half, diag]]

    def is_prime_power(self) -> bool:
        return len(factorint(self.order)) == 1

    def primary_blocks(self) -> list[FormBlock]:
        """Split a cyclic block of composite order into its primary pieces."""
        if self.is_prime_power():
            return [self]
        out = []
        for p, e in sorted(factorint(self.order).items()):
            pe = p**e
            cof = self.order // pe
            # q(cof*g) = cof^2 m / n = cof*m / p^e
            out.append(FormBlock.cyclic(self.numerator * cof, pe))
        return out

    def brown(self) -> int:
        if not self.is_prime_power():
            return sum(b.brown() for b in self.primary_blocks()) % 8
        if self.kind == "U":
            return 0
        if self.kind == "V":
            return (4 * self.exponent) % 8
        p, k, m = self.prime, self.exponent, self.numerator
        if p == 2:
            return (m + k * (m * m - 1) // 2) % 8
        if k % 2 == 0:
            return 0
        a = int(legendre_symbol((m // 2) % p, p))
        return (2 * a - int(legendre_symbol(p - 1, p)) - 1) % 8

    def __str__(self) -> str:
        if self.kind == "cyclic":
            return f"<{self.numerator}/{self.order}>"
        return f"{self.kind}({self.order})"


@dataclass(frozen=True)
class FiniteQuadraticForm:
    orders: tuple[int, ...]
    q_matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        orders = tuple(int(d) for d in self.orders)
        n = len(orders)
        rows = [[Fraction(v) for v in row] for row in self.q_matrix]
        if len(rows) != n or any(len(row) != n for row in rows):
            raise DomainError("q_matrix must be square with one row per generator")
        if any(d < 1 for d in orders):
            raise DomainError(f"generator orders must be positive, got {orders}")
        norm = []
        for i in range(n):
            row = []
            for j in range(n):
                if rows[i][j] != rows[j][i]:
                    raise DomainError("q_matrix must be symmetric")
                row.append(rows[i][j] % 2 if i == j else rows[i][j] % 1)
            norm.append(tuple(row))
        for i, d in enumerate(orders):
            if (d * norm[i][i]).denominator != 1 or (d * d * norm[i][i]) % 2:
                raise DomainError(f"q(g_{i}) = {norm[i][i]} is incompatible with order {d}")
            for j in range(n):
                if i != j and (d * norm[i][j]).denominator != 1:
                    raise DomainError(f"b(g_{i}, g_{j}) = {norm[i][j]} is incompatible with order {d}")
        _require_nondegenerate(orders, norm)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "q_matrix", tuple(norm))

    # integer encoding: values scaled by a common denominator
    @cached_property
    def _scale(self) -> int:
        return reduce(lcm, (v.denominator for row in self.q_matrix for v in row), 1)

    @cached_property
    def _num(self) -> tuple[tuple[int, ...], ...]:
        s = self._scale
        return tuple(tuple(int(v * s) for v in row) for row in self.q_matrix)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @cached_property
    def order(self) -> int:
        return prod(self.orders)

    @cached_property
    def primes(self) -> tuple[int, ...]:
        return tuple(sorted(factorint(self.order)))

    @property
    def zero(self) -> Element:
        return (0,) * len(self.orders)

    def unit(self, i: int) -> Element:
        return tuple(1 if j == i else 0 for j in range(len(self.orders)))

    def reduce(self, x: Iterable[int]) -> Element:
        return tuple(v % d for v, d in zip(x, self.orders))

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def sub(self, x: Element, y: Element) -> Element:
        return tuple((a - b) % d for a, b, d in zip(x, y, self.orders))

    def neg(self, x: Element) -> Element:
        return tuple(-a % d for a, d in zip(x, self.orders))

    def mul(self, k: int, x: Element) -> Element:
        return tuple(k * a % d for a, d in zip(x, self.orders))

    def element_order(self, x: Element) -> int:
        return reduce(lcm, (d // gcd(a, d) for a, d in zip(x, self.orders)), 1)

    def elements(self) -> Iterator[Element]:
        return product(*(range(d) for d in self.orders))

    def q_num(self, x: Element) -> int:
        """q(x) * scale, reduced modulo 2 * scale."""
        Q = self._num
        total = 0
        n = len(x)
        for i in range(n):
            xi = x[i]
            if not xi:
                continue
            total += xi * xi * Q[i][i]
            for j in range(i + 1, n):
                if x[j]:
                    total += 2 * xi * x[j] * Q[i][j]
        return total % (2 * self._scale)

    def b_num(self, x: Element, y: Element) -> int:
        Q = self._num
        total = 0
        for i, xi in enumerate(x):
            if xi:
                row = Q[i]
                total += xi * sum(yj * row[j] for j, yj in enumerate(y) if yj)
        return total % self._scale

    def q(self, x: Element) -> Fraction:
        return Fraction(self.q_num(x), self._scale)

    def b(self, x: Element, y: Element) -> Fraction:
        return Fraction(self.b_num(x, y), self._scale)

    def is_isotropic(self, x: Element) -> bool:
        return self.q_num(x) == 0

    def __str__(self) -> str:
        return format_form(greedy_blocks(self))


Form = FiniteQuadraticForm


def trivial_form() -> FiniteQuadraticForm:
    return FiniteQuadraticForm((), ())


def _block_diagonal(orders: list[int], pieces: list[list[list[Fraction]]]) -> FiniteQuadraticForm:
    n = len(orders)
    q = [[Fraction(0)] * n for _ in range(n)]
    at = 0
    for piece in pieces:
        for i, row in enumerate(piece):
            for j, v in enumerate(row):
                q[at + i][at + j] = v
        at += len(piece)
    return FiniteQuadraticForm(tuple(orders), tuple(tuple(row) for row in q))


def from_blocks(blocks: Iterable[FormBlock]) -> FiniteQuadraticForm:
    blocks = list(blocks)
    orders = [b.order for b in blocks for _ in range(b.rank)]
    return _block_diagonal(orders, [b.q_matrix() for b in blocks])


def direct_sum(*forms: FiniteQuadraticForm) -> FiniteQuadraticForm:
    orders = [d for f in forms for d in f.orders]
    return _block_diagonal(orders, [[list(row) for row in f.q_matrix] for f in forms])


def negate(f: FiniteQuadraticForm) -> FiniteQuadraticForm:
    return FiniteQuadraticForm(f.orders, tuple(tuple(-v for v in row) for row in f.q_matrix))


# primary decomposition


def _layout(f: FiniteQuadraticForm, p: int) -> list[tuple[int, int, int]]:
    """(index, p-power part, cofactor) of every generator whose order p divides."""
    out = []
    for i, d in enumerate(f.orders):
        if d % p == 0:
            pe = p ** multiplicity(p, d)
            out.append((i, pe, d // pe))
    return out


def primary_part(f: FiniteQuadraticForm, p: int) -> FiniteQuadraticForm:
    """The p-primary component, generated by cofactor * g_i."""
    lay = _layout(f, p)
    orders = tuple(pe for _, pe, _ in lay)
    rows = tuple(tuple(f.q_matrix[i][j] * mi * mj for j, _, mj in lay) for i, _, mi in lay)
    return FiniteQuadraticForm(orders, rows)


def split_element(f: FiniteQuadraticForm, x: Element) -> dict[int, Element]:
    """Coordinates of the primary components of x in the primary_part generators."""
    return {p: tuple(x[i] * pow(m, -1, pe) % pe for i, pe, m in _layout(f, p)) for p in f.primes}


def join_element(f: FiniteQuadraticForm, parts: dict[int, Element]) -> Element:
    out = [0] * len(f.orders)
    for p, y in parts.items():
        for (i, _, m), c in zip(_layout(f, p), y):
            out[i] += c * m
    return f.reduce(out)


# invariants


def elementary_divisors(f: FiniteQuadraticForm, p: int) -> tuple[int, ...]:
    return tuple(sorted((pe for _, pe, _ in _layout(f, p)), reverse=True))


def invariant_factors(f: FiniteQuadraticForm) -> tuple[int, ...]:
    """d_1 | d_2 | ... | d_l with the group ≅ ⊕ Z/d_i."""
    per_prime = [elementary_divisors(f, p) for p in f.primes]
    length = max((len(e) for e in per_prime), default=0)
    factors = [prod(e[j] for e in per_prime if j < len(e)) for j in range(length)]
    return tuple(sorted(factors))


def exponent(f: FiniteQuadraticForm) -> int:
    return reduce(lcm, f.orders, 1)


def is_even(f: FiniteQuadraticForm) -> bool:
    """Even iff every element of order two has integral square."""
    for i, d in enumerate(f.orders):
        if d % 2 == 0:
            h = tuple(d // 2 if j == i else 0 for j in range(len(f.orders)))
            if f.q(h).denominator != 1:
                return False
    return True


@dataclass(frozen=True)
class RankInvariants:
    length: int
    per_prime: tuple[tuple[int, int], ...]
    even: bool

    def ell(self, p: int) -> int:
        return dict(self.per_prime).get(p, 0)


def rank_invariants(f: FiniteQuadraticForm) -> RankInvariants:
    per_prime = tuple((p, len(_layout(f, p))) for p in f.primes)
    return RankInvariants(max((n for _, n in per_prime), default=0), per_prime, is_even(f))


# Jordan splitting


def _scaled(v: Fraction, pe: int) -> int:
    w = v * pe
    if w.denominator != 1:
        raise InternalInconsistency(f"value {v} has denominator exceeding {pe}")
    return int(w)


def _unit_square(fp, basis, orders, pe, p):
    for i, g in enumerate(basis):
        if orders[i] == pe and _scaled(fp.b(g, g), pe) % p:
            return g, i
    if p == 2:
        return None
    for i, j in combinations(range(len(basis)), 2):
        if orders[i] == pe and orders[j] == pe:
            x = fp.add(basis[i], basis[j])
            if _scaled(fp.b(x, x), pe) % p:
                return x, i
    return None


def _jordan_blocks(fp: FiniteQuadraticForm, p: int) -> list[FormBlock]:
    """Greedy orthogonal splitting of a p-primary form into blocks."""
    basis = [fp.unit(i) for i in range(fp.rank)]
    orders = list(fp.orders)
    blocks = []
    while basis:
        pe = max(orders)
        k = multiplicity(p, pe)
        pick = _unit_square(fp, basis, orders, pe, p)
        rest = []
        if pick is not None:
            x, drop = pick
            inv = pow(_scaled(fp.b(x, x), pe), -1, pe)
            for t, g in enumerate(basis):
                if t != drop:
                    c = _scaled(fp.b(g, x), pe) * inv % pe
                    rest.append((fp.sub(g, fp.mul(c, x)), orders[t]))
            blocks.append(FormBlock.cyclic(_scaled(fp.q(x), pe), pe))
        else:
            pair = next(
                (
                    (i, j)
                    for i, j in combinations(range(len(basis)), 2)
                    if orders[i] == pe and orders[j] == pe and _scaled(fp.b(basis[i], basis[j]), pe) % 2
                ),
                None,
            )
            if pair is None:
                raise InternalInconsistency("degenerate 2-primary form: no unimodular plane at the top scale")
            i, j = pair
            gi, gj = basis[i], basis[j]
            a, u, c = (_scaled(fp.b(gi, gi), pe), _scaled(fp.b(gi, gj), pe), _scaled(fp.b(gj, gj), pe))
            dinv = pow((a * c - u * u) % pe, -1, pe)
            for t, g in enumerate(basis):
                if t in pair:
                    continue
                s, r = _scaled(fp.b(g, gi), pe), _scaled(fp.b(g, gj), pe)
                cx = (c * s - u * r) * dinv % pe
                cy = (a * r - u * s) * dinv % pe
                rest.append((fp.sub(g, fp.add(fp.mul(cx, gi), fp.mul(cy, gj))), orders[t]))
            alpha = _scaled(fp.q(gi), pe) // 2
            beta = _scaled(fp.q(gj), pe) // 2
            blocks.append(FormBlock.plane("V" if (alpha * beta) % 2 else "U", k))
        basis = [g for g, _ in rest]
        orders = [d for _, d in rest]
    return blocks


def greedy_blocks(f: FiniteQuadraticForm) -> list[FormBlock]:
    """Some orthogonal block splitting of f; not canonical."""
    out = []
    for p in f.primes:
        out.extend(_jordan_blocks(primary_part(f, p), p))
    return sorted(out, key=lambda b: b.sort_key)


# Brown invariant


def brown_gauss(f: FiniteQuadraticForm, *, max_order: int = DEFAULT_MAX_ORDER) -> int:
    """Br f from the Gauss sum, evaluated exactly prime by prime."""
    total = 0
    for p in f.primes:
        fp = primary_part(f, p)
        if fp.order > max_order:
            raise BoundExceeded("Gauss sum enumeration", max_order, p)
        total += gauss_brown(p, fp.order, fp._scale, (fp.q_num(x) for x in fp.elements()))
    return total % 8


def brown_of(blocks: Iterable[FormBlock]) -> int:
    return sum(b.brown() for b in blocks) % 8


def brown_invariant(f: FiniteQuadraticForm) -> int:
    return brown_of(greedy_blocks(f))


def brown_blocks(f: FiniteQuadraticForm, *, max_order: int = DEFAULT_MAX_ORDER, budget: WorkBudget | None = None) -> int:
    return brown_of(normal_form(f, max_order=max_order, budget=budget))


# det_p


def det_p_class(f: FiniteQuadraticForm, p: int) -> int | str:
    """Unit class of the p-part: ±1 (Legendre symbol) for odd p, a residue in {1,3,5,7} for p = 2."""
    fp = primary_part(f, p)
    if fp.order == 1:
        return 1
    blocks = _jordan_blocks(fp, p)
    if p != 2:
        return int(legendre_symbol(prod(b.numerator for b in blocks) % p, p))
    if not is_even(fp):
        return UNDEFINED_ODD_2ADIC
    value = 1
    for b in blocks:
        value *= {"U": -1, "V": 3}.get(b.kind, b.numerator)
    return value % 8


# normal form


def _odd_scale_classes(blocks: list[FormBlock], p: int) -> dict[int, tuple[int, int]]:
    """order -> (rank, Legendre class of the product of units)."""
    ranks: Counter = Counter()
    units: dict[int, int] = defaultdict(lambda: 1)
    for b in blocks:
        ranks[b.order] += 1
        units[b.order] = units[b.order] * (b.numerator // 2) % p
    return {n: (ranks[n], int(legendre_symbol(units[n], p))) for n in ranks}


def _smallest_nonresidue(p: int) -> int:
    return next(a for a in range(2, p) if legendre_symbol(a, p) == -1)


def _normal_form_odd(fp: FiniteQuadraticForm, p: int) -> list[FormBlock]:
    out = []
    for n, (r, cls) in sorted(_odd_scale_classes(_jordan_blocks(fp, p), p).items()):
        out.extend(FormBlock.cyclic(2, n) for _ in range(r - 1))
        out.append(FormBlock.cyclic(2 if cls == 1 else 2 * _smallest_nonresidue(p), n))
    return out


def _scale_options(k: int, r: int) -> list[tuple[FormBlock, ...]]:
    """One block tuple per isomorphism class of homogeneous 2-adic forms of scale 2^k and rank r."""
    options = []
    if r % 2 == 0:
        half = r // 2
        options.append((FormBlock.plane("U", k),) * half)
        options.append((FormBlock.plane("U", k),) * (half - 1) + (FormBlock.plane("V", k),))
    seen: dict[tuple, tuple[int, ...]] = {}
    units = (1, 3) if k == 1 else (1, 3, 5, 7)
    for combo in combinations_with_replacement(units, r):
        if k == 1:
            key = (sum(1 if a == 1 else -1 for a in combo) % 8,)
        else:
            key = (prod(combo) % 8, sum(combo) % 8)
        seen.setdefault(key, combo)
    for combo in seen.values():
        options.append(tuple(FormBlock.cyclic(a, 2**k) for a in combo))
    return sorted((tuple(sorted(o, key=lambda b: b.sort_key)) for o in options), key=lambda o: [b.sort_key for b in o])


def _torsion_profile(f2: FiniteQuadraticForm, top: int) -> list[Counter]:
    hist = [Counter() for _ in range(top)]
    for x in f2.elements():
        e = f2.element_order(x).bit_length() - 1
        v = f2.q(x)
        for j in range(max(e, 1), top + 1):
            hist[j - 1][v] += 1
    return hist


def _block_torsion(block: FormBlock, j: int) -> Counter:
    n = block.order
    step = n >> min(j, block.exponent)
    Q = block.q_matrix()
    if block.kind == "cyclic":
        return Counter((t * t * Q[0][0]) % 2 for t in range(0, n, step))
    return Counter(
        (s * s * Q[0][0] + 2 * s * t * Q[0][1] + t * t * Q[1][1]) % 2
        for s in range(0, n, step)
        for t in range(0, n, step)
    )


def _convolve(a: Counter, b: Counter) -> Counter:
    out: Counter = Counter()
    for u, cu in a.items():
        for v, cv in b.items():
            out[(u + v) % 2] += cu * cv
    return out


def _candidate_profile(blocks: Iterable[FormBlock], top: int) -> list[Counter]:
    blocks = list(blocks)
    return [reduce(_convolve, (_block_torsion(b, j) for b in blocks), Counter({Fraction(0): 1})) for j in range(1, top + 1)]


def _normal_form_2(f2: FiniteQuadraticForm, max_order: int, budget: WorkBudget) -> list[FormBlock]:
    greedy = _jordan_blocks(f2, 2)
    ranks: Counter = Counter()
    for b in greedy:
        ranks[b.exponent] += b.rank
    target_br = brown_of(greedy)
    options = [_scale_options(k, ranks[k]) for k in sorted(ranks)]
    top = max(ranks)

    if top == 1:
        even = is_even(f2)
        for cand in product(*options):
            blocks = [b for opt in cand for b in opt]
            if (blocks[0].kind != "cyclic") == even and brown_of(blocks) == target_br:
                return blocks
        raise InternalInconsistency("no exponent-2 block form matches parity and Brown invariant")

    if f2.order > max_order:
        raise BoundExceeded("2-adic normal form search", max_order, 2)
    profile = _torsion_profile(f2, top)
    for cand in product(*options):
        blocks = [b for opt in cand for b in opt]
        budget.tick()
        if brown_of(blocks) != target_br or _candidate_profile(blocks, top) != profile:
            continue
        if next(_generator_images(from_blocks(blocks), f2, budget=budget, max_order=max_order, prime=2), None):
            return blocks
    raise InternalInconsistency("no 2-adic block form is isomorphic to the 2-primary part")


def normal_form(
    f: FiniteQuadraticForm, *, max_order: int = DEFAULT_MAX_ORDER, budget: WorkBudget | None = None
) -> tuple[FormBlock, ...]:
    """Canonical block multiset: isomorphic forms give equal tuples."""
    budget = budget_or_default(budget)
    out: list[FormBlock] = []
    for p in f.primes:
        fp = primary_part(f, p)
        out.extend(_normal_form_2(fp, max_order, budget) if p == 2 else _normal_form_odd(fp, p))
    return tuple(sorted(out, key=lambda b: b.sort_key))


# isomorphisms


@dataclass(frozen=True)
class FormIsomorphism:
    """A q-preserving group isomorphism given by the images of the source generators."""

    source: FiniteQuadraticForm
    target: FiniteQuadraticForm
    images: tuple[Element, ...]

    def __call__(self, x: Element) -> Element:
        out = [0] * self.target.rank
        for c, img in zip(x, self.images):
            if c:
                for k, v in enumerate(img):
                    out[k] += c * v
        return self.target.reduce(out)

    def inverse_table(self) -> dict[Element, Element]:
        return {self(x): x for x in self.source.elements()}


def _generator_images(
    src: FiniteQuadraticForm,
    dst: FiniteQuadraticForm,
    *,
    budget: WorkBudget,
    max_order: int,
    prime: int | None = None,
) -> Iterator[tuple[Element, ...]]:
    """Backtracking over q-preserving images of the generators of src in dst."""
    if src.order != dst.order:
        return
    if dst.order > max_order:
        raise BoundExceeded("isomorphism search group order", max_order, prime)
    pool: dict[Fraction, list[tuple[int, Element]]] = defaultdict(list)
    for y in dst.elements():
        pool[dst.q(y)].append((dst.element_order(y), y))
    n = src.rank
    cands = [[y for o, y in pool.get(src.q_matrix[i][i], ()) if o == d] for i, d in enumerate(src.orders)]
    pair = [[src.q_matrix[i][j] if i != j else src.q_matrix[i][i] % 1 for j in range(n)] for i in range(n)]
    sequence = sorted(range(n), key=lambda i: len(cands[i]))
    chosen: list[Element | None] = [None] * n

    def extend(level: int) -> Iterator[tuple[Element, ...]]:
        if level == n:
            yield tuple(chosen)
            return
        i = sequence[level]
        for y in cands[i]:
            budget.tick()
            if all(dst.b(y, chosen[j]) == pair[i][j] for j in sequence[:level]):
                chosen[i] = y
                yield from extend(level + 1)
        chosen[i] = None

    yield from extend(0)


def _assemble(
    f: FiniteQuadraticForm, g: FiniteQuadraticForm, parts: dict[int, FormIsomorphism]
) -> FormIsomorphism:
    images = []
    for i in range(f.rank):
        comps = split_element(f, f.unit(i))
        images.append(join_element(g, {p: parts[p](comps[p]) for p in parts}))
    return FormIsomorphism(f, g, tuple(images))


def find_isomorphism(
    f: FiniteQuadraticForm,
    g: FiniteQuadraticForm,
    *,
    max_order: int = DEFAULT_MAX_ORDER,
    budget: WorkBudget | None = None,
) -> FormIsomorphism | None:
    """An explicit isomorphism f -> g, searched prime by prime, or None."""
    if f.order != g.order or f.primes != g.primes:
        return None
    budget = budget_or_default(budget)
    parts = {}
    for p in f.primes:
        fp, gp = primary_part(f, p), primary_part(g, p)
        if elementary_divisors(f, p) != elementary_divisors(g, p):
            return None
        images = next(_generator_images(fp, gp, budget=budget, max_order=max_order, prime=p), None)
        if images is None:
            return None
        parts[p] = FormIsomorphism(fp, gp, images)
    return _assemble(f, g, parts)


def is_isomorphic(
    f: FiniteQuadraticForm,
    g: FiniteQuadraticForm,
    *,
    max_order: int = DEFAULT_MAX_ORDER,
    budget: WorkBudget | None = None,
) -> bool:
    if f.order != g.order or f.primes != g.primes:
        return False
    budget = budget_or_default(budget)
    for p in f.primes:
        if elementary_divisors(f, p) != elementary_divisors(g, p):
            return False
        fp, gp = primary_part(f, p), primary_part(g, p)
        if p != 2:
            if _odd_scale_classes(_jordan_blocks(fp, p), p) != _odd_scale_classes(_jordan_blocks(gp, p), p):
                return False
            continue
        if is_even(fp) != is_even(gp) or brown_invariant(fp) != brown_invariant(gp):
            return False
        if exponent(fp) == 2:
            continue
        if fp.order > max_order:
            raise BoundExceeded("2-adic isomorphism test", max_order, 2)
        top = multiplicity(2, exponent(fp))
        if _torsion_profile(fp, top) != _torsion_profile(gp, top):
            return False
        if next(_generator_images(fp, gp, budget=budget, max_order=max_order, prime=2), None) is None:
            return False
    return True


# text grammar

_TERM = re.compile(
    r"^(?P<mult>\d+)?\s*(?:<\s*(?P<m>[-+]?\d+)\s*/\s*(?P<n>\d+)\s*>"
    r"|(?P<kind>[UV])\s*\(\s*(?:2\s*\^\s*(?P<k>\d+)|(?P<order>\d+))\s*\))$"
)


def parse_blocks(text: str) -> list[FormBlock]:
    cleaned = text.replace("⟨", "<").replace("⟩", ">").replace("𝒰", "U").replace("𝒱", "V").strip()
    if cleaned in ("", "0", "trivial"):
        return []
    blocks: list[FormBlock] = []
    pos = 0
    for term in re.split(r"\+(?![^<]*>)", cleaned):
        match = _TERM.match(term.strip())
        if match is None:
            raise DomainError(f"cannot parse form term {term.strip()!r} at position {pos}")
        count = int(match["mult"] or 1)
        if match["kind"]:
            order = 2 ** int(match["k"]) if match["k"] is not None else int(match["order"])
            block = FormBlock(match["kind"], 0, order)
        else:
            block = FormBlock.cyclic(int(match["m"]), int(match["n"]))
        blocks.extend([block] * count)
        pos += len(term) + 1
    return blocks


def parse_form(text: str) -> FiniteQuadraticForm:
    return from_blocks(parse_blocks(text))


def format_form(obj: FiniteQuadraticForm | Iterable[FormBlock]) -> str:
    blocks = normal_form(obj) if isinstance(obj, FiniteQuadraticForm) else list(obj)
    if not blocks:
        return "0"
    return "+".join(str(b) for b in sorted(blocks, key=lambda b: b.sort_key))

"""Exact integer matrix helpers on top of sympy's Smith normal form."""
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from sympy import GF, ZZ, Matrix
from sympy.matrices.normalforms import smith_normal_decomp
from sympy.polys.matrices import DomainMatrix


@dataclass(frozen=True)
class Smith:
    """D = left * M * right with D diagonal; ``diagonal`` holds |D_ii|."""

    diagonal: tuple[int, ...]
    left: Matrix
    right: Matrix


def smith(m: Matrix) -> Smith:
    d, s, t = smith_normal_decomp(m, domain=ZZ)
    return Smith(tuple(abs(int(d[i, i])) for i in range(min(d.shape))), s, t)


def column_basis(vectors: Sequence[Sequence[int]], dim: int) -> Matrix:
    """Columns forming a Z-basis of the lattice spanned by ``vectors``."""
    if not vectors:
        return Matrix.zeros(dim, 0)
    sm = smith(Matrix.hstack(*(Matrix(list(v)) for v in vectors)))
    s_inv = sm.left.inv()
    cols = [s_inv[:, i] * d for i, d in enumerate(sm.diagonal) if d]
    return Matrix.hstack(*cols) if cols else Matrix.zeros(dim, 0)


def to_fraction(v) -> Fraction:
    return Fraction(int(v.p), int(v.q))


def fraction_rows(m: Matrix) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(to_fraction(m[i, j]) for j in range(m.cols)) for i in range(m.rows))


def apply_rows(rows: Sequence[Sequence[Fraction]], x: Sequence) -> list[Fraction]:
    return [sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in rows]


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    if not rows or not rows[0]:
        return 0
    dm = DomainMatrix.from_list([[int(v) for v in row] for row in rows], ZZ)
    return int(dm.convert_to(GF(p)).rank())

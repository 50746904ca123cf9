"""Exact Gauss sums in Z[zeta_M].

An element of Z[zeta_M] is kept as a coefficient list indexed by the exponent
of zeta_M; equality is decided modulo the cyclotomic polynomial.
"""
from functools import cache
from math import lcm

from sympy import ZZ, Poly, cyclotomic_poly, symbols
from sympy.functions.combinatorial.numbers import legendre_symbol

from .errors import InternalInconsistency

_x = symbols("x")


@cache
def _phi(modulus: int) -> Poly:
    return Poly(cyclotomic_poly(modulus, _x), _x, domain=ZZ)


def _poly(coeffs: list[int]) -> Poly:
    return Poly(list(reversed(coeffs)), _x, domain=ZZ)


def _shift(coeffs: list[int], steps: int) -> list[int]:
    """Multiply by zeta_M**steps."""
    size = len(coeffs)
    return [coeffs[(e - steps) % size] for e in range(size)]


def _sqrt_prime(p: int, modulus: int) -> list[int]:
    """sqrt(p) as an element of Z[zeta_modulus]; p | modulus and 8 | modulus."""
    coeffs = [0] * modulus
    if p == 2:
        coeffs[modulus // 8] += 1
        coeffs[7 * modulus // 8] += 1
        return coeffs
    for t in range(1, p):
        coeffs[(t * modulus // p) % modulus] += int(legendre_symbol(t, p))
    if p % 4 == 3:
        # the quadratic Gauss sum is i*sqrt(p) here
        coeffs = _shift(coeffs, 3 * modulus // 4)
    return coeffs


def gauss_brown(p: int, size: int, scale: int, numerators) -> int:
    """Return r with sum(exp(i*pi*num/scale)) == sqrt(size) * exp(i*pi*r/4).

    ``size`` is the order of a nonsingular p-primary form and ``numerators``
    are its values q(x)*scale over all elements.
    """
    modulus = lcm(8, 2 * scale, p)
    step = modulus // (2 * scale)
    total = [0] * modulus
    for num in numerators:
        total[(num * step) % modulus] += 1

    exponent = 0
    while p ** (exponent + 1) <= size:
        exponent += 1
    root = [0] * modulus
    if exponent % 2:
        root = [c * p ** (exponent // 2) for c in _sqrt_prime(p, modulus)]
    else:
        root[0] = p ** (exponent // 2)

    phi = _phi(modulus)
    lhs = _poly(total)
    for r in range(8):
        if (lhs - _poly(_shift(root, r * modulus // 8))).rem(phi).is_zero:
            return r
    raise InternalInconsistency(f"Gauss sum of a {p}-primary form of order {size} has the wrong modulus")

"""Kronecker coefficients of partition triples at small degree.

Characters of the symmetric group are computed by the Murnaghan-Nakayama
rule (border strips removed via beta numbers, memoized); the coefficient is
the normalized character sum over conjugacy classes.  The degree cap of 12
keeps the class count at 77 and every anchor value in easy reach.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence

DEGREE_CAP = 12

Partition = tuple[int, ...]


def normalize(parts: Sequence[int]) -> Partition:
    """Drop zero parts and sort decreasingly."""
    if any(x < 0 for x in parts):
        raise ValueError("negative part")
    return tuple(sorted((x for x in parts if x), reverse=True))


def rectangle(rows: int, width: int) -> Partition:
    """The partition rows x width = (width, ..., width)."""
    return (width,) * rows


def conjugate(p: Sequence[int]) -> Partition:
    p = normalize(p)
    if not p:
        return ()
    return tuple(sum(1 for x in p if x >= i) for i in range(1, p[0] + 1))


def partitions_of(d: int) -> Iterator[Partition]:
    def rec(rest: int, maxpart: int, acc: tuple[int, ...]):
        if rest == 0:
            yield acc
            return
        for p in range(min(rest, maxpart), 0, -1):
            yield from rec(rest - p, p, acc + (p,))

    yield from rec(d, d, ())


def centralizer_order(mu: Partition) -> int:
    """z_mu = prod i^(m_i) m_i! over the multiplicities of mu."""
    z = 1
    mult: dict[int, int] = {}
    for p in mu:
        mult[p] = mult.get(p, 0) + 1
    for i, m in mult.items():
        z *= i**m * factorial(m)
    return z


@lru_cache(maxsize=None)
def _mn(lam: Partition, mu: Partition) -> int:
    """chi_lam at the class of cycle type mu, by border strip removal."""
    if not mu:
        return 1 if not lam else 0
    t = mu[0]
    l = len(lam)
    beta = [lam[i] + (l - 1 - i) for i in range(l)]
    betaset = set(beta)
    total = 0
    for b in beta:
        nb = b - t
        if nb < 0 or nb in betaset:
            continue
        height = sum(1 for x in beta if nb < x < b)
        newbeta = sorted((betaset - {b}) | {nb}, reverse=True)
        newlam = tuple(
            x - (len(newbeta) - 1 - i) for i, x in enumerate(newbeta)
        )
        newlam = tuple(p for p in newlam if p > 0)
        total += (-1) ** height * _mn(newlam, mu[1:])
    return total


def character_value(lam: Sequence[int], class_type: Sequence[int]) -> int:
    """The irreducible character chi_lam evaluated on a conjugacy class."""
    lam = normalize(lam)
    mu = normalize(class_type)
    if sum(lam) != sum(mu):
        raise ValueError("partition sizes differ")
    if sum(lam) > DEGREE_CAP:
        raise ValueError(f"degree cap is {DEGREE_CAP}")
    return _mn(lam, mu)


def kronecker_coefficient(
    lam: Sequence[int], mu: Sequence[int], nu: Sequence[int]
) -> int:
    """k(lam, mu, nu) = (1/d!) sum over classes of |class| chi chi chi."""
    lam, mu, nu = normalize(lam), normalize(mu), normalize(nu)
    d = sum(lam)
    if sum(mu) != d or sum(nu) != d:
        raise ValueError("partition sizes differ")
    if d > DEGREE_CAP:
        raise ValueError(f"degree cap is {DEGREE_CAP}")
    if d == 0:
        return 1  # empty partitions: trivial representation convention
    fact = factorial(d)
    total = 0
    for rho in partitions_of(d):
        cls = fact // centralizer_order(rho)
        total += cls * _mn(lam, rho) * _mn(mu, rho) * _mn(nu, rho)
    q, r = divmod(total, fact)
    if r:
        raise ArithmeticError("character sum not divisible by d!")
    if q < 0:
        raise ArithmeticError("negative Kronecker coefficient")
    return q


def rectangle_coefficient(j: int, n: int) -> int:
    """k_j(n) = k(j x n, j x n, j x n), with k_0(n) = 1 by convention."""
    if j == 0:
        return 1
    r = rectangle(j, n)
    return kronecker_coefficient(r, r, r)


def rectangle_symmetry_check(n: int, j: int) -> bool:
    """Whether k_{n^2-j}(n) = k_j(n) (both within the degree cap)."""
    if not 0 <= j <= n * n:
        raise ValueError("j out of range")
    return rectangle_coefficient(n * n - j, n) == rectangle_coefficient(j, n)


def rectangular_triple_positive(
    m1: int, m2: int, m3: int, d1: int, d2: int, d3: int
) -> tuple[int, bool]:
    """Kronecker coefficient of three rectangles m_i x delta_i, plus whether
    the necessary inequalities m1 <= d2 d3, m2 <= d1 d3, m3 <= d1 d2 hold."""
    if not (m1 * d1 == m2 * d2 == m3 * d3):
        raise ValueError("rectangle degrees differ")
    coef = kronecker_coefficient(
        rectangle(m1, d1), rectangle(m2, d2), rectangle(m3, d3)
    )
    ok = m1 <= d2 * d3 and m2 <= d1 * d3 and m3 <= d1 * d2
    return coef, ok

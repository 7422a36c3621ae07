"""Latin cubes and squares with signs, census counts, and the signed
inclusion-exclusion identities through hyperdeterminants.

A Latin cube of order n is an n x n x n array over [n^2] that restricts to
a bijection on every axis slice.  Its sign multiplies the signs of the 3n
slice permutations (entries read in lexicographic cell order); its symbol
sign multiplies sgn(sigma) sgn(tau) over the n^2 one-per-symbol layers.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import permutations, product
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .valuation import BudgetExceeded, SignedCount


def _perm_sign(seq: Sequence[int]) -> int:
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv & 1 else 1


@dataclass(frozen=True)
class PermutationMatrix3D:
    """The (0,1)-array with ones at {(i, sigma(i), tau(i))}, 1-based."""

    n: int
    sigma: tuple[int, ...]
    tau: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.sigma) != list(range(1, self.n + 1)):
            raise ValueError("sigma is not a permutation")
        if sorted(self.tau) != list(range(1, self.n + 1)):
            raise ValueError("tau is not a permutation")

    @property
    def sign(self) -> int:
        return _perm_sign(self.sigma) * _perm_sign(self.tau)

    def to_array(self) -> list[list[list[int]]]:
        a = [[[0] * self.n for _ in range(self.n)] for _ in range(self.n)]
        for i in range(1, self.n + 1):
            a[i - 1][self.sigma[i - 1] - 1][self.tau[i - 1] - 1] = 1
        return a


@dataclass(frozen=True)
class LatinCube:
    """entries[i][j][k] is the symbol in [n^2] at cell (i+1, j+1, k+1)."""

    n: int
    entries: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        n, nn = self.n, self.n * self.n
        full = set(range(1, nn + 1))
        for i in range(n):
            if {self.entries[i][j][k] for j in range(n) for k in range(n)} != full:
                raise ValueError(f"x-slice {i + 1} is not a bijection")
        for j in range(n):
            if {self.entries[i][j][k] for i in range(n) for k in range(n)} != full:
                raise ValueError(f"y-slice {j + 1} is not a bijection")
        for k in range(n):
            if {self.entries[i][j][k] for i in range(n) for j in range(n)} != full:
                raise ValueError(f"z-slice {k + 1} is not a bijection")

    def slice_permutations(self) -> list[tuple[int, ...]]:
        """The 3n slice permutations of [n^2], cells in lexicographic order."""
        n, e = self.n, self.entries
        out = []
        for i in range(n):
            out.append(tuple(e[i][j][k] for j in range(n) for k in range(n)))
        for j in range(n):
            out.append(tuple(e[i][j][k] for i in range(n) for k in range(n)))
        for k in range(n):
            out.append(tuple(e[i][j][k] for i in range(n) for j in range(n)))
        return out

    @property
    def sign(self) -> int:
        s = 1
        for p in self.slice_permutations():
            s *= _perm_sign(p)
        return s

    def symbol_layers(self) -> list[PermutationMatrix3D]:
        """One 3D permutation matrix per symbol of [n^2]."""
        n, nn = self.n, self.n * self.n
        sigma = [[0] * n for _ in range(nn)]
        tau = [[0] * n for _ in range(nn)]
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    s = self.entries[i][j][k] - 1
                    sigma[s][i] = j + 1
                    tau[s][i] = k + 1
        return [
            PermutationMatrix3D(n, tuple(sigma[s]), tuple(tau[s])) for s in range(nn)
        ]

    @property
    def symbol_sign(self) -> int:
        s = 1
        for layer in self.symbol_layers():
            s *= layer.sign
        return s

    def permute_slices(self, axis: int, perm: Sequence[int]) -> "LatinCube":
        """Reorder the slices of one axis; perm is 1-based (value v goes to
        position perm[v-1])."""
        n = self.n
        if sorted(perm) != list(range(1, n + 1)):
            raise ValueError("not a permutation")
        inv = [0] * n
        for v in range(n):
            inv[perm[v] - 1] = v
        e = self.entries

        def cell(i, j, k):
            if axis == 0:
                return e[inv[i]][j][k]
            if axis == 1:
                return e[i][inv[j]][k]
            return e[i][j][inv[k]]

        new = tuple(
            tuple(tuple(cell(i, j, k) for k in range(n)) for j in range(n))
            for i in range(n)
        )
        return LatinCube(n, new)


@dataclass(frozen=True)
class LatinSquare:
    """entries[i][j] in [n]; every row and column a permutation."""

    n: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        full = set(range(1, self.n + 1))
        for i in range(self.n):
            if set(self.entries[i]) != full:
                raise ValueError(f"row {i + 1} is not a permutation")
        for j in range(self.n):
            if {self.entries[i][j] for i in range(self.n)} != full:
                raise ValueError(f"column {j + 1} is not a permutation")

    @property
    def sign(self) -> int:
        s = 1
        for row in self.entries:
            s *= _perm_sign(row)
        for j in range(self.n):
            s *= _perm_sign(tuple(self.entries[i][j] for i in range(self.n)))
        return s


# ---------------------------------------------------------------------------
# Enumeration.


def enumerate_latin_cubes(n: int) -> Iterator[LatinCube]:
    """Yield every order-n Latin cube, cells filled in lexicographic order
    with candidate symbols ascending."""
    nn = n * n
    cells = [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]
    grid = [[[0] * n for _ in range(n)] for _ in range(n)]
    xused = [set() for _ in range(n)]
    yused = [set() for _ in range(n)]
    zused = [set() for _ in range(n)]

    def rec(p: int) -> Iterator[LatinCube]:
        if p == len(cells):
            yield LatinCube(
                n,
                tuple(
                    tuple(tuple(grid[i][j][k] for k in range(n)) for j in range(n))
                    for i in range(n)
                ),
            )
            return
        i, j, k = cells[p]
        for s in range(1, nn + 1):
            if s in xused[i] or s in yused[j] or s in zused[k]:
                continue
            grid[i][j][k] = s
            xused[i].add(s)
            yused[j].add(s)
            zused[k].add(s)
            yield from rec(p + 1)
            xused[i].discard(s)
            yused[j].discard(s)
            zused[k].discard(s)

    yield from rec(0)


def random_latin_cube(n: int, rng: random.Random) -> LatinCube:
    """A uniformly-seeded (not uniformly-distributed) random cube found by
    backtracking with shuffled candidate order."""
    nn = n * n
    cells = [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]
    grid = [[[0] * n for _ in range(n)] for _ in range(n)]
    xused = [set() for _ in range(n)]
    yused = [set() for _ in range(n)]
    zused = [set() for _ in range(n)]

    def rec(p: int) -> bool:
        if p == len(cells):
            return True
        i, j, k = cells[p]
        options = [
            s
            for s in range(1, nn + 1)
            if s not in xused[i] and s not in yused[j] and s not in zused[k]
        ]
        rng.shuffle(options)
        for s in options:
            grid[i][j][k] = s
            xused[i].add(s)
            yused[j].add(s)
            zused[k].add(s)
            if rec(p + 1):
                return True
            xused[i].discard(s)
            yused[j].discard(s)
            zused[k].discard(s)
        return False

    if not rec(0):
        raise RuntimeError("no Latin cube found")
    return LatinCube(
        n,
        tuple(
            tuple(tuple(grid[i][j][k] for k in range(n)) for j in range(n))
            for i in range(n)
        ),
    )


def latin_cube_census(
    n: int,
    unipotent: bool = False,
    workers: int = 1,
    budget: int | None = None,
) -> dict[str, int]:
    """Full signed census of order-n Latin cubes.

    Returns total, even, odd, symbol_even, symbol_odd.  The search space is
    split on the symbols of the first x-slice row (cells (1,1,*)) so the
    compiled kernel can run on several threads; partial tallies reduce in
    prefix order, so totals do not depend on the worker count.
    """
    nn = n * n
    if n == 1:
        return {"total": 1, "even": 1, "odd": 0, "symbol_even": 1, "symbol_odd": 0}
    diag = np.int64(1 if unipotent else 0)
    # prefixes: symbol choices for cells (1,1,1..n), 0-based, pairwise distinct
    prefixes = []
    for combo in permutations(range(nn), n):
        if unipotent and combo[0] != nn - 1:
            continue
        prefixes.append(combo)

    kbudget = np.int64(-1 if budget is None else budget)

    def run(prefix):
        parr = np.array(prefix, dtype=np.int64)
        return _kernels.latin_census(np.int64(n), parr, diag, kbudget)

    totals = [0, 0, 0, 0, 0]
    nodes = 0
    if workers <= 1:
        results = map(run, prefixes)
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        results = (f.result() for f in [pool.submit(run, p) for p in prefixes])
    for total, even, odd, se, so, nd, done in results:
        nodes += int(nd)
        if not done:
            raise BudgetExceeded(nodes)
        for t, v in enumerate((total, even, odd, se, so)):
            totals[t] += int(v)
    if workers > 1:
        pool.shutdown()
    return {
        "total": totals[0],
        "even": totals[1],
        "odd": totals[2],
        "symbol_even": totals[3],
        "symbol_odd": totals[4],
    }


def alon_tarsi_delta_3d(n: int, workers: int = 1, budget: int | None = None) -> SignedCount:
    """L^e - L^o over all order-n Latin cubes."""
    c = latin_cube_census(n, workers=workers, budget=budget)
    return SignedCount(c["even"], c["odd"])


def unipotent_delta(n: int, workers: int = 1, budget: int | None = None) -> SignedCount:
    """L^e - L^o over cubes whose main diagonal is constantly n^2."""
    c = latin_cube_census(n, unipotent=True, workers=workers, budget=budget)
    return SignedCount(c["even"], c["odd"])


def unipotent_design_normalization(n: int) -> int:
    """Sign relating the deleted-diagonal design value to the unipotent delta.

    A unipotent cube reads each slice as a permutation of [n^2] whose entry
    at the diagonal cell is the maximum symbol n^2.  Dropping that symbol
    (the design only labels the remaining cells with [n^2-1]) removes, per
    slice, one inversion for every later cell in the slice.  The diagonal
    cell (i,i,i) sits at 1-based position (i-1)n+i of each of its three
    slice readings, so the total parity shift is
    3 * sum_i (n^2 - ((i-1)n + i)).
    """
    shift = 3 * sum(n * n - ((i - 1) * n + i) for i in range(1, n + 1))
    return -1 if shift & 1 else 1


# ---------------------------------------------------------------------------
# Hyperdeterminant identities.


def hyperdet(a: Sequence[Sequence[Sequence[int]]]) -> int:
    """Sum over (sigma, tau) of sgn(sigma) sgn(tau) prod_i a[i][s(i)][t(i)]."""
    n = len(a)
    if n > 6:
        raise ValueError("hyperdeterminant capped at order 6")
    out = 0
    for sigma in permutations(range(n)):
        ssign = _perm_sign(sigma)
        for tau in permutations(range(n)):
            p = 1
            for i in range(n):
                p *= a[i][sigma[i]][tau[i]]
                if p == 0:
                    break
            if p:
                out += ssign * _perm_sign(tau) * p
    return out


def hyperper(a: Sequence[Sequence[Sequence[int]]]) -> int:
    """As hyperdet without signs."""
    n = len(a)
    if n > 6:
        raise ValueError("hyperpermanent capped at order 6")
    out = 0
    for sigma in permutations(range(n)):
        for tau in permutations(range(n)):
            p = 1
            for i in range(n):
                p *= a[i][sigma[i]][tau[i]]
                if p == 0:
                    break
            out += p
    return out


def _binary_arrays(n: int):
    cells = [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]
    for bits in product((0, 1), repeat=len(cells)):
        a = [[[0] * n for _ in range(n)] for _ in range(n)]
        zeros = 0
        for (i, j, k), b in zip(cells, bits):
            a[i][j][k] = b
            zeros += 1 - b
        yield a, zeros


def symbol_delta_by_inclusion_exclusion(n: int) -> int:
    """Sum over binary n x n x n arrays of (-1)^(#zeros) Det(A)^(n^2)."""
    if n > 2:
        raise ValueError("inclusion-exclusion capped at order 2")
    nn = n * n
    out = 0
    for a, zeros in _binary_arrays(n):
        d = hyperdet(a)
        if d:
            out += (-1) ** zeros * d**nn
    return out


def count_by_inclusion_exclusion(n: int) -> int:
    """Sum over binary n x n x n arrays of (-1)^(#zeros) Per(A)^(n^2)."""
    if n > 2:
        raise ValueError("inclusion-exclusion capped at order 2")
    nn = n * n
    out = 0
    for a, zeros in _binary_arrays(n):
        p = hyperper(a)
        if p:
            out += (-1) ** zeros * p**nn
    return out


# ---------------------------------------------------------------------------
# Latin squares.


def enumerate_latin_squares(n: int) -> Iterator[LatinSquare]:
    if n > 5:
        raise ValueError("square enumeration capped at order 5")
    grid = [[0] * n for _ in range(n)]
    colused = [set() for _ in range(n)]

    def rec(p: int) -> Iterator[LatinSquare]:
        if p == n * n:
            yield LatinSquare(n, tuple(tuple(row) for row in grid))
            return
        i, j = divmod(p, n)
        rowused = set(grid[i][:j])
        for s in range(1, n + 1):
            if s in rowused or s in colused[j]:
                continue
            grid[i][j] = s
            colused[j].add(s)
            yield from rec(p + 1)
            colused[j].discard(s)

    yield from rec(0)


def latin_square_delta(n: int) -> SignedCount:
    """L^E - L^O over order-n Latin squares, sign = product of all row and
    column permutation signs."""
    pos = 0
    neg = 0
    for sq in enumerate_latin_squares(n):
        if sq.sign > 0:
            pos += 1
        else:
            neg += 1
    return SignedCount(pos, neg)


def cube_record(c: LatinCube) -> dict:
    """JSON-line record for census dumps."""
    return {
        "n": c.n,
        "entries": [[list(r) for r in plane] for plane in c.entries],
        "sign": c.sign,
        "symbol_sign": c.symbol_sign,
    }

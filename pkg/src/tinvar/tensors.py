"""Structured tensor decompositions: matrix multiplication, unit, Vandermonde.

Rank-one terms store exact vectors (tuples of Fractions).  Basis terms are
recognized structurally so the signed counting engine can work purely on
indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

Vector = tuple[Fraction, ...]


def basis_vector(dim: int, index: int) -> Vector:
    """Standard basis vector e_index (1-based) of C^dim."""
    return tuple(Fraction(1) if i == index - 1 else Fraction(0) for i in range(dim))


def _basis_index(v: Vector) -> int | None:
    """1-based index if v is a standard basis vector, else None."""
    idx = None
    for i, x in enumerate(v):
        if x == 1:
            if idx is not None:
                return None
            idx = i + 1
        elif x != 0:
            return None
    return idx


@dataclass(frozen=True)
class Term:
    coef: Fraction
    vectors: tuple[Vector, ...]


@dataclass(frozen=True)
class TensorDecomposition:
    """A sum of rank-one terms on factors of dimensions ``factor_dims``."""

    factor_dims: tuple[int, ...]
    terms: tuple[Term, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for t in self.terms:
            if len(t.vectors) != len(self.factor_dims):
                raise ValueError("term order does not match factor count")
            for v, dim in zip(t.vectors, self.factor_dims):
                if len(v) != dim:
                    raise ValueError(f"vector length {len(v)} != factor dim {dim}")

    @property
    def rank_bound(self) -> int:
        return len(self.terms)

    def basis_indices(self) -> list[tuple[int, ...]] | None:
        """Per-term 1-based basis index tuples, or None if any term is not
        a coefficient-1 rank-one product of standard basis vectors."""
        out = []
        for t in self.terms:
            if t.coef != 1:
                return None
            idx = tuple(_basis_index(v) for v in t.vectors)
            if any(i is None for i in idx):
                return None
            out.append(idx)
        return out

    def factor_matrix(self, axis: int) -> list[Vector]:
        """Columns: the axis-``axis`` vectors of all terms."""
        return [t.vectors[axis] for t in self.terms]

    def to_json(self) -> str:
        return json.dumps(
            {
                "dims": list(self.factor_dims),
                "terms": [
                    {
                        "coef": str(t.coef),
                        "vectors": [[str(x) for x in v] for v in t.vectors],
                    }
                    for t in self.terms
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "TensorDecomposition":
        data = json.loads(text)
        dims = tuple(data["dims"])
        terms = tuple(
            Term(
                Fraction(t.get("coef", "1")),
                tuple(tuple(Fraction(x) for x in v) for v in t["vectors"]),
            )
            for t in data["terms"]
        )
        return cls(dims, terms)


def from_basis_terms(
    factor_dims: Sequence[int], index_tuples: Sequence[Sequence[int]]
) -> TensorDecomposition:
    """Build a decomposition from 1-based basis index tuples."""
    dims = tuple(factor_dims)
    terms = tuple(
        Term(Fraction(1), tuple(basis_vector(d, i) for d, i in zip(dims, idx)))
        for idx in index_tuples
    )
    return TensorDecomposition(dims, terms)


def matmul_summand(l: int, m: int, n: int, i: int, j: int, k: int) -> tuple[int, int, int]:
    """Basis indices of the <l,m,n> summand for (i,j,k), flattening
    E_{i,j}^{a x b} -> e_{(i-1)b+j}."""
    return ((i - 1) * m + j, (j - 1) * n + k, (k - 1) * l + i)


def matmul_tensor(l: int, m: int, n: int) -> TensorDecomposition:
    """The matrix multiplication tensor <l,m,n> with lmn basis terms,
    ordered by (i,j,k) lexicographically."""
    if min(l, m, n) < 1:
        raise ValueError("l, m, n must be positive")
    idx = [
        matmul_summand(l, m, n, i, j, k)
        for i in range(1, l + 1)
        for j in range(1, m + 1)
        for k in range(1, n + 1)
    ]
    return from_basis_terms((l * m, m * n, n * l), idx)


def unit_tensor(m: int, order: int = 3) -> TensorDecomposition:
    """The unit tensor <m> = sum_i e_i (x) ... (x) e_i of the given order."""
    if m < 1:
        raise ValueError("m must be positive")
    return from_basis_terms((m,) * order, [(i,) * order for i in range(1, m + 1)])


def vandermonde_tensor(
    l: int, m: int, n: int, points: Sequence[tuple[Fraction, Fraction, Fraction]]
) -> TensorDecomposition:
    """Rank-r Vandermonde tensor: term i is the triple of moment vectors
    (1, x_i, x_i^2, ...) in dimensions lm, mn, nl."""
    if not points:
        raise ValueError("need at least one point")
    dims = (l * m, m * n, n * l)
    terms = []
    for x, y, z in points:
        x, y, z = Fraction(x), Fraction(y), Fraction(z)
        vecs = tuple(
            tuple(coord**p for p in range(dim)) for coord, dim in zip((x, y, z), dims)
        )
        terms.append(Term(Fraction(1), vecs))
    return TensorDecomposition(dims, tuple(terms))


def embed_tensor(t: TensorDecomposition, new_dims: Sequence[int]) -> TensorDecomposition:
    """Zero-pad every factor vector into larger factor dimensions."""
    new_dims = tuple(new_dims)
    if len(new_dims) != len(t.factor_dims):
        raise ValueError("factor count mismatch")
    if any(nd < od for nd, od in zip(new_dims, t.factor_dims)):
        raise ValueError("cannot shrink factor dimensions")
    terms = tuple(
        Term(
            term.coef,
            tuple(
                v + (Fraction(0),) * (nd - len(v))
                for v, nd in zip(term.vectors, new_dims)
            ),
        )
        for term in t.terms
    )
    return TensorDecomposition(new_dims, terms)


def embed_matmul_tensor(l: int, m: int, n: int, L: int, M: int, N: int) -> TensorDecomposition:
    """<l,m,n> embedded into the factor spaces of <L,M,N> via eq-style index
    transport (E^{l x m}_{i,j} regarded as E^{L x M}_{i,j})."""
    if l > L or m > M or n > N:
        raise ValueError("cannot shrink")
    idx = []
    for i in range(1, l + 1):
        for j in range(1, m + 1):
            for k in range(1, n + 1):
                idx.append(((i - 1) * M + j, (j - 1) * N + k, (k - 1) * L + i))
    return from_basis_terms((L * M, M * N, N * L), idx)


def canonical_labeling_I0(l: int, m: int, n: int) -> list[tuple[int, int, int]]:
    """The canonical bijective labeling of B(n,l,m) by <l,m,n> summands.

    Box (k,i,j) receives the summand for (i,j,k); returns the basis-index
    columns in the lexicographic box order of B(n,l,m).
    """
    cols = []
    for k in range(1, n + 1):
        for i in range(1, l + 1):
            for j in range(1, m + 1):
                cols.append(matmul_summand(l, m, n, i, j, k))
    return cols

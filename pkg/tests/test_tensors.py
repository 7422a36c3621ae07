"""Structured decompositions: matrix multiplication, unit, Vandermonde."""

from fractions import Fraction

import pytest

from tinvar.tensors import (
    TensorDecomposition,
    Term,
    basis_vector,
    canonical_labeling_I0,
    embed_matmul_tensor,
    embed_tensor,
    from_basis_terms,
    matmul_summand,
    matmul_tensor,
    unit_tensor,
    vandermonde_tensor,
)
from tinvar.valuation import matrix_rank


def test_matmul_summand_flattening():
    # E_{i,j} of an a x b matrix space flattens to e_{(i-1)b+j}
    assert matmul_summand(2, 2, 3, 1, 1, 1) == (1, 1, 1)
    assert matmul_summand(2, 2, 3, 2, 2, 3) == (4, 6, 6)
    assert matmul_summand(2, 2, 3, 1, 2, 3) == (2, 6, 5)


def test_matmul_tensor_shape():
    t = matmul_tensor(2, 2, 3)
    assert t.factor_dims == (4, 6, 6)
    assert len(t.terms) == 12
    idx = t.basis_indices()
    assert idx[0] == (1, 1, 1)
    assert idx[-1] == (4, 6, 6)
    # every term is a distinct summand
    assert len(set(idx)) == 12


def test_unit_tensor():
    t = unit_tensor(3)
    assert t.factor_dims == (3, 3, 3)
    assert t.basis_indices() == [(1, 1, 1), (2, 2, 2), (3, 3, 3)]
    sq = unit_tensor(2, order=2)
    assert sq.factor_dims == (2, 2)
    assert sq.basis_indices() == [(1, 1), (2, 2)]


def test_basis_recognition():
    t = from_basis_terms((2, 3), [(1, 2), (2, 3)])
    assert t.basis_indices() == [(1, 2), (2, 3)]
    scaled = TensorDecomposition(
        (2, 2),
        (Term(Fraction(2), (basis_vector(2, 1), basis_vector(2, 1))),),
    )
    assert scaled.basis_indices() is None
    mixed = TensorDecomposition(
        (2, 2),
        (Term(Fraction(1), ((Fraction(1), Fraction(1)), basis_vector(2, 1))),),
    )
    assert mixed.basis_indices() is None


def test_vandermonde_ranks():
    pts = [(Fraction(i), Fraction(i + 1), Fraction(2 * i + 1)) for i in range(4)]
    t = vandermonde_tensor(2, 2, 2, pts)
    assert t.factor_dims == (4, 4, 4)
    assert len(t.terms) == 4
    # distinct evaluation points give full-rank moment matrices
    for a in range(3):
        assert matrix_rank(t.factor_matrix(a)) == 4


def test_embed_tensor_zero_pads():
    t = unit_tensor(2)
    big = embed_tensor(t, (3, 4, 5))
    assert big.factor_dims == (3, 4, 5)
    assert big.terms[0].vectors[2][2:] == (Fraction(0),) * 3
    with pytest.raises(ValueError):
        embed_tensor(t, (1, 2, 2))


def test_embed_matmul_reindexes():
    emb = embed_matmul_tensor(2, 3, 3, 3, 3, 3)
    assert emb.factor_dims == (9, 9, 9)
    assert len(emb.terms) == 18
    # the index transport must agree with the larger flattening
    idx = set(emb.basis_indices())
    for i in range(1, 3):
        for j in range(1, 4):
            for k in range(1, 4):
                assert ((i - 1) * 3 + j, (j - 1) * 3 + k, (k - 1) * 3 + i) in idx
    # embedding into the same shape is the tensor itself
    same = embed_matmul_tensor(2, 2, 3, 2, 2, 3)
    assert same.basis_indices() == matmul_tensor(2, 2, 3).basis_indices()


def test_canonical_labeling_is_bijective():
    for l, m, n in [(2, 2, 2), (2, 2, 3), (1, 3, 3), (2, 2, 4)]:
        cols = canonical_labeling_I0(l, m, n)
        assert len(cols) == l * m * n
        assert len(set(cols)) == l * m * n
        assert set(cols) == set(matmul_tensor(l, m, n).basis_indices())


def test_canonical_labeling_223_explicit():
    """Box (k,i,j) of B(3,2,2) receives the summand for (i,j,k)."""
    cols = canonical_labeling_I0(2, 2, 3)
    assert cols[0] == matmul_summand(2, 2, 3, 1, 1, 1)  # box (1,1,1)
    assert cols[3] == matmul_summand(2, 2, 3, 2, 2, 1)  # box (1,2,2)
    assert cols[11] == matmul_summand(2, 2, 3, 2, 2, 3)  # box (3,2,2)


def test_json_roundtrip():
    t = vandermonde_tensor(1, 2, 2, [(Fraction(1, 2), Fraction(3), Fraction(-2))])
    assert TensorDecomposition.from_json(t.to_json()) == t


def test_dimension_validation():
    with pytest.raises(ValueError):
        TensorDecomposition((2, 2), (Term(Fraction(1), (basis_vector(3, 1), basis_vector(2, 1))),))
    with pytest.raises(ValueError):
        matmul_tensor(0, 2, 2)

"""Box sets, slice partitions, diagonals, and slice permutations."""

import random
from itertools import combinations

import pytest

from tinvar.designs import (
    Diagonal,
    DesignError,
    ObstructionDesign,
    apply_slice_permutation,
    build_box,
    conjugate_partition,
    delete_diagonal,
    design_type,
    equivalence_permutations,
)


def test_full_box_ordering_and_slices():
    d = build_box((3, 2, 2))
    assert d.size == 12
    assert d.boxes[0] == (1, 1, 1)
    assert d.boxes[-1] == (3, 2, 2)
    # lexicographic: axis 1 most significant
    assert d.boxes[:4] == ((1, 1, 1), (1, 1, 2), (1, 2, 1), (1, 2, 2))
    assert d.slice_sizes(0) == (4, 4, 4)
    assert d.slice_sizes(1) == (6, 6)
    assert d.slice_sizes(2) == (6, 6)
    # slice membership: positions of boxes with y = 1
    assert d.slices[1][0] == (0, 1, 4, 5, 8, 9)
    assert d.slices[2][0] == (0, 2, 4, 6, 8, 10)


def test_position_lookup():
    d = build_box((2, 2, 2))
    for p, box in enumerate(d.boxes):
        assert d.position(box) == p
    with pytest.raises(KeyError):
        d.position((3, 1, 1))


def test_two_axis_box():
    d = build_box((3, 3))
    assert d.size == 9
    assert d.slice_sizes(0) == (3, 3, 3)
    assert d.slice_sizes(1) == (3, 3, 3)


def test_invalid_constructions():
    with pytest.raises(DesignError):
        build_box((2,))
    with pytest.raises(DesignError):
        build_box((0, 2))
    with pytest.raises(DesignError):
        ObstructionDesign((2, 2), frozenset({(3, 1)}))
    with pytest.raises(DesignError):
        # deleting a whole slice empties it
        ObstructionDesign((2, 2), frozenset({(1, 1), (1, 2)}))


def test_diagonal_and_deletion():
    diag = Diagonal.main(2)
    assert diag.boxes == frozenset({(1, 1, 1), (2, 2, 2)})
    d = delete_diagonal(build_box((2, 2, 2)), diag)
    assert d.size == 6
    assert all(s == (3, 3) == d.slice_sizes(a) for a, s in [(0, d.slice_sizes(0))])
    for a in range(3):
        assert d.slice_sizes(a) == (3, 3)
    with pytest.raises(DesignError):
        delete_diagonal(build_box((2, 2, 3)), diag)
    with pytest.raises(DesignError):
        delete_diagonal(d, diag)  # must start from a full box


def test_all_diagonals_count():
    assert len(Diagonal.all_diagonals(2)) == 4
    assert len(Diagonal.all_diagonals(3)) == 36
    with pytest.raises(DesignError):
        Diagonal(2, (1, 1), (1, 2))


def test_slice_permutation_roundtrip():
    d = delete_diagonal(build_box((2, 2, 2)), Diagonal.main(2))
    moved, relabel = apply_slice_permutation(d, 1, (2, 1))
    assert moved.deleted == frozenset({(1, 2, 1), (2, 1, 2)})
    assert sorted(relabel) == list(range(d.size))
    for p, box in enumerate(d.boxes):
        nb = (box[0], (2, 1)[box[1] - 1], box[2])
        assert moved.boxes[relabel[p]] == nb
    back, _ = apply_slice_permutation(moved, 1, (2, 1))
    assert back == d


def test_slice_permutation_fixes_full_box():
    d = build_box((2, 3, 2))
    moved, relabel = apply_slice_permutation(d, 1, (3, 1, 2))
    assert moved == d  # the full box is invariant as a set
    assert sorted(relabel) == list(range(d.size))


def test_design_type_and_conjugate():
    assert conjugate_partition((3, 3, 2)) == (3, 3, 2)
    assert conjugate_partition((4, 1)) == (2, 1, 1, 1)
    d = delete_diagonal(build_box((2, 2, 2)), Diagonal.main(2))
    # two slices of size 3 per axis -> conjugate of (3,3) is (2,2,2)
    assert design_type(d) == [(2, 2, 2)] * 3


def test_equivalence_permutations_transport():
    """Any two deleted diagonals are related by y- and z-slice permutations."""
    for n in (2, 3):
        diags = Diagonal.all_diagonals(n)
        base = build_box((n, n, n))
        for d1 in diags:
            for d2 in diags:
                alpha, alpha_p = equivalence_permutations(d1, d2)
                des1 = delete_diagonal(base, d1)
                moved, _ = apply_slice_permutation(des1, 1, alpha)
                moved, _ = apply_slice_permutation(moved, 2, alpha_p)
                assert moved == delete_diagonal(base, d2)


def test_equivalence_permutations_sampled_n4():
    rng = random.Random(4)
    diags = Diagonal.all_diagonals(4)
    base = build_box((4, 4, 4))
    for _ in range(50):
        d1, d2 = rng.choice(diags), rng.choice(diags)
        alpha, alpha_p = equivalence_permutations(d1, d2)
        moved, _ = apply_slice_permutation(delete_diagonal(base, d1), 1, alpha)
        moved, _ = apply_slice_permutation(moved, 2, alpha_p)
        assert moved == delete_diagonal(base, d2)


def test_one_per_slice_deletions_are_diagonals():
    """Removing one box per slice of B(n,n,n) always removes a diagonal."""
    for n in (2, 3):
        box = build_box((n, n, n))
        diagonal_sets = {d.boxes for d in Diagonal.all_diagonals(n)}
        found = set()
        for combo in combinations(box.boxes, n):
            if all(
                len({b[a] for b in combo}) == n for a in range(3)
            ):
                found.add(frozenset(combo))
        assert found == diagonal_sets


def test_json_roundtrip():
    d = delete_diagonal(build_box((3, 3, 3)), Diagonal(3, (2, 3, 1), (3, 1, 2)))
    assert ObstructionDesign.from_json(d.to_json()) == d

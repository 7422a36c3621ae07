"""Latin cubes and squares: signs, censuses, and signed identities."""

import random

import pytest

from tinvar.latin import (
    LatinCube,
    LatinSquare,
    PermutationMatrix3D,
    alon_tarsi_delta_3d,
    count_by_inclusion_exclusion,
    cube_record,
    enumerate_latin_cubes,
    enumerate_latin_squares,
    hyperdet,
    hyperper,
    latin_cube_census,
    latin_square_delta,
    random_latin_cube,
    symbol_delta_by_inclusion_exclusion,
    unipotent_delta,
    unipotent_design_normalization,
)

ORDER2_CUBE = (
    ((1, 2), (3, 4)),
    ((4, 3), (2, 1)),
)


def test_cube_validation():
    c = LatinCube(2, ORDER2_CUBE)
    assert c.sign in (-1, 1)
    with pytest.raises(ValueError):
        LatinCube(2, (((1, 2), (3, 4)), ((1, 3), (2, 4))))


def test_slice_permutation_readings():
    c = LatinCube(2, ORDER2_CUBE)
    perms = c.slice_permutations()
    assert len(perms) == 6
    assert perms[0] == (1, 2, 3, 4)  # x-slice 1 in (j,k) order
    assert perms[1] == (4, 3, 2, 1)  # x-slice 2
    assert perms[2] == (1, 2, 4, 3)  # y-slice 1 in (i,k) order
    assert perms[4] == (1, 3, 4, 2)  # z-slice 1 in (i,j) order


def test_symbol_layers_partition_the_cube():
    c = LatinCube(2, ORDER2_CUBE)
    layers = c.symbol_layers()
    assert len(layers) == 4
    total = [[[0] * 2 for _ in range(2)] for _ in range(2)]
    for layer in layers:
        a = layer.to_array()
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    total[i][j][k] += a[i][j][k]
    assert all(total[i][j][k] == 1 for i in range(2) for j in range(2) for k in range(2))


def test_permutation_matrix_sign():
    p = PermutationMatrix3D(2, (2, 1), (1, 2))
    assert p.sign == -1
    assert PermutationMatrix3D(2, (2, 1), (2, 1)).sign == 1
    with pytest.raises(ValueError):
        PermutationMatrix3D(2, (1, 1), (1, 2))


def test_enumerate_order2_cubes():
    cubes = list(enumerate_latin_cubes(2))
    assert len(cubes) == 24
    assert len({c.entries for c in cubes}) == 24
    # all 24 are even: the signed census equals the count
    assert sum(c.sign for c in cubes) == 24


def test_census_matches_enumeration_order2():
    c = latin_cube_census(2)
    cubes = list(enumerate_latin_cubes(2))
    assert c["total"] == len(cubes)
    assert c["even"] == sum(1 for x in cubes if x.sign > 0)
    assert c["odd"] == sum(1 for x in cubes if x.sign < 0)
    assert c["symbol_even"] == sum(1 for x in cubes if x.symbol_sign > 0)
    assert c["symbol_odd"] == sum(1 for x in cubes if x.symbol_sign < 0)


def test_census_worker_independence():
    assert latin_cube_census(2, workers=1) == latin_cube_census(2, workers=4)


def test_unipotent_census_matches_enumeration():
    u = latin_cube_census(2, unipotent=True)
    cubes = [
        c
        for c in enumerate_latin_cubes(2)
        if all(c.entries[i][i][i] == 4 for i in range(2))
    ]
    assert u["total"] == len(cubes)
    assert u["even"] - u["odd"] == sum(c.sign for c in cubes)
    assert unipotent_delta(2).value == u["even"] - u["odd"]


def test_unipotent_design_normalization_parity():
    # total inversion shift 3 * sum_i (n^2 - ((i-1)n + i))
    assert unipotent_design_normalization(2) == -1  # shift 9
    assert unipotent_design_normalization(4) == (-1) ** (3 * (64 - (1 + 6 + 11 + 16)))


def test_alon_tarsi_delta_order2():
    assert alon_tarsi_delta_3d(2).value == 24


def test_random_cube_is_valid():
    rng = random.Random(5)
    for n in (2, 3):
        c = random_latin_cube(n, rng)
        assert c.n == n  # constructor validates the slices


def test_permute_slices_roundtrip():
    c = LatinCube(2, ORDER2_CUBE)
    moved = c.permute_slices(0, (2, 1))
    assert moved.entries[0] == c.entries[1]
    assert moved.permute_slices(0, (2, 1)) == c


def test_hyperdet_permutation_matrix():
    p = PermutationMatrix3D(2, (2, 1), (1, 2))
    assert hyperdet(p.to_array()) == p.sign
    assert hyperper(p.to_array()) == 1
    allone = [[[1] * 2 for _ in range(2)] for _ in range(2)]
    assert hyperdet(allone) == 0
    assert hyperper(allone) == 4


def test_hyperdet_sign_under_slice_swap():
    a = [[[1, 2], [3, 4]], [[5, 6], [7, 8]]]
    # swapping middle-axis slices negates the signed double sum
    mid = [[plane[1], plane[0]] for plane in a]
    assert hyperdet(mid) == -hyperdet(a)
    assert hyperper(mid) == hyperper(a)
    # first-axis swaps reindex both inner permutations: the sign is even
    first = [a[1], a[0]]
    assert hyperdet(first) == hyperdet(a)


def test_inclusion_exclusion_order1():
    assert count_by_inclusion_exclusion(1) == 1
    assert symbol_delta_by_inclusion_exclusion(1) == 1
    with pytest.raises(ValueError):
        count_by_inclusion_exclusion(3)


def test_latin_squares():
    assert len(list(enumerate_latin_squares(2))) == 2
    assert len(list(enumerate_latin_squares(3))) == 12
    assert len(list(enumerate_latin_squares(4))) == 576
    assert latin_square_delta(2).value == 2
    assert latin_square_delta(3).value == 0
    sq = LatinSquare(3, ((1, 2, 3), (2, 3, 1), (3, 1, 2)))
    assert sq.sign == 1
    with pytest.raises(ValueError):
        LatinSquare(2, ((1, 2), (1, 2)))


def test_cube_record_roundtrip():
    c = LatinCube(2, ORDER2_CUBE)
    rec = cube_record(c)
    assert rec["n"] == 2
    assert rec["sign"] == c.sign
    assert rec["symbol_sign"] == c.symbol_sign
    assert LatinCube(2, tuple(tuple(tuple(r) for r in p) for p in rec["entries"])) == c

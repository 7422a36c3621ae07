"""Obstruction designs: finite box sets in Z_+^k with per-axis slice partitions.

A design is a subset of a k-dimensional box, ordered lexicographically
(axis 1 most significant).  Each axis partitions the boxes into slices
(boxes sharing the coordinate value on that axis); slices are ordered by
coordinate value and inside a slice boxes keep the global order.  All signs
computed downstream depend on this ordering, so it is frozen here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Sequence

Coord = tuple[int, ...]


class DesignError(ValueError):
    """Invalid design construction."""


@dataclass(frozen=True)
class Diagonal:
    """A diagonal {(i, sigma(i), tau(i))} of the cubic box B(n,n,n).

    ``sigma`` and ``tau`` are 1-based permutations of [n], stored as tuples
    where sigma[i-1] is the image of i.
    """

    n: int
    sigma: tuple[int, ...]
    tau: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.sigma) != list(range(1, self.n + 1)):
            raise DesignError(f"sigma is not a permutation of [{self.n}]")
        if sorted(self.tau) != list(range(1, self.n + 1)):
            raise DesignError(f"tau is not a permutation of [{self.n}]")

    @classmethod
    def main(cls, n: int) -> "Diagonal":
        ident = tuple(range(1, n + 1))
        return cls(n, ident, ident)

    @property
    def boxes(self) -> frozenset[Coord]:
        return frozenset(
            (i, self.sigma[i - 1], self.tau[i - 1]) for i in range(1, self.n + 1)
        )

    @classmethod
    def all_diagonals(cls, n: int) -> list["Diagonal"]:
        out = []
        for s in permutations(range(1, n + 1)):
            for t in permutations(range(1, n + 1)):
                out.append(cls(n, s, t))
        return out


@dataclass(frozen=True)
class ObstructionDesign:
    """A box set with its lexicographic ordering and slice index.

    ``boxes`` is the full box over ``dims`` minus ``deleted``, in
    lexicographic order.  ``slices[a][v-1]`` lists the 0-based positions of
    boxes whose coordinate on axis ``a`` equals ``v``, in global order.
    """

    dims: tuple[int, ...]
    deleted: frozenset[Coord] = field(default_factory=frozenset)
    boxes: tuple[Coord, ...] = field(init=False)
    slices: tuple[tuple[tuple[int, ...], ...], ...] = field(init=False)

    def __post_init__(self):
        k = len(self.dims)
        if k < 2:
            raise DesignError("designs need at least 2 axes")
        if any(d < 1 for d in self.dims):
            raise DesignError("all dimensions must be positive")
        full = set(_full_box(self.dims))
        for box in self.deleted:
            if box not in full:
                raise DesignError(f"deleted box {box} lies outside the box {self.dims}")
        boxes = tuple(sorted(full - set(self.deleted)))
        if not boxes:
            raise DesignError("empty design")
        object.__setattr__(self, "boxes", boxes)
        slices = []
        for a in range(k):
            axis_slices = [[] for _ in range(self.dims[a])]
            for pos, box in enumerate(boxes):
                axis_slices[box[a] - 1].append(pos)
            if any(not s for s in axis_slices):
                raise DesignError(f"axis {a + 1} has an empty slice")
            slices.append(tuple(tuple(s) for s in axis_slices))
        object.__setattr__(self, "slices", tuple(slices))

    @property
    def k(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return len(self.boxes)

    def position(self, box: Coord) -> int:
        """0-based position of a box in the global ordering."""
        from bisect import bisect_left

        i = bisect_left(self.boxes, box)
        if i == len(self.boxes) or self.boxes[i] != box:
            raise KeyError(box)
        return i

    def slice_sizes(self, axis: int) -> tuple[int, ...]:
        return tuple(len(s) for s in self.slices[axis])

    def marginal(self, axis: int) -> tuple[int, ...]:
        """Slice sizes along an axis, in slice order."""
        return self.slice_sizes(axis)

    def to_json(self) -> str:
        return json.dumps(
            {"dims": list(self.dims), "deleted": sorted(map(list, self.deleted))}
        )

    @classmethod
    def from_json(cls, text: str) -> "ObstructionDesign":
        data = json.loads(text)
        return cls(tuple(data["dims"]), frozenset(tuple(b) for b in data["deleted"]))


def _full_box(dims: Sequence[int]) -> Iterable[Coord]:
    if len(dims) == 1:
        for v in range(1, dims[0] + 1):
            yield (v,)
        return
    for v in range(1, dims[0] + 1):
        for rest in _full_box(dims[1:]):
            yield (v,) + rest


def build_box(dims: Sequence[int]) -> ObstructionDesign:
    """The full box B(dims) as an obstruction design."""
    return ObstructionDesign(tuple(dims))


def delete_diagonal(design: ObstructionDesign, diag: Diagonal) -> ObstructionDesign:
    """B(n,n,n) minus a diagonal; every slice loses exactly one box."""
    if design.k != 3 or len(set(design.dims)) != 1:
        raise DesignError("diagonal deletion needs a cubic box B(n,n,n)")
    if design.deleted:
        raise DesignError("diagonal deletion starts from the full box")
    if design.dims[0] != diag.n:
        raise DesignError("diagonal order does not match the box")
    return ObstructionDesign(design.dims, diag.boxes)


def apply_slice_permutation(
    design: ObstructionDesign, axis: int, perm: Sequence[int]
) -> tuple[ObstructionDesign, tuple[int, ...]]:
    """Permute the slices of one axis.

    ``perm`` is 1-based: slice value v is renamed perm[v-1].  Returns the
    relabeled design and the induced map on box positions: entry p is the
    new position of the box at old position p.
    """
    if sorted(perm) != list(range(1, design.dims[axis] + 1)):
        raise DesignError("perm is not a permutation of the axis slice values")

    def move(box: Coord) -> Coord:
        return box[:axis] + (perm[box[axis] - 1],) + box[axis + 1 :]

    new_deleted = frozenset(move(b) for b in design.deleted)
    new_design = ObstructionDesign(design.dims, new_deleted)
    relabel = tuple(new_design.position(move(b)) for b in design.boxes)
    return new_design, relabel


def conjugate_partition(parts: Sequence[int]) -> tuple[int, ...]:
    parts = sorted(parts, reverse=True)
    if not parts or parts[0] == 0:
        return ()
    return tuple(sum(1 for p in parts if p >= i) for i in range(1, parts[0] + 1))


def design_type(design: ObstructionDesign) -> list[tuple[int, ...]]:
    """The per-axis partition type: conjugates of the sorted marginals."""
    return [conjugate_partition(design.marginal(a)) for a in range(design.k)]


def equivalence_permutations(d1: Diagonal, d2: Diagonal) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Slice permutations (y then z) turning B\\D1 into B\\D2.

    Returns 1-based permutations alpha, alpha' with alpha*sigma1 = sigma2 and
    alpha'*tau1 = tau2, so applying them to axes 2 and 3 maps one deleted
    diagonal onto the other while fixing the x-slices.
    """
    if d1.n != d2.n:
        raise DesignError("diagonal orders differ")
    n = d1.n
    alpha = [0] * n
    alpha_p = [0] * n
    for i in range(n):
        alpha[d1.sigma[i] - 1] = d2.sigma[i]
        alpha_p[d1.tau[i] - 1] = d2.tau[i]
    return tuple(alpha), tuple(alpha_p)

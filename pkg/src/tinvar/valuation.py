"""Evaluation of design invariants: val, signed class sums, full invariants.

All arithmetic is exact (Python big integers and Fractions).  The heavy
signed enumeration runs in compiled kernels (see _kernels) partitioned by
the assignment of the first few boxes; partial tallies are reduced in task
order so totals are deterministic for any worker count.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .designs import ObstructionDesign
from .tensors import TensorDecomposition, Vector, matmul_summand


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration exceeds its node budget."""

    def __init__(self, nodes: int, checkpoint_path: str | None = None):
        self.nodes = nodes
        self.checkpoint_path = checkpoint_path
        msg = f"node budget exceeded after {nodes} nodes"
        if checkpoint_path:
            msg += f" (checkpoint written to {checkpoint_path})"
        super().__init__(msg)


@dataclass(frozen=True)
class SignedCount:
    """Tally of +1 and -1 evaluations."""

    positives: int
    negatives: int

    @property
    def value(self) -> int:
        return self.positives - self.negatives

    def __add__(self, other: "SignedCount") -> "SignedCount":
        return SignedCount(self.positives + other.positives, self.negatives + other.negatives)


@dataclass(frozen=True)
class EquivalenceClass:
    """A multiset of summands, canonicalized as sorted (indices, count) pairs.

    Summand identifiers are k-tuples of 1-based basis indices.
    """

    multiset: tuple[tuple[tuple[int, ...], int], ...]

    @classmethod
    def from_summands(cls, summands: Iterable[tuple[int, ...]]) -> "EquivalenceClass":
        counts: dict[tuple[int, ...], int] = {}
        for s in summands:
            counts[tuple(s)] = counts.get(tuple(s), 0) + 1
        return cls(tuple(sorted(counts.items())))

    @property
    def total(self) -> int:
        return sum(c for _, c in self.multiset)

    @property
    def multiplicity_factor(self) -> int:
        out = 1
        for _, c in self.multiset:
            out *= factorial(c)
        return out

    def summands(self) -> list[tuple[int, ...]]:
        """The multiset expanded to a sorted list of length total."""
        out = []
        for s, c in self.multiset:
            out.extend([s] * c)
        return out


@dataclass(frozen=True)
class Labeling:
    """One k-tuple of exact vectors per ordered box of a design."""

    design: ObstructionDesign
    columns: tuple[tuple[Vector, ...], ...]
    basis_indices: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if len(self.columns) != self.design.size:
            raise ValueError("labeling length does not match design size")


def labeling_from_indices(
    design: ObstructionDesign, index_columns: Sequence[tuple[int, ...]]
) -> Labeling:
    """Build a basis-form labeling from 1-based per-axis index tuples."""
    cols = []
    for idx in index_columns:
        vecs = []
        for a, b in enumerate(idx):
            dim = max(design.slice_sizes(a))
            vecs.append(tuple(Fraction(1) if t == b - 1 else Fraction(0) for t in range(dim)))
        cols.append(tuple(vecs))
    return Labeling(design, tuple(cols), tuple(tuple(i) for i in index_columns))


def _det(matrix: list[list[Fraction]]) -> Fraction:
    """Exact determinant by fraction Gaussian elimination."""
    n = len(matrix)
    m = [row[:] for row in matrix]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c] == 0:
                continue
            f = m[r][c] * inv
            for t in range(c, n):
                m[r][t] -= f * m[c][t]
    return det


def matrix_rank(columns: Sequence[Vector]) -> int:
    """Exact rank of the matrix whose columns are the given vectors."""
    rows = [list(r) for r in zip(*columns)] if columns else []
    rank = 0
    ncols = len(columns)
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        for r in range(rank + 1, len(rows)):
            if rows[r][col] != 0:
                f = rows[r][col] / prow[col]
                for t in range(col, ncols):
                    rows[r][t] -= f * prow[t]
        rank += 1
        if rank == len(rows):
            break
    return rank


def val(design: ObstructionDesign, labeling: Labeling) -> Fraction:
    """Product over all axes and slices of the slice determinants.

    Each slice contributes the determinant of the square matrix whose
    columns are the slice's axis-vectors in global box order, truncated to
    the first slice-size entries.
    """
    if labeling.design is not design and labeling.design != design:
        raise ValueError("labeling belongs to a different design")
    if labeling.basis_indices is not None:
        sign = _basis_val_sign(design, labeling.basis_indices)
        return Fraction(sign)
    out = Fraction(1)
    for a in range(design.k):
        for positions in design.slices[a]:
            s = len(positions)
            cols = []
            for p in positions:
                v = labeling.columns[p][a]
                if len(v) < s:
                    raise ValueError("vector shorter than its slice")
                cols.append(v[:s])
            d = _det([list(r) for r in zip(*cols)])
            if d == 0:
                return Fraction(0)
            out *= d
    return out


def _basis_val_sign(
    design: ObstructionDesign, index_columns: Sequence[tuple[int, ...]]
) -> int:
    """val of a basis labeling: 0 or (-1)^(total slice inversions)."""
    inv = 0
    for a in range(design.k):
        for positions in design.slices[a]:
            s = len(positions)
            seq = []
            for p in positions:
                b = index_columns[p][a]
                if b > s:
                    return 0
                seq.append(b)
            if len(set(seq)) != s:
                return 0
            inv += sum(1 for i in range(s) for j in range(i + 1, s) if seq[i] > seq[j])
    return -1 if inv & 1 else 1


# ---------------------------------------------------------------------------
# Kernel plumbing.


def _kernel_arrays(design: ObstructionDesign, cls: EquivalenceClass):
    k = design.k
    d = design.size
    slice_id = np.empty((k, d), dtype=np.int64)
    sizes = []
    off = 0
    for a in range(k):
        for v, positions in enumerate(design.slices[a]):
            for p in positions:
                slice_id[a, p] = off + v
            sizes.append(len(positions))
        off += len(design.slices[a])
    slice_size = np.array(sizes, dtype=np.int64)
    types = [s for s, _ in cls.multiset]
    idx = np.array([[b - 1 for b in s] for s in types], dtype=np.int64)
    counts = np.array([c for _, c in cls.multiset], dtype=np.int64)
    return slice_id, slice_size, idx, counts


def _marginals_feasible(design: ObstructionDesign, cls: EquivalenceClass) -> bool:
    """Exact occurrence check: a slice of size t holds t distinct indices
    from [t], hence every index b <= t exactly once; so on each axis, index
    b must occur exactly as many times as there are slices of size >= b."""
    for a in range(design.k):
        sizes = design.slice_sizes(a)
        dim = max(sizes)
        occ = [0] * (dim + 1)
        for s, c in cls.multiset:
            b = s[a]
            if b > dim:
                return False
            occ[b] += c
        for b in range(1, dim + 1):
            if occ[b] != sum(1 for t in sizes if t >= b):
                return False
    return True


def _enumerate_prefixes(
    design: ObstructionDesign, cls: EquivalenceClass, depth: int
) -> list[tuple[int, ...]]:
    """All feasible type assignments for the first ``depth`` box positions."""
    k = design.k
    types = [s for s, _ in cls.multiset]
    counts = [c for _, c in cls.multiset]
    pos_slices = []  # per position, list of (axis slice positions-set, size)
    slice_of = []
    for p in range(depth):
        slice_of.append(
            [(a, design.boxes[p][a] - 1) for a in range(k)]
        )
    used: dict[tuple[int, int], set[int]] = {}
    out: list[tuple[int, ...]] = []
    choice: list[int] = []

    def rec(p: int):
        if p == depth:
            out.append(tuple(choice))
            return
        for t, s in enumerate(types):
            if counts[t] == 0:
                continue
            ok = True
            for a, v in slice_of[p]:
                size = len(design.slices[a][v])
                b = s[a]
                if b > size or b in used.setdefault((a, v), set()):
                    ok = False
                    break
            if not ok:
                continue
            for a, v in slice_of[p]:
                used[(a, v)].add(s[a])
            counts[t] -= 1
            choice.append(t)
            rec(p + 1)
            choice.pop()
            counts[t] += 1
            for a, v in slice_of[p]:
                used[(a, v)].discard(s[a])

    rec(0)
    return out


def write_checkpoint(
    path: str,
    design: ObstructionDesign,
    cls: EquivalenceClass,
    completed: Sequence[tuple[int, ...]],
    pos: int,
    neg: int,
) -> None:
    data = {
        "design": json.loads(design.to_json()),
        "class": [[list(s), c] for s, c in cls.multiset],
        "completed_prefixes": [list(p) for p in completed],
        "partial": {"pos": str(pos), "neg": str(neg)},
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as f:
        json.dump(data, f)
    os.replace(tmp, path)


def read_checkpoint(path: str) -> dict:
    with open(path) as f:
        return json.load(f)


def _distinct_signed_count(
    design: ObstructionDesign,
    cls: EquivalenceClass,
    workers: int = 1,
    budget: int | None = None,
    checkpoint_path: str | None = None,
    checkpoint_interval: float = 60.0,
) -> tuple[int, int]:
    """(positives, negatives) over distinct arrangements of the class."""
    slice_id, slice_size, idx, counts = _kernel_arrays(design, cls)
    d = design.size
    kbudget = np.int64(-1 if budget is None else budget)

    # Pick a prefix depth giving enough tasks to keep the pool busy; stay at
    # depth 0 for plain single-worker runs with no checkpointing.
    depth = 0
    prefixes: list[tuple[int, ...]] = [()]
    if workers > 1 or checkpoint_path:
        target = max(4 * workers, 16)
        while depth < d and len(prefixes) < target:
            depth += 1
            prefixes = _enumerate_prefixes(design, cls, depth)
            if not prefixes:
                return 0, 0

    pos = 0
    neg = 0
    nodes = 0
    completed: list[tuple[int, ...]] = []
    if checkpoint_path and os.path.exists(checkpoint_path):
        ck = read_checkpoint(checkpoint_path)
        want = {
            "design": json.loads(design.to_json()),
            "class": [[list(s), c] for s, c in cls.multiset],
        }
        if ck["design"] == want["design"] and ck["class"] == want["class"]:
            completed = [tuple(p) for p in ck["completed_prefixes"]]
            pos = int(ck["partial"]["pos"])
            neg = int(ck["partial"]["neg"])
    done_set = set(completed)
    todo = [p for p in prefixes if p not in done_set]

    def run(prefix):
        parr = np.array(prefix, dtype=np.int64)
        return _kernels.signed_count(slice_id, slice_size, idx, counts, parr, kbudget)

    last_write = time.monotonic()
    if budget is not None:
        # Budgeted runs go task by task so the cumulative node count is
        # checked between tasks and the checkpoint reflects a clean prefix
        # boundary.
        for prefix in todo:
            parr = np.array(prefix, dtype=np.int64)
            rem = np.int64(budget - nodes)
            p, n, nd, ok = _kernels.signed_count(
                slice_id, slice_size, idx, counts, parr, rem
            )
            nodes += int(nd)
            if not ok:
                if checkpoint_path:
                    write_checkpoint(checkpoint_path, design, cls, completed, pos, neg)
                raise BudgetExceeded(nodes, checkpoint_path)
            pos += int(p)
            neg += int(n)
            completed.append(prefix)
            if checkpoint_path and time.monotonic() - last_write >= checkpoint_interval:
                write_checkpoint(checkpoint_path, design, cls, completed, pos, neg)
                last_write = time.monotonic()
        return pos, neg

    if workers <= 1:
        for prefix in todo:
            p, n, nd, ok = run(prefix)
            pos += int(p)
            neg += int(n)
            completed.append(prefix)
            if checkpoint_path and time.monotonic() - last_write >= checkpoint_interval:
                write_checkpoint(checkpoint_path, design, cls, completed, pos, neg)
                last_write = time.monotonic()
        return pos, neg

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [(prefix, pool.submit(run, prefix)) for prefix in todo]
        for prefix, fut in futures:
            p, n, nd, ok = fut.result()
            pos += int(p)
            neg += int(n)
            completed.append(prefix)
            if checkpoint_path and time.monotonic() - last_write >= checkpoint_interval:
                write_checkpoint(checkpoint_path, design, cls, completed, pos, neg)
                last_write = time.monotonic()
    return pos, neg


def signed_class_sum(
    design: ObstructionDesign,
    cls: EquivalenceClass,
    workers: int = 1,
    budget: int | None = None,
    checkpoint_path: str | None = None,
    checkpoint_interval: float = 60.0,
) -> SignedCount:
    """Sum of val over all d! column permutations of one class arrangement.

    Distinct arrangements are enumerated by backtracking (pruning repeated
    per-axis indices inside a slice) and the tally is scaled by the product
    of multiplicity factorials, since permuting equal columns repeats the
    same arrangement.
    """
    if cls.total != design.size:
        raise ValueError("class total does not match design size")
    if not _marginals_feasible(design, cls):
        return SignedCount(0, 0)
    pos, neg = _distinct_signed_count(
        design, cls, workers, budget, checkpoint_path, checkpoint_interval
    )
    f = cls.multiplicity_factor
    return SignedCount(pos * f, neg * f)


def signed_class_sum_naive(design: ObstructionDesign, cls: EquivalenceClass) -> SignedCount:
    """Oracle: the literal d!-term loop over column permutations."""
    items = cls.summands()
    if len(items) != design.size:
        raise ValueError("class total does not match design size")
    pos = 0
    neg = 0
    for perm in permutations(items):
        s = _basis_val_sign(design, perm)
        if s > 0:
            pos += 1
        elif s < 0:
            neg += 1
    return SignedCount(pos, neg)


def class_is_valid(design: ObstructionDesign, cls: EquivalenceClass) -> bool:
    """Whether some arrangement of the class has nonzero val."""
    if cls.total != design.size:
        return False
    if not _marginals_feasible(design, cls):
        return False
    slice_id, slice_size, idx, counts = _kernel_arrays(design, cls)
    found, done = _kernels.has_arrangement(slice_id, slice_size, idx, counts, np.int64(-1))
    return bool(found)


def enumerate_valid_classes(l: int, m: int, n: int) -> list[EquivalenceClass]:
    """All valid equivalence classes of matrix multiplication summands.

    Searches multisets of the lmn summands whose per-axis occurrence counts
    are exactly (n, l, m) per index, then keeps those admitting a nonzero
    arrangement on the box with dimensions (n, l, m).
    """
    from .designs import build_box

    design = build_box((n, l, m))
    summands = [
        matmul_summand(l, m, n, i, j, k)
        for i in range(1, l + 1)
        for j in range(1, m + 1)
        for k in range(1, n + 1)
    ]
    need = (n, l, m)  # per-index occurrence counts on axes 1, 2, 3
    dims = (l * m, m * n, n * l)
    T = len(summands)
    rem = [list((need[a],) * dims[a]) for a in range(3)]
    counts = [0] * T
    out: list[EquivalenceClass] = []

    def rec(t: int, left: int):
        if t == T:
            if left == 0:
                cls = EquivalenceClass.from_summands(
                    s for s, c in zip(summands, counts) for _ in range(c)
                )
                if class_is_valid(design, cls):
                    out.append(cls)
            return
        s = summands[t]
        cap = min(left, *(rem[a][s[a] - 1] for a in range(3)))
        # remaining summands must be able to cover what is left
        for c in range(cap, -1, -1):
            counts[t] = c
            for a in range(3):
                rem[a][s[a] - 1] -= c
            if all(r >= 0 for axis in rem for r in axis):
                rec(t + 1, left - c)
            for a in range(3):
                rem[a][s[a] - 1] += c
        counts[t] = 0

    rec(0, l * m * n)
    return sorted(out, key=lambda c: c.multiset)


def _basis_classes_for_tensor(
    design: ObstructionDesign, indices: list[tuple[int, ...]]
) -> list[tuple[EquivalenceClass, int]]:
    """Valid classes of a basis tensor's terms with their selection weights.

    Identical terms are grouped; choosing c copies of a group of size g can
    be realized by g^c index maps, so each class carries weight prod g^c.
    """
    groups: dict[tuple[int, ...], int] = {}
    for s in indices:
        groups[s] = groups.get(s, 0) + 1
    types = sorted(groups)
    d = design.size
    k = design.k
    # occurrence capacity per axis/index: one box per slice of adequate size
    caps = []
    for a in range(design.k):
        sizes = design.slice_sizes(a)
        dim = max(sizes)
        caps.append([sum(1 for t in sizes if t >= b) for b in range(1, dim + 1)])
    out: list[tuple[EquivalenceClass, int]] = []
    counts = [0] * len(types)
    rem = [c[:] for c in caps]

    def rec(t: int, left: int):
        if t == len(types):
            if left == 0:
                cls = EquivalenceClass(
                    tuple((s, c) for s, c in zip(types, counts) if c)
                )
                if class_is_valid(design, cls):
                    w = 1
                    for s, c in zip(types, counts):
                        if c:
                            w *= groups[s] ** c
                    out.append((cls, w))
            return
        s = types[t]
        cap = left
        ok = True
        for a in range(k):
            b = s[a]
            if b > len(rem[a]):
                ok = False
                break
            cap = min(cap, rem[a][b - 1])
        if not ok:
            counts[t] = 0
            rec(t + 1, left)
            return
        for c in range(cap, -1, -1):
            counts[t] = c
            for a in range(k):
                rem[a][s[a] - 1] -= c
            rec(t + 1, left - c)
            for a in range(k):
                rem[a][s[a] - 1] += c
        counts[t] = 0

    rec(0, d)
    return out


def _check_tensor_dims(design: ObstructionDesign, tensor: TensorDecomposition) -> None:
    if len(tensor.factor_dims) != design.k:
        raise ValueError("tensor order does not match design axis count")
    for a in range(design.k):
        if max(design.slice_sizes(a)) != tensor.factor_dims[a]:
            raise ValueError(
                f"factor {a + 1} dimension {tensor.factor_dims[a]} does not match "
                f"slice size {max(design.slice_sizes(a))}"
            )


def evaluate_invariant(
    design: ObstructionDesign,
    tensor: TensorDecomposition,
    workers: int = 1,
    budget: int | None = None,
) -> Fraction:
    """F_H(tensor): the sum of val over all assignments of rank-one terms
    to boxes.

    Basis tensors go through the class decomposition: the assignments with
    nonzero val group into valid classes, and each class contributes its
    distinct-arrangement signed sum (every index map hits each distinct
    arrangement exactly once).  General tensors fall back to the full r^d
    sum with early pruning of zero slice determinants.
    """
    _check_tensor_dims(design, tensor)
    if not tensor.terms:
        return Fraction(0)
    basis = tensor.basis_indices()
    if basis is not None:
        total = 0
        for cls, weight in _basis_classes_for_tensor(design, basis):
            pos, neg = _distinct_signed_count(design, cls, workers=workers, budget=budget)
            total += weight * (pos - neg)
        return Fraction(total)
    return _evaluate_general(design, tensor, budget)


def _evaluate_general(
    design: ObstructionDesign, tensor: TensorDecomposition, budget: int | None
) -> Fraction:
    """Literal sum over all r^d index maps, pruning completed zero slices."""
    d = design.size
    k = design.k
    terms = tensor.terms
    # positions at which each slice completes, for early determinant checks
    slice_positions = []
    finish_at: list[list[int]] = [[] for _ in range(d)]
    for a in range(k):
        for positions in design.slices[a]:
            sid = len(slice_positions)
            slice_positions.append((a, positions))
            finish_at[max(positions)].append(sid)
    total = Fraction(0)
    choice = [0] * d
    nodes = 0

    def slice_det(sid: int) -> Fraction:
        a, positions = slice_positions[sid]
        s = len(positions)
        cols = [terms[choice[p]].vectors[a][:s] for p in positions]
        return _det([list(r) for r in zip(*cols)])

    def rec(p: int, coef: Fraction, dets: Fraction):
        nonlocal total, nodes
        if p == d:
            total += coef * dets
            return
        for t in range(len(terms)):
            nodes += 1
            if budget is not None and nodes > budget:
                raise BudgetExceeded(nodes)
            choice[p] = t
            prod = dets
            ok = True
            for sid in finish_at[p]:
                dv = slice_det(sid)
                if dv == 0:
                    ok = False
                    break
                prod *= dv
            if ok:
                rec(p + 1, coef * terms[t].coef, prod)

    rec(0, Fraction(1), Fraction(1))
    return total


@dataclass(frozen=True)
class MatmulReport:
    """Per-class and total evaluation of the matrix multiplication tensor."""

    l: int
    m: int
    n: int
    classes: tuple[EquivalenceClass, ...]
    class_counts: tuple[SignedCount, ...]  # permutation-sum tallies per class
    class_values: tuple[int, ...]  # distinct-arrangement signed value per class
    normalization: int  # sign fixed so the canonical labeling evaluates to +1
    total: int


def evaluate_matmul_invariant(
    l: int,
    m: int,
    n: int,
    workers: int = 1,
    budget: int | None = None,
    checkpoint_path: str | None = None,
) -> MatmulReport:
    """Full class-by-class evaluation of the invariant on <l,m,n>.

    The total sums the distinct-arrangement class values (each index map
    realizes each distinct arrangement exactly once) and is normalized by
    the sign of the canonical labeling, fixing the scalar of the invariant
    so that the canonical class contributes positively.
    """
    from .designs import build_box
    from .tensors import canonical_labeling_I0

    design = build_box((n, l, m))
    norm = _basis_val_sign(design, canonical_labeling_I0(l, m, n))
    classes = enumerate_valid_classes(l, m, n)
    counts = []
    values = []
    for i, cls in enumerate(classes):
        ck = None
        if checkpoint_path:
            ck = f"{checkpoint_path}.class{i}"
        pos, neg = _distinct_signed_count(
            design, cls, workers=workers, budget=budget, checkpoint_path=ck
        )
        f = cls.multiplicity_factor
        counts.append(SignedCount(pos * f, neg * f))
        values.append(pos - neg)
    total = norm * sum(values)
    return MatmulReport(
        l, m, n, tuple(classes), tuple(counts), tuple(values), norm, total
    )


def check_vanishing(tensor: TensorDecomposition, design: ObstructionDesign) -> str:
    """Dimension test: 'vanishes_by_dimension' if any factor matrix has rank
    below the largest slice size on its axis, else 'inconclusive'."""
    for a in range(design.k):
        need = max(design.slice_sizes(a))
        if matrix_rank(tensor.factor_matrix(a)) < need:
            return "vanishes_by_dimension"
    return "inconclusive"


def _apply_matrix(g: Sequence[Sequence[Fraction]], v: Vector) -> Vector:
    return tuple(
        sum((Fraction(g[r][c]) * v[c] for c in range(len(v))), Fraction(0))
        for r in range(len(g))
    )


def verify_equivariance(
    design: ObstructionDesign,
    tensor: TensorDecomposition,
    gs: Sequence[Sequence[Sequence[Fraction]]],
    budget: int | None = None,
) -> bool:
    """Whether F((g_1 (x) ... (x) g_k) w) = prod det(g_a)^(d/dim_a) * F(w)."""
    from .tensors import Term

    if len(gs) != design.k:
        raise ValueError("need one matrix per axis")
    _check_tensor_dims(design, tensor)
    moved = TensorDecomposition(
        tensor.factor_dims,
        tuple(
            Term(t.coef, tuple(_apply_matrix(g, v) for g, v in zip(gs, t.vectors)))
            for t in tensor.terms
        ),
    )
    lhs = evaluate_invariant(design, moved, budget=budget)
    rhs = evaluate_invariant(design, tensor, budget=budget)
    for a in range(design.k):
        dg = _det([[Fraction(x) for x in row] for row in gs[a]])
        exponent = design.size // tensor.factor_dims[a]
        rhs *= dg**exponent
    return lhs == rhs

"""Command line interface: reproduction commands, budgets, checkpoints.

Exit codes: 0 success, 2 node budget exceeded (checkpoint written when a
path was given), 3 invalid input.  Big integers are always serialized as
decimal strings.
"""

from __future__ import annotations

import json
import os
import random
import sys
from fractions import Fraction

import click

from .designs import Diagonal, DesignError, ObstructionDesign, build_box, delete_diagonal
from .kron import kronecker_coefficient, rectangle_symmetry_check
from .latin import (
    cube_record,
    count_by_inclusion_exclusion,
    enumerate_latin_cubes,
    hyperdet,
    hyperper,
    latin_cube_census,
    latin_square_delta,
    symbol_delta_by_inclusion_exclusion,
    unipotent_delta,
    unipotent_design_normalization,
)
from .tensors import TensorDecomposition, unit_tensor
from .valuation import (
    BudgetExceeded,
    check_vanishing,
    evaluate_invariant,
    evaluate_matmul_invariant,
    signed_class_sum,
    EquivalenceClass,
)

WORKERS_ENV = "TINVAR_WORKERS"


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def common_options(f):
    f = click.option("--workers", type=int, default=None, help=f"worker threads (default ${WORKERS_ENV} or 1)")(f)
    f = click.option("--budget", type=int, default=None, help="max search nodes before aborting")(f)
    f = click.option("--checkpoint", "checkpoint_path", type=click.Path(), default=None, help="checkpoint file for resumable runs")(f)
    f = click.option("--output", type=click.Choice(["text", "json"]), default="text")(f)
    return f


def _workers(workers):
    return workers if workers else _default_workers()


def _emit(output, text_lines, payload):
    if output == "json":
        click.echo(json.dumps(payload))
    else:
        for line in text_lines:
            click.echo(line)


def _fail_invalid(msg):
    click.echo(f"error: {msg}", err=True)
    sys.exit(3)


def _fail_budget(e: BudgetExceeded):
    click.echo(f"error: {e}", err=True)
    sys.exit(2)


def _paper_table_flag(ctx, param, value):
    if not value or ctx.resilient_parsing:
        return
    ctx.invoke(paper_table, workers=None, budget=None, checkpoint_path=None, output="text")
    ctx.exit()


@click.group(invoke_without_command=True)
@click.option("--paper-table", is_flag=True, callback=_paper_table_flag,
              expose_value=False, is_eager=True,
              help="run the reproduction battery and compare to expected values")
@click.version_option()
@click.pass_context
def main(ctx):
    """Exact evaluation of tensor invariants, Latin structures, and
    Kronecker coefficients."""
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@main.command("evaluate-mmt")
@click.argument("l", type=int)
@click.argument("m", type=int)
@click.argument("n", type=int)
@common_options
def evaluate_mmt(l, m, n, workers, budget, checkpoint_path, output):
    """Class-by-class evaluation of the invariant on <L,M,N>."""
    if min(l, m, n) < 1:
        _fail_invalid("l, m, n must be positive")
    try:
        rep = evaluate_matmul_invariant(
            l, m, n, workers=_workers(workers), budget=budget,
            checkpoint_path=checkpoint_path,
        )
    except BudgetExceeded as e:
        _fail_budget(e)
    lines = [f"valid classes: {len(rep.classes)}"]
    cls_payload = []
    for cls, cnt, v in zip(rep.classes, rep.class_counts, rep.class_values):
        lines.append(
            f"  class {dict(cls.multiset)}: +{cnt.positives} -{cnt.negatives} "
            f"permutation sum {cnt.value}, value {v}"
        )
        cls_payload.append(
            {
                "multiset": [[list(s), c] for s, c in cls.multiset],
                "positives": str(cnt.positives),
                "negatives": str(cnt.negatives),
                "permutation_sum": str(cnt.value),
                "value": str(v),
            }
        )
    lines.append(f"total: {rep.total}")
    _emit(output, lines, {
        "l": l, "m": m, "n": n,
        "classes": cls_payload,
        "normalization": rep.normalization,
        "total": str(rep.total),
    })


@main.command("class-sum-i0")
@click.argument("l", type=int)
@click.argument("m", type=int)
@click.argument("n", type=int)
@common_options
def class_sum_i0(l, m, n, workers, budget, checkpoint_path, output):
    """Signed permutation sum of the canonical class of <L,M,N>."""
    from .tensors import canonical_labeling_I0

    if min(l, m, n) < 1:
        _fail_invalid("l, m, n must be positive")
    design = build_box((n, l, m))
    cls = EquivalenceClass.from_summands(canonical_labeling_I0(l, m, n))
    try:
        sc = signed_class_sum(
            design, cls, workers=_workers(workers), budget=budget,
            checkpoint_path=checkpoint_path,
        )
    except BudgetExceeded as e:
        _fail_budget(e)
    _emit(output,
          [f"positives: {sc.positives}", f"negatives: {sc.negatives}", f"value: {sc.value}"],
          {"positives": str(sc.positives), "negatives": str(sc.negatives), "value": str(sc.value)})


@main.command("evaluate-unit")
@click.argument("n", type=int)
@common_options
def evaluate_unit(n, workers, budget, checkpoint_path, output):
    """Evaluate the full-box invariant of order n on the unit tensor <n^2>."""
    if n < 1:
        _fail_invalid("n must be positive")
    design = build_box((n, n, n))
    try:
        v = evaluate_invariant(design, unit_tensor(n * n), workers=_workers(workers), budget=budget)
    except BudgetExceeded as e:
        _fail_budget(e)
    _emit(output, [f"value: {v}"], {"value": str(v)})


@main.command("unipotent")
@click.argument("n", type=int)
@common_options
def unipotent(n, workers, budget, checkpoint_path, output):
    """Unipotent Latin cube delta, via cube enumeration and via the
    deleted-diagonal design (the two numbers must agree for even n)."""
    if n < 1:
        _fail_invalid("n must be positive")
    w = _workers(workers)
    try:
        enum = unipotent_delta(n, workers=w, budget=budget)
        design = delete_diagonal(build_box((n, n, n)), Diagonal.main(n))
        norm = unipotent_design_normalization(n)
        inv = norm * evaluate_invariant(design, unit_tensor(n * n - 1), workers=w, budget=budget) if n > 1 else Fraction(1)
    except BudgetExceeded as e:
        _fail_budget(e)
    _emit(output,
          [f"cube enumeration delta: {enum.value}", f"design evaluation: {inv}"],
          {"enumeration_delta": str(enum.value), "design_value": str(inv)})


@main.command("alon-tarsi")
@click.option("--dim", type=click.Choice(["2", "3"]), default="3")
@click.argument("n", type=int)
@common_options
def alon_tarsi(dim, n, workers, budget, checkpoint_path, output):
    """Signed census delta for Latin squares (--dim 2) or cubes (--dim 3)."""
    if n < 1:
        _fail_invalid("n must be positive")
    try:
        if dim == "2":
            sc = latin_square_delta(n)
            payload = {"n": n, "even": str(sc.positives), "odd": str(sc.negatives), "delta": str(sc.value)}
            lines = [f"even: {sc.positives}", f"odd: {sc.negatives}", f"delta: {sc.value}"]
        else:
            c = latin_cube_census(n, workers=_workers(workers), budget=budget)
            payload = {k: str(v) for k, v in c.items()}
            payload["n"] = str(n)
            payload["delta"] = str(c["even"] - c["odd"])
            lines = [f"{k}: {v}" for k, v in c.items()] + [f"delta: {c['even'] - c['odd']}"]
    except BudgetExceeded as e:
        _fail_budget(e)
    except ValueError as e:
        _fail_invalid(e)
    _emit(output, lines, payload)


@main.command("latin-census")
@click.argument("n", type=int)
@click.option("--unipotent", "unip", is_flag=True, help="restrict to cubes with constant main diagonal n^2")
@click.option("--dump", type=click.Path(), default=None, help="write one JSON cube record per line (n <= 2)")
@common_options
def latin_census_cmd(n, unip, dump, workers, budget, checkpoint_path, output):
    """Signed census of order-n Latin cubes."""
    if n < 1:
        _fail_invalid("n must be positive")
    if dump and n > 2:
        _fail_invalid("cube dumps are limited to n <= 2")
    try:
        c = latin_cube_census(n, unipotent=unip, workers=_workers(workers), budget=budget)
    except BudgetExceeded as e:
        _fail_budget(e)
    if dump:
        nn = n * n
        with open(dump, "w") as f:
            for cube in enumerate_latin_cubes(n):
                if unip and any(cube.entries[i][i][i] != nn for i in range(n)):
                    continue
                f.write(json.dumps(cube_record(cube)) + "\n")
    payload = {"n": str(n)} | {k: str(v) for k, v in c.items()}
    _emit(output, [f"{k}: {v}" for k, v in c.items()], payload)


@main.command("kron")
@click.argument("lam")
@click.argument("mu")
@click.argument("nu")
@click.option("--output", type=click.Choice(["text", "json"]), default="text")
def kron_cmd(lam, mu, nu, output):
    """Kronecker coefficient of three partitions (comma-separated parts)."""
    try:
        parts = [tuple(int(x) for x in p.split(",") if x) for p in (lam, mu, nu)]
        k = kronecker_coefficient(*parts)
    except (ValueError, ArithmeticError) as e:
        _fail_invalid(e)
    _emit(output, [f"coefficient: {k}"], {"coefficient": str(k)})


@main.command("hyperdet")
@click.argument("path", type=click.Path(exists=True))
@click.option("--output", type=click.Choice(["text", "json"]), default="text")
def hyperdet_cmd(path, output):
    """Hyperdeterminant and hyperpermanent of a 3D array (JSON file)."""
    try:
        with open(path) as f:
            a = json.load(f)
        d = hyperdet(a)
        p = hyperper(a)
    except (ValueError, KeyError, TypeError) as e:
        _fail_invalid(e)
    _emit(output, [f"det: {d}", f"per: {p}"], {"det": str(d), "per": str(p)})


@main.command("evaluate-tensor")
@click.argument("design_path", type=click.Path(exists=True))
@click.argument("tensor_path", type=click.Path(exists=True))
@common_options
def evaluate_tensor(design_path, tensor_path, workers, budget, checkpoint_path, output):
    """Evaluate the invariant of a design (JSON) on a tensor (JSON)."""
    try:
        with open(design_path) as f:
            design = ObstructionDesign.from_json(f.read())
        with open(tensor_path) as f:
            tensor = TensorDecomposition.from_json(f.read())
    except (DesignError, ValueError, KeyError) as e:
        _fail_invalid(e)
    verdict = check_vanishing(tensor, design)
    if verdict == "vanishes_by_dimension":
        _emit(output, ["value: 0", "verdict: vanishes_by_dimension"],
              {"value": "0", "verdict": verdict})
        return
    try:
        v = evaluate_invariant(design, tensor, workers=_workers(workers), budget=budget)
    except BudgetExceeded as e:
        _fail_budget(e)
    except ValueError as e:
        _fail_invalid(e)
    _emit(output, [f"value: {v}", f"verdict: {verdict}"],
          {"value": str(v), "verdict": verdict})


@main.command("verify")
@click.argument("suite", type=click.Choice(["equivariance", "diagonals", "latin-signs", "kron-symmetry", "inclusion-exclusion"]))
@click.option("--seed", type=int, default=0)
@click.option("--output", type=click.Choice(["text", "json"]), default="text")
def verify(suite, seed, output):
    """Run a property suite; exits nonzero if any check fails."""
    rng = random.Random(seed)
    results = _run_suite(suite, rng)
    ok = all(v for _, v in results)
    lines = [f"{'PASS' if v else 'FAIL'} {name}" for name, v in results]
    lines.append("all passed" if ok else "FAILURES present")
    _emit(output, lines, {"suite": suite, "seed": seed,
                          "results": [{"name": n, "pass": v} for n, v in results],
                          "ok": ok})
    if not ok:
        sys.exit(1)


def _run_suite(suite, rng):
    from .valuation import verify_equivariance
    from .tensors import Term, matmul_tensor
    from .latin import enumerate_latin_squares

    results = []
    if suite == "equivariance":
        l, m, n = 1, 2, 2
        design = build_box((n, l, m))
        dims = (l * m, m * n, n * l)
        for trial in range(5):
            terms = tuple(
                Term(Fraction(1), tuple(
                    tuple(Fraction(rng.randint(-2, 2)) for _ in range(dim))
                    for dim in dims))
                for _ in range(3)
            )
            tensor = TensorDecomposition(dims, terms)
            gs = [_random_unimodular(dim, rng) for dim in dims]
            results.append((f"random tensor {trial}", verify_equivariance(design, tensor, gs)))
    elif suite == "diagonals":
        n = 2
        box = build_box((n, n, n))
        diags = Diagonal.all_diagonals(n)
        for trial in range(5):
            dims = (3, 3, 3)
            terms = tuple(
                Term(Fraction(1), tuple(
                    tuple(Fraction(rng.randint(-2, 2)) for _ in range(3))
                    for _ in range(3)))
                for _ in range(2)
            )
            tensor = TensorDecomposition(dims, terms)
            vals = {evaluate_invariant(delete_diagonal(box, dg), tensor) for dg in diags}
            results.append((f"diagonal independence {trial}", len(vals) == 1))
    elif suite == "latin-signs":
        for i, cube in enumerate(enumerate_latin_cubes(2)):
            moved = cube.permute_slices(rng.randrange(3), [2, 1])
            results.append((f"cube {i} slice-permutation sign", moved.sign == cube.sign))
    elif suite == "kron-symmetry":
        from .kron import partitions_of
        from itertools import permutations as perms
        parts = list(partitions_of(4))
        for lam in parts:
            for mu in parts:
                for nu in parts:
                    base = kronecker_coefficient(lam, mu, nu)
                    ok = all(kronecker_coefficient(*p) == base for p in perms((lam, mu, nu)))
                    results.append((f"k{lam}{mu}{nu} symmetric", ok))
    elif suite == "inclusion-exclusion":
        c = latin_cube_census(2)
        results.append(("signed identity n=2",
                        symbol_delta_by_inclusion_exclusion(2) == c["symbol_even"] - c["symbol_odd"]))
        results.append(("counting identity n=2",
                        count_by_inclusion_exclusion(2) == c["total"]))
    return results


def _random_unimodular(dim, rng):
    """Random integer matrix with determinant +-1 (product of elementary ops)."""
    m = [[Fraction(1) if i == j else Fraction(0) for j in range(dim)] for i in range(dim)]
    for _ in range(3 * dim):
        i, j = rng.randrange(dim), rng.randrange(dim)
        if i == j:
            continue
        c = Fraction(rng.randint(-2, 2))
        for t in range(dim):
            m[i][t] += c * m[j][t]
    return m


@main.command("paper-table")
@common_options
def paper_table(workers, budget, checkpoint_path, output):
    """Run the reproduction battery and compare against expected values."""
    w = _workers(workers)
    rows = []

    rep = evaluate_matmul_invariant(2, 2, 2, workers=w)
    rows.append(("F_(2,2,2)(<2,2,2>)", 864, rep.total))
    rows.append(("valid classes (2,2,2)", 3, len(rep.classes)))

    rep = evaluate_matmul_invariant(2, 2, 3, workers=w)
    rows.append(("valid classes (2,2,3)", 7, len(rep.classes)))
    i0 = max(rep.class_counts, key=lambda c: c.value)
    rows.append(("canonical class positives (2,2,3)", 182592, i0.positives))
    rows.append(("canonical class negatives (2,2,3)", 1152, i0.negatives))
    rows.append(("F_(2,2,3)(<2,2,3>)", 181440, rep.total))

    rep = evaluate_matmul_invariant(1, 3, 3, workers=w)
    rows.append(("F_(1,3,3)(<1,3,3>)", 8640, rep.total))

    sq = latin_square_delta(3)
    rows.append(("Latin square delta n=3", 0, sq.value))

    ok = True
    lines = []
    payload = []
    for name, expect, got in rows:
        match = expect == got
        ok = ok and match
        lines.append(f"{'OK      ' if match else 'MISMATCH'} {name}: expected {expect}, got {got}")
        payload.append({"name": name, "expected": str(expect), "got": str(got), "match": match})
    _emit(output, lines, {"rows": payload, "ok": ok})
    if not ok:
        sys.exit(1)


if __name__ == "__main__":
    main()

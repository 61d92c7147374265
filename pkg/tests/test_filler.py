"""Subdivision diagrams, area models, and loop filling."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerphi.filler import (
    AreaReport,
    DehnModel,
    KernelLoop,
    ModelRangeError,
    OpenLoop,
    VertexLabel,
    bigon_census,
    dominance_check,
    fill,
    formal_triangle_census,
    pad_loop,
    random_kernel_loop,
    superadditive_closure,
    tessellate,
)
from kerphi.lattice import GenLetter
from kerphi.product import df_instance


def _oracle_counts(k):
    # independent census: one central triangle, then reflection rounds;
    # rounds past unit arcs are formal only
    formal = 1 + sum(3 * 2 ** (j - 1) for j in range(1, k + 3))
    nondegenerate = 1 + sum(3 * 2 ** (j - 1) for j in range(1, k + 1))
    bigons = 3 * 2**k
    return formal, nondegenerate, bigons


def test_census_matches_round_sums():
    for k in range(0, 9):
        diagram = tessellate(k)
        formal, nondeg, bigons = _oracle_counts(k)
        assert diagram.formal_triangle_count == formal
        assert diagram.nondegenerate_count == nondeg
        assert diagram.degenerate_count == formal - nondeg
        assert diagram.bigon_count == bigons
        assert formal_triangle_census(k) == formal
        assert bigon_census(k) == bigons


def test_census_pinned_small():
    d0 = tessellate(0)
    assert (d0.formal_triangle_count, d0.nondegenerate_count, d0.bigon_count) == (
        10,
        1,
        3,
    )
    d2 = tessellate(2)
    assert (d2.formal_triangle_count, d2.nondegenerate_count, d2.bigon_count) == (
        46,
        10,
        12,
    )


def test_vertex_labels_k2():
    diagram = tessellate(2)
    labels = diagram.label_map()
    # every boundary index acquires a letter at k=2
    assert sorted(labels) == list(range(12))
    assert labels[0] == VertexLabel(0, "a", 0, ())
    assert labels[4] == VertexLabel(4, "b", 0, ())
    assert labels[8] == VertexLabel(8, "c", 0, ())
    # first round: midpoints of the three sides, lettered by complement
    assert labels[2] == VertexLabel(2, "c", 1, (3,))
    assert labels[6] == VertexLabel(6, "a", 1, (1,))
    assert labels[10] == VertexLabel(10, "b", 1, (2,))
    # second round extends the lineage with the new apex letter
    assert labels[1] == VertexLabel(1, "b", 2, (3, 2))
    assert labels[3] == VertexLabel(3, "a", 2, (3, 1))
    assert labels[5] == VertexLabel(5, "c", 2, (1, 3))
    assert labels[11] == VertexLabel(11, "c", 2, (2, 3))


def test_levels_and_degeneracy_k1():
    diagram = tessellate(1)
    by_level = {}
    for t in diagram.triangles:
        by_level.setdefault(t.level, []).append(t)
    assert len(by_level[0]) == 1 and not by_level[0][0].degenerate
    assert by_level[0][0].corners == (0, 2, 4)
    assert len(by_level[1]) == 3
    assert all(not t.degenerate for t in by_level[1])
    assert [t.corners for t in by_level[1]] == [(0, 1, 2), (2, 3, 4), (4, 5, 6)]
    assert len(by_level[2]) == 6 and all(t.degenerate for t in by_level[2])
    assert len(by_level[3]) == 12 and all(t.degenerate for t in by_level[3])
    assert all(len(t.beta) == t.level for t in diagram.triangles)


def test_pad_loop_rounding():
    y = GenLetter.y(1, 4)
    three = KernelLoop((y, y.inverse(), y))
    k, steps = pad_loop(three)
    assert k == 0 and len(steps) == 3 and None not in steps

    seven = KernelLoop(tuple([y, y.inverse()] * 3 + [y]))
    k, steps = pad_loop(seven)
    assert k == 2 and len(steps) == 12
    assert steps[7:] == (None,) * 5

    twelve = KernelLoop(tuple([y, y.inverse()] * 6))
    k, steps = pad_loop(twelve)
    assert k == 2 and len(steps) == 12 and None not in steps

    with pytest.raises(ValueError):
        pad_loop(KernelLoop((y, y.inverse())))


def test_closure_fixed_example():
    assert superadditive_closure((0, 5, 5, 5)) == (0, 5, 10, 15)
    assert superadditive_closure(()) == ()
    # already superadditive: fixed point
    squares = tuple(x * x for x in range(12))
    assert superadditive_closure(squares) == squares


def test_closure_against_brute_force():
    import functools
    import random as _random

    rng = _random.Random(20260814)
    for _ in range(50):
        n = rng.randint(1, 20)
        table = tuple(rng.randint(0, 100) for _ in range(n + 1))

        @functools.lru_cache(maxsize=None)
        def brute(x):
            best = table[x]
            for i in range(1, x):
                best = max(best, brute(i) + brute(x - i))
            return best

        assert superadditive_closure(table) == tuple(
            brute(x) for x in range(n + 1)
        )
        brute.cache_clear()


@given(st.lists(st.integers(min_value=0, max_value=500), min_size=1, max_size=24))
@settings(max_examples=60, deadline=None)
def test_closure_properties(table):
    closed = superadditive_closure(table)
    assert all(c >= v for c, v in zip(closed, table))
    for i in range(1, len(closed)):
        for j in range(1, len(closed) - i):
            assert closed[i] + closed[j] <= closed[i + j]
    assert superadditive_closure(closed) == closed


def test_dominance_check():
    assert dominance_check(lambda n: n * n, lambda n: n * n, upto=50) == 1
    assert dominance_check(lambda n: 10 * n * n, lambda n: n * n, upto=50) == 3
    assert (
        dominance_check(lambda n: 2**n, lambda n: n * n, upto=30, c_max=64)
        is None
    )


def test_model_kinds():
    quad = DehnModel.quadratic()
    assert quad(5) == 25 and quad.superadditive
    cubic = DehnModel.polynomial(3)
    assert cubic(2) == 8 and cubic.superadditive
    with pytest.raises(ValueError):
        DehnModel.polynomial(0)
    table = DehnModel.from_table([0, 1, 4], superadditive=False)
    assert table(2) == 4 and not table.superadditive
    with pytest.raises(ModelRangeError):
        table(3)
    user = DehnModel.from_function(lambda x: 7 * x, superadditive=True)
    assert user(3) == 21
    with pytest.raises(ValueError):
        quad(-1)


def test_kernel_loop_validation():
    inst = df_instance(3)
    y = GenLetter.y(1, 4)
    z = GenLetter.z(1, 2, 5, 1)
    good = KernelLoop((y, z, z.inverse(), y.inverse()))
    good.validate(inst)
    with pytest.raises(OpenLoop):
        KernelLoop((y, z)).validate(inst)
    parsed = KernelLoop.from_tokens(["Y(1,4)", "-Y(1,4)", "Y(2,5)", "-Y(2,5)"])
    parsed.validate(inst)
    assert parsed.display() == "Y(1,4) -Y(1,4) Y(2,5) -Y(2,5)"


def test_random_kernel_loop_is_seeded_and_closed():
    inst = df_instance(3)
    loop = random_kernel_loop(inst, 40, seed=7)
    loop.validate(inst)
    assert 3 <= len(loop) <= 40
    again = random_kernel_loop(inst, 40, seed=7)
    assert loop.letters == again.letters
    other = random_kernel_loop(inst, 40, seed=8)
    assert loop.letters != other.letters


def test_fill_commutator_loop_quadratic():
    inst = df_instance(3)
    loop = KernelLoop(
        (
            GenLetter.y(1, 4),
            GenLetter.y(2, 4),
            GenLetter.y(1, 4, -1),
            GenLetter.y(2, 4, -1),
        )
    )
    report = fill(inst, loop, DehnModel.quadratic())
    assert isinstance(report, AreaReport)
    assert report.k == 1 and report.loop_length == 6
    assert report.triangle_count == 22
    assert report.nondegenerate_count == 4
    assert report.degenerate_count == 18
    assert report.bigon_count == 6
    assert report.bigon_constant == 49  # model(7)
    assert report.branch == "superadditive"
    assert len(report.triangle_costs) == 4
    for cost in report.triangle_costs:
        assert cost.cost == 25 * (24 * cost.D) ** 2
    assert report.exact_sum == (
        sum(c.cost for c in report.triangle_costs) + 6 * 49
    )
    assert report.closed_form_bound == 100 * (32 * 6) ** 2 + 49 * 6
    assert report.exact_sum <= report.closed_form_bound


def test_fill_table_model_logarithmic_branch():
    inst = df_instance(3)
    loop = KernelLoop(
        (
            GenLetter.y(1, 4),
            GenLetter.y(2, 4),
            GenLetter.y(1, 4, -1),
            GenLetter.y(2, 4, -1),
        )
    )
    # linear table, deliberately flagged non-superadditive
    table = DehnModel.from_table(range(24 * 6 + 1), superadditive=False)
    report = fill(inst, loop, table)
    assert report.branch == "logarithmic"
    assert report.bigon_constant == 7
    # closure of a linear table is itself; log2(6/3) = 1
    assert report.closed_form_bound == (75 + 25) * (24 * 6) + 7 * 6
    assert report.exact_sum <= report.closed_form_bound


def test_fill_random_loop():
    inst = df_instance(3)
    loop = random_kernel_loop(inst, 20, seed=3)
    report = fill(inst, loop, DehnModel.quadratic())
    assert report.exact_sum <= report.closed_form_bound
    assert report.nondegenerate_count == 3 * 2**report.k - 2


def test_fill_rejects_bad_input():
    inst = df_instance(3)
    y = GenLetter.y(1, 4)
    with pytest.raises(OpenLoop):
        fill(inst, KernelLoop((y, y, y)), DehnModel.quadratic())
    with pytest.raises(ValueError):
        fill(inst, KernelLoop((y, y.inverse())), DehnModel.quadratic())

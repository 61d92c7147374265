from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerphi.abelian import BlockDecomposition, ZVec
from kerphi.factor import (
    DistanceBudgetExceeded,
    FactorSpec,
    SpecInvalid,
    UnsupportedRewrite,
    Word,
    build_kernel_section_gens,
    df_factor_spec,
    distance,
    distance_or_bound,
    evaluate_ks_word,
    evaluate_phi,
    kernel_section_gens,
    ks_length_upper_bound,
    rewrite_to_ks_basis,
    section_word,
)

DEC3 = BlockDecomposition.uniform(3)


def _w(*letters):
    return Word.from_letters(letters)


# --- words ---------------------------------------------------------------


def test_free_reduction():
    assert _w((1, 1), (1, -1)).is_identity()
    assert _w((1, 1), (2, 1), (2, -1), (1, -1)).is_identity()
    assert _w((1, 1), (2, 1), (1, -1)).letters == ((1, 1), (2, 1), (1, -1))


def test_seam_multiplication():
    a = _w((1, 1), (2, 1))
    b = _w((2, -1), (3, 1))
    assert (a * b).letters == ((1, 1), (3, 1))
    assert (a * a.inverse()).is_identity()


def test_power():
    g = Word.gen(1)
    assert g.power(3).letters == ((1, 1),) * 3
    assert g.power(-2).letters == ((1, -1),) * 2
    assert g.power(0).is_identity()


def test_str():
    assert str(Word()) == "e"
    assert str(_w((1, 1), (2, -1))) == "1 2^-1"


_letters = st.tuples(st.integers(1, 3), st.sampled_from((1, -1)))


@given(st.lists(_letters), st.lists(_letters))
def test_word_group_laws(xs, ys):
    a, b = Word.from_letters(xs), Word.from_letters(ys)
    assert (a * b) * b.inverse() == a
    assert (a * b).inverse() == b.inverse() * a.inverse()
    # from_letters agrees with letter-by-letter multiplication
    assert Word.from_letters(xs + ys) == a * b


# --- the doubled factor model ---------------------------------------------


def test_df3_shape():
    spec = df_factor_spec(DEC3)
    assert spec.generator_count == 6
    assert spec.ks_free_basis
    assert evaluate_phi(spec, Word.gen(2)) == DEC3.basis(2)
    assert evaluate_phi(spec, Word.gen(5)) == DEC3.basis(2)


def test_df3_kernel_words():
    gens = build_kernel_section_gens(df_factor_spec(DEC3))
    # first-half generators are their own section lifts
    assert gens.Y[0].is_identity()
    assert gens.Y[2].is_identity()
    # the doubled generator x_4 contributes x_4 x_1^-1
    assert gens.Y[3] == _w((4, 1), (1, -1))
    assert gens.nonidentity_y_indices == (4, 5, 6)
    assert gens.Z[1][0] == Word.gen(2)


def test_df_kernel_words_nonuniform_blocks():
    dec = BlockDecomposition(m=5, n=3, block_sizes=(2, 2, 1))
    gens = build_kernel_section_gens(df_factor_spec(dec))
    for u in range(1, 6):
        assert gens.Y[u - 1].is_identity()
        assert gens.Y[5 + u - 1] == _w((5 + u, 1), (u, -1))


def test_kernel_words_satisfy_phi_zero():
    dec = BlockDecomposition(m=4, n=3, block_sizes=(2, 1, 1))
    spec = df_factor_spec(dec)
    for y in build_kernel_section_gens(spec).Y:
        assert evaluate_phi(spec, y).is_zero()


def test_section_word_canonical_order():
    dec = BlockDecomposition(m=4, n=3, block_sizes=(2, 1, 1))
    spec = df_factor_spec(dec)
    w = section_word(spec, 1, (2, -1))
    assert w.letters == ((1, 1), (1, 1), (2, -1))
    with pytest.raises(ValueError):
        section_word(spec, 1, (1,))


def test_bad_section_rejected():
    spec = df_factor_spec(DEC3)
    table = list(map(list, spec.section_table))
    table[1][0] = Word.gen(3)  # maps to e_3, not e_2
    bad = dataclasses.replace(
        spec, section_table=tuple(tuple(r) for r in table)
    )
    with pytest.raises(SpecInvalid) as err:
        build_kernel_section_gens(bad)
    assert "block 2" in str(err.value)


# --- rewriting and distances ----------------------------------------------


def test_rewrite_round_trips():
    spec = df_factor_spec(DEC3)
    w = _w((4, 1), (2, -1), (6, 1))
    ks = rewrite_to_ks_basis(spec, w)
    assert evaluate_ks_word(spec, ks) == w


def test_rewrite_requires_flag():
    spec = dataclasses.replace(df_factor_spec(DEC3), ks_free_basis=False)
    with pytest.raises(UnsupportedRewrite):
        rewrite_to_ks_basis(spec, Word.gen(1))


def test_distance_of_doubled_generator():
    spec = df_factor_spec(DEC3)
    assert distance(spec, Word(), Word.gen(4)) == 2
    assert distance(spec, Word(), Word.gen(1)) == 1
    assert distance(spec, Word.gen(2), Word.gen(2)) == 0


def test_distance_is_left_invariant():
    spec = df_factor_spec(DEC3)
    a, b = _w((1, 1), (5, -1)), _w((6, 1), (2, 1))
    c = _w((3, -1), (4, 1))
    assert distance(spec, a, b) == distance(spec, c * a, c * b)


@settings(deadline=None)
@given(st.lists(st.tuples(st.integers(1, 6), st.sampled_from((1, -1))), max_size=5))
def test_bfs_agrees_with_rewrite(letters):
    spec = df_factor_spec(DEC3)
    blind = dataclasses.replace(spec, ks_free_basis=False, bfs_budget=12)
    w = Word.from_letters(letters)
    assert distance(blind, Word(), w) == distance(spec, Word(), w)


def test_budget_exhaustion_reports_bound():
    spec = dataclasses.replace(
        df_factor_spec(DEC3), ks_free_basis=False, bfs_budget=3
    )
    far = _w(*(((4, 1),) * 4))  # ks length 8
    with pytest.raises(DistanceBudgetExceeded) as err:
        distance(spec, Word(), far)
    assert err.value.best_bound == 8
    est = distance_or_bound(spec, Word(), far)
    assert est == (8, False)
    assert ks_length_upper_bound(spec, far) == 8


def test_cached_gens_identical():
    spec = df_factor_spec(DEC3)
    assert kernel_section_gens(spec) is kernel_section_gens(spec)

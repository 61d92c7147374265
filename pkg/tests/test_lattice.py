from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

import kerphi.lattice as lat
from kerphi.abelian import ZVec
from kerphi.product import df_instance, phi

INST = df_instance(3)


# --- label sequences -------------------------------------------------------


def test_label_sequences_small():
    seqs = lat.build_label_sequences(3)
    assert [s.members for s in seqs] == [(1,), (2,), (3,), (4,), (5,), (6,)]
    seqs4 = lat.build_label_sequences(4)
    assert [s.members for s in seqs4] == [
        (1, 2), (3,), (4,), (5, 6), (7,), (8,)
    ]
    seqs5 = lat.build_label_sequences(5)
    assert [s.members for s in seqs5] == [
        (1, 2), (3, 4), (5,), (6, 7), (8, 9), (10,)
    ]


def test_label_sequence_sizes_weakly_decrease():
    for n in range(3, 30):
        sizes = [len(s) for s in lat.build_label_sequences(n)[:3]]
        assert sizes[0] >= sizes[1] >= sizes[2] >= 1
        assert sum(sizes) == n


def test_class_of_slot_partitions():
    for n in (3, 4, 5, 7):
        seen = [lat.class_of_slot(n, s) for s in range(1, 2 * n + 1)]
        for c in range(1, 7):
            assert seen.count(c) == len(lat.alpha(n, c))


def test_dotted_shift_targets():
    # class-1 blocks shift to the head of the upper pair, class-2 blocks
    # into the head below them, class-3 blocks wrap to the front
    assert lat.dotted_shift(3, 1, 1) == 5
    assert lat.dotted_shift(3, 2, 2) == 3
    assert lat.dotted_shift(3, 3, 3) == 1
    assert [lat.dotted_shift(4, 1, j) for j in (1, 2)] == [7, 8]
    assert [lat.dotted_shift(5, 2, j) for j in (3, 4)] == [5, 6]


# --- generator letters -----------------------------------------------------


def test_letter_parse_format_round_trip():
    for token in ("Y(2,4)", "-Y(2,4)", "Z(1,2,5,1,+)", "Z(3,6,1,2,-)"):
        assert lat.format_letter(lat.parse_letter(token)) == token
    assert lat.parse_letter("-Z(1,2,5,1,+)") == lat.parse_letter(
        "Z(1,2,5,1,-)"
    )


def test_letter_validation():
    with pytest.raises(ValueError):
        lat.GenLetter.z(1, 2, 2, 1)
    with pytest.raises(ValueError):
        lat.parse_letter("Q(1,2)")
    with pytest.raises(ValueError):
        lat.parse_letter("Z(1,2,5,1,?)")


def test_letters_realize_in_kernel():
    y = lat.GenLetter.y(2, 4).realize(INST)
    assert phi(y).is_zero()
    assert y.support() == (2,)
    z = lat.GenLetter.z(1, 2, 5, 1).realize(INST)
    assert phi(z).is_zero()
    assert z.support() == (2, 5)
    assert lat.GenLetter.z(1, 2, 5, 1, -1).realize(INST) == z.inverse()


# --- encodings --------------------------------------------------------------


def test_encoding_round_trip_and_invariants():
    for text in ("1 2 3 / 4 5 6", "1. 2 3 / 5 2 3", "3. / 1/3/6"):
        assert lat.encoding_to_string(lat.encoding_from_string(text)) == text
    with pytest.raises(ValueError):
        lat.LAColumn(1, True, (1, 4))  # dot with only standard slots
    with pytest.raises(ValueError):
        lat.LAColumn(2, False, (3,))  # shifted slot without a dot


def test_apply_encoding_places_blocks():
    v = ZVec((2, -1, 3), INST.decomposition)
    g = lat.apply_la_encoding(
        INST, v, lat.encoding_from_string("1 2 3 / 4 5 6")
    )
    assert g.support() == (4, 5, 6)
    assert phi(g) == v
    g2 = lat.apply_la_encoding(
        INST, v, lat.encoding_from_string("1 2 3. / 4 5 1")
    )
    assert g2.support() == (1, 4, 5)
    assert phi(g2) == v


def test_apply_encoding_rejects_descriptive_columns():
    v = ZVec((1, 0, 0), INST.decomposition)
    with pytest.raises(lat.EncodingNotExecutable):
        lat.apply_la_encoding(
            INST, v, lat.encoding_from_string("1 2 3 / 1/4 5 6")
        )


@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_apply_encoding_preserves_phi(coords):
    v = ZVec(tuple(coords), INST.decomposition)
    for text in ("1 2 3 / 4 5 6", "1 2 3 / 4 5 3", "1 2. 3 / 1 3 6"):
        g = lat.apply_la_encoding(INST, v, lat.encoding_from_string(text))
        assert phi(g) == v


# --- subgroup tables --------------------------------------------------------


def test_forty_six_subgroups():
    defs = lat.build_all_subgroups(INST)
    assert len(defs) == 46
    assert sum(1 for d in defs.values() if d.kind == "face") == 25
    assert sum(1 for d in defs.values() if d.kind == "edge") == 21


def test_all_generators_in_kernel():
    defs = lat.build_all_subgroups(INST)
    for sdef in defs.values():
        ok, witnesses = lat.verify_phi_zero(INST, sdef)
        assert ok, (sdef.label, witnesses)


@pytest.mark.parametrize("n", [3, 4])
def test_patterns_and_determinacy(n):
    inst = df_instance(n)
    for sdef in lat.build_all_subgroups(inst).values():
        rep = lat.verify_pattern(inst, sdef)
        assert rep.ok, (sdef.label, [c for c in rep.slots if not c.ok])
        drep = lat.verify_determinacy(inst, sdef)
        assert drep.ok, (sdef.label, drep.options)


def test_b_patterns_for_faces():
    for sdef in lat.build_all_subgroups(INST).values():
        rep = lat.verify_b_pattern(INST, sdef)
        if sdef.kind == "edge":
            assert rep is None
        else:
            assert rep is not None and rep.ok, (sdef.label, rep.options)


def test_ambiguous_edge_has_both_rows():
    sdef = lat.build_subgroup(INST, "A2N_35")
    assert sdef.alt_pattern is not None
    assert sdef.notes
    # the derived row verifies; the printed alternative is display-only
    assert lat.verify_pattern(INST, sdef).ok


def test_specific_generating_sets():
    defs = lat.build_all_subgroups(INST)
    la = {lat.format_letter(l) for l in defs["L"].generators}
    assert la == {"Z(1,1,4,1,+)", "Z(2,2,5,1,+)", "Z(3,3,6,1,+)"}
    a33 = {lat.format_letter(l) for l in defs["A33N"].generators}
    assert a33 == {"Z(3,3,6,1,+)", "Z(3,3,1,1,+)"}
    g123 = defs["G123"].generators
    # three sources, each with three kernel words and three sink pairs
    assert len(g123) == 18
    sinks = {(l.block, l.sink) for l in g123 if l.kind == "Z"}
    assert sinks == {(1, 4), (2, 5), (3, 6)}


def test_determinacy_options_count():
    defs = lat.build_all_subgroups(INST)
    assert len(defs["G123"].determinacy) == 1
    assert len(defs["A3G12"].determinacy) == 2
    assert len(defs["L"].determinacy) == 2
    assert defs["A3G12"].determinacy[0].A == (1, 2, 3)
    assert defs["A3G12"].determinacy[1].A == (1, 2, 6)
    # edges borrow a single option from a face
    assert defs["G1"].determinacy[0].A == (1, 5, 6)
    assert defs["A2N_35"].determinacy == defs["A2G2N"].determinacy


# --- incidence --------------------------------------------------------------


def test_adjacency_table_shape():
    assert len(lat.EDGE_FACE_ADJACENCY) == 21
    assert set(lat.EDGE_FACE_ADJACENCY) == set(lat.EDGE_LABELS)
    for faces in lat.EDGE_FACE_ADJACENCY.values():
        assert all(f in lat.FACE_LABELS for f in faces)


def test_edge_letters_spell_in_faces():
    defs = lat.build_all_subgroups(INST)
    report = lat.edge_face_containment_report(INST)
    assert set(report) == set(lat.EDGE_FACE_ADJACENCY)
    for edge_label, row in report.items():
        for face_label, witnesses in row.items():
            assert len(witnesses) == len(defs[edge_label].generators)
            assert all(w.length <= 2 for w in witnesses)


def test_alias_edges_spell_in_their_faces():
    defs = lat.build_all_subgroups(INST)
    for alias, faces in lat.ALIAS_FACE_ADJACENCY.items():
        src = defs[lat.EDGE_ALPHA_ALIASES[alias]]
        for face in faces:
            wits = lat.edge_in_face_witnesses(INST, src, defs[face])
            assert all(w.length <= 2 for w in wits)


# --- dumps -------------------------------------------------------------------


def test_dumps_are_stable():
    assert lat.tables_json(INST) == lat.tables_json(df_instance(3))
    text = lat.tables_text(INST)
    assert text == lat.tables_text(df_instance(3))
    assert "G14N" in text and "edge -> incident faces" in text

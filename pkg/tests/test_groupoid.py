"""Tests for the groupoid core: verification, transitivity, vertex groups."""
import numpy as np
import pytest

from gpdflow.algebra import preset_group
from gpdflow.groupoid import (
    Groupoid,
    check_local_triviality,
    disjoint_union,
    hom_set,
    is_transitive,
    normalize_groupoid,
    one_object_groupoid,
    pair_groupoid,
    verify_groupoid,
    verify_groupoid_iso,
    vertex_group,
    vertex_groups_isomorphic,
)


def product_groupoid(n_objects, group):
    """Oracle fixture built independently of the library constructors: one
    arrow (v, w, a) for every ordered object pair and group element, composed
    componentwise."""
    assert group.identity == 0
    coords = [(x, x, 0) for x in range(n_objects)]
    for v in range(n_objects):
        for w in range(n_objects):
            for a in range(group.order):
                if v == w and a == 0:
                    continue
                coords.append((v, w, a))
    index = {c: i for i, c in enumerate(coords)}
    comp = {}
    for (v, w, a) in coords:
        for (w2, z, b) in coords:
            if w == w2:
                comp[(index[(v, w, a)], index[(w2, z, b)])] = \
                    index[(v, z, group.mul(a, b))]
    return Groupoid.from_tables(
        n_objects=n_objects,
        src=[c[0] for c in coords],
        tgt=[c[1] for c in coords],
        unit=list(range(n_objects)),
        inv=[index[(w, v, group.inv[a])] for (v, w, a) in coords],
        comp=comp,
    ), coords, index


# --- verify_groupoid -------------------------------------------------------

@pytest.mark.parametrize("name", ["Z1", "Z2", "S3", "D4"])
def test_one_object_groupoid_verifies(name):
    g = one_object_groupoid(preset_group(name))
    diag = verify_groupoid(g)
    assert diag.ok, diag
    assert g.is_normalized()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_pair_groupoid_verifies(n):
    g = pair_groupoid(n)
    diag = verify_groupoid(g)
    assert diag.ok, diag
    assert g.is_normalized()
    assert g.n_arrows == n * n


def test_product_fixture_verifies():
    g, _, _ = product_groupoid(2, preset_group("Z2"))
    assert verify_groupoid(g).ok


def test_remapped_unit_fails_unit_law():
    # pair groupoid on two objects; arrows are (0,0), (1,1), (0,1), (1,0),
    # and the unit of object 0 is remapped to the arrow (0, 1)
    g = pair_groupoid(2)
    broken = Groupoid(
        n_objects=2, src=g.src, tgt=g.tgt,
        unit=np.array([2, 1]), inv=g.inv,
        comp_key=g.comp_key, comp_val=g.comp_val)
    diag = verify_groupoid(broken)
    assert not diag.ok
    assert diag.failure == "unit law"
    assert diag.witness == (2,)
    assert not diag.structural


def test_comp_on_non_composable_pair_is_structural():
    g = pair_groupoid(2)
    # arrow 2 is (0, 1) and arrow 0 is (0, 0): tgt(2) = 1 != 0 = src(0)
    triples = [(gg, hh, vv) for gg, hh, vv in g.comp_triples()] + [(2, 0, 2)]
    broken = Groupoid.from_tables(2, g.src, g.tgt, g.unit, g.inv, triples)
    diag = verify_groupoid(broken)
    assert not diag.ok and diag.structural
    assert diag.failure == "composability domain violated"
    assert diag.witness == (2, 0)


def test_missing_comp_entry_is_structural():
    g = pair_groupoid(2)
    triples = g.comp_triples()[:-1]
    broken = Groupoid.from_tables(2, g.src, g.tgt, g.unit, g.inv, triples)
    diag = verify_groupoid(broken)
    assert not diag.ok and diag.structural
    assert diag.failure == "composability domain violated"
    assert diag.notes.get("detail") == "missing entry on a composable pair"


def test_duplicate_comp_pair_is_structural():
    g = pair_groupoid(2)
    triples = g.comp_triples() + [g.comp_triples()[0]]
    broken = Groupoid.from_tables(2, g.src, g.tgt, g.unit, g.inv, triples)
    diag = verify_groupoid(broken)
    assert not diag.ok and diag.structural
    assert diag.failure == "duplicate comp pair"


def test_broken_associativity_detected_by_both_strategies():
    g = one_object_groupoid(preset_group("Z4"))
    comp = {(a, b): v for a, b, v in g.comp_triples()}
    comp[(1, 1)] = 3  # leaves unit and inverse laws intact
    broken = Groupoid.from_tables(1, g.src, g.tgt, g.unit, g.inv, comp)
    for mode in ("full", "generated"):
        diag = verify_groupoid(broken, assoc_mode=mode)
        assert not diag.ok
        assert diag.failure == "associativity"
        assert not diag.structural


def test_assoc_strategies_agree_on_valid_fixture():
    g, _, _ = product_groupoid(3, preset_group("S3"))
    full = verify_groupoid(g, assoc_mode="full")
    gen = verify_groupoid(g, assoc_mode="generated")
    assert full.ok and gen.ok
    assert full.notes["assoc_strategy"] == "full"
    assert gen.notes["assoc_strategy"] == "generated"


def test_broken_inverse_detected():
    g = one_object_groupoid(preset_group("Z3"))
    broken = Groupoid(1, g.src, g.tgt, g.unit, np.array([0, 1, 2]),
                      g.comp_key, g.comp_val)
    diag = verify_groupoid(broken)
    assert not diag.ok
    assert diag.failure == "inverse law"


# --- transitivity and local triviality ---------------------------------------

def test_pair_groupoid_is_transitive():
    ok, witness = is_transitive(pair_groupoid(3))
    assert ok and witness is None


def test_disjoint_union_is_not_transitive():
    g = disjoint_union(one_object_groupoid(preset_group("Z2")),
                       one_object_groupoid(preset_group("Z3")))
    assert verify_groupoid(g).ok
    ok, witness = is_transitive(g)
    assert not ok
    assert witness == (0, 1)


@pytest.mark.parametrize("build", [
    lambda: pair_groupoid(3),
    lambda: one_object_groupoid(preset_group("S3")),
    lambda: product_groupoid(2, preset_group("Z2"))[0],
    lambda: disjoint_union(one_object_groupoid(preset_group("Z2")),
                           one_object_groupoid(preset_group("Z2"))),
])
def test_local_triviality_agrees_with_transitivity(build):
    g = build()
    lt = check_local_triviality(g)
    ok, witness = is_transitive(g)
    assert lt.trivial == ok
    if not ok:
        assert lt.witness == witness
    else:
        for x, tau in lt.sections.items():
            assert len(tau) == g.n_objects
            for y, arrow in enumerate(tau):
                assert int(g.src[arrow]) == x and int(g.tgt[arrow]) == y


# --- hom sets and vertex groups ----------------------------------------------

def test_vertex_group_of_pair_groupoid_is_trivial():
    hs = vertex_group(pair_groupoid(3), 1)
    assert hs.group.order == 1
    assert hs.arrows == [1]


def test_vertex_group_of_one_object_groupoid_recovers_table():
    s3 = preset_group("S3")
    hs = vertex_group(one_object_groupoid(s3), 0)
    assert hs.group.order == 6
    assert hs.group.mult == s3.mult


def test_vertex_group_on_product_fixture():
    g, coords, index = product_groupoid(2, preset_group("Z3"))
    hs = vertex_group(g, 1)
    assert [coords[a] for a in hs.arrows] == [(1, 1, 0), (1, 1, 1), (1, 1, 2)]
    assert hs.group.mult == preset_group("Z3").mult


def test_hom_set_size_matches_vertex_group_and_translation_bijects():
    g, coords, index = product_groupoid(3, preset_group("S3"))
    for x in range(3):
        loops = vertex_group(g, x)
        for y in range(3):
            hom = hom_set(g, x, y)
            assert len(hom.arrows) == loops.group.order
            a = hom.arrows[0]
            image = {g.compose(a, l) for l in vertex_group(g, y).arrows}
            assert image == set(hom.arrows)


def test_vertex_groups_isomorphic_on_product_fixture():
    g, coords, index = product_groupoid(2, preset_group("Z2"))
    iso = vertex_groups_isomorphic(g, 0, 1)
    assert coords[iso.via] == (0, 1, 0)
    assert iso.local_map == [0, 1]
    assert {coords[a]: coords[b] for a, b in iso.arrow_map.items()} == \
        {(0, 0, 0): (1, 1, 0), (0, 0, 1): (1, 1, 1)}


def test_vertex_groups_isomorphic_requires_joining_arrow():
    g = disjoint_union(one_object_groupoid(preset_group("Z2")),
                       one_object_groupoid(preset_group("Z2")))
    with pytest.raises(ValueError):
        vertex_groups_isomorphic(g, 0, 1)


# --- isomorphism checking ----------------------------------------------------

def test_identity_iso_passes():
    g = pair_groupoid(3)
    diag = verify_groupoid_iso(g, g, list(range(3)), list(range(g.n_arrows)))
    assert diag.ok


def test_object_swap_iso_on_pair_groupoid():
    g = pair_groupoid(2)
    # pairs in construction order: (0,0), (1,1), (0,1), (1,0)
    obj_map = [1, 0]
    arr_map = [1, 0, 3, 2]
    diag = verify_groupoid_iso(g, g, obj_map, arr_map)
    assert diag.ok


def test_non_bijective_map_is_structural():
    g = pair_groupoid(2)
    diag = verify_groupoid_iso(g, g, [0, 0], [0, 1, 2, 3])
    assert not diag.ok and diag.structural
    assert "bijection" in diag.failure


def test_wrong_arrow_map_fails():
    g = pair_groupoid(2)
    diag = verify_groupoid_iso(g, g, [0, 1], [0, 1, 3, 2])
    assert not diag.ok and not diag.structural


def test_iso_between_different_sizes_is_structural():
    diag = verify_groupoid_iso(pair_groupoid(2), pair_groupoid(3),
                               [0, 1], [0, 1, 2, 3])
    assert not diag.ok and diag.structural


# --- normalization ------------------------------------------------------------

def test_normalize_disjoint_union():
    g = disjoint_union(one_object_groupoid(preset_group("Z2")),
                       one_object_groupoid(preset_group("Z3")))
    assert not g.is_normalized()
    normalized, perm = normalize_groupoid(g)
    assert normalized.is_normalized()
    assert verify_groupoid(normalized).ok
    # the relabelling is an isomorphism from the original
    diag = verify_groupoid_iso(g, normalized, list(range(g.n_objects)), perm)
    assert diag.ok


def test_normalize_is_identity_on_normalized_input():
    g = pair_groupoid(3)
    normalized, perm = normalize_groupoid(g)
    assert perm == list(range(g.n_arrows))
    assert np.array_equal(normalized.unit, g.unit)

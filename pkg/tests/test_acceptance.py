"""End-to-end acceptance: nine suites, one pass/fail line each.

Each test here re-derives its expectations independently of the module
under test wherever a value is computable a second way: brute-force gauge
search against the holonomy verdict, exhaustive assignment enumeration
against the equivariant-map enumeration, the group-by-graph matrix against
the orbit-quotient oracle.  Run with ``pytest -v`` to see one line per
suite.
"""
import itertools
import json
import time

import pytest

from gpdflow.algebra import preset_group, verify_group
from gpdflow.amenability import extreme_amenability_check, fiber_action, \
    fixed_points, invariant_sections, section_existence_suite
from gpdflow.bundle import holonomy_group, is_trivial
from gpdflow.cli import COMMANDS, main
from gpdflow.dynamics import base_action, build_ambit, \
    compose_equivariant_maps, disjoint_union_actions, \
    enumerate_equivariant_maps, fiber_semigroup, minimal_flow_uniqueness, \
    minimal_subflows, universal_map, verify_action, verify_equivariant_map, \
    EquivariantMap
from gpdflow.ehresmann import closed_form_matches_oracle, \
    fiber_chart_sigma, fiber_chart_tau, groupoid_of_bundle, \
    point_base_degenerate, roundtrip_bundle, vertex_chart_phi, \
    vertex_chart_psi
from gpdflow.fixtures import MATRIX_GRAPHS, MATRIX_GROUPS, \
    large_random_bundle, matrix_bundle, named_bundles
from gpdflow.groupoid import check_local_triviality, is_transitive, \
    vertex_group, verify_groupoid
from gpdflow.serialize import canonical_dumps


def matrix_fixtures():
    return [(f"{gname}/{shape}", matrix_bundle(gname, shape))
            for gname in MATRIX_GROUPS for shape in MATRIX_GRAPHS]


def all_points(b):
    return [(v, h) for v in range(b.base.n_vertices)
            for h in b.group.elements]


def pact(grp, p, g):
    return (p[0], grp.mul(p[1], g))


def class_coord(grp, p, q):
    return (p[0], q[0], grp.mul(p[1], grp.inv[q[1]]))


def test_transport_groupoid_matrix():
    """Every group-by-graph pair: verified groupoid, transitive, locally
    trivial, exactly |V|^2 |G| arrows, coordinates equal the orbit oracle."""
    for name, b in matrix_fixtures():
        tg = groupoid_of_bundle(b)
        gpd = tg.groupoid
        assert verify_groupoid(gpd).ok, name
        ok, witness = is_transitive(gpd)
        assert ok, (name, witness)
        assert check_local_triviality(gpd).trivial, name
        expected = b.base.n_vertices ** 2 * b.group.order
        assert gpd.n_arrows == expected, name
        oracle = closed_form_matches_oracle(tg)
        assert oracle.ok, (name, oracle.failure, oracle.witness)


def test_chart_suite_exhaustive():
    """phi/psi are group isomorphisms with the conjugation rebasing law;
    tau/sigma are bijections with the right projections, rebasing by right
    translation, and the equivariance laws, at every basepoint of every
    matrix fixture."""
    for name, b in matrix_fixtures():
        tg = groupoid_of_bundle(b)
        gpd, grp = tg.groupoid, b.group
        points = all_points(b)
        phis, psis, taus, sigmas = {}, {}, {}, {}
        for u0 in points:
            phi = vertex_chart_phi(tg, u0)
            psi = vertex_chart_psi(tg, u0)
            tau = fiber_chart_tau(tg, u0)
            sigma = fiber_chart_sigma(tg, u0)
            phis[u0], psis[u0] = phi, psi
            taus[u0], sigmas[u0] = tau, sigma
            for g in grp.elements:
                moved = pact(grp, u0, g)
                assert phi.of(tg.arrow_of(*class_coord(grp, moved, u0))) == g
                assert psi.of(tg.arrow_of(*class_coord(grp, u0, moved))) \
                    == grp.inv[g]
            for loop in phi.arrow_to_group:
                assert psi.of(loop) == grp.inv[phi.of(gpd.inverse(loop))]
            for arrow, point in tau.arrow_to_point.items():
                assert point[0] == int(gpd.src[arrow])
            for arrow, point in sigma.arrow_to_point.items():
                assert point[0] == int(gpd.tgt[arrow])
            assert sorted(tau.point_to_arrow) == points
            assert sorted(sigma.point_to_arrow) == points
            for w in points:
                assert tau.of(tg.arrow_of(*class_coord(grp, w, u0))) == w
                assert sigma.of(tg.arrow_of(*class_coord(grp, u0, w))) == w
        for u0 in points:
            for h in grp.elements:
                moved = pact(grp, u0, h)
                for loop in phis[u0].arrow_to_group:
                    conj = grp.conjugate(phis[u0].of(loop), h)
                    assert phis[moved].of(loop) == conj, name
                    conj = grp.conjugate(psis[u0].of(loop), h)
                    assert psis[moved].of(loop) == conj, name
                for y in taus[u0].arrow_to_point:
                    assert taus[moved].of(y) == pact(grp, taus[u0].of(y), h)
                for y in sigmas[u0].arrow_to_point:
                    assert sigmas[moved].of(y) == \
                        pact(grp, sigmas[u0].of(y), h)
        for u0 in points:
            tau, psi = taus[u0], psis[u0]
            sigma, phi = sigmas[u0], phis[u0]
            for y in tau.arrow_to_point:
                for loop in psi.arrow_to_group:
                    assert tau.of(gpd.compose(y, loop)) == \
                        pact(grp, tau.of(y), psi.of(loop)), name
            for y in sigma.arrow_to_point:
                for loop in phi.arrow_to_group:
                    assert sigma.of(gpd.compose(loop, y)) == \
                        pact(grp, sigma.of(y), grp.inv[phi.of(loop)]), name


def test_point_base_groups():
    """Over a single vertex the transport groupoid is the group itself,
    with composition matching the full multiplication table."""
    for name in ("Z1", "Z2", "S3", "S4"):
        grp = preset_group(name)
        rep = point_base_degenerate(grp)
        assert rep.iso.ok, (name, rep.iso.failure)
        gpd = rep.transport.groupoid
        assert gpd.n_arrows == grp.order
        for g in grp.elements:
            for h in grp.elements:
                composed = gpd.compose(rep.arrow_map.index(g),
                                       rep.arrow_map.index(h))
                assert rep.arrow_map[composed] == grp.mul(g, h), name


def test_roundtrip_all_fixtures():
    """Bundle -> groupoid -> bundle is an isomorphism with conjugate
    holonomy and the same triviality verdict; the verdict also agrees with
    a brute-force gauge search wherever that search is affordable."""
    fixtures = matrix_fixtures() + sorted(named_bundles().items())
    for name, b in fixtures:
        grp = b.group
        rt = roundtrip_bundle(b)
        rec = rt.reconstructed.bundle
        before = holonomy_group(b).subgroup
        after = holonomy_group(rec).subgroup
        assert any(sorted(grp.conjugate(g, h) for g in before) == after
                   for h in grp.elements), name
        verdict = is_trivial(b).trivial
        assert verdict == is_trivial(rec).trivial, name

        if grp.order ** b.base.n_vertices <= 10 ** 6:
            darts = [(d, b.base.dsrc(d), b.base.dtgt(d), b.labels[d])
                     for d in range(b.base.n_darts)]
            brute = any(
                all(grp.mul(h[t], grp.mul(lab, grp.inv[h[s]])) == grp.identity
                    for _, s, t, lab in darts)
                for h in itertools.product(grp.elements,
                                           repeat=b.base.n_vertices))
            assert brute == verdict, name


def test_universal_property_exhaustive():
    """For every matrix groupoid and every verified action on at most 12
    points, each fiber point receives exactly one equivariant map from the
    ambit, and full enumeration (plus a brute-force assignment search when
    small enough) finds no others."""
    for name, b in matrix_fixtures():
        gpd = groupoid_of_bundle(b).groupoid
        ambit = build_ambit(gpd, 0)
        base = base_action(gpd)
        targets = [base, disjoint_union_actions(base, base), ambit.action]
        for a in targets:
            if a.n_points > 12:
                continue
            assert verify_action(a).ok, name
            fiber = a.fiber(ambit.basepoint)
            maps = enumerate_equivariant_maps(ambit, a)
            assert len(maps) == len(fiber), name
            values_seen = sorted(m.values for m in maps)
            for y in fiber:
                m = universal_map(a, ambit, y)
                assert verify_equivariant_map(m).ok, name
                assert m.values[ambit.u0] == y, name
                assert m.values in values_seen, name

            shapes = [a.fiber(x) for x in ambit.action.anchor]
            total = 1
            for s in shapes:
                total *= len(s)
            if total <= 5000:
                brute = sorted(
                    list(assignment)
                    for assignment in itertools.product(*shapes)
                    if verify_equivariant_map(EquivariantMap(
                        source=ambit.action, target=a,
                        values=list(assignment))).ok)
                assert brute == values_seen, name


def test_fiber_semigroup_suite():
    """The fiber product y * z = l_y(z) composes like the maps themselves,
    forms a group isomorphic to the vertex group, has the unit as its only
    idempotent, and the ambit is its own unique minimal subflow with every
    equivariant self-map bijective."""
    for name, b in matrix_fixtures():
        gpd = groupoid_of_bundle(b).groupoid
        ambit = build_ambit(gpd, 0)
        fs = fiber_semigroup(ambit)
        lmaps = {y: universal_map(ambit.action, ambit, y) for y in fs.fiber}
        for i, y in enumerate(fs.fiber):
            for j, z in enumerate(fs.fiber):
                composed = compose_equivariant_maps(lmaps[y], lmaps[z])
                assert composed.values == \
                    lmaps[fs.fiber[fs.table[i][j]]].values, name
        diag, table_group = verify_group(fs.table, identity=0)
        assert table_group is not None, (name, diag.failure)
        vgrp = vertex_group(gpd, 0).group
        iso = fs.vertex_iso
        assert sorted(iso) == list(range(vgrp.order)), name
        for x in table_group.elements:
            for y in table_group.elements:
                assert iso[table_group.mul(x, y)] == \
                    vgrp.mul(iso[x], iso[y]), name
        assert fs.idempotents == [ambit.u0], name
        assert fs.left_ideals == [sorted(fs.fiber)], name
        flows = minimal_subflows(ambit.action)
        assert len(flows) == 1, name
        assert flows[0].points == list(range(ambit.action.n_points)), name
        rep = minimal_flow_uniqueness(ambit)
        assert rep.all_self_maps_bijective, name
        assert rep.pairwise_isomorphic, name


def test_invariant_section_suite():
    """Trivial structural group: exactly one section per fixed fiber point,
    meeting every fiber once, at every basepoint.  Order two and six: the
    ambit admits none, the group is not extremely amenable, and the
    certificate action is genuinely free.  Counts always equal the number
    of fixed fiber points."""
    bundles = named_bundles()
    trivial_named = [(k, bundles[k]) for k in ("triangle-z1", "wedge2-z1")]
    for entry in section_existence_suite(trivial_named):
        for action_report in entry["actions"]:
            assert all(c == 1
                       for c in action_report["sections_per_basepoint"]), entry
    for key in ("triangle-z1", "wedge2-z1"):
        gpd = groupoid_of_bundle(bundles[key]).groupoid
        for x0 in range(gpd.n_objects):
            a = build_ambit(gpd, x0).action
            secs = invariant_sections(a, x0)
            table, _, grp = fiber_action(a, x0)
            assert len(secs) == len(fixed_points(grp, table)) == 1, key
            for s in secs:
                met = sorted(a.anchor[y] for y in s.values)
                assert met == list(range(gpd.n_objects)), key

    for key in ("triangle-z2-trivial", "triangle-z2-twisted", "edge-s3"):
        gpd = groupoid_of_bundle(bundles[key]).groupoid
        for x0 in range(gpd.n_objects):
            a = build_ambit(gpd, x0).action
            secs = invariant_sections(a, x0)
            table, _, grp = fiber_action(a, x0)
            assert secs == [], key
            assert len(fixed_points(grp, table)) == 0, key

    for gname in ("Z2", "S3"):
        grp = preset_group(gname)
        rep = extreme_amenability_check(grp)
        assert rep.extremely_amenable is False, gname
        cert = rep.certificate
        assert cert.free and cert.fixed == [], gname
        for y in grp.elements:
            for g in grp.elements:
                assert cert.table[y][g] == grp.mul(y, g), gname
                if g != grp.identity:
                    assert cert.table[y][g] != y, gname
    assert extreme_amenability_check(preset_group("Z1")).extremely_amenable


def test_cli_corpus_byte_identical(capsys):
    """Two passes over the whole fixture corpus emit identical bytes, and
    every report is canonical JSON."""
    passes = []
    for _ in range(2):
        chunks = []
        for command in COMMANDS:
            assert main([command, "--fixtures"]) == 0
            chunks.append(capsys.readouterr().out)
        passes.append("".join(chunks))
    assert passes[0] == passes[1]
    for line in passes[0].splitlines():
        assert line == canonical_dumps(json.loads(line))


def test_large_instance_under_ten_seconds():
    """|V| = 20 random connected base, structural group of order 24: the
    9600-arrow groupoid builds and fully verifies within the time budget."""
    b = large_random_bundle()
    assert b.base.n_vertices == 20
    assert b.base.is_connected()
    assert b.group.order == 24
    start = time.perf_counter()
    tg = groupoid_of_bundle(b)
    diag = verify_groupoid(tg.groupoid)
    elapsed = time.perf_counter() - start
    assert diag.ok, diag.failure
    assert tg.groupoid.n_arrows == 9600
    assert elapsed < 10.0, f"took {elapsed:.2f}s"

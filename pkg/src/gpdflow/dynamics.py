"""Groupoid actions, the universal pointed flow, and its fiber semigroup.

A groupoid acts on a finite set through an anchor map: the point ``y`` may
move along exactly the arrows that start at ``anchor(y)``, and lands on a
point anchored at the arrow's target.  The arrows out of a fixed object
``x0``, acted on by composition, form the universal pointed flow (here the
"ambit"): every equivariant map from it to any other action is pinned down
by where the unit goes, and the fiber over ``x0`` composes to a group that
is isomorphic to the vertex group.

Minimal subflows are computed as orbits.  Since arrows are invertible,
every invariant subset is a union of orbits; rather than trusting that
argument the computation re-derives it by exhaustive subset search on
small spaces.  The idempotent and left-ideal machinery likewise accepts an
arbitrary associative table, so the collapse to the group case is observed
rather than assumed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .algebra import FiniteGroup, find_group_isomorphism, verify_group
from .diagnostics import Diagnostics
from .groupoid import Groupoid, is_transitive, vertex_group

__all__ = [
    "GroupoidAction",
    "Ambit",
    "EquivariantMap",
    "Subflow",
    "FiberSemigroup",
    "MinimalFlowReport",
    "verify_action",
    "anchor_is_proper",
    "base_action",
    "disjoint_union_actions",
    "restrict_action",
    "orbits",
    "invariant_subsets",
    "minimal_subflows",
    "build_ambit",
    "verify_equivariant_map",
    "universal_map",
    "enumerate_equivariant_maps",
    "compose_equivariant_maps",
    "semigroup_idempotents",
    "minimal_left_ideals",
    "fiber_semigroup",
    "minimal_flow_uniqueness",
]


@dataclass
class GroupoidAction:
    """A right action of a groupoid on points ``0..n_points-1``.

    ``act`` is a partial table keyed by ``(point, arrow)``; it must be
    defined exactly when ``src(arrow) == anchor[point]``.
    """

    gpd: Groupoid
    n_points: int
    anchor: list[int]
    act: dict[tuple[int, int], int]

    def move(self, y: int, g: int) -> int:
        try:
            return self.act[(y, g)]
        except KeyError:
            raise ValueError(f"move ({y}, {g}) is not defined") from None

    def defined(self, y: int, g: int) -> bool:
        return (y, g) in self.act

    def fiber(self, x: int) -> list[int]:
        return [y for y in range(self.n_points) if self.anchor[y] == x]


def verify_action(a: GroupoidAction) -> Diagnostics:
    """Scan the action laws in a fixed order.

    Structure first: anchor shape and range, table keys in range, then the
    requirement that the table is defined on exactly the pairs with
    ``src(arrow) == anchor[point]``.  Then the pointwise laws: the anchor
    moves with the arrow, units act trivially, and acting along a
    composition equals acting twice.
    """
    gpd, n = a.gpd, a.n_points
    if len(a.anchor) != n:
        return Diagnostics.failed("anchor length mismatch",
                                  (len(a.anchor), n), structural=True)
    for y, x in enumerate(a.anchor):
        if not (0 <= x < gpd.n_objects):
            return Diagnostics.failed("anchor out of range", (y, x),
                                      structural=True)
    for (y, g) in a.act:
        if not (0 <= y < n) or not (0 <= g < gpd.n_arrows):
            return Diagnostics.failed("action table index out of range",
                                      (y, g), structural=True)
        if int(gpd.src[g]) != a.anchor[y]:
            return Diagnostics.failed("composability domain violated",
                                      (y, g), structural=True)
    entries = 0
    for y in range(n):
        for g in gpd.arrows_from(a.anchor[y]):
            if (y, int(g)) not in a.act:
                return Diagnostics.failed(
                    "composability domain violated", (y, int(g)),
                    detail="missing entry on a composable pair")
            entries += 1
    for (y, g), z in a.act.items():
        if not (0 <= z < n):
            return Diagnostics.failed("action value out of range",
                                      (y, g, z), structural=True)
        if a.anchor[z] != int(gpd.tgt[g]):
            return Diagnostics.failed("anchor compatibility", (y, g))
    for y in range(n):
        u = int(gpd.unit[a.anchor[y]])
        if a.act[(y, u)] != y:
            return Diagnostics.failed("action unit law", (y,))
    triples = 0
    by_src: dict[int, list[tuple[int, int, int]]] = {}
    for g, h, gh in a.gpd.comp_triples():
        by_src.setdefault(int(gpd.src[g]), []).append((g, h, gh))
    for y in range(n):
        for g, h, gh in by_src.get(a.anchor[y], ()):
            if a.act[(a.act[(y, g)], h)] != a.act[(y, gh)]:
                return Diagnostics.failed("action associativity", (y, g, h))
            triples += 1
    return Diagnostics.passed(points=n, entries=entries, triples=triples)


def anchor_is_proper(a: GroupoidAction) -> Diagnostics:
    """Always passes: preimages of finite sets are finite.  Exists so the
    hypothesis is an explicit, reportable check rather than folklore."""
    return Diagnostics.passed(
        note="all maps between finite discrete spaces are proper",
        points=a.n_points)


def base_action(gpd: Groupoid) -> GroupoidAction:
    """The groupoid acting on its own objects: ``x . g = tgt(g)``."""
    act = {}
    for g in range(gpd.n_arrows):
        act[(int(gpd.src[g]), g)] = int(gpd.tgt[g])
    return GroupoidAction(gpd=gpd, n_points=gpd.n_objects,
                          anchor=list(range(gpd.n_objects)), act=act)


def disjoint_union_actions(a1: GroupoidAction,
                           a2: GroupoidAction) -> GroupoidAction:
    if a1.gpd is not a2.gpd:
        raise ValueError("disjoint union needs actions of the same groupoid")
    shift = a1.n_points
    act = dict(a1.act)
    for (y, g), z in a2.act.items():
        act[(y + shift, g)] = z + shift
    return GroupoidAction(gpd=a1.gpd, n_points=shift + a2.n_points,
                          anchor=a1.anchor + a2.anchor, act=act)


def restrict_action(a: GroupoidAction, points: list[int]) -> GroupoidAction:
    """Restrict to an invariant subset; points keep their relative order."""
    index = {y: i for i, y in enumerate(points)}
    act = {}
    for (y, g), z in a.act.items():
        if y in index:
            if z not in index:
                raise ValueError(f"subset is not invariant: {y} moves to {z}")
            act[(index[y], g)] = index[z]
    return GroupoidAction(gpd=a.gpd, n_points=len(points),
                          anchor=[a.anchor[y] for y in points], act=act)


# --- orbits and minimal subflows ---------------------------------------------

def orbits(a: GroupoidAction) -> list[list[int]]:
    """Partition of the points into orbits, sorted by least element.

    Forward moves suffice: each move is undone by the inverse arrow, so
    forward reachability is already symmetric.
    """
    seen = [False] * a.n_points
    out = []
    for start in range(a.n_points):
        if seen[start]:
            continue
        seen[start] = True
        orbit, work = [start], [start]
        while work:
            y = work.pop()
            for g in a.gpd.arrows_from(a.anchor[y]):
                z = a.act[(y, int(g))]
                if not seen[z]:
                    seen[z] = True
                    orbit.append(z)
                    work.append(z)
        out.append(sorted(orbit))
    return out


def invariant_subsets(a: GroupoidAction, limit: int = 20) -> list[list[int]]:
    """All nonempty invariant subsets by exhaustive scan over bitmasks."""
    n = a.n_points
    if n > limit:
        raise ValueError(f"{n} points exceed the exhaustive-search cap {limit}")
    moves = [[a.act[(y, int(g))] for g in a.gpd.arrows_from(a.anchor[y])]
             for y in range(n)]
    found = []
    for mask in range(1, 1 << n):
        closed = True
        for y in range(n):
            if mask >> y & 1 and any(not mask >> z & 1 for z in moves[y]):
                closed = False
                break
        if closed:
            found.append([y for y in range(n) if mask >> y & 1])
    return found


@dataclass
class Subflow:
    points: list[int]
    action: GroupoidAction


def minimal_subflows(a: GroupoidAction, crosscheck_limit: int = 12
                     ) -> list[Subflow]:
    """The minimal nonempty invariant subsets with their restricted actions.

    These are exactly the orbits: moves are invertible, so any invariant
    set containing a point contains its whole orbit.  On spaces of at most
    ``crosscheck_limit`` points the identification is re-proved against the
    exhaustive invariant-subset search instead of trusted.
    """
    orbs = orbits(a)
    if a.n_points <= crosscheck_limit:
        closed = invariant_subsets(a)
        minimal = [s for s in closed
                   if not any(set(t) < set(s) for t in closed)]
        if sorted(map(tuple, minimal)) != sorted(map(tuple, orbs)):
            raise AssertionError(
                "orbit partition disagrees with exhaustive minimal subsets")
    return [Subflow(points=o, action=restrict_action(a, o)) for o in orbs]


# --- the universal pointed flow ------------------------------------------------

@dataclass
class Ambit:
    """The arrows out of ``basepoint`` under right composition, with the
    unit as distinguished point.  ``points[i]`` is the arrow behind point
    ``i``; the action's anchor is the target map."""

    action: GroupoidAction
    basepoint: int
    points: list[int]
    u0: int

    def fiber_points(self) -> list[int]:
        return self.action.fiber(self.basepoint)


def build_ambit(gpd: Groupoid, x0: int = 0) -> Ambit:
    """Assemble the ambit at ``x0`` and check its defining properties:
    the unit acts as a retrieval map (``u0 . w == w`` for every point),
    the action is free, and the anchor is onto (needs transitivity)."""
    if not (0 <= x0 < gpd.n_objects):
        raise ValueError(f"object {x0} out of range")
    ok, witness = is_transitive(gpd)
    if not ok:
        raise ValueError(
            f"groupoid is not transitive (no arrow {witness[0]} -> {witness[1]}); "
            "the ambit anchor would not be surjective")
    points = sorted(int(w) for w in gpd.arrows_from(x0))
    index = {w: i for i, w in enumerate(points)}
    anchor = [int(gpd.tgt[w]) for w in points]
    act = {}
    for i, w in enumerate(points):
        for g in gpd.arrows_from(anchor[i]):
            act[(i, int(g))] = index[gpd.compose(w, int(g))]
    ambit = Ambit(action=GroupoidAction(gpd=gpd, n_points=len(points),
                                        anchor=anchor, act=act),
                  basepoint=x0, points=points,
                  u0=index[int(gpd.unit[x0])])
    for i, w in enumerate(points):
        if ambit.action.act[(ambit.u0, w)] != i:
            raise AssertionError("the unit does not retrieve every point")
    for (i, g), z in ambit.action.act.items():
        if z == i and g != int(gpd.unit[anchor[i]]):
            raise AssertionError(f"action is not free at point {i}, arrow {g}")
    return ambit


# --- equivariant maps ----------------------------------------------------------

@dataclass
class EquivariantMap:
    source: GroupoidAction
    target: GroupoidAction
    values: list[int]

    def __call__(self, y: int) -> int:
        return self.values[y]


def verify_equivariant_map(m: EquivariantMap) -> Diagnostics:
    """Anchor preservation plus ``f(y . g) == f(y) . g`` on every pair."""
    if m.source.gpd is not m.target.gpd:
        return Diagnostics.failed("different groupoids", (), structural=True)
    if len(m.values) != m.source.n_points:
        return Diagnostics.failed("value count mismatch",
                                  (len(m.values), m.source.n_points),
                                  structural=True)
    for y, z in enumerate(m.values):
        if not (0 <= z < m.target.n_points):
            return Diagnostics.failed("value out of range", (y, z),
                                      structural=True)
        if m.target.anchor[z] != m.source.anchor[y]:
            return Diagnostics.failed("anchor not preserved", (y,))
    pairs = 0
    for (y, g), z in m.source.act.items():
        if m.target.act[(m.values[y], g)] != m.values[z]:
            return Diagnostics.failed("equivariance", (y, g))
        pairs += 1
    return Diagnostics.passed(pairs=pairs)


def universal_map(a: GroupoidAction, ambit: Ambit, y: int) -> EquivariantMap:
    """The unique equivariant map from the ambit sending the unit to ``y``:
    point ``w`` goes to ``y . w``.  Verified before being returned."""
    if a.gpd is not ambit.action.gpd:
        raise ValueError("action and ambit use different groupoids")
    if not (0 <= y < a.n_points):
        raise ValueError(f"point {y} out of range")
    if a.anchor[y] != ambit.basepoint:
        raise ValueError(
            f"point {y} is anchored at {a.anchor[y]}, not at the "
            f"basepoint {ambit.basepoint}")
    values = [a.act[(y, w)] for w in ambit.points]
    m = EquivariantMap(source=ambit.action, target=a, values=values)
    diag = verify_equivariant_map(m)
    if not diag.ok:  # pragma: no cover - the action laws force this
        raise AssertionError(f"universal map is not equivariant: {diag.failure}")
    if values[ambit.u0] != y:  # pragma: no cover - unit law forces this
        raise AssertionError("universal map misses its defining value")
    return m


def enumerate_equivariant_maps(ambit: Ambit,
                               a: GroupoidAction) -> list[EquivariantMap]:
    """All equivariant maps out of the ambit, ordered by the image of the
    unit.

    A candidate exists per point of the target fiber over the basepoint:
    anchors force ``f(u0)`` into that fiber, and since the unit retrieves
    every point (``w == u0 . w``, checked at construction), equivariance
    forces ``f(w) == f(u0) . w``.  Each candidate is then verified against
    every action pair rather than accepted on that argument, and the list
    is checked to be exactly the universal maps of the fiber.
    """
    found = []
    for y in a.fiber(ambit.basepoint):
        values = [a.act[(y, w)] for w in ambit.points]
        m = EquivariantMap(source=ambit.action, target=a, values=values)
        if verify_equivariant_map(m).ok:
            found.append(m)
    for m in found:
        expected = universal_map(a, ambit, m.values[ambit.u0])
        if m.values != expected.values:  # pragma: no cover
            raise AssertionError("an enumerated map is not a universal map")
    return found


def compose_equivariant_maps(outer: EquivariantMap,
                             inner: EquivariantMap) -> EquivariantMap:
    """The map ``y -> outer(inner(y))``; targets must chain."""
    if inner.target is not outer.source:
        raise ValueError("maps do not chain")
    return EquivariantMap(source=inner.source, target=outer.target,
                          values=[outer.values[z] for z in inner.values])


# --- the fiber semigroup --------------------------------------------------------

def semigroup_idempotents(table: list[list[int]]) -> list[int]:
    """Elements with ``y * y == y`` in an arbitrary multiplication table."""
    return [y for y in range(len(table)) if table[y][y] == y]


def minimal_left_ideals(table: list[list[int]]) -> list[list[int]]:
    """Inclusion-minimal principal left ideals ``S^1 * y`` of a finite
    semigroup table; every minimal left ideal is of this shape.  Sorted by
    (size, elements) with duplicates removed."""
    n = len(table)
    ideals = {tuple(sorted({y} | {table[s][y] for s in range(n)}))
              for y in range(n)}
    minimal = [set(i) for i in ideals
               if not any(set(j) < set(i) for j in ideals)]
    return sorted((sorted(i) for i in minimal), key=lambda i: (len(i), i))


@dataclass
class FiberSemigroup:
    """The basepoint fiber of an ambit under ``y * z = l_y(z)``, which for
    a groupoid ambit is a group isomorphic to the vertex group."""

    fiber: list[int]
    u0_position: int
    table: list[list[int]]
    group: FiniteGroup
    idempotents: list[int]
    left_ideals: list[list[int]]
    vertex_iso: list[int]


def fiber_semigroup(ambit: Ambit) -> FiberSemigroup:
    """Multiply fiber points by applying one universal map after another.

    The product table is computed as ``y * z = l_y(z)``, the semigroup law
    ``l_y . l_z == l_{y*z}`` is asserted as equality of whole maps, and the
    table must verify as a group (the unit is placed first, so it sits at
    index 0).  The isomorphism onto the vertex group is found by exhaustive
    backtracking search rather than read off the construction.
    """
    a = ambit.action
    fiber = [ambit.u0] + [y for y in ambit.fiber_points() if y != ambit.u0]
    pos = {y: i for i, y in enumerate(fiber)}
    lmaps = {y: universal_map(a, ambit, y) for y in fiber}
    table = [[pos[lmaps[y].values[z]] for z in fiber] for y in fiber]
    for y in fiber:
        for z in fiber:
            composed = compose_equivariant_maps(lmaps[y], lmaps[z])
            if composed.values != lmaps[lmaps[y].values[z]].values:
                raise AssertionError(
                    f"universal maps do not compose at fiber pair ({y}, {z})")
    diag, group = verify_group(table, identity=0)
    if group is None:
        raise AssertionError(f"fiber table is not a group: {diag.failure}")
    vgroup = vertex_group(ambit.action.gpd, ambit.basepoint).group
    iso = find_group_isomorphism(group, vgroup)
    if iso is None:
        raise AssertionError("fiber semigroup is not the vertex group")
    idem = [fiber[i] for i in semigroup_idempotents(table)]
    ideals = [[fiber[i] for i in ideal] for ideal in minimal_left_ideals(table)]
    return FiberSemigroup(fiber=fiber, u0_position=0, table=table,
                          group=group, idempotents=idem, left_ideals=ideals,
                          vertex_iso=iso)


# --- uniqueness of the minimal flow ----------------------------------------------

@dataclass
class MinimalFlowReport:
    subflows: list[Subflow]
    self_map_counts: list[int]
    all_self_maps_bijective: bool
    pairwise_isomorphic: bool
    witness: Optional[tuple] = None
    notes: dict = field(default_factory=dict)


def minimal_flow_uniqueness(ambit: Ambit) -> MinimalFlowReport:
    """For the ambit the minimal subflow is the whole space, so the report
    enumerates its equivariant self-maps, checks each is bijective, and
    records that all pairs of minimal subflows (here: the one pair) are
    isomorphic."""
    subflows = minimal_subflows(ambit.action)
    if len(subflows) != 1 or subflows[0].points != list(
            range(ambit.action.n_points)):
        raise AssertionError("ambit must have exactly one minimal subflow")
    self_maps = enumerate_equivariant_maps(ambit, ambit.action)
    bad = None
    for i, m in enumerate(self_maps):
        if sorted(m.values) != list(range(ambit.action.n_points)):
            bad = (i, tuple(m.values))
            break
    return MinimalFlowReport(
        subflows=subflows,
        self_map_counts=[len(self_maps)],
        all_self_maps_bijective=bad is None,
        pairwise_isomorphic=bad is None,
        witness=bad,
        notes={"finite specialization":
               "the universal pointed flow is the arrow fiber itself"},
    )

"""Principal bundles over finite connected graphs, given as dart cocycles.

The base is an undirected multigraph: edge ``i`` contributes dart ``2i``
running ``u -> v`` and dart ``2i + 1`` running ``v -> u``, with ``rev(d) =
d ^ 1``.  A bundle labels every dart with a group element subject to
``label(rev(d)) == label(d)^-1``; the total space is the set of pairs
``(vertex, group element)`` and dart ``d`` transports ``(dsrc(d), h)`` to
``(dtgt(d), label(d) * h)``.

A gauge is a vertex-indexed family of group elements acting by
``label'(d) = h[dtgt(d)] * label(d) * h[dsrc(d)]^-1``; normalization picks
the gauge that trivializes a breadth-first spanning tree rooted at a chosen
vertex, after which the surviving non-tree labels generate the holonomy.
All traversals are deterministic: BFS expands the lowest-index neighbour
first and ties break on the lowest dart index.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product
from typing import Optional, Sequence

from .algebra import FiniteGroup, are_conjugate_subgroup_maps, generated_subgroup
from .diagnostics import Diagnostics

__all__ = [
    "BaseGraph",
    "SpanningTree",
    "CocycleBundle",
    "TotalSpace",
    "GaugeTransformation",
    "BundleIso",
    "CycleHolonomy",
    "HolonomyData",
    "TrivialityReport",
    "verify_cocycle",
    "total_space",
    "apply_gauge",
    "gauge_normalize",
    "holonomy_group",
    "holonomy_along",
    "is_trivial",
    "bundles_isomorphic",
    "bundles_isomorphic_bruteforce",
]


@dataclass(frozen=True)
class BaseGraph:
    """Undirected multigraph on vertices ``0..n-1``; loops and parallel
    edges are allowed."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        object.__setattr__(self, "edges",
                           tuple((int(u), int(v)) for u, v in self.edges))
        for i, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge {i} endpoint out of range: ({u}, {v})")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_darts(self) -> int:
        return 2 * len(self.edges)

    def dsrc(self, d: int) -> int:
        u, v = self.edges[d // 2]
        return u if d % 2 == 0 else v

    def dtgt(self, d: int) -> int:
        u, v = self.edges[d // 2]
        return v if d % 2 == 0 else u

    @staticmethod
    def rev(d: int) -> int:
        return d ^ 1

    def out_darts(self, v: int) -> list[int]:
        return [d for d in range(self.n_darts) if self.dsrc(d) == v]

    def is_connected(self) -> bool:
        seen = [False] * self.n_vertices
        seen[0] = True
        stack = [0]
        while stack:
            v = stack.pop()
            for d in self.out_darts(v):
                w = self.dtgt(d)
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return all(seen)

    # --- stock shapes ----------------------------------------------------

    @staticmethod
    def point() -> "BaseGraph":
        return BaseGraph(1, ())

    @staticmethod
    def path(n: int) -> "BaseGraph":
        return BaseGraph(n, tuple((i, i + 1) for i in range(n - 1)))

    @staticmethod
    def cycle(n: int) -> "BaseGraph":
        return BaseGraph(n, tuple((i, (i + 1) % n) for i in range(n)))

    @staticmethod
    def wedge_of_loops(k: int) -> "BaseGraph":
        return BaseGraph(1, tuple((0, 0) for _ in range(k)))

    @staticmethod
    def complete(n: int) -> "BaseGraph":
        return BaseGraph(n, tuple((a, b) for a in range(n)
                                  for b in range(a + 1, n)))


@dataclass
class SpanningTree:
    """BFS spanning tree: ``parent_dart[v]`` is the dart that first reached
    ``v`` (-1 at the root), ``order`` the visit order."""

    root: int
    parent_dart: list[int]
    order: list[int]
    tree_darts: frozenset[int]
    non_tree_edges: list[int]
    dart_src: list[int]

    def path_from_root(self, v: int) -> list[int]:
        """Darts along the unique tree path root -> v."""
        path = []
        while self.parent_dart[v] >= 0:
            d = self.parent_dart[v]
            path.append(d)
            v = self.dart_src[d]
        path.reverse()
        return path


def bfs_tree(graph: BaseGraph, root: int = 0) -> SpanningTree:
    """Deterministic BFS spanning tree: lowest-index neighbour first, ties on
    the lowest dart index."""
    if not (0 <= root < graph.n_vertices):
        raise ValueError(f"root {root} out of range")
    parent = [-1] * graph.n_vertices
    seen = [False] * graph.n_vertices
    seen[root] = True
    order = [root]
    tree: set[int] = set()
    queue = [root]
    while queue:
        v = queue.pop(0)
        for w, d in sorted((graph.dtgt(d), d) for d in graph.out_darts(v)):
            if not seen[w]:
                seen[w] = True
                parent[w] = d
                tree.add(d)
                order.append(w)
                queue.append(w)
    if not all(seen):
        missing = seen.index(False)
        raise ValueError(f"graph is not connected: vertex {missing} unreachable")
    non_tree = [e for e in range(graph.n_edges)
                if 2 * e not in tree and 2 * e + 1 not in tree]
    return SpanningTree(root=root, parent_dart=parent, order=order,
                        tree_darts=frozenset(tree), non_tree_edges=non_tree,
                        dart_src=[graph.dsrc(d) for d in range(graph.n_darts)])


@dataclass
class CocycleBundle:
    """Dart-labelled graph; ``labels[d]`` lives in ``group``."""

    base: BaseGraph
    group: FiniteGroup
    labels: list[int]

    @staticmethod
    def from_edge_labels(base: BaseGraph, group: FiniteGroup,
                         edge_labels: Sequence[int]) -> "CocycleBundle":
        if len(edge_labels) != base.n_edges:
            raise ValueError(
                f"need {base.n_edges} edge labels, got {len(edge_labels)}")
        labels: list[int] = []
        for g in edge_labels:
            if not (0 <= g < group.order):
                raise ValueError(f"label {g} out of range for order {group.order}")
            labels.extend((g, group.inv[g]))
        return CocycleBundle(base=base, group=group, labels=labels)

    def edge_labels(self) -> list[int]:
        return [self.labels[2 * e] for e in range(self.base.n_edges)]

    def label(self, d: int) -> int:
        return self.labels[d]


def verify_cocycle(b: CocycleBundle) -> Diagnostics:
    """Structure first (label count and range, connectivity), then the
    involution law ``label(rev(d)) == label(d)^-1``."""
    base = b.base
    if len(b.labels) != base.n_darts:
        return Diagnostics.failed(
            "label count mismatch", (len(b.labels), base.n_darts), structural=True)
    for d, g in enumerate(b.labels):
        if not (0 <= g < b.group.order):
            return Diagnostics.failed("label out of range", (d, g), structural=True)
    if not base.is_connected():
        return Diagnostics.failed("base not connected", (), structural=True)
    for d in range(base.n_darts):
        if b.labels[base.rev(d)] != b.group.inv[b.labels[d]]:
            return Diagnostics.failed("label involution", (d,))
    return Diagnostics.passed(vertices=base.n_vertices, edges=base.n_edges)


# --- total space ------------------------------------------------------------

@dataclass
class TotalSpace:
    """Points ``(v, h)`` indexed ``v * |G| + h`` with projection, fiberwise
    right translation, and dart transport by left multiplication."""

    bundle: CocycleBundle

    @property
    def n_points(self) -> int:
        return self.bundle.base.n_vertices * self.bundle.group.order

    def point_index(self, v: int, h: int) -> int:
        return v * self.bundle.group.order + h

    def point(self, p: int) -> tuple[int, int]:
        return divmod(p, self.bundle.group.order)

    def proj(self, p: int) -> int:
        return p // self.bundle.group.order

    def raction(self, p: int, k: int) -> int:
        v, h = self.point(p)
        return self.point_index(v, self.bundle.group.mul(h, k))

    def transport(self, d: int, p: int) -> int:
        v, h = self.point(p)
        if v != self.bundle.base.dsrc(d):
            raise ValueError(
                f"point over vertex {v} cannot ride dart {d} from "
                f"{self.bundle.base.dsrc(d)}")
        return self.point_index(self.bundle.base.dtgt(d),
                                self.bundle.group.mul(self.bundle.labels[d], h))

    def fiber(self, v: int) -> list[int]:
        return [self.point_index(v, h) for h in self.bundle.group.elements]


def total_space(b: CocycleBundle) -> TotalSpace:
    return TotalSpace(bundle=b)


# --- gauge action -------------------------------------------------------------

@dataclass
class GaugeTransformation:
    """One group element per vertex."""

    elements: list[int]


def apply_gauge(b: CocycleBundle, gauge: GaugeTransformation) -> CocycleBundle:
    base, grp = b.base, b.group
    if len(gauge.elements) != base.n_vertices:
        raise ValueError("gauge must assign one element per vertex")
    labels = [
        grp.mul(gauge.elements[base.dtgt(d)],
                grp.mul(b.labels[d], grp.inv[gauge.elements[base.dsrc(d)]]))
        for d in range(base.n_darts)
    ]
    return CocycleBundle(base=base, group=grp, labels=labels)


def compose_gauges(first: GaugeTransformation, second: GaugeTransformation,
                   grp: FiniteGroup) -> GaugeTransformation:
    """The gauge equal to applying ``first`` then ``second``."""
    return GaugeTransformation(
        [grp.mul(s, f) for f, s in zip(first.elements, second.elements)])


def gauge_normalize(b: CocycleBundle, root: int = 0
                    ) -> tuple[CocycleBundle, GaugeTransformation, SpanningTree]:
    """Trivialize a BFS spanning tree rooted at ``root``.

    The returned gauge is the identity at the root and satisfies
    ``h[tgt] = h[src] * label(d)^-1`` along every tree dart, so every tree
    dart of the result carries the identity.  Renormalizing a normalized
    bundle yields the identity gauge.
    """
    diag = verify_cocycle(b)
    if not diag.ok:
        raise ValueError(f"not a cocycle bundle: {diag.failure}")
    grp = b.group
    tree = bfs_tree(b.base, root)
    h = [grp.identity] * b.base.n_vertices
    for v in tree.order:
        d = tree.parent_dart[v]
        if d >= 0:
            h[v] = grp.mul(h[b.base.dsrc(d)], grp.inv[b.labels[d]])
    gauge = GaugeTransformation(h)
    return apply_gauge(b, gauge), gauge, tree


def holonomy_along(b: CocycleBundle, darts: Sequence[int]) -> int:
    """Compose labels along a dart walk; later darts multiply on the left,
    matching transport order."""
    acc = b.group.identity
    at = None
    for d in darts:
        if at is not None and b.base.dsrc(d) != at:
            raise ValueError(f"dart {d} does not continue the walk at {at}")
        acc = b.group.mul(b.labels[d], acc)
        at = b.base.dtgt(d)
    return acc


@dataclass
class CycleHolonomy:
    edge: int
    dart: int
    element: int
    darts: list[int]


@dataclass
class HolonomyData:
    basepoint: int
    subgroup: list[int]
    cycles: list[CycleHolonomy]
    tree: SpanningTree
    normalized: CocycleBundle
    gauge: GaugeTransformation


def holonomy_group(b: CocycleBundle, v0: int = 0) -> HolonomyData:
    """Holonomy at ``v0``: normalize there, read one element per non-tree
    edge (canonically oriented along its even dart), and close under the
    group operations.  Each element is also the label product around the
    fundamental cycle of its edge, based at ``v0``."""
    normalized, gauge, tree = gauge_normalize(b, v0)
    cycles = []
    for e in tree.non_tree_edges:
        d = 2 * e
        up = tree.path_from_root(b.base.dsrc(d))
        down = [b.base.rev(x) for x in reversed(tree.path_from_root(b.base.dtgt(d)))]
        cycles.append(CycleHolonomy(
            edge=e, dart=d, element=normalized.labels[d],
            darts=up + [d] + down))
    subgroup = generated_subgroup(b.group, [c.element for c in cycles])
    return HolonomyData(basepoint=v0, subgroup=subgroup, cycles=cycles,
                        tree=tree, normalized=normalized, gauge=gauge)


# --- triviality ----------------------------------------------------------------

@dataclass
class TrivialityReport:
    trivial: bool
    by_labels: bool
    by_section: bool
    section: Optional[list[int]]
    holonomy: list[int]


def is_trivial(b: CocycleBundle, v0: int = 0) -> TrivialityReport:
    """Two independent criteria, both computed and required to agree: all
    normalized non-tree labels are the identity, and a transport-invariant
    global section exists (searched by seeding each group element at the
    root of the tree and propagating)."""
    grp = b.group
    hol = holonomy_group(b, v0)
    by_labels = all(c.element == grp.identity for c in hol.cycles)

    tree = hol.tree
    section: Optional[list[int]] = None
    for seed in grp.elements:
        s = [-1] * b.base.n_vertices
        s[v0] = seed
        for v in tree.order:
            d = tree.parent_dart[v]
            if d >= 0:
                s[v] = grp.mul(b.labels[d], s[b.base.dsrc(d)])
        if all(grp.mul(b.labels[d], s[b.base.dsrc(d)]) == s[b.base.dtgt(d)]
               for d in range(b.base.n_darts)):
            section = s
            break
    by_section = section is not None
    if by_labels != by_section:  # pragma: no cover - the criteria provably agree
        raise AssertionError("triviality criteria disagree")
    return TrivialityReport(trivial=by_labels, by_labels=by_labels,
                            by_section=by_section, section=section,
                            holonomy=hol.subgroup)


# --- isomorphism ----------------------------------------------------------------

@dataclass
class BundleIso:
    gauge: GaugeTransformation
    conjugator: int


def _require_comparable(b1: CocycleBundle, b2: CocycleBundle) -> None:
    if b1.base != b2.base:
        raise ValueError("bundles live over different base graphs")
    if (b1.group.order, b1.group.identity, b1.group.mult) != \
            (b2.group.order, b2.group.identity, b2.group.mult):
        raise ValueError("bundles carry different structural groups")


def bundles_isomorphic(b1: CocycleBundle, b2: CocycleBundle,
                       root: int = 0) -> Optional[BundleIso]:
    """Gauge equivalence test via aligned holonomy data.

    Both bundles are normalized at ``root``; since a gauge fixing a spanning
    tree pointwise must be constant, the bundles are equivalent exactly when
    the per-edge holonomy lists are simultaneously conjugate.  On success the
    full witness gauge is assembled and checked label by label.
    """
    _require_comparable(b1, b2)
    grp = b1.group
    n1, g1, tree = gauge_normalize(b1, root)
    n2, g2, _ = gauge_normalize(b2, root)
    f1 = [n1.labels[2 * e] for e in tree.non_tree_edges]
    f2 = [n2.labels[2 * e] for e in tree.non_tree_edges]
    h = are_conjugate_subgroup_maps(grp, f1, f2)
    if h is None:
        return None
    h_inv = grp.inv[h]
    gauge = GaugeTransformation([
        grp.mul(grp.inv[g2.elements[v]], grp.mul(h_inv, g1.elements[v]))
        for v in range(b1.base.n_vertices)
    ])
    if apply_gauge(b1, gauge).labels != b2.labels:  # pragma: no cover
        raise AssertionError("assembled gauge fails to carry b1 to b2")
    return BundleIso(gauge=gauge, conjugator=h)


def bundles_isomorphic_bruteforce(b1: CocycleBundle, b2: CocycleBundle,
                                  limit: int = 10 ** 6
                                  ) -> Optional[GaugeTransformation]:
    """Oracle: scan all ``|G|^|V|`` gauges in lexicographic order."""
    _require_comparable(b1, b2)
    grp, n = b1.group, b1.base.n_vertices
    if grp.order ** n > limit:
        raise ValueError(f"search space {grp.order}^{n} exceeds limit {limit}")
    for assignment in iter_product(range(grp.order), repeat=n):
        gauge = GaugeTransformation(list(assignment))
        if apply_gauge(b1, gauge).labels == b2.labels:
            return gauge
    return None

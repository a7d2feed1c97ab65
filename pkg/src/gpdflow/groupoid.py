"""Finite groupoids with explicit partial composition tables.

Objects and arrows are indices.  Composition follows the left-to-right
convention: ``comp(g, h)`` is defined exactly when ``tgt(g) == src(h)``, and
then ``src(gh) == src(g)`` and ``tgt(gh) == tgt(h)``.  Units absorb on both
sides (``comp(unit(src(g)), g) == g == comp(g, unit(tgt(g)))``) and inverses
satisfy ``comp(g, inv(g)) == unit(src(g))`` and ``comp(inv(g), g) ==
unit(tgt(g))``.

The composition table is stored explicitly as a sorted array of defined
pairs, never recomputed on demand, so that verification can detect entries
on the wrong domain.  A groupoid is *normalized* when ``unit(x) == x`` for
every object; constructors in this package produce normalized groupoids and
``normalize_groupoid`` reindexes arbitrary input.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .algebra import FiniteGroup, verify_group
from .diagnostics import Diagnostics

__all__ = [
    "Groupoid",
    "HomSet",
    "VertexGroupIso",
    "LocalTriviality",
    "verify_groupoid",
    "is_transitive",
    "hom_set",
    "vertex_group",
    "vertex_groups_isomorphic",
    "check_local_triviality",
    "verify_groupoid_iso",
    "normalize_groupoid",
    "one_object_groupoid",
    "pair_groupoid",
    "disjoint_union",
]

# full associativity scan is used up to this many composable triples; above
# it the complete generator-based test takes over
FULL_ASSOC_LIMIT = 3_000_000

CompTable = Union[Mapping[tuple[int, int], int], Iterable[Sequence[int]]]


@dataclass(eq=False)
class Groupoid:
    """A finite groupoid given by index arrays and a partial product table.

    ``comp_key`` holds the defined pairs encoded as ``g * n_arrows + h`` in
    ascending order, ``comp_val`` the corresponding products.  Use
    :func:`Groupoid.from_tables` to build from python dicts or triple lists.
    """

    n_objects: int
    src: np.ndarray
    tgt: np.ndarray
    unit: np.ndarray
    inv: np.ndarray
    comp_key: np.ndarray
    comp_val: np.ndarray

    def __post_init__(self) -> None:
        self.src = np.asarray(self.src, dtype=np.int64)
        self.tgt = np.asarray(self.tgt, dtype=np.int64)
        self.unit = np.asarray(self.unit, dtype=np.int64)
        self.inv = np.asarray(self.inv, dtype=np.int64)
        self.comp_key = np.asarray(self.comp_key, dtype=np.int64)
        self.comp_val = np.asarray(self.comp_val, dtype=np.int64)
        order = np.argsort(self.comp_key, kind="stable")
        self.comp_key = self.comp_key[order]
        self.comp_val = self.comp_val[order]

    @staticmethod
    def from_tables(n_objects: int, src: Sequence[int], tgt: Sequence[int],
                    unit: Sequence[int], inv: Sequence[int],
                    comp: CompTable) -> "Groupoid":
        k = len(src)
        if isinstance(comp, Mapping):
            triples = [(g, h, gh) for (g, h), gh in comp.items()]
        else:
            triples = [tuple(t) for t in comp]
        keys = np.array([g * k + h for g, h, _ in triples], dtype=np.int64)
        vals = np.array([gh for _, _, gh in triples], dtype=np.int64)
        return Groupoid(n_objects, np.array(src), np.array(tgt),
                        np.array(unit), np.array(inv), keys, vals)

    @property
    def n_arrows(self) -> int:
        return int(self.src.shape[0])

    @property
    def n_comp_pairs(self) -> int:
        return int(self.comp_key.shape[0])

    # --- composition lookups ---------------------------------------------

    def try_compose_many(self, gs: np.ndarray, hs: np.ndarray
                         ) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized lookup; returns ``(products, defined_mask)``."""
        gs = np.asarray(gs, dtype=np.int64)
        hs = np.asarray(hs, dtype=np.int64)
        keys = gs * self.n_arrows + hs
        if self.comp_key.shape[0] == 0:
            return np.full(keys.shape, -1, dtype=np.int64), np.zeros(keys.shape, dtype=bool)
        pos = np.searchsorted(self.comp_key, keys)
        clipped = np.minimum(pos, self.comp_key.shape[0] - 1)
        ok = (pos < self.comp_key.shape[0]) & (self.comp_key[clipped] == keys)
        out = np.where(ok, self.comp_val[clipped], -1)
        return out, ok

    def compose_many(self, gs: np.ndarray, hs: np.ndarray) -> np.ndarray:
        out, ok = self.try_compose_many(gs, hs)
        if not bool(ok.all()):
            bad = int(np.argmax(~ok))
            g = int(np.asarray(gs).ravel()[bad] if np.ndim(gs) else gs)
            h = int(np.asarray(hs).ravel()[bad] if np.ndim(hs) else hs)
            raise ValueError(f"arrows not composable: {g} then {h}")
        return out

    def compose(self, g: int, h: int) -> int:
        out, ok = self.try_compose_many(np.array([g]), np.array([h]))
        if not ok[0]:
            raise ValueError(f"arrows not composable: {g} then {h}")
        return int(out[0])

    def defined(self, g: int, h: int) -> bool:
        _, ok = self.try_compose_many(np.array([g]), np.array([h]))
        return bool(ok[0])

    def inverse(self, g: int) -> int:
        return int(self.inv[g])

    def comp_triples(self) -> list[tuple[int, int, int]]:
        """All defined compositions as ``(g, h, gh)``, lexicographically."""
        k = self.n_arrows
        gs, hs = np.divmod(self.comp_key, k) if k else (self.comp_key, self.comp_key)
        return list(zip(gs.tolist(), hs.tolist(), self.comp_val.tolist()))

    # --- index helpers -----------------------------------------------------

    @cached_property
    def _arrows_by_src(self) -> list[np.ndarray]:
        return [np.where(self.src == x)[0] for x in range(self.n_objects)]

    @cached_property
    def _arrows_by_tgt(self) -> list[np.ndarray]:
        return [np.where(self.tgt == x)[0] for x in range(self.n_objects)]

    def arrows_from(self, x: int) -> np.ndarray:
        return self._arrows_by_src[x]

    def arrows_into(self, x: int) -> np.ndarray:
        return self._arrows_by_tgt[x]

    def hom(self, x: int, y: int) -> list[int]:
        """Arrows from ``x`` to ``y`` in ascending index order."""
        return np.where((self.src == x) & (self.tgt == y))[0].tolist()

    def loops(self, x: int) -> list[int]:
        return self.hom(x, x)

    def is_normalized(self) -> bool:
        m = self.n_objects
        return bool(np.array_equal(self.unit, np.arange(m)))


# --- verification ---------------------------------------------------------

def _structural_scan(g: Groupoid) -> Optional[Diagnostics]:
    m, k = g.n_objects, g.n_arrows
    if m < 0 or k < 0:
        return Diagnostics.failed("negative size", (m, k), structural=True)
    if g.tgt.shape[0] != k or g.inv.shape[0] != k:
        return Diagnostics.failed(
            "array length mismatch", (k, int(g.tgt.shape[0]), int(g.inv.shape[0])),
            structural=True)
    if g.unit.shape[0] != m:
        return Diagnostics.failed(
            "array length mismatch", (m, int(g.unit.shape[0])), structural=True)
    for name, arr, bound in (("src", g.src, m), ("tgt", g.tgt, m),
                             ("unit", g.unit, k), ("inv", g.inv, k)):
        if arr.size and (int(arr.min()) < 0 or int(arr.max()) >= bound):
            bad = int(np.argmax((arr < 0) | (arr >= bound)))
            return Diagnostics.failed(
                f"{name} index out of range", (bad, int(arr[bad])), structural=True)
    if g.comp_key.size:
        if int(g.comp_key.min()) < 0 or int(g.comp_key.max()) >= k * k:
            bad = int(np.argmax((g.comp_key < 0) | (g.comp_key >= k * k)))
            return Diagnostics.failed(
                "comp pair out of range", (int(g.comp_key[bad]),), structural=True)
        if int(g.comp_val.min()) < 0 or int(g.comp_val.max()) >= k:
            bad = int(np.argmax((g.comp_val < 0) | (g.comp_val >= k)))
            gg, hh = divmod(int(g.comp_key[bad]), k)
            return Diagnostics.failed(
                "comp value out of range", (gg, hh, int(g.comp_val[bad])),
                structural=True)
        dup = np.where(np.diff(g.comp_key) == 0)[0]
        if dup.size:
            gg, hh = divmod(int(g.comp_key[dup[0]]), k)
            return Diagnostics.failed("duplicate comp pair", (gg, hh), structural=True)
    return None


def _domain_scan(g: Groupoid) -> Optional[Diagnostics]:
    k = g.n_arrows
    gs, hs = np.divmod(g.comp_key, k) if g.comp_key.size else \
        (np.empty(0, np.int64), np.empty(0, np.int64))
    off = g.tgt[gs] != g.src[hs]
    if bool(off.any()):
        bad = int(np.argmax(off))
        return Diagnostics.failed(
            "composability domain violated", (int(gs[bad]), int(hs[bad])),
            structural=True)
    counts_in = np.bincount(g.tgt, minlength=g.n_objects) if k else np.zeros(g.n_objects, np.int64)
    counts_out = np.bincount(g.src, minlength=g.n_objects) if k else np.zeros(g.n_objects, np.int64)
    expected = int(np.dot(counts_in, counts_out))
    if g.comp_key.shape[0] != expected:
        # find the first composable pair without an entry
        for x in range(g.n_objects):
            into, out = g.arrows_into(x), g.arrows_from(x)
            if not into.size or not out.size:
                continue
            grid_g = np.repeat(into, out.shape[0])
            grid_h = np.tile(out, into.shape[0])
            _, ok = g.try_compose_many(grid_g, grid_h)
            if not bool(ok.all()):
                bad = int(np.argmax(~ok))
                return Diagnostics.failed(
                    "composability domain violated",
                    (int(grid_g[bad]), int(grid_h[bad])), structural=True,
                    detail="missing entry on a composable pair")
    return None


def _endpoint_scan(g: Groupoid) -> Optional[Diagnostics]:
    k = g.n_arrows
    if not g.comp_key.size:
        return None
    gs, hs = np.divmod(g.comp_key, k)
    bad_src = g.src[g.comp_val] != g.src[gs]
    bad_tgt = g.tgt[g.comp_val] != g.tgt[hs]
    bad = bad_src | bad_tgt
    if bool(bad.any()):
        i = int(np.argmax(bad))
        return Diagnostics.failed(
            "composition endpoints", (int(gs[i]), int(hs[i]), int(g.comp_val[i])))
    return None


def _unit_scan(g: Groupoid) -> Optional[Diagnostics]:
    m = g.n_objects
    xs = np.arange(m)
    u = g.unit
    misplaced = (g.src[u] != xs) | (g.tgt[u] != xs)
    if bool(misplaced.any()):
        x = int(np.argmax(misplaced))
        return Diagnostics.failed("unit law", (int(u[x]),),
                                  detail=f"unit of object {x} has wrong endpoints")
    if np.unique(u).shape[0] != m:
        return Diagnostics.failed("unit law", tuple(np.sort(u).tolist()),
                                  detail="unit arrows not distinct")
    arrows = np.arange(g.n_arrows)
    left, ok = g.try_compose_many(u[g.src], arrows)
    if not bool(ok.all()) or bool((left != arrows).any()):
        bad = int(np.argmax(~ok)) if not bool(ok.all()) else int(np.argmax(left != arrows))
        return Diagnostics.failed("unit law", (bad,), detail="left unit absorption")
    right, ok = g.try_compose_many(arrows, u[g.tgt])
    if not bool(ok.all()) or bool((right != arrows).any()):
        bad = int(np.argmax(~ok)) if not bool(ok.all()) else int(np.argmax(right != arrows))
        return Diagnostics.failed("unit law", (bad,), detail="right unit absorption")
    return None


def _inverse_scan(g: Groupoid) -> Optional[Diagnostics]:
    arrows = np.arange(g.n_arrows)
    flipped = (g.src[g.inv] != g.tgt) | (g.tgt[g.inv] != g.src)
    if bool(flipped.any()):
        return Diagnostics.failed("inverse law", (int(np.argmax(flipped)),),
                                  detail="inverse endpoints")
    if bool((g.inv[g.inv] != arrows).any()):
        return Diagnostics.failed(
            "inverse law", (int(np.argmax(g.inv[g.inv] != arrows)),),
            detail="inverse not involutive")
    left, ok = g.try_compose_many(arrows, g.inv)
    if not bool(ok.all()) or bool((left != g.unit[g.src]).any()):
        bad = int(np.argmax(~ok)) if not bool(ok.all()) else \
            int(np.argmax(left != g.unit[g.src]))
        return Diagnostics.failed("inverse law", (bad,),
                                  detail="g . inv(g) != unit(src(g))")
    right, ok = g.try_compose_many(g.inv, arrows)
    if not bool(ok.all()) or bool((right != g.unit[g.tgt]).any()):
        bad = int(np.argmax(~ok)) if not bool(ok.all()) else \
            int(np.argmax(right != g.unit[g.tgt]))
        return Diagnostics.failed("inverse law", (bad,),
                                  detail="inv(g) . g != unit(tgt(g))")
    return None


def _count_triples(g: Groupoid) -> int:
    if not g.comp_key.size:
        return 0
    k = g.n_arrows
    _, hs = np.divmod(g.comp_key, k)
    out_deg = np.bincount(g.src, minlength=g.n_objects)
    return int(out_deg[g.tgt[hs]].sum())


def _assoc_full(g: Groupoid, chunk: int = 1 << 20) -> Optional[tuple[int, int, int]]:
    """Scan every composable triple; return the lexicographically first
    violation or None."""
    k = g.n_arrows
    if not g.comp_key.size:
        return None
    gs, hs = np.divmod(g.comp_key, k)
    best: Optional[tuple[int, int, int]] = None
    for x in range(g.n_objects):
        cs = g.arrows_from(x)
        if not cs.size:
            continue
        sel = np.where(g.tgt[hs] == x)[0]
        if not sel.size:
            continue
        step = max(1, chunk // cs.shape[0])
        for lo in range(0, sel.shape[0], step):
            part = sel[lo:lo + step]
            g_rep = np.repeat(gs[part], cs.shape[0])
            h_rep = np.repeat(hs[part], cs.shape[0])
            gh_rep = np.repeat(g.comp_val[part], cs.shape[0])
            c_til = np.tile(cs, part.shape[0])
            left = g.compose_many(gh_rep, c_til)
            right = g.compose_many(g_rep, g.compose_many(h_rep, c_til))
            miss = left != right
            if bool(miss.any()):
                i = int(np.argmax(miss))
                cand = (int(g_rep[i]), int(h_rep[i]), int(c_til[i]))
                if best is None or cand < best:
                    best = cand
                break  # within this object the first hit is lex-first
    return best


def _generating_arrows(g: Groupoid) -> Optional[list[int]]:
    """Greedy generating set: lowest missing arrow is adjoined until the
    right-multiplication closure of the units covers every arrow."""
    k = g.n_arrows
    in_span = np.zeros(k, dtype=bool)
    if g.unit.size:
        in_span[g.unit] = True
    gens: list[int] = []
    frontier = np.where(in_span)[0]
    while True:
        while frontier.size and gens:
            new_mask = np.zeros(k, dtype=bool)
            for s in gens:
                vals, ok = g.try_compose_many(frontier, np.full(frontier.shape, s))
                new_mask[vals[ok]] = True
            new_mask &= ~in_span
            in_span |= new_mask
            frontier = np.where(new_mask)[0]
        rest = np.where(~in_span)[0]
        if not rest.size:
            return gens
        if len(gens) > k:  # cannot happen; guards a malformed table
            return None
        gens.append(int(rest[0]))
        in_span[rest[0]] = True
        frontier = np.where(in_span)[0]


def _assoc_generated(g: Groupoid) -> tuple[Optional[tuple[int, int, int]], int]:
    """Complete associativity test through a generating set.

    If ``(x b) y == x (b y)`` holds for every generator ``b`` and all
    composable ``x, y``, the law extends to arbitrary middle elements: the
    set of middle elements satisfying it contains the units and is closed
    under composition, hence contains every product of generators, which by
    the closure computation is every arrow.  Requires the domain and
    endpoint laws to have been checked already.
    """
    gens = _generating_arrows(g)
    if gens is None:
        return (0, 0, 0), 0
    for b in gens:
        xs = g.arrows_into(int(g.src[b]))
        ys = g.arrows_from(int(g.tgt[b]))
        if not xs.size or not ys.size:
            continue
        xb = g.compose_many(xs, np.full(xs.shape, b))
        by = g.compose_many(np.full(ys.shape, b), ys)
        x_rep = np.repeat(xs, ys.shape[0])
        xb_rep = np.repeat(xb, ys.shape[0])
        y_til = np.tile(ys, xs.shape[0])
        by_til = np.tile(by, xs.shape[0])
        left = g.compose_many(xb_rep, y_til)
        right = g.compose_many(x_rep, by_til)
        miss = left != right
        if bool(miss.any()):
            i = int(np.argmax(miss))
            return (int(x_rep[i]), b, int(y_til[i])), len(gens)
    return None, len(gens)


def verify_groupoid(g: Groupoid, assoc_mode: str = "auto") -> Diagnostics:
    """Check every groupoid axiom, reporting the first violation in a fixed
    scan order: structure, composition domain, endpoints of products, unit
    laws, inverse laws, associativity.

    Associativity runs as a full scan over composable triples when their
    number is at most ``FULL_ASSOC_LIMIT``, and otherwise as the complete
    generator-based middle-element test (``assoc_mode`` forces ``"full"`` or
    ``"generated"``).
    """
    if assoc_mode not in ("auto", "full", "generated"):
        raise ValueError(f"unknown assoc_mode {assoc_mode!r}")
    for scan in (_structural_scan, _domain_scan, _endpoint_scan, _unit_scan,
                 _inverse_scan):
        diag = scan(g)
        if diag is not None:
            return diag
    triples = _count_triples(g)
    if assoc_mode == "full" or (assoc_mode == "auto" and triples <= FULL_ASSOC_LIMIT):
        witness = _assoc_full(g)
        strategy: dict = {"assoc_strategy": "full", "triples": triples}
    else:
        witness, n_gens = _assoc_generated(g)
        strategy = {"assoc_strategy": "generated", "triples": triples,
                    "generators": n_gens}
    if witness is not None:
        return Diagnostics.failed("associativity", witness, **strategy)
    return Diagnostics.passed(objects=g.n_objects, arrows=g.n_arrows, **strategy)


# --- transitivity and local structure --------------------------------------

def is_transitive(g: Groupoid) -> tuple[bool, Optional[tuple[int, int]]]:
    """Whether every ordered pair of objects is joined by an arrow; when not,
    the lexicographically first unjoined pair is the witness."""
    m = g.n_objects
    seen = np.zeros((m, m), dtype=bool)
    seen[g.src, g.tgt] = True
    if bool(seen.all()):
        return True, None
    flat = int(np.argmax(~seen))
    return False, (flat // m, flat % m)


@dataclass
class HomSet:
    """The arrows from ``source`` to ``target``; for a vertex group the
    induced multiplication table with the unit relabelled to 0."""

    source: int
    target: int
    arrows: list[int]
    group: Optional[FiniteGroup] = None

    def local_index(self, arrow: int) -> int:
        return self.arrows.index(arrow)


def hom_set(g: Groupoid, x: int, y: int) -> HomSet:
    return HomSet(source=x, target=y, arrows=g.hom(x, y))


def vertex_group(g: Groupoid, x: int) -> HomSet:
    """The loops at ``x`` as a verified group; the unit becomes element 0 and
    the remaining loops keep their ascending arrow order."""
    loops = g.loops(x)
    u = int(g.unit[x])
    if u not in loops:
        raise ValueError(f"unit of object {x} is not a loop at {x}")
    ordering = [u] + [a for a in loops if a != u]
    local = {a: i for i, a in enumerate(ordering)}
    table = [[local[g.compose(a, b)] for b in ordering] for a in ordering]
    diag, group = verify_group(table, identity=0)
    if group is None:
        raise ValueError(f"loops at object {x} do not form a group: {diag.failure}")
    return HomSet(source=x, target=x, arrows=ordering, group=group)


@dataclass
class VertexGroupIso:
    """Conjugation isomorphism between two vertex groups, induced by the
    lowest-index arrow joining the base objects."""

    source: int
    target: int
    via: int
    arrow_map: dict[int, int]
    local_map: list[int]


def vertex_groups_isomorphic(g: Groupoid, x: int, y: int) -> VertexGroupIso:
    """Conjugate ``G[x]`` onto ``G[y]`` by the lowest-index arrow ``a: x->y``
    (loop ``l`` maps to ``inv(a) . l . a``), verifying the result is a group
    isomorphism on the relabelled tables."""
    joining = g.hom(x, y)
    if not joining:
        raise ValueError(f"no arrow from {x} to {y}")
    a = joining[0]
    a_inv = g.inverse(a)
    gx, gy = vertex_group(g, x), vertex_group(g, y)
    arrow_map = {l: g.compose(g.compose(a_inv, l), a) for l in gx.arrows}
    if sorted(arrow_map.values()) != sorted(gy.arrows):
        raise ValueError(f"conjugation by {a} is not a bijection G[{x}] -> G[{y}]")
    local_map = [gy.local_index(arrow_map[gx.arrows[i]])
                 for i in range(len(gx.arrows))]
    for i in range(gx.group.order):
        for j in range(gx.group.order):
            if local_map[gx.group.mul(i, j)] != gy.group.mul(local_map[i], local_map[j]):
                raise ValueError(
                    f"conjugation by {a} does not preserve products at ({i}, {j})")
    return VertexGroupIso(source=x, target=y, via=a, arrow_map=arrow_map,
                          local_map=local_map)


@dataclass
class LocalTriviality:
    trivial: bool
    sections: Optional[dict[int, list[int]]]
    witness: Optional[tuple[int, int]]


def check_local_triviality(g: Groupoid) -> LocalTriviality:
    """For each basepoint ``x`` build the target section ``y -> lowest arrow
    x->y`` when it exists.  At finite discrete size this succeeds exactly
    when the groupoid is transitive; the traversal here is deliberately
    independent of :func:`is_transitive` so the two can be cross-checked.
    """
    sections: dict[int, list[int]] = {}
    src, tgt = g.src.tolist(), g.tgt.tolist()
    for x in range(g.n_objects):
        tau: list[int] = []
        for y in range(g.n_objects):
            pick = -1
            for arrow in range(g.n_arrows):
                if src[arrow] == x and tgt[arrow] == y:
                    pick = arrow
                    break
            if pick < 0:
                return LocalTriviality(trivial=False, sections=None, witness=(x, y))
            tau.append(pick)
        sections[x] = tau
    return LocalTriviality(trivial=True, sections=sections, witness=None)


def verify_groupoid_iso(g1: Groupoid, g2: Groupoid, obj_map: Sequence[int],
                        arr_map: Sequence[int]) -> Diagnostics:
    """Check that the pair of maps is a groupoid isomorphism: bijections that
    preserve src, tgt, unit, inverse, and every defined composition."""
    m, k = g1.n_objects, g1.n_arrows
    if len(obj_map) != m or len(arr_map) != k:
        return Diagnostics.failed(
            "map length mismatch", (len(obj_map), m, len(arr_map), k),
            structural=True)
    if g2.n_objects != m or g2.n_arrows != k:
        return Diagnostics.failed(
            "size mismatch", (m, g2.n_objects, k, g2.n_arrows), structural=True)
    om = np.asarray(obj_map, dtype=np.int64)
    am = np.asarray(arr_map, dtype=np.int64)
    for name, arr, bound in (("object", om, m), ("arrow", am, k)):
        if arr.size and (int(arr.min()) < 0 or int(arr.max()) >= bound):
            return Diagnostics.failed(f"{name} map out of range",
                                      (int(arr.min()), int(arr.max())),
                                      structural=True)
        if np.unique(arr).shape[0] != arr.shape[0]:
            return Diagnostics.failed(f"{name} map not a bijection", (),
                                      structural=True)
    if bool((om[g1.src] != g2.src[am]).any()):
        bad = int(np.argmax(om[g1.src] != g2.src[am]))
        return Diagnostics.failed("src not preserved", (bad,))
    if bool((om[g1.tgt] != g2.tgt[am]).any()):
        bad = int(np.argmax(om[g1.tgt] != g2.tgt[am]))
        return Diagnostics.failed("tgt not preserved", (bad,))
    if bool((am[g1.unit] != g2.unit[om]).any()):
        bad = int(np.argmax(am[g1.unit] != g2.unit[om]))
        return Diagnostics.failed("unit not preserved", (bad,))
    if bool((am[g1.inv] != g2.inv[am]).any()):
        bad = int(np.argmax(am[g1.inv] != g2.inv[am]))
        return Diagnostics.failed("inverse not preserved", (bad,))
    if g1.n_comp_pairs != g2.n_comp_pairs:
        return Diagnostics.failed(
            "comp table size mismatch", (g1.n_comp_pairs, g2.n_comp_pairs))
    if g1.comp_key.size:
        gs, hs = np.divmod(g1.comp_key, k)
        vals, ok = g2.try_compose_many(am[gs], am[hs])
        if not bool(ok.all()):
            bad = int(np.argmax(~ok))
            return Diagnostics.failed("composition not preserved",
                                      (int(gs[bad]), int(hs[bad])))
        if bool((vals != am[g1.comp_val]).any()):
            bad = int(np.argmax(vals != am[g1.comp_val]))
            return Diagnostics.failed("composition not preserved",
                                      (int(gs[bad]), int(hs[bad])))
    return Diagnostics.passed()


# --- normalization and constructions ---------------------------------------

def normalize_groupoid(g: Groupoid) -> tuple[Groupoid, list[int]]:
    """Reindex arrows so that ``unit(x) == x``; non-unit arrows keep their
    relative order.  Returns the normalized groupoid and the map from old to
    new arrow indices."""
    m, k = g.n_objects, g.n_arrows
    unit_set = set(g.unit.tolist())
    if len(unit_set) != m:
        raise ValueError("unit arrows are not distinct; cannot normalize")
    perm = [0] * k
    for x, u in enumerate(g.unit.tolist()):
        perm[u] = x
    nxt = m
    for a in range(k):
        if a not in unit_set:
            perm[a] = nxt
            nxt += 1
    pm = np.asarray(perm, dtype=np.int64)
    inv_pm = np.empty(k, dtype=np.int64)
    inv_pm[pm] = np.arange(k)
    gs, hs = np.divmod(g.comp_key, k) if g.comp_key.size else \
        (np.empty(0, np.int64), np.empty(0, np.int64))
    out = Groupoid(
        n_objects=m,
        src=g.src[inv_pm],
        tgt=g.tgt[inv_pm],
        unit=np.arange(m, dtype=np.int64),
        inv=pm[g.inv[inv_pm]],
        comp_key=pm[gs] * k + pm[hs],
        comp_val=pm[g.comp_val] if g.comp_val.size else g.comp_val,
    )
    return out, perm


def one_object_groupoid(group: FiniteGroup) -> Groupoid:
    """The group as a groupoid with a single object; the identity element
    becomes the unit arrow 0."""
    n = group.order
    ordering = [group.identity] + [a for a in range(n) if a != group.identity]
    local = {a: i for i, a in enumerate(ordering)}
    comp = {(local[a], local[b]): local[group.mul(a, b)]
            for a in range(n) for b in range(n)}
    return Groupoid.from_tables(
        n_objects=1,
        src=[0] * n, tgt=[0] * n, unit=[0],
        inv=[local[group.inv[ordering[i]]] for i in range(n)],
        comp=comp)


def pair_groupoid(n: int) -> Groupoid:
    """Objects ``0..n-1`` with exactly one arrow between each ordered pair."""
    if n <= 0:
        raise ValueError("pair groupoid needs at least one object")
    pairs = [(x, x) for x in range(n)]
    pairs += [(a, b) for a in range(n) for b in range(n) if a != b]
    index = {p: i for i, p in enumerate(pairs)}
    comp = {}
    for (a, b) in pairs:
        for (c, d) in pairs:
            if b == c:
                comp[(index[(a, b)], index[(c, d)])] = index[(a, d)]
    return Groupoid.from_tables(
        n_objects=n,
        src=[p[0] for p in pairs], tgt=[p[1] for p in pairs],
        unit=list(range(n)),
        inv=[index[(b, a)] for (a, b) in pairs],
        comp=comp)


def disjoint_union(g1: Groupoid, g2: Groupoid) -> Groupoid:
    """Place two groupoids side by side (object and arrow indices of the
    second are shifted).  The result is not transitive when both parts are
    nonempty, and not normalized in general."""
    m1, k1 = g1.n_objects, g1.n_arrows
    k = k1 + g2.n_arrows
    gs1, hs1 = np.divmod(g1.comp_key, k1) if g1.comp_key.size else \
        (np.empty(0, np.int64), np.empty(0, np.int64))
    gs2, hs2 = np.divmod(g2.comp_key, g2.n_arrows) if g2.comp_key.size else \
        (np.empty(0, np.int64), np.empty(0, np.int64))
    keys = np.concatenate([gs1 * k + hs1, (gs2 + k1) * k + (hs2 + k1)])
    vals = np.concatenate([g1.comp_val, g2.comp_val + k1])
    return Groupoid(
        n_objects=m1 + g2.n_objects,
        src=np.concatenate([g1.src, g2.src + m1]),
        tgt=np.concatenate([g1.tgt, g2.tgt + m1]),
        unit=np.concatenate([g1.unit, g2.unit + k1]),
        inv=np.concatenate([g1.inv, g2.inv + k1]),
        comp_key=keys, comp_val=vals)

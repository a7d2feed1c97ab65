"""Finite group arithmetic on explicit multiplication tables.

Groups are extensional: elements are the indices ``0..n-1``, the product is
an ``n x n`` table, and every axiom is decided by exhaustive scan.  Searches
return the lowest-index solution so that results are reproducible run to run.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Optional, Sequence

from .diagnostics import Diagnostics

__all__ = [
    "FiniteGroup",
    "PRESET_NAMES",
    "verify_group",
    "preset_group",
    "generated_subgroup",
    "are_conjugate_subgroup_maps",
]


@dataclass(frozen=True)
class FiniteGroup:
    """A verified group on elements ``0..order-1`` with an explicit table."""

    order: int
    identity: int
    mult: tuple[tuple[int, ...], ...]
    inv: tuple[int, ...]
    name: str = ""

    def mul(self, a: int, b: int) -> int:
        return self.mult[a][b]

    def inverse(self, a: int) -> int:
        return self.inv[a]

    @property
    def elements(self) -> range:
        return range(self.order)

    def conjugate(self, g: int, h: int) -> int:
        """Return ``h^-1 * g * h``."""
        return self.mul(self.mul(self.inv[h], g), h)


def verify_group(table: Sequence[Sequence[int]], identity: int,
                 name: str = "") -> tuple[Diagnostics, Optional[FiniteGroup]]:
    """Check the group axioms on ``table`` by exhaustive scan.

    Checks run in a fixed order and stop at the first violation: shape and
    index range (structural), identity laws, each row and column being a
    permutation, associativity over all triples, and two-sided inverses.
    On success the verified :class:`FiniteGroup` is returned alongside the
    diagnostics, with the inverse table derived from the multiplication table.
    """
    n = len(table)
    if n == 0:
        return Diagnostics.failed("empty table", (), structural=True), None
    for i, row in enumerate(table):
        if len(row) != n:
            return Diagnostics.failed(
                "table not square", (i, len(row), n), structural=True), None
        for j, v in enumerate(row):
            if not isinstance(v, int) or isinstance(v, bool) or not (0 <= v < n):
                return Diagnostics.failed(
                    "entry out of range", (i, j, v), structural=True), None
    if not (0 <= identity < n):
        return Diagnostics.failed(
            "identity out of range", (identity,), structural=True), None

    e = identity
    for a in range(n):
        if table[e][a] != a:
            return Diagnostics.failed("identity law", (e, a, table[e][a])), None
        if table[a][e] != a:
            return Diagnostics.failed("identity law", (a, e, table[a][e])), None

    full = list(range(n))
    for i in range(n):
        if sorted(table[i]) != full:
            return Diagnostics.failed("row %d not a permutation" % i, (i,)), None
    for j in range(n):
        if sorted(table[i][j] for i in range(n)) != full:
            return Diagnostics.failed("column %d not a permutation" % j, (j,)), None

    for a in range(n):
        for b in range(n):
            ab = table[a][b]
            for c in range(n):
                if table[ab][c] != table[a][table[b][c]]:
                    return Diagnostics.failed("associativity", (a, b, c)), None

    inv = [-1] * n
    for a in range(n):
        right = next((b for b in range(n) if table[a][b] == e), None)
        if right is None or table[right][a] != e:
            return Diagnostics.failed("inverse law", (a,)), None
        inv[a] = right

    group = FiniteGroup(
        order=n,
        identity=e,
        mult=tuple(tuple(row) for row in table),
        inv=tuple(inv),
        name=name,
    )
    return Diagnostics.passed(order=n), group


# --- preset tables ------------------------------------------------------

def _cyclic_table(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def _perm_compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    # product p*q acts by "apply q first, then p"
    return tuple(p[q[i]] for i in range(len(p)))


def _table_from_perms(perms: list[tuple[int, ...]]) -> list[list[int]]:
    index = {p: i for i, p in enumerate(perms)}
    return [[index[_perm_compose(p, q)] for q in perms] for p in perms]


def _symmetric_table(n: int) -> list[list[int]]:
    # permutations in lexicographic order; the identity comes first
    return _table_from_perms(sorted(permutations(range(n))))


def _dihedral4_table() -> list[list[int]]:
    # symmetries of the square as vertex permutations; elements are
    # r^0..r^3 then r^0 s..r^3 s with r the rotation i -> i+1, s the
    # reflection i -> -i
    r = tuple((i + 1) % 4 for i in range(4))
    s = tuple((-i) % 4 for i in range(4))
    elems: list[tuple[int, ...]] = []
    power = tuple(range(4))
    for _ in range(4):
        elems.append(power)
        power = _perm_compose(r, power)
    for i in range(4):
        elems.append(_perm_compose(elems[i], s))
    return _table_from_perms(elems)


def _quaternion_table() -> list[list[int]]:
    # elements 1, i, j, k, -1, -i, -j, -k indexed as 4*sign + letter
    letter = [
        [(0, 0), (1, 0), (2, 0), (3, 0)],
        [(1, 0), (0, 1), (3, 0), (2, 1)],
        [(2, 0), (3, 1), (0, 1), (1, 0)],
        [(3, 0), (2, 0), (1, 1), (0, 1)],
    ]
    table = []
    for a in range(8):
        sa, la = divmod(a, 4)
        row = []
        for b in range(8):
            sb, lb = divmod(b, 4)
            lc, flip = letter[la][lb]
            row.append(4 * (sa ^ sb ^ flip) + lc)
        table.append(row)
    return table


_PRESET_BUILDERS = {
    "Z1": lambda: _cyclic_table(1),
    "Z2": lambda: _cyclic_table(2),
    "Z3": lambda: _cyclic_table(3),
    "Z4": lambda: _cyclic_table(4),
    "Z6": lambda: _cyclic_table(6),
    "S3": lambda: _symmetric_table(3),
    "D4": _dihedral4_table,
    "Q8": _quaternion_table,
    "S4": lambda: _symmetric_table(4),
}

PRESET_NAMES: tuple[str, ...] = tuple(_PRESET_BUILDERS)


@lru_cache(maxsize=None)
def preset_group(name: str) -> FiniteGroup:
    """Return one of the named stock groups, verified, with identity 0."""
    if name not in _PRESET_BUILDERS:
        raise ValueError(f"unknown preset group {name!r}; choices: {', '.join(PRESET_NAMES)}")
    diag, group = verify_group(_PRESET_BUILDERS[name](), identity=0, name=name)
    if group is None:  # pragma: no cover - preset tables are fixed
        raise AssertionError(f"preset {name} failed verification: {diag.failure}")
    return group


# --- derived constructions ----------------------------------------------

def generated_subgroup(group: FiniteGroup, generators: Sequence[int]) -> list[int]:
    """Return the sorted closure of ``generators`` under product and inverse.

    The empty generating set yields the trivial subgroup.
    """
    for g in generators:
        if not (0 <= g < group.order):
            raise ValueError(f"generator {g} out of range for order {group.order}")
    members = {group.identity}
    work = [group.identity]
    gens = sorted(set(generators) | {group.inv[g] for g in generators})
    while work:
        a = work.pop()
        for g in gens:
            for b in (group.mul(a, g), group.mul(g, a)):
                if b not in members:
                    members.add(b)
                    work.append(b)
    return sorted(members)


def are_conjugate_subgroup_maps(group: FiniteGroup, f1: Sequence[int],
                                f2: Sequence[int]) -> Optional[int]:
    """Find ``h`` with ``h^-1 * f1[i] * h == f2[i]`` for every position ``i``.

    The search is exhaustive over the whole group and returns the lowest such
    ``h``, or ``None`` when the tuples are not simultaneously conjugate.
    """
    if len(f1) != len(f2):
        raise ValueError(f"length mismatch: {len(f1)} vs {len(f2)}")
    for seq in (f1, f2):
        for g in seq:
            if not (0 <= g < group.order):
                raise ValueError(f"element {g} out of range for order {group.order}")
    for h in group.elements:
        if all(group.conjugate(g1, h) == g2 for g1, g2 in zip(f1, f2)):
            return h
    return None


def element_order(group: FiniteGroup, g: int) -> int:
    """Smallest k >= 1 with g^k = identity."""
    if not (0 <= g < group.order):
        raise ValueError(f"element {g} out of range for order {group.order}")
    power, k = g, 1
    while power != group.identity:
        power = group.mul(power, g)
        k += 1
    return k


def find_group_isomorphism(g1: FiniteGroup,
                           g2: FiniteGroup) -> Optional[list[int]]:
    """Search for an isomorphism ``g1 -> g2`` by backtracking.

    Candidates are pruned by element order and partial maps are closed under
    products as they grow.  Candidates are tried in ascending order, so the
    result is deterministic; ``None`` means no isomorphism exists.
    """
    n = g1.order
    if n != g2.order:
        return None
    ord1 = [element_order(g1, g) for g in g1.elements]
    ord2 = [element_order(g2, g) for g in g2.elements]
    if sorted(ord1) != sorted(ord2):
        return None

    image = [-1] * n
    used = [False] * n
    image[g1.identity] = g2.identity
    used[g2.identity] = True

    def close(pairs: list[tuple[int, int]]) -> Optional[list[tuple[int, int]]]:
        """Force products of known values; return newly set pairs or None."""
        added: list[tuple[int, int]] = []
        queue = list(pairs)
        while queue:
            a, _ = queue.pop()
            for b in g1.elements:
                if image[b] < 0:
                    continue
                for x, y in ((a, b), (b, a)):
                    prod = g1.mul(x, y)
                    want = g2.mul(image[x], image[y])
                    if image[prod] < 0:
                        if used[want]:
                            return _undo(added)
                        image[prod] = want
                        used[want] = True
                        added.append((prod, want))
                        queue.append((prod, want))
                    elif image[prod] != want:
                        return _undo(added)
        return added

    def _undo(added: list[tuple[int, int]]) -> None:
        for a, b in added:
            image[a] = -1
            used[b] = False
        return None

    def search() -> bool:
        try:
            a = image.index(-1)
        except ValueError:
            return True
        for b in g2.elements:
            if used[b] or ord2[b] != ord1[a]:
                continue
            image[a] = b
            used[b] = True
            added = close([(a, b)])
            if added is not None:
                if search():
                    return True
                _undo(added)
            image[a] = -1
            used[b] = False
        return False

    return list(image) if search() else None

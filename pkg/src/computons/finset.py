"""Finite sets as cardinalities and total functions between them.

A finite set of size ``n`` is the set ``{0, ..., n-1}``; a map is a
lookup table.  Everything here is immutable.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError


def _card(x) -> int:
    return x.card if isinstance(x, FinSet) else int(x)


@dataclass(frozen=True)
class FinSet:
    card: int

    def __post_init__(self):
        if self.card < 0:
            raise DomainError(f"negative cardinality {self.card}")

    def __iter__(self):
        return iter(range(self.card))

    def __len__(self):
        return self.card

    def __contains__(self, x):
        return isinstance(x, int) and 0 <= x < self.card


@dataclass(frozen=True)
class FinMap:
    """Total function ``{0..len(table)-1} -> {0..cod-1}``."""

    table: tuple
    cod: int

    def __init__(self, table: Iterable[int], cod: int):
        table = tuple(int(v) for v in table)
        cod = _card(cod)
        for x, v in enumerate(table):
            if not 0 <= v < cod:
                raise DomainError(f"map sends {x} to {v}, outside codomain of size {cod}")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "cod", cod)

    @property
    def dom(self) -> int:
        return len(self.table)

    def __call__(self, x: int) -> int:
        if not 0 <= x < len(self.table):
            raise DomainError(f"{x} is outside the domain of size {len(self.table)}")
        return self.table[x]

    def __iter__(self):
        return iter(self.table)

    def __len__(self):
        return len(self.table)

    @classmethod
    def identity(cls, n) -> FinMap:
        n = _card(n)
        return cls(range(n), n)

    @classmethod
    def empty(cls, cod) -> FinMap:
        return cls((), cod)

    def then(self, other: FinMap) -> FinMap:
        """``other ∘ self``."""
        if other.dom != self.cod:
            raise DomainError(f"cannot compose: codomain {self.cod} vs domain {other.dom}")
        return FinMap((other.table[v] for v in self.table), other.cod)

    def image(self) -> list[int]:
        return image(self)

    def fiber(self, y: int) -> list[int]:
        return fiber(self, y)

    def restrict(self, xs: Sequence[int]) -> list[int]:
        return [self.table[x] for x in xs]


def image(f: FinMap) -> list[int]:
    return sorted(set(f.table))


def fiber(f: FinMap, y: int) -> list[int]:
    if not 0 <= y < f.cod:
        raise DomainError(f"{y} is outside the codomain of size {f.cod}")
    return [x for x, v in enumerate(f.table) if v == y]


def is_injective(f: FinMap) -> bool:
    return len(set(f.table)) == len(f.table)


def is_surjective(f: FinMap) -> bool:
    return len(set(f.table)) == f.cod


@dataclass(frozen=True)
class DisjointUnion:
    left: FinSet
    right: FinSet
    size: int
    inj_left: FinMap
    inj_right: FinMap

    def side(self, a: int) -> tuple[int, int]:
        """Return ``(0, k)`` if ``a = inj_left(k)`` else ``(1, k)``."""
        if not 0 <= a < self.size:
            raise DomainError(f"{a} is outside the disjoint union of size {self.size}")
        if a < self.left.card:
            return 0, a
        return 1, a - self.left.card


def disjoint_union(a, b) -> DisjointUnion:
    m, n = _card(a), _card(b)
    return DisjointUnion(
        FinSet(m), FinSet(n), m + n,
        FinMap(range(m), m + n),
        FinMap(range(m, m + n), m + n),
    )


@dataclass(frozen=True)
class UnionSet:
    left: FinSet
    right: FinSet
    size: int
    inj_left: FinMap
    inj_right: FinMap


def union(a, b) -> UnionSet:
    m, n = _card(a), _card(b)
    size = max(m, n)
    return UnionSet(FinSet(m), FinSet(n), size, FinMap(range(m), size), FinMap(range(n), size))


@dataclass(frozen=True)
class PushoutFns:
    """Cocone of a span of finite-set maps: the quotient size and both legs."""

    size: int
    left: FinMap
    right: FinMap


def _check_span(g: FinMap, h: FinMap):
    if g.dom != h.dom:
        raise DomainError(f"span legs have different apex sizes ({g.dom} vs {h.dom})")


def pushout_fns(g: FinMap, h: FinMap) -> PushoutFns:
    """Pushout of ``Y <-g- X -h-> Z`` in finite sets.

    The result is ``Y ⊔ Z`` quotiented by the equivalence generated by
    ``g(x) ~ h(x)``.  Classes are numbered in order of first appearance,
    scanning Y ascending and then Z ascending.
    """
    _check_span(g, h)
    ny, nz = g.cod, h.cod
    parent = list(range(ny + nz))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for y, z in zip(g.table, h.table):
        ry, rz = find(y), find(ny + z)
        if ry != rz:
            parent[max(ry, rz)] = min(ry, rz)

    number: dict[int, int] = {}
    out = []
    for a in range(ny + nz):
        root = find(a)
        if root not in number:
            number[root] = len(number)
        out.append(number[root])
    size = len(number)
    return PushoutFns(size, FinMap(out[:ny], size), FinMap(out[ny:], size))


def reference_algorithm1(g: FinMap, h: FinMap) -> PushoutFns:
    """Step-by-step transcription of the published BuildPushoutFunctions.

    Kept only for conformance testing: it agrees with :func:`pushout_fns`
    when both legs are injective, and can return non-commuting maps when a
    Y-fiber bridges two Z-classes that were numbered apart earlier.
    """
    _check_span(g, h)
    i_y: dict[int, int] = {}
    i_z: dict[int, int] = {}
    current = 0
    for y in range(g.cod):
        fib = fiber(g, y)
        eq = current
        for x in fib:
            if h(x) in i_z:
                eq = i_z[h(x)]
                break
        for x in fib:
            i_z[h(x)] = eq
        i_y[y] = eq
        if eq == current:
            current += 1
    for z in range(h.cod):
        if z not in i_z:
            i_z[z] = current
            current += 1
    return PushoutFns(
        current,
        FinMap((i_y[y] for y in range(g.cod)), current),
        FinMap((i_z[z] for z in range(h.cod)), current),
    )


def find_eq(du_a: DisjointUnion, du_b: DisjointUnion, a: int, g1: FinMap, g2: FinMap) -> int:
    """Image of ``a ∈ A1 ⊔ A2`` under ``g1 ⊔ g2 : A1 ⊔ A2 -> B1 ⊔ B2``."""
    side, k = du_a.side(a)
    if side == 0:
        return du_b.inj_left(g1(k))
    return du_b.inj_right(g2(k))

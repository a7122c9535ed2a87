"""Isomorphism of computons up to renumbering of units, ports and flows.

Colours, device ids and the number of types must agree exactly; port
labels are ignored.  The search encodes a computon as a typed directed
graph (one node per unit, port, inflow and outflow; one edge per structure
map), refines node classes jointly on both graphs, then backtracks in an
order that always extends along already-mapped neighbours.
"""
from __future__ import annotations

from dataclasses import dataclass

from .computon import Computon
from .finset import FinMap


@dataclass(frozen=True)
class Iso:
    units: FinMap
    ports: FinMap
    inflows: FinMap
    outflows: FinMap


class _Graph:
    def __init__(self, c: Computon):
        self.c = c
        self.base_u = 0
        self.base_p = c.units
        self.base_i = self.base_p + c.ports
        self.base_o = self.base_i + c.inflows
        self.n = self.base_o + c.outflows
        labels = (
            [("U",)] * c.units
            + [("P", c.colour.table[p]) for p in range(c.ports)]
            + [("I",)] * c.inflows
            + [("O", c.device[o]) for o in range(c.outflows)]
        )
        self.labels = labels
        self.out = [[] for _ in range(self.n)]
        self.inc = [[] for _ in range(self.n)]
        for i in range(c.inflows):
            a = self.base_i + i
            self._edge(a, "s", self.base_p + c.src.table[i])
            self._edge(a, "tau", self.base_u + c.in_unit.table[i])
            self._edge(a, "r", self.base_o + c.relate.table[i])
        for o in range(c.outflows):
            a = self.base_o + o
            self._edge(a, "t", self.base_p + c.tgt.table[o])
            self._edge(a, "sigma", self.base_u + c.out_unit.table[o])
        self.out_set = [set(e) for e in self.out]
        self.inc_set = [set(e) for e in self.inc]

    def _edge(self, a, kind, b):
        self.out[a].append((kind, b))
        self.inc[b].append((kind, a))


def _refine(ga: _Graph, gb: _Graph):
    table: dict = {}
    col_a = [table.setdefault(lab, len(table)) for lab in ga.labels]
    col_b = [table.setdefault(lab, len(table)) for lab in gb.labels]
    classes = len(table)
    while True:
        def sig(g, col, n):
            return (
                col[n],
                tuple(sorted((k, col[m]) for k, m in g.out[n])),
                tuple(sorted((k, col[m]) for k, m in g.inc[n])),
            )
        sigs_a = [sig(ga, col_a, n) for n in range(ga.n)]
        sigs_b = [sig(gb, col_b, n) for n in range(gb.n)]
        table = {}
        for s in sorted(set(sigs_a) | set(sigs_b)):
            table[s] = len(table)
        col_a = [table[s] for s in sigs_a]
        col_b = [table[s] for s in sigs_b]
        if sorted(col_a) != sorted(col_b):
            return None
        if len(table) == classes:
            return col_a, col_b
        classes = len(table)


def _search_order(g: _Graph, col, class_size):
    order, placed = [], [False] * g.n
    weight = [0] * g.n
    for _ in range(g.n):
        best = None
        for n in range(g.n):
            if placed[n]:
                continue
            key = (-weight[n], class_size[col[n]], n)
            if best is None or key < best[0]:
                best = (key, n)
        n = best[1]
        placed[n] = True
        order.append(n)
        for _, m in g.out[n] + g.inc[n]:
            weight[m] += 1
    return order


def find_isomorphism(a: Computon, b: Computon) -> Iso | None:
    if (a.units, a.ports, a.inflows, a.outflows, a.types) != (
            b.units, b.ports, b.inflows, b.outflows, b.types):
        return None
    if sorted(a.colour.table) != sorted(b.colour.table) or sorted(a.device) != sorted(b.device):
        return None
    ga, gb = _Graph(a), _Graph(b)
    refined = _refine(ga, gb)
    if refined is None:
        return None
    col_a, col_b = refined
    class_size: dict = {}
    for cl in col_b:
        class_size[cl] = class_size.get(cl, 0) + 1
    by_class: dict = {}
    for n, cl in enumerate(col_b):
        by_class.setdefault(cl, []).append(n)

    order = _search_order(ga, col_a, class_size)
    phi = [-1] * ga.n
    used = [False] * gb.n

    def candidates(x):
        for kind, m in ga.out[x]:
            if phi[m] >= 0:
                return [y for k, y in gb.inc[phi[m]] if k == kind]
        for kind, m in ga.inc[x]:
            if phi[m] >= 0:
                return [y for k, y in gb.out[phi[m]] if k == kind]
        return by_class[col_a[x]]

    def consistent(x, y):
        for kind, m in ga.out[x]:
            if phi[m] >= 0 and (kind, phi[m]) not in gb.out_set[y]:
                return False
        for kind, m in ga.inc[x]:
            if phi[m] >= 0 and (kind, phi[m]) not in gb.inc_set[y]:
                return False
        return True

    def extend(k):
        if k == len(order):
            return True
        x = order[k]
        for y in candidates(x):
            if used[y] or col_b[y] != col_a[x] or not consistent(x, y):
                continue
            phi[x], used[y] = y, True
            if extend(k + 1):
                return True
            phi[x], used[y] = -1, False
        return False

    if not extend(0):
        return None

    def part(base_a, base_b, size):
        return FinMap((phi[base_a + k] - base_b for k in range(size)), size)

    iso = Iso(
        part(ga.base_u, gb.base_u, a.units),
        part(ga.base_p, gb.base_p, a.ports),
        part(ga.base_i, gb.base_i, a.inflows),
        part(ga.base_o, gb.base_o, a.outflows),
    )
    assert _commutes(a, b, iso)
    return iso


def _commutes(a: Computon, b: Computon, iso: Iso) -> bool:
    return (
        a.src.then(iso.ports) == iso.inflows.then(b.src)
        and a.tgt.then(iso.ports) == iso.outflows.then(b.tgt)
        and a.in_unit.then(iso.units) == iso.inflows.then(b.in_unit)
        and a.out_unit.then(iso.units) == iso.outflows.then(b.out_unit)
        and a.relate.then(iso.outflows) == iso.inflows.then(b.relate)
        and all(b.colour(iso.ports(p)) == a.colour(p) for p in range(a.ports))
        and all(b.device[iso.outflows(o)] == a.device[o] for o in range(a.outflows))
    )


def computons_isomorphic(a: Computon, b: Computon) -> bool:
    return find_isomorphism(a, b) is not None

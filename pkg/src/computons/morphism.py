"""Computon morphisms, monomorphisms and interface markers.

The type component of a morphism is always the canonical embedding
``k -> k`` and the device component is the identity on device ids, so a
morphism is fully described by its unit, port, inflow and outflow maps.
"""
from __future__ import annotations

from dataclasses import dataclass

from .computon import Computon, is_trivial, mk_trivial
from .errors import DomainError, MorphismError
from .finset import FinMap, is_injective


@dataclass(frozen=True)
class Morphism:
    source: Computon
    target: Computon
    units: FinMap
    ports: FinMap
    inflows: FinMap
    outflows: FinMap

    def __call__(self, p: int) -> int:
        return self.ports(p)

    def port_image(self, ps) -> set[int]:
        return {self.ports.table[p] for p in ps}


def _as_map(m, dom, cod, name):
    if isinstance(m, FinMap):
        f = m
    else:
        try:
            f = FinMap(m, cod)
        except DomainError as exc:
            raise MorphismError("shape", f"{name}: {exc}") from None
    if (f.dom, f.cod) != (dom, cod):
        raise MorphismError("shape", f"{name} has type {f.dom}->{f.cod}, expected {dom}->{cod}")
    return f


def vec_i(source: Computon, target: Computon, units: FinMap, ports: FinMap) -> set[int]:
    """Source ports that gain writing units in the target."""
    out = set()
    for p in range(source.ports):
        gained = set(target._adjacency[2][ports.table[p]])
        gained -= {units.table[u] for u in source._adjacency[2][p]}
        if gained:
            out.add(p)
    return out


def vec_o(source: Computon, target: Computon, units: FinMap, ports: FinMap) -> set[int]:
    """Source ports that gain reading units in the target."""
    out = set()
    for p in range(source.ports):
        gained = set(target._adjacency[3][ports.table[p]])
        gained -= {units.table[u] for u in source._adjacency[3][p]}
        if gained:
            out.add(p)
    return out


def morphism_violations(source, target, units, ports, inflows, outflows, types=None) -> list:
    """All failed conditions as ``(clause, message)`` pairs, in checking order."""
    try:
        mu = _as_map(units, source.units, target.units, "unit map")
        mp = _as_map(ports, source.ports, target.ports, "port map")
        mi = _as_map(inflows, source.inflows, target.inflows, "inflow map")
        mo = _as_map(outflows, source.outflows, target.outflows, "outflow map")
    except MorphismError as exc:
        return [(exc.clause, str(exc))]

    bad = []
    if source.types > target.types:
        bad.append(("types", f"{source.types} types do not embed into {target.types}"))
    if types is not None:
        tmap = _as_map(types, source.types, target.types, "type map") if source.types <= target.types else None
        if tmap is not None and tmap.table != tuple(range(source.types)):
            bad.append(("types", "the type component must be the canonical embedding"))

    def square(name, lhs, rhs):
        if lhs != rhs:
            for x, (a, b) in enumerate(zip(lhs, rhs)):
                if a != b:
                    bad.append((name, f"fails at element {x}: {a} != {b}"))
                    return

    square("in-unit square", [target.in_unit.table[mi.table[i]] for i in range(source.inflows)],
           [mu.table[source.in_unit.table[i]] for i in range(source.inflows)])
    square("out-unit square", [target.out_unit.table[mo.table[o]] for o in range(source.outflows)],
           [mu.table[source.out_unit.table[o]] for o in range(source.outflows)])
    square("source-port square", [target.src.table[mi.table[i]] for i in range(source.inflows)],
           [mp.table[source.src.table[i]] for i in range(source.inflows)])
    square("target-port square", [target.tgt.table[mo.table[o]] for o in range(source.outflows)],
           [mp.table[source.tgt.table[o]] for o in range(source.outflows)])
    square("relate square", [target.relate.table[mi.table[i]] for i in range(source.inflows)],
           [mo.table[source.relate.table[i]] for i in range(source.inflows)])
    square("device square", [target.device[mo.table[o]] for o in range(source.outflows)],
           list(source.device))
    square("colour square", [target.colour.table[mp.table[p]] for p in range(source.ports)],
           list(source.colour.table))

    if not bad:
        interface = set(source.inports) | set(source.outports)
        stray = (vec_i(source, target, mu, mp) | vec_o(source, target, mu, mp)) - interface
        if stray:
            bad.append(("boundary", f"interior ports {sorted(stray)} gain flows in the target"))
    return bad


def mk_morphism(source, target, units, ports, inflows, outflows, types=None) -> Morphism:
    bad = morphism_violations(source, target, units, ports, inflows, outflows, types)
    if bad:
        raise MorphismError(*bad[0])
    return Morphism(
        source, target,
        _as_map(units, source.units, target.units, "unit map"),
        _as_map(ports, source.ports, target.ports, "port map"),
        _as_map(inflows, source.inflows, target.inflows, "inflow map"),
        _as_map(outflows, source.outflows, target.outflows, "outflow map"),
    )


def identity(c: Computon) -> Morphism:
    return Morphism(c, c, FinMap.identity(c.units), FinMap.identity(c.ports),
                    FinMap.identity(c.inflows), FinMap.identity(c.outflows))


def from_trivial(apex: Computon, target: Computon, ports) -> Morphism:
    """Morphism out of a trivial computon, given only its port map."""
    if not is_trivial(apex):
        raise MorphismError("shape", "source is not trivial")
    empty = FinMap.empty
    return mk_morphism(apex, target, empty(target.units), ports,
                       empty(target.inflows), empty(target.outflows))


def vec_i_of(alpha: Morphism) -> set[int]:
    return vec_i(alpha.source, alpha.target, alpha.units, alpha.ports)


def vec_o_of(alpha: Morphism) -> set[int]:
    return vec_o(alpha.source, alpha.target, alpha.units, alpha.ports)


def is_monomorphism(alpha: Morphism) -> bool:
    return all(is_injective(f) for f in (alpha.units, alpha.ports, alpha.inflows, alpha.outflows))


def compose(first: Morphism, second: Morphism) -> Morphism:
    """``second ∘ first``."""
    if first.target != second.source:
        raise MorphismError("shape", "middle computons differ")
    return mk_morphism(
        first.source, second.target,
        first.units.then(second.units), first.ports.then(second.ports),
        first.inflows.then(second.inflows), first.outflows.then(second.outflows),
    )


@dataclass(frozen=True)
class Marker:
    kind: str
    mono: Morphism

    @property
    def apex(self) -> Computon:
        return self.mono.source

    @property
    def target(self) -> Computon:
        return self.mono.target


def _mk_marker(kind, trivial, target, ports, types=None) -> Marker:
    if not is_trivial(trivial):
        raise MorphismError("marker", "marker source must be trivial")
    ports = _as_map(ports, trivial.ports, target.ports, "port map")
    if not is_injective(ports):
        raise MorphismError("marker", "marker port map must be injective")
    want = set(target.inports if kind == "in" else target.outports)
    got = set(ports.table)
    if got != want:
        side = "inports" if kind == "in" else "outports"
        raise MorphismError("marker", f"image {sorted(got)} is not the {side} {sorted(want)}")
    empty = FinMap.empty
    alpha = mk_morphism(trivial, target, empty(target.units), ports,
                        empty(target.inflows), empty(target.outflows), types)
    return Marker(kind, alpha)


def mk_in_marker(trivial, target, ports, types=None) -> Marker:
    return _mk_marker("in", trivial, target, ports, types)


def mk_out_marker(trivial, target, ports, types=None) -> Marker:
    return _mk_marker("out", trivial, target, ports, types)


def canonical_marker(target: Computon, kind: str) -> Marker:
    """The marker whose apex lists the interface ports in ascending order."""
    ports = target.inports if kind == "in" else target.outports
    apex = mk_trivial([target.labels[p] for p in ports], [target.colour.table[p] for p in ports])
    return _mk_marker(kind, apex, target, ports)

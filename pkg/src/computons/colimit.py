"""Coproducts and pushouts of computons."""
from __future__ import annotations

from dataclasses import dataclass

from .computon import Computon
from .errors import MorphismError, NotPushableError
from .finset import FinMap, PushoutFns, disjoint_union, pushout_fns
from .morphism import Morphism, mk_morphism, vec_i_of, vec_o_of


@dataclass(frozen=True)
class Span:
    apex: Computon
    left_leg: Morphism
    right_leg: Morphism

    def __post_init__(self):
        if self.left_leg.source != self.apex or self.right_leg.source != self.apex:
            raise MorphismError("span", "both legs must start at the apex")

    @property
    def left(self) -> Computon:
        return self.left_leg.target

    @property
    def right(self) -> Computon:
        return self.right_leg.target


@dataclass(frozen=True)
class ColimitResult:
    object: Computon
    coleg_left: Morphism
    coleg_right: Morphism


def pushability_violations(span: Span) -> list[tuple[str, str]]:
    """Failed pushability clauses as ``(clause, message)`` pairs; empty means pushable."""
    apex, a1, a2 = span.apex, span.left_leg, span.right_leg
    bad = []
    for name, this, other in (("left", a1, a2), ("right", a2, a1)):
        host = this.target
        interface = set(host.inports) | set(host.outports)
        moved = vec_i_of(other) | vec_o_of(other)
        stray = sorted({this.ports.table[p] for p in moved} - interface)
        if stray:
            labels = [host.labels[p] for p in stray]
            bad.append(("boundary", f"ports {labels} of the {name} operand are interior "
                                    "but gain flows from the other operand"))
    if apex.types > min(span.left.types, span.right.types):
        bad.append(("types", f"apex uses {apex.types} types, more than an operand provides"))
    missing = apex.devices - (span.left.devices & span.right.devices)
    if missing:
        bad.append(("devices", f"apex devices {sorted(missing)} are not shared by both operands"))
    return bad


def is_pushable(span: Span) -> bool:
    return not pushability_violations(span)


def _assign_labels(candidates, interface):
    """Give every port a distinct label.

    ``candidates[p]`` is the preferred label of port ``p``.  Interface ports
    claim their names first (in index order), then interior ports; a port
    whose name is taken gets the first free ``name_k`` with ``k >= 2``.
    """
    wanted = set(candidates)
    used: set = set()
    out = [None] * len(candidates)
    order = [p for p in range(len(candidates)) if p in interface]
    order += [p for p in range(len(candidates)) if p not in interface]
    for p in order:
        lab = candidates[p]
        if lab in used:
            k = 2
            while f"{lab}_{k}" in used or f"{lab}_{k}" in wanted:
                k += 1
            lab = f"{lab}_{k}"
        used.add(lab)
        out[p] = lab
    return out


def _representatives(q: PushoutFns):
    """For each class, ``(side, index)`` of its first element, left side first."""
    rep = [None] * q.size
    for side, f in ((0, q.left), (1, q.right)):
        for x, k in enumerate(f.table):
            if rep[k] is None:
                rep[k] = (side, x)
    return rep


def _glue(left: Computon, right: Computon, qu, qp, qi, qo) -> ColimitResult:
    """Assemble the colimit object from the four quotient maps and build the colegs."""
    ops = (left, right)
    maps_u, maps_p, maps_i, maps_o = ((q.left, q.right) for q in (qu, qp, qi, qo))
    types = max(left.types, right.types)

    def sourcewise(q, structure, target_maps):
        table = []
        for side, x in _representatives(q):
            c = ops[side]
            v = getattr(c, structure).table[x]
            table.append(target_maps[side].table[v] if target_maps is not None else v)
        return table

    src = sourcewise(qi, "src", maps_p)
    in_unit = sourcewise(qi, "in_unit", maps_u)
    relate = sourcewise(qi, "relate", maps_o)
    tgt = sourcewise(qo, "tgt", maps_p)
    out_unit = sourcewise(qo, "out_unit", maps_u)
    colour = sourcewise(qp, "colour", None)
    device = [ops[side].device[x] for side, x in _representatives(qo)]
    wanted = [ops[side].labels[x] for side, x in _representatives(qp)]

    read, written = set(src), set(tgt)
    interface = {p for p in range(qp.size) if p not in read or p not in written}
    obj = Computon(
        units=qu.size, ports=qp.size, inflows=qi.size, outflows=qo.size, types=types,
        src=FinMap(src, qp.size), tgt=FinMap(tgt, qp.size),
        out_unit=FinMap(out_unit, qu.size), in_unit=FinMap(in_unit, qu.size),
        colour=FinMap(colour, types), relate=FinMap(relate, qo.size),
        device=device, labels=_assign_labels(wanted, interface),
    )
    legs = [mk_morphism(c, obj, qu_, qp_, qi_, qo_)
            for c, qu_, qp_, qi_, qo_ in zip(ops, maps_u, maps_p, maps_i, maps_o)]
    return ColimitResult(obj, legs[0], legs[1])


def _injections(a: int, b: int) -> PushoutFns:
    du = disjoint_union(a, b)
    return PushoutFns(du.size, du.inj_left, du.inj_right)


def coproduct(left: Computon, right: Computon) -> ColimitResult:
    """Side-by-side placement; always exists."""
    return _glue(
        left, right,
        _injections(left.units, right.units),
        _injections(left.ports, right.ports),
        _injections(left.inflows, right.inflows),
        _injections(left.outflows, right.outflows),
    )


def pushout(span: Span) -> ColimitResult:
    """Glue the operands along the apex; raises NotPushableError when the span is not pushable."""
    bad = pushability_violations(span)
    if bad:
        raise NotPushableError(bad)
    a1, a2 = span.left_leg, span.right_leg
    return _glue(
        span.left, span.right,
        pushout_fns(a1.units, a2.units),
        pushout_fns(a1.ports, a2.ports),
        pushout_fns(a1.inflows, a2.inflows),
        pushout_fns(a1.outflows, a2.outflows),
    )


def unique_from_coproduct(copr: ColimitResult, f: Morphism, g: Morphism) -> Morphism:
    """The mediating morphism ``h`` with ``h ∘ coleg_left = f`` and ``h ∘ coleg_right = g``."""
    if f.target != g.target:
        raise MorphismError("shape", "f and g must share a target")
    if f.source != copr.coleg_left.source or g.source != copr.coleg_right.source:
        raise MorphismError("shape", "f and g must start at the coproduct operands")
    target = f.target
    if target.types < copr.object.types:
        raise MorphismError("types", f"target has {target.types} types, "
                                     f"the coproduct needs {copr.object.types}")

    def paste(kind):
        first, second = getattr(f, kind), getattr(g, kind)
        return FinMap(first.table + second.table, first.cod)

    return mk_morphism(copr.object, target, paste("units"), paste("ports"),
                       paste("inflows"), paste("outflows"))

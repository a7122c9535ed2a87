"""Control-flow composition operators built from coproducts and pushouts.

Each operator takes and returns a :class:`Composite`, which pairs the
resulting computon with the parsing tree recording how it was built.  The
tree is what makes soundness checkable: the colimit object alone does not
remember its operands.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

from .colimit import ColimitResult, Span, coproduct, pushout, unique_from_coproduct
from .computon import (CONTROL, Computon, classify, is_connected, is_trivial, mk_trivial,
                       primitive)
from .errors import CompositionError, MorphismError
from .morphism import Marker, from_trivial, is_monomorphism, mk_in_marker, mk_out_marker

SEQ_TOTAL = "SEQ_TOTAL"
SEQ_PARTIAL = "SEQ_PARTIAL"
ASYNC = "ASYNC"
BRA_OPEN = "BRA_OPEN"
BRA_CLOSED = "BRA_CLOSED"
OPERATORS = (SEQ_TOTAL, SEQ_PARTIAL, ASYNC, BRA_OPEN, BRA_CLOSED)

GLUE_DEVICE = "builtin:epsilon"


@dataclass(frozen=True)
class Leaf:
    name: str
    cls: str
    computon: Computon | None = field(default=None, compare=False, repr=False)

    @property
    def height(self) -> int:
        return 0


@dataclass(frozen=True)
class Node:
    op: str
    left: "ParsingTree"
    right: "ParsingTree"
    diagram: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.op not in OPERATORS:
            raise CompositionError("tree", f"unknown operator {self.op!r}")

    @property
    def height(self) -> int:
        return max(self.left.height, self.right.height) + 1


ParsingTree = Union[Leaf, Node]


def leaves(tree: ParsingTree) -> Iterator[Leaf]:
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Leaf):
            yield t
        else:
            stack.append(t.right)
            stack.append(t.left)


def operator_sequence(tree: ParsingTree) -> list[str]:
    """Operators in post-order, i.e. the order in which they were applied."""
    if isinstance(tree, Leaf):
        return []
    return operator_sequence(tree.left) + operator_sequence(tree.right) + [tree.op]


@dataclass(frozen=True)
class Composite:
    computon: Computon
    tree: ParsingTree
    cocone: ColimitResult | None = field(default=None, compare=False, repr=False)

    @property
    def kind(self) -> str | None:
        """``total`` or ``partial`` for sequencing results, otherwise None."""
        if isinstance(self.tree, Node):
            return {SEQ_TOTAL: "total", SEQ_PARTIAL: "partial"}.get(self.tree.op)
        return None


def atom(c: Computon, name: str = "atom") -> Composite:
    """Wrap a computon as a height-0 composite."""
    cls = classify(c)
    return Composite(c, Leaf(name, cls if cls != "composite" else "unknown", c))


def _lift(x) -> Composite:
    return x if isinstance(x, Composite) else atom(x)


def is_sound(c: Composite) -> bool:
    for leaf in leaves(c.tree):
        cls = classify(leaf.computon) if leaf.computon is not None else leaf.cls
        if cls not in ("trivial", "primitive"):
            return False
    return True


# -- sequencing -------------------------------------------------------------

def sequentiability_violations(span: Span) -> list[tuple[str, str]]:
    bad = []
    a1, a2 = span.left_leg, span.right_leg
    if not is_trivial(span.apex):
        bad.append(("trivial-apex", "the apex must be a trivial computon"))
    if not is_monomorphism(a1) or not is_monomorphism(a2):
        bad.append(("monomorphism", "both legs must be monomorphisms"))
    outs = set(span.left.outports)
    stray = [p for p in a1.ports.table if p not in outs]
    if stray:
        bad.append(("left-outports", f"left ports {[span.left.labels[p] for p in stray]} are not outports"))
    ins = set(span.right.inports)
    stray = [p for p in a2.ports.table if p not in ins]
    if stray:
        bad.append(("right-inports", f"right ports {[span.right.labels[p] for p in stray]} are not inports"))
    if span.apex.types > min(span.left.types, span.right.types):
        bad.append(("types", "apex colours do not embed in both operands"))
    if not span.apex.devices <= (span.left.devices & span.right.devices):
        bad.append(("devices", "apex devices are not shared by both operands"))
    return bad


def is_sequentiable(span: Span) -> bool:
    return not sequentiability_violations(span)


def _check_operands(span: Span, left: Composite, right: Composite):
    if span.left != left.computon or span.right != right.computon:
        raise CompositionError("operands", "span legs do not end at the given operands")


def seq(left, right, span: Span) -> Composite:
    """Sequential composition; total when the span covers left outports and right inports."""
    left, right = _lift(left), _lift(right)
    _check_operands(span, left, right)
    bad = sequentiability_violations(span)
    if bad:
        raise CompositionError(bad[0][0], bad[0][1])
    total = (set(span.left_leg.ports.table) == set(span.left.outports)
             and set(span.right_leg.ports.table) == set(span.right.inports))
    result = pushout(span)
    op = SEQ_TOTAL if total else SEQ_PARTIAL
    return Composite(result.object, Node(op, left.tree, right.tree, span), result)


# -- parallel -------------------------------------------------------------------

def p_async(left, right) -> Composite:
    left, right = _lift(left), _lift(right)
    result = coproduct(left.computon, right.computon)
    return Composite(result.object, Node(ASYNC, left.tree, right.tree), result)


def mk_glue_for(parallel: Computon, out_label: str = "sync") -> tuple[Computon, Span]:
    """Glue primitive joining every control outport, and the span attaching it."""
    ctrl = [p for p in parallel.outports if parallel.colour.table[p] == CONTROL]
    if not ctrl:
        raise CompositionError("control-interface", "no control outport to synchronise")
    names = [parallel.labels[p] for p in ctrl]
    if out_label in names:
        raise CompositionError("labels", f"glue output label {out_label!r} clashes with an input")
    glue = primitive([(n, CONTROL) for n in names], [(out_label, CONTROL, GLUE_DEVICE, names)])
    apex = mk_trivial(names, [CONTROL] * len(names))
    span = Span(apex, from_trivial(apex, parallel, ctrl),
                from_trivial(apex, glue, range(len(names))))
    return glue, span


def sync(left, right, out_label: str = "sync") -> Composite:
    """Run both operands in parallel, then wait for all their control outputs."""
    par = p_async(left, right)
    glue, span = mk_glue_for(par.computon, out_label)
    return seq(par, Composite(glue, Leaf("glue", "primitive", glue)), span)


# -- branching ----------------------------------------------------------------------

def _marker_span(left: Composite, right: Composite, m_left: Marker, m_right: Marker, kind: str) -> Span:
    if m_left.kind != kind or m_right.kind != kind:
        raise CompositionError("marker", f"expected {kind}-markers")
    if m_left.apex != m_right.apex:
        raise CompositionError("apex", f"the two {kind}-markers have different sources")
    if m_left.target != left.computon or m_right.target != right.computon:
        raise CompositionError("operands", "markers do not target the given operands")
    return Span(m_left.apex, m_left.mono, m_right.mono)


def bra_open(left, right, m_left: Marker, m_right: Marker) -> Composite:
    """Share the inports of both operands; outports stay apart."""
    left, right = _lift(left), _lift(right)
    span = _marker_span(left, right, m_left, m_right, "in")
    result = pushout(span)
    return Composite(result.object, Node(BRA_OPEN, left.tree, right.tree, span), result)


def bra_closed(left, right, in_left: Marker, in_right: Marker,
               out_left: Marker, out_right: Marker) -> Composite:
    """Share both the inports and the outports of two connected operands."""
    left, right = _lift(left), _lift(right)
    for side, c in (("left", left.computon), ("right", right.computon)):
        if c.units == 0 or not is_connected(c):
            raise CompositionError("connected", f"the {side} operand is not a connected computon with units")
    ins = _marker_span(left, right, in_left, in_right, "in")
    outs = _marker_span(left, right, out_left, out_right, "out")
    apexes = coproduct(ins.apex, outs.apex)
    span = Span(
        apexes.object,
        unique_from_coproduct(apexes, in_left.mono, out_left.mono),
        unique_from_coproduct(apexes, in_right.mono, out_right.mono),
    )
    result = pushout(span)
    return Composite(result.object, Node(BRA_CLOSED, left.tree, right.tree, (ins, outs)), result)


# -- span and marker helpers -----------------------------------------------------------

def identity_trivial() -> Computon:
    """One control port; the two-sided unit for sequencing."""
    return mk_trivial(["go"], [CONTROL])


def _trivial_over(left: Computon, right: Computon, pairs, colours):
    pairs = [tuple(p) for p in pairs]
    if not pairs:
        raise CompositionError("span", "at least one port pair is needed")
    lp = [left.port(a) for a, _ in pairs]
    rp = [right.port(b) for _, b in pairs]
    cols = []
    for k, (p, q) in enumerate(zip(lp, rp)):
        cp, cq = left.colour.table[p], right.colour.table[q]
        if cp != cq:
            raise CompositionError("colour", f"{pairs[k][0]!r} has colour {cp} but {pairs[k][1]!r} has {cq}")
        if colours is not None and colours[k] != cp:
            raise CompositionError("colour", f"pair {k} declared colour {colours[k]}, ports have {cp}")
        cols.append(cp)
    apex = mk_trivial([a for a, _ in pairs], cols)
    return apex, lp, rp


def span_from_pairs(left: Computon, right: Computon, pairs: Sequence, colours=None) -> Span:
    """Span whose apex has one port per ``(left label, right label)`` pair."""
    apex, lp, rp = _trivial_over(left, right, pairs, colours)
    try:
        return Span(apex, from_trivial(apex, left, lp), from_trivial(apex, right, rp))
    except MorphismError as exc:
        raise CompositionError("span", str(exc)) from None


def control_span(left: Computon, right: Computon) -> Span:
    """Identify the first control outport of ``left`` with the first control inport of ``right``."""
    try:
        p = next(p for p in left.outports if left.colour.table[p] == CONTROL)
        q = next(q for q in right.inports if right.colour.table[q] == CONTROL)
    except StopIteration:
        raise CompositionError("control-interface", "an operand lacks a control interface port") from None
    return span_from_pairs(left, right, [(left.labels[p], right.labels[q])])


def marker_pair(left: Computon, right: Computon, kind: str, pairs=None, colours=None):
    """In- or out-markers of both operands over one shared trivial apex.

    Without ``pairs`` the interface ports are matched by equal label.
    """
    side = "inports" if kind == "in" else "outports"
    lint, rint = getattr(left, side), getattr(right, side)
    if pairs is None:
        rlabels = {right.labels[q] for q in rint}
        pairs = [(left.labels[p], left.labels[p]) for p in lint]
        if {b for _, b in pairs} != rlabels:
            raise CompositionError("marker", f"{side} labels of the operands do not match")
    apex, lp, rp = _trivial_over(left, right, pairs, colours)
    if len(set(lp)) != len(lp) or len(set(rp)) != len(rp):
        raise CompositionError("marker", "each interface port may appear in only one pair")
    build = mk_in_marker if kind == "in" else mk_out_marker
    try:
        return build(apex, left, lp), build(apex, right, rp)
    except MorphismError as exc:
        raise CompositionError("marker", str(exc)) from None


__all__ = [
    "ASYNC", "BRA_CLOSED", "BRA_OPEN", "SEQ_PARTIAL", "SEQ_TOTAL", "Composite", "Leaf", "Node",
    "atom", "bra_closed", "bra_open", "control_span", "identity_trivial", "is_sequentiable",
    "is_sound", "leaves", "marker_pair", "mk_glue_for", "operator_sequence", "p_async",
    "sequentiability_violations", "seq", "span_from_pairs", "sync",
]

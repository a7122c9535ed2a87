"""Seeded generators of computons, spans and operand tuples for the test suites."""
from __future__ import annotations

import itertools
import random

from computons.catalogue import adder, echo, factorial, multiplier, predecessor, successor
from computons.colimit import Span, coproduct
from computons.computon import CONTROL, Computon, mk_trivial, permuted, primitive
from computons.finset import FinMap
from computons.morphism import compose, from_trivial
from computons.operators import (Composite, atom, bra_open, control_span, marker_pair, p_async,
                                 seq, span_from_pairs, sync)

DEVICES = ["builtin:mul", "builtin:add", "builtin:succ", "builtin:pred", "builtin:fact",
           "http://devices.example/f", "https://devices.example/g"]
EPS = "builtin:epsilon"


# -- primitives ------------------------------------------------------------------------

def primitive_for(rng: random.Random, in_colours, out_colours, tag="") -> Computon:
    """Random primitive with the given input and output colour lists.

    Both lists must contain colour 0; ``len(out_colours) <= len(in_colours)``.
    The first control input feeds the first control output through the echo
    device; every other output gets at least one input.
    """
    in_colours, out_colours = list(in_colours), list(out_colours)
    assert CONTROL in in_colours and CONTROL in out_colours
    assert len(out_colours) <= len(in_colours)
    ins = [f"{tag}i{k}" for k in range(len(in_colours))]
    outs = [f"{tag}o{k}" for k in range(len(out_colours))]
    go = in_colours.index(CONTROL)
    done = out_colours.index(CONTROL)
    feeds = {k: [] for k in range(len(outs))}
    feeds[done].append(go)
    rest = [k for k in range(len(ins)) if k != go]
    rng.shuffle(rest)
    for o in range(len(outs)):
        if not feeds[o]:
            feeds[o].append(rest.pop())
    for k in rest:
        feeds[rng.randrange(len(outs))].append(k)
    outputs = []
    for o, col in enumerate(out_colours):
        dev = EPS if o == done else rng.choice(DEVICES)
        outputs.append((outs[o], col, dev, [ins[k] for k in sorted(feeds[o])]))
    c = primitive([(ins[k], in_colours[k]) for k in range(len(ins))], outputs)
    if rng.random() < 0.5:
        perm = list(range(c.ports))
        rng.shuffle(perm)
        c = permuted(c, ports=perm)
    return c


def random_colours(rng, n, colours):
    cols = [CONTROL] + [rng.randrange(colours) for _ in range(n - 1)]
    rng.shuffle(cols)
    return cols


def random_primitive(rng: random.Random, max_in=3, max_out=3, colours=3, tag="") -> Computon:
    n_in = rng.randint(1, max_in)
    n_out = rng.randint(1, min(max_out, n_in))
    return primitive_for(rng, random_colours(rng, n_in, colours),
                         random_colours(rng, n_out, colours), tag)


# -- composites -----------------------------------------------------------------------

def _apply_random_op(rng, a: Composite, b: Composite) -> Composite:
    op = rng.choice(["seq", "seq", "async", "sync", "open"])
    lc, rc = a.computon, b.computon
    if op == "seq":
        return seq(a, b, control_span(lc, rc))
    if op == "async":
        return p_async(a, b)
    if op == "sync":
        return sync(a, b, out_label=f"sync{rng.randrange(10**6)}")
    # open branching of a with a primitive sharing its inports, then b after it
    twin = atom(primitive_matching_inports(rng, lc), "twin")
    tc = twin.computon
    branched = bra_open(a, twin, *marker_pair(lc, tc, "in", colour_pairs(lc, lc.inports, tc, tc.inports)))
    return seq(branched, b, control_span(branched.computon, rc))


def primitive_matching_inports(rng, c: Computon) -> Computon:
    """Primitive whose inports, in order, have the colours of ``c``'s inports."""
    cols = [c.colour.table[p] for p in c.inports]
    outs = random_colours(rng, rng.randint(1, len(cols)), 3)
    return primitive_for(rng, cols, outs, tag="m")


def random_composite(rng: random.Random, leaves=None) -> Composite:
    """Sound composite over 1 to 4 random primitives."""
    leaves = leaves or rng.randint(1, 4)
    parts = [atom(random_primitive(rng, tag=f"p{k}"), f"p{k}") for k in range(leaves)]
    while len(parts) > 1:
        k = rng.randrange(len(parts) - 1)
        merged = _apply_random_op(rng, parts[k], parts[k + 1])
        parts[k:k + 2] = [merged]
    return parts[0]


# -- sequencing triples -------------------------------------------------------------------

def _colour_matching(left: Computon, right: Computon):
    """Bijection from left outports to right inports preserving colours, in port order."""
    return colour_pairs(left, left.outports, right, right.inports)


def colour_pairs(left: Computon, outs, right: Computon, ins):
    """Pair two port lists colour by colour, each in ascending order, as label pairs."""
    pairs = []
    for col in sorted({left.colour.table[p] for p in outs}):
        lo = [p for p in outs if left.colour.table[p] == col]
        ri = [q for q in ins if right.colour.table[q] == col]
        pairs += list(zip(lo, ri))
    return [(left.labels[p], right.labels[q]) for p, q in pairs]


def follower(rng, c: Computon, tag) -> Computon:
    """Primitive whose inports have exactly the colours of ``c``'s outports."""
    cols = [c.colour.table[p] for p in c.outports]
    outs = random_colours(rng, rng.randint(1, len(cols)), 3)
    return primitive_for(rng, cols, outs, tag=tag)


def total_span(left: Computon, right: Computon) -> Span:
    return span_from_pairs(left, right, _colour_matching(left, right))


def total_triple(rng: random.Random):
    """Operands a, b, c where both adjacent spans are total."""
    a = random_composite(rng, rng.randint(1, 2)) if rng.random() < 0.5 else atom(random_primitive(rng, tag="a"))
    b = follower(rng, a.computon, "b")
    c = follower(rng, b, "c")
    return a, atom(b, "b"), atom(c, "c")


def associate_both_ways(a: Composite, b: Composite, c: Composite):
    """Both bracketings of a total sequencing chain, using composed spans.

    ``rho1``: a -> b and ``rho2``: b -> c are total.  The left bracketing
    reuses rho2's apex with its left leg pushed along the right coleg of
    ``a;b``; the right bracketing reuses rho1's apex with its right leg
    pushed along the left coleg of ``b;c``.
    """
    rho1 = total_span(a.computon, b.computon)
    rho2 = total_span(b.computon, c.computon)
    ab = seq(a, b, rho1)
    bc = seq(b, c, rho2)
    rho3 = Span(rho2.apex, compose(rho2.left_leg, ab.cocone.coleg_right), rho2.right_leg)
    rho4 = Span(rho1.apex, rho1.left_leg, compose(rho1.right_leg, bc.cocone.coleg_left))
    left = seq(ab, c, rho3)
    right = seq(a, bc, rho4)
    return left, right, (ab, bc)


# -- spans for pushability ---------------------------------------------------------------------

def trivial_span(rng: random.Random, left: Computon, right: Computon):
    """Trivial apex whose ports land on arbitrary same-colour ports of both operands."""
    shared = sorted(set(left.colour.table) & set(right.colour.table))
    n = rng.randint(1, 3)
    cols, lp, rp = [], [], []
    for k in range(n):
        col = CONTROL if k == 0 else rng.choice(shared)
        cols.append(col)
        lp.append(rng.choice([p for p in range(left.ports) if left.colour.table[p] == col]))
        rp.append(rng.choice([q for q in range(right.ports) if right.colour.table[q] == col]))
    apex = mk_trivial([f"x{k}" for k in range(n)], cols)
    return Span(apex, from_trivial(apex, left, lp), from_trivial(apex, right, rp))


def coleg_span(rng: random.Random):
    """Non-trivial apex: a primitive embedded into two sequencing results."""
    p = random_primitive(rng, tag="p")
    q = follower(rng, p, "q")
    needs = [p.colour.table[x] for x in p.inports]
    r = primitive_for(rng, needs + random_colours(rng, rng.randint(1, 2), 3), needs, tag="r")
    s = follower(rng, p, "s")
    after = seq(atom(p), atom(q), total_span(p, q))         # p then q
    before = seq(atom(r), atom(p), total_span(r, p))        # r then p
    other = seq(atom(p), atom(s), total_span(p, s))
    kind = rng.choice(["pushable", "clash", "swap"])
    if kind == "pushable":
        return Span(p, after.cocone.coleg_left, before.cocone.coleg_right)
    if kind == "swap":
        return Span(p, before.cocone.coleg_right, after.cocone.coleg_left)
    return Span(p, after.cocone.coleg_left, other.cocone.coleg_left)


def coproduct_span(rng: random.Random):
    """Apex placed into two coproducts through the canonical injections."""
    p = random_primitive(rng, tag="p")
    left = coproduct(p, random_primitive(rng, tag="l"))
    right = coproduct(random_primitive(rng, tag="r"), p)
    return Span(p, left.coleg_left, right.coleg_right)


def mixed_span(rng: random.Random) -> Span:
    kind = rng.random()
    if kind < 0.6:
        left = random_composite(rng, rng.randint(1, 3)).computon
        right = random_composite(rng, rng.randint(1, 3)).computon
        return trivial_span(rng, left, right)
    if kind < 0.85:
        return coleg_span(rng)
    return coproduct_span(rng)


# -- small exhaustive families ---------------------------------------------------------------------

def small_candidates(max_ports=3, colours=(0, 1, 2)):
    """Every trivial and primitive computon with at most ``max_ports`` ports, up to port order."""
    out = []
    for n in range(1, max_ports + 1):
        for cols in itertools.combinations_with_replacement(colours, n):
            if CONTROL in cols:
                out.append(mk_trivial([f"t{k}" for k in range(n)], cols))
    for n_in in range(1, max_ports):
        for n_out in range(1, max_ports - n_in + 1):
            for ins in itertools.combinations_with_replacement(colours, n_in):
                for outs in itertools.combinations_with_replacement(colours, n_out):
                    if CONTROL not in ins or CONTROL not in outs or n_out > n_in:
                        continue
                    out.extend(_all_primitives(ins, outs))
    return out


def _all_primitives(in_cols, out_cols):
    """All primitives with these colours and every surjective feeding pattern."""
    found = []
    ins = [f"i{k}" for k in range(len(in_cols))]
    outs = [f"o{k}" for k in range(len(out_cols))]
    for feed in itertools.product(range(len(outs)), repeat=len(ins)):
        if set(feed) != set(range(len(outs))):
            continue
        outputs = [(outs[o], out_cols[o], EPS if out_cols[o] == CONTROL else "builtin:succ",
                    [ins[k] for k in range(len(ins)) if feed[k] == o]) for o in range(len(outs))]
        try:
            found.append(primitive(list(zip(ins, in_cols)), outputs))
        except Exception:
            continue
    return found


def interface_bijections(left: Computon, right: Computon, kind: str):
    """All colour-preserving bijections between the in- (or out-) ports, as label pairs."""
    side = "inports" if kind == "in" else "outports"
    lp, rp = list(getattr(left, side)), list(getattr(right, side))
    if len(lp) != len(rp):
        return
    for perm in itertools.permutations(rp):
        if all(left.colour.table[p] == right.colour.table[q] for p, q in zip(lp, perm)):
            yield [(left.labels[p], right.labels[q]) for p, q in zip(lp, perm)]


# -- executable composites -----------------------------------------------------------------------------

def executable_primitives():
    return {
        "mul": multiplier(), "add": adder(), "succ": successor(),
        "pred": predecessor(out_colour=1), "fact": factorial(), "echo": echo(1),
    }


def random_executable(rng: random.Random, leaves=None) -> Composite:
    """Sound, runnable composite over the builtin catalogue, joined by control spans."""
    cat = executable_primitives()
    leaves = leaves or rng.randint(1, 4)
    names = [rng.choice(sorted(cat)) for _ in range(leaves)]
    parts = [atom(cat[n], n) for n in names]
    while len(parts) > 1:
        k = rng.randrange(len(parts) - 1)
        a, b = parts[k], parts[k + 1]
        op = rng.choice(["seq", "async", "sync"])
        if op == "seq":
            merged = seq(a, b, control_span(a.computon, b.computon))
        elif op == "async":
            merged = p_async(a, b)
        else:
            merged = sync(a, b, out_label=f"sync{rng.randrange(10**6)}")
        parts[k:k + 2] = [merged]
    return parts[0]


def random_inputs(rng: random.Random, c: Computon) -> dict:
    values = {}
    for p in c.inports:
        col = c.colour.table[p]
        values[c.labels[p]] = "*" if col == CONTROL else (rng.randint(0, 6) if col == 1 else rng.uniform(-5, 5))
    return values


def closed_partner(rng: random.Random, c: Computon):
    """Primitive with the same in- and out-interface colours as ``c``, if one exists."""
    ins = [c.colour.table[p] for p in c.inports]
    outs = [c.colour.table[p] for p in c.outports]
    if len(outs) > len(ins):
        return None
    return primitive_for(rng, ins, outs, tag="w")


def loop_computon() -> Computon:
    """Hand-assembled two-unit computon whose second unit feeds only itself.

    Unit 0 echoes ``go`` to ``done``; unit 1 reads and writes the interior
    control port ``e``.  It validates, but ``e`` never reaches an outport.
    """
    return Computon(
        units=2, ports=3, inflows=2, outflows=2, types=1,
        src=FinMap([0, 2], 3), tgt=FinMap([1, 2], 3),
        out_unit=FinMap([0, 1], 2), in_unit=FinMap([0, 1], 2),
        colour=FinMap([0, 0, 0], 1), relate=FinMap([0, 1], 2),
        device=[EPS, EPS], labels=["go", "done", "e"],
    )


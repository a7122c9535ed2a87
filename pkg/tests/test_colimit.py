import random

import pytest

from computons.catalogue import adder, multiplier, successor
from computons.colimit import Span, coproduct, is_pushable, pushout, unique_from_coproduct
from computons.computon import mk_trivial, validate
from computons.errors import MorphismError, NotPushableError
from computons.morphism import compose, from_trivial, identity, is_monomorphism
from computons.operators import seq, span_from_pairs

import _gen
from oracles import mediating_maps

COMPONENTS = ("units", "ports", "inflows", "outflows")


def fig1a_span():
    m, a = multiplier(), adder()
    return span_from_pairs(m, a, [("done", "go"), ("prod", "x")])


def sizes(c):
    return (c.units, c.ports, c.inflows, c.outflows, c.types)


def test_fig1a_pushout_counts():
    result = pushout(fig1a_span())
    assert sizes(result.object) == (2, 8, 6, 4, 3)
    assert validate(result.object).ok


def test_fig2a_coproduct_counts():
    result = coproduct(multiplier(), adder())
    assert result.object.ports == 10
    assert result.object.units == 2
    assert result.object.inports == (0, 1, 2, 5, 6, 7)


def test_coproduct_with_one_port_trivial():
    m = multiplier()
    result = coproduct(m, mk_trivial(["extra"], [0]))
    assert result.object.ports == m.ports + 1
    assert result.object.units == m.units


def test_coproduct_with_itself_doubles():
    rng = random.Random(5)
    for _ in range(20):
        c = _gen.random_composite(rng).computon
        d = coproduct(c, c).object
        assert sizes(d)[:4] == tuple(2 * n for n in sizes(c)[:4])
        assert d.types == c.types


def test_interior_port_gaining_flows_is_not_pushable():
    comp = seq(multiplier(), adder(), fig1a_span())
    inner = comp.computon
    # glue a writer onto the interior port that carries the product
    prod = next(p for p in range(inner.ports) if inner.labels[p] == "prod")
    assert prod not in inner.inports and prod not in inner.outports
    s = successor()
    apex = mk_trivial(["k", "v"], [0, 1])
    span = Span(apex, from_trivial(apex, inner, [inner.port("done"), prod]),
                from_trivial(apex, s, [s.port("go"), s.port("out")]))
    assert not is_pushable(span)
    with pytest.raises(NotPushableError) as err:
        pushout(span)
    assert "boundary" in err.value.clauses


def test_pushout_colegs_commute_and_are_monic():
    rng = random.Random(31)
    done = 0
    for _ in range(300):
        span = _gen.mixed_span(rng)
        if not is_pushable(span):
            continue
        result = pushout(span)
        assert compose(span.left_leg, result.coleg_left) == compose(span.right_leg, result.coleg_right)
        if is_monomorphism(span.left_leg) and is_monomorphism(span.right_leg):
            assert is_monomorphism(result.coleg_left) and is_monomorphism(result.coleg_right)
        done += 1
    assert done > 100


def _check_mediating(result, cocone_left, cocone_right, expected):
    for name in COMPONENTS:
        sols = mediating_maps(
            getattr(result.coleg_left, name).table, getattr(result.coleg_right, name).table,
            getattr(cocone_left, name).table, getattr(cocone_right, name).table,
            getattr(result.object, name), getattr(cocone_left.target, name))
        assert sols == [tuple(getattr(expected, name).table)]


def test_universal_property_against_cocones():
    rng = random.Random(41)
    for _ in range(40):
        left = _gen.random_composite(rng)
        right = _gen.follower(rng, left.computon, tag="r")
        span = _gen.total_span(left.computon, right)
        result = pushout(span)
        # the pushout itself is a cocone; it mediates through the identity
        _check_mediating(result, result.coleg_left, result.coleg_right, identity(result.object))
        # a larger composite containing the pushout is another cocone
        after = _gen.follower(rng, result.object, tag="z")
        outer = seq(result.object, after, _gen.total_span(result.object, after))
        into = outer.cocone.coleg_left
        _check_mediating(result, compose(result.coleg_left, into),
                         compose(result.coleg_right, into), into)


def test_coproduct_injections_partition():
    rng = random.Random(2)
    for _ in range(50):
        a, b = _gen.random_primitive(rng), _gen.random_primitive(rng)
        result = coproduct(a, b)
        for name in COMPONENTS:
            left = set(getattr(result.coleg_left, name).table)
            right = set(getattr(result.coleg_right, name).table)
            assert not left & right
            assert left | right == set(range(getattr(result.object, name)))


def test_unique_from_coproduct():
    span = fig1a_span()
    result = pushout(span)
    copr = coproduct(span.left, span.right)
    h = unique_from_coproduct(copr, result.coleg_left, result.coleg_right)
    assert compose(copr.coleg_left, h) == result.coleg_left
    assert compose(copr.coleg_right, h) == result.coleg_right
    with pytest.raises(MorphismError):
        unique_from_coproduct(copr, result.coleg_left, identity(span.right))


def test_unique_from_coproduct_matches_oracle():
    rng = random.Random(17)
    for _ in range(40):
        left = _gen.random_composite(rng)
        right = _gen.follower(rng, left.computon, tag="r")
        result = pushout(_gen.total_span(left.computon, right))
        copr = coproduct(left.computon, right)
        h = unique_from_coproduct(copr, result.coleg_left, result.coleg_right)
        _check_mediating(copr, result.coleg_left, result.coleg_right, h)

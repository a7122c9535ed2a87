"""Ready-made primitives for the builtin devices.

Colour 1 is a nonnegative integer and colour 2 a float under the default
type universe.  Every primitive has a ``go`` control inport and a ``done``
control outport driven by the echo device.
"""
from __future__ import annotations

from .computon import Computon, primitive

EPSILON = "builtin:epsilon"


def _unary(device: str, out_colour: int) -> Computon:
    return primitive(
        [("go", 0), ("n", 1)],
        [("done", 0, EPSILON, ["go"]), ("out", out_colour, device, ["n"])],
    )


def multiplier() -> Computon:
    return primitive(
        [("go", 0), ("a", 1), ("b", 1)],
        [("done", 0, EPSILON, ["go"]), ("prod", 1, "builtin:mul", ["a", "b"])],
    )


def adder() -> Computon:
    """Adds an integer ``x`` to a float ``c``."""
    return primitive(
        [("go", 0), ("x", 1), ("c", 2)],
        [("done", 0, EPSILON, ["go"]), ("sum", 2, "builtin:add", ["x", "c"])],
    )


def successor() -> Computon:
    return _unary("builtin:succ", 1)


def predecessor(out_colour: int = 2) -> Computon:
    # colour 2 keeps the two outports apart when branching against successor
    return _unary("builtin:pred", out_colour)


def factorial() -> Computon:
    return _unary("builtin:fact", 1)


def echo(inputs: int = 1) -> Computon:
    """Pure-control primitive joining ``inputs`` control signals."""
    names = [f"go{k}" if inputs > 1 else "go" for k in range(inputs)]
    return primitive([(n, 0) for n in names], [("done", 0, EPSILON, names)])


PRIMITIVES = {
    "multiplier": multiplier,
    "adder": adder,
    "successor": successor,
    "predecessor": predecessor,
    "factorial": factorial,
}

"""Runtime values and the type universe that gives colours a meaning."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError

TYPE_NAMES = ("control", "int", "float", "text", "bool")


class _Signal:
    __slots__ = ()

    def __repr__(self):
        return "*"

    def __reduce__(self):
        return "SIGNAL"


class _Absent:
    __slots__ = ()

    def __repr__(self):
        return "⊥"

    def __bool__(self):
        return False

    def __reduce__(self):
        return "ABSENT"


SIGNAL = _Signal()
"""The single value of the control type."""

ABSENT = _Absent()
"""Marks a port that currently holds no value."""


def inhabits(type_name: str, v) -> bool:
    if type_name == "control":
        return v is SIGNAL
    if type_name == "int":
        return isinstance(v, int) and not isinstance(v, bool)
    if type_name == "float":
        return isinstance(v, float)
    if type_name == "text":
        return isinstance(v, str)
    if type_name == "bool":
        return isinstance(v, bool)
    raise DomainError(f"unknown type {type_name!r}")


def coerce(type_name: str, v):
    """Return ``v`` as a value of ``type_name``, or raise DomainError.

    Two conveniences are allowed: the string ``"*"`` stands for the control
    signal, and integers are promoted into float ports.
    """
    if type_name == "control" and v == "*":
        return SIGNAL
    if type_name == "float" and isinstance(v, int) and not isinstance(v, bool):
        return float(v)
    if not inhabits(type_name, v):
        raise DomainError(f"{v!r} is not a value of type {type_name}")
    return v


def type_of(v) -> str:
    if v is SIGNAL:
        return "control"
    for name in ("bool", "int", "float", "text"):
        if inhabits(name, v):
            return name
    raise DomainError(f"{v!r} has no type in the universe")


@dataclass(frozen=True)
class TypeUniverse:
    """Type name for each colour; colour 0 is always control."""

    types: tuple

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        if not self.types or self.types[0] != "control":
            raise DomainError("colour 0 must be the control type")
        for t in self.types:
            if t not in TYPE_NAMES:
                raise DomainError(f"unknown type {t!r}")

    @classmethod
    def default(cls, colours: int = len(TYPE_NAMES)) -> TypeUniverse:
        """Control, int, float, text, bool for colours 0 to 4."""
        if colours > len(TYPE_NAMES):
            raise DomainError(f"the default universe covers {len(TYPE_NAMES)} colours, not {colours}")
        return cls(TYPE_NAMES[:max(colours, 1)])

    def __getitem__(self, colour: int) -> str:
        if not 0 <= colour < len(self.types):
            raise DomainError(f"colour {colour} has no type in the universe")
        return self.types[colour]

    def __len__(self):
        return len(self.types)


def encode(v):
    """JSON-friendly form: the signal becomes ``"*"`` and absence becomes ``None``."""
    if v is SIGNAL:
        return "*"
    if v is ABSENT:
        return None
    return v

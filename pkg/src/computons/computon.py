"""The computon data model: structure, validation, interfaces, connectivity."""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence
from urllib.parse import urlparse

from .errors import ConstructionError, DomainError
from .finset import FinMap, is_injective

CONTROL = 0

_BUILTIN_RE = re.compile(r"^builtin:[A-Za-z0-9_.\-]+$")


def is_device_id(text) -> bool:
    if not isinstance(text, str) or not text:
        return False
    if text.startswith("builtin:"):
        return bool(_BUILTIN_RE.match(text))
    parsed = urlparse(text)
    return parsed.scheme in ("http", "https") and bool(parsed.netloc)


@dataclass(frozen=True)
class Computon:
    """Ports and units joined by inflows (port -> unit) and outflows (unit -> port).

    ``relate`` sends each inflow to the outflow whose device consumes it;
    ``device`` names the device behind each outflow.  Colour 0 is control.
    """

    units: int
    ports: int
    inflows: int
    outflows: int
    types: int
    src: FinMap
    tgt: FinMap
    out_unit: FinMap
    in_unit: FinMap
    colour: FinMap
    relate: FinMap
    device: tuple = ()
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "device", tuple(self.device))
        object.__setattr__(self, "labels", tuple(self.labels))

    @cached_property
    def inports(self) -> tuple[int, ...]:
        targeted = set(self.tgt.table)
        return tuple(p for p in range(self.ports) if p not in targeted)

    @cached_property
    def outports(self) -> tuple[int, ...]:
        read = set(self.src.table)
        return tuple(p for p in range(self.ports) if p not in read)

    @property
    def devices(self) -> frozenset:
        return frozenset(self.device)

    def label_index(self) -> dict[str, int]:
        return {lab: p for p, lab in enumerate(self.labels)}

    def port(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DomainError(f"no port labelled {label!r}") from None

    def is_control(self, p: int) -> bool:
        return self.colour(p) == CONTROL

    @cached_property
    def _adjacency(self):
        unit_pre = [set() for _ in range(self.units)]
        unit_post = [set() for _ in range(self.units)]
        port_pre = [set() for _ in range(self.ports)]
        port_post = [set() for _ in range(self.ports)]
        for i in range(self.inflows):
            p, u = self.src.table[i], self.in_unit.table[i]
            unit_pre[u].add(p)
            port_post[p].add(u)
        for o in range(self.outflows):
            p, u = self.tgt.table[o], self.out_unit.table[o]
            unit_post[u].add(p)
            port_pre[p].add(u)
        freeze = lambda sets: tuple(frozenset(x) for x in sets)
        return freeze(unit_pre), freeze(unit_post), freeze(port_pre), freeze(port_post)

    def _unit(self, u):
        if not 0 <= u < self.units:
            raise DomainError(f"unit {u} out of range (|U|={self.units})")

    def _port(self, p):
        if not 0 <= p < self.ports:
            raise DomainError(f"port {p} out of range (|P|={self.ports})")

    def pre_set(self, u: int) -> list[int]:
        """Ports read by unit ``u``."""
        self._unit(u)
        return sorted(self._adjacency[0][u])

    def post_set(self, u: int) -> list[int]:
        """Ports written by unit ``u``."""
        self._unit(u)
        return sorted(self._adjacency[1][u])

    def port_pre(self, p: int) -> list[int]:
        """Units writing port ``p``."""
        self._port(p)
        return sorted(self._adjacency[2][p])

    def port_post(self, p: int) -> list[int]:
        """Units reading port ``p``."""
        self._port(p)
        return sorted(self._adjacency[3][p])

    def describe(self) -> str:
        return (f"Computon(|U|={self.units}, |P|={self.ports}, |I|={self.inflows}, "
                f"|O|={self.outflows}, |Σ|={self.types})")


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    element: tuple = ()

    def __str__(self):
        where = f" at {self.element}" if self.element else ""
        return f"[{self.rule}]{where} {self.message}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def rules(self) -> set:
        return {v.rule for v in self.violations}

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "ok" if self.ok else "\n".join(str(v) for v in self.violations)


def _shape_violations(c: Computon) -> list[Violation]:
    expected = {
        "src": (c.inflows, c.ports),
        "tgt": (c.outflows, c.ports),
        "out_unit": (c.outflows, c.units),
        "in_unit": (c.inflows, c.units),
        "colour": (c.ports, c.types),
        "relate": (c.inflows, c.outflows),
    }
    out = []
    for name, (dom, cod) in expected.items():
        f = getattr(c, name)
        if not isinstance(f, FinMap):
            out.append(Violation("shape", f"{name} is not a finite map"))
        elif (f.dom, f.cod) != (dom, cod):
            out.append(Violation("shape", f"{name} has type {f.dom}->{f.cod}, expected {dom}->{cod}"))
    if len(c.device) != c.outflows:
        out.append(Violation("shape", f"{len(c.device)} device ids for {c.outflows} outflows"))
    if len(c.labels) != c.ports:
        out.append(Violation("shape", f"{len(c.labels)} labels for {c.ports} ports"))
    return out


def validate(c: Computon) -> ValidationReport:
    """Check every structural restriction; never raises."""
    shape = _shape_violations(c)
    if shape:
        return ValidationReport(shape)
    v = []
    if c.ports < 1:
        v.append(Violation("ports-nonempty", "a computon needs at least one port"))
    if c.types < 1:
        v.append(Violation("control-type", "the type set must contain the control colour 0"))

    for name in ("out_unit", "in_unit", "relate"):
        f = getattr(c, name)
        missing = sorted(set(range(f.cod)) - set(f.table))
        for y in missing:
            v.append(Violation("surjectivity", f"{name} misses {y}", (name, y)))

    ctrl_in = {c.in_unit.table[i] for i in range(c.inflows) if c.colour.table[c.src.table[i]] == CONTROL}
    ctrl_out = {c.out_unit.table[o] for o in range(c.outflows) if c.colour.table[c.tgt.table[o]] == CONTROL}
    for u in range(c.units):
        if u not in ctrl_in:
            v.append(Violation("unit-control", "unit has no control inflow", ("unit", u)))
        if u not in ctrl_out:
            v.append(Violation("unit-control", "unit has no control outflow", ("unit", u)))

    for i in range(c.inflows):
        if c.out_unit.table[c.relate.table[i]] != c.in_unit.table[i]:
            v.append(Violation(
                "device-locality",
                f"inflow feeds outflow {c.relate.table[i]} of another unit",
                ("inflow", i)))

    if c.ports >= 1:
        if not any(c.colour.table[p] == CONTROL for p in c.inports):
            v.append(Violation("control-interface", "no control inport"))
        if not any(c.colour.table[p] == CONTROL for p in c.outports):
            v.append(Violation("control-interface", "no control outport"))

    seen = {}
    for p, lab in enumerate(c.labels):
        if not isinstance(lab, str) or not lab:
            v.append(Violation("labels", "port label must be a non-empty string", ("port", p)))
        elif lab in seen:
            v.append(Violation("labels", f"label {lab!r} already used by port {seen[lab]}", ("port", p)))
        else:
            seen[lab] = p
    for o, dev in enumerate(c.device):
        if not is_device_id(dev):
            v.append(Violation("device-id", f"{dev!r} is neither builtin:<name> nor an http(s) URL",
                               ("outflow", o)))
    return ValidationReport(v)


def ensure_valid(c: Computon) -> Computon:
    report = validate(c)
    if not report.ok:
        first = report.violations[0]
        raise ConstructionError(first.rule, str(report))
    return c


def is_connected(c: Computon) -> bool:
    """Every inport and every port read by a unit reaches an outport through a unit.

    A computon without units is treated as vacuously connected.
    """
    if c.units == 0:
        return True
    reads = [[] for _ in range(c.ports)]
    for i in range(c.inflows):
        reads[c.src.table[i]].append(c.in_unit.table[i])
    writes = [[] for _ in range(c.units)]
    for o in range(c.outflows):
        writes[c.out_unit.table[o]].append(c.tgt.table[o])
    outports = set(c.outports)

    def reaches_outport(p):
        seen_units, seen_ports = set(), set()
        queue = deque([p])
        while queue:
            q = queue.popleft()
            for u in reads[q]:
                if u in seen_units:
                    continue
                seen_units.add(u)
                for r in writes[u]:
                    if r in outports:
                        return True
                    if r not in seen_ports:
                        seen_ports.add(r)
                        queue.append(r)
        return False

    starts = set(c.inports) | set(c.src.table)
    return all(reaches_outport(p) for p in starts)


def is_trivial(c: Computon) -> bool:
    return c.units == 0 and c.inflows == 0 and c.outflows == 0


def is_primitive(c: Computon) -> bool:
    return (c.units == 1 and c.inflows + c.outflows == c.ports
            and is_injective(c.src) and is_injective(c.tgt))


def classify(c: Computon) -> str:
    if is_trivial(c):
        return "trivial"
    if is_primitive(c):
        return "primitive"
    return "composite"


def _types_for(colours, types):
    needed = max(colours, default=0) + 1
    if types is None:
        return needed
    if types < needed:
        raise ConstructionError("shape", f"colour {needed - 1} does not fit in {types} types")
    return types


def mk_trivial(labels: Sequence[str], colours: Sequence[int], types: int | None = None) -> Computon:
    labels, colours = list(labels), list(colours)
    if len(labels) != len(colours):
        raise ConstructionError("shape", "labels and colours differ in length")
    if not labels:
        raise ConstructionError("ports-nonempty", "a trivial computon needs at least one port")
    n = _types_for(colours, types)
    c = Computon(
        units=0, ports=len(labels), inflows=0, outflows=0, types=n,
        src=FinMap.empty(len(labels)), tgt=FinMap.empty(len(labels)),
        out_unit=FinMap.empty(0), in_unit=FinMap.empty(0),
        colour=FinMap(colours, n), relate=FinMap.empty(0),
        device=(), labels=labels,
    )
    return ensure_valid(c)


def mk_primitive(*, src, tgt, colour, relate, device, labels, types=None) -> Computon:
    """Build a one-unit computon from raw maps and check it is primitive."""
    src, tgt, colour, relate = list(src), list(tgt), list(colour), list(relate)
    nports = len(colour)
    n = _types_for(colour, types)
    try:
        c = Computon(
            units=1, ports=nports, inflows=len(src), outflows=len(tgt), types=n,
            src=FinMap(src, nports), tgt=FinMap(tgt, nports),
            out_unit=FinMap([0] * len(tgt), 1), in_unit=FinMap([0] * len(src), 1),
            colour=FinMap(colour, n), relate=FinMap(relate, len(tgt)),
            device=device, labels=labels,
        )
    except DomainError as exc:
        raise ConstructionError("shape", str(exc)) from None
    ensure_valid(c)
    if len(src) + len(tgt) != nports:
        raise ConstructionError("primitive", "ports must be exactly one per flow")
    if not is_injective(c.src):
        raise ConstructionError("primitive", "two inflows read the same port")
    if not is_injective(c.tgt):
        raise ConstructionError("primitive", "two outflows write the same port")
    return c


def primitive(inputs, outputs, types=None) -> Computon:
    """Friendlier primitive builder.

    ``inputs`` is a list of ``(label, colour)``; ``outputs`` a list of
    ``(label, colour, device, [input labels read by that device])``.
    Input ports come first, then output ports, in the given order.
    """
    in_labels = [lab for lab, _ in inputs]
    index = {lab: k for k, lab in enumerate(in_labels)}
    relate = [None] * len(inputs)
    for o, (lab, _, _, reads) in enumerate(outputs):
        for r in reads:
            if r not in index:
                raise ConstructionError("shape", f"output {lab!r} reads unknown input {r!r}")
            if relate[index[r]] is not None:
                raise ConstructionError("shape", f"input {r!r} feeds more than one device")
            relate[index[r]] = o
    for k, o in enumerate(relate):
        if o is None:
            raise ConstructionError("surjectivity", f"input {in_labels[k]!r} feeds no device")
    nin = len(inputs)
    return mk_primitive(
        src=range(nin),
        tgt=range(nin, nin + len(outputs)),
        colour=[col for _, col in inputs] + [o[1] for o in outputs],
        relate=relate,
        device=[o[2] for o in outputs],
        labels=in_labels + [o[0] for o in outputs],
        types=types,
    )


def permuted(c: Computon, units=None, ports=None, inflows=None, outflows=None) -> Computon:
    """Renumber components; each permutation maps old index -> new index."""
    pu = list(units) if units is not None else list(range(c.units))
    pp = list(ports) if ports is not None else list(range(c.ports))
    pi = list(inflows) if inflows is not None else list(range(c.inflows))
    po = list(outflows) if outflows is not None else list(range(c.outflows))

    def move(values, perm_dom, perm_cod):
        out = [0] * len(values)
        for x, v in enumerate(values):
            out[perm_dom[x]] = perm_cod[v] if perm_cod is not None else v
        return out

    src = move(c.src.table, pi, pp)
    tgt = move(c.tgt.table, po, pp)
    out_unit = move(c.out_unit.table, po, pu)
    in_unit = move(c.in_unit.table, pi, pu)
    colour = move(c.colour.table, pp, None)
    relate = move(c.relate.table, pi, po)
    device = [None] * c.outflows
    for o, d in enumerate(c.device):
        device[po[o]] = d
    labels = [None] * c.ports
    for p, lab in enumerate(c.labels):
        labels[pp[p]] = lab
    return Computon(
        c.units, c.ports, c.inflows, c.outflows, c.types,
        FinMap(src, c.ports), FinMap(tgt, c.ports), FinMap(out_unit, c.units),
        FinMap(in_unit, c.units), FinMap(colour, c.types), FinMap(relate, c.outflows),
        device, labels,
    )

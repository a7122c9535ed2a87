"""Step-synchronous interpreter for sound computons.

At each step every enabled unit is a candidate; enabled units that read
exactly the same ports compete and one of them is picked with a seeded
random generator.  The picked (ready) units then fire together: they
consume their inputs, signal their control outputs and write their device
results.
"""
from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

from .computon import Computon, validate
from .devnet import Arg, DeviceRegistry
from .errors import DeviceError, DomainError, ExecutionError, InputError, NonTerminationError
from .operators import Composite, atom, is_sound
from .values import ABSENT, SIGNAL, TypeUniverse, coerce, encode, inhabits

DEFAULT_MAX_STEPS = 10_000


@dataclass(frozen=True)
class CompiledOutflow:
    index: int
    unit: int
    device: str
    args: tuple          # argument ports, ascending
    arg_labels: tuple
    target: int


@dataclass(frozen=True)
class CompiledComputon:
    computon: Computon
    universe: TypeUniverse
    port_types: tuple
    inports: tuple
    outports: tuple
    control: tuple       # control mask per port
    unit_pre: tuple      # per unit, ascending port tuple
    unit_post: tuple
    unit_outflows: tuple  # per unit, tuple of CompiledOutflow

    @property
    def labels(self) -> tuple:
        return self.computon.labels


def compile_computon(c: Computon, universe: TypeUniverse | None = None) -> CompiledComputon:
    report = validate(c)
    if not report.ok:
        raise ExecutionError(f"computon does not validate:\n{report}")
    universe = universe or TypeUniverse.default(c.types)
    if len(universe) < c.types:
        raise ExecutionError(f"type universe covers {len(universe)} colours, computon uses {c.types}")
    port_types = tuple(universe[c.colour.table[p]] for p in range(c.ports))

    reads = [[] for _ in range(c.outflows)]
    for i in range(c.inflows):
        reads[c.relate.table[i]].append(c.src.table[i])
    per_unit = [[] for _ in range(c.units)]
    for o in range(c.outflows):
        args = tuple(sorted(set(reads[o])))
        per_unit[c.out_unit.table[o]].append(CompiledOutflow(
            o, c.out_unit.table[o], c.device[o], args,
            tuple(c.labels[p] for p in args), c.tgt.table[o]))

    cc = CompiledComputon(
        computon=c, universe=universe, port_types=port_types,
        inports=tuple(c.inports), outports=tuple(c.outports),
        control=tuple(t == "control" for t in port_types),
        unit_pre=tuple(tuple(c.pre_set(u)) for u in range(c.units)),
        unit_post=tuple(tuple(c.post_set(u)) for u in range(c.units)),
        unit_outflows=tuple(tuple(x) for x in per_unit),
    )
    for u in range(c.units):
        from_flows = {p for o in cc.unit_outflows[u] for p in o.args}
        assert from_flows <= set(cc.unit_pre[u]), "outflow arguments escape the unit pre-set"
    return cc


@dataclass(frozen=True)
class ExecState:
    time: int
    values: tuple

    def by_label(self, labels) -> dict:
        return {lab: self.values[p] for p, lab in enumerate(labels)}


@dataclass(frozen=True)
class TraceEntry:
    time: int
    ready: tuple       # units fired on the transition out of this state
    values: tuple


@dataclass
class Trace:
    labels: tuple
    entries: list = field(default_factory=list)

    def to_jsonl(self) -> str:
        lines = []
        for e in self.entries:
            ports = {lab: encode(v) for lab, v in zip(self.labels, e.values)}
            lines.append(json.dumps({"time": e.time, "ready": list(e.ready), "ports": ports},
                                    sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl())


def initial_state(cc: CompiledComputon, inputs: Mapping[str, object]) -> ExecState:
    labels = cc.labels
    wanted = {labels[p]: p for p in cc.inports}
    missing = sorted(set(wanted) - set(inputs))
    if missing:
        raise InputError(f"uncovered inport(s): {', '.join(missing)}")
    extra = sorted(set(inputs) - set(wanted))
    if extra:
        raise InputError(f"unknown input(s): {', '.join(extra)}")
    values = [ABSENT] * len(labels)
    for lab, p in wanted.items():
        try:
            values[p] = coerce(cc.port_types[p], inputs[lab])
        except DomainError as exc:
            raise InputError(f"input {lab!r}: {exc}") from None
    return ExecState(0, tuple(values))


def enabled_units(cc: CompiledComputon, state: ExecState) -> list[int]:
    vals = state.values
    return [u for u, pre in enumerate(cc.unit_pre) if all(vals[p] is not ABSENT for p in pre)]


def ready_units(cc: CompiledComputon, state: ExecState, rng: random.Random) -> tuple:
    """One representative per class of enabled units sharing a pre-set."""
    classes: dict = {}
    for u in enabled_units(cc, state):
        classes.setdefault(cc.unit_pre[u], []).append(u)
    picked = []
    for members in sorted(classes.values()):
        picked.append(members[0] if len(members) == 1 else rng.choice(members))
    return tuple(sorted(picked))


def evaluate(cc: CompiledComputon, state: ExecState, flow: CompiledOutflow, devices: DeviceRegistry):
    args = []
    for p, lab in zip(flow.args, flow.arg_labels):
        v = state.values[p]
        if v is ABSENT:
            raise ExecutionError(f"outflow {flow.index}: argument port {lab!r} is empty")
        args.append(Arg(lab, cc.port_types[p], v))
    result = devices.invoke(flow.device, args)
    want = cc.port_types[flow.target]
    try:
        return coerce(want, result) if want == "float" else _checked(want, result)
    except DomainError:
        raise ExecutionError(
            f"outflow {flow.index} ({flow.device}) returned {result!r}, "
            f"which is not a {want} for port {cc.labels[flow.target]!r}") from None


def _checked(type_name, v):
    if not inhabits(type_name, v):
        raise DomainError(f"{v!r} is not a {type_name}")
    return v


def step(cc: CompiledComputon, state: ExecState, rng: random.Random, devices: DeviceRegistry,
         pool: ThreadPoolExecutor | None = None) -> ExecState:
    """Choose the ready units with ``rng`` and fire them."""
    return fire(cc, state, ready_units(cc, state, rng), devices, pool)


def fire(cc: CompiledComputon, state: ExecState, ready: tuple, devices: DeviceRegistry,
         pool: ThreadPoolExecutor | None = None) -> ExecState:
    """Fire the given ready units once."""
    flows = [f for u in ready for f in cc.unit_outflows[u]]
    if pool is not None and len(flows) > 1:
        results = list(pool.map(lambda f: evaluate(cc, state, f, devices), flows))
    else:
        results = [evaluate(cc, state, f, devices) for f in flows]

    written: dict = {}
    for f, r in zip(flows, results):
        if f.target in written and written[f.target][0] != f.unit:
            raise ExecutionError(
                f"port {cc.labels[f.target]!r} is written by units {written[f.target][0]} "
                f"and {f.unit} in the same step")
        written[f.target] = (f.unit, r)

    signalled = {p for u in ready for p in cc.unit_post[u] if cc.control[p]}
    touched = {p for u in ready for p in cc.unit_pre[u] + cc.unit_post[u]}
    new = []
    for p, old in enumerate(state.values):
        if p in signalled:
            new.append(SIGNAL)
        elif p in written:
            new.append(written[p][1])
        elif p not in touched:
            new.append(old)
        else:
            new.append(ABSENT)
    return ExecState(state.time + 1, tuple(new))


@dataclass(frozen=True)
class RunResult:
    final: ExecState
    trace: Trace
    compiled: CompiledComputon

    def outputs(self) -> dict:
        """Outport label -> value in the final state."""
        return {self.compiled.labels[p]: self.final.values[p] for p in self.compiled.outports}


def run(target, inputs: Mapping[str, object], seed: int = 0, max_steps: int = DEFAULT_MAX_STEPS,
        devices: DeviceRegistry | None = None, universe: TypeUniverse | None = None,
        workers: int = 1) -> RunResult:
    """Execute from the initial state until every unit is idle.

    ``target`` is a Composite (its parsing tree is checked for soundness) or
    a bare Computon, which is accepted only if trivial or primitive.
    """
    if max_steps < 1:
        raise ExecutionError("max_steps must be at least 1")
    comp = target if isinstance(target, Composite) else atom(target)
    if not is_sound(comp):
        raise ExecutionError("only sound computons can be executed")
    cc = compile_computon(comp.computon, universe)
    devices = devices or DeviceRegistry()
    rng = random.Random(seed)
    state = initial_state(cc, inputs)
    trace = Trace(cc.labels)
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while True:
            ready = ready_units(cc, state, rng)
            trace.entries.append(TraceEntry(state.time, ready, state.values))
            if not ready:
                return RunResult(state, trace, cc)
            if state.time >= max_steps:
                raise NonTerminationError(f"no final state within {max_steps} steps", trace)
            try:
                state = fire(cc, state, ready, devices, pool)
            except (DeviceError, ExecutionError) as exc:
                exc.trace = trace
                raise
    finally:
        if pool is not None:
            pool.shutdown()


__all__ = ["ABSENT", "SIGNAL", "CompiledComputon", "ExecState", "RunResult", "Trace", "TraceEntry",
           "TypeUniverse", "compile_computon", "enabled_units", "evaluate", "initial_state",
           "fire", "ready_units", "run", "step"]

"""JSON files for computons, parsing trees and composition scripts."""
from __future__ import annotations

import json
from pathlib import Path

from .colimit import Span
from .computon import Computon, classify
from .errors import CompositionError, ConstructionError, DomainError
from .finset import FinMap
from .operators import (ASYNC, BRA_CLOSED, BRA_OPEN, SEQ_PARTIAL, SEQ_TOTAL, Composite, Leaf, Node,
                        atom, bra_closed, bra_open, marker_pair, p_async, seq, span_from_pairs,
                        sync)
from .values import TypeUniverse

CLASSES = ("trivial", "primitive", "composite")


# -- computon files ---------------------------------------------------------------

def computon_to_dict(c: Computon, name: str = "computon", universe: TypeUniverse | None = None) -> dict:
    doc = {
        "name": name,
        "class": classify(c),
        "colours": c.types,
        "units": c.units,
        "ports": [{"label": c.labels[p], "colour": c.colour.table[p]} for p in range(c.ports)],
        "inflows": [{"from": c.labels[c.src.table[i]], "to": c.in_unit.table[i]} for i in range(c.inflows)],
        "outflows": [{"from": c.out_unit.table[o], "to": c.labels[c.tgt.table[o]], "device": c.device[o]}
                     for o in range(c.outflows)],
        "relate": [[i, c.relate.table[i]] for i in range(c.inflows)],
    }
    if universe is not None:
        doc["universe"] = list(universe.types)
    return doc


def _field(doc, key, kind):
    if key not in doc:
        raise ConstructionError("format", f"missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ConstructionError("format", f"field {key!r} has the wrong type")
    return value


def computon_from_dict(doc: dict) -> Computon:
    """Build a computon from its JSON form; structural violations are reported by ``validate``."""
    if not isinstance(doc, dict):
        raise ConstructionError("format", "a computon file must hold a JSON object")
    colours = _field(doc, "colours", int)
    units = _field(doc, "units", int)
    ports = _field(doc, "ports", list)
    inflows = _field(doc, "inflows", list)
    outflows = _field(doc, "outflows", list)
    relate_pairs = _field(doc, "relate", list)
    try:
        labels = [p["label"] for p in ports]
        index = {lab: k for k, lab in enumerate(labels)}
        if len(index) != len(labels):
            raise ConstructionError("labels", "port labels must be distinct")

        def port_of(lab):
            if lab not in index:
                raise ConstructionError("format", f"unknown port label {lab!r}")
            return index[lab]

        relate = [None] * len(inflows)
        for pair in relate_pairs:
            i, o = pair
            if not 0 <= i < len(inflows) or relate[i] is not None:
                raise ConstructionError("format", f"bad relate entry {pair!r}")
            relate[i] = o
        if any(o is None for o in relate):
            raise ConstructionError("format", "relate must list every inflow exactly once")
        c = Computon(
            units=units, ports=len(ports), inflows=len(inflows), outflows=len(outflows), types=colours,
            src=FinMap([port_of(f["from"]) for f in inflows], len(ports)),
            tgt=FinMap([port_of(f["to"]) for f in outflows], len(ports)),
            out_unit=FinMap([f["from"] for f in outflows], units),
            in_unit=FinMap([f["to"] for f in inflows], units),
            colour=FinMap([p["colour"] for p in ports], colours),
            relate=FinMap(relate, len(outflows)),
            device=[f["device"] for f in outflows],
            labels=labels,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise ConstructionError("shape", str(exc)) from None
        raise ConstructionError("format", f"malformed computon file: {exc!r}") from None
    hint = doc.get("class")
    if hint is not None and hint not in CLASSES:
        raise ConstructionError("format", f"unknown class hint {hint!r}")
    return c


def universe_from_dict(doc: dict) -> TypeUniverse | None:
    if "universe" not in doc:
        return None
    try:
        return TypeUniverse(doc["universe"])
    except DomainError as exc:
        raise ConstructionError("format", str(exc)) from None


def read_json(path) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConstructionError("format", f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise ConstructionError("format", f"{path}: {exc.strerror}") from None


def write_json(path, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def load_computon(path) -> Computon:
    return computon_from_dict(read_json(path))


def save_computon(path, c: Computon, name: str = "computon") -> None:
    write_json(path, computon_to_dict(c, name))


# -- parsing trees ------------------------------------------------------------------

def _span_pairs(span: Span) -> list[list[str]]:
    left, right = span.left, span.right
    return [[left.labels[a], right.labels[b]]
            for a, b in zip(span.left_leg.ports.table, span.right_leg.ports.table)]


def tree_to_dict(tree) -> dict:
    if isinstance(tree, Leaf):
        doc = {"leaf": tree.name, "class": tree.cls}
        if tree.computon is not None:
            doc["computon"] = computon_to_dict(tree.computon, tree.name)
        return doc
    doc = {"op": tree.op, "left": tree_to_dict(tree.left), "right": tree_to_dict(tree.right)}
    if tree.op in (SEQ_TOTAL, SEQ_PARTIAL, BRA_OPEN):
        doc["pairs"] = _span_pairs(tree.diagram)
    elif tree.op == BRA_CLOSED:
        ins, outs = tree.diagram
        doc["inputs"], doc["outputs"] = _span_pairs(ins), _span_pairs(outs)
    return doc


def replay_tree(doc: dict) -> Composite:
    """Rebuild a composite by re-running the operators recorded in a tree document."""
    if not isinstance(doc, dict):
        raise CompositionError("tree", "tree nodes must be JSON objects")
    if "leaf" in doc:
        if "computon" not in doc:
            raise CompositionError("tree", f"leaf {doc['leaf']!r} does not embed its computon")
        return atom(computon_from_dict(doc["computon"]), doc["leaf"])
    op = doc.get("op")
    left, right = replay_tree(doc.get("left")), replay_tree(doc.get("right"))
    if op == ASYNC:
        return p_async(left, right)
    if op in (SEQ_TOTAL, SEQ_PARTIAL):
        result = seq(left, right, span_from_pairs(left.computon, right.computon, doc["pairs"]))
        if result.tree.op != op:
            raise CompositionError("tree", f"recorded {op} but the span yields {result.tree.op}")
        return result
    if op == BRA_OPEN:
        return bra_open(left, right, *marker_pair(left.computon, right.computon, "in", doc["pairs"]))
    if op == BRA_CLOSED:
        return bra_closed(left, right,
                          *marker_pair(left.computon, right.computon, "in", doc["inputs"]),
                          *marker_pair(left.computon, right.computon, "out", doc["outputs"]))
    raise CompositionError("tree", f"unknown operator {op!r}")


def tree_path(computon_path) -> Path:
    p = Path(computon_path)
    return p.with_suffix(".tree.json")


def load_composite(path) -> Composite:
    """Load a computon together with its parsing tree.

    Trivial and primitive computons need no tree.  For anything else the
    sidecar tree is replayed and must rebuild exactly the stored computon.
    """
    c = load_computon(path)
    side = tree_path(path)
    if side.exists():
        rebuilt = replay_tree(read_json(side))
        if rebuilt.computon != c:
            raise CompositionError("tree", f"{side} does not rebuild {path}")
        return Composite(c, rebuilt.tree, rebuilt.cocone)
    return atom(c, Path(path).stem)


def save_composite(path, comp: Composite, name: str = "composite") -> None:
    save_computon(path, comp.computon, name)
    if isinstance(comp.tree, Node):
        write_json(tree_path(path), tree_to_dict(comp.tree))


# -- composition scripts -------------------------------------------------------------------

def _pairs(step, key):
    raw = step.get(key)
    if raw is None:
        return None
    out = []
    for item in raw:
        if isinstance(item, dict):
            out.append((item["left"], item["right"]))
        else:
            a, b = item
            out.append((a, b))
    return out


def run_script(doc: dict, base: Path) -> tuple[Composite, list[str]]:
    """Execute a composition script; returns the exported composite and a log of steps."""
    env: dict[str, Composite] = {}
    for name, rel in (doc.get("imports") or {}).items():
        comp = load_composite(base / rel)
        if isinstance(comp.tree, Leaf):
            comp = atom(comp.computon, name)
        env[name] = comp
    notes = []
    for k, step in enumerate(doc.get("steps") or []):
        op = step.get("op")
        operands = step.get("operands") or []
        if len(operands) != 2:
            raise CompositionError("script", f"step {k}: exactly two operands are required")
        for ref in operands:
            if ref not in env:
                raise CompositionError("script", f"step {k}: {ref!r} is not defined yet")
        left, right = env[operands[0]], env[operands[1]]
        lc, rc = left.computon, right.computon
        if op == "SEQ":
            span = span_from_pairs(lc, rc, _pairs(step, "span") or [], step.get("colours"))
            result = seq(left, right, span)
        elif op == "ASYNC":
            result = p_async(left, right)
        elif op == "SYNC":
            result = sync(left, right, step.get("label", "sync"))
        elif op == "BRA_OPEN":
            result = bra_open(left, right, *marker_pair(lc, rc, "in", _pairs(step, "inputs")))
        elif op == "BRA_CLOSED":
            result = bra_closed(left, right,
                                *marker_pair(lc, rc, "in", _pairs(step, "inputs")),
                                *marker_pair(lc, rc, "out", _pairs(step, "outputs")))
        else:
            raise CompositionError("script", f"step {k}: unknown operator {op!r}")
        name = step.get("result") or f"step{k}"
        env[name] = result
        note = f"{name} = {op}({operands[0]}, {operands[1]})"
        if result.kind:
            note += f" [{result.kind}]"
        notes.append(note)
    export = doc.get("export")
    if export not in env:
        raise CompositionError("script", f"export {export!r} is not defined")
    return env[export], notes

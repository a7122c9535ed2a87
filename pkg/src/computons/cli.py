"""Command-line front end.

Exit codes: 0 success, 1 structural or input error, 2 step budget
exhausted, 3 device or network failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .computon import CONTROL, validate
from .devnet import DeviceRegistry, serve_stub
from .errors import (CompositionError, ComputonsError, ConstructionError, DeviceError,
                     MorphismError, NonTerminationError, NotPushableError)
from .formats import (load_composite, load_computon, read_json, run_script, save_composite,
                      universe_from_dict)
from .operators import is_sound
from .runtime import DEFAULT_MAX_STEPS, run
from .values import encode

EXIT_OK, EXIT_STRUCTURE, EXIT_NONTERMINATION, EXIT_DEVICE = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def cmd_validate(args) -> int:
    try:
        c = load_computon(args.file)
    except ConstructionError as exc:
        _err(str(exc))
        return EXIT_STRUCTURE
    report = validate(c)
    print(report)
    return EXIT_OK if report.ok else EXIT_STRUCTURE


def cmd_compose(args) -> int:
    script = Path(args.script)
    try:
        doc = read_json(script)
        comp, notes = run_script(doc, script.parent)
    except (CompositionError, NotPushableError, MorphismError, ConstructionError) as exc:
        _err(str(exc))
        return EXIT_STRUCTURE
    for line in notes:
        print(line)
    report = validate(comp.computon)
    if not report.ok:
        print(f"warning: result violates restrictions:\n{report}", file=sys.stderr)
    save_composite(args.out, comp, doc.get("export", "composite"))
    c = comp.computon
    print(f"wrote {args.out}: {c.units} units, {c.ports} ports, {c.inflows} inflows, "
          f"{c.outflows} outflows, {c.types} colours")
    return EXIT_OK


def _json_arg(text: str):
    """Inline JSON, or ``@path`` to read it from a file."""
    if text.startswith("@"):
        return read_json(text[1:])
    return json.loads(text)


def cmd_run(args) -> int:
    try:
        comp = load_composite(args.file)
        universe = universe_from_dict(read_json(args.file))
    except (ComputonsError, OSError) as exc:
        _err(str(exc))
        return EXIT_STRUCTURE
    if not is_sound(comp):
        _err("unsound computon: provide the parsing tree written by 'compose'")
        return EXIT_STRUCTURE
    try:
        inputs = _json_arg(args.inputs) if args.inputs else {}
        routes = _json_arg(args.devices) if args.devices else {}
    except (json.JSONDecodeError, ConstructionError) as exc:
        _err(f"bad JSON argument: {exc}")
        return EXIT_STRUCTURE
    try:
        registry = DeviceRegistry(routes=routes, timeout=args.timeout)
        result = run(comp, inputs, seed=args.seed, max_steps=args.max_steps,
                     devices=registry, universe=universe, workers=args.workers)
    except NonTerminationError as exc:
        if args.trace and exc.trace is not None:
            exc.trace.write(args.trace)
        _err(str(exc))
        return EXIT_NONTERMINATION
    except DeviceError as exc:
        _err(str(exc))
        return EXIT_DEVICE
    except ComputonsError as exc:
        _err(str(exc))
        return EXIT_STRUCTURE
    if args.trace:
        result.trace.write(args.trace)
    print(json.dumps({k: encode(v) for k, v in result.outputs().items()}))
    return EXIT_OK


def to_dot(c, name: str = "computon") -> str:
    """Bipartite graph in Graphviz syntax; control edges are dashed."""
    lines = [f'digraph "{name}" {{', "  rankdir=LR;"]
    for p in range(c.ports):
        lines.append(f'  p{p} [shape=circle, label="{c.labels[p]}\\n{c.colour.table[p]}"];')
    for u in range(c.units):
        lines.append(f'  u{u} [shape=box, label="u{u}"];')
    for i in range(c.inflows):
        p = c.src.table[i]
        style = ", style=dashed" if c.colour.table[p] == CONTROL else ""
        lines.append(f"  p{p} -> u{c.in_unit.table[i]} [label=\"i{i}\"{style}];")
    for o in range(c.outflows):
        p = c.tgt.table[o]
        style = ", style=dashed" if c.colour.table[p] == CONTROL else ""
        lines.append(f"  u{c.out_unit.table[o]} -> p{p} [label=\"{c.device[o]}\"{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export_dot(args) -> int:
    try:
        c = load_computon(args.file)
    except ConstructionError as exc:
        _err(str(exc))
        return EXIT_STRUCTURE
    text = to_dot(c, Path(args.file).stem)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_serve(args) -> int:
    try:
        stub = serve_stub(args.port, host=args.host)
    except DeviceError as exc:
        _err(str(exc))
        return EXIT_DEVICE
    print(f"serving builtin devices at {stub.url}/devices/<name>", flush=True)
    try:
        stub._thread.join()
    except KeyboardInterrupt:
        pass
    finally:
        stub.shutdown()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="computons", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log device traffic")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a computon file against every restriction")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compose", help="run a composition script")
    p.add_argument("script")
    p.add_argument("out", help="output computon file; the parsing tree goes next to it")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("run", help="execute a sound computon")
    p.add_argument("file")
    p.add_argument("--inputs", help="JSON object label -> value, or @file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--trace", help="write the state trace as JSON lines")
    p.add_argument("--devices", help="JSON object device id -> URL, or @file")
    p.add_argument("--timeout", type=float, default=None, help="per-call device timeout in seconds")
    p.add_argument("--workers", type=int, default=1, help="threads for device calls within a step")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("export-dot", help="render the port/unit graph in Graphviz syntax")
    p.add_argument("file")
    p.add_argument("out", nargs="?")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("serve", help="serve the builtin devices over HTTP")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

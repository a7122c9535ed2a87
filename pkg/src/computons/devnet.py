"""Devices: the builtin catalogue, HTTP invocation and a stub device server.

Wire protocol (JSON over HTTP POST):

* request body ``{"args": [{"type": ..., "value": ..., "label": ...}, ...]}``
* success: status 200 and a single ``{"type": ..., "value": ...}``
* failure: a 4xx/5xx status and ``{"error": "..."}``

``type`` is one of ``control``, ``int``, ``float``, ``text``, ``bool``; the
control signal travels as the value ``"*"``.
"""
from __future__ import annotations

import json
import logging
import math
import os
import socket
import threading
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Mapping

from .errors import DeviceError, DomainError
from .values import SIGNAL, TYPE_NAMES, encode, inhabits, type_of

log = logging.getLogger(__name__)

TIMEOUT_ENV = "COMPUTONS_DEVICE_TIMEOUT"
DEFAULT_TIMEOUT = 5.0


@dataclass(frozen=True)
class Arg:
    label: str
    type: str
    value: object


def _numbers(name, args, count):
    if len(args) != count:
        raise DeviceError("bad-arguments", name, f"expected {count} arguments, got {len(args)}")
    for v in args:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise DeviceError("bad-arguments", name, f"{v!r} is not a number")
    return args


def _natural(name, args):
    (n,) = _numbers(name, args, 1)
    if not isinstance(n, int) or n < 0:
        raise DeviceError("bad-arguments", name, f"{n!r} is not a nonnegative integer")
    return n


def _epsilon(args):
    if not args or any(v is not SIGNAL for v in args):
        raise DeviceError("bad-arguments", "epsilon", "echo expects only control signals")
    return SIGNAL


def _arith(name, op):
    def run(args):
        x, y = _numbers(name, args, 2)
        r = op(x, y)
        return r if isinstance(x, int) and isinstance(y, int) else float(r)
    return run


def _fact(args):
    n = _natural("fact", args)
    if n > 20:
        raise DeviceError("bad-arguments", "fact", f"{n}! exceeds the supported range (n <= 20)")
    return math.factorial(n)


BUILTINS: dict[str, Callable[[list], object]] = {
    "epsilon": _epsilon,
    "mul": _arith("mul", lambda x, y: x * y),
    "add": _arith("add", lambda x, y: x + y),
    "succ": lambda args: _natural("succ", args) + 1,
    "pred": lambda args: max(_natural("pred", args) - 1, 0),
    "fact": _fact,
}


# -- wire format ------------------------------------------------------------------

def encode_arg(a: Arg) -> dict:
    return {"type": a.type, "value": encode(a.value), "label": a.label}


def decode_typed(obj) -> object:
    """Decode one TypedValue object into a runtime value."""
    if not isinstance(obj, dict):
        raise DomainError("a typed value must be a JSON object")
    if obj.get("control") is True and "type" not in obj:
        return SIGNAL
    t = obj.get("type")
    if t not in TYPE_NAMES:
        raise DomainError(f"unknown value type {t!r}")
    if "value" not in obj:
        raise DomainError("typed value lacks a 'value' field")
    v = obj["value"]
    if t == "control":
        return SIGNAL
    if t == "float" and isinstance(v, int) and not isinstance(v, bool):
        v = float(v)
    if not inhabits(t, v):
        raise DomainError(f"{v!r} is not a {t}")
    return v


def encode_typed(v) -> dict:
    return {"type": type_of(v), "value": encode(v)}


# -- registry ---------------------------------------------------------------------------

def _env_timeout() -> float:
    raw = os.environ.get(TIMEOUT_ENV)
    if raw is None:
        return DEFAULT_TIMEOUT
    try:
        value = float(raw)
    except ValueError:
        raise DeviceError("network", TIMEOUT_ENV, f"invalid timeout {raw!r}") from None
    if value <= 0:
        raise DeviceError("network", TIMEOUT_ENV, "timeout must be positive")
    return value


_DIRECT = urllib.request.build_opener(urllib.request.ProxyHandler({}))
_DEFAULT = urllib.request.build_opener()


def _opener_for(url: str):
    # loopback endpoints (such as the stub server) must never go through a proxy
    host = urllib.parse.urlsplit(url).hostname or ""
    return _DIRECT if host in ("localhost", "127.0.0.1", "::1") else _DEFAULT


class DeviceRegistry:
    """Resolves device ids to builtins or HTTP endpoints.

    ``routes`` maps a device id (builtin or URL) to the URL actually
    contacted, which lets a test serve every builtin over HTTP.
    """

    def __init__(self, builtins: Mapping[str, Callable] | None = None,
                 routes: Mapping[str, str] | None = None,
                 timeout: float | None = None, retries: int = 1):
        self.builtins = dict(BUILTINS if builtins is None else builtins)
        self.routes = dict(routes or {})
        self.timeout = _env_timeout() if timeout is None else float(timeout)
        self.retries = retries

    def resolves(self, device: str) -> bool:
        if device in self.routes:
            return True
        if device.startswith("builtin:"):
            return device[len("builtin:"):] in self.builtins
        return device.startswith(("http://", "https://"))

    def invoke(self, device: str, args: list[Arg]):
        url = self.routes.get(device)
        if url is None and device.startswith("builtin:"):
            fn = self.builtins.get(device[len("builtin:"):])
            if fn is None:
                raise DeviceError("unknown-device", device, "no such builtin")
            return fn([a.value for a in args])
        if url is None:
            if not device.startswith(("http://", "https://")):
                raise DeviceError("unknown-device", device, "not a builtin or URL")
            url = device
        return self._post(device, url, args)

    def _post(self, device, url, args):
        body = json.dumps({"args": [encode_arg(a) for a in args]}).encode()
        attempt = 0
        while True:
            req = urllib.request.Request(url, data=body, method="POST",
                                         headers={"Content-Type": "application/json"})
            try:
                with _opener_for(url).open(req, timeout=self.timeout) as resp:
                    raw = resp.read()
                break
            except urllib.error.HTTPError as exc:
                raise self._http_error(device, exc) from None
            except (TimeoutError, socket.timeout) as exc:
                failure = DeviceError("timeout", device, f"no answer within {self.timeout}s ({exc})")
            except urllib.error.URLError as exc:
                if isinstance(exc.reason, (TimeoutError, socket.timeout)):
                    failure = DeviceError("timeout", device, f"no answer within {self.timeout}s")
                else:
                    failure = DeviceError("network", device, str(exc.reason))
            except OSError as exc:
                failure = DeviceError("network", device, str(exc))
            if attempt >= self.retries:
                raise failure
            attempt += 1
            log.info("retrying %s after %s", device, failure.kind)
        try:
            return decode_typed(json.loads(raw))
        except (ValueError, DomainError) as exc:
            raise DeviceError("malformed-response", device, str(exc)) from None

    @staticmethod
    def _http_error(device, exc):
        try:
            detail = json.loads(exc.read()).get("error", "")
        except (ValueError, AttributeError):
            detail = ""
        kind = {404: "unknown-device", 400: "bad-arguments"}.get(exc.code, "device-failure")
        return DeviceError(kind, device, f"HTTP {exc.code}: {detail}".rstrip(": "))


def invoke(reg: DeviceRegistry, device: str, args) -> object:
    """Call a device; ``args`` may be Arg records or plain values (labelled by position)."""
    packed = [a if isinstance(a, Arg) else Arg(f"arg{k}", type_of(a), a) for k, a in enumerate(args)]
    return reg.invoke(device, packed)


# -- stub server ---------------------------------------------------------------------------

class _Handler(BaseHTTPRequestHandler):
    catalogue: Mapping[str, Callable] = BUILTINS

    def log_message(self, fmt, *args):
        log.debug("stub: " + fmt, *args)

    def _reply(self, status, payload):
        data = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_POST(self):
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length)
        prefix = "/devices/"
        name = self.path[len(prefix):] if self.path.startswith(prefix) else None
        fn = self.catalogue.get(name) if name else None
        if fn is None:
            self._reply(404, {"error": f"no device at {self.path}"})
            return
        try:
            args = json.loads(body)["args"]
            if not isinstance(args, list):
                raise ValueError("'args' must be a list")
            values = [decode_typed(a) for a in args]
        except (ValueError, KeyError, TypeError, DomainError) as exc:
            self._reply(400, {"error": f"bad request: {exc}"})
            return
        try:
            result = fn(values)
        except DeviceError as exc:
            self._reply(400 if exc.kind == "bad-arguments" else 500, {"error": exc.detail})
            return
        self._reply(200, encode_typed(result))

    def do_GET(self):
        self._reply(405, {"error": "use POST"})


class StubServer:
    """Handle on a running stub; use as a context manager or call ``shutdown``."""

    def __init__(self, server: ThreadingHTTPServer, thread: threading.Thread):
        self._server = server
        self._thread = thread

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def url(self) -> str:
        host = self._server.server_address[0]
        return f"http://{host}:{self.port}"

    def device_url(self, name: str) -> str:
        return f"{self.url}/devices/{name}"

    def routes(self) -> dict[str, str]:
        """Route every builtin id to this server."""
        return {f"builtin:{n}": self.device_url(n) for n in self._server.RequestHandlerClass.catalogue}

    def shutdown(self):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.shutdown()


def serve_stub(port: int = 0, catalogue: Mapping[str, Callable] | None = None,
               host: str = "127.0.0.1") -> StubServer:
    handler = type("StubHandler", (_Handler,), {"catalogue": dict(catalogue or BUILTINS)})
    try:
        server = ThreadingHTTPServer((host, port), handler)
    except OSError as exc:
        raise DeviceError("network", f"{host}:{port}", f"cannot bind: {exc}") from None
    server.daemon_threads = True
    thread = threading.Thread(target=server.serve_forever, name="computons-stub", daemon=True)
    thread.start()
    return StubServer(server, thread)


__all__ = ["Arg", "BUILTINS", "DeviceRegistry", "StubServer", "decode_typed", "encode_typed",
           "invoke", "serve_stub"]

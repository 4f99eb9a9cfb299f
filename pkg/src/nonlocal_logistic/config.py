"""Run configuration: plain-text grammar, JSON fallback, validation, builders.

Grammar (one assignment per line, ``#`` starts a comment)::

    key = value
    value := number | "string" | true | false
           | [ value, value, ... ]
           | { key = value, key = value, ... }

Example::

    symbol = { kind = "fractional", alpha = 1.0 }
    domain = { left = -1.0, right = 1.0, n = 199 }

Files whose first non-blank character is ``{`` are parsed as JSON with
the same block structure.  Every block is validated before any
computation starts; invalid configs never produce partial outputs.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field

import numpy as np

from .bernstein import BernsteinSymbol, LevyKernel, _EXACT_KINDS
from .errors import ConfigurationError
from .grid import Grid1D, build_grid
from .steady import CrowdingTerm, HarvestTerm, ReactionSpec

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<string>"(?:[^"\\]|\\.)*")
      | (?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<bool>true|false)
      | (?P<name>[A-Za-z_][A-Za-z0-9_-]*)
      | (?P<punct>[=\[\]{},])
    )""",
    re.VERBOSE,
)


def _strip_comment(line: str) -> str:
    out = []
    in_str = False
    prev = ""
    for ch in line:
        if ch == '"' and prev != "\\":
            in_str = not in_str
        if ch == "#" and not in_str:
            break
        out.append(ch)
        prev = ch
    return "".join(out)


def _tokenize(text: str) -> list[str]:
    tokens = []
    for raw in text.splitlines():
        line = _strip_comment(raw).strip()
        pos = 0
        while pos < len(line):
            m = _TOKEN.match(line, pos)
            if m is None:
                raise ConfigurationError(f"config syntax error near: {line[pos:pos+40]!r}")
            tokens.append(m.group(0).strip())
            pos = m.end()
        tokens.append("\n")
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.toks = [t for t in tokens]
        self.i = 0

    def peek(self):
        while self.i < len(self.toks) and self.toks[self.i] == "\n":
            self.i += 1
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ConfigurationError("unexpected end of config")
        self.i += 1
        return t

    def expect(self, t):
        got = self.next()
        if got != t:
            raise ConfigurationError(f"expected {t!r}, got {got!r}")

    def parse_document(self) -> dict:
        out = {}
        while self.peek() is not None:
            key = self.next()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_-]*", key):
                raise ConfigurationError(f"invalid key {key!r}")
            self.expect("=")
            out[key] = self.parse_value()
        return out

    def parse_value(self):
        t = self.next()
        if t == "{":
            table = {}
            if self.peek() == "}":
                self.next()
                return table
            while True:
                key = self.next()
                self.expect("=")
                table[key] = self.parse_value()
                sep = self.next()
                if sep == "}":
                    return table
                if sep != ",":
                    raise ConfigurationError(f"expected ',' or '}}' in table, got {sep!r}")
        if t == "[":
            items = []
            if self.peek() == "]":
                self.next()
                return items
            while True:
                items.append(self.parse_value())
                sep = self.next()
                if sep == "]":
                    return items
                if sep != ",":
                    raise ConfigurationError(f"expected ',' or ']' in list, got {sep!r}")
        if t.startswith('"'):
            return json.loads(t)
        if t in ("true", "false"):
            return t == "true"
        try:
            return int(t) if re.fullmatch(r"[+-]?\d+", t) else float(t)
        except ValueError:
            raise ConfigurationError(f"invalid value {t!r}") from None


def parse_config_text(text: str) -> dict:
    """Parse the key/table grammar, or JSON when the text starts with '{'."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            out = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"invalid JSON config: {exc}") from exc
        if not isinstance(out, dict):
            raise ConfigurationError("JSON config must be an object")
        return out
    return _Parser(_tokenize(text)).parse_document()


def config_digest(cfg: dict) -> str:
    return hashlib.sha256(
        json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


# ---------------------------------------------------------------------------
# Block builders
# ---------------------------------------------------------------------------


def _get(block: dict, key: str, kind, default=None, required: bool = False):
    if key not in block:
        if required:
            raise ConfigurationError(f"missing required key {key!r}")
        return default
    val = block[key]
    if kind is float and isinstance(val, (int, float)) and not isinstance(val, bool):
        return float(val)
    if kind is int and isinstance(val, int) and not isinstance(val, bool):
        return val
    if not isinstance(val, kind) or isinstance(val, bool) and kind is not bool:
        raise ConfigurationError(f"key {key!r} has wrong type {type(val).__name__}")
    return val


def build_symbol(block: dict) -> BernsteinSymbol:
    if not isinstance(block, dict):
        raise ConfigurationError("symbol block must be a table")
    kind = _get(block, "kind", str, required=True)
    return BernsteinSymbol(
        kind=kind,
        alpha=_get(block, "alpha", float, required=True),
        beta=_get(block, "beta", float),
        m=_get(block, "m", float),
    )


def symbol_to_text(symbol: BernsteinSymbol) -> str:
    parts = [f'kind = "{symbol.kind}"', f"alpha = {symbol.alpha!r}"]
    if symbol.beta is not None:
        parts.append(f"beta = {symbol.beta!r}")
    if symbol.m is not None:
        parts.append(f"m = {symbol.m!r}")
    return "symbol = { " + ", ".join(parts) + " }"


def build_kernel(symbol: BernsteinSymbol, block: dict | None) -> LevyKernel:
    block = block or {}
    mode = _get(block, "mode", str, default="auto")
    norm = _get(block, "normalization", float, default=1.0)
    if mode == "auto":
        exact_ok = symbol.kind in _EXACT_KINDS and (
            symbol.kind != "fractional" or symbol.alpha < 2.0
        ) and (
            symbol.kind != "sum_fractional" or max(symbol.alpha, symbol.beta) < 2.0
        )
        mode = "exact" if exact_ok else "scaled_profile"
    return LevyKernel(symbol=symbol, mode=mode, normalization=norm)


def build_grid_block(domain: dict, discretization: dict | None) -> tuple[Grid1D, float]:
    if not isinstance(domain, dict):
        raise ConfigurationError("domain block must be a table")
    disc = discretization or {}
    left = _get(domain, "left", float, required=True)
    right = _get(domain, "right", float, required=True)
    n = _get(disc, "n", int, default=_get(domain, "n", int))
    if n is None:
        raise ConfigurationError("grid size n missing (domain.n or discretization.n)")
    grid = build_grid(left, right, n)
    far = _get(disc, "far_cutoff", float, default=2.0 * grid.width)
    return grid, far


def build_reaction(block: dict, lam1: float | None = None) -> ReactionSpec:
    if not isinstance(block, dict):
        raise ConfigurationError("problem block must be a table")
    a = _get(block, "a", float)
    a_rel = _get(block, "a_rel", float)
    if (a is None) == (a_rel is None):
        raise ConfigurationError("problem block needs exactly one of 'a' or 'a_rel'")
    if a is None:
        if lam1 is None:
            raise ConfigurationError("a_rel requires the principal eigenvalue")
        a = a_rel * lam1
    c = _get(block, "c", float, default=0.0)
    fb = _get(block, "f", dict, default={"kind": "quadratic"})
    f = CrowdingTerm(
        kind=_get(fb, "kind", str, default="quadratic"),
        b=_get(fb, "b", float, default=1.0),
        p=_get(fb, "p", float, default=2.0),
    )
    hb = _get(block, "h", dict)
    h = None
    if hb is not None:
        h = HarvestTerm(
            kind=_get(hb, "kind", str, default="constant_yield"),
            h0=_get(hb, "h0", float, default=1.0),
            q=_get(hb, "q", float, default=0.5),
        )
    return ReactionSpec(a=a, c=c, f=f, h=h)


@dataclass
class RunConfig:
    """Validated configuration for one CLI run."""

    raw: dict
    symbol: BernsteinSymbol
    grid: Grid1D | None = None
    far_cutoff: float | None = None
    kernel: LevyKernel | None = None
    problem: dict | None = None
    solver: dict = field(default_factory=dict)
    parabolic: dict = field(default_factory=dict)
    stochastic: dict = field(default_factory=dict)
    scan: dict = field(default_factory=dict)
    output_dir: str = "out"
    formats: tuple = ("csv", "json")

    @property
    def digest(self) -> str:
        return config_digest(self.raw)

    @property
    def tol(self) -> float:
        return float(self.solver.get("tol", 1e-10))

    def reaction(self, lam1: float | None = None) -> ReactionSpec:
        if self.problem is None:
            raise ConfigurationError("config has no problem block")
        return build_reaction(self.problem, lam1)


_KNOWN_BLOCKS = {
    "symbol", "domain", "discretization", "kernel", "problem", "solver",
    "parabolic", "stochastic", "scan", "output",
}


def load_config(text: str) -> RunConfig:
    raw = parse_config_text(text)
    unknown = set(raw) - _KNOWN_BLOCKS
    if unknown:
        raise ConfigurationError(f"unknown config blocks: {sorted(unknown)}")
    if "symbol" not in raw:
        raise ConfigurationError("config needs a symbol block")
    symbol = build_symbol(raw["symbol"])
    kernel = build_kernel(symbol, raw.get("kernel"))
    grid = None
    far = None
    if "domain" in raw:
        grid, far = build_grid_block(raw["domain"], raw.get("discretization"))
    problem = raw.get("problem")
    if problem is not None:
        build_reaction(problem, lam1=1.0)  # validate shape now; a_rel resolved later
    out = raw.get("output", {})
    solver = raw.get("solver", {})
    for key, block in (("solver", solver), ("parabolic", raw.get("parabolic", {})),
                       ("stochastic", raw.get("stochastic", {})), ("scan", raw.get("scan", {}))):
        if not isinstance(block, dict):
            raise ConfigurationError(f"{key} block must be a table")
    return RunConfig(
        raw=raw,
        symbol=symbol,
        grid=grid,
        far_cutoff=far,
        kernel=kernel,
        problem=problem,
        solver=solver,
        parabolic=raw.get("parabolic", {}),
        stochastic=raw.get("stochastic", {}),
        scan=raw.get("scan", {}),
        output_dir=str(out.get("directory", "out")),
        formats=tuple(out.get("formats", ["csv", "json"])),
    )


def build_initial_field(kind: str, scale: float, grid: Grid1D, phi1=None, steady=None):
    """Initial parabolic datum from the config catalog."""
    if kind == "zero":
        return np.zeros(grid.n_interior)
    if kind == "eigenfunction":
        if phi1 is None:
            raise ConfigurationError("eigenfunction initial field needs the eigenpair")
        return scale * phi1
    if kind == "steady":
        if steady is None:
            raise ConfigurationError("steady initial field needs the logistic solution")
        return scale * steady
    if kind == "bump":
        w = 0.3 * grid.width
        xc = 0.5 * (grid.x_left + grid.x_right)
        z = (grid.nodes - xc) / w
        out = np.zeros(grid.n_interior)
        inside = np.abs(z) < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - z[inside] ** 2))
        return scale * out
    raise ConfigurationError(f"unknown initial field kind {kind!r}")

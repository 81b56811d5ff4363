"""JSON problem files: an algebra, a module, and a pair ``(x, y)``.

Complex entries are ``[re, im]`` pairs; matrices are row-major lists of rows.
Errors carry a JSONPath-like location such as ``$.x[1][0][2]``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import BlockAlgebra
from .errors import ParseError, ShapeError
from .module import ModuleElement, ModuleSpace


def complex_to_json(z) -> list[float]:
    return [float(z.real), float(z.imag)]


def matrix_to_json(m) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(m)]


def blocks_to_json(blocks) -> list:
    return [matrix_to_json(b) for b in blocks]


def _parse_complex(v, path):
    if isinstance(v, bool) or not isinstance(v, list) or len(v) != 2:
        raise ParseError("expected a [re, im] pair", path)
    out = []
    for i, part in enumerate(v):
        if isinstance(part, bool) or not isinstance(part, (int, float)) or not math.isfinite(part):
            raise ParseError("expected a finite number", f"{path}[{i}]")
        out.append(float(part))
    return complex(out[0], out[1])


def _parse_matrix(v, path):
    if not isinstance(v, list) or not v:
        raise ParseError("expected a nonempty list of rows", path)
    rows = []
    width = None
    for i, row in enumerate(v):
        rpath = f"{path}[{i}]"
        if not isinstance(row, list) or not row:
            raise ParseError("expected a nonempty row", rpath)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"ragged matrix: row has {len(row)} entries, expected {width}", rpath)
        rows.append([_parse_complex(z, f"{rpath}[{j}]") for j, z in enumerate(row)])
    return np.array(rows, dtype=complex)


def _parse_dims(v, path):
    if not isinstance(v, list) or not v:
        raise ParseError("expected a nonempty list of positive integers", path)
    for i, n in enumerate(v):
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ParseError("expected a positive integer", f"{path}[{i}]")
    return tuple(v)


def parse_element(v, space: ModuleSpace, path: str) -> ModuleElement:
    if not isinstance(v, list):
        raise ParseError("expected a list of blocks", path)
    if len(v) != space.algebra.num_blocks:
        raise ShapeError(f"{path}: {len(v)} blocks given, the algebra has {space.algebra.num_blocks}")
    blocks = []
    for k, (b, shape) in enumerate(zip(v, space.shapes)):
        m = _parse_matrix(b, f"{path}[{k}]")
        if m.shape != shape:
            raise ShapeError(f"{path}[{k}]: block has shape {m.shape}, expected {shape}")
        blocks.append(m)
    return ModuleElement(space, blocks)


def element_to_json(e: ModuleElement) -> list:
    return blocks_to_json(e.blocks)


@dataclass(eq=False)
class ProblemFile:
    space: ModuleSpace
    x: ModuleElement
    y: ModuleElement
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "algebra": {"blocks": list(self.space.algebra.block_dims)},
            "module": {"rows": list(self.space.row_dims)},
            "x": element_to_json(self.x),
            "y": element_to_json(self.y),
        }
        for k, v in self.extra.items():
            d.setdefault(k, v)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d) -> "ProblemFile":
        if not isinstance(d, dict):
            raise ParseError("expected a JSON object", "$")
        for key in ("algebra", "x", "y"):
            if key not in d:
                raise ParseError(f"missing key {key!r}", "$")
        alg = d["algebra"]
        if not isinstance(alg, dict) or "blocks" not in alg:
            raise ParseError("expected {\"blocks\": [...]}", "$.algebra")
        blocks = _parse_dims(alg["blocks"], "$.algebra.blocks")
        rows = blocks
        if d.get("module") is not None:
            mod = d["module"]
            if not isinstance(mod, dict):
                raise ParseError("expected {\"rows\": [...]}", "$.module")
            if "rows" in mod:
                rows = _parse_dims(mod["rows"], "$.module.rows")
                if len(rows) != len(blocks):
                    raise ShapeError(f"$.module.rows: {len(rows)} row dimensions for {len(blocks)} blocks")
        space = ModuleSpace(BlockAlgebra(blocks), rows)
        x = parse_element(d["x"], space, "$.x")
        y = parse_element(d["y"], space, "$.y")
        extra = {k: v for k, v in d.items() if k not in ("algebra", "module", "x", "y")}
        return cls(space, x, y, extra)

    @classmethod
    def loads(cls, text: str) -> "ProblemFile":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None
        return cls.from_dict(d)

    @classmethod
    def read(cls, path) -> "ProblemFile":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps() + "\n")


def parse_algebra_spec(text: str) -> tuple[int, ...]:
    """``"1,2,2"`` -> ``(1, 2, 2)``."""
    try:
        dims = tuple(int(t) for t in text.replace(" ", "").split(","))
    except ValueError:
        raise ParseError(f"bad dimension list {text!r}; expected e.g. \"1,2\"") from None
    if not dims or any(n < 1 for n in dims):
        raise ParseError(f"dimensions must be positive integers, got {text!r}")
    return dims

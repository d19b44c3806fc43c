"""JSON interchange for algebras, matrices, frames and reports.

Complex numbers are written as [re, im] pairs and matrix blocks row-major,
so files are language-neutral and diff-able; Python's shortest-repr float
serialization makes read/write round trips bit-identical on the numeric
payload.  Frame files carry the algebra, the shape, the k columns (each a
list of n element encodings) and optional metadata.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .algebra import AlgebraElement, AlgebraSpec
from .frames import Frame, TightnessReport
from .module import AMatrix

__all__ = [
    "FormatError",
    "encode_spec",
    "decode_spec",
    "encode_element",
    "decode_element",
    "encode_amatrix",
    "decode_amatrix",
    "encode_frame_file",
    "decode_frame_file",
    "encode_tightness_report",
    "load_frame",
    "save_frame",
    "load_amatrix",
]


class FormatError(ValueError):
    """The JSON document does not match the documented shapes."""


def encode_spec(spec: AlgebraSpec) -> list[int]:
    return list(spec.summand_dims)


def decode_spec(data: Any) -> AlgebraSpec:
    try:
        return AlgebraSpec(tuple(int(m) for m in data))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad algebra spec: {exc}") from exc


def _encode_block(block: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in block.ravel(order="C")]


def _decode_block(data: Any, m: int) -> np.ndarray:
    if len(data) != m * m:
        raise FormatError(f"block has {len(data)} entries, expected {m * m}")
    flat = np.array(
        [complex(re, im) for re, im in data], dtype=complex
    )
    return flat.reshape(m, m)


def encode_element(elem: AlgebraElement) -> list:
    return [_encode_block(b) for b in elem.blocks]


def decode_element(data: Any, spec: AlgebraSpec) -> AlgebraElement:
    try:
        blocks = tuple(
            _decode_block(blk, m) for blk, m in zip(data, spec.summand_dims)
        )
        if len(data) != spec.num_summands:
            raise FormatError("wrong number of blocks")
        return AlgebraElement(spec, blocks)
    except (TypeError, ValueError, IndexError) as exc:
        raise FormatError(f"bad element encoding: {exc}") from exc


def encode_amatrix(M: AMatrix) -> dict:
    return {
        "algebra": encode_spec(M.spec),
        "rows": M.rows,
        "cols": M.cols,
        "entries": [
            encode_element(M.entry(i, j))
            for i in range(M.rows)
            for j in range(M.cols)
        ],
    }


def decode_amatrix(data: Any) -> AMatrix:
    try:
        spec = decode_spec(data["algebra"])
        rows, cols = int(data["rows"]), int(data["cols"])
        entries = data["entries"]
        if len(entries) != rows * cols:
            raise FormatError("entry count does not match shape")
        grid = [
            [decode_element(entries[i * cols + j], spec) for j in range(cols)]
            for i in range(rows)
        ]
        return AMatrix.from_entries(grid)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad matrix encoding: {exc}") from exc


def encode_frame_file(F: Frame, metadata: dict | None = None) -> dict:
    columns = [
        [encode_element(F.matrix.entry(i, j)) for i in range(F.n)]
        for j in range(F.k)
    ]
    doc = {
        "algebra": encode_spec(F.spec),
        "n": F.n,
        "k": F.k,
        "columns": columns,
        "kind": "frame",
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def decode_frame_file(data: Any) -> Frame:
    try:
        spec = decode_spec(data["algebra"])
        n, k = int(data["n"]), int(data["k"])
        columns = data["columns"]
        if len(columns) != k or any(len(col) != n for col in columns):
            raise FormatError("column shape does not match n, k")
        grid = [
            [decode_element(columns[j][i], spec) for j in range(k)]
            for i in range(n)
        ]
        return Frame(AMatrix.from_entries(grid))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad frame file: {exc}") from exc


def encode_tightness_report(report: TightnessReport) -> dict:
    return {
        "b": report.b,
        "residual": report.residual,
        "is_tight": report.is_tight,
        "per_summand_b": list(report.per_summand_b),
    }


def save_frame(path, F: Frame, metadata: dict | None = None):
    with open(path, "w") as fh:
        json.dump(encode_frame_file(F, metadata), fh)
        fh.write("\n")


def load_frame(path) -> Frame:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    return decode_frame_file(data)


def load_amatrix(path) -> AMatrix:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    return decode_amatrix(data)

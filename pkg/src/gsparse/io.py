"""File formats: CSV matrices/vectors and JSON regularizer specs.

Matrices are headerless CSV, one row per line; vectors are single-column
CSV.  Reals are written with 17 significant digits, which round-trips IEEE
doubles exactly.  Regularizer specs are JSON objects:

    {"kind": "l1",            "lambda": 1.0 | [..]}
    {"kind": "cl-discrete",   "lambda": .., "atoms": [..], "weights": [..]}
    {"kind": "cl-quadrature", "lambda": .., "mixing": {"family": .., ..},
     "quadrature": {"absolute_tol": .., "relative_tol": .., "max_subdivisions": ..}}

Mixing families: "uniform_bump" (center, half_width) and "rayleigh" (sigma2).
A scalar "lambda" is broadcast to the requested dimension at load time.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import DimensionMismatch, InvalidSpec, ParseError
from .regularizers import (
    CLDiscreteRegularizer,
    CLQuadratureRegularizer,
    L1Regularizer,
    QuadratureConfig,
    Regularizer,
    rayleigh_mixing,
    uniform_bump,
)

FLOAT_FMT = "%.17g"


def _format_real(v: float) -> str:
    return FLOAT_FMT % v


def write_matrix_csv(path, M) -> None:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionMismatch("matrix must be 2-dimensional")
    with open(path, "w", newline="\n") as fh:
        for row in M:
            fh.write(",".join(_format_real(v) for v in row) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    width = None
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ParseError(
                    f"row has {len(cells)} cells, expected {width}", line=line_no
                )
            parsed = []
            for col_no, cell in enumerate(cells, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"could not parse {cell!r} as a real number",
                        line=line_no, column=col_no,
                    ) from None
            rows.append(parsed)
    if not rows:
        raise ParseError("empty matrix file", line=1)
    return np.asarray(rows, dtype=float)


def write_vector_csv(path, v) -> None:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch("vector must be 1-dimensional")
    write_matrix_csv(path, v[:, np.newaxis])


def read_vector_csv(path) -> np.ndarray:
    M = read_matrix_csv(path)
    if M.shape[1] != 1:
        raise DimensionMismatch(f"expected a single column, got {M.shape[1]}")
    return M[:, 0]


# -- regularizer specs ---------------------------------------------------------


def regularizer_to_spec(reg: Regularizer) -> dict:
    spec: dict = {"kind": reg.kind, "lambda": reg.rates.tolist()}
    if reg.kind == "cl-discrete":
        spec["atoms"] = reg.atoms.tolist()
        spec["weights"] = reg.mix_weights.tolist()
    elif reg.kind == "cl-quadrature":
        mixing = reg.mixing
        if mixing.family is None:
            raise InvalidSpec("only named mixing families can be serialized")
        spec["mixing"] = {"family": mixing.family, **(mixing.params or {})}
        spec["quadrature"] = {
            "absolute_tol": reg.quadrature.absolute_tol,
            "relative_tol": reg.quadrature.relative_tol,
            "max_subdivisions": reg.quadrature.max_subdivisions,
        }
    return spec


def _mixing_from_spec(spec: dict):
    spec = dict(spec)
    family = spec.pop("family", None)
    if family == "uniform_bump":
        return uniform_bump(**spec)
    if family == "rayleigh":
        return rayleigh_mixing(**spec)
    raise InvalidSpec(f"unknown mixing family {family!r}")


def regularizer_from_spec(spec, n: int | None = None) -> Regularizer:
    """Build a regularizer from a spec dict or a path to a JSON file."""
    if isinstance(spec, (str, os.PathLike)):
        with open(spec) as fh:
            try:
                spec = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno,
                                 column=exc.colno) from None
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidSpec("regularizer spec must be an object with a 'kind'")
    kind = spec["kind"]
    lam = spec.get("lambda", 1.0)
    if kind == "l1":
        return L1Regularizer(lam, n=n)
    if kind == "cl-discrete":
        if "atoms" not in spec or "weights" not in spec:
            raise InvalidSpec("cl-discrete spec needs 'atoms' and 'weights'")
        return CLDiscreteRegularizer(lam, spec["atoms"], spec["weights"], n=n)
    if kind == "cl-quadrature":
        if "mixing" not in spec:
            raise InvalidSpec("cl-quadrature spec needs a 'mixing' object")
        mixing = _mixing_from_spec(spec["mixing"])
        quad = QuadratureConfig(**spec["quadrature"]) if "quadrature" in spec else None
        return CLQuadratureRegularizer(lam, mixing, n=n, quadrature=quad)
    raise InvalidSpec(f"unknown regularizer kind {kind!r}")


def io_roundtrip(path, obj):
    """Write ``obj`` to ``path`` and read it back (exact for reals).

    Supports 2-d arrays (matrix CSV), 1-d arrays (vector CSV), regularizers
    (JSON spec), and plain dicts (JSON).
    """
    if isinstance(obj, Regularizer):
        with open(path, "w", newline="\n") as fh:
            json.dump(regularizer_to_spec(obj), fh, indent=2)
        return regularizer_from_spec(path)
    if isinstance(obj, dict):
        with open(path, "w", newline="\n") as fh:
            json.dump(obj, fh, indent=2)
        with open(path) as fh:
            return json.load(fh)
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 2:
        write_matrix_csv(path, arr)
        return read_matrix_csv(path)
    if arr.ndim == 1:
        write_vector_csv(path, arr)
        return read_vector_csv(path)
    raise InvalidSpec(f"unsupported object of type {type(obj).__name__}")

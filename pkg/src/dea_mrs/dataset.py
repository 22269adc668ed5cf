"""DMU data: containers, validation and the CSV exchange format.

CSV layout: a header ``name,i:<label>...,o:<label>...`` followed by one row
per DMU. Lines starting with ``#`` (after optional whitespace) and blank lines
are skipped. Row order is DMU index order everywhere downstream.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class Dmu:
    name: str
    inputs: tuple
    outputs: tuple

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(float(v) for v in self.inputs))
        object.__setattr__(self, "outputs", tuple(float(v) for v in self.outputs))


@dataclass(frozen=True)
class Dataset:
    dmus: tuple
    input_labels: tuple
    output_labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "dmus", tuple(self.dmus))
        object.__setattr__(self, "input_labels", tuple(self.input_labels))
        object.__setattr__(self, "output_labels", tuple(self.output_labels))

    @classmethod
    def from_arrays(cls, X, Y, names=None, input_labels=None, output_labels=None, check=True) -> "Dataset":
        """Build from an ``(n, m)`` input matrix and ``(n, s)`` output matrix."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        if X.shape[0] != Y.shape[0]:
            raise ValidationError([f"input rows ({X.shape[0]}) and output rows ({Y.shape[0]}) differ"])
        n = X.shape[0]
        names = list(names) if names is not None else [f"DMU{j + 1}" for j in range(n)]
        input_labels = list(input_labels) if input_labels is not None else [f"x{i + 1}" for i in range(X.shape[1])]
        output_labels = list(output_labels) if output_labels is not None else [f"y{r + 1}" for r in range(Y.shape[1])]
        ds = cls(tuple(Dmu(nm, x, y) for nm, x, y in zip(names, X, Y)), input_labels, output_labels)
        if check:
            ds.require_valid()
        return ds

    @property
    def n(self) -> int:
        return len(self.dmus)

    @property
    def m(self) -> int:
        return len(self.input_labels)

    @property
    def s(self) -> int:
        return len(self.output_labels)

    @property
    def names(self) -> tuple:
        return tuple(d.name for d in self.dmus)

    @cached_property
    def X(self) -> np.ndarray:
        """Inputs as a read-only ``(n, m)`` array."""
        arr = np.array([d.inputs for d in self.dmus], dtype=float).reshape(self.n, self.m)
        arr.flags.writeable = False
        return arr

    @cached_property
    def Y(self) -> np.ndarray:
        arr = np.array([d.outputs for d in self.dmus], dtype=float).reshape(self.n, self.s)
        arr.flags.writeable = False
        return arr

    def index(self, name: str) -> int:
        for j, d in enumerate(self.dmus):
            if d.name == name:
                return j
        raise KeyError(name)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(tuple(self.dmus[j] for j in indices), self.input_labels, self.output_labels)

    def require_valid(self) -> None:
        problems = validate(self)
        if problems:
            raise ValidationError(problems)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.dmus, self.input_labels, self.output_labels) == (
            other.dmus,
            other.input_labels,
            other.output_labels,
        )

    def __hash__(self):
        return hash((self.dmus, self.input_labels, self.output_labels))


def validate(ds: Dataset) -> list:
    """Return human-readable violations; an empty list means the data are usable."""
    out = []
    if ds.n < 1:
        out.append("dataset has no DMUs")
    if ds.m < 1:
        out.append("dataset has no input columns")
    if ds.s < 1:
        out.append("dataset has no output columns")
    seen = set()
    for d in ds.dmus:
        if d.name in seen:
            out.append(f"duplicate DMU name {d.name!r}")
        seen.add(d.name)
        if len(d.inputs) != ds.m:
            out.append(f"DMU {d.name!r} has {len(d.inputs)} inputs, expected {ds.m}")
        if len(d.outputs) != ds.s:
            out.append(f"DMU {d.name!r} has {len(d.outputs)} outputs, expected {ds.s}")
        values = d.inputs + d.outputs
        if any(not math.isfinite(v) for v in values):
            out.append(f"DMU {d.name!r} has non-finite values")
            continue
        if any(v < 0 for v in values):
            out.append(f"DMU {d.name!r} has negative values")
        if d.inputs and all(v == 0 for v in d.inputs):
            out.append(f"DMU {d.name!r} has an all-zero input vector")
        if d.outputs and all(v == 0 for v in d.outputs):
            out.append(f"DMU {d.name!r} has an all-zero output vector")
    return out


def _data_lines(lines: Iterable[str]):
    for lineno, line in enumerate(lines, 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, line


def parse_csv(text: str, source: str = "<string>") -> Dataset:
    lines = list(_data_lines(io.StringIO(text)))
    if not lines:
        raise ParseError(f"{source}: no header row")
    rows = list(csv.reader([ln for _, ln in lines]))
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "name":
        raise ParseError(f"{source}:{lines[0][0]}: header must start with 'name'")
    in_cols, out_cols = [], []
    for k, h in enumerate(header[1:], 1):
        if h.startswith("i:"):
            if out_cols:
                raise ParseError(f"{source}: input column {h!r} after output columns")
            in_cols.append(h[2:])
        elif h.startswith("o:"):
            out_cols.append(h[2:])
        else:
            raise ParseError(f"{source}: column {h!r} must be prefixed 'i:' or 'o:'")
    width = len(header)
    dmus = []
    for (lineno, _), row in zip(lines[1:], rows[1:]):
        if len(row) != width:
            raise ParseError(f"{source}:{lineno}: expected {width} fields, found {len(row)}")
        try:
            values = [float(v) for v in row[1:]]
        except ValueError as exc:
            raise ParseError(f"{source}:{lineno}: {exc}") from None
        m = len(in_cols)
        dmus.append(Dmu(row[0].strip(), values[:m], values[m:]))
    ds = Dataset(tuple(dmus), in_cols, out_cols)
    ds.require_valid()
    return ds


def load_csv(path) -> Dataset:
    """Read and validate a dataset file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    return parse_csv(text, str(path))


def to_csv(ds: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name"] + [f"i:{lb}" for lb in ds.input_labels] + [f"o:{lb}" for lb in ds.output_labels])
    for d in ds.dmus:
        w.writerow([d.name] + [repr(v) for v in d.inputs + d.outputs])
    return buf.getvalue()


def save_csv(ds: Dataset, path) -> None:
    Path(path).write_text(to_csv(ds), encoding="utf-8")


def table1() -> Dataset:
    """The seven-DMU single-input single-output example bundled with the package."""
    text = resources.files("dea_mrs").joinpath("data/table1.csv").read_text(encoding="utf-8")
    return parse_csv(text, "table1.csv")

"""Text formats for states and matrices, and JSON report serialization.

State files are plain text: an optional ``label:`` line, a ``dims: K M N``
line, then one record per amplitude with 1-based indices::

    # comment
    label: bell-like
    dims: 2 2 2
    1 1 2  0.70710678118654757 0
    2 1 1  0.70710678118654757 0

Unlisted entries are zero.  Matrix files are identical except that records
carry two indices (``dims: R C`` and ``row col re im``).  Values are written
with 17 significant digits, which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import json
import warnings

import numpy as np

from .states import TripartiteState
from .tolerances import NORM_TOL

DECISION_SCHEMA = "triequiv.decision/1"
INVARIANTS_SCHEMA = "triequiv.invariants/1"
FACTORIZE_SCHEMA = "triequiv.factorize/1"


class StateFormatError(ValueError):
    """Malformed state or matrix document; message carries source:line."""


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _scan(text: str, source: str, index_count: int):
    """Yield (label, dims, records) from a document; records keep line numbers."""
    label = None
    dims = None
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("label:"):
            if label is not None:
                raise StateFormatError(f"{source}:{lineno}: duplicate label line")
            label = line[len("label:"):].strip()
            continue
        if line.startswith("dims:"):
            if dims is not None:
                raise StateFormatError(f"{source}:{lineno}: duplicate dims line")
            tokens = line[len("dims:"):].split()
            if len(tokens) != index_count:
                raise StateFormatError(
                    f"{source}:{lineno}: dims needs {index_count} integers, "
                    f"got {len(tokens)}"
                )
            try:
                dims = tuple(int(t) for t in tokens)
            except ValueError as exc:
                raise StateFormatError(f"{source}:{lineno}: bad dims: {exc}") from None
            if min(dims) < 1:
                raise StateFormatError(f"{source}:{lineno}: dims must be positive")
            continue
        if dims is None:
            raise StateFormatError(
                f"{source}:{lineno}: record appears before the dims line"
            )
        tokens = line.split()
        if len(tokens) != index_count + 2:
            raise StateFormatError(
                f"{source}:{lineno}: expected {index_count} indices plus re im, "
                f"got {len(tokens)} fields"
            )
        try:
            idx = tuple(int(t) for t in tokens[:index_count])
            re_part = float(tokens[index_count])
            im_part = float(tokens[index_count + 1])
        except ValueError as exc:
            raise StateFormatError(f"{source}:{lineno}: bad record: {exc}") from None
        records.append((lineno, idx, complex(re_part, im_part)))
    if dims is None:
        raise StateFormatError(f"{source}: missing dims line")
    return label, dims, records


def _fill(dims, records, source: str) -> np.ndarray:
    out = np.zeros(dims, dtype=np.complex128)
    seen = set()
    for lineno, idx, value in records:
        for pos, (i, d) in enumerate(zip(idx, dims), start=1):
            if not 1 <= i <= d:
                raise StateFormatError(
                    f"{source}:{lineno}: index {idx} out of range for dims {dims} "
                    f"(component {pos})"
                )
        if idx in seen:
            raise StateFormatError(f"{source}:{lineno}: duplicate index {idx}")
        seen.add(idx)
        out[tuple(i - 1 for i in idx)] = value
    return out


def parse_state(
    text: str, strict: bool = False, source: str = "<string>"
) -> TripartiteState:
    """Parse a state document.

    In strict mode the amplitudes must already be normalized within the
    package norm tolerance; otherwise off-norm states are renormalized with a
    ``RuntimeWarning``.  A state with no (or all-zero) amplitude records is
    rejected as a zero state.
    """
    label, dims, records = _scan(text, source, index_count=3)
    del label
    amps = _fill(dims, records, source)
    sq_norm = float(np.sum(np.abs(amps) ** 2))
    if sq_norm == 0.0:
        raise StateFormatError(f"{source}: amplitudes describe the zero state")
    deviation = abs(sq_norm - 1.0)
    if deviation > NORM_TOL:
        if strict:
            raise StateFormatError(
                f"{source}: state is not normalized (sum |a|^2 = {sq_norm!r}) "
                "and strict mode is on"
            )
        warnings.warn(
            f"{source}: renormalizing state with sum |a|^2 = {sq_norm!r}",
            RuntimeWarning,
            stacklevel=2,
        )
        amps = amps / np.sqrt(sq_norm)
    return TripartiteState(amps)


def load_state(path, strict: bool = False) -> TripartiteState:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_state(handle.read(), strict=strict, source=str(path))


def serialize_state(state: TripartiteState, label: str | None = None) -> str:
    """Render a state document; exact round trip through :func:`parse_state`."""
    lines = []
    if label:
        lines.append(f"label: {label}")
    k, m, n = state.dims
    lines.append(f"dims: {k} {m} {n}")
    amps = state.amplitudes
    for (i, j, l), value in np.ndenumerate(amps):
        if value != 0:
            lines.append(
                f"{i + 1} {j + 1} {l + 1}  {_fmt(value.real)} {_fmt(value.imag)}"
            )
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, source: str = "<string>") -> np.ndarray:
    """Parse a matrix document (records ``row col re im``, 1-based)."""
    label, dims, records = _scan(text, source, index_count=2)
    del label
    return _fill(dims, records, source)


def load_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_matrix(handle.read(), source=str(path))


def serialize_matrix(matrix: np.ndarray, label: str | None = None) -> str:
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2:
        raise ValueError(f"expected a matrix, got {matrix.ndim} axes")
    lines = []
    if label:
        lines.append(f"label: {label}")
    rows, cols = matrix.shape
    lines.append(f"dims: {rows} {cols}")
    for (r, c), value in np.ndenumerate(matrix):
        if value != 0:
            lines.append(f"{r + 1} {c + 1}  {_fmt(value.real)} {_fmt(value.imag)}")
    return "\n".join(lines) + "\n"


def matrix_pairs(matrix: np.ndarray) -> list[list[list[float]]]:
    """Complex matrix as nested [re, im] pairs (JSON-safe)."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    return [
        [[float(v.real), float(v.imag)] for v in row] for row in matrix
    ]


def matrix_from_pairs(obj) -> np.ndarray:
    return np.array(
        [[complex(re, im) for re, im in row] for row in obj], dtype=np.complex128
    )


def report_to_json(report: dict) -> str:
    """Stable rendering: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> dict:
    report = json.loads(text)
    if not isinstance(report, dict) or "schema" not in report:
        raise StateFormatError("report document lacks a schema field")
    return report

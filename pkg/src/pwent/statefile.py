"""Line-oriented text format for states, with bit-exact round trips.

Layout::

    dims: 2 2 2
    kind: pure          # or mixed
    0.7071067811865476,0.0
    ...

One "re,im" pair per line, row-major; '#' starts a comment; floats are
written with shortest round-trip precision so save/load/save is
byte-identical.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .registers import DensityMatrix, PureState, RegisterShape

__all__ = ["StateFileError", "save_state", "load_state", "state_to_text", "state_from_text"]


class StateFileError(ValueError):
    """Malformed state file; carries the offending 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def state_to_text(state: PureState | DensityMatrix) -> str:
    out = io.StringIO()
    out.write("dims: " + " ".join(str(d) for d in state.shape.dims) + "\n")
    if isinstance(state, PureState):
        out.write("kind: pure\n")
        entries = state.amp
    elif isinstance(state, DensityMatrix):
        out.write("kind: mixed\n")
        entries = state.mat.reshape(-1)
    else:
        raise TypeError(f"cannot serialize {type(state).__name__}")
    for z in entries:
        out.write(f"{z.real!r},{z.imag!r}\n")
    return out.getvalue()


def save_state(path, state: PureState | DensityMatrix) -> None:
    Path(path).write_text(state_to_text(state), encoding="ascii")


def state_from_text(text: str) -> PureState | DensityMatrix:
    dims = None
    kind = None
    entries: list[complex] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("dims:"):
            if dims is not None:
                raise StateFileError(line_no, "duplicate dims header")
            try:
                dims = tuple(int(tok) for tok in line[5:].split())
            except ValueError:
                raise StateFileError(line_no, f"bad dims header {line!r}") from None
            if not dims:
                raise StateFileError(line_no, "empty dims header")
            continue
        if line.startswith("kind:"):
            if kind is not None:
                raise StateFileError(line_no, "duplicate kind header")
            kind = line[5:].strip()
            if kind not in ("pure", "mixed"):
                raise StateFileError(line_no, f"kind must be pure or mixed, got {kind!r}")
            continue
        if dims is None or kind is None:
            raise StateFileError(line_no, "entries before dims/kind headers")
        parts = line.split(",")
        if len(parts) != 2:
            raise StateFileError(line_no, f"expected 're,im', got {line!r}")
        try:
            entries.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise StateFileError(line_no, f"cannot parse numbers in {line!r}") from None

    if dims is None:
        raise StateFileError(1, "missing dims header")
    if kind is None:
        raise StateFileError(1, "missing kind header")
    shape = RegisterShape(dims)
    want = shape.size if kind == "pure" else shape.size ** 2
    if len(entries) != want:
        raise StateFileError(1, f"expected {want} entries for {kind} state on dims "
                                f"{dims}, found {len(entries)}")
    arr = np.array(entries, dtype=complex)
    if kind == "pure":
        return PureState(shape, arr)
    return DensityMatrix(shape, arr.reshape(shape.size, shape.size), check_psd=True)


def load_state(path) -> PureState | DensityMatrix:
    return state_from_text(Path(path).read_text(encoding="ascii"))

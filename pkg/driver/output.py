"""
On-disk formats of a run directory:

    u@<t>.hpsnap, w@<t>.hpsnap  HPSNAP1 snapshots: one text header line
                                "HPSNAP1 nx ny x_min x_max y_min y_max", then nx*ny
                                little-endian float64 values, values[i, j] row-major
                                with i along x
    u@<t>.pgm, w@<t>.pgm        binary greyscale images, y_max at the top
    series.csv                  one diagnostics record per step
"""

import logging
import math
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from hyperprey.analysis import DiagnosticsSeries
from hyperprey.errors import InvalidParameterError, SnapshotFormatError
from hyperprey.grid import Field, GridSpec
from hyperprey.solver.coupling import SimState
from hyperprey.utils import format_float

SNAPSHOT_MAGIC = "HPSNAP1"


def snapshot_header(g: GridSpec) -> str:
    bounds = (g.x_min, g.x_max, g.y_min, g.y_max)
    return " ".join([SNAPSHOT_MAGIC, str(g.nx), str(g.ny), *map(format_float, bounds)])


def write_snapshot(f: Field, path: str | Path):
    payload = f.values.astype("<f8", copy=False).tobytes(order="C")
    try:
        with open(path, "wb") as fp:
            fp.write(snapshot_header(f.grid).encode("ascii") + b"\n")
            fp.write(payload)
    except OSError as e:
        raise OSError(f"Cannot write snapshot {path}: {e}") from e


def read_snapshot(path: str | Path) -> Field:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise OSError(f"Cannot read snapshot {path}: {e}") from e
    newline = data.find(b"\n")
    if newline < 0:
        raise SnapshotFormatError(f"{path}: malformed header (no header line)")
    tokens = data[:newline].decode("ascii", errors="replace").split()
    if len(tokens) != 7 or tokens[0] != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path}: malformed header {data[:newline][:80]!r}")
    try:
        nx, ny = int(tokens[1]), int(tokens[2])
        g = GridSpec(*map(float, tokens[3:]), nx=nx, ny=ny)
    except (ValueError, InvalidParameterError) as e:
        raise SnapshotFormatError(f"{path}: malformed header: {e}") from e
    payload = data[newline + 1 :]
    expected = nx * ny * 8
    if len(payload) < expected:
        raise SnapshotFormatError(
            f"{path}: truncated payload ({len(payload)} of {expected} bytes)"
        )
    if len(payload) > expected:
        raise SnapshotFormatError(
            f"{path}: dimension mismatch, {len(payload)} payload bytes for {nx}x{ny} cells"
        )
    values = np.frombuffer(payload, dtype="<f8").reshape(nx, ny)
    return Field(g, values)


def write_series(d: DiagnosticsSeries, path: str | Path):
    try:
        # default float rendering is repr, the shortest text that round-trips
        d.to_frame().to_csv(path, index=False)
    except OSError as e:
        raise OSError(f"Cannot write series {path}: {e}") from e


def read_series(path: str | Path) -> DiagnosticsSeries:
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except OSError as e:
        raise OSError(f"Cannot read series {path}: {e}") from e
    return DiagnosticsSeries.from_frame(df)


def to_pixels(f: Field, lo: float, hi: float) -> np.ndarray:
    """Greyscale image rows, top row at y_max."""
    if not lo < hi:
        raise InvalidParameterError(f"Display range needs lo < hi; got lo={lo}, hi={hi}")
    scaled = np.rint(255.0 * (f.values - lo) / (hi - lo))
    return np.clip(scaled, 0, 255).astype(np.uint8)[:, ::-1].T


def render_pgm(f: Field, lo: float, hi: float, path: str | Path):
    pixels = to_pixels(f, lo, hi)
    height, width = pixels.shape
    try:
        with open(path, "wb") as fp:
            fp.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            fp.write(np.ascontiguousarray(pixels).tobytes())
    except OSError as e:
        raise OSError(f"Cannot write image {path}: {e}") from e


def snapshot_tag(t: float) -> str:
    return f"{t:.6g}"


class SnapshotWriter:
    """Run observer writing both fields at the start and at each requested clock value."""

    def __init__(
        self,
        output_dir: str | Path,
        times: Sequence[float],
        display_u: Tuple[float, float],
        display_w: Tuple[float, float],
    ):
        self.output_dir = Path(output_dir)
        self.pending = sorted(times)
        self.display_u = display_u
        self.display_w = display_w
        self.written: List[float] = []

    def __call__(self, s: SimState):
        due = s.step_index == 0
        while self.pending and s.t >= self.pending[0] - 1e-12 * max(1.0, self.pending[0]):
            self.pending.pop(0)
            due = True
        if not due or (self.written and math.isclose(self.written[-1], s.t)):
            return
        tag = snapshot_tag(s.t)
        for name, f, (lo, hi) in (
            ("u", s.u, self.display_u),
            ("w", s.w, self.display_w),
        ):
            write_snapshot(f, self.output_dir / f"{name}@{tag}.hpsnap")
            render_pgm(f, lo, hi, self.output_dir / f"{name}@{tag}.pgm")
        self.written.append(s.t)
        logging.info(f"Snapshot at t={s.t:g} written to {self.output_dir}")

import csv
import json
import logging
import struct
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import numpy as np

from app.core import ConfigError, GridError, settings
from app.models import LEDGER_HEADER, FieldState, Grid, LabConfig, RunManifest, Trajectory

logger = logging.getLogger(__name__)

SNAPSHOT_MAGIC = b"GDNLS1\0"
SNAPSHOT_HEADER = struct.Struct("<7sxQd8x")  # magic, pad, n, L, reserved: 32 bytes


def format_value(value) -> str:
    """17 significant digits for floats, plain text otherwise"""
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return str(value)


class RunStore:
    """Directorio de una corrida: manifest.json y tablas CSV"""

    def __init__(self, root: Union[str, Path], command: str, config: LabConfig):
        self.command = command
        self.digest = config.digest()
        self.path = Path(root) / command / self.digest[:12]

    @classmethod
    def open(cls, command: str, config: LabConfig, root: Union[str, Path, None] = None) -> "RunStore":
        store = cls(root or settings.OUT, command, config)
        store.path.mkdir(parents=True, exist_ok=True)
        logger.info(f"run directory {store.path}")
        return store

    # =========================
    # MANIFEST
    # =========================
    def write_manifest(self, manifest: RunManifest) -> Path:
        target = self.path / "manifest.json"
        target.write_text(manifest.model_dump_json(indent=2, by_alias=True), encoding="utf-8")
        return target

    def read_manifest(self) -> RunManifest:
        return read_manifest(self.path / "manifest.json")

    # =========================
    # TABLES
    # =========================
    def write_table(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
        return write_table(self.path / name, header, rows)

    def write_ledger(self, name: str, traj: Trajectory) -> Path:
        return self.write_table(name, LEDGER_HEADER, (row.as_row() for row in traj.ledger))

    def write_snapshot(self, stem: str, u: FieldState, binary: bool = False) -> Path:
        """`<stem>.csv`, or `<stem>.bin` in the GDNLS1 layout when binary is set"""
        if binary:
            return write_snapshot_binary(self.path / f"{stem}.bin", u)
        return write_snapshot_csv(self.path / f"{stem}.csv", u)

    def write_endpoints(self, first: FieldState, last: FieldState, binary: bool = False) -> List[Path]:
        return [self.write_snapshot("u0", first, binary), self.write_snapshot("u_final", last, binary)]


def read_manifest(path: Union[str, Path]) -> RunManifest:
    try:
        return RunManifest.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}")


def write_table(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
    return path


def read_table(path: Union[str, Path]) -> tuple[List[str], List[List[str]]]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        return header, [row for row in reader]


# =========================
# SNAPSHOTS
# =========================
def write_snapshot_csv(path: Union[str, Path], u: FieldState) -> Path:
    """CSV `x,re,im`, one row per grid point"""
    rows = zip(u.grid.points, u.values.real, u.values.imag)
    return write_table(path, ["x", "re", "im"], rows)


def read_snapshot_csv(path: Union[str, Path], time: float = 0.0) -> FieldState:
    """
    Inverse of write_snapshot_csv; the grid is recovered from the x column

    Raises:
        GridError: If the points are not a uniform grid starting at -L/2
    """
    header, rows = read_table(path)
    if header != ["x", "re", "im"]:
        raise GridError(f"unexpected snapshot header {header}")
    data = np.array(rows, dtype=float)
    n = data.shape[0]
    length = -2.0 * data[0, 0]
    grid = Grid(n=n, length=length)
    if not np.allclose(data[:, 0], grid.points, rtol=0, atol=1e-12 * max(length, 1.0)):
        raise GridError(f"{path} does not hold a uniform periodic grid")
    return FieldState(grid=grid, values=data[:, 1] + 1j * data[:, 2], time=time)


def write_snapshot_binary(path: Union[str, Path], u: FieldState) -> Path:
    """32-byte header then little-endian float64 (x, re, im) triples"""
    path = Path(path)
    body = np.column_stack([u.grid.points, u.values.real, u.values.imag]).astype("<f8")
    path.write_bytes(SNAPSHOT_HEADER.pack(SNAPSHOT_MAGIC, u.grid.n, u.grid.length) + body.tobytes())
    return path


def read_snapshot_binary(path: Union[str, Path], time: float = 0.0) -> FieldState:
    payload = Path(path).read_bytes()
    if len(payload) < SNAPSHOT_HEADER.size:
        raise GridError(f"{path} is shorter than a snapshot header")
    magic, n, length = SNAPSHOT_HEADER.unpack_from(payload)
    if magic != SNAPSHOT_MAGIC:
        raise GridError(f"{path} is not a GDNLS1 snapshot")
    body = np.frombuffer(payload, dtype="<f8", offset=SNAPSHOT_HEADER.size)
    if body.size != 3 * n:
        raise GridError(f"{path} holds {body.size // 3} points, header says {n}")
    data = body.reshape(n, 3)
    return FieldState(grid=Grid(n=n, length=length), values=data[:, 1] + 1j * data[:, 2], time=time)

"""On-disk formats: JSON run configs, binary field snapshots, diagnostics CSV.

The snapshot layout is fixed: a little-endian header
``magic "DGPE" | u32 version | 3 x u32 n | 3 x f64 L | f64 time |
f64 lambda1 | f64 lambda2 | u32 crc32-of-header`` followed by
``16 * n1*n2*n3`` bytes of (re, im) float64 pairs with the x index varying
fastest.
"""

from __future__ import annotations

import csv
import json
import struct
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .datafactory import DataSpec
from .errors import DomainError
from .functionals import CouplingParams
from .grid import ComplexField, Grid, make_grid
from .groundstate import GroundStateRecord, MinimizerOptions
from .propagator import DIAG_COLUMNS, DiagnosticsRow, PropagatorConfig, Trajectory

__all__ = [
    "CONFIG_SCHEMA_VERSION",
    "SNAPSHOT_MAGIC",
    "RunConfig",
    "write_snapshot",
    "read_snapshot",
    "write_diagnostics_csv",
    "read_diagnostics_csv",
    "write_record",
    "read_record",
]

CONFIG_SCHEMA_VERSION = 1
SNAPSHOT_MAGIC = b"DGPE"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<4sI3I3dd2d")  # magic, version, n triple, L triple, t, couplings
_CRC = struct.Struct("<I")


@dataclass(frozen=True)
class ClassifierConfig:
    strict_band: float = 1e-6
    at_threshold_band: float = 1e-4
    delta: float | None = None  # None -> coercivity-informed default


@dataclass(frozen=True)
class SweepConfig:
    lambda1: tuple[float, ...] = ()
    lambda2: tuple[float, ...] = ()
    amplitudes: tuple[float, ...] = (1.0,)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run from the config alone."""

    grid_n: tuple[int, int, int] = (32, 32, 32)
    grid_L: tuple[float, float, float] = (16.0, 16.0, 16.0)
    couplings: CouplingParams = CouplingParams(-1.0, 0.0)
    data: DataSpec = field(
        default_factory=lambda: DataSpec(
            "gaussian", {"amp": 1.0, "widths": [1.0, 1.0, 1.0]}
        )
    )
    propagator: PropagatorConfig = PropagatorConfig()
    classifier: ClassifierConfig = ClassifierConfig()
    minimizer: MinimizerOptions = MinimizerOptions()
    sweep: SweepConfig | None = None
    seed: int = 0
    out_dir: str = "out"
    schema_version: int = CONFIG_SCHEMA_VERSION

    def grid(self) -> Grid:
        return make_grid(self.grid_n, self.grid_L)

    def to_dict(self) -> dict:
        d = {
            "schema_version": self.schema_version,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "grid": {"n": list(self.grid_n), "L": list(self.grid_L)},
            "couplings": {
                "lambda1": self.couplings.lambda1,
                "lambda2": self.couplings.lambda2,
            },
            "data": self.data.to_dict(),
            "propagator": asdict(self.propagator),
            "classifier": asdict(self.classifier),
            "minimizer": asdict(self.minimizer),
        }
        d["propagator"]["snapshot_times"] = list(self.propagator.snapshot_times)
        if self.sweep is not None:
            d["sweep"] = {
                "lambda1": list(self.sweep.lambda1),
                "lambda2": list(self.sweep.lambda2),
                "amplitudes": list(self.sweep.amplitudes),
            }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        ver = d.get("schema_version", CONFIG_SCHEMA_VERSION)
        if ver != CONFIG_SCHEMA_VERSION:
            raise DomainError(f"unsupported config schema version {ver}")
        prop = dict(d.get("propagator", {}))
        if "snapshot_times" in prop:
            prop["snapshot_times"] = tuple(prop["snapshot_times"])
        sweep = None
        if d.get("sweep"):
            s = d["sweep"]
            sweep = SweepConfig(
                tuple(s.get("lambda1", ())),
                tuple(s.get("lambda2", ())),
                tuple(s.get("amplitudes", (1.0,))),
            )
        return cls(
            grid_n=tuple(d["grid"]["n"]),
            grid_L=tuple(d["grid"]["L"]),
            couplings=CouplingParams(
                d["couplings"]["lambda1"], d["couplings"]["lambda2"]
            ),
            data=DataSpec.from_dict(d["data"]),
            propagator=PropagatorConfig(**prop),
            classifier=ClassifierConfig(**d.get("classifier", {})),
            minimizer=MinimizerOptions(**d.get("minimizer", {})),
            sweep=sweep,
            seed=d.get("seed", 0),
            out_dir=d.get("out_dir", "out"),
            schema_version=ver,
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# binary field snapshots
# ---------------------------------------------------------------------------


def write_snapshot(path, f: ComplexField, time: float, cp: CouplingParams) -> None:
    g = f.grid
    head = _HEADER.pack(
        SNAPSHOT_MAGIC,
        SNAPSHOT_VERSION,
        *g.n,
        *g.L,
        float(time),
        cp.lambda1,
        cp.lambda2,
    )
    crc = zlib.crc32(head) & 0xFFFFFFFF
    # x-fastest ordering: transpose so axis 0 (x) varies fastest in the flat file
    flat = np.ascontiguousarray(f.values.transpose(2, 1, 0))
    payload = np.empty(flat.shape + (2,), dtype="<f8")
    payload[..., 0] = flat.real
    payload[..., 1] = flat.imag
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(_CRC.pack(crc))
        fh.write(payload.tobytes())


def read_snapshot(path):
    """Returns ``(field, time, couplings)``; validates magic, checksum, size."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size + _CRC.size:
        raise DomainError(f"snapshot {path} truncated")
    head = raw[: _HEADER.size]
    (magic, ver, n1, n2, n3, L1, L2, L3, t, l1, l2) = _HEADER.unpack(head)
    if magic != SNAPSHOT_MAGIC:
        raise DomainError(f"bad snapshot magic {magic!r}")
    if ver != SNAPSHOT_VERSION:
        raise DomainError(f"unsupported snapshot version {ver}")
    (crc,) = _CRC.unpack(raw[_HEADER.size : _HEADER.size + _CRC.size])
    if crc != (zlib.crc32(head) & 0xFFFFFFFF):
        raise DomainError("snapshot header checksum mismatch")
    n = (n1, n2, n3)
    expected = 16 * n1 * n2 * n3
    body = raw[_HEADER.size + _CRC.size :]
    if len(body) != expected:
        raise DomainError(
            f"snapshot payload is {len(body)} bytes, expected {expected}"
        )
    arr = np.frombuffer(body, dtype="<f8").reshape((n3, n2, n1, 2))
    vals = (arr[..., 0] + 1j * arr[..., 1]).transpose(2, 1, 0)
    g = Grid(n, (L1, L2, L3))
    return ComplexField(g, vals.copy()), t, CouplingParams(l1, l2)


# ---------------------------------------------------------------------------
# diagnostics CSV
# ---------------------------------------------------------------------------


def write_diagnostics_csv(path, traj: Trajectory) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DIAG_COLUMNS)
        for row in traj.rows:
            w.writerow(
                [f"{v:.17g}" if isinstance(v, float) else v for v in row.csv_values()]
            )


def read_diagnostics_csv(path) -> Trajectory:
    traj = Trajectory()
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header != DIAG_COLUMNS:
            raise DomainError(f"unexpected CSV header {header}")
        for line in r:
            vals = [float(v) for v in line[:-1]] + [line[-1]]
            traj.rows.append(DiagnosticsRow(*vals))
    if traj.rows:
        traj.verdict = traj.rows[-1].verdict_flag
    return traj


# ---------------------------------------------------------------------------
# ground-state records
# ---------------------------------------------------------------------------


def write_record(out_dir, rec: GroundStateRecord) -> tuple[Path, Path]:
    """Summary JSON plus a binary snapshot of the profile."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary_path = out / "ground_state.json"
    snap_path = out / "ground_state.dgpe"
    summary_path.write_text(json.dumps(rec.summary(), indent=2, sort_keys=True))
    write_snapshot(snap_path, rec.phi, 0.0, rec.cp)
    return summary_path, snap_path


def read_record(out_dir) -> GroundStateRecord:
    out = Path(out_dir)
    summary_path = out / "ground_state.json"
    snap_path = out / "ground_state.dgpe"
    if not summary_path.exists() or not snap_path.exists():
        raise FileNotFoundError(f"no ground-state record under {out}")
    s = json.loads(summary_path.read_text())
    phi, _, cp = read_snapshot(snap_path)
    return GroundStateRecord(
        phi=phi,
        cp=cp,
        copt=s["copt"],
        em=s["em"],
        hm=s["hm"],
        neg_nm=s["neg_nm"],
        residual=s["residual"],
        iterations=s["iterations"],
        seed=s.get("seed", 0),
        w_value=s.get("w_value", 0.0),
    )

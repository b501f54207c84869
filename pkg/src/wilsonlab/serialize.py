"""Reading and writing signals, families, matrices, plans and grids."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import BadParameters, DimensionMismatch
from .grid import GridSignal, GridSpec, make_grid
from .synth import SystemFamily
from . import sympl

_HEADER = np.dtype("<i8")
_SAMPLE = np.dtype("<c16")


# ---- signals --------------------------------------------------------------

def write_signal_csv(f: GridSignal, path) -> None:
    s = f.spec
    with open(path, "w", newline="") as fh:
        fh.write(f"# d={s.d} P={s.P} r={s.r}\n")
        w = csv.writer(fh)
        w.writerow(["index", "re", "im"])
        for i, v in enumerate(f.flat()):
            w.writerow([i, repr(float(v.real)), repr(float(v.imag))])


def _spec_from_comment(line: str) -> GridSpec:
    fields = dict(item.split("=") for item in line.lstrip("#").split())
    return make_grid(int(fields["d"]), int(fields["P"]), int(fields["r"]))


def read_signal_csv(path, spec: GridSpec | None = None) -> GridSignal:
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    if lines and lines[0].startswith("#"):
        found = _spec_from_comment(lines[0])
        if spec is not None and spec != found:
            raise DimensionMismatch(f"file grid {found} differs from requested {spec}")
        spec = found
        lines = lines[1:]
    if spec is None:
        raise BadParameters("CSV has no grid comment; pass the grid explicitly")
    rows = list(csv.DictReader(lines))
    vals = np.zeros(spec.size, dtype=complex)
    if len(rows) != spec.size:
        raise DimensionMismatch(f"expected {spec.size} rows, got {len(rows)}")
    for row in rows:
        vals[int(row["index"])] = complex(float(row["re"]), float(row["im"]))
    return GridSignal(spec, vals)


def _pack(spec: GridSpec, samples: np.ndarray) -> bytes:
    head = np.array([spec.d, spec.P, spec.r], dtype=_HEADER)
    return head.tobytes() + np.ascontiguousarray(samples, dtype=_SAMPLE).tobytes()


def _unpack(data: bytes):
    if len(data) < 3 * _HEADER.itemsize:
        raise DimensionMismatch("binary signal is shorter than its header")
    d, P, r = (int(x) for x in np.frombuffer(data[:24], dtype=_HEADER))
    spec = make_grid(d, P, r)
    body = np.frombuffer(data[24:], dtype=_SAMPLE)
    if body.size % spec.size:
        raise DimensionMismatch(f"{body.size} samples is not a multiple of {spec.size}")
    return spec, body.astype(complex)


def signal_to_bytes(f: GridSignal) -> bytes:
    """Little-endian int64 d, P, r followed by L^d complex128 samples."""
    return _pack(f.spec, f.flat())


def signal_from_bytes(data: bytes) -> GridSignal:
    spec, body = _unpack(data)
    if body.size != spec.size:
        raise DimensionMismatch(f"expected {spec.size} samples, got {body.size}")
    return GridSignal(spec, body)


def write_signal_binary(f: GridSignal, path) -> None:
    Path(path).write_bytes(signal_to_bytes(f))


def read_signal_binary(path) -> GridSignal:
    return signal_from_bytes(Path(path).read_bytes())


def read_signal(path, spec: GridSpec | None = None) -> GridSignal:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return read_signal_csv(path, spec)
    f = read_signal_binary(path)
    if spec is not None and f.spec != spec:
        raise DimensionMismatch(f"file grid {f.spec} differs from requested {spec}")
    return f


# ---- families ---------------------------------------------------------------

def _to_json(x):
    if isinstance(x, (tuple, list)):
        return [_to_json(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _to_label(x):
    if isinstance(x, list):
        return tuple(_to_label(v) for v in x)
    return x


def write_family(F: SystemFamily, path) -> Path:
    """Manifest JSON at ``path`` plus the sample block next to it (``.bin``)."""
    path = Path(path)
    data_path = path.with_suffix(".bin")
    manifest = {
        "schema": 1,
        "kind": F.kind,
        "grid": {"d": F.spec.d, "P": F.spec.P, "r": F.spec.r},
        "count": F.count,
        "data": data_path.name,
        "members": [{"index": i, "label": _to_json(lab)} for i, lab in enumerate(F.labels)],
    }
    data_path.write_bytes(_pack(F.spec, F.vectors.reshape(-1)))
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return data_path


def read_family(path) -> SystemFamily:
    path = Path(path)
    manifest = json.loads(path.read_text())
    spec, body = _unpack((path.parent / manifest["data"]).read_bytes())
    g = manifest["grid"]
    if (spec.d, spec.P, spec.r) != (g["d"], g["P"], g["r"]):
        raise DimensionMismatch("manifest grid and data header disagree")
    count = int(manifest["count"])
    if body.size != count * spec.size:
        raise DimensionMismatch(f"data holds {body.size // spec.size} members, manifest says {count}")
    members = sorted(manifest["members"], key=lambda m: m["index"])
    labels = [_to_label(m["label"]) for m in members]
    return SystemFamily(spec, body.reshape(count, spec.size), labels, None, manifest.get("kind", ""))


# ---- matrices and plans -------------------------------------------------------

def write_matrix_csv(A, path) -> None:
    np.savetxt(path, np.asarray(A, dtype=float), delimiter=",", fmt="%.17g")


def read_matrix_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def plan_to_json(plan: sympl.OperatorPlan) -> str:
    return json.dumps({"d": plan.d, "ops": plan.to_json()}, sort_keys=True)


def plan_from_json(text: str) -> sympl.OperatorPlan:
    obj = json.loads(text)
    if isinstance(obj, list):
        return sympl.plan_from_json(obj)
    return sympl.plan_from_json(obj["ops"], int(obj["d"]))


# ---- autocorrelation grids ------------------------------------------------------

def write_grid_csv(path, omega, values, error_bound=0.0, alpha=None) -> None:
    """One row per frequency: [alpha...,] omega..., re, im, error_bound."""
    om = np.atleast_2d(np.asarray(omega, dtype=float))
    if om.shape[0] == 1 and np.ndim(omega) == 1:
        om = om.T
    vals = np.asarray(values, dtype=complex).reshape(-1)
    d = om.shape[1]
    head = []
    if alpha is not None:
        head = [f"alpha{i + 1}" for i in range(len(alpha))]
    head += [f"omega{i + 1}" for i in range(d)] + ["re", "im", "error_bound"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(head)
        lead = [] if alpha is None else [repr(float(a)) for a in alpha]
        for row, v in zip(om, vals):
            w.writerow(lead + [repr(float(x)) for x in row]
                       + [repr(float(v.real)), repr(float(v.imag)), repr(float(error_bound))])

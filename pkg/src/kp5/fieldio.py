"""Binary checkpoint container for spectral fields.

Layout (little-endian)::

    offset  size  content
    0       4     magic b"KP5F"
    4       4     uint32 format version (1)
    8       4     uint32 nx
    12      4     uint32 ny
    16      8*N   complex64 coefficients, N = nx*ny

Coefficients are written for m in [-nx/2+1, nx/2] and n in [-ny/2+1, ny/2],
both ascending, m varying fastest. A JSON sidecar ``<path>.json`` repeats the
grid metadata. Storage is single precision, so a round trip is exact only up
to complex64 rounding.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import IntegrityError
from .spectral import GridSpec, SpectralField

MAGIC = b"KP5F"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def _ordered_indices(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    ms = np.arange(grid.m_range[0], grid.m_range[1] + 1) % grid.nx
    ns = np.arange(grid.n_range[0], grid.n_range[1] + 1) % grid.ny
    return ms, ns


def encode(field: SpectralField) -> bytes:
    grid = field.grid
    ms, ns = _ordered_indices(grid)
    # rows indexed by n, columns by m: row-major flattening makes m fastest
    block = field.coeffs[np.ix_(ms, ns)].T.astype("<c8")
    return _HEADER.pack(MAGIC, VERSION, grid.nx, grid.ny) + block.tobytes(order="C")


def decode(data: bytes) -> SpectralField:
    if len(data) < _HEADER.size:
        raise IntegrityError("truncated KP5F header")
    magic, version, nx, ny = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise IntegrityError(f"bad magic {magic!r}")
    if version != VERSION:
        raise IntegrityError(f"unsupported KP5F version {version}")
    grid = GridSpec(int(nx), int(ny))
    expected = _HEADER.size + 8 * nx * ny
    if len(data) != expected:
        raise IntegrityError(f"KP5F payload size {len(data)} != expected {expected}")
    block = np.frombuffer(data, dtype="<c8", offset=_HEADER.size).reshape(ny, nx)
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    ms, ns = _ordered_indices(grid)
    coeffs[np.ix_(ms, ns)] = block.T.astype(np.complex128)
    return SpectralField(grid, coeffs)


def sidecar(field: SpectralField) -> dict:
    g = field.grid
    return {
        "format": "KP5F",
        "version": VERSION,
        "nx": g.nx,
        "ny": g.ny,
        "domain": [2 * np.pi, 2 * np.pi],
        "dtype": "complex64",
        "byte_order": "little",
        "order": "m-fastest",
        "m_range": list(g.m_range),
        "n_range": list(g.n_range),
        "normalization": "c(m,n) = mean of u exp(-i(mx+ny))",
    }


def save(field: SpectralField, path) -> tuple[Path, Path]:
    path = Path(path)
    path.write_bytes(encode(field))
    meta = path.with_name(path.name + ".json")
    meta.write_text(json.dumps(sidecar(field), indent=2) + "\n")
    return path, meta


def load(path) -> SpectralField:
    path = Path(path)
    field = decode(path.read_bytes())
    meta = path.with_name(path.name + ".json")
    if meta.exists():
        info = json.loads(meta.read_text())
        if (info.get("nx"), info.get("ny")) != (field.grid.nx, field.grid.ny):
            raise IntegrityError(f"sidecar grid {info.get('nx')}x{info.get('ny')} disagrees with container")
    return field

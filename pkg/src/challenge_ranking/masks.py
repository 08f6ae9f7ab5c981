"""Binary label masks and the project's raw mask container format.

Container layout: a one-line JSON header
``{"dims": [nx, ny, nz], "spacing": [sx, sy, sz], "encoding": "raw8"}``
terminated by ``\\n`` and followed by ``nx*ny*nz`` bytes in x-fastest order
(0 = background, anything else = foreground).  Alternatively the header may
carry ``"data": "<file>"`` naming a sibling file that holds the bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError

ENCODING = "raw8"


@dataclass(frozen=True, eq=False)
class LabelMask:
    """Binary voxel grid with physical spacing (mm per axis).

    ``voxels`` is a boolean array of shape ``dims``; 2D masks use ``nz = 1``.
    """

    voxels: np.ndarray
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        vox = np.asarray(self.voxels)
        if vox.ndim == 2:
            vox = vox[:, :, np.newaxis]
        if vox.ndim != 3 or min(vox.shape) < 1:
            raise InputError(f"mask must be a non-empty 3D grid, got shape {vox.shape}")
        spacing = tuple(float(s) for s in self.spacing)
        if len(spacing) != 3 or not all(math.isfinite(s) and s > 0 for s in spacing):
            raise InputError(f"spacing must be three positive finite numbers, got {self.spacing}")
        vox = vox.astype(bool)
        vox.setflags(write=False)
        object.__setattr__(self, "voxels", vox)
        object.__setattr__(self, "spacing", spacing)

    @classmethod
    def from_points(cls, dims, points, spacing=(1.0, 1.0, 1.0)) -> "LabelMask":
        dims = tuple(int(d) for d in dims)
        if len(dims) != 3 or min(dims) < 1:
            raise InputError(f"dims must be three integers >= 1, got {dims}")
        vox = np.zeros(dims, dtype=bool)
        for p in points:
            p = tuple(int(c) for c in p)
            if len(p) != 3 or not all(0 <= c < d for c, d in zip(p, dims)):
                raise InputError(f"point {p} outside grid {dims}")
            vox[p] = True
        return cls(vox, spacing)

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(int(d) for d in self.voxels.shape)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.voxels))

    @property
    def is_empty(self) -> bool:
        return not self.voxels.any()

    def points(self) -> np.ndarray:
        """Foreground voxel indices as an ``(n, 3)`` integer array, C order."""
        return np.argwhere(self.voxels)

    def with_spacing(self, spacing) -> "LabelMask":
        return LabelMask(self.voxels, spacing)

    def __eq__(self, other):
        if not isinstance(other, LabelMask):
            return NotImplemented
        return self.spacing == other.spacing and np.array_equal(self.voxels, other.voxels)

    __hash__ = None


def encode_mask(mask: LabelMask) -> bytes:
    header = {"dims": list(mask.dims), "spacing": list(mask.spacing), "encoding": ENCODING}
    body = mask.voxels.astype(np.uint8).tobytes(order="F")
    return json.dumps(header).encode("utf-8") + b"\n" + body


def _parse_header(raw: bytes, source) -> dict:
    try:
        header = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"{source}: invalid mask header: {exc}") from exc
    if not isinstance(header, dict):
        raise InputError(f"{source}: mask header must be a JSON object")
    if header.get("encoding") != ENCODING:
        raise InputError(f"{source}: unsupported encoding {header.get('encoding')!r}")
    for key in ("dims", "spacing"):
        if not isinstance(header.get(key), list) or len(header[key]) != 3:
            raise InputError(f"{source}: header field {key!r} must be a list of three numbers")
    return header


def decode_mask(data: bytes, source="<bytes>", sibling_dir: Path | None = None) -> LabelMask:
    newline = data.find(b"\n")
    raw_header = data if newline < 0 else data[:newline]
    header = _parse_header(raw_header, source)
    if "data" in header:
        if sibling_dir is None:
            raise InputError(f"{source}: header references {header['data']!r} but no directory is known")
        body = (sibling_dir / header["data"]).read_bytes()
    else:
        body = b"" if newline < 0 else data[newline + 1:]
    try:
        dims = tuple(int(d) for d in header["dims"])
    except (TypeError, ValueError) as exc:
        raise InputError(f"{source}: bad dims {header['dims']!r}") from exc
    if min(dims) < 1:
        raise InputError(f"{source}: dims must be >= 1, got {dims}")
    expected = dims[0] * dims[1] * dims[2]
    if len(body) != expected:
        raise InputError(f"{source}: expected {expected} voxel bytes, found {len(body)}")
    vox = np.frombuffer(body, dtype=np.uint8).reshape(dims, order="F") != 0
    return LabelMask(vox, header["spacing"])


def read_mask(path) -> LabelMask:
    path = Path(path)
    return decode_mask(path.read_bytes(), source=str(path), sibling_dir=path.parent)


def write_mask(path, mask: LabelMask) -> None:
    Path(path).write_bytes(encode_mask(mask))

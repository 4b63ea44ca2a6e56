"""Field files: a JSON header next to a raw little-endian payload.

`save("out/phantom.bin", field)` writes out/phantom.json and out/phantom.bin.
Complex data ("c128") is stored as interleaved real/imaginary float64 pairs,
real data ("f64") as plain float64, both row-major.
"""
import json
from pathlib import Path

import numpy as np

from .fields import ScalarField, SpectralField, UniformGrid


def _paths(path):
    p = Path(path)
    if p.suffix in (".json", ".bin"):
        p = p.with_suffix("")
    return p.with_suffix(".json"), p.with_suffix(".bin")


def _kind(obj):
    from .xform import Sinogram

    if isinstance(obj, Sinogram):
        return "sinogram"
    if isinstance(obj, SpectralField):
        return "spectrum"
    if isinstance(obj, ScalarField):
        return "field"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def save(path, obj, real=None):
    """Write a field, spectrum or sinogram; returns the header path.

    `real=None` stores float64 when the imaginary part is negligible.
    """
    kind = _kind(obj)
    v = np.asarray(obj.values)
    if real is None:
        scale = np.max(np.abs(v)) if v.size else 0.0
        real = bool(np.max(np.abs(v.imag), initial=0.0) <= 1e-12 * scale)
    head = obj.grid.header()
    head.update(dtype="f64" if real else "c128", kind=kind)
    if kind == "sinogram":
        head["a_extent"] = obj.a_extent
    if kind == "spectrum":
        head["source"] = obj.source.header()
        head["axes"] = list(obj.axes)
    hpath, bpath = _paths(path)
    hpath.parent.mkdir(parents=True, exist_ok=True)
    data = v.real.astype("<f8") if real else v.astype("<c16")
    bpath.write_bytes(np.ascontiguousarray(data).tobytes())
    hpath.write_text(json.dumps(head, indent=1, sort_keys=True) + "\n")
    return hpath


def _grid(h):
    return UniformGrid(h["dim"], h["shape"], h["origin"], h["spacing"])


def load(path):
    """Read an object written by `save`."""
    hpath, bpath = _paths(path)
    head = json.loads(hpath.read_text())
    grid = _grid(head)
    dt = {"f64": "<f8", "c128": "<c16"}[head["dtype"]]
    v = np.frombuffer(bpath.read_bytes(), dtype=dt)
    if v.size != grid.size:
        raise ValueError(f"{bpath} holds {v.size} samples, header expects {grid.size}")
    kind = head["kind"]
    if kind == "field":
        return ScalarField(grid, v)
    if kind == "spectrum":
        return SpectralField(grid, v, _grid(head["source"]), head["axes"])
    if kind == "sinogram":
        from .xform import Sinogram

        return Sinogram(grid, v)
    raise ValueError(f"unknown kind {kind!r}")

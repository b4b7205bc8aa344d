"""Point-cloud file IO: ASCII XYZ and ASCII PLY (vertex elements only)."""

from __future__ import annotations

import io
import os
import tempfile

import numpy as np


def read_xyz(path) -> np.ndarray:
    """Read an (N, 3) array from one whitespace-separated x y z triple per line."""
    pts = np.loadtxt(path, ndmin=2)
    if pts.shape[1] < 3:
        raise ValueError("xyz rows must have at least 3 columns")
    return pts[:, :3]


def write_xyz(path, points: np.ndarray) -> None:
    buf = io.StringIO()
    np.savetxt(buf, np.asarray(points, dtype=float), fmt="%.17g")
    _atomic_write(path, buf.getvalue())


def read_ply(path) -> np.ndarray:
    """Read vertex x/y/z columns from an ASCII PLY file."""
    with open(path, "r") as fh:
        if fh.readline().strip() != "ply":
            raise ValueError("not a PLY file")
        n_vertices = None
        properties: list[str] = []
        in_vertex_element = False
        for line in fh:
            fields = line.split()
            if not fields or fields[0] == "comment":
                continue
            if fields[0] == "format":
                if fields[1] != "ascii":
                    raise ValueError("only ASCII PLY is supported")
            elif fields[0] == "element":
                in_vertex_element = fields[1] == "vertex"
                if in_vertex_element:
                    n_vertices = int(fields[2])
                elif int(fields[2]) > 0:
                    raise ValueError("only vertex elements are supported")
            elif fields[0] == "property" and in_vertex_element:
                properties.append(fields[-1])
            elif fields[0] == "end_header":
                break
        else:
            raise ValueError("missing end_header")
        if n_vertices is None:
            raise ValueError("missing vertex element")
        try:
            cols = [properties.index(axis) for axis in ("x", "y", "z")]
        except ValueError:
            raise ValueError("vertex element must have x, y, z properties") from None
        rows = np.loadtxt(fh, ndmin=2, max_rows=n_vertices)
        if rows.shape[0] != n_vertices:
            raise ValueError(f"expected {n_vertices} vertices, found {rows.shape[0]}")
    return rows[:, cols]


def write_ply(path, points: np.ndarray) -> None:
    pts = np.asarray(points, dtype=float)
    lines = [
        "ply",
        "format ascii 1.0",
        f"element vertex {pts.shape[0]}",
        "property float x",
        "property float y",
        "property float z",
        "end_header",
    ]
    lines.extend("%.17g %.17g %.17g" % (x, y, z) for x, y, z in pts)
    _atomic_write(path, "\n".join(lines) + "\n")


def read_cloud(path) -> np.ndarray:
    """Dispatch on extension: .xyz or .ply."""
    ext = os.path.splitext(os.fspath(path))[1].lower()
    if ext == ".xyz":
        return read_xyz(path)
    if ext == ".ply":
        return read_ply(path)
    raise ValueError(f"unsupported cloud format {ext!r} (use .xyz or .ply)")


def write_cloud(path, points: np.ndarray) -> None:
    ext = os.path.splitext(os.fspath(path))[1].lower()
    if ext == ".xyz":
        write_xyz(path, points)
    elif ext == ".ply":
        write_ply(path, points)
    else:
        raise ValueError(f"unsupported cloud format {ext!r} (use .xyz or .ply)")


def _atomic_write(path, text: str) -> None:
    directory = os.path.dirname(os.fspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise

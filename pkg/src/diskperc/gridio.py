"""File formats shared by the command-line tools and the pipeline.

Images are binary PGM (P5, maxval 255) with row 0 at the top of the image.
Internally all fields are stored with row 0 at the *bottom* (row index is
the y coordinate), so writers flip vertically and readers flip back.
Floating-point grids dump to raw little-endian float64, row-major, in the
internal bottom-up orientation.  CSV cells holding floats use ``repr`` so
values round-trip exactly and reruns are byte-identical.
"""
from __future__ import annotations

import numpy as np


def write_pgm(path, image: np.ndarray) -> None:
    """Write a uint8 array as binary PGM; row 0 of `image` becomes the top
    image row (callers pass bottom-up fields through a flip)."""
    img = np.ascontiguousarray(image, dtype=np.uint8)
    if img.ndim != 2:
        raise ValueError("PGM export expects a 2-D array")
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read a binary (P5) PGM with maxval 255 into a uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos] in b" \t\r\n":
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and data[pos] not in b" \t\r\n":
            pos += 1
        fields.append(data[start:pos])
    if fields[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    if maxval != 255:
        raise ValueError("only maxval 255 is supported")
    pos += 1
    img = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos)
    return img.reshape(h, w).copy()


def field_to_image(field: np.ndarray) -> np.ndarray:
    """Map a float field in [0, 1] to uint8 0..255 and flip to image
    orientation (top row first)."""
    scaled = np.rint(np.clip(field, 0.0, 1.0) * 255.0).astype(np.uint8)
    return scaled[::-1]


def mask_to_image(mask: np.ndarray, on: int = 255, off: int = 0) -> np.ndarray:
    """Map a boolean/0-1 mask to uint8 with `on` where true, flipped to
    image orientation."""
    img = np.where(mask[::-1] != 0, np.uint8(on), np.uint8(off))
    return img.astype(np.uint8)


def write_raw_f64(path, field: np.ndarray) -> None:
    """Dump a float64 grid row-major little-endian, internal (bottom-up)
    row order."""
    arr = np.ascontiguousarray(field, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(arr.tobytes())


def read_raw_f64(path, shape: tuple[int, int]) -> np.ndarray:
    arr = np.fromfile(path, dtype="<f8")
    if arr.size != shape[0] * shape[1]:
        raise ValueError(f"raw dump holds {arr.size} values, expected {shape}")
    return arr.reshape(shape)


def csv_cell(value) -> str:
    """Render one CSV cell; floats via repr (round-trip exact)."""
    if isinstance(value, float):
        # collapses numpy scalars to plain floats so repr stays bare
        return repr(float(value))
    return str(value)


def write_csv(path, header: str, rows) -> None:
    """Write rows (iterables of cells) under a fixed header line."""
    lines = [header]
    lines.extend(",".join(csv_cell(c) for c in row) for row in rows)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    """Minimal CSV reader for the package's own files (no quoting)."""
    with open(path, encoding="ascii") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]

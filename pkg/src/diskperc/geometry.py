"""Seeded soft-core disk deposition in a square box.

Disk centers are drawn uniformly in the box from a named, seeded generator
(numpy's PCG64); overlaps are allowed and disk area falling outside the box
is simply absent.  The union volume fraction is measured as the fraction of
lattice cell centers covered by at least one disk, on the same lattice the
conductivity field lives on, so deposition and rasterization stay mutually
consistent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

#: Identity of the pseudo-random generator, recorded in run metadata.
#: Centers are consumed as fixed-size chunks of float64 pairs so that the
#: draw sequence is independent of the requested target fraction.
RNG_IDENTITY = "numpy.random.PCG64/uniform-xy-chunks-2048"

_CHUNK_DOUBLES = 2048

DEFAULT_RADIUS = 1.0


class SaturationError(RuntimeError):
    """Deposition hit the disk-count guard before reaching the target."""


@dataclass(frozen=True)
class Disk:
    center_x: float
    center_y: float
    radius: float


@dataclass(frozen=True)
class BoxSpec:
    """Square box of side ``side_length`` discretized into ``lattice_size``
    cells per side (power of two; lattice spacing h = L/N)."""

    side_length: float
    lattice_size: int

    def __post_init__(self):
        if self.side_length <= 0:
            raise ValueError("side_length must be positive")
        n = self.lattice_size
        if n < 4 or (n & (n - 1)) != 0:
            raise ValueError("lattice_size must be a power of two >= 4")

    @property
    def spacing(self) -> float:
        return self.side_length / self.lattice_size


@dataclass(frozen=True)
class Configuration:
    """Ordered disk list; fully determined by (seed, box, target fraction)."""

    box: BoxSpec
    seed: int
    disks: list[Disk] = field(repr=False)
    achieved_fraction: float

    def __len__(self):
        return len(self.disks)


def default_max_disks(box: BoxSpec, radius: float = DEFAULT_RADIUS) -> int:
    """Guard against unreachable targets: 10 * L^2/(pi r^2) * ln(1e4)."""
    area_ratio = box.side_length**2 / (math.pi * radius**2)
    return int(10.0 * area_ratio * math.log(1e4))


class DiskDepositor:
    """Incremental deposition for one (seed, box) stream.

    ``extend_to`` may be called with increasing targets; the disk list only
    grows, which makes configurations at lower fractions exact prefixes of
    those at higher fractions.
    """

    def __init__(self, seed: int, box: BoxSpec, radius: float = DEFAULT_RADIUS,
                 max_disks: int | None = None):
        self.seed = int(seed)
        self.box = box
        self.radius = float(radius)
        self.max_disks = default_max_disks(box, radius) if max_disks is None else max_disks
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self._buffer = np.empty(0)
        self._buf_pos = 0
        self._mask = np.zeros((box.lattice_size, box.lattice_size), dtype=np.uint8)
        self._covered = 0
        self._disks: list[Disk] = []
        self._r_cells = self.radius / box.spacing

    @property
    def covered_mask(self) -> np.ndarray:
        """Covered-cell bitmask on the box lattice (do not mutate)."""
        return self._mask

    @property
    def fraction(self) -> float:
        return self._covered / self._mask.size

    @property
    def disks(self) -> list[Disk]:
        return self._disks

    def _next_center(self):
        if self._buf_pos >= self._buffer.size:
            self._buffer = self._gen.random(_CHUNK_DOUBLES)
            self._buf_pos = 0
        u = self._buffer[self._buf_pos]
        v = self._buffer[self._buf_pos + 1]
        self._buf_pos += 2
        return (float(u * self.box.side_length),
                float(v * self.box.side_length))

    def extend_to(self, target_fraction: float) -> None:
        """Add disks until the covered fraction strictly exceeds the target
        (full coverage satisfies a target of exactly 1)."""
        if not 0.0 <= target_fraction <= 1.0:
            raise ValueError("target_fraction must lie in [0, 1]")
        h = self.box.spacing
        total = self._mask.size
        target_cells = target_fraction * total
        while self._covered <= target_cells and self._covered < total:
            if len(self._disks) >= self.max_disks:
                raise SaturationError(
                    f"{len(self._disks)} disks deposited without exceeding "
                    f"fraction {target_fraction} (covered {self.fraction:.6f})")
            x, y = self._next_center()
            self._disks.append(Disk(x, y, self.radius))
            self._covered += _kernels.stamp_disk(self._mask, x / h, y / h, self._r_cells)

    def snapshot(self) -> Configuration:
        return Configuration(box=self.box, seed=self.seed,
                             disks=list(self._disks),
                             achieved_fraction=self.fraction)


def deposit_until(target_fraction: float, seed: int, box: BoxSpec,
                  radius: float = DEFAULT_RADIUS,
                  max_disks: int | None = None) -> Configuration:
    """First configuration whose measured union fraction exceeds the target.

    Deterministic in (seed, box, target_fraction); for a fixed seed the
    result at a lower target is a prefix of the result at a higher one.
    """
    dep = DiskDepositor(seed, box, radius=radius, max_disks=max_disks)
    dep.extend_to(target_fraction)
    return dep.snapshot()


def union_fraction(config: Configuration, resolution: int) -> float:
    """Fraction of cell centers of a resolution^2 grid covered by the union.

    With ``resolution == config.box.lattice_size`` this reproduces
    ``achieved_fraction`` exactly (same cell-center rule).
    """
    if resolution < config.box.lattice_size:
        raise ValueError("resolution must be >= box.lattice_size")
    mask = np.zeros((resolution, resolution), dtype=np.uint8)
    h = config.box.side_length / resolution
    covered = 0
    for d in config.disks:
        covered += _kernels.stamp_disk(mask, d.center_x / h, d.center_y / h, d.radius / h)
    return covered / mask.size


def coverage_mask(config: Configuration) -> np.ndarray:
    """Covered-cell bitmask (uint8) of the configuration on its box lattice."""
    n = config.box.lattice_size
    mask = np.zeros((n, n), dtype=np.uint8)
    h = config.box.spacing
    for d in config.disks:
        _kernels.stamp_disk(mask, d.center_x / h, d.center_y / h, d.radius / h)
    return mask


def save_configuration(config: Configuration, path) -> None:
    """Plain-text export: header `L N seed achieved_fraction disk_count`,
    then one `x y` center pair per line in deposition order (round-trip
    exact decimal)."""
    lines = [f"{config.box.side_length!r} {config.box.lattice_size} "
             f"{config.seed} {config.achieved_fraction!r} {len(config.disks)}"]
    lines.extend(f"{d.center_x!r} {d.center_y!r}" for d in config.disks)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_configuration(path, radius: float = DEFAULT_RADIUS) -> Configuration:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        side, n, seed, fraction, count = (
            float(header[0]), int(header[1]), int(header[2]),
            float(header[3]), int(header[4]))
        disks = []
        for _ in range(count):
            xs, ys = fh.readline().split()
            disks.append(Disk(float(xs), float(ys), radius))
    return Configuration(box=BoxSpec(side, n), seed=seed, disks=disks,
                         achieved_fraction=fraction)

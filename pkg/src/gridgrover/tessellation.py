"""Partitions of the torus grid into the cell groups that drive diffusion.

Each diffusion operator reflects about the uniform superposition on every
group of some partition.  Because groups are disjoint and cover the grid,
those superpositions are automatically orthonormal and the reflection is
unitary.  Four generators are provided:

* ``square_partition``       -- axis-aligned d x d tiles.
* ``shifted_square_partition`` -- the same tiles with the origin moved by
  floor(d/2) in both axes, wrapping on the torus.  Every shifted tile
  straddles several aligned tiles, which is what lets amplitude travel.
* ``cross_partition``        -- center plus four cardinal neighbors (a
  radius-1 Lee sphere); centers on the lattice (i + 2j) % 5 == 0.
* ``four_corners_partition`` -- quadruples {(a,b)+(x,y): x,y in {0,d}}
  inside 2d-periodic blocks.

Hand-built groups are supported through ``custom_partition`` (used by test
fixtures and ``translate_partition``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .grid import Coord, GridGeometry, cell_index, coord_of_index, normalize_coord

__all__ = [
    "KIND_CROSS",
    "KIND_CUSTOM",
    "KIND_FOUR_CORNERS",
    "KIND_SHIFTED_SQUARE",
    "KIND_SQUARE",
    "InvalidPartitionError",
    "Partition",
    "PartitionReport",
    "cross_partition",
    "custom_partition",
    "four_corners_partition",
    "shifted_square_partition",
    "square_partition",
    "translate_partition",
    "validate_partition",
]

KIND_SQUARE = "square"
KIND_SHIFTED_SQUARE = "shifted-square"
KIND_CROSS = "cross"
KIND_FOUR_CORNERS = "four-corners"
KIND_CUSTOM = "custom"


class InvalidPartitionError(ValueError):
    """Raised when groups fail to cover every grid cell exactly once."""


@dataclass(frozen=True)
class Partition:
    """Disjoint cell groups covering the grid.

    ``step_cost`` is the nominal walk-step charge for one application of the
    group diffusion (tile side for squares and corners, 1 for crosses, since
    every cross cell is one hop from its center).

    ``tile_side``/``tile_shift`` record block structure when the groups are
    d x d tiles on a (possibly shifted) lattice; the diffusion kernel uses
    them to take a reshape-based fast path.
    """

    geometry: GridGeometry
    groups: tuple[tuple[Coord, ...], ...]
    kind: str = KIND_CUSTOM
    step_cost: int = 1
    tile_side: int | None = None
    tile_shift: tuple[int, int] = (0, 0)

    @property
    def group_count(self) -> int:
        return len(self.groups)

    @cached_property
    def _flat_groups(self) -> tuple[np.ndarray, ...]:
        return tuple(
            np.array([cell_index(self.geometry, c) for c in group], dtype=np.intp)
            for group in self.groups
        )

    @cached_property
    def group_ids(self) -> np.ndarray:
        """Cell -> group index map; raises unless the cover is exact."""
        report = validate_partition(self)
        if not report.ok:
            raise InvalidPartitionError(report.summary())
        ids = np.empty(self.geometry.cell_count, dtype=np.intp)
        for g, flat in enumerate(self._flat_groups):
            ids[flat] = g
        return ids

    @cached_property
    def group_sizes(self) -> np.ndarray:
        return np.array([len(g) for g in self.groups], dtype=np.float64)


@dataclass(frozen=True)
class PartitionReport:
    """Outcome of a cover check: which cells are duplicated or missing."""

    ok: bool
    duplicated: tuple[Coord, ...]
    missing: tuple[Coord, ...]
    empty_groups: tuple[int, ...]

    def summary(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        if self.duplicated:
            parts.append(f"{len(self.duplicated)} duplicated cells")
        if self.missing:
            parts.append(f"{len(self.missing)} missing cells")
        if self.empty_groups:
            parts.append(f"{len(self.empty_groups)} empty groups")
        return "invalid partition: " + ", ".join(parts)


def validate_partition(partition: Partition) -> PartitionReport:
    """Check that every cell appears exactly once across the groups."""
    geometry = partition.geometry
    counts = np.zeros(geometry.cell_count, dtype=np.int64)
    for flat in partition._flat_groups:
        np.add.at(counts, flat, 1)
    duplicated = tuple(coord_of_index(geometry, int(i)) for i in np.flatnonzero(counts > 1))
    missing = tuple(coord_of_index(geometry, int(i)) for i in np.flatnonzero(counts == 0))
    empty = tuple(g for g, group in enumerate(partition.groups) if not group)
    ok = not duplicated and not missing
    return PartitionReport(ok=ok, duplicated=duplicated, missing=missing, empty_groups=empty)


def _require_divides(d: int, side: int, what: str) -> None:
    if d < 1:
        raise ValueError(f"tile parameter must be positive, got {d}")
    if side % d != 0:
        raise ValueError(f"{what} requires {d} | {side}, but {d} does not divide {side}")


def square_partition(geometry: GridGeometry, d: int) -> Partition:
    """Axis-aligned d x d tiles; requires d | side."""
    _require_divides(d, geometry.side, "square tiling")
    return _block_partition(geometry, d, shift=0, kind=KIND_SQUARE)


def shifted_square_partition(geometry: GridGeometry, d: int) -> Partition:
    """d x d tiles with origins moved by floor(d/2) in both axes, wrapping."""
    _require_divides(d, geometry.side, "shifted square tiling")
    return _block_partition(geometry, d, shift=d // 2, kind=KIND_SHIFTED_SQUARE)


def _block_partition(geometry: GridGeometry, d: int, shift: int, kind: str) -> Partition:
    side = geometry.side
    groups = []
    for bi in range(side // d):
        for bj in range(side // d):
            groups.append(
                tuple(
                    Coord((d * bi + x + shift) % side, (d * bj + y + shift) % side)
                    for x in range(d)
                    for y in range(d)
                )
            )
    return Partition(
        geometry,
        tuple(groups),
        kind=kind,
        step_cost=d,
        tile_side=d,
        tile_shift=(shift, shift),
    )


def cross_partition(geometry: GridGeometry) -> Partition:
    """Center-plus-cardinal-neighbors groups; requires 5 | side.

    Centers sit on the lattice (i + 2j) % 5 == 0, the spacing at which
    radius-1 Lee spheres tile the torus perfectly: successive centers are
    (2, 1) apart.
    """
    side = geometry.side
    if side % 5 != 0:
        raise ValueError(f"cross tiling requires 5 | {side}, but 5 does not divide {side}")
    groups = []
    for i in range(side):
        for j in range(side):
            if (i + 2 * j) % 5 == 0:
                groups.append(
                    (
                        Coord(i, j),
                        Coord((i - 1) % side, j),
                        Coord((i + 1) % side, j),
                        Coord(i, (j - 1) % side),
                        Coord(i, (j + 1) % side),
                    )
                )
    return Partition(geometry, tuple(groups), kind=KIND_CROSS, step_cost=1)


def four_corners_partition(geometry: GridGeometry, d: int) -> Partition:
    """Corner quadruples {(a,b) + (x,y) : x,y in {0,d}}; requires 2d | side."""
    if d < 1:
        raise ValueError(f"tile parameter must be positive, got {d}")
    side = geometry.side
    if side % (2 * d) != 0:
        raise ValueError(
            f"four-corners tiling requires {2 * d} | {side}, "
            f"but {2 * d} does not divide {side}"
        )
    groups = []
    for bi in range(side // (2 * d)):
        for bj in range(side // (2 * d)):
            for a in range(d):
                for b in range(d):
                    groups.append(
                        tuple(
                            Coord((2 * d * bi + a + x) % side, (2 * d * bj + b + y) % side)
                            for x in (0, d)
                            for y in (0, d)
                        )
                    )
    return Partition(geometry, tuple(groups), kind=KIND_FOUR_CORNERS, step_cost=d)


def custom_partition(
    geometry: GridGeometry,
    groups: "list[list[tuple[int, int]]] | tuple",
    step_cost: int = 1,
) -> Partition:
    """Wrap hand-built groups; cells wrap onto the grid, validity is not checked."""
    wrapped = tuple(
        tuple(normalize_coord(geometry, cell) for cell in group) for group in groups
    )
    return Partition(geometry, wrapped, kind=KIND_CUSTOM, step_cost=step_cost)


def translate_partition(partition: Partition, offset: tuple[int, int]) -> Partition:
    """Shift every cell by a fixed offset; tiling survives torus translation."""
    di, dj = offset
    side = partition.geometry.side
    groups = tuple(
        tuple(Coord((c.row + di) % side, (c.col + dj) % side) for c in group)
        for group in partition.groups
    )
    shift = None
    if partition.tile_side is not None:
        si, sj = partition.tile_shift
        shift = ((si + di) % partition.tile_side, (sj + dj) % partition.tile_side)
    return Partition(
        partition.geometry,
        groups,
        kind=partition.kind,
        step_cost=partition.step_cost,
        tile_side=partition.tile_side,
        tile_shift=shift if shift is not None else (0, 0),
    )

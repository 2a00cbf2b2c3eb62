"""Reflections applied to the grid state: oracle, group diffusion, global diffusion.

All three are real involutions, applied in place:

* oracle           -- negate the amplitude of every marked cell.
* group diffusion  -- within each partition group with mean m, map a -> 2m - a
  (reflect about the group's uniform superposition).
* global diffusion -- the same sweep with one group spanning the whole grid,
  i.e. the complete-graph inversion about the mean.

``materialize_dense`` builds the n x n matrix of any operator directly from
its defining formula, independent of the sweep kernels, so tests can compare
the two routes.  The sweep is the production path: O(n) per application and
never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridGeometry, GridState, MarkedSet
from .tessellation import InvalidPartitionError, Partition, validate_partition

__all__ = [
    "DENSE_CELL_CAP",
    "GLOBAL_DIFFUSION",
    "DiffusionSpec",
    "GlobalDiffusionSpec",
    "OracleSpec",
    "apply_global_grover",
    "apply_oracle",
    "apply_partition_diffusion",
    "materialize_dense",
]

# Dense materialization is a test oracle; cap the memory it may claim.
DENSE_CELL_CAP = 4096


@dataclass(frozen=True)
class OracleSpec:
    """Sign flip on a set of marked cells."""

    marked: MarkedSet


@dataclass(frozen=True)
class DiffusionSpec:
    """Reflection about the group superpositions of a validated partition."""

    partition: Partition

    def __post_init__(self) -> None:
        report = validate_partition(self.partition)
        if not report.ok:
            raise InvalidPartitionError(report.summary())


@dataclass(frozen=True)
class GlobalDiffusionSpec:
    """Marker for the complete-graph inversion about the global mean."""


GLOBAL_DIFFUSION = GlobalDiffusionSpec()


def apply_oracle(state: GridState, spec: OracleSpec) -> GridState:
    """Negate marked amplitudes in place; everything else is untouched."""
    idx = spec.marked.indices(state.geometry)
    state.amplitudes[idx] *= -1.0
    state.check_norm()
    return state


def apply_partition_diffusion(state: GridState, spec: DiffusionSpec) -> GridState:
    """Reflect each group about its mean: a -> 2*mean(group) - a, in place."""
    partition = spec.partition
    if partition.geometry != state.geometry:
        raise ValueError(
            f"partition is for side {partition.geometry.side}, "
            f"state has side {state.geometry.side}"
        )
    if partition.tile_side is not None:
        _tile_sweep(state.as_grid(), partition.tile_side, partition.tile_shift)
    else:
        _group_sweep(state.amplitudes, partition)
    state.check_norm()
    return state


def _tile_sweep(grid: np.ndarray, d: int, shift: tuple[int, int]) -> None:
    # Rolling by -shift brings the tile lattice into alignment with axis 0.
    si, sj = shift
    rolled = grid if (si, sj) == (0, 0) else np.roll(grid, (-si, -sj), axis=(0, 1))
    side = grid.shape[0]
    tiles = rolled.reshape(side // d, d, side // d, d)
    means = tiles.mean(axis=(1, 3), keepdims=True)
    tiles *= -1.0
    tiles += 2.0 * means
    if rolled is not grid:
        grid[:] = np.roll(rolled, (si, sj), axis=(0, 1))


def _group_sweep(amplitudes: np.ndarray, partition: Partition) -> None:
    ids = partition.group_ids
    sums = np.bincount(ids, weights=amplitudes, minlength=partition.group_count)
    doubled_means = sums * (2.0 / partition.group_sizes)
    np.subtract(doubled_means[ids], amplitudes, out=amplitudes)


def apply_global_grover(state: GridState) -> GridState:
    """Inversion about the global mean (the complete-graph diffusion)."""
    a = state.amplitudes
    np.subtract(2.0 * a.mean(), a, out=a)
    state.check_norm()
    return state


def materialize_dense(
    op: "OracleSpec | DiffusionSpec | GlobalDiffusionSpec",
    geometry: GridGeometry,
    max_cells: int = DENSE_CELL_CAP,
) -> np.ndarray:
    """n x n matrix of the operator, built from its formula.

    Column x equals the operator applied to basis state x.  Refuses grids
    above ``max_cells`` cells.
    """
    n = geometry.cell_count
    if n > max_cells:
        raise ValueError(f"dense materialization capped at {max_cells} cells, grid has {n}")
    if isinstance(op, OracleSpec):
        matrix = np.eye(n)
        idx = op.marked.indices(geometry)
        matrix[idx, idx] = -1.0
        return matrix
    if isinstance(op, DiffusionSpec):
        if op.partition.geometry != geometry:
            raise ValueError("partition geometry does not match the requested geometry")
        matrix = -np.eye(n)
        for flat in op.partition._flat_groups:
            matrix[np.ix_(flat, flat)] += 2.0 / len(flat)
        return matrix
    if isinstance(op, GlobalDiffusionSpec):
        return np.full((n, n), 2.0 / n) - np.eye(n)
    raise TypeError(f"cannot materialize {type(op).__name__}")

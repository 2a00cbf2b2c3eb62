import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gridgrover import (
    GLOBAL_DIFFUSION,
    DiffusionSpec,
    GridGeometry,
    GridState,
    MarkedSet,
    OracleSpec,
    apply_global_grover,
    apply_oracle,
    apply_partition_diffusion,
    basis_state,
    custom_partition,
    marked_probability,
    materialize_dense,
    uniform_state,
)
from test_tessellation import all_legal_partitions


def random_state(geometry, seed):
    rng = np.random.default_rng(seed)
    values = rng.normal(size=geometry.cell_count)
    return GridState(geometry, values / np.linalg.norm(values))


def test_oracle_negates_marked_only():
    g = GridGeometry(4)
    state = apply_oracle(uniform_state(g), OracleSpec(MarkedSet.of((2, 1))))
    grid = state.as_grid()
    assert grid[2, 1] == -0.25
    grid[2, 1] = 0.25
    np.testing.assert_array_equal(grid, 0.25)


def test_oracle_is_an_involution():
    g = GridGeometry(6)
    state = random_state(g, 7)
    before = state.amplitudes.copy()
    spec = OracleSpec(MarkedSet.of((1, 5), (3, 3)))
    apply_oracle(apply_oracle(state, spec), spec)
    np.testing.assert_array_equal(state.amplitudes, before)


def test_oracle_fixes_states_supported_off_the_marked_cells():
    g = GridGeometry(4)
    state = basis_state(g, (0, 3))
    before = state.amplitudes.copy()
    apply_oracle(state, OracleSpec(MarkedSet.of((2, 2))))
    np.testing.assert_array_equal(state.amplitudes, before)


def test_diffusion_reflects_about_group_mean():
    # one group of four: (1, 0, 0, 0) has mean 1/4 -> (-0.5, 0.5, 0.5, 0.5)
    g = GridGeometry(2)
    state = basis_state(g, (0, 0))
    p = custom_partition(g, [[(0, 0), (0, 1), (1, 0), (1, 1)]])
    apply_partition_diffusion(state, DiffusionSpec(p))
    np.testing.assert_allclose(state.amplitudes, [-0.5, 0.5, 0.5, 0.5], atol=1e-15)


def test_uniform_state_is_fixed_by_every_diffusion():
    for side in (4, 5, 8, 10, 20):
        g = GridGeometry(side)
        expected = 1.0 / side
        for p in all_legal_partitions(side):
            state = apply_partition_diffusion(uniform_state(g), DiffusionSpec(p))
            assert np.max(np.abs(state.amplitudes - expected)) <= 1e-12, p.kind


def test_single_tile_diffusion_equals_global_reflection():
    from gridgrover import square_partition

    g = GridGeometry(4)
    state = random_state(g, 3)
    expected = materialize_dense(GLOBAL_DIFFUSION, g) @ state.amplitudes
    apply_partition_diffusion(state, DiffusionSpec(square_partition(g, 4)))
    assert np.max(np.abs(state.amplitudes - expected)) <= 1e-12


def test_global_grover_on_uniform_and_basis():
    g = GridGeometry(2)
    state = apply_global_grover(uniform_state(g))
    np.testing.assert_allclose(state.amplitudes, 0.5, atol=1e-15)

    state = apply_global_grover(basis_state(g, (0, 0)))
    np.testing.assert_allclose(state.amplitudes, [-0.5, 0.5, 0.5, 0.5], atol=1e-15)


def test_one_grover_round_on_four_cells_is_exact():
    # sin^2(3 * asin(1/2)) = 1: a single round nails the marked cell at n=4
    g = GridGeometry(2)
    marked = MarkedSet.of((1, 0))
    state = uniform_state(g)
    apply_global_grover(apply_oracle(state, OracleSpec(marked)))
    assert marked_probability(state, marked) == pytest.approx(1.0, abs=1e-12)


def test_global_grover_closed_form():
    g = GridGeometry(4)
    marked = MarkedSet.of((1, 2))
    theta = math.asin(1.0 / 4.0)
    state = uniform_state(g)
    spec = OracleSpec(marked)
    for k in range(1, 21):
        apply_global_grover(apply_oracle(state, spec))
        expected = math.sin((2 * k + 1) * theta) ** 2
        assert marked_probability(state, marked) == pytest.approx(expected, abs=1e-9)


def test_materialize_dense_oracle_and_tiny_diffusion():
    from gridgrover import square_partition

    g = GridGeometry(2)
    oracle = materialize_dense(OracleSpec(MarkedSet.of((0, 0))), g)
    np.testing.assert_array_equal(oracle, np.diag([-1.0, 1.0, 1.0, 1.0]))

    diffusion = materialize_dense(DiffusionSpec(square_partition(g, 2)), g)
    expected = np.full((4, 4), 0.5) - np.eye(4)
    np.testing.assert_allclose(diffusion, expected, atol=1e-15)


def test_materialize_dense_respects_cap():
    with pytest.raises(ValueError):
        materialize_dense(GLOBAL_DIFFUSION, GridGeometry(65))
    # explicit cap override
    assert materialize_dense(GLOBAL_DIFFUSION, GridGeometry(65), max_cells=65 * 65).shape == (
        4225,
        4225,
    )


def test_materialize_dense_rejects_unknown_operators():
    with pytest.raises(TypeError):
        materialize_dense(object(), GridGeometry(2))


def test_dense_matrices_are_unitary():
    # max |M^T M - I| <= 1e-12 for every built-in operator
    for side in (4, 8, 10):
        g = GridGeometry(side)
        n = g.cell_count
        operators = [
            materialize_dense(OracleSpec(MarkedSet.of((1, 1))), g),
            materialize_dense(OracleSpec(MarkedSet.of((0, 0), (side - 1, 2))), g),
            materialize_dense(GLOBAL_DIFFUSION, g),
        ]
        operators += [
            materialize_dense(DiffusionSpec(p), g) for p in all_legal_partitions(side)
        ]
        for matrix in operators:
            assert np.max(np.abs(matrix.T @ matrix - np.eye(n))) <= 1e-12


def test_diffusion_agrees_with_dense_everywhere():
    for side in (4, 5, 8):
        g = GridGeometry(side)
        for p in all_legal_partitions(side):
            state = random_state(g, side)
            expected = materialize_dense(DiffusionSpec(p), g) @ state.amplitudes
            apply_partition_diffusion(state, DiffusionSpec(p))
            assert np.max(np.abs(state.amplitudes - expected)) <= 1e-12, p.kind


def test_tile_and_generic_sweeps_agree():
    # the reshape fast path and the bincount path must produce the same state
    from gridgrover import shifted_square_partition

    g = GridGeometry(8)
    fast = shifted_square_partition(g, 4)
    generic = custom_partition(g, [list(grp) for grp in fast.groups])
    assert fast.tile_side is not None and generic.tile_side is None
    a = random_state(g, 11)
    b = a.copy()
    apply_partition_diffusion(a, DiffusionSpec(fast))
    apply_partition_diffusion(b, DiffusionSpec(generic))
    assert np.max(np.abs(a.amplitudes - b.amplitudes)) <= 1e-12


def test_translated_tile_partition_keeps_its_fast_path():
    from gridgrover import square_partition, translate_partition

    g = GridGeometry(8)
    p = translate_partition(square_partition(g, 4), (1, 3))
    assert p.tile_side == 4 and p.tile_shift == (1, 3)
    state = random_state(g, 13)
    expected = materialize_dense(DiffusionSpec(p), g) @ state.amplitudes
    apply_partition_diffusion(state, DiffusionSpec(p))
    assert np.max(np.abs(state.amplitudes - expected)) <= 1e-12


@settings(max_examples=25)
@given(st.integers(min_value=0, max_value=10_000))
def test_diffusion_applied_twice_is_identity(seed):
    side = 8
    g = GridGeometry(side)
    state = random_state(g, seed)
    before = state.amplitudes.copy()
    for p in all_legal_partitions(side):
        spec = DiffusionSpec(p)
        apply_partition_diffusion(apply_partition_diffusion(state, spec), spec)
        assert np.max(np.abs(state.amplitudes - before)) <= 1e-12
        state.amplitudes[:] = before


def test_group_locality():
    # Amplitudes outside a group cannot influence the group's image.
    from gridgrover import square_partition

    g = GridGeometry(8)
    p = square_partition(g, 4)
    spec = DiffusionSpec(p)
    group = p.groups[0]
    inside = [c for c in group]
    outside_a, outside_b = (6, 6), (7, 0)

    one = random_state(g, 21)
    two = one.copy()
    # swap two amplitudes outside the group: norm intact, group untouched
    ia = two.geometry.side * outside_a[0] + outside_a[1]
    ib = two.geometry.side * outside_b[0] + outside_b[1]
    two.amplitudes[ia], two.amplitudes[ib] = two.amplitudes[ib], two.amplitudes[ia]

    apply_partition_diffusion(one, spec)
    apply_partition_diffusion(two, spec)
    for cell in inside:
        assert one.amplitude(cell) == pytest.approx(two.amplitude(cell), abs=1e-15)


def test_operators_keep_states_real():
    # The dense matrices of every operator are real, so a complex-cast state
    # keeps an exactly zero imaginary part through any application.
    g = GridGeometry(4)
    psi = uniform_state(g).amplitudes.astype(np.complex128)
    for op in (
        OracleSpec(MarkedSet.of((3, 3))),
        DiffusionSpec(all_legal_partitions(4)[0]),
        GLOBAL_DIFFUSION,
    ):
        psi = materialize_dense(op, g) @ psi
        assert np.all(psi.imag == 0.0)


def test_diffusion_rejects_geometry_mismatch():
    from gridgrover import square_partition

    state = uniform_state(GridGeometry(8))
    with pytest.raises(ValueError):
        apply_partition_diffusion(state, DiffusionSpec(square_partition(GridGeometry(4), 4)))


def test_diffusion_spec_rejects_invalid_partition():
    g = GridGeometry(4)
    with pytest.raises(ValueError):
        DiffusionSpec(custom_partition(g, [[(0, 0)]]))

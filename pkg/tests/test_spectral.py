from __future__ import annotations

import numpy as np
import pytest

from spinstep.spectral import (
    PAULI,
    SpinorField,
    apply_propagator,
    dft,
    free_propagator_gn,
    free_propagator_thirring,
    idft,
    make_grid,
)


def _random_field(grid, rng):
    c = rng.standard_normal((2, grid.N)) + 1j * rng.standard_normal((2, grid.N))
    return SpinorField(grid=grid, c1=c[0], c2=c[1])


def _direct_dft(grid, values):
    # O(N^2) evaluation of the defining sum, independent of any FFT layout.
    phase = np.exp(-1j * np.outer(grid.k, grid.x))
    return phase @ values


class TestGrid:
    def test_reference_spacings(self):
        grid = make_grid(40 * np.pi, 4096)
        assert grid.dx == pytest.approx(0.030680, abs=1e-6)
        assert grid.dk == pytest.approx(0.05, abs=1e-12)
        assert grid.k_max == pytest.approx(102.4, abs=1e-12)

    def test_small_grid_ladder(self):
        grid = make_grid(2 * np.pi, 4)
        np.testing.assert_allclose(grid.k, [-2.0, -1.0, 0.0, 1.0], atol=1e-15)
        np.testing.assert_allclose(
            grid.x, [-np.pi, -np.pi / 2, 0.0, np.pi / 2], atol=1e-15
        )

    def test_window_edge_identity(self):
        grid = make_grid(17.3, 256)
        assert grid.k_max == grid.N * grid.dk / 2.0
        assert grid.x[0] == -grid.L / 2.0
        assert grid.N * grid.dx == pytest.approx(grid.L, rel=1e-15)

    @pytest.mark.parametrize("bad_n", [0, 7, 6, 2, -8, 100])
    def test_rejects_bad_point_counts(self, bad_n):
        with pytest.raises(ValueError, match="N"):
            make_grid(10.0, bad_n)

    @pytest.mark.parametrize("bad_l", [0.0, -1.0])
    def test_rejects_bad_lengths(self, bad_l):
        with pytest.raises(ValueError, match="L"):
            make_grid(bad_l, 16)


class TestTransforms:
    def test_single_mode_lands_on_its_ladder_point(self):
        grid = make_grid(2 * np.pi, 16)
        f = SpinorField(grid, np.exp(1j * grid.dk * grid.x), np.zeros(grid.N))
        s = dft(f)
        expected = np.zeros(grid.N, dtype=complex)
        expected[grid.N // 2 + 1] = grid.N  # l = +1
        np.testing.assert_allclose(s.s1, expected, atol=1e-12)
        np.testing.assert_allclose(s.s2, 0.0, atol=1e-12)

    def test_constant_field_is_the_zero_mode(self):
        grid = make_grid(5.0, 8)
        s = dft(SpinorField(grid, np.ones(grid.N), np.ones(grid.N)))
        expected = np.zeros(grid.N, dtype=complex)
        expected[grid.N // 2] = grid.N
        np.testing.assert_allclose(s.s1, expected, atol=1e-12)
        np.testing.assert_allclose(s.s2, expected, atol=1e-12)

    @pytest.mark.parametrize("n", [8, 16, 64])
    def test_matches_direct_summation(self, n):
        rng = np.random.default_rng(41 + n)
        grid = make_grid(3.7 * np.pi, n)
        f = _random_field(grid, rng)
        s = dft(f)
        np.testing.assert_allclose(s.s1, _direct_dft(grid, f.c1), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(s.s2, _direct_dft(grid, f.c2), rtol=1e-12, atol=1e-12)

    def test_roundtrip(self):
        rng = np.random.default_rng(7)
        grid = make_grid(11.0, 512)
        f = _random_field(grid, rng)
        g = idft(dft(f))
        np.testing.assert_allclose(g.c1, f.c1, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(g.c2, f.c2, rtol=1e-12, atol=1e-12)

    def test_parseval(self):
        rng = np.random.default_rng(13)
        grid = make_grid(9.0, 256)
        f = _random_field(grid, rng)
        s = dft(f)
        lhs = (np.abs(f.c1) ** 2 + np.abs(f.c2) ** 2).sum()
        rhs = (np.abs(s.s1) ** 2 + np.abs(s.s2) ** 2).sum() / grid.N
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_component_shape_mismatch_is_rejected(self):
        grid = make_grid(4.0, 8)
        with pytest.raises(ValueError, match="c2"):
            SpinorField(grid, np.zeros(8), np.zeros(9))


def _assert_unitary(prop, tol):
    # columns of each per-wavenumber matrix must be orthonormal
    m = np.moveaxis(prop, -1, 0)  # (N, 2, 2)
    gram = np.einsum("nij,nik->njk", m.conj(), m)
    eye = np.broadcast_to(np.eye(2), gram.shape)
    np.testing.assert_allclose(gram, eye, atol=tol)


class TestPropagators:
    def test_gn_zero_wavenumber_is_identity(self):
        grid = make_grid(2 * np.pi, 8)
        prop = free_propagator_gn(grid, 0.37)
        i0 = grid.N // 2  # k = 0
        np.testing.assert_allclose(prop[:, :, i0], np.eye(2), atol=1e-15)

    def test_gn_quarter_period(self):
        # k * dt = pi/2 turns the update into -i * sigma_1
        grid = make_grid(2 * np.pi, 8)
        k_target = 2.0
        dt = np.pi / 2 / k_target
        prop = free_propagator_gn(grid, dt)
        idx = np.argmin(np.abs(grid.k - k_target))
        np.testing.assert_allclose(prop[:, :, idx], -1j * PAULI[1], atol=1e-14)

    def test_gn_unitary(self):
        grid = make_grid(33.0, 128)
        for dt in (1e-3, 0.2, 1.7):
            _assert_unitary(free_propagator_gn(grid, dt), 1e-14)

    def test_thirring_zero_wavenumber_mass_rotation(self):
        grid = make_grid(2 * np.pi, 8)
        dt = 0.81
        prop = free_propagator_thirring(grid, dt)
        i0 = grid.N // 2
        expected = np.array(
            [[np.cos(dt), 1j * np.sin(dt)], [1j * np.sin(dt), np.cos(dt)]]
        )
        np.testing.assert_allclose(prop[:, :, i0], expected, atol=1e-14)

    def test_thirring_small_dt_is_identity(self):
        grid = make_grid(10.0, 64)
        prop = free_propagator_thirring(grid, 1e-9)
        eye = np.broadcast_to(np.eye(2)[:, :, None], prop.shape)
        np.testing.assert_allclose(prop, eye, atol=1e-7)

    def test_thirring_unitary(self):
        grid = make_grid(12.0, 128)
        for dt in (1e-3, 0.31, 2.4):
            _assert_unitary(free_propagator_thirring(grid, dt), 1e-14)

    def test_apply_propagator_preserves_power(self):
        rng = np.random.default_rng(5)
        grid = make_grid(8.0, 64)
        s = dft(_random_field(grid, rng))
        moved = apply_propagator(s, free_propagator_gn(grid, 0.11))
        p0 = (np.abs(s.s1) ** 2 + np.abs(s.s2) ** 2).sum()
        p1 = (np.abs(moved.s1) ** 2 + np.abs(moved.s2) ** 2).sum()
        assert p1 == pytest.approx(p0, rel=1e-13)


class TestPauliAlgebra:
    def test_ladder_action(self):
        e_plus = np.array([1.0, 1.0])
        e_minus = np.array([1.0, -1.0])
        np.testing.assert_allclose(PAULI[1] @ e_plus, e_plus)
        np.testing.assert_allclose(PAULI[1] @ e_minus, -e_minus)
        np.testing.assert_allclose(PAULI[3] @ e_plus, e_minus)
        np.testing.assert_allclose(PAULI[3] @ e_minus, e_plus)
        np.testing.assert_allclose(PAULI[2] @ e_plus, -1j * e_minus)
        np.testing.assert_allclose(PAULI[2] @ e_minus, 1j * e_plus)

    @pytest.mark.parametrize("j", [2, 3])
    def test_rotation_pushthrough(self, j):
        # exp(i sigma_1 s) sigma_j exp(-i sigma_1 s) = exp(2 i sigma_1 s) sigma_j
        s = 0.613
        rot = np.cos(s) * PAULI[0] + 1j * np.sin(s) * PAULI[1]
        rot_inv = np.cos(s) * PAULI[0] - 1j * np.sin(s) * PAULI[1]
        rot2 = np.cos(2 * s) * PAULI[0] + 1j * np.sin(2 * s) * PAULI[1]
        np.testing.assert_allclose(
            rot @ PAULI[j] @ rot_inv, rot2 @ PAULI[j], atol=1e-14
        )

"""Tests for the toroidal Wigner transform and its coarse-grained diagnostics."""

import numpy as np
import pytest

from cantori import (
    DensityMatrix,
    coarse_grain,
    negativity_volume,
    toroidal_wigner,
)
from cantori.model import ParameterError
from cantori.wigner import export_grid


def random_density(N, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    m = a @ a.conj().T
    return DensityMatrix(m / np.trace(m).real)


def wigner_direct(rho, hbar_k):
    """Brute-force double loop over the defining sum.  Slow; N <= 16 only."""
    m = rho.matrix
    N = rho.size
    w = np.zeros((2 * N, 2 * N), dtype=complex)
    for il, l in enumerate(range(-N, N)):
        for k in range(2 * N):
            total = 0.0
            for j in range(2 * N):
                if (l + j) % 2:
                    continue
                a = ((l + j) // 2 + N // 2) % N
                b = ((l - j) // 2 + N // 2) % N
                total += np.exp(1j * np.pi * j * k / N) * m[a, b]
            w[il, k] = total
    assert np.abs(w.imag).max() < 1e-9
    return w.real


class TestTransform:
    @pytest.mark.parametrize("N", [4, 8, 16])
    def test_matches_direct_sum(self, N):
        rho = random_density(N, seed=N)
        grid = toroidal_wigner(rho, 2.6)
        assert grid.values.shape == (2 * N, 2 * N)
        assert np.abs(grid.values - wigner_direct(rho, 2.6)).max() < 1e-10

    def test_momentum_marginal(self):
        N = 16
        rho = random_density(N, seed=3)
        grid = toroidal_wigner(rho, 2.6)
        marginal = grid.values.sum(axis=1)
        diag = np.real(np.diag(rho.matrix))
        for il, l in enumerate(range(-N, N)):
            if l % 2:
                assert marginal[il] == pytest.approx(0.0, abs=1e-10)
            else:
                assert marginal[il] == pytest.approx(2 * N * diag[l // 2 + N // 2], abs=1e-10)

    def test_real_output_and_axes(self):
        N = 8
        grid = toroidal_wigner(random_density(N, seed=5), 2.6)
        assert grid.values.dtype == np.float64
        assert np.allclose(grid.x, np.pi * np.arange(2 * N) / N)
        assert np.allclose(grid.p, 1.3 * np.arange(-N, N))
        cx, cp = grid.coarse_axes()
        assert cx.shape == cp.shape == (N,)

    def test_linearity(self):
        N = 8
        r1, r2 = random_density(N, 1), random_density(N, 2)
        mix = DensityMatrix(0.3 * r1.matrix + 0.7 * r2.matrix)
        w_mix = toroidal_wigner(mix, 2.6).values
        w_sum = 0.3 * toroidal_wigner(r1, 2.6).values + 0.7 * toroidal_wigner(r2, 2.6).values
        assert np.abs(w_mix - w_sum).max() < 1e-12

    def test_eigenstate_row(self):
        """|0><0| gives a flat unit row at P = 0 and total weight 2N."""
        N = 8
        grid = toroidal_wigner(DensityMatrix.pure(N, 0), 2.6)
        row = grid.values[N]  # l = 0
        assert np.allclose(row, 1.0)
        assert grid.values.sum() == pytest.approx(2 * N)

    def test_non_hermitian_raises(self):
        m = np.zeros((4, 4), dtype=complex)
        m[0, 1] = 1.0
        m[0, 0] = 1.0
        with pytest.raises(ParameterError):
            toroidal_wigner(DensityMatrix(m), 2.6)


class TestCoarseGrain:
    def test_explicit_example(self):
        v = np.arange(16.0).reshape(4, 4)
        out = coarse_grain(v)
        assert np.allclose(out, [[2.5, 4.5], [10.5, 12.5]])

    def test_checkerboard_cancels(self):
        v = np.indices((8, 8)).sum(axis=0) % 2 * 2.0 - 1.0
        assert np.allclose(coarse_grain(v), 0.0)

    def test_odd_dimension_raises(self):
        with pytest.raises(ParameterError):
            coarse_grain(np.ones((3, 4)))

    def test_maximally_mixed_is_flat(self):
        N = 16
        grid = toroidal_wigner(DensityMatrix.maximally_mixed(N), 2.6)
        coarse = grid.coarse()
        assert np.ptp(coarse) < 1e-12
        assert coarse.mean() == pytest.approx(1.0 / (2 * N))


class TestNegativity:
    def test_diagonal_state_has_none(self):
        """Any incoherent mixture of ladder states: the coarse grid averages
        away the antipodal ghost rows, leaving no negative cells."""
        N = 16
        rho = DensityMatrix.thermal(N, 2.6, 4.0)
        assert negativity_volume(toroidal_wigner(rho, 2.6)) == pytest.approx(0.0, abs=1e-12)

    def test_superposition_has_some(self):
        N = 16
        psi = np.zeros(N)
        psi[N // 2] = psi[N // 2 + 2] = 1.0
        rho = DensityMatrix.from_state(psi)
        assert negativity_volume(toroidal_wigner(rho, 2.6)) > 0.01

    def test_decoherence_reduces_it(self):
        from cantori import apply_decoherence

        N = 16
        psi = np.zeros(N)
        psi[N // 2] = psi[N // 2 + 2] = 1.0
        rho = DensityMatrix.from_state(psi)
        before = negativity_volume(toroidal_wigner(rho, 2.6))
        mixed = rho
        for _ in range(5):
            mixed = apply_decoherence(mixed, 0.3)
        after = negativity_volume(toroidal_wigner(mixed, 2.6))
        assert after < before


def test_export(tmp_path):
    N = 4
    grid = toroidal_wigner(DensityMatrix.pure(N, 0), 2.6)
    path = tmp_path / "w.dat"
    export_grid(path, grid, header_extra="demo")
    data = np.loadtxt(path)
    assert data.shape == (4 * N * N, 3)
    assert path.read_text().startswith("# demo")

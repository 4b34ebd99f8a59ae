"""Tests for transport metrics, energies, and continued-fraction helpers."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import erfc

from cantori import (
    ClassicalEnsemble,
    SimParams,
    TransportCurve,
    continued_fraction,
    fraction_outside_classical,
    fraction_outside_quantum,
    kinetic_energy,
    kinetic_energy_quantum,
    thermal_ensemble,
)
from cantori.analysis import convergent, transport_curve_classical, transport_curve_quantum
from cantori.classical import TrajectoryRecord
from cantori.model import ParameterError


class TestFractionOutsideClassical:
    def test_explicit(self):
        ens = ClassicalEnsemble(np.zeros(4), np.array([1.0, -5.0, 3.0, 0.0]))
        assert fraction_outside_classical(ens, 2.0) == 0.5

    def test_empty_raises(self):
        ens = ClassicalEnsemble(np.zeros(0), np.zeros(0))
        with pytest.raises(ParameterError):
            fraction_outside_classical(ens, 1.0)

    def test_gaussian_tail_oracle(self):
        """Thermal ensemble tail mass vs the closed-form erfc weight."""
        sigma, boundary = 10.0, 10.0 * np.pi
        params = SimParams(
            kick_strength=270.0,
            scaled_planck=2.6,
            n_trajectories=1_000_000,
            init_momentum_sigma=sigma,
            rng_seed=42,
        )
        ens = thermal_ensemble(params)
        expected = erfc(boundary / (sigma * math.sqrt(2.0)))
        got = fraction_outside_classical(ens, boundary)
        assert got == pytest.approx(expected, rel=0.1)


class TestFractionOutsideQuantum:
    def test_straddling_bin_interpolation(self):
        """Site n = 5 at hbar_k = 2 occupies [9, 11); the boundary slices it."""
        N = 16
        p = np.zeros(N)
        p[5 + N // 2] = 1.0
        assert fraction_outside_quantum(p, 2.0, 9.0) == pytest.approx(1.0)
        assert fraction_outside_quantum(p, 2.0, 10.0) == pytest.approx(0.5)
        assert fraction_outside_quantum(p, 2.0, 10.5) == pytest.approx(0.25)
        assert fraction_outside_quantum(p, 2.0, 11.0) == pytest.approx(0.0)

    def test_uniform_ladder(self):
        """Uniform populations at the production grid, oracle assembled by
        counting whole bins plus the sliced pair."""
        N, hbar_k, boundary = 128, 2.6, 10.0 * np.pi
        p = np.full(N, 1.0 / N)
        whole = sum(1 for n in range(-N // 2, N // 2) if (abs(n) - 0.5) * hbar_k >= boundary)
        sliced = 2 * ((12.5 * hbar_k - boundary) / hbar_k)
        expected = (whole + sliced) / N
        got = fraction_outside_quantum(p, hbar_k, boundary)
        assert got == pytest.approx(expected, abs=1e-12)
        assert got == pytest.approx(0.8112, abs=2e-4)

    @given(
        boundaries=st.tuples(
            st.floats(0.1, 20.0), st.floats(0.1, 20.0)
        ),
        seed=st.integers(0, 2**16),
    )
    def test_monotone_in_boundary(self, boundaries, seed):
        rng = np.random.default_rng(seed)
        p = rng.random(16)
        p /= p.sum()
        b1, b2 = sorted(boundaries)
        assert fraction_outside_quantum(p, 2.6, b1) >= fraction_outside_quantum(p, 2.6, b2) - 1e-12

    def test_continuous_across_bin_edge(self):
        p = np.full(16, 1.0 / 16)
        edge = 4.5 * 2.6
        lo = fraction_outside_quantum(p, 2.6, edge - 1e-9)
        hi = fraction_outside_quantum(p, 2.6, edge + 1e-9)
        assert abs(lo - hi) < 1e-8


class TestKineticEnergy:
    def test_samples(self):
        assert kinetic_energy([2.0, -2.0]) == pytest.approx(2.0)
        assert kinetic_energy(np.zeros(5)) == 0.0

    def test_ladder(self):
        N = 16
        p = np.zeros(N)
        p[3 + N // 2] = 1.0
        assert kinetic_energy_quantum(p, 2.0) == pytest.approx(18.0)

    def test_ladder_matches_sampled(self):
        """Gaussian ladder populations vs direct samples at the same grid."""
        N, hbar_k = 128, 2.6
        n = np.arange(-N // 2, N // 2)
        p = np.exp(-(n**2) / 50.0)
        p /= p.sum()
        direct = np.sum(p * 0.5 * (n * hbar_k) ** 2)
        assert kinetic_energy_quantum(p, hbar_k) == pytest.approx(direct)


class TestTransportCurve:
    def test_validation(self):
        with pytest.raises(ParameterError):
            TransportCurve(np.arange(3), np.zeros(2), 1.0, "classical")
        with pytest.raises(ParameterError):
            TransportCurve(np.arange(2), np.array([0.5, 1.5]), 1.0, "classical")

    def test_from_trajectory_record(self):
        rec = TrajectoryRecord(
            kicks=np.array([0, 1]),
            phi=np.zeros((2, 4)),
            rho=np.array([[0.0, 1.0, 5.0, -5.0], [5.0, 5.0, 5.0, 0.0]]),
        )
        curve = transport_curve_classical(rec, 2.0, {"k": 270.0})
        assert np.allclose(curve.fraction_outside, [0.5, 0.75])
        assert curve.source == "classical"
        assert curve.params["k"] == 270.0

    def test_from_population_record(self):
        from types import SimpleNamespace

        N = 16
        p0 = np.zeros(N)
        p0[N // 2] = 1.0
        p1 = np.zeros(N)
        p1[5 + N // 2] = 1.0
        rec = SimpleNamespace(kicks=np.array([0, 1]), populations=np.stack([p0, p1]))
        curve = transport_curve_quantum(rec, 2.0, 9.0)
        assert np.allclose(curve.fraction_outside, [0.0, 1.0])
        assert curve.source == "quantum"

    def test_export_roundtrip(self, tmp_path):
        curve = TransportCurve(
            np.arange(3), np.array([0.0, 0.25, 0.5]), 10 * np.pi, "quantum", {"eta": 0.0}
        )
        path = tmp_path / "curve.dat"
        curve.export(path)
        data = np.loadtxt(path)
        assert np.allclose(data[:, 1], curve.fraction_outside)
        text = path.read_text()
        assert "eta=0.0" in text and "quantum" in text

    def test_export_empty(self, tmp_path):
        curve = TransportCurve(np.zeros(0, dtype=int), np.zeros(0), 1.0, "classical")
        path = tmp_path / "empty.dat"
        curve.export(path)
        assert path.read_text().startswith("# ")


class TestContinuedFraction:
    def test_rational(self):
        assert continued_fraction(1.5, 8) == [1, 2]
        assert continued_fraction(0.25, 8) == [0, 4]

    def test_pi(self):
        assert continued_fraction(math.pi, 4) == [3, 7, 15, 1]

    def test_golden_mean(self):
        golden = (1.0 + math.sqrt(5.0)) / 2.0
        assert continued_fraction(golden, 8) == [1] * 8

    def test_depth_validation(self):
        with pytest.raises(ParameterError):
            continued_fraction(1.0, 0)

    def test_convergent_values(self):
        assert convergent([3, 7]) == Fraction(22, 7)
        assert convergent([1, 1, 1, 1, 1]) == Fraction(8, 5)
        with pytest.raises(ParameterError):
            convergent([])

    @given(st.floats(0.01, 50.0))
    def test_convergent_accuracy(self, x):
        """A truncated expansion approximates x to better than 1/q^2."""
        terms = continued_fraction(x, 10)
        approx = convergent(terms)
        assert abs(x - float(approx)) <= 1.0 / approx.denominator**2 + 1e-12

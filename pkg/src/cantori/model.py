"""Parameter model for the double-pulse driven rotor.

Converts laboratory parameters (Rabi frequency, detunings, pulse period) to
the two dimensionless numbers that control the dynamics: the kick strength k
and the scaled Planck constant hbar_k.  Also holds the pulse-train schedule
and the resonance-structure analytics (Fourier coefficients of the pulse
train, primary resonance widths, Chirikov overlap).

Dimensionless variables: phi = 2 k_L x, rho = (2 k_L T / M) p_x, tau = t / T.
The one-cycle Hamiltonian is H = rho^2/2 - k cos(phi) f(tau) with f the
double-pulse profile (two unit pulses of width alpha, centers separated
by delta, per period).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

HBAR = 1.054571817e-34  # J s

# Line strengths for the caesium F=4 -> F'=5,4,3 transitions, assuming
# equal Zeeman sub-level populations.
LINE_STRENGTHS = (Fraction(11, 27), Fraction(7, 36), Fraction(7, 108))

# Caesium D2 constants used by the default configuration.
CS_MASS = 2.2069e-25          # kg
CS_WAVELENGTH = 852e-9        # m


class ParameterError(ValueError):
    """Invalid physical or simulation parameter."""


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory parameters of the kicked-atom experiment.

    rabi_frequency : resonant Rabi frequency Omega (rad/s)
    detunings      : (delta_45, delta_44, delta_43) in rad/s
    wave_number    : laser wave number k_L (1/m)
    atom_mass      : atom mass M (kg)
    pulse_period   : kick-cycle period T (s)
    """

    rabi_frequency: float
    detunings: tuple[float, float, float]
    wave_number: float
    atom_mass: float
    pulse_period: float

    def __post_init__(self):
        fields = {
            "wave_number": self.wave_number,
            "atom_mass": self.atom_mass,
            "pulse_period": self.pulse_period,
        }
        for name, value in fields.items():
            if not (value > 0) or not math.isfinite(value):
                raise ParameterError(f"{name} must be strictly positive, got {value!r}")
        if not (self.rabi_frequency >= 0) or not math.isfinite(self.rabi_frequency):
            raise ParameterError(f"rabi_frequency must be >= 0, got {self.rabi_frequency!r}")
        if len(self.detunings) != 3 or any(d <= 0 or not math.isfinite(d) for d in self.detunings):
            raise ParameterError(f"detunings must be three positive values, got {self.detunings!r}")
        # Adiabatic elimination of the excited state needs the detunings to
        # dominate the coupling; warn (do not refuse) when it looks marginal.
        if self.rabi_frequency / min(self.detunings) > 0.1:
            warnings.warn(
                "rabi_frequency exceeds 10% of the smallest detuning; "
                "adiabatic elimination may be inaccurate",
                stacklevel=2,
            )

    def effective_rabi(self) -> float:
        """Effective two-photon Rabi frequency summed over hyperfine routes."""
        return self.rabi_frequency**2 * sum(
            float(s) / d for s, d in zip(LINE_STRENGTHS, self.detunings)
        )


def physical_to_scaled(p: PhysicalParams) -> tuple[float, float]:
    """Return (kick_strength k, scaled Planck constant hbar_k).

    k = hbar * Omega_eff * k_L^2 * T^2 / (2 M),  hbar_k = 4 hbar k_L^2 T / M.
    """
    kl2 = p.wave_number**2
    k = HBAR * p.effective_rabi() * kl2 * p.pulse_period**2 / (2.0 * p.atom_mass)
    hbar_k = 4.0 * HBAR * kl2 * p.pulse_period / p.atom_mass
    return k, hbar_k


@dataclass(frozen=True)
class SimParams:
    """Dimensionless run parameters.

    kick_strength       : k
    scaled_planck       : hbar_k
    se_probability      : per-cycle spontaneous-emission probability eta
    pulse_width         : alpha, as a fraction of the period
    pulse_spacing       : delta (pulse-center separation), fraction of the period
    basis_size          : N momentum eigenstates (even)
    n_kicks             : number of kick cycles
    n_trajectories      : classical ensemble size
    rng_seed            : seed for all stochastic sampling
    init_momentum_sigma : thermal width of the initial rho distribution
    kick_spread_rms     : optional fractional RMS spread of k (0 disables)
    """

    kick_strength: float
    scaled_planck: float
    se_probability: float = 0.0
    pulse_width: Fraction = Fraction(1, 20)
    pulse_spacing: Fraction = Fraction(1, 10)
    basis_size: int = 128
    n_kicks: int = 70
    n_trajectories: int = 10_000
    rng_seed: int = 0
    init_momentum_sigma: float = 10.0
    kick_spread_rms: float = 0.0

    def __post_init__(self):
        if not self.kick_strength >= 0:
            raise ParameterError(f"kick_strength must be >= 0, got {self.kick_strength}")
        if not self.scaled_planck > 0:
            raise ParameterError(f"scaled_planck must be > 0, got {self.scaled_planck}")
        if not 0.0 <= self.se_probability <= 1.0:
            raise ParameterError(f"se_probability must lie in [0, 1], got {self.se_probability}")
        alpha, delta = Fraction(self.pulse_width), Fraction(self.pulse_spacing)
        if not (0 < alpha <= delta and delta <= Fraction(1, 2)):
            raise ParameterError(
                f"need 0 < alpha <= delta <= 1/2, got alpha={alpha}, delta={delta}"
            )
        if self.basis_size <= 0 or self.basis_size % 2:
            raise ParameterError(f"basis_size must be a positive even integer, got {self.basis_size}")
        if self.n_kicks < 0:
            raise ParameterError(f"n_kicks must be non-negative, got {self.n_kicks}")
        if self.n_trajectories <= 0:
            raise ParameterError(f"n_trajectories must be positive, got {self.n_trajectories}")
        if self.init_momentum_sigma < 0 or self.kick_spread_rms < 0:
            raise ParameterError("init_momentum_sigma and kick_spread_rms must be >= 0")

    def pulse_train(self) -> "PulseTrain":
        return build_pulse_train(self.pulse_width, self.pulse_spacing)


@dataclass(frozen=True)
class PulseTrain:
    """Segment schedule of one kick cycle.

    Each segment is (duration, driven); durations are exact rationals and
    sum to 1.  driven=True means the standing wave is on (pendulum motion),
    False means free drift.
    """

    segments: tuple[tuple[Fraction, bool], ...]

    def __post_init__(self):
        total = sum((d for d, _ in self.segments), start=Fraction(0))
        if total != 1:
            raise ParameterError(f"segment durations must sum to 1, got {total}")
        if any(d < 0 for d, _ in self.segments):
            raise ParameterError("segment durations must be non-negative")

    @property
    def durations(self) -> np.ndarray:
        return np.array([float(d) for d, _ in self.segments])

    @property
    def driven(self) -> np.ndarray:
        return np.array([on for _, on in self.segments])


def build_pulse_train(alpha, delta) -> PulseTrain:
    """Symmetric two-pulse schedule: [pad dark, alpha on, gap dark, alpha on, pad dark].

    gap = delta - alpha, pad = (1 - alpha - delta)/2.  Zero-length segments are
    dropped and adjacent segments with the same drive flag merged, so the
    delta = alpha limit degenerates to a single pulse of width 2*alpha.
    """
    alpha, delta = Fraction(alpha), Fraction(delta)
    if not 0 < alpha <= delta:
        raise ParameterError(f"need 0 < alpha <= delta, got alpha={alpha}, delta={delta}")
    if alpha + delta > 1:
        raise ParameterError(f"pulses do not fit in one period: alpha + delta = {alpha + delta} > 1")
    pad = (1 - alpha - delta) / 2
    raw = [
        (pad, False),
        (alpha, True),
        (delta - alpha, False),
        (alpha, True),
        (pad, False),
    ]
    merged: list[tuple[Fraction, bool]] = []
    for dur, on in raw:
        if dur == 0:
            continue
        if merged and merged[-1][1] == on:
            merged[-1] = (merged[-1][0] + dur, on)
        else:
            merged.append((dur, on))
    return PulseTrain(tuple(merged))


def _sinc(x: float) -> float:
    return 1.0 if x == 0.0 else math.sin(x) / x


def fourier_coefficient(m: int, alpha=Fraction(1, 20), delta=Fraction(1, 10)) -> float:
    """Cosine-series coefficient a_m of the double-pulse profile.

    With the time origin at the midpoint between the two pulses (centers at
    +-delta/2), f(tau) = sum_m a_m cos(2 pi m tau) with

        a_m = 2 alpha sinc(m pi alpha) cos(m pi delta),  sinc(x) = sin(x)/x.

    The m-th term drives the primary resonance at rho = 2 pi m.
    """
    a, d = Fraction(alpha), Fraction(delta)
    # Exact zeros: cos(m pi delta) vanishes when m*delta is a half-integer,
    # sinc(m pi alpha) when m*alpha is a nonzero integer.
    if (m * d - Fraction(1, 2)) % 1 == 0:
        return 0.0
    if m != 0 and (m * a) % 1 == 0:
        return 0.0
    return 2.0 * float(a) * _sinc(m * math.pi * float(a)) * math.cos(m * math.pi * float(d))


def resonance_width(m: int, k: float, alpha=Fraction(1, 20), delta=Fraction(1, 10)) -> float:
    """Full momentum width 4 sqrt(|a_m| k) of the primary resonance at rho = 2 pi m."""
    if not k > 0:
        raise ParameterError(f"kick strength must be > 0, got {k}")
    return 4.0 * math.sqrt(abs(fourier_coefficient(m, alpha, delta)) * k)


def chirikov_overlap(m: int, n: int, k: float, alpha=Fraction(1, 20), delta=Fraction(1, 10)) -> bool:
    """True when the m-th and n-th primary resonances satisfy the overlap condition.

    Resonance centers sit at rho = 2 pi m; overlap when the half-widths
    bridge the separation: 2 pi |m - n| <= 2 sqrt(|a_m| k) + 2 sqrt(|a_n| k).
    """
    if m == n:
        raise ParameterError("resonance indices must differ")
    half = resonance_width(m, k, alpha, delta) / 2 + resonance_width(n, k, alpha, delta) / 2
    return 2.0 * math.pi * abs(m - n) <= half


def kick_strength_samples(params: SimParams, n_samples: int = 7) -> list[tuple[float, float]]:
    """Gauss-Hermite nodes and weights for averaging over the k spread.

    Returns [(k_i, w_i)] with weights summing to 1; a single node when the
    spread is disabled.  Nodes falling at k <= 0 are clipped out.
    """
    if params.kick_spread_rms == 0.0:
        return [(params.kick_strength, 1.0)]
    x, w = np.polynomial.hermite_e.hermegauss(n_samples)
    ks = params.kick_strength * (1.0 + params.kick_spread_rms * x)
    keep = ks > 0
    w = w[keep] / w[keep].sum()
    return list(zip(ks[keep].tolist(), w.tolist()))

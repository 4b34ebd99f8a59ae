"""Transport metrics shared by the classical and quantum backends."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .classical import ClassicalEnsemble
from .model import ParameterError


@dataclass
class TransportCurve:
    """Fraction of the distribution outside a momentum boundary vs kick number."""

    kicks: np.ndarray
    fraction_outside: np.ndarray
    boundary: float
    source: str                      # "classical" | "quantum"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.kicks = np.asarray(self.kicks)
        self.fraction_outside = np.asarray(self.fraction_outside, dtype=float)
        if self.kicks.shape != self.fraction_outside.shape:
            raise ParameterError("kicks and fraction_outside must have equal lengths")
        if np.any((self.fraction_outside < -1e-12) | (self.fraction_outside > 1 + 1e-12)):
            raise ParameterError("fractions must lie in [0, 1]")

    def export(self, path) -> None:
        header = "transport curve: fraction outside |rho| = {:.6g} ({})\n".format(
            self.boundary, self.source
        )
        header += " ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        header += "\nkick fraction_outside"
        np.savetxt(
            path,
            np.column_stack([self.kicks, self.fraction_outside]),
            header=header,
            comments="# ",
            fmt=["%d", "%.10g"],
        )


def fraction_outside_classical(ensemble: ClassicalEnsemble, boundary: float) -> float:
    """Fraction of trajectories with |rho| beyond the boundary."""
    if len(ensemble) == 0:
        raise ParameterError("empty ensemble")
    return float(np.mean(np.abs(ensemble.rho) > boundary))


def fraction_outside_quantum(populations: np.ndarray, hbar_k: float, boundary: float) -> float:
    """Probability weight at |rho| beyond the boundary, on the momentum ladder.

    Each ladder site n represents the momentum bin [(n-1/2)*hbar_k,
    (n+1/2)*hbar_k); the bin straddling the boundary contributes the linear
    fraction of its width that lies outside.
    """
    populations = np.asarray(populations, dtype=float)
    N = populations.size
    n = np.arange(-N // 2, N // 2)
    lo = (np.abs(n) - 0.5) * hbar_k
    hi = (np.abs(n) + 0.5) * hbar_k
    outside = np.clip((hi - np.maximum(lo, boundary)) / hbar_k, 0.0, 1.0)
    return float(np.sum(populations * outside))


def transport_curve_classical(record, boundary: float, params: dict | None = None) -> TransportCurve:
    """Fraction-outside curve from a TrajectoryRecord."""
    frac = np.mean(np.abs(record.rho) > boundary, axis=1)
    return TransportCurve(record.kicks.copy(), frac, boundary, "classical", params or {})


def transport_curve_quantum(record, hbar_k: float, boundary: float, params: dict | None = None) -> TransportCurve:
    """Fraction-outside curve from an EvolutionRecord."""
    frac = np.array(
        [fraction_outside_quantum(p, hbar_k, boundary) for p in record.populations]
    )
    return TransportCurve(record.kicks.copy(), frac, boundary, "quantum", params or {})


def kinetic_energy(rho_values: np.ndarray) -> float:
    """Mean rho^2/2 of a set of momentum samples."""
    rho_values = np.asarray(rho_values, dtype=float)
    return float(np.mean(0.5 * rho_values**2))


def kinetic_energy_quantum(populations: np.ndarray, hbar_k: float) -> float:
    """<rho^2>/2 of a ladder population distribution."""
    populations = np.asarray(populations, dtype=float)
    N = populations.size
    n = np.arange(-N // 2, N // 2)
    return float(np.sum(populations * 0.5 * (n * hbar_k) ** 2))


def continued_fraction(w: float, depth: int) -> list[int]:
    """Leading terms [a0, a1, ...] of the continued-fraction expansion of w.

    Stops early if the remainder is exhausted (rational input) or the next
    term exceeds what float precision supports.
    """
    if depth < 1:
        raise ParameterError(f"depth must be >= 1, got {depth}")
    terms = []
    x = float(w)
    for _ in range(depth):
        a = math.floor(x)
        terms.append(int(a))
        frac = x - a
        if frac < 1e-12:
            break
        x = 1.0 / frac
        if x > 1e12:
            break
    return terms


def convergent(terms: list[int]) -> Fraction:
    """Rational value of a finite continued fraction."""
    if not terms:
        raise ParameterError("empty continued fraction")
    value = Fraction(terms[-1])
    for a in reversed(terms[:-1]):
        value = a + (Fraction(1) / value if value != 0 else Fraction(0))
    return value

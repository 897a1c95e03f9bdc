"""Stability verdicts and the frequency-amplitude phase diagram.

A model's long-time behaviour is read off the eigenvalues of its
fundamental map: a hyperbolic map pumps energy exponentially, a
parabolic one gives power-like t^2 growth, an elliptic one keeps the
energy bounded.  The chart functions work in the dimensionless plane
(omega/omega_1, Delta L / L) of figure-style stability scans: walls
cannot move faster than light (amplitude above 1/x is forbidden) and
an exact threshold amplitude separates stable from unstable motion at
every non-resonant frequency.
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import mobius
from .catalog import CavityModel, Family
from .mobius import MapClass, MapKind

__all__ = [
    "Verdict",
    "StabilityReport",
    "PhasePoint",
    "classify_model",
    "instability_threshold",
    "max_amplitude",
    "amplitude_frequency_curve",
    "phase_diagram_scan",
]


class Verdict(str, Enum):
    STABLE = "stable"
    POWER_LIKE = "power_like"
    EXPONENTIAL = "exponential"
    FORBIDDEN = "forbidden"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class StabilityReport:
    """Verdict for one model.

    growth_rate (1/time) is set only for exponential verdicts and is
    the energy e-folding rate ln|lambda1/lambda2| per double resonance
    period 2 M T; energy_exponent is set only for power-like verdicts.
    """

    model: CavityModel
    map_class: MapClass
    verdict: Verdict
    growth_rate: float | None = None
    energy_exponent: float | None = None

    def to_dict(self) -> dict:
        from .catalog import model_to_dict

        lam1, lam2 = self.map_class.lambda1, self.map_class.lambda2
        return {
            "model": model_to_dict(self.model),
            "verdict": self.verdict.value,
            "map_kind": self.map_class.kind.value,
            "lambda1": [lam1.real, lam1.imag],
            "lambda2": [lam2.real, lam2.imag],
            "discriminant": self.map_class.discriminant,
            "growth_rate": self.growth_rate,
            "energy_exponent": self.energy_exponent,
        }


@dataclass(frozen=True)
class PhasePoint:
    omega_ratio: float
    amplitude_ratio: float
    verdict: Verdict


def classify_model(model: CavityModel) -> StabilityReport:
    """Map-eigenvalue verdict for a catalog model.

    linear-finite is power-like (t^2); linear-odd likewise except M = 1,
    whose leading coefficient vanishes; inversion is always stable; the
    homographic family follows its map kind.  The growth rate of a
    hyperbolic model is ln|lambda1/lambda2| / (2 M T), the exact
    per-unit-time rate of the packet squeezing.
    """
    cls = mobius.classify(model.delta1)
    fam = model.family
    rate: float | None = None
    expo: float | None = None
    if fam is Family.STATIC:
        verdict = Verdict.STABLE
    elif fam is Family.LINEAR_FINITE:
        verdict = Verdict.POWER_LIKE
        expo = 2.0
    elif fam is Family.LINEAR_ODD:
        if model.M == 1:
            verdict = Verdict.STABLE
        else:
            verdict = Verdict.POWER_LIKE
            expo = 2.0
    elif fam is Family.INVERSION:
        verdict = Verdict.STABLE
    else:
        if cls.kind is MapKind.HYPERBOLIC:
            verdict = Verdict.EXPONENTIAL
            rate = (math.log(abs(cls.lambda1) / abs(cls.lambda2))
                    / (2.0 * model.M * model.T))
        elif cls.kind is MapKind.PARABOLIC:
            verdict = Verdict.POWER_LIKE
            expo = 2.0
        else:
            verdict = Verdict.STABLE
    return StabilityReport(model=model, map_class=cls, verdict=verdict,
                           growth_rate=rate, energy_exponent=expo)


def instability_threshold(omega_ratio: float) -> float:
    """Minimal relative amplitude Delta L / L that destabilizes a wall
    vibrating at omega = omega_ratio * omega_1:

        |x - floor(x + 1/2)| / x.

    Zero exactly on integer resonances; exact, not perturbative.
    """
    x = float(omega_ratio)
    if x <= 0.0:
        raise ValueError("parameter out of range: need omega_ratio > 0")
    return abs(x - math.floor(x + 0.5)) / x


def max_amplitude(omega_ratio: float) -> float:
    """Luminal bound Delta L / L = 1 / omega_ratio (wall speed -> c)."""
    x = float(omega_ratio)
    if x <= 0.0:
        raise ValueError("parameter out of range: need omega_ratio > 0")
    return 1.0 / x


def amplitude_frequency_curve(omega_ratio: float) -> float:
    """Relative amplitude |1 - (2/x) floor(x/2 + 1/2)| traced by the
    finite-shift resonant family as its frequency ratio x varies.

    Vanishes at even integers and touches the instability threshold
    between them.
    """
    x = float(omega_ratio)
    if x <= 0.0:
        raise ValueError("parameter out of range: need omega_ratio > 0")
    return abs(1.0 - (2.0 / x) * math.floor(0.5 * x + 0.5))


def phase_diagram_scan(omega_range: tuple[float, float],
                       amplitude_range: tuple[float, float],
                       grid: tuple[int, int]) -> list[PhasePoint]:
    """Classify a rectangular grid of (omega/omega_1, Delta L/L) points.

    Rules, in order of precedence: frequencies at or below the
    fundamental and amplitudes above the luminal bound 1/x are
    forbidden; zero amplitude is stable; points within one grid cell of
    an integer resonance line or of the threshold curve are power-like
    (the boundary set); above the threshold is exponential; below it
    is stable.

    Returns points row-major over the amplitude grid, frequency fastest.
    """
    nx, ny = grid
    if nx < 2 or ny < 2:
        raise ValueError("parameter out of range: need grid >= 2 x 2")
    xs = np.linspace(omega_range[0], omega_range[1], nx)
    ys = np.linspace(amplitude_range[0], amplitude_range[1], ny)
    cx = (xs[-1] - xs[0]) / (nx - 1)
    cy = (ys[-1] - ys[0]) / (ny - 1)
    out: list[PhasePoint] = []
    for a in ys:
        for x in xs:
            x = float(x)
            a = float(a)
            if x <= 1.0:
                v = Verdict.FORBIDDEN
            elif a > 1.0 / x:
                v = Verdict.FORBIDDEN
            elif a <= 0.0:
                v = Verdict.STABLE
            else:
                thr = instability_threshold(x)
                on_line = abs(x - math.floor(x + 0.5)) <= cx
                on_thr = abs(a - thr) <= cy
                if on_line or on_thr:
                    v = Verdict.POWER_LIKE
                elif a > thr:
                    v = Verdict.EXPONENTIAL
                else:
                    v = Verdict.STABLE
            out.append(PhasePoint(x, a, v))
    return out

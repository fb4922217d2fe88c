"""Closed-form statistics of the precessing qubit ``H = (omega/2) sigma_x``.

The dichotomic variable is ``Q = sigma_z``.  Everything here is analytic:
two-time correlators, the four three-time Leggett-Garg combinations, the
difference vector whose spin component measures ``Q(t2) - Q(t1)``, and the
two-flip/no-flip path statistics of projective measurements at 0, t, 2t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CorrelatorRangeError, SingularRatioError

#: Below this a Leggett-Garg left-hand side counts as violated.
VIOLATION_TOL = 1e-12

#: Signs of (C12, C23, C13) in each combination, in the order
#: 1+C12+C23+C13, 1-C12-C23+C13, 1+C12-C23-C13, 1-C12+C23-C13.
LG_SIGNS = (
    (+1, +1, +1),
    (-1, -1, +1),
    (+1, -1, -1),
    (-1, +1, -1),
)


@dataclass(frozen=True)
class ProtocolParams:
    """Physical inputs shared by every model.

    Attributes
    ----------
    omega : float
        Precession angular frequency, > 0.
    lam : float
        Dimensionless system-ancilla coupling, >= 0.
    times : tuple of float
        Strictly increasing measurement times (may be empty).
    """

    omega: float
    lam: float = 0.0
    times: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ValueError(f"omega must be a positive finite number, got {self.omega!r}")
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"lambda must be a finite number >= 0, got {self.lam!r}")
        times = tuple(float(t) for t in self.times)
        if any(not math.isfinite(t) for t in times):
            raise ValueError("times must be finite")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"times must be strictly increasing, got {times}")
        object.__setattr__(self, "times", times)

    @classmethod
    def equally_spaced(cls, omega: float, t: float, lam: float = 0.0) -> "ProtocolParams":
        """Three times 0, t, 2t."""
        return cls(omega=omega, lam=lam, times=(0.0, t, 2.0 * t))


@dataclass(frozen=True)
class LGReport:
    c12: float
    c23: float
    c13: float
    lhs: tuple[float, float, float, float]

    @property
    def violated(self) -> tuple[bool, ...]:
        return tuple(v < -VIOLATION_TOL for v in self.lhs)

    @property
    def any_violated(self) -> bool:
        return any(self.violated)


@dataclass(frozen=True)
class LGScan:
    """Equal-spacing scan of ``1 - 2 cos(wt) + cos(2 wt)``."""

    t: np.ndarray
    lhs2: np.ndarray

    @property
    def violated(self) -> np.ndarray:
        return self.lhs2 < -VIOLATION_TOL

    def minimum(self) -> tuple[float, float]:
        """(t, lhs2) at the smallest sampled value."""
        i = int(np.argmin(self.lhs2))
        return float(self.t[i]), float(self.lhs2[i])


@dataclass(frozen=True)
class SignChangeStats:
    p_pmp: float
    p_ppp: float
    xi: float


def correlation(omega: float, t1: float, t2: float) -> float:
    """Symmetrized two-time correlator of ``sigma_z``; equals cos(omega (t2 - t1))."""
    return math.cos(omega * (t2 - t1))


def lg_values(
    c12: float, c23: float, c13: float, check: bool = True
) -> tuple[float, float, float, float]:
    """The four LG left-hand sides; ``check=False`` admits noisy estimates outside [-1, 1]."""
    cs = (c12, c23, c13)
    for name, c in zip(("c12", "c23", "c13"), cs):
        if check and not (-1.0 - VIOLATION_TOL <= c <= 1.0 + VIOLATION_TOL):
            raise CorrelatorRangeError(f"{name} = {c!r} is outside [-1, 1]")
    return tuple(1.0 + s12 * c12 + s23 * c23 + s13 * c13 for s12, s23, s13 in LG_SIGNS)


def lg_report(c12: float, c23: float, c13: float, check: bool = True) -> LGReport:
    return LGReport(c12, c23, c13, lg_values(c12, c23, c13, check))


def quantum_lg_report(params: ProtocolParams) -> LGReport:
    """LG combinations for the free qubit at ``params.times`` (three times)."""
    if len(params.times) != 3:
        raise ValueError("need exactly three measurement times")
    t1, t2, t3 = params.times
    w = params.omega
    return lg_report(correlation(w, t1, t2), correlation(w, t2, t3), correlation(w, t1, t3))


def lg_scan(omega: float, t_max: float, steps: int) -> LGScan:
    """Evaluate the second LG combination for equal spacing on ``steps`` points of [0, t_max]."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    t = np.linspace(0.0, t_max, steps)
    lhs2 = 1.0 - 2.0 * np.cos(omega * t) + np.cos(2.0 * omega * t)
    return LGScan(t=t, lhs2=lhs2)


def difference_vector(omega: float, t1: float, t2: float) -> np.ndarray:
    """Bloch vector ``a`` with ``Q(t2) - Q(t1) = a . sigma`` (Heisenberg operators at t1).

    Components are ordered (x, y, z); ``|a|^2 = 2 (1 - C12)``.
    """
    phi = omega * (t2 - t1)
    return np.array([0.0, math.sin(phi), math.cos(phi) - 1.0])


def sign_change_stats(omega: float, t: float) -> SignChangeStats:
    """Path probabilities for projective ``Q`` readings at 0, t, 2t starting in ``Q=+1``.

    ``p_pmp`` is the (+, -, +) path, ``p_ppp`` the (+, +, +) path and ``xi`` their
    ratio ``tan(omega t / 2)**4``.
    """
    wt = omega * t
    if abs(wt - math.pi) <= 1e-12:
        raise SingularRatioError("xi is undefined at omega*t = pi")
    if not (0.0 <= wt < math.pi):
        raise ValueError(f"omega*t must lie in [0, pi), got {wt!r}")
    s = math.sin(wt / 2.0)
    c = math.cos(wt / 2.0)
    p_pmp = s**4
    p_ppp = c**4
    return SignChangeStats(p_pmp=p_pmp, p_ppp=p_ppp, xi=p_pmp / p_ppp)

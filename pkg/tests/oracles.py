"""Independent quadrature references for the classical ensemble.

These integrate over the uniform phase directly and never touch the Monte
Carlo sampler.
"""

import math

import numpy as np
from scipy.integrate import quad


def _sign(v):
    return 1.0 if v >= 0 else -1.0


def _breaks(lo, hi, shifts):
    pts = []
    for s in shifts:
        k0 = math.ceil((lo + s) / (math.pi / 2)) - 1
        for k in range(k0, k0 + 12):
            x = k * math.pi / 2 - s
            if lo < x < hi:
                pts.append(x)
    return sorted(set(pts))


def phase_average(f, lo, hi, shifts=(0.0,)):
    val, _ = quad(f, lo, hi, points=_breaks(lo, hi, shifts) or None, limit=200, epsabs=1e-12)
    return val / (hi - lo)


def correlation(theta):
    """<sign(sin p) sign(sin(p + theta))> for p uniform on [0, 2 pi)."""
    return phase_average(lambda p: _sign(math.sin(p)) * _sign(math.sin(p + theta)), 0.0, 2 * math.pi, (0.0, theta))


def q_plus_mean_q(s):
    """<Q> at rotation angle s for the Q(0)=+1 hemisphere (p uniform on (0, pi))."""
    return phase_average(lambda p: _sign(math.sin(p + s)), 0.0, math.pi, (s,))


def q_plus_mean_sign_y(s):
    return phase_average(lambda p: _sign(math.cos(p + s)), 0.0, math.pi, (s,))


def q_plus_velocity(s, omega, h=1e-4):
    """d<Q>/dt by central difference of the quadrature mean."""
    return omega * (q_plus_mean_q(s + h) - q_plus_mean_q(s - h)) / (2 * h)

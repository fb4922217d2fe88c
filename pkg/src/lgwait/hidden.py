"""Classical macrorealistic sphere model.

Each member of the ensemble is a unit vector rotating about the x axis::

    x(t) = (x0, r0 cos(omega t + phase), r0 sin(omega t + phase))

and the dichotomic variable is ``Q(t) = sign(z(t))`` with ``sign(0) = +1``.
Uniform sampling on the sphere means ``x0`` uniform on [-1, 1] and ``phase``
uniform on [0, 2 pi).  All randomness is in the initial condition; the
evolution itself is deterministic.

Ensemble routines draw through :mod:`lgwait.streams`, so a given
``(seed, n)`` yields the same numbers for any number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EfficiencyRangeError, GridCoverageError
from .spin import LG_SIGNS, LGReport
from .streams import map_chunks

CONDITIONINGS = ("none", "q_plus", "q_minus")

_ENSEMBLE_TAG = 1
_CLICK_TAG = 2


@dataclass(frozen=True)
class ClassicalSpinVector:
    x0: float
    r0: float
    phase: float

    def __post_init__(self):
        if abs(self.x0**2 + self.r0**2 - 1.0) > 1e-12:
            raise ValueError("x0**2 + r0**2 must equal 1")

    def position(self, omega: float, t: float) -> np.ndarray:
        a = omega * t + self.phase
        return np.array([self.x0, self.r0 * math.cos(a), self.r0 * math.sin(a)])


@dataclass(frozen=True)
class Ensemble:
    """Struct-of-arrays ensemble of rotating unit vectors."""

    x0: np.ndarray
    r0: np.ndarray
    phase: np.ndarray

    def __len__(self) -> int:
        return len(self.x0)

    def __getitem__(self, i: int) -> ClassicalSpinVector:
        return ClassicalSpinVector(float(self.x0[i]), float(self.r0[i]), float(self.phase[i]))

    def positions(self, omega: float, t: float) -> np.ndarray:
        a = omega * t + self.phase
        return np.column_stack([self.x0, self.r0 * np.cos(a), self.r0 * np.sin(a)])

    def z(self, omega: float, t: float) -> np.ndarray:
        return self.r0 * np.sin(omega * t + self.phase)

    def y(self, omega: float, t: float) -> np.ndarray:
        return self.r0 * np.cos(omega * t + self.phase)

    def q(self, omega: float, t: float) -> np.ndarray:
        return _sign(self.z(omega, t))

    def sign_changes(
        self, omega: float, t_start: float, t_end: float, grid_steps: int | None = None
    ) -> np.ndarray:
        """Number of sign changes of ``Q`` in (t_start, t_end], per member.

        Without ``grid_steps`` this counts zero crossings of ``z`` exactly.
        With it, ``Q`` is sampled on ``grid_steps`` equal cells and flips
        between neighbouring samples are counted; while a cell spans less
        than half a turn the two counts agree.  Members sitting on the
        rotation axis (``r0 == 0``) never change sign.
        """
        if grid_steps is not None:
            if grid_steps < 1:
                raise ValueError("grid_steps must be >= 1")
            if omega * (t_end - t_start) / grid_steps >= math.pi:
                grid = make_grid(t_start, t_end, grid_steps)
                count = np.zeros(len(self), dtype=np.int64)
                prev = self.q(omega, grid[0])
                for t in grid[1:]:
                    cur = self.q(omega, t)
                    count += prev != cur
                    prev = cur
                return count
        lo = np.floor((omega * t_start + self.phase) / math.pi)
        hi = np.floor((omega * t_end + self.phase) / math.pi)
        return np.where(self.r0 > 0, hi - lo, 0).astype(np.int64)


def _sign(v: np.ndarray) -> np.ndarray:
    return np.where(v >= 0, 1, -1).astype(np.int8)


def _draw(rng: np.random.Generator, size: int, conditioning: str):
    u = rng.random((size, 2))
    u_axis, u_phase = u[:, 0], u[:, 1]
    x0 = 2.0 * u_axis - 1.0
    r0 = np.sqrt(np.clip(1.0 - x0 * x0, 0.0, None))
    # 1 - u lies in (0, 1], which keeps z(0) off zero for the hemispheres
    if conditioning == "none":
        phase = 2.0 * math.pi * u_phase
    elif conditioning == "q_plus":
        phase = math.pi * (1.0 - u_phase)
    else:
        phase = math.pi + math.pi * (1.0 - u_phase)
    return x0, r0, phase


def sample_ensemble(n: int, seed: int, conditioning: str = "none", workers: int = 1) -> Ensemble:
    """Draw ``n`` vectors uniformly on the sphere, optionally restricted to a hemisphere.

    ``q_plus`` / ``q_minus`` keep only vectors with ``Q(0) = +1`` / ``-1``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if conditioning not in CONDITIONINGS:
        raise ValueError(f"conditioning must be one of {CONDITIONINGS}, got {conditioning!r}")
    parts = map_chunks(lambda rng, m: _draw(rng, m, conditioning), n, seed, _ENSEMBLE_TAG, workers)
    x0, r0, phase = (np.concatenate([p[k] for p in parts]) for k in range(3))
    return Ensemble(x0=x0, r0=r0, phase=phase)


@dataclass(frozen=True)
class ClassicalTrajectory:
    grid: np.ndarray
    q: np.ndarray
    velocity_events: list[tuple[float, int]]

    def q_at(self, t: float) -> int:
        """Value of Q at ``t``, taken from the last grid point not after ``t``."""
        tol = 1e-12 * max(1.0, abs(t))
        if t < self.grid[0] - tol or t > self.grid[-1] + tol:
            raise GridCoverageError(f"t={t!r} outside grid [{self.grid[0]}, {self.grid[-1]}]")
        i = int(np.searchsorted(self.grid, t + tol, side="right")) - 1
        return int(self.q[max(i, 0)])


def make_grid(t_start: float, t_end: float, steps: int = 1000) -> np.ndarray:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    return np.linspace(t_start, t_end, steps + 1)


def trajectory_q(v: ClassicalSpinVector, omega: float, grid: Sequence[float]) -> ClassicalTrajectory:
    """Sample ``Q`` along ``grid`` and record each flip as ``(time, direction)``.

    A flip between grid points k and k+1 is stamped at ``grid[k+1]`` with
    direction -1 for + to - and +1 for - to +.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 1:
        raise ValueError("grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    q = _sign(v.r0 * np.sin(omega * grid + v.phase))
    jumps = np.flatnonzero(np.diff(q))
    events = [(float(grid[k + 1]), int(np.sign(q[k + 1] - q[k]))) for k in jumps]
    return ClassicalTrajectory(grid=grid, q=q, velocity_events=events)


class Estimate(NamedTuple):
    estimate: float
    stderr: float


def _binomial_corr_stderr(c: float, n: int) -> float:
    return math.sqrt(max(1.0 - c * c, 0.0) / n)


def classical_correlation(
    omega: float, t1: float, t2: float, n: int, seed: int, workers: int = 1
) -> Estimate:
    """Monte Carlo ``<Q(t1) Q(t2)>`` over the uniform ensemble."""
    if n < 2:
        raise ValueError("n must be >= 2")
    ens = sample_ensemble(n, seed, "none", workers)
    prod = ens.q(omega, t1).astype(np.int64) * ens.q(omega, t2)
    c = float(prod.sum()) / n
    return Estimate(c, _binomial_corr_stderr(c, n))


def sawtooth_correlation(omega: float, t1: float, t2: float) -> float:
    """Closed-form ensemble correlator ``1 - 2 theta / pi`` with theta folded into [0, pi]."""
    theta = abs(omega * (t2 - t1)) % (2.0 * math.pi)
    if theta > math.pi:
        theta = 2.0 * math.pi - theta
    return 1.0 - 2.0 * theta / math.pi


class SameDiff(NamedTuple):
    p_same: float
    p_diff: float


def same_diff_probabilities(
    omega: float,
    t1: float,
    t2: float,
    n: int,
    seed: int,
    conditioning: str = "none",
    workers: int = 1,
) -> SameDiff:
    """Fractions of members with equal / opposite ``Q`` at ``t1`` and ``t2``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    ens = sample_ensemble(n, seed, conditioning, workers)
    n_same = int(np.count_nonzero(ens.q(omega, t1) == ens.q(omega, t2)))
    return SameDiff(n_same / n, (n - n_same) / n)


@dataclass(frozen=True)
class ClassicalLG:
    report: LGReport
    lhs_stderr: tuple[float, float, float, float]
    corr_stderr: tuple[float, float, float]


def classical_lg_report(
    omega: float, times: Sequence[float], n: int, seed: int, workers: int = 1
) -> ClassicalLG:
    """LG combinations estimated from one ensemble read at three times.

    Every member supplies all three values of ``Q``, so each combination is
    averaged per member and its standard error is the sample standard
    deviation over ``sqrt(n)``.
    """
    if len(times) != 3:
        raise ValueError("need exactly three times")
    if n < 2:
        raise ValueError("n must be >= 2")
    ens = sample_ensemble(n, seed, "none", workers)
    q1, q2, q3 = (ens.q(omega, t).astype(np.int64) for t in times)
    p12, p23, p13 = q1 * q2, q2 * q3, q1 * q3
    c12, c23, c13 = (float(p.sum()) / n for p in (p12, p23, p13))
    lhs, stderr = [], []
    for s12, s23, s13 in LG_SIGNS:
        per_member = 1 + s12 * p12 + s23 * p23 + s13 * p13
        lhs.append(float(per_member.sum()) / n)
        stderr.append(float(np.std(per_member, ddof=1)) / math.sqrt(n))
    return ClassicalLG(
        report=LGReport(c12, c23, c13, tuple(lhs)),
        lhs_stderr=tuple(stderr),
        corr_stderr=tuple(_binomial_corr_stderr(c, n) for c in (c12, c23, c13)),
    )


@dataclass(frozen=True)
class VelocityIdentity:
    """Both sides of ``<dQ/dt> = omega <sign(y)>`` with their standard errors."""

    lhs: float
    lhs_stderr: float
    rhs: float
    rhs_stderr: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def velocity_identity_terms(
    omega: float,
    n: int,
    dt: float,
    seed: int,
    probe_phase: float = math.pi / 4,
    conditioning: str = "q_plus",
    workers: int = 1,
) -> VelocityIdentity:
    """Finite-difference mean velocity vs ``omega`` times mean sign of the y component.

    The probe time is ``probe_phase / omega``; the velocity is regularized as
    ``(Q(t + dt) - Q(t)) / dt``.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if n < 2:
        raise ValueError("n must be >= 2")
    ens = sample_ensemble(n, seed, conditioning, workers)
    t = probe_phase / omega
    dq = (ens.q(omega, t + dt).astype(float) - ens.q(omega, t)) / dt
    sy = omega * _sign(ens.y(omega, t)).astype(float)
    root_n = math.sqrt(n)
    return VelocityIdentity(
        lhs=float(dq.mean()),
        lhs_stderr=float(dq.std(ddof=1)) / root_n,
        rhs=float(sy.mean()),
        rhs_stderr=float(sy.std(ddof=1)) / root_n,
    )


def velocity_identity_residual(
    omega: float, n: int, dt: float, seed: int, probe_phase: float = math.pi / 4, conditioning: str = "q_plus"
) -> float:
    return velocity_identity_terms(omega, n, dt, seed, probe_phase, conditioning).residual


def pointer_shift(
    traj: ClassicalTrajectory, lam: float, p: float, m: float, t1: float, t2: float
) -> float:
    """Final displacement of a free pointer coupled to the velocity of ``Q``.

    Integrating the discretized velocity over [t1, t2] telescopes to the net
    change of ``Q``, so the shift is ``p (t2 - t1) / m + lam (Q(t2) - Q(t1))``.
    """
    if t2 < t1:
        raise ValueError("t2 must not precede t1")
    if m <= 0:
        raise ValueError("mass must be > 0")
    traj.q_at(t1)
    traj.q_at(t2)
    tol = 1e-12 * max(1.0, abs(t2))
    # events are stamped at the later grid point of each flipped cell
    moved = sum(2 * d for time, d in traj.velocity_events if t1 + tol < time <= t2 + tol)
    return p * (t2 - t1) / m + lam * moved


def ensemble_pointer_shift(
    ens: Ensemble, omega: float, lam: float, p: float, m: float, t1: float, t2: float
) -> np.ndarray:
    """Vectorized :func:`pointer_shift` using exact sampling at the two end times."""
    return p * (t2 - t1) / m + lam * (ens.q(omega, t2).astype(float) - ens.q(omega, t1))


@dataclass(frozen=True)
class DetectorRun:
    p0_hat: float
    p1_hat: float
    c12_hat: float
    pd_hat: float
    n: int
    lam: float

    @property
    def p1_stderr(self) -> float:
        return math.sqrt(self.p1_hat * (1.0 - self.p1_hat) / self.n)

    @property
    def c12_stderr(self) -> float:
        return self.p1_stderr / (2.0 * self.lam**2)

    @property
    def efficiency_ratio(self) -> float:
        """Estimated clicks per sign-changing history, ``p1_hat / pd_hat``."""
        return self.p1_hat / self.pd_hat if self.pd_hat > 0 else float("nan")

    @property
    def efficiency_stderr(self) -> float:
        n_d = self.pd_hat * self.n
        r = self.efficiency_ratio
        return math.sqrt(r * (1.0 - r) / n_d) if n_d > 0 else float("nan")


def classical_detector_run(
    omega: float,
    lam: float,
    t1: float,
    t2: float,
    n: int,
    seed: int,
    grid_steps: int | None = None,
    workers: int = 1,
) -> DetectorRun:
    """Classical emulation of the waiting detector with efficiency ``4 lam^2``.

    Every sign change of ``Q`` in (t1, t2] independently triggers the
    detector with probability ``4 lam^2``; a member clicks if any of its
    sign changes triggered.  ``pd_hat`` is the fraction of members whose
    ``Q`` differs between the end points, from the same draws.
    """
    eff = 4.0 * lam**2
    if eff > 1.0:
        raise EfficiencyRangeError(f"efficiency 4*lambda^2 = {eff!r} exceeds 1")
    if lam <= 0:
        raise ValueError("lambda must be > 0")
    if n < 2:
        raise ValueError("n must be >= 2")
    ens = sample_ensemble(n, seed, "none", workers)
    flips = ens.sign_changes(omega, t1, t2, grid_steps)
    u = np.concatenate(map_chunks(lambda rng, m: rng.random(m), n, seed, _CLICK_TAG, workers))
    click = u < 1.0 - (1.0 - eff) ** flips
    p1_hat = int(np.count_nonzero(click)) / n
    pd_hat = int(np.count_nonzero(ens.q(omega, t1) != ens.q(omega, t2))) / n
    return DetectorRun(
        p0_hat=1.0 - p1_hat,
        p1_hat=p1_hat,
        c12_hat=1.0 - p1_hat / (2.0 * lam**2),
        pd_hat=pd_hat,
        n=n,
        lam=lam,
    )

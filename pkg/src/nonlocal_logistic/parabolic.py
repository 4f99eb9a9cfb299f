"""Deterministic time stepping for the reaction equation on the interval.

The terminal-value convention of the underlying evolution problem is
reversed internally: all user-facing time is forward time s, with s = 0
the initial datum.  One step solves

    (I + dt A) w_next = w + dt (a w - f(x, w))

i.e. implicit nonlocal diffusion and explicit reaction.  The resolvent
(I + dt A)^{-1} is entrywise nonnegative (M-matrix), and under the step
restriction dt <= 1 / (a + L_f) the explicit part is order preserving,
so the scheme preserves positivity and comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import ConfigurationError, DimensionError, NumericError
from .grid import Grid1D
from .operator import OperatorMatrix
from .spectral import EigenPair, principal_eigenpair
from .steady import ReactionSpec, SteadyState, solve_logistic

VERDICTS = ("to_positive_steady", "to_zero", "undecided")


@dataclass
class ParabolicRun:
    """Snapshots of one forward evolution; reproducible given its config."""

    grid: Grid1D
    spec: ReactionSpec
    dt: float
    horizon: float
    u0: np.ndarray = field(repr=False)
    times: np.ndarray = field(repr=False)
    snapshots: np.ndarray = field(repr=False)  # shape (len(times), n)

    def snapshot_at(self, s: float) -> np.ndarray:
        idx = np.nonzero(np.isclose(self.times, s, rtol=0.0, atol=self.dt / 2))[0]
        if idx.size == 0:
            raise LookupError(f"no snapshot recorded at s={s} (have {self.times})")
        return self.snapshots[idx[0]]


def max_stable_dt(spec: ReactionSpec, u0_max: float) -> float:
    """Positivity-preserving step bound 1 / (a + L_f) on [0, max(|u0|, K)]."""
    s_max = max(u0_max, spec.apriori_bound())
    return 1.0 / (spec.a + spec.f.lipschitz_on(s_max))


def evolve(
    op: OperatorMatrix,
    spec: ReactionSpec,
    u0: np.ndarray,
    dt: float,
    horizon: float,
    snapshot_times=None,
) -> ParabolicRun:
    """March the reaction equation to the horizon, recording snapshots.

    Snapshot times are snapped to the nearest step multiple and must lie
    within half a step of one.  The harvest term is not part of the
    parabolic suite, so the spec must carry c = 0.
    """
    if spec.c != 0:
        raise ConfigurationError("parabolic evolution requires c = 0")
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (op.n,):
        raise DimensionError(f"u0 must have length {op.n}")
    if np.any(u0 < 0):
        raise ConfigurationError("u0 must be nonnegative")
    dt_max = max_stable_dt(spec, float(u0.max()))
    if dt > dt_max:
        raise ConfigurationError(
            f"dt={dt} exceeds the positivity-preserving bound {dt_max:.6g}"
        )
    n_steps = int(np.ceil(horizon / dt - 1e-12))
    if snapshot_times is None:
        snapshot_times = [0.0, n_steps * dt]
    wanted = {}
    for s in snapshot_times:
        k = int(round(s / dt))
        if not (0 <= k <= n_steps) or abs(k * dt - s) > dt / 2 + 1e-12:
            raise ConfigurationError(f"snapshot time {s} is not on the step grid")
        wanted[k] = k * dt

    factor = cho_factor(np.eye(op.n) + dt * op.matrix)
    scale = max(1.0, float(u0.max()), spec.apriori_bound())
    w = u0.copy()
    times, snaps = [], []
    if 0 in wanted:
        times.append(0.0)
        snaps.append(w.copy())
    for k in range(1, n_steps + 1):
        w = cho_solve(factor, w + dt * spec.reaction(w))
        if w.min() < -1e-12 * scale:
            raise NumericError(
                f"positivity lost at step {k} (min {w.min():.3e}); internal invariant"
            )
        np.maximum(w, 0.0, out=w)
        if k in wanted:
            times.append(wanted[k])
            snaps.append(w.copy())
    return ParabolicRun(
        grid=op.grid,
        spec=spec,
        dt=dt,
        horizon=n_steps * dt,
        u0=u0,
        times=np.array(times),
        snapshots=np.array(snaps),
    )


@dataclass
class LongtimeResult:
    verdict: str
    s_reached: float
    final_distance: float
    times: np.ndarray = field(repr=False)
    sup_norms: np.ndarray = field(repr=False)
    steady_distances: np.ndarray | None = field(repr=False, default=None)
    steady: SteadyState | None = None


def longtime_classify(
    op: OperatorMatrix,
    spec: ReactionSpec,
    u0: np.ndarray,
    dt: float,
    s_max: float,
    tol: float,
    eigenpair: EigenPair | None = None,
) -> LongtimeResult:
    """Run until the state settles on the positive steady state or on zero.

    Above the principal eigenvalue the positive steady state attracts all
    positive data and the run stops once the sup-distance to it falls
    below ``tol``; at or below it the state decays to zero.  The recorded
    distance curves support decay-rate fits.  ``tol`` is the verdict
    tolerance; the internal steady solve is run ten times tighter to
    avoid chattering.
    """
    if spec.c != 0:
        raise ConfigurationError("longtime classification requires c = 0")
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (op.n,):
        raise DimensionError(f"u0 must have length {op.n}")
    if np.any(u0 < 0):
        raise ConfigurationError("u0 must be nonnegative")
    dt_max = max_stable_dt(spec, float(u0.max()))
    if dt > dt_max:
        raise ConfigurationError(
            f"dt={dt} exceeds the positivity-preserving bound {dt_max:.6g}"
        )
    pair = eigenpair if eigenpair is not None else principal_eigenpair(op)
    supercritical = spec.a > pair.lam * (1.0 + 1e-12)
    steady = None
    if supercritical:
        # the reference must sit well inside the verdict tolerance; the
        # relaxation's step tolerance understates its solution error, so
        # solve at least two orders tighter
        steady = solve_logistic(op, spec, tol=min(1e-9, tol / 100.0), eigenpair=pair)

    factor = cho_factor(np.eye(op.n) + dt * op.matrix)
    n_steps = int(np.ceil(s_max / dt - 1e-12))
    w = u0.copy()
    times = np.empty(n_steps + 1)
    norms = np.empty(n_steps + 1)
    dists = np.empty(n_steps + 1) if supercritical else None
    verdict = "undecided"
    last = 0
    for k in range(n_steps + 1):
        times[k] = k * dt
        norms[k] = np.abs(w).max()
        if supercritical:
            dists[k] = np.abs(w - steady.u).max()
        last = k
        if supercritical and dists[k] <= tol:
            verdict = "to_positive_steady"
            break
        if norms[k] <= tol:
            verdict = "to_zero"
            break
        if k < n_steps:
            w = cho_solve(factor, w + dt * spec.reaction(w))
            np.maximum(w, 0.0, out=w)
    sl = slice(0, last + 1)
    final = float(dists[last]) if verdict == "to_positive_steady" else float(norms[last])
    return LongtimeResult(
        verdict=verdict,
        s_reached=float(times[last]),
        final_distance=final,
        times=times[sl].copy(),
        sup_norms=norms[sl].copy(),
        steady_distances=dists[sl].copy() if supercritical else None,
        steady=steady,
    )

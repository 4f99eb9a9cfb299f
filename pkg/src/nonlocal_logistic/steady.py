"""Steady states of the logistic equation with harvesting.

Solves ``A u = a u - f(x, u) - c h(x, u)`` on the interior nodes (zero
exterior), where f is a crowding term from a catalog and h a harvesting
term.  Provides the monotone sub/supersolution iteration, the pure
logistic solve, the maximal harvested branch by downward iteration, the
small branch by Newton continuation in c, the critical-harvest scan, and
linearized stability indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .bernstein import v_profile
from .errors import (
    ConfigurationError,
    ConstructionError,
    ContinuationError,
    ConvergenceError,
    MonotonicityError,
    ScanError,
)
from .operator import OperatorMatrix, green_solve
from .spectral import EigenPair, principal_eigenpair

BRANCHES = ("logistic", "maximal", "small", "none")


def _field(v) -> np.ndarray | float:
    arr = np.asarray(v, dtype=float)
    return arr if arr.ndim else float(arr)


@dataclass(frozen=True)
class CrowdingTerm:
    """Crowding nonlinearity b(x) * s^p with p > 1 (``quadratic`` fixes p=2).

    Evaluation is extended evenly to s < 0 (b |s|^p), which keeps the term
    smooth where relaxation iterates may transiently dip below zero.
    """

    kind: str = "quadratic"
    b: float | np.ndarray = 1.0
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in ("quadratic", "power"):
            raise ConfigurationError(f"unknown crowding kind {self.kind!r}")
        if self.kind == "quadratic" and self.p != 2.0:
            object.__setattr__(self, "p", 2.0)
        if self.p <= 1.0:
            raise ConfigurationError("crowding exponent requires p > 1")
        b = np.asarray(self.b, dtype=float)
        if np.any(b <= 0):
            raise ConfigurationError("crowding coefficient b must be positive")
        object.__setattr__(self, "b", _field(self.b))

    def value(self, s):
        s = np.asarray(s, dtype=float)
        return self.b * np.abs(s) ** self.p

    def deriv(self, s):
        s = np.asarray(s, dtype=float)
        return self.p * self.b * np.abs(s) ** (self.p - 1.0) * np.sign(s)

    def b_min(self) -> float:
        return float(np.min(self.b))

    def b_max(self) -> float:
        return float(np.max(self.b))

    def lipschitz_on(self, s_max: float) -> float:
        return self.p * self.b_max() * s_max ** (self.p - 1.0)

    def supersolution_level(self, a: float) -> float:
        """Smallest constant M with f(x, M)/M >= a at every x."""
        return (a / self.b_min()) ** (1.0 / (self.p - 1.0))

    def slope_scale(self, slope: float) -> float:
        """Largest k with max_x b * k^(p-1) <= slope (unit sup-norm shape)."""
        return (slope / self.b_max()) ** (1.0 / (self.p - 1.0))


@dataclass(frozen=True)
class HarvestTerm:
    """Harvest catalog: constant yield h0(x), or h0(x) * (q + s) / (1 + s).

    The saturating factor has value q > 0 at s = 0 and tends to 1; for
    s < 0 it continues linearly with its slope at zero, matching the C^1
    extension used by the small-branch continuation.
    """

    kind: str = "constant_yield"
    h0: float | np.ndarray = 1.0
    q: float = 0.5

    def __post_init__(self):
        if self.kind not in ("constant_yield", "saturating"):
            raise ConfigurationError(f"unknown harvest kind {self.kind!r}")
        h0 = np.asarray(self.h0, dtype=float)
        if np.any(h0 <= 0):
            raise ConfigurationError("harvest field h0 must be positive")
        if self.kind == "saturating" and self.q <= 0:
            raise ConfigurationError("saturating harvest requires q > 0")
        object.__setattr__(self, "h0", _field(self.h0))

    def value(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "constant_yield":
            return self.h0 * np.ones_like(s)
        sat = np.where(s >= 0, (self.q + s) / (1.0 + s), self.q + (1.0 - self.q) * s)
        return self.h0 * sat

    def deriv(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "constant_yield":
            return np.zeros_like(s)
        slope = np.where(s >= 0, (1.0 - self.q) / (1.0 + s) ** 2, 1.0 - self.q)
        return self.h0 * slope

    def sup_bound(self) -> float:
        top = 1.0 if self.kind == "constant_yield" else max(1.0, self.q)
        return float(np.max(self.h0)) * top

    def deriv_bound(self) -> float:
        if self.kind == "constant_yield":
            return 0.0
        return float(np.max(self.h0)) * abs(1.0 - self.q)


@dataclass(frozen=True)
class ReactionSpec:
    """Growth rate a, harvest intensity c, and the two catalog terms."""

    a: float
    c: float = 0.0
    f: CrowdingTerm = field(default_factory=CrowdingTerm)
    h: HarvestTerm | None = None

    def __post_init__(self):
        if self.c < 0:
            raise ConfigurationError("harvest intensity c must be nonnegative")
        if self.c > 0 and self.h is None:
            raise ConfigurationError("c > 0 requires a harvest term")

    def reaction(self, u) -> np.ndarray:
        out = self.a * u - self.f.value(u)
        if self.c > 0:
            out = out - self.c * self.h.value(u)
        return out

    def reaction_deriv(self, u) -> np.ndarray:
        out = self.a - self.f.deriv(u)
        if self.c > 0:
            out = out - self.c * self.h.deriv(u)
        return np.broadcast_to(out, np.shape(u)).astype(float)

    def theta_for(self, s_max: float) -> float:
        """Lipschitz shift for the relaxation map, with a 1.1 safety factor."""
        slope = self.a + self.f.lipschitz_on(s_max)
        if self.c > 0:
            slope += self.c * self.h.deriv_bound()
        return 1.1 * slope

    def apriori_bound(self) -> float:
        return self.f.supersolution_level(self.a)

    def check_a3(self, s_grid=None) -> dict:
        """Sampled structural checks on the catalog terms.

        Verifies f(x,0) = 0 and f_s(x,0) = 0, strict increase of f(x,s)/s
        on the sample, superlinearity past the growth rate, and (when a
        harvest term is present) boundedness with positive value at zero.
        """
        s = np.asarray(s_grid if s_grid is not None else np.logspace(-3, 3, 25))
        slopes = self.f.value(s) / s
        report = {
            "f_zero": float(np.max(np.abs(self.f.value(0.0)))) == 0.0,
            "f_deriv_zero": float(np.max(np.abs(self.f.deriv(0.0)))) == 0.0,
            "slope_increasing": bool(np.all(np.diff(slopes, axis=-1) > 0)),
            "superlinear": bool(np.min(self.f.value(1e3) / 1e3) > self.a),
        }
        if self.h is not None:
            report["h_bounded"] = math.isfinite(self.h.sup_bound())
            report["h_positive_at_zero"] = bool(np.max(self.h.value(0.0)) > 0)
        report["ok"] = all(report.values())
        return report


@dataclass
class SteadyState:
    """A converged (or rejected) steady state.

    ``branch`` is one of ``logistic``, ``maximal``, ``small`` (strictly
    positive solutions) or ``none`` (no positive solution accepted; u is
    then the zero placeholder and the residual may be NaN).
    """

    u: np.ndarray
    residual: float
    branch: str
    iterations: int


def _none_state(n: int, iterations: int = 0, residual: float = float("nan")) -> SteadyState:
    return SteadyState(u=np.zeros(n), residual=residual, branch="none", iterations=iterations)


def _relax(
    op: OperatorMatrix,
    spec: ReactionSpec,
    u0: np.ndarray,
    theta: float,
    tol: float,
    maxiter: int,
    direction: int,
    lower: np.ndarray | None,
    upper: np.ndarray | None,
    stop_on_negative: bool,
):
    """Shared relaxation loop u <- (A + theta I)^{-1} (F(u) + theta u).

    Checks monotonicity in the requested direction and the bracket at
    every step.  Returns (u, residual, iterations, went_negative).
    """
    n = op.n
    factor = cho_factor(op.matrix + theta * np.eye(n))
    scale = max(1.0, float(np.abs(u0).max()))
    # starting points are themselves converged only to ~tol and the noise
    # compounds geometrically, so sub-100*tol drift in the wrong direction is
    # solver noise, not lost ordering (true theta failures are solution-sized)
    slack = max(1e-12 * scale, 100.0 * tol)
    u = np.asarray(u0, dtype=float).copy()
    for it in range(1, maxiter + 1):
        g = spec.reaction(u) + theta * u
        u_next = cho_solve(factor, g)
        drift = u_next - u
        if direction > 0 and drift.min() < -slack:
            raise MonotonicityError(
                f"increasing iteration lost monotonicity at step {it} "
                f"(worst drop {drift.min():.3e}); shift theta={theta:.3g} too small"
            )
        if direction < 0 and drift.max() > slack:
            raise MonotonicityError(
                f"decreasing iteration lost monotonicity at step {it} "
                f"(worst rise {drift.max():.3e}); shift theta={theta:.3g} too small"
            )
        if lower is not None and (u_next - lower).min() < -slack:
            raise MonotonicityError(f"iterate fell below the lower bracket at step {it}")
        if upper is not None and (u_next - upper).max() > slack:
            raise MonotonicityError(f"iterate exceeded the upper bracket at step {it}")
        if stop_on_negative and u_next.min() < -1e3 * slack:
            return u_next, float("nan"), it, True
        step = float(np.abs(drift).max())
        u = u_next
        if step <= tol:
            residual = float(np.abs(op.matrix @ u - spec.reaction(u)).max())
            return u, residual, it, False
    raise ConvergenceError(
        f"monotone iteration hit the cap {maxiter} (last step {step:.3e})"
    )


def monotone_iterate(
    op: OperatorMatrix,
    spec: ReactionSpec,
    u_lo: np.ndarray,
    u_hi: np.ndarray,
    theta: float | None = None,
    tol: float = 1e-10,
    start: str = "hi",
    maxiter: int = 200_000,
    branch_on_success: str = "logistic",
) -> SteadyState:
    """Monotone iteration between a verified sub/supersolution pair.

    From ``start="lo"`` the iterates increase toward the minimal fixed
    point in the bracket, from ``start="hi"`` they decrease toward the
    maximal one; either way they stay inside [u_lo, u_hi].
    ``branch_on_success`` labels the result when it is strictly positive.
    """
    u_lo = np.asarray(u_lo, dtype=float)
    u_hi = np.asarray(u_hi, dtype=float)
    if u_lo.shape != (op.n,) or u_hi.shape != (op.n,):
        raise ConfigurationError("bracket vectors must match the grid size")
    if (u_hi - u_lo).min() < 0:
        raise ConfigurationError("monotone_iterate requires u_lo <= u_hi")
    res_lo = op.matrix @ u_lo - spec.reaction(u_lo)
    res_hi = op.matrix @ u_hi - spec.reaction(u_hi)
    slack = 1e-8 * max(1.0, float(np.abs(res_lo).max()), float(np.abs(res_hi).max()))
    if res_lo.max() > slack:
        raise ConfigurationError(
            f"u_lo is not a discrete subsolution (worst excess {res_lo.max():.3e})"
        )
    if res_hi.min() < -slack:
        raise ConfigurationError(
            f"u_hi is not a discrete supersolution (worst deficit {res_hi.min():.3e})"
        )
    if start not in ("lo", "hi"):
        raise ConfigurationError("start must be 'lo' or 'hi'")
    if theta is None:
        theta = spec.theta_for(float(np.abs(u_hi).max()))
    u0 = u_lo if start == "lo" else u_hi
    direction = 1 if start == "lo" else -1
    u, residual, it, _ = _relax(
        op, spec, u0, theta, tol, maxiter, direction, u_lo, u_hi, stop_on_negative=False
    )
    branch = branch_on_success if u.min() > 0 else "none"
    return SteadyState(u=u, residual=residual, branch=branch, iterations=it)


def solve_logistic(
    op: OperatorMatrix,
    spec: ReactionSpec,
    tol: float = 1e-10,
    eigenpair: EigenPair | None = None,
    maxiter: int = 200_000,
) -> SteadyState:
    """Unique positive steady state of the harvest-free logistic equation.

    Below the principal eigenvalue there is no positive solution and the
    zero state is returned with branch ``none``.  Above it, a small
    multiple of the principal eigenfunction is a subsolution and a large
    constant a supersolution; the monotone iteration from below converges
    to the solution.
    """
    if spec.c != 0:
        raise ConfigurationError("solve_logistic requires c = 0")
    pair = eigenpair if eigenpair is not None else principal_eigenpair(op)
    if spec.a <= pair.lam * (1.0 + 1e-12):
        return _none_state(op.n, iterations=0, residual=0.0)
    margin = spec.a - pair.lam
    k = spec.f.slope_scale(margin / 2.0)
    u_lo = None
    for _ in range(60):
        cand = k * pair.phi
        lhs = op.matrix @ cand - spec.reaction(cand)
        if lhs.max() < 0:
            u_lo = cand
            break
        k *= 0.5
    if u_lo is None:
        raise ConstructionError(
            f"could not build a strict subsolution below margin {margin:.3e}"
        )
    level = spec.apriori_bound()
    u_hi = level * np.ones(op.n)
    return monotone_iterate(
        op, spec, u_lo, u_hi, tol=tol, start="lo", maxiter=maxiter,
        branch_on_success="logistic",
    )


def maximal_harvest(
    op: OperatorMatrix,
    spec: ReactionSpec,
    tol: float = 1e-10,
    v_a: SteadyState | None = None,
    eigenpair: EigenPair | None = None,
    maxiter: int = 200_000,
) -> SteadyState:
    """Maximal harvested solution by downward iteration from the logistic state.

    The harvest-free solution dominates every harvested solution, and the
    relaxation map preserves that ordering, so the decreasing sequence
    started there converges to the maximal fixed point.  Any iterate with
    a negative node certifies nonexistence (the limit would dominate
    every solution), so the descent exits early with branch ``none``.
    """
    pair = eigenpair if eigenpair is not None else principal_eigenpair(op)
    if v_a is None:
        v_a = solve_logistic(op, replace(spec, c=0.0, h=None), tol=tol,
                             eigenpair=pair, maxiter=maxiter)
    if v_a.branch == "none":
        return _none_state(op.n)
    theta = spec.theta_for(float(v_a.u.max()))
    u, residual, it, went_negative = _relax(
        op, spec, v_a.u, theta, tol, maxiter, direction=-1,
        lower=None, upper=v_a.u, stop_on_negative=True,
    )
    if went_negative or u.min() <= 0:
        return _none_state(op.n, iterations=it)
    return SteadyState(u=u, residual=residual, branch="maximal", iterations=it)


def _newton(
    op: OperatorMatrix,
    spec: ReactionSpec,
    u0: np.ndarray,
    tol: float,
    maxiter: int,
    damped: bool,
):
    """Newton iteration on the residual A u - F(u); returns (u, res, ok)."""
    u = np.asarray(u0, dtype=float).copy()
    r = op.matrix @ u - spec.reaction(u)
    rn = float(np.abs(r).max())
    for _ in range(maxiter):
        if rn <= tol:
            return u, rn, True
        jac = op.matrix - np.diag(spec.reaction_deriv(u))
        try:
            d = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError:
            return u, rn, False
        if not np.all(np.isfinite(d)):
            return u, rn, False
        t = 1.0
        for _ in range(50):
            u_try = u - t * d
            r_try = op.matrix @ u_try - spec.reaction(u_try)
            rn_try = float(np.abs(r_try).max())
            if rn_try < rn or not damped:
                break
            t *= 0.5
        else:
            return u, rn, False
        u, r, rn = u_try, r_try, rn_try
    return u, rn, rn <= tol


def small_branch(
    op: OperatorMatrix,
    spec: ReactionSpec,
    tol: float = 1e-10,
    n_steps: int = 20,
    newton_cap: int = 40,
) -> SteadyState:
    """Small-amplitude branch by Newton continuation in c from (0, 0).

    Steps the harvest intensity from 0 to spec.c in ``n_steps`` increments,
    re-solving with the previous solution as predictor; a failed or
    singular Newton solve halves the increment.  The result is labeled
    ``small`` only when strictly positive.  The continuation naturally
    stops at the branch fold: past it the Jacobian degenerates and the
    step collapses, raising :class:`ContinuationError`.
    """
    if spec.c == 0:
        return _none_state(op.n, residual=0.0)
    u = np.zeros(op.n)
    cur = 0.0
    step = spec.c / n_steps
    total_newton = 0
    while cur < spec.c - 1e-15 * spec.c:
        c_try = min(cur + step, spec.c)
        u_new, rn, ok = _newton(
            op, replace(spec, c=c_try), u, tol, newton_cap, damped=False
        )
        if ok:
            cur, u = c_try, u_new
            total_newton += 1
            continue
        step *= 0.5
        if step < spec.c / (n_steps * 4096):
            raise ContinuationError(
                f"continuation stalled at c={cur:.6g} (target {spec.c:.6g}); "
                f"the branch folds before the requested intensity"
            )
    residual = float(np.abs(op.matrix @ u - spec.reaction(u)).max())
    branch = "small" if u.min() > 0 else "none"
    return SteadyState(u=u, residual=residual, branch=branch, iterations=total_newton)


@dataclass
class HarvestSubsolution:
    """Constructive subsolution data for the harvested problem at small c.

    ``phi = m (phi1 - eps * torsion)`` dominates ``m * beta * phi1`` and is
    a subsolution for every intensity up to ``c_threshold``.  The choices
    beta = (1 + lam1/a)/2 and the largest margin-respecting m are recorded
    so downstream checks can assert the lower envelope.
    """

    phi: np.ndarray
    m: float
    beta: float
    eps: float
    c_threshold: float


def harvest_subsolution(
    op: OperatorMatrix,
    spec: ReactionSpec,
    eigenpair: EigenPair | None = None,
    safety: float = 0.999,
) -> HarvestSubsolution:
    """Build the small-c subsolution from the eigenfunction and the torsion field.

    With eta1 the max gauge ratio of the torsion function and eta2 the min
    gauge ratio of phi1, eps = (1 - beta) eta2 / eta1 keeps
    phi1 - eps * torsion above beta * phi1; the amplitude m is then maximized
    subject to the crowding slope staying below a - lam1 / beta, and shrunk
    further (halving) if the discrete subsolution inequality still fails at
    the threshold intensity.
    """
    if spec.h is None:
        raise ConfigurationError("harvest_subsolution needs a harvest term")
    pair = eigenpair if eigenpair is not None else principal_eigenpair(op)
    if spec.a <= pair.lam:
        raise ConfigurationError("harvest_subsolution requires a above the principal eigenvalue")
    torsion = green_solve(op, np.ones(op.n))
    gauge = v_profile(op.symbol, op.grid.delta)
    eta1 = float(np.max(torsion / gauge))
    eta2 = float(np.min(pair.phi / gauge))
    beta = 0.5 * (1.0 + pair.lam / spec.a)
    eps = (1.0 - beta) * eta2 / eta1
    base = pair.phi - eps * torsion
    margin = spec.a - pair.lam / beta
    m = safety * spec.f.slope_scale(margin) / float(base.max())
    for _ in range(60):
        phi = m * base
        c_threshold = m * eps / spec.h.sup_bound()
        slack = (
            spec.a * phi - spec.f.value(phi) - c_threshold * spec.h.value(phi)
            - op.matrix @ phi
        )
        if slack.min() > 0:
            return HarvestSubsolution(
                phi=phi, m=m, beta=beta, eps=eps, c_threshold=c_threshold
            )
        m *= 0.5
    raise ConstructionError("harvest subsolution construction failed to close its margin")


@dataclass
class ScanSample:
    c: float
    exists: bool
    state: SteadyState


@dataclass
class HarvestScan:
    c_star: float
    bracket: tuple[float, float]
    samples: list[ScanSample]


def scan_cstar(
    op: OperatorMatrix,
    spec: ReactionSpec,
    c_max: float,
    bisect_rel_tol: float = 1e-3,
    sample_ladder: int = 0,
    tol: float = 1e-10,
    eigenpair: EigenPair | None = None,
) -> HarvestScan:
    """Bracket the critical harvest intensity by bisection on existence.

    The existence predicate is acceptance of the maximal branch (strictly
    positive fixed point).  ``c_max`` must lie in the nonexistence regime.
    ``sample_ladder`` additionally records maximal-branch samples at
    geometrically decreasing intensities below the bracket, giving the
    low-harvest tail of the bifurcation diagram.  The returned bracket
    has width at most ``bisect_rel_tol`` relative to its lower end.
    """
    if c_max <= 0:
        raise ConfigurationError("scan needs c_max > 0")
    pair = eigenpair if eigenpair is not None else principal_eigenpair(op)
    v_a = solve_logistic(op, replace(spec, c=0.0, h=None), tol=tol, eigenpair=pair)
    if v_a.branch == "none":
        raise ConfigurationError("scan requires a above the principal eigenvalue")
    samples: list[ScanSample] = []

    def probe(c: float) -> bool:
        state = maximal_harvest(op, replace(spec, c=c), tol=tol, v_a=v_a, eigenpair=pair)
        samples.append(ScanSample(c=c, exists=state.branch == "maximal", state=state))
        return state.branch == "maximal"

    if probe(c_max):
        raise ScanError(f"existence persists at c_max={c_max}; enlarge the scan range")
    hi = c_max
    lo = None
    c = c_max
    for _ in range(60):
        c /= 2.0
        if probe(c):
            lo = c
            break
        hi = c
    if lo is None:
        raise ScanError("no existence found down to c_max / 2^60")
    while hi - lo > bisect_rel_tol * lo:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            lo = mid
        else:
            hi = mid
    for j in range(1, sample_ladder + 1):
        probe(lo / 2.0 ** j)
    ordered = sorted(samples, key=lambda s: s.c)
    flags = [s.exists for s in ordered]
    for i in range(len(flags) - 1):
        if flags[i + 1] and not flags[i]:
            raise ScanError(
                f"non-monotone existence between c={ordered[i].c:.6g} and "
                f"c={ordered[i + 1].c:.6g}"
            )
    return HarvestScan(c_star=0.5 * (lo + hi), bracket=(lo, hi), samples=ordered)


@dataclass
class StabilityIndex:
    lambda_star: float
    stable: bool


def stability_index(
    op: OperatorMatrix,
    spec: ReactionSpec,
    state: SteadyState,
    tol: float | None = None,
) -> StabilityIndex:
    """Principal eigenvalue of the linearization at a steady state.

    The linearized operator carries the potential a - f_s(x, u) - c h_s(x, u);
    the state is linearly stable iff the smallest eigenvalue of
    A - diag(potential) is positive.
    """
    potential = spec.reaction_deriv(state.u)
    pair = principal_eigenpair(op, c=potential, tol=tol)
    return StabilityIndex(lambda_star=pair.lam, stable=pair.lam > 0.0)


def check_harvest_dominance(state: SteadyState, spec: ReactionSpec, lam1: float) -> bool:
    """Certificate that the eigenvalue-weighted state dominates the harvest.

    True iff ``lam1 * u >= c * h(x, u)`` at every node; under a bounded
    harvest-to-gauge ratio this certifies uniqueness of the solution at
    small intensities.
    """
    if spec.c == 0 or spec.h is None:
        return bool(np.all(state.u >= 0))
    return bool(np.all(lam1 * state.u - spec.c * spec.h.value(state.u) >= 0))


def newton_polish(
    op: OperatorMatrix,
    spec: ReactionSpec,
    state: SteadyState,
    tol: float = 1e-13,
    maxiter: int = 50,
) -> SteadyState:
    """Tighten a converged state with a few damped Newton steps.

    Relaxation stops on step size, which can leave a solution error of
    residual / gap when the linearization is nearly singular; polishing
    brings the residual down to ``tol`` without changing the branch.
    """
    u, rn, ok = _newton(op, spec, state.u, tol, maxiter, damped=True)
    if not ok:
        raise ConvergenceError(f"polish stalled at residual {rn:.3e}")
    branch = state.branch if u.min() > 0 else "none"
    return SteadyState(u=u, residual=rn, branch=branch, iterations=state.iterations)


def newton_multistart(
    op: OperatorMatrix,
    spec: ReactionSpec,
    n_starts: int = 50,
    seed: int = 0,
    tol: float = 1e-10,
    amp_decades: float = 3.0,
    scale: float | None = None,
    maxiter: int = 300,
) -> list[np.ndarray]:
    """Damped-Newton sweep from random admissible fields.

    Start amplitudes are log-uniform over ``amp_decades`` decades below
    1.2x the reference scale (the harvest-free solution by default), with
    componentwise jitter; this probes both large and small basins.
    Returns every converged fixed point (unidentified and of any sign);
    deterministic for a fixed seed.
    """
    if scale is None:
        ref = solve_logistic(op, replace(spec, c=0.0, h=None), tol=tol)
        if ref.branch == "none":
            raise ConfigurationError("multistart needs a reference scale when a <= lam1")
        scale = float(ref.u.max())
    rng = np.random.default_rng(seed)
    found: list[np.ndarray] = []
    for _ in range(n_starts):
        amp = 10.0 ** rng.uniform(-amp_decades, math.log10(1.2)) * scale
        u0 = amp * rng.uniform(0.5, 1.5, op.n)
        u, rn, ok = _newton(op, spec, u0, tol, maxiter, damped=True)
        if ok:
            found.append(u)
    return found

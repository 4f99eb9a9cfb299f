import numpy as np
import pytest
from dataclasses import replace

from nonlocal_logistic import (
    ConfigurationError,
    ContinuationError,
    CrowdingTerm,
    HarvestTerm,
    ReactionSpec,
    check_harvest_dominance,
    harvest_subsolution,
    maximal_harvest,
    monotone_iterate,
    newton_multistart,
    scan_cstar,
    small_branch,
    solve_logistic,
    stability_index,
)


class TestCatalog:
    def test_crowding_derivative_matches_fd(self):
        for term in (CrowdingTerm("quadratic", b=1.3), CrowdingTerm("power", b=0.8, p=2.5)):
            s = np.linspace(0.05, 3.0, 20)
            fd = (term.value(s + 1e-7) - term.value(s - 1e-7)) / 2e-7
            assert np.allclose(term.deriv(s), fd, rtol=1e-5)

    def test_harvest_derivative_matches_fd(self):
        term = HarvestTerm("saturating", h0=2.0, q=0.4)
        s = np.linspace(0.05, 3.0, 20)
        fd = (term.value(s + 1e-7) - term.value(s - 1e-7)) / 2e-7
        assert np.allclose(term.deriv(s), fd, rtol=1e-5)

    def test_harvest_extension_is_c1_at_zero(self):
        term = HarvestTerm("saturating", h0=1.0, q=0.5)
        eps = 1e-9
        assert term.value(-eps) == pytest.approx(term.value(eps), abs=1e-8)
        assert term.deriv(-eps) == pytest.approx(term.deriv(eps), abs=1e-6)

    def test_a3_report(self):
        spec = ReactionSpec(a=2.0, c=0.5, f=CrowdingTerm(), h=HarvestTerm())
        report = spec.check_a3()
        assert report["ok"]

    def test_invalid_catalog_entries(self):
        with pytest.raises(ConfigurationError):
            CrowdingTerm("power", p=1.0)
        with pytest.raises(ConfigurationError):
            CrowdingTerm(b=-1.0)
        with pytest.raises(ConfigurationError):
            HarvestTerm(h0=0.0)
        with pytest.raises(ConfigurationError):
            ReactionSpec(a=1.0, c=0.5, f=CrowdingTerm(), h=None)


class TestMonotoneIterate:
    def test_trivial_zero_bracket(self, op199):
        spec = ReactionSpec(a=0.0)
        z = np.zeros(op199.n)
        state = monotone_iterate(op199, spec, z, z, tol=1e-12)
        assert state.iterations == 1
        assert np.all(state.u == 0)

    def test_descent_from_constant_supersolution(self, op199, eig199):
        a = 2.0 * eig199.lam
        spec = ReactionSpec(a=a)
        state = monotone_iterate(
            op199, spec,
            u_lo=1e-3 * eig199.phi,
            u_hi=a * np.ones(op199.n),
            tol=1e-11, start="hi",
        )
        assert state.branch == "logistic"
        assert state.residual <= 1e-9

    def test_same_limit_from_both_ends(self, op199, eig199):
        a = 2.0 * eig199.lam
        spec = ReactionSpec(a=a)
        lo = 1e-3 * eig199.phi
        hi = a * np.ones(op199.n)
        up = monotone_iterate(op199, spec, lo, hi, tol=1e-12, start="lo")
        down = monotone_iterate(op199, spec, lo, hi, tol=1e-12, start="hi")
        assert np.abs(up.u - down.u).max() < 1e-9

    def test_bracket_ordering_required(self, op199):
        spec = ReactionSpec(a=1.0)
        with pytest.raises(ConfigurationError):
            monotone_iterate(op199, spec, np.ones(op199.n), np.zeros(op199.n))

    def test_small_theta_detected(self, op199, eig199):
        from nonlocal_logistic import MonotonicityError

        a = 2.0 * eig199.lam
        spec = ReactionSpec(a=a)
        with pytest.raises(MonotonicityError):
            monotone_iterate(op199, spec, 1e-3 * eig199.phi,
                             a * np.ones(op199.n), theta=0.0, start="hi")

    def test_subsolution_verified(self, op199, eig199):
        # a large multiple of phi1 is not a subsolution for the logistic map
        spec = ReactionSpec(a=2.0 * eig199.lam)
        bad_lo = 10.0 * eig199.phi
        with pytest.raises(ConfigurationError, match="subsolution"):
            monotone_iterate(op199, spec, bad_lo, 20.0 * np.ones(op199.n))


class TestSolveLogistic:
    def test_subcritical_none(self, op199, eig199, steady_cache):
        state = steady_cache(0.5)
        assert state.branch == "none"
        assert np.all(state.u == 0)
        assert state.iterations == 0

    def test_critical_none(self, op199, eig199):
        spec = ReactionSpec(a=eig199.lam)
        assert solve_logistic(op199, spec, eigenpair=eig199).branch == "none"

    def test_supercritical_positive_and_bounded(self, steady_cache, eig199):
        state = steady_cache(2.0)
        a = 2.0 * eig199.lam
        assert state.branch == "logistic"
        assert state.residual <= 1e-9
        assert np.all(state.u > 0)
        assert state.u.max() <= a  # supersolution level for quadratic crowding

    def test_monotone_in_growth_rate(self, steady_cache):
        lo = steady_cache(1.5)
        hi = steady_cache(2.0)
        assert np.all(lo.u <= hi.u + 1e-12)

    def test_requires_zero_harvest(self, op199):
        spec = ReactionSpec(a=3.0, c=0.1, f=CrowdingTerm(), h=HarvestTerm())
        with pytest.raises(ConfigurationError):
            solve_logistic(op199, spec)


class TestMaximalHarvest:
    def test_zero_intensity_returns_logistic_state(self, op199, eig199, steady_cache):
        va = steady_cache(2.0)
        spec = ReactionSpec(a=2.0 * eig199.lam, c=0.0, f=CrowdingTerm(), h=HarvestTerm())
        state = maximal_harvest(op199, spec, v_a=va, eigenpair=eig199)
        assert state.branch == "maximal"
        assert np.abs(state.u - va.u).max() < 1e-8

    def test_small_intensity_sandwich(self, op199, eig199, steady_cache):
        va = steady_cache(2.0)
        spec = ReactionSpec(a=2.0 * eig199.lam, c=0.01, f=CrowdingTerm(), h=HarvestTerm())
        state = maximal_harvest(op199, spec, v_a=va, eigenpair=eig199)
        assert state.branch == "maximal"
        assert np.all(state.u > 0)
        assert np.all(state.u <= va.u + 1e-12)

    def test_subsolution_envelope(self, op199, eig199, steady_cache):
        a = 2.0 * eig199.lam
        va = steady_cache(2.0)
        spec = ReactionSpec(a=a, c=0.0, f=CrowdingTerm(), h=HarvestTerm())
        sub = harvest_subsolution(op199, spec, eigenpair=eig199)
        assert 0 < sub.c_threshold
        assert eig199.lam / a < sub.beta < 1.0
        for c in (0.5 * sub.c_threshold, sub.c_threshold):
            state = maximal_harvest(op199, replace(spec, c=c), v_a=va, eigenpair=eig199)
            assert state.branch == "maximal"
            assert np.all(state.u >= sub.m * sub.beta * eig199.phi - 1e-10)

    def test_large_intensity_none(self, op199, eig199, steady_cache):
        va = steady_cache(2.0)
        spec = ReactionSpec(a=2.0 * eig199.lam, c=5.0, f=CrowdingTerm(), h=HarvestTerm())
        state = maximal_harvest(op199, spec, v_a=va, eigenpair=eig199)
        assert state.branch == "none"

    def test_branch_approaches_logistic_state(self, op199, eig199, steady_cache):
        va = steady_cache(2.0)
        spec0 = ReactionSpec(a=2.0 * eig199.lam, c=0.0, f=CrowdingTerm(), h=HarvestTerm())
        sub = harvest_subsolution(op199, spec0, eigenpair=eig199)
        gaps = []
        for frac in (0.1, 0.05, 0.01):
            state = maximal_harvest(
                op199, replace(spec0, c=frac * sub.c_threshold), v_a=va, eigenpair=eig199
            )
            assert state.branch == "maximal"
            gaps.append(np.abs(state.u - va.u).max())
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.2 * gaps[0]


class TestComparison:
    def test_ordered_harvest_intensities(self, op199, eig199, steady_cache):
        va = steady_cache(2.0)
        spec = ReactionSpec(a=2.0 * eig199.lam, c=0.0, f=CrowdingTerm(), h=HarvestTerm())
        u_light = maximal_harvest(op199, replace(spec, c=0.005), v_a=va, eigenpair=eig199)
        u_heavy = maximal_harvest(op199, replace(spec, c=0.02), v_a=va, eigenpair=eig199)
        assert u_light.branch == u_heavy.branch == "maximal"
        assert np.all(u_heavy.u <= u_light.u + 1e-12)

    def test_apriori_bound(self, op199, eig199, steady_cache):
        spec = ReactionSpec(a=2.0 * eig199.lam)
        assert steady_cache(2.0).u.max() <= spec.apriori_bound() + 1e-12


@pytest.fixture(scope="module")
def window_spec(eig199):
    return ReactionSpec(a=1.05 * eig199.lam, c=0.0, f=CrowdingTerm(), h=HarvestTerm())


@pytest.fixture(scope="module")
def scan(op199, eig199):
    spec = ReactionSpec(a=1.05 * eig199.lam, c=1.0, f=CrowdingTerm(), h=HarvestTerm())
    return scan_cstar(op199, spec, c_max=0.2, bisect_rel_tol=1e-3,
                      sample_ladder=3, eigenpair=eig199)


class TestSmallBranch:

    def test_zero_intensity_zero_solution(self, op199, window_spec):
        state = small_branch(op199, window_spec)
        assert np.all(state.u == 0)

    def test_small_branch_below_maximal(self, op199, eig199, window_spec):
        c = 1e-4
        u2 = small_branch(op199, replace(window_spec, c=c), tol=1e-11)
        assert u2.branch == "small"
        u1 = maximal_harvest(op199, replace(window_spec, c=c), eigenpair=eig199, tol=1e-11)
        assert u1.branch == "maximal"
        assert np.all(u2.u <= u1.u + 1e-12)
        assert u2.u.max() < 0.5 * u1.u.max()

    def test_norm_vanishes_with_intensity(self, op199, window_spec):
        norms = [
            small_branch(op199, replace(window_spec, c=c), tol=1e-11).u.max()
            for c in (2e-4, 1e-4, 5e-5)
        ]
        assert norms[0] > norms[1] > norms[2]
        assert norms[2] < 0.4 * norms[0]

    def test_fold_raises_continuation_error(self, op199, window_spec):
        with pytest.raises(ContinuationError):
            small_branch(op199, replace(window_spec, c=0.1))


class TestScan:
    def test_bracket_contract(self, scan):
        lo, hi = scan.bracket
        assert hi - lo <= 1e-3 * lo
        assert lo < scan.c_star < hi

    def test_existence_flags_monotone(self, scan):
        flags = [s.exists for s in scan.samples]
        assert all(not flags[i + 1] or flags[i] for i in range(len(flags) - 1))

    def test_double_critical_fails(self, op199, eig199, scan):
        spec = ReactionSpec(a=1.05 * eig199.lam, c=2.0 * scan.c_star,
                            f=CrowdingTerm(), h=HarvestTerm())
        state = maximal_harvest(op199, spec, eigenpair=eig199)
        assert state.branch == "none"

    def test_ladder_provides_small_samples(self, scan):
        existing = [s.c for s in scan.samples if s.exists]
        assert min(existing) <= scan.bracket[0] / 8.0


class TestStability:
    def test_logistic_state_stable(self, op199, eig199, steady_cache):
        spec = ReactionSpec(a=2.0 * eig199.lam)
        idx = stability_index(op199, spec, steady_cache(2.0))
        assert idx.stable and idx.lambda_star > 0

    def test_constant_slope_shift_exact(self, op199, eig199, steady_cache):
        # crowding with constant slope gamma makes lambda* = lam1 - a + gamma
        state = steady_cache(2.0)
        a = 2.0 * eig199.lam
        gamma = 0.3

        class _ConstSlopeSpec:
            def reaction_deriv(self, u):
                return (a - gamma) * np.ones_like(np.asarray(u, dtype=float))

        idx = stability_index(op199, _ConstSlopeSpec(), state)
        assert idx.lambda_star == pytest.approx(eig199.lam - a + gamma, abs=1e-8)

    def test_zero_solution_unstable_above_lam1(self, op199, eig199):
        from nonlocal_logistic import SteadyState

        a = 2.0 * eig199.lam
        zero = SteadyState(u=np.zeros(op199.n), residual=0.0, branch="none", iterations=0)
        idx = stability_index(op199, ReactionSpec(a=a), zero)
        assert idx.lambda_star == pytest.approx(eig199.lam - a, abs=1e-8)
        assert not idx.stable


class TestDominanceCertificate:
    def test_zero_intensity_trivially_true(self, steady_cache, eig199):
        spec = ReactionSpec(a=2.0 * eig199.lam)
        assert check_harvest_dominance(steady_cache(2.0), spec, eig199.lam)

    def test_direct_violation(self, op199, eig199):
        from nonlocal_logistic import SteadyState

        spec = ReactionSpec(a=2.0 * eig199.lam, c=1.0, f=CrowdingTerm(), h=HarvestTerm())
        small = SteadyState(u=1e-6 * np.ones(op199.n), residual=0.0, branch="maximal", iterations=1)
        assert not check_harvest_dominance(small, spec, eig199.lam)

    def test_maximal_branch_tiny_intensity(self, op199, eig199, steady_cache):
        va = steady_cache(3.0)
        spec = ReactionSpec(a=3.0 * eig199.lam, c=1e-3, f=CrowdingTerm(), h=HarvestTerm())
        state = maximal_harvest(op199, spec, v_a=va, eigenpair=eig199)
        assert state.branch == "maximal"
        assert check_harvest_dominance(state, spec, eig199.lam)


class TestMultistart:
    def test_finds_both_branches_only(self, op99):
        from nonlocal_logistic import principal_eigenpair

        pair = principal_eigenpair(op99, tol=1e-12)
        spec = ReactionSpec(a=1.05 * pair.lam, c=5e-5, f=CrowdingTerm(), h=HarvestTerm())
        u1 = maximal_harvest(op99, spec, eigenpair=pair, tol=1e-11)
        u2 = small_branch(op99, spec, tol=1e-11)
        assert u1.branch == "maximal" and u2.branch == "small"
        found = newton_multistart(op99, spec, n_starts=16, seed=4, tol=1e-11)
        assert found
        positive = [u for u in found if np.all(u > 0)]
        assert positive
        for u in positive:
            near_u1 = np.abs(u - u1.u).max() <= 1e-8
            near_u2 = np.abs(u - u2.u).max() <= 1e-8
            assert near_u1 or near_u2

import json
import math

import numpy as np
import pytest

from logconvex.convexity import (
    COR_3_4_VARIANTS,
    ConvexityReport,
    ConvexitySchedule,
    check_cor_3_1,
    check_cor_3_2_3_3,
    check_cor_3_4,
    check_cor_3_5,
    check_eq_2_20,
    check_eq_2_21,
    check_eq_2_22,
    check_eq_2_23,
    check_logconvex_G,
    check_variance_convexity,
    lobatto_times,
    nu_schedule,
    second_differences,
    vacuous_2_22,
    vacuous_2_23,
)
from logconvex.errors import EndpointInfiniteError
from logconvex.gaussian_calculus import boost, gaussian, propagate, weighted_l2_log_norm
from logconvex.weighting import WeightSpec

U0 = gaussian(1.0)
V0 = gaussian(2.0)


@pytest.fixture(scope="module")
def s521():
    return ConvexitySchedule.make(5.0, 2.0, 1.0)


# schedule ------------------------------------------------------------------------


def test_schedule_endpoints_and_monotonicity():
    s = ConvexitySchedule.make(5.0, 2.0, 1.0)
    t = s.times
    assert t[0] == 0.0 and t[-1] == 1.0 and len(t) == 33
    th, mu = s.theta_at(t), s.mu_at(t)
    assert th[0] == 1.0 and th[-1] == 0.0 and mu[0] == 1.0
    assert np.all(np.diff(th) < 0) and np.all(np.diff(mu) < 0)
    assert np.all((0 <= th) & (th <= 1)) and np.all((0 <= mu) & (mu <= 1))


def test_lobatto_times_cluster_at_ends():
    t = lobatto_times(1.0, 33)
    gaps = np.diff(t)
    assert gaps[0] < gaps[16] and np.all(gaps > 0)


def test_schedule_rejects_zero_horizon():
    with pytest.raises(ValueError):
        ConvexitySchedule.make(1.0, 1.0, 0.0)


def test_alpha_zero_is_fixed_weight():
    s = ConvexitySchedule.make(0.0, 2.0, 1.0)
    r = check_eq_2_20(U0, 1.0, s)
    assert r.passed


# report ----------------------------------------------------------------------------


def test_report_serialisation(tmp_path, s521):
    r = check_eq_2_20(U0, 1.0, s521)
    lines = r.csv_text().splitlines()
    assert lines[0] == "t,lhs_log,rhs_log,margin" and len(lines) == 34
    summary = json.loads(r.to_json())
    assert list(summary)[:5] == ["check", "params", "pass", "min_margin", "vacuous"]
    assert summary["pass"] is True and summary["vacuous"] is False


def test_report_pass_rule():
    r = ConvexityReport("x", {}, [0, 1], [0.0, 0.0], [0.0, -2e-9], 1e-9)
    assert r.status == "fail"
    r = ConvexityReport("x", {}, [0, 1], [0.0, 0.0], [0.0, -5e-10], 1e-9)
    assert r.status == "pass"


# Theorem-level checks ---------------------------------------------------------------


@pytest.mark.parametrize("check", ["eq_2_20", "eq_2_21", "eq_2_22", "eq_2_23"])
@pytest.mark.parametrize("params", [(5.0, 2.0, 1.0), (16.0, 4.0, 2.0)])
def test_theorem_checks_exact_and_grid(check, params):
    s = ConvexitySchedule.make(*params)
    run = {
        "eq_2_20": lambda src: check_eq_2_20(U0, 1.0, s, src),
        "eq_2_21": lambda src: check_eq_2_21(U0, 1.0, s, src),
        "eq_2_22": lambda src: check_eq_2_22(U0, s, src),
        "eq_2_23": lambda src: check_eq_2_23(U0, s, src),
    }[check]
    exact, grid = run("exact"), run("grid")
    assert exact.passed and grid.passed
    assert abs(exact.margin[0]) <= 1e-12
    if check in ("eq_2_20", "eq_2_22"):
        assert abs(exact.margin[-1]) <= 1e-12
    assert np.max(np.abs(exact.margin - grid.margin)) <= 1e-6


def test_eq_2_21_small_alpha_example():
    assert check_eq_2_21(U0, 1.0, ConvexitySchedule.make(2.0, 1.0, 1.0)).passed


def test_eq_2_21_exponents_sum_to_one(s521):
    t = s521.times
    mu = s521.mu_at(t)
    assert np.allclose(mu, 2.0 / (5 * t + 2)) and np.allclose(1 - mu, 5 * t / (5 * t + 2))


def test_eq_2_22_finiteness_polynomial():
    t = np.linspace(0, 1, 101)
    assert np.all((5 * t + 2) ** 2 > 1 + 16 * t**2)


def test_vacuous_flags(s521):
    assert not vacuous_2_22(s521) and not vacuous_2_23(s521)
    s = ConvexitySchedule.make(1.0, 1.0, 1.0)
    assert vacuous_2_22(s) and vacuous_2_23(s)
    assert check_eq_2_22(U0, s).status == "vacuous"
    assert check_eq_2_23(U0, s).status == "vacuous"


def test_non_vacuous_infinite_endpoint_raises():
    with pytest.raises(EndpointInfiniteError):
        check_eq_2_22(U0, ConvexitySchedule.make(1.0, 0.9, 0.1))


def test_weight_scale_ladder():
    # a weaker weight lowers every norm; margins stay non-negative and shrink to
    # zero as the weight tends to 1 (the flow is unitary)
    reps = [check_eq_2_22(U0, ConvexitySchedule.make(16.0, b, 1.0)) for b in (3.0, 4.0, 6.0, 100.0)]
    for lo, hi in zip(reps, reps[1:]):
        assert np.all(hi.lhs_log < lo.lhs_log)
    assert all(r.passed for r in reps)
    peaks = [float(np.max(r.margin)) for r in reps]
    assert all(a > b for a, b in zip(peaks, peaks[1:])) and peaks[-1] < 0.01 * peaks[0]


@pytest.mark.parametrize("lam, weight", [(0.0, "linear"), (1.0, "linear"), (None, "gaussian")])
def test_logconvex_G(s521, lam, weight):
    r = check_logconvex_G(U0, s521, lam=lam, weight=weight)
    assert r.passed


def test_logconvex_G_constant_case(s521):
    r = check_logconvex_G(U0, s521, lam=0.0)
    assert np.max(np.abs(r.rhs_log)) <= r.tolerance


def test_second_differences_of_quadratic():
    t = np.array([0.0, 0.1, 0.35, 0.5, 1.0])
    assert np.allclose(second_differences(t, 3 * t**2 + t), 6.0)


# Section 3 ---------------------------------------------------------------------------


def test_cor_3_1_zero_gamma_is_unweighted(s521):
    r = check_cor_3_1(gaussian(1.0, dim=2), (0.0, 0.0), s521)
    assert np.max(np.abs(r.margin)) <= 1e-12


@pytest.mark.parametrize("variant", ["theta", "mu"])
def test_cor_3_1_exact_vs_grid(s521, variant):
    u2 = gaussian(1.0, dim=2)
    e = check_cor_3_1(u2, (1.0, 0.0), s521, variant)
    g = check_cor_3_1(u2, (1.0, 0.0), s521, variant, "grid")
    assert e.passed and g.passed
    assert np.max(np.abs(e.margin - g.margin)) <= 1e-6


def test_cor_3_1_isotropic_matches_eq_2_22(s521):
    u2 = gaussian(1.0, dim=2)
    a = check_cor_3_1(u2, (1.0, 1.0), s521)
    b = check_eq_2_22(u2, s521)
    assert np.max(np.abs(a.margin - b.margin)) <= 1e-12


def test_cor_3_2_p2_constant_one(s521):
    r = check_cor_3_2_3_3(U0, s521, 2.0)
    assert r.passed and r.constant == 1.0


@pytest.mark.parametrize("variant", ["theta", "mu"])
def test_cor_3_2_three_halves(s521, variant):
    r = check_cor_3_2_3_3(U0, s521, 1.5, variant=variant)
    assert r.passed and math.isfinite(r.constant)
    assert math.isfinite(r.params["constant_2T"])


def test_cor_3_3_radial(s521):
    r = check_cor_3_2_3_3(gaussian(1.3, dim=2), s521, 1.5, radial=True)
    assert r.passed and math.isfinite(r.constant)


@pytest.mark.parametrize("variant", ["dos1", "dos3", "fourier-linear"])
def test_cor_3_4_exact_vs_grid(variant):
    s = ConvexitySchedule.make(5.0, 2.0, 0.5)
    e = check_cor_3_4(U0, V0, s, variant)
    g = check_cor_3_4(U0, V0, s, variant, source="grid")
    assert e.passed and g.passed
    assert np.max(np.abs(e.margin - g.margin)) <= 1e-6


def test_cor_3_4_fourier_gaussian_needs_strong_schedule():
    s = ConvexitySchedule.make(16.0, 4.0, 0.5)
    assert check_cor_3_4(U0, V0, s, "fourier-gaussian").passed
    with pytest.raises(EndpointInfiniteError):
        check_cor_3_4(U0, V0, ConvexitySchedule.make(5.0, 2.0, 0.5), "fourier-gaussian")


def test_cor_3_4_symmetric_pair_rotates_to_single_check():
    # for u0 = v0 the weight |x - y|^2/s^2 sees r = (x - y)/sqrt 2 with weight 2 r^2/s^2,
    # and the (x + y) direction is unweighted: the log norm splits into two 1-d pieces
    s = ConvexitySchedule.make(5.0, 2.0, 0.5)
    r = check_cor_3_4(U0, U0, s, "dos3")
    single = []
    for t in s.times:
        ut = propagate(U0, float(t))
        sc = float(s.scale_at(t))
        single.append(weighted_l2_log_norm(ut, WeightSpec.gaussian_iso(sc / math.sqrt(2)))
                      + weighted_l2_log_norm(ut, WeightSpec.trivial()))
    assert np.allclose(r.lhs_log, single, atol=1e-12)


def test_cor_3_4_variants_listed():
    assert COR_3_4_VARIANTS == ("dos1", "dos3", "fourier-linear", "fourier-gaussian")


@pytest.mark.parametrize("pair", [(U0, U0), (boost(U0, 1.0), V0), (U0, V0)])
def test_variance_convexity(pair):
    r = check_variance_convexity(*pair)
    assert r.passed and len(r.times) == 39


def test_variance_time_reflection():
    r = check_variance_convexity(U0, V0)
    dd = r.rhs_log
    assert np.allclose(dd, dd[::-1], rtol=1e-9)


def test_variance_grid_agrees():
    e = check_variance_convexity(U0, V0)
    g = check_variance_convexity(U0, V0, source="grid")
    assert np.max(np.abs(e.rhs_log - g.rhs_log)) <= 1e-6


@pytest.mark.parametrize("variant", ["gal1", "gal2"])
def test_cor_3_5_zero_boost(s521, variant):
    r = check_cor_3_5(U0, 0.0, s521, variant)
    ref = check_eq_2_22(U0, s521) if variant == "gal1" else check_eq_2_23(U0, s521)
    assert np.array_equal(r.margin, ref.margin)


@pytest.mark.parametrize("variant", ["gal1", "gal2"])
def test_cor_3_5_routes(s521, variant):
    delegate = check_cor_3_5(U0, 1.0, s521, variant)
    direct = check_cor_3_5(U0, 1.0, s521, variant, route="direct")
    comoving = check_cor_3_5(U0, 1.0, s521, variant, route="comoving")
    ref = check_eq_2_22(U0, s521) if variant == "gal1" else check_eq_2_23(U0, s521)
    assert delegate.passed and direct.passed
    assert np.max(np.abs(delegate.margin - direct.margin)) <= 1e-12
    assert np.max(np.abs(comoving.margin - ref.margin)) <= 1e-12


def test_nu_schedule():
    ns = nu_schedule(U0, 5.0, 2.0)
    assert ns.nu[0] == 0.25
    assert np.all(np.diff(ns.nu) < 0)
    assert nu_schedule(U0, 16.0, 4.0).certified

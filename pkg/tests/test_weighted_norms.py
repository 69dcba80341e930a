import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from logconvex.errors import TailDominanceError, UnsupportedWeightError
from logconvex.gaussian_calculus import ChirpedGaussian, gaussian, propagate, weighted_l2_log_norm
from logconvex.spectral import GridSpec, sample, tensor_field
from logconvex.weighted_norms import (
    exact_weighted_log_norm,
    grid_weighted_log_norm,
    pair_weighted_log_norm,
    power_weight_constant_probe,
    probe_ratio,
)
from logconvex.weighting import ScheduleScale, WeightSpec

SPEC = GridSpec(1, 1024, 40.0)


def test_trivial_weight_on_grid():
    f = sample(gaussian(1.0), SPEC)
    val = grid_weighted_log_norm(f, WeightSpec.linear([0.0]))
    assert val == pytest.approx(math.log(f.l2_norm()), abs=1e-14)


def test_gaussian_weight_on_grid():
    f = sample(gaussian(1.0), SPEC)
    assert grid_weighted_log_norm(f, WeightSpec.gaussian_iso(math.sqrt(2))) == pytest.approx(
        0.25 * math.log(math.pi), abs=1e-8)


def test_tail_dominance_flag():
    f = sample(gaussian(1.0), SPEC)
    with pytest.raises(TailDominanceError):
        grid_weighted_log_norm(f, WeightSpec.gaussian_iso(1.0))


def test_interaction_gaussian_rotated_closed_form():
    # u = v = exp(-x^2): in r = (x - y)/sqrt 2, s = (x + y)/sqrt 2 the integrand is
    # exp(-2 r^2 - 2 s^2 + 2 * 2 r^2 / scale^2)
    scale = 3.0
    rate_r = 2 - 4 / scale**2
    expected = 0.5 * (0.5 * math.log(math.pi / rate_r) + 0.5 * math.log(math.pi / 2))
    w = WeightSpec.interaction_gaussian(scale)
    assert pair_weighted_log_norm(gaussian(1.0), gaussian(1.0), w) == pytest.approx(expected, abs=1e-14)
    spec = GridSpec(1, 256, 20.0)
    u = sample(gaussian(1.0), spec)
    assert grid_weighted_log_norm(tensor_field(u, u), w) == pytest.approx(expected, abs=1e-10)


def test_distance_weight_against_quadrature():
    u, v = ChirpedGaussian([1.0 + 0.5j], [0.3]), gaussian(2.0)
    w = WeightSpec.interaction_distance()
    val = dblquad(lambda y, x: (x - y) ** 2 * abs(u(np.array([[x]]))[0] * v(np.array([[y]]))[0]) ** 2,
                  -8, 8, -8, 8, epsabs=1e-13)[0]
    assert pair_weighted_log_norm(u, v, w) == pytest.approx(0.5 * math.log(val), abs=1e-9)


def test_facade_delegation():
    g = gaussian(1.0)
    w = WeightSpec.gaussian_iso(math.sqrt(2))
    assert exact_weighted_log_norm(g, w) == weighted_l2_log_norm(g, w)
    assert exact_weighted_log_norm(g, WeightSpec.gaussian_iso(1.0)) == math.inf
    with pytest.raises(UnsupportedWeightError):
        exact_weighted_log_norm(g, WeightSpec.interaction_gaussian(2.0))


@pytest.mark.parametrize("w", [
    WeightSpec.linear([1.3], 2.0),
    WeightSpec.gaussian_iso(2.5),
])
@pytest.mark.parametrize("t", [0.0, 0.4])
def test_exact_and_grid_agree(w, t):
    g = propagate(ChirpedGaussian([1.0 + 0.2j], [0.1]), t)
    val_grid = grid_weighted_log_norm(sample(g, SPEC), w)
    assert val_grid == pytest.approx(weighted_l2_log_norm(g, w), abs=1e-6)


def test_power_weight_grid_needs_fine_cells():
    # |x|^p has a kink at the origin, so the Riemann sum converges only like dx^(p+1)
    g = ChirpedGaussian([1.0 + 0.2j], [0.1])
    w = WeightSpec.power_axis([1.5], [1.0], 1.0)
    exact = weighted_l2_log_norm(g, w)
    coarse = abs(grid_weighted_log_norm(sample(g, SPEC), w) - exact)
    fine = abs(grid_weighted_log_norm(sample(g, GridSpec(1, 8192, 40.0)), w) - exact)
    assert fine <= 1e-6 and fine < coarse / 50


def test_logsumexp_overflow_free():
    # phi = 700 at the peak of the weighted integrand
    g = gaussian(1 / 350)
    w = WeightSpec.linear([2.0], 1.0)
    spec = GridSpec(1, 2048, 1200.0)
    val = grid_weighted_log_norm(sample(g, spec, guard=None), w, tail_tol=None)
    assert math.isfinite(val)
    assert val == pytest.approx(weighted_l2_log_norm(g, w), abs=1e-6)


def test_gaussian_weight_monotone_in_scale():
    g = gaussian(1.0)
    vals = [weighted_l2_log_norm(g, WeightSpec.gaussian_iso(s)) for s in (1.2, 1.5, 2.0, 4.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_probe_p2_is_constant():
    lo, hi = power_weight_constant_probe(2.0)
    assert lo == pytest.approx(math.sqrt(2 * math.pi), rel=1e-9)
    assert hi == pytest.approx(math.sqrt(2 * math.pi), rel=1e-9)


def test_probe_band_p_three_halves():
    lo, hi = power_weight_constant_probe(1.5)
    assert 0 < lo <= hi < math.inf
    assert hi / lo <= 10


def test_probe_flattens():
    r5, r10 = probe_ratio(5.0, 1.5), probe_ratio(10.0, 1.5)
    assert 0.5 <= r10 / r5 <= 2.0


def test_schedule_scale():
    s = ScheduleScale(5.0, 2.0)
    assert s.scale_at(1.0) == pytest.approx(7.0)
    with pytest.raises(ValueError):
        ScheduleScale(1.0, 0.0)


@pytest.mark.parametrize("w", [
    WeightSpec.linear([1.0, -2.0], 3.0),
    WeightSpec.gaussian_aniso([1.0, 0.0], 2.0),
    WeightSpec.power_radial(1.5, 2.0),
    WeightSpec.interaction_distance(),
])
def test_weight_json_round_trip(w):
    d = w.to_dict()
    assert d["kind"] == w.kind
    assert WeightSpec.from_dict(d) == w

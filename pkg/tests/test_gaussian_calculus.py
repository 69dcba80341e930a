import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from logconvex.gaussian_calculus import (
    ChirpedGaussian,
    boost,
    chirp,
    convolve,
    evaluate,
    fourier,
    gaussian,
    heat,
    heat_preimage,
    inverse_fourier,
    multiply,
    propagate,
    random_chirped,
    translate,
    weighted_l2_log_norm,
    weighted_lp_membership,
)
from logconvex.weighting import WeightSpec

re_z = st.floats(0.2, 4.0)
im_z = st.floats(-3.0, 3.0)
lin = st.floats(-2.0, 2.0)
times = st.floats(-2.0, 2.0)


@st.composite
def chirped(draw):
    return ChirpedGaussian(complex(draw(re_z), draw(im_z)), complex(draw(lin), draw(lin)))


def fourier_by_quadrature(g: ChirpedGaussian, xi: float) -> complex:
    def part(fn):
        return quad(lambda x: fn(np.exp(-1j * x * xi) * g(np.array([[x]]))[0]), -np.inf, np.inf,
                    epsabs=1e-13, epsrel=1e-12, limit=400)[0]
    return (part(np.real) + 1j * part(np.imag)) / math.sqrt(2 * math.pi)


# evaluation ------------------------------------------------------------------


@pytest.mark.parametrize("point, log_mod, phase", [
    (0.0, 0.0, 0.0),
    (1j, 1.0, 0.0),
    (1 + 1j, 0.0, -2.0),
])
def test_evaluate_examples(point, log_mod, phase):
    lm, ph = evaluate(gaussian(1.0), [point])
    assert lm == pytest.approx(log_mod, abs=1e-14)
    assert ph == pytest.approx(phase, abs=1e-14)


def test_evaluate_matches_complex_arithmetic(rng):
    for _ in range(20):
        g = random_chirped(rng)
        w = complex(*rng.normal(size=2))
        direct = cmath.exp(g.log_amp - g.quad[0] * w * w + g.lin[0] * w)
        lm, ph = evaluate(g, [w])
        assert lm == pytest.approx(math.log(abs(direct)), abs=1e-12)
        assert cmath.exp(1j * ph) == pytest.approx(direct / abs(direct), abs=1e-12)


def test_json_field_names():
    g = ChirpedGaussian([1 + 2j], [0.5j], 0.25)
    data = g.to_dict()
    assert list(data) == ["dim", "log_amp", "quad", "lin"]
    assert data["quad"] == [[1.0, 2.0]]
    assert ChirpedGaussian.from_json(g.to_json()).allclose(g)


def test_invariant_rejects_nonpositive_real_part():
    with pytest.raises(ValueError):
        ChirpedGaussian([-0.1 + 1j], [0.0])


# Fourier transform -------------------------------------------------------------


def test_fourier_fixed_point():
    assert fourier(gaussian(0.5)).allclose(gaussian(0.5))


def test_fourier_of_unit_gaussian():
    assert fourier(gaussian(1.0)).allclose(gaussian(0.25, log_amp=-0.5 * math.log(2)))


@pytest.mark.parametrize("g", [
    ChirpedGaussian([1 - 1j], [0.0]),
    ChirpedGaussian([0.7 + 0.4j], [0.3 - 0.5j]),
])
def test_fourier_against_quadrature(g):
    gh = fourier(g)
    for xi in np.linspace(-3, 3, 10):
        assert gh(np.array([[xi]]))[0] == pytest.approx(fourier_by_quadrature(g, xi), abs=1e-10)


def test_inverse_fourier_examples():
    assert inverse_fourier(gaussian(0.5)).allclose(gaussian(0.5))
    assert inverse_fourier(gaussian(0.25, log_amp=-0.5 * math.log(2))).allclose(gaussian(1.0))


@settings(max_examples=60, deadline=None)
@given(chirped())
def test_fourier_round_trip(g):
    back = inverse_fourier(fourier(g))
    assert back.allclose(g, rtol=1e-13, atol=1e-13)


@settings(max_examples=60, deadline=None)
@given(chirped())
def test_plancherel(g):
    triv = WeightSpec.trivial()
    assert weighted_l2_log_norm(fourier(g), triv) == pytest.approx(weighted_l2_log_norm(g, triv), abs=1e-12)


# propagation ------------------------------------------------------------------


def test_propagate_identity_at_zero(rng):
    g = random_chirped(rng)
    assert propagate(g, 0.0).allclose(g, rtol=0, atol=0)


@pytest.mark.parametrize("t", [0.25, 1.0, -0.7])
def test_propagate_unit_gaussian(t):
    d = 1 + 4j * t
    expected = ChirpedGaussian([1 / d], [0.0], -0.5 * cmath.log(d))
    assert propagate(gaussian(1.0), t).allclose(expected)


def test_extremal_data_decay():
    g = ChirpedGaussian([0.25 + 0.25j], [0.0])
    assert propagate(g, 1.0).quad[0].real == pytest.approx(0.25, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(chirped(), times, times)
def test_group_law(g, s, t):
    assert propagate(propagate(g, s), t).allclose(propagate(g, s + t), rtol=1e-12, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(chirped(), times)
def test_unitarity(g, t):
    triv = WeightSpec.trivial()
    assert weighted_l2_log_norm(propagate(g, t), triv) == pytest.approx(weighted_l2_log_norm(g, triv), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(chirped(), times, st.floats(-2, 2), st.floats(0.01, 0.5))
def test_closure(g, t, tau, delta):
    for h in (fourier(g), propagate(g, t), chirp(g, tau), heat(g, delta)):
        assert np.all(h.quad.real > 0)


def test_branch_continuity():
    g = ChirpedGaussian([1.0 + 0.5j], [0.2])
    ts = np.linspace(-1e-3, 1e-3, 201)
    amps = np.array([propagate(g, t).log_amp for t in ts])
    assert np.max(np.abs(np.diff(amps))) < 1e-4


# heat, chirp, boost ------------------------------------------------------------------


def test_heat_small_delta():
    g = gaussian(1.0)
    h = heat(g, 1e-10)
    assert abs(h.quad[0] - g.quad[0]) <= 1e-8 and abs(h.log_amp) <= 1e-8


def test_heat_quarter():
    h = heat(gaussian(1.0), 0.25)
    assert h.quad[0] == pytest.approx(0.5, abs=1e-15)
    assert h.log_amp == pytest.approx(-0.5 * math.log(2), abs=1e-15)


def test_heat_kernel_convolution_oracle():
    delta = 0.25
    h = heat(gaussian(1.0), delta)
    for x in (0.0, 0.7, -1.3):
        val = quad(lambda y: math.exp(-(x - y) ** 2 / (4 * delta) - y * y), -np.inf, np.inf)[0]
        assert h(np.array([[x]]))[0].real == pytest.approx(val / math.sqrt(4 * math.pi * delta), rel=1e-10)


def test_heat_preimage_round_trip():
    u0 = gaussian(1.0)
    delta = 0.2  # below the Fourier decay rate 1/4
    assert heat(heat_preimage(u0, delta), delta).allclose(u0)


def test_chirp_inverse(rng):
    g = random_chirped(rng)
    assert chirp(g, 0.0).allclose(g)
    assert chirp(chirp(g, 0.7), -0.7).allclose(g)
    assert np.all(chirp(g, 0.3).quad.real == g.quad.real)


def test_chirp_fourier_rate_beats_prediction():
    from logconvex.gaussian_calculus import lemma_params_e
    c1, c2 = 1.0, 0.25
    predicted = lemma_params_e(c1, c2, 0.25)[1]
    actual = fourier(chirp(gaussian(1.0), -0.25)).quad[0].real
    assert actual >= predicted


def test_boost_modulus(rng):
    g = random_chirped(rng)
    b = boost(g, 1.3)
    x = rng.uniform(-3, 3, size=(100, 1))
    assert np.allclose(np.abs(b(x)), np.abs(g(x)), rtol=1e-13)
    assert boost(g, 0.0).allclose(g)


@pytest.mark.parametrize("nu, t", [(1.0, 0.5), (-0.4, 1.2), (2.0, -0.3)])
def test_boost_commutes_with_flow(rng, nu, t):
    g = random_chirped(rng)
    x = rng.uniform(-2, 2, size=(50, 1))
    lhs = propagate(boost(g, nu), t)(x)
    moved = translate(propagate(g, t), 2 * t * nu)
    rhs = np.exp(-1j * nu * nu * t + 1j * nu * x[:, 0]) * moved(x)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-14)


# products and convolutions ------------------------------------------------------------


def test_multiply_squares():
    assert multiply(gaussian(1.0), gaussian(1.0)).allclose(gaussian(2.0))


def test_product_fourier_rate_bound(rng):
    for _ in range(30):
        g, h = random_chirped(rng), random_chirped(rng)
        a2, b2 = fourier(g).quad[0].real, fourier(h).quad[0].real
        actual = fourier(multiply(g, h)).quad[0].real
        assert actual >= a2 * b2 / (a2 + b2) - 1e-12


@pytest.mark.parametrize("mu, nu", [(1.0, 1.0), (1.0, 3.0), (0.3, 2.2)])
def test_convolution_closed_form(mu, nu):
    c = convolve(gaussian(mu), gaussian(nu))
    expected = gaussian(mu * nu / (mu + nu), log_amp=0.5 * math.log(math.pi / (mu + nu)))
    assert c.allclose(expected, rtol=1e-12, atol=1e-12)


def test_convolution_commutes(rng):
    g, h = random_chirped(rng), random_chirped(rng)
    assert convolve(g, h).allclose(convolve(h, g))


# weighted norms ----------------------------------------------------------------------


def test_gaussian_weight_half():
    w = WeightSpec.gaussian_iso(math.sqrt(2.0))
    assert weighted_l2_log_norm(gaussian(1.0), w) == pytest.approx(0.25 * math.log(math.pi), abs=1e-14)


def test_gaussian_weight_divergent():
    assert weighted_l2_log_norm(gaussian(1.0), WeightSpec.gaussian_iso(1.0)) == math.inf


def test_linear_weight_against_quadrature():
    g = ChirpedGaussian([0.8 + 0.3j], [0.4 - 0.2j])
    w = WeightSpec.linear([1.5], 2.0)
    def integrand(x):
        return math.exp(2 * 0.75 * x + 2 * g.log_modulus(np.array([[x]]))[0])

    val = quad(integrand, -40, 40, points=[0.0], limit=200)[0]
    assert weighted_l2_log_norm(g, w) == pytest.approx(0.5 * math.log(val), abs=1e-10)


def test_lambda_average_identity():
    gam, x = 2.0, 1.0
    val = quad(lambda lam: math.exp(2 * lam * x / gam - lam * lam / 2), -np.inf, np.inf)[0]
    assert val == pytest.approx(math.sqrt(2 * math.pi) * math.exp(0.5), rel=1e-12)


@pytest.mark.parametrize("g, rate, p, expected", [
    (gaussian(1.0), 0.5, 2, True),
    (gaussian(1.0), 1.0, 2, False),
    (gaussian(1.0), 1.0, math.inf, False),
    (gaussian(2.0, lin=3.0), 1.9, 1, True),
])
def test_lp_membership(g, rate, p, expected):
    assert weighted_lp_membership(g, rate, p) is expected

import math

import numpy as np
import pytest

from logconvex.gaussian_calculus import (
    ChirpedGaussian,
    HardyClass,
    appel,
    appel_norm_identity,
    appel_residual,
    beurling_functional,
    boost,
    complex_bound_params,
    corollary_2_1_params,
    dada_residual,
    fourier,
    gaussian,
    hardy_classify,
    lemma_params_d,
    lemma_params_e,
    opq_class,
    propagate,
    random_chirped,
)


@pytest.mark.parametrize("g, a1, a2", [
    (gaussian(1.0), 1.0, 0.25),
    (gaussian(0.5), 0.5, 0.5),
    (ChirpedGaussian([1 + 1j], [0.0]), 1.0, 0.125),
])
def test_opq_class(g, a1, a2):
    c = opq_class(g)
    assert c.a1_sup == pytest.approx(a1, abs=1e-14)
    assert c.a2_sup == pytest.approx(a2, abs=1e-14)
    assert c.m == pytest.approx(a1 * a2, abs=1e-14)


def test_chirped_fourier_rate_independent():
    z = 1 + 1j
    assert opq_class(ChirpedGaussian([z], [0.0])).a2_sup == pytest.approx((1 / (4 * z)).real, abs=1e-15)


def test_hardy_product_never_exceeds_quarter(rng):
    for _ in range(1000):
        g = random_chirped(rng, lin_bound=0.0)
        m = opq_class(g).m
        assert m <= 0.25 + 1e-14
        if g.quad[0].imag == 0:
            assert m == pytest.approx(0.25, abs=1e-14)


def test_quarter_only_for_real_quad(rng):
    for _ in range(200):
        g = random_chirped(rng)
        if abs(g.quad[0].imag) > 1e-3:
            assert opq_class(g).m < 0.25


@pytest.mark.parametrize("a1, a2, p, q, expected", [
    (1.0, 0.25, math.inf, math.inf, HardyClass.EXTREMAL),
    (1.0, 1.0, math.inf, math.inf, HardyClass.FORCED_ZERO),
    (1.0, 0.1, math.inf, math.inf, HardyClass.ADMISSIBLE),
    (1.0, 0.25, 2, 2, HardyClass.FORCED_ZERO),
    (1.0, 0.25, 2, math.inf, HardyClass.FORCED_ZERO),
    (1.0, 0.1, 2, 2, HardyClass.ADMISSIBLE),
])
def test_hardy_classify(a1, a2, p, q, expected):
    assert hardy_classify(a1, a2, p, q) is expected


def test_hardy_classify_rejects_nonpositive():
    with pytest.raises(ValueError):
        hardy_classify(0.0, 1.0)


# Beurling-Hormander: Gaussians sit on the degenerate direction, so every one diverges


@pytest.mark.parametrize("rate", [1.0, 2.0, 0.5])
def test_beurling_diverges_for_gaussians(rate):
    assert beurling_functional(gaussian(rate)) == math.inf


def test_beurling_divergence_boost_invariant():
    g = gaussian(2.0)
    assert beurling_functional(boost(g, 0.7)) == beurling_functional(g) == math.inf


def test_beurling_requires_one_dimension():
    with pytest.raises(ValueError):
        beurling_functional(gaussian(1.0, dim=2))


# complex extension bound ---------------------------------------------------------


def test_complex_bound_unit_gaussian(rng):
    g = gaussian(1.0)
    cb = complex_bound_params(g, 0.5)
    assert cb.a == pytest.approx(0.5)
    assert cb.b >= 1.0 and cb.log_n >= 0.0
    assert cb.dominates(g, rng.uniform(-5, 5, 1000), rng.uniform(-5, 5, 1000))


def test_complex_bound_real_gaussian_is_exact():
    g = gaussian(1.5)
    cb = complex_bound_params(g, 1e-9)
    assert cb.b == pytest.approx(1.5, rel=1e-12)


@pytest.mark.parametrize("g", [
    ChirpedGaussian([1 + 2j], [0.0]),
    ChirpedGaussian([0.6 - 0.8j], [0.5 + 1.0j]),
])
def test_complex_bound_chirped(rng, g):
    cb = complex_bound_params(g)
    assert cb.b > g.quad[0].real
    assert cb.dominates(g, rng.uniform(-6, 6, 1000), rng.uniform(-6, 6, 1000))


# decay-class parameter maps ----------------------------------------------------------


def test_lemma_d_examples():
    assert lemma_params_d(1.0, 0.25, 0.0) == (1.0, 0.25)
    assert lemma_params_d(1.0, 0.25, 1.0)[0] == pytest.approx(1 / 25, rel=1e-15)
    assert lemma_params_d(1.0, 0.25, -1.0) == lemma_params_d(1.0, 0.25, 1.0)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("t", [0.25, 1.0])
def test_lemma_d_prediction_below_actual(a, t):
    predicted = lemma_params_d(a, 1 / (4 * a), t)[0]
    assert predicted == pytest.approx(a / (1 + 4 * a * t) ** 2, rel=1e-14)
    assert predicted <= propagate(gaussian(a), t).quad[0].real


def test_lemma_e_examples():
    assert lemma_params_e(1.0, 0.25, 0.0) == (1.0, 0.25)
    assert lemma_params_e(1.0, 0.25, 1.0) == pytest.approx((1.0, 1 / 16), rel=1e-15)


@pytest.mark.parametrize("a, tau", [(0.5, 0.3), (1.0, 1.0), (2.0, 0.1)])
def test_lemma_e_prediction_below_actual(a, tau):
    from logconvex.gaussian_calculus import chirp
    c1, c2 = lemma_params_e(a, 1 / (4 * a), tau)
    actual = fourier(chirp(gaussian(a), -tau)).quad[0].real
    assert c1 == a and c2 <= actual


def test_corollary_params_example():
    assert corollary_2_1_params(1.0, 1.0, 0.5) == pytest.approx((1.0, 0.25), rel=1e-15)


def test_corollary_params_symmetry():
    a = corollary_2_1_params(0.3, 1.7, 0.8)[1]
    b = corollary_2_1_params(1.7, 0.3, 0.8)[1]
    s = 0.8
    # same second component after exchanging the two roles
    direct = 4 * s * s * 0.3 * 1.7 / (0.3 + 2 * math.sqrt(0.3 * 1.7) + 1.7)
    assert a == pytest.approx(direct, rel=1e-14) and b == pytest.approx(direct, rel=1e-14)


def test_corollary_params_consistency():
    u0, s = gaussian(1.0), 0.5
    mu1 = 0.5 * u0.quad[0].real
    mu2 = 0.5 * propagate(u0, s).quad[0].real
    c1, c2 = corollary_2_1_params(mu1, mu2, s)
    cls = opq_class(u0)
    assert cls.a1_sup >= c1 - 1e-14 and cls.a2_sup >= c2 - 1e-14


# conformal map ----------------------------------------------------------------


def test_appel_initial_datum():
    v0 = appel(gaussian(1.0))
    assert v0.allclose(gaussian(1 / 16, log_amp=-math.log(2)))


def test_appel_is_an_involution(rng):
    # the transform of conj(u0^)(x/2) is 2 conj(u0)(2 xi), so the factors cancel
    u0 = random_chirped(rng)
    x = rng.uniform(-2, 2, size=(20, 1))
    assert np.allclose(appel(appel(u0))(x), u0(x), rtol=1e-12)


@pytest.mark.parametrize("t", [0.5, 1 / 3, 2.0])
def test_appel_and_dada_relations(rng, t):
    u0 = random_chirped(rng)
    x = rng.uniform(-2, 2, size=(100, 1))
    assert appel_residual(u0, x, t) <= 1e-10
    assert dada_residual(u0, x, t) <= 1e-10


@pytest.mark.parametrize("t", [0.5, 1 / 3])
def test_appel_norm_identity(t):
    lhs, rhs = appel_norm_identity(gaussian(1.0), [1.0], 1.0, 1.0, t)
    assert lhs == pytest.approx(rhs, abs=1e-10)

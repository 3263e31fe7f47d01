"""Fourier-analytic distinguishing-advantage estimates, degree 1 and 2."""

import math

import numpy as np
import pytest

from rlwe_workbench.estimator import (EstimateReport, _logsumexp2,
                                      brute_force_distance, brute_force_pmf,
                                      deg2_admissible, empirical_uniformity,
                                      epsilon, epsilon_deg2, epsilon_for_alpha,
                                      gauss_sum_check,
                                      nearest_admissible_q_deg2, nu_hat,
                                      theoretical_bound)
from rlwe_workbench.attack import critical_value
from rlwe_workbench.sampling import binomial_vk_pmf


# ------------------------------------------------------------ exact anchors

def test_tiny_instance_exact():
    rep = epsilon(4, 5, 2)
    assert abs(2 ** rep.log2_eps - 0.125) < 1e-12
    assert sorted(rep.per_root_log2) == [2, 3]  # the two primitive 4th roots
    assert len(set(rep.per_root_log2.values())) == 1
    assert rep.degree == 1 and (rep.m, rep.q, rep.k) == (4, 5, 2)
    assert rep.neg_floor_log2_eps == 3


def test_alpha_invariance():
    vals = [epsilon_for_alpha(8, 17, 2, a) for a in (2, 8, 9, 15)]
    assert all(abs(v + 5.0) < 1e-9 for v in vals)
    with pytest.raises(ValueError, match="does not have exact order 8"):
        epsilon_for_alpha(8, 17, 2, 4)  # order 4
    with pytest.raises(ValueError, match="does not have exact order 8"):
        epsilon_for_alpha(8, 17, 2, 16)  # order 2
    with pytest.raises(ValueError, match="q prime"):
        epsilon_for_alpha(8, 15, 2, 2)


def _find_alpha(m: int, q: int) -> int:
    for a in range(2, q):
        if pow(a, m, q) == 1 and pow(a, m // 2, q) != 1:
            return a
    raise AssertionError("no order-%d element mod %d" % (m, q))


def test_deg1_matches_naive_full_sum():
    """Dual route: literal sum over every y in F_q^*, no orbit collapsing."""
    for m, q, k in [(4, 13, 2), (8, 17, 2), (4, 5, 4), (8, 41, 6)]:
        n = m // 2
        alpha = _find_alpha(m, q)
        total = 0.0
        for y in range(1, q):
            prod = 1.0
            for i in range(n):
                prod *= math.cos(math.pi * (pow(alpha, i, q) * y % q) / q) ** k
            total += prod
        assert abs(math.log2(total / 2.0) - epsilon(m, q, k).log2_eps) < 1e-9


def test_deg1_frozen_regression():
    rows = [
        (64, 193, -41.337011815064386, -16.345870128756445, 41),
        (128, 1153, -97.86158866226415, -33.1048395895135, 97),
        (256, 3329, -183.5736579444915, -79.76609961377223, 183),
        (512, 10753, -419.0513184622579, -175.49223613876194, 419),
    ]
    for m, q, log2_eps, log2_bound, floor in rows:
        rep = epsilon(m, q, 2)
        assert abs(rep.log2_eps - log2_eps) < 1e-4
        assert abs(rep.log2_bound - log2_bound) < 1e-4
        assert rep.neg_floor_log2_eps == floor
        assert abs(rep.beta - (1 + math.sqrt(q) / m) / 2) < 1e-12
        assert len(rep.per_root_log2) == m // 2
        assert rep.runtime_ms >= 0.0


def test_validation():
    with pytest.raises(ValueError, match="is not prime"):
        epsilon(8, 15, 2)
    with pytest.raises(ValueError, match="power of 2"):
        epsilon(6, 13, 2)
    with pytest.raises(ValueError, match="not 1 mod m"):
        epsilon(8, 19, 2)
    with pytest.raises(ValueError, match="even integer"):
        epsilon(8, 17, 3)
    with pytest.raises(ValueError, match="even integer"):
        epsilon(8, 17, 0)


def test_theoretical_bound():
    with pytest.raises(ValueError, match="needs q < m\\^2"):
        theoretical_bound(4, 17, 2)
    assert epsilon(4, 17, 2).log2_bound is None
    got = theoretical_bound(64, 383, 2)
    expect = math.log2(382 / 2) + 32 * math.log2((1 + math.sqrt(383) / 64) / 2)
    assert abs(got - expect) < 1e-12
    assert abs(got - (-12.105134667637945)) < 1e-9


def test_logsumexp2():
    assert _logsumexp2(np.array([-3.0, -3.0])) == -2.0
    assert _logsumexp2(np.array([-2000.0])) == -math.inf
    assert _logsumexp2(np.array([], dtype=float)) == -math.inf
    assert _logsumexp2(np.array([-1.0, -2000.0])) == -1.0  # flushed term
    got = _logsumexp2(np.array([-700.0, -700.0]))  # beyond float underflow
    assert abs(got - (-699.0)) < 1e-9


# ------------------------------------------------------------------ degree 2

def _naive_deg2(m: int, q: int, k: int) -> float:
    """Independent arithmetic in F_{q^2} = F_q[s]/(s^2 - w): scan for an
    order-m element, then sum the trace-cosine product over all y != 0."""
    w = next(v for v in range(2, q) if pow(v, (q - 1) // 2, q) == q - 1)

    def mul(a, b):
        return ((a[0] * b[0] + a[1] * b[1] * w) % q, (a[0] * b[1] + a[1] * b[0]) % q)

    def power(a, e):
        out, base = (1, 0), a
        while e:
            if e & 1:
                out = mul(out, base)
            base = mul(base, base)
            e >>= 1
        return out

    alpha = next((u, v) for u in range(q) for v in range(q)
                 if (u, v) != (0, 0) and power((u, v), m) == (1, 0)
                 and power((u, v), m // 2) != (1, 0))
    apow = [power(alpha, i) for i in range(m // 2)]
    total = 0.0
    for yu in range(q):
        for yv in range(q):
            if (yu, yv) == (0, 0):
                continue
            prod = 1.0
            for ai in apow:
                z = mul(ai, (yu, yv))
                prod *= math.cos(math.pi * (2 * z[0] % q) / q) ** k
            total += prod
    return math.log2(total / 2.0)


def test_deg2_matches_naive_full_sum():
    for m, q in [(8, 3), (8, 5), (16, 7)]:
        assert abs(_naive_deg2(m, q, 2) - epsilon_deg2(m, q, 2).log2_eps) < 1e-9


def test_deg2_small_frozen():
    assert abs(epsilon_deg2(8, 3, 2).log2_eps - (-4.0)) < 1e-9
    assert abs(epsilon_deg2(8, 5, 2).log2_eps - (-1.8300749985576887)) < 1e-9
    assert abs(epsilon_deg2(16, 7, 2).log2_eps - (-5.245112497836532)) < 1e-9


def test_deg2_admissibility():
    assert deg2_admissible(8, 3) and deg2_admissible(64, 383)
    assert not deg2_admissible(64, 193)  # 64 | 192: degree-1 case
    assert not deg2_admissible(512, 5583)  # not prime
    assert not deg2_admissible(8, 15)
    assert nearest_admissible_q_deg2(512, 5583) == 5119
    assert nearest_admissible_q_deg2(64, 383) == 383


def test_deg2_rejections():
    with pytest.raises(ValueError, match="q=5583 is not prime"):
        epsilon_deg2(512, 5583, 2)  # the printed open-question value
    assert nearest_admissible_q_deg2(512, 5583) == 5119  # the usable stand-in
    with pytest.raises(ValueError, match="nearest admissible q is 191"):
        epsilon_deg2(64, 193, 2)  # 64 | 192: this q is a degree-1 instance


def test_deg2_long_run_gate():
    with pytest.raises(ValueError, match="long_run=True"):
        epsilon_deg2(256, 1279, 2)
    rep = epsilon_deg2(256, 1279, 2, long_run=True)
    assert rep.neg_floor_log2_eps == 146
    assert abs(rep.log2_eps - (-146.02901398301643)) < 1e-4
    # q^2 below the desk-scale threshold runs without the flag
    assert epsilon_deg2(128, 1151, 2).neg_floor_log2_eps == 49


def test_deg2_frozen_regression():
    r1 = epsilon_deg2(64, 383, 2)
    assert abs(r1.log2_eps - (-14.464158355653684)) < 1e-4
    assert abs(r1.log2_bound - (-12.105134667637945)) < 1e-4
    assert r1.degree == 2
    r2 = epsilon_deg2(128, 1151, 2)
    assert abs(r2.log2_eps - (-49.17846222540215)) < 1e-4
    assert abs(r2.log2_bound - (-33.12414497092587)) < 1e-4


def test_deg2_per_root_structure():
    rep = epsilon_deg2(8, 5, 2)
    assert len(rep.per_root_log2) == 4
    assert all(isinstance(key, tuple) and len(key) == 2 for key in rep.per_root_log2)
    assert len(set(rep.per_root_log2.values())) == 1


def test_deg2_workers_agree():
    one = epsilon_deg2(128, 1151, 2, workers=1)
    two = epsilon_deg2(128, 1151, 2, workers=2)
    assert abs(one.log2_eps - two.log2_eps) < 1e-12


# ------------------------------------------------------- model-level oracles

def test_nu_hat_is_the_vk_characteristic_function():
    for q in (5, 13, 97):
        for k in (2, 4, 8):
            pmf = binomial_vk_pmf(k)
            for y in range(q):
                dft = sum(p * np.exp(-2j * np.pi * (t - k // 2) * y / q)
                          for t, p in enumerate(pmf))
                assert abs(dft.imag) < 1e-12
                assert abs(dft.real - nu_hat(y, q, k)) < 1e-12


def test_brute_force_pmf_frozen():
    for alpha in (2, 3):
        assert np.allclose(brute_force_pmf(4, 5, 2, alpha),
                           np.array([4, 3, 3, 3, 3]) / 16.0, atol=0)
    assert abs(brute_force_pmf(8, 17, 2, 2).sum() - 1.0) < 1e-12


def test_brute_force_distance_exact():
    assert brute_force_distance(4, 5, 2) == 0.05
    assert brute_force_distance(4, 5, 2) <= 2 ** epsilon(4, 5, 2).log2_eps + 1e-12


def test_brute_force_guard():
    with pytest.raises(ValueError, match="too large for exact convolution"):
        brute_force_pmf(64, 3329, 2, 2)


def test_distance_bounded_by_estimate():
    for m, q, k in [(4, 13, 2), (8, 17, 2)]:
        delta = brute_force_distance(m, q, k)
        assert delta <= 2 ** epsilon(m, q, k).log2_eps + 1e-12


def test_gauss_sum_check():
    assert abs(gauss_sum_check(4, 5, 2) - 1.0) < 1e-9
    got = gauss_sum_check(64, 193, 11)
    assert abs(got - 9.413010) < 1e-4
    assert got <= math.sqrt(193)
    with pytest.raises(ValueError, match="exact order"):
        gauss_sum_check(64, 193, 2)


def test_root_of_unity_product_identity():
    """Per-y crosscheck of the cosine product: over a full orbit (alpha has
    order m, alpha^(m/2) = -1) the phases pair up into
    prod_j (1 + zeta^(alpha^j y)) = (2^n prod_i |cos(pi alpha^i y / q)|)^2."""
    for m, q, alpha in [(4, 13, 5), (8, 17, 2), (64, 193, 11)]:
        n = m // 2
        apow = [pow(alpha, j, q) for j in range(m)]
        assert apow[n] == q - 1  # alpha^(m/2) = -1
        for y in (1, 2, 5, q - 1):
            plus = np.prod([1 + np.exp(2j * np.pi * (a * y % q) / q) for a in apow])
            cos_form = np.prod(
                [4 * np.cos(np.pi * (apow[i] * y % q) / q) ** 2 for i in range(n)])
            assert abs(plus.imag) < 1e-6 * abs(cos_form) + 1e-9
            assert abs(plus.real - cos_form) < 1e-6 * abs(cos_form) + 1e-9


def test_empirical_uniformity():
    res = empirical_uniformity(64, 193, math.sqrt(2 * math.pi), 20000, 0)
    assert res.uniform is True
    assert res.critical == critical_value(192, 0.99)
    assert 100.0 < res.chi2 < res.critical
    narrow = empirical_uniformity(64, 193, 0.05, 20000, 0)
    assert narrow.uniform is False
    assert narrow.chi2 > 10000.0

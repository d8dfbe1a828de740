import math

import numpy as np
import pytest

from qmimo.channel import complex_normal
from qmimo.rates import (
    MIN_TRIALS,
    approx_rate,
    approx_rate_per_user,
    asymptotic_rate_infinite_bits,
    asymptotic_rate_infinite_power,
    energy_efficiency,
    ergodic_rate_mc,
    evaluate_rate_point,
    instantaneous_rate,
    interference_variance,
    power_scaled_limit,
    receiver_power,
)
from qmimo.rates import _instantaneous_rates_batch

ALPHA_1BIT = 1.0 - 0.3634

# frozen from the independent quadrature of log2(1+x) e^-x over [0, inf)
EXPONENTIAL_CHANNEL_RATE = 0.8603473822708857


def brute_force_interference(G, n, p_u, alpha):
    """Literal evaluation, including the full M x M diagonal matrix."""
    G = np.asarray(G, dtype=complex)
    g_n = G[:, n]
    cross = sum(
        abs(np.vdot(g_n, G[:, i])) ** 2 for i in range(G.shape[1]) if i != n
    )
    diag = np.diag(np.diag(p_u * G @ G.conj().T + np.eye(G.shape[0])))
    quad = (g_n.conj() @ diag @ g_n).real
    norm2 = np.linalg.norm(g_n) ** 2
    return p_u * alpha**2 * cross + alpha**2 * norm2 + alpha * (1 - alpha) * quad


def test_interference_two_by_two_hand_case():
    G = np.eye(2, dtype=complex)
    # hand-expanded: 0 (no cross term) + 0.25*1 + 0.25*(2*1) = 0.75
    assert interference_variance(G, 0, p_u=1.0, alpha=0.5) == pytest.approx(0.75, abs=1e-15)
    assert instantaneous_rate(G, 0, 1.0, 0.5) == pytest.approx(math.log2(4 / 3), rel=1e-12)


def test_interference_alpha_one_reductions():
    rng = np.random.default_rng(2)
    g = complex_normal(rng, (5, 1))
    norm2 = float(np.sum(np.abs(g) ** 2))
    assert interference_variance(g, 0, 2.0, 1.0) == pytest.approx(norm2, rel=1e-14)

    G = complex_normal(rng, (6, 3))
    expected = 2.0 * sum(
        abs(np.vdot(G[:, 1], G[:, i])) ** 2 for i in (0, 2)
    ) + float(np.sum(np.abs(G[:, 1]) ** 2))
    assert interference_variance(G, 1, 2.0, 1.0) == pytest.approx(expected, rel=1e-12)


def test_interference_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(500):
        m = int(rng.integers(1, 9))
        n_users = int(rng.integers(1, 9))
        G = complex_normal(rng, (m, n_users))
        n = int(rng.integers(n_users))
        p_u = float(rng.uniform(0.1, 20.0))
        alpha = float(rng.uniform(0.1, 1.0))
        fast = interference_variance(G, n, p_u, alpha)
        slow = brute_force_interference(G, n, p_u, alpha)
        assert abs(fast - slow) <= 1e-12 * abs(slow)


def test_interference_validation():
    G = np.eye(2, dtype=complex)
    with pytest.raises(ValueError):
        interference_variance(G, 2, 1.0, 0.5)
    with pytest.raises(ValueError):
        interference_variance(G, 0, -1.0, 0.5)
    with pytest.raises(ValueError):
        interference_variance(G, 0, 1.0, 0.0)


def test_instantaneous_rate_zero_column():
    G = np.zeros((4, 2), dtype=complex)
    G[:, 1] = 1.0
    assert instantaneous_rate(G, 0, 1.0, 0.5) == 0.0


def test_instantaneous_matched_filter_bound():
    rng = np.random.default_rng(5)
    g = complex_normal(rng, (8, 1))
    c = float(np.sum(np.abs(g) ** 2))
    assert instantaneous_rate(g, 0, 3.0, 1.0) == pytest.approx(math.log2(1 + 3.0 * c), rel=1e-12)


def test_batch_engine_matches_scalar_reference():
    rng = np.random.default_rng(6)
    G = complex_normal(rng, (7, 5, 3))
    batch = _instantaneous_rates_batch(G, p_u=4.0, alpha=0.7)
    for t in range(7):
        for n in range(3):
            assert batch[t, n] == pytest.approx(
                instantaneous_rate(G[t], n, 4.0, 0.7), rel=1e-12
            )


def test_ergodic_mc_exponential_channel_oracle():
    point = ergodic_rate_mc(np.ones(1), 1, 1.0, 1.0, trials=20_000, seed=13)
    est = point.sum_rate_mc
    assert abs(est.mean - EXPONENTIAL_CHANNEL_RATE) < 3 * est.stderr


def test_ergodic_mc_seed_consistency():
    a = ergodic_rate_mc(np.ones(2), 16, 5.0, ALPHA_1BIT, trials=4000, seed=1)
    b = ergodic_rate_mc(np.ones(2), 16, 5.0, ALPHA_1BIT, trials=4000, seed=2)
    gap = abs(a.sum_rate_mc.mean - b.sum_rate_mc.mean)
    assert gap < 3 * math.hypot(a.sum_rate_mc.stderr, b.sum_rate_mc.stderr)


def test_ergodic_mc_determinism():
    a = ergodic_rate_mc(np.array([1.0, 0.5]), 8, 2.0, 0.9, trials=500, seed=3)
    b = ergodic_rate_mc(np.array([1.0, 0.5]), 8, 2.0, 0.9, trials=500, seed=3)
    assert a.sum_rate_mc == b.sum_rate_mc
    assert a.per_user_mc == b.per_user_mc


def test_ergodic_mc_validation():
    with pytest.raises(ValueError):
        ergodic_rate_mc(np.ones(2), 4, 1.0, 1.0, trials=MIN_TRIALS - 1, seed=0)
    with pytest.raises(ValueError):
        ergodic_rate_mc(np.array([]), 4, 1.0, 1.0, trials=200, seed=0)


def test_approx_rate_single_user_case():
    assert approx_rate(np.ones(1), 0, 3, 1.0, 1.0) == pytest.approx(math.log2(5), rel=1e-14)


def test_approx_rate_hand_case():
    # b=1, M=100, N=2, unit betas, p_u=10: numerator 642.966, denominator 18.268
    got = approx_rate(np.ones(2), 0, 100, 10.0, ALPHA_1BIT)
    assert got == pytest.approx(5.177770308551775, rel=1e-12)
    assert got == pytest.approx(5.178, abs=1e-3)


def test_infinite_bits_identity():
    rng = np.random.default_rng(10)
    for _ in range(1000):
        n_users = int(rng.integers(1, 9))
        betas = rng.uniform(0.01, 5.0, n_users)
        m = int(rng.integers(1, 513))
        p_u = float(10 ** rng.uniform(-1.5, 2.0))
        n = int(rng.integers(n_users))
        a = approx_rate(betas, n, m, p_u, 1.0)
        b = asymptotic_rate_infinite_bits(betas, n, m, p_u)
        assert abs(a - b) <= 4 * math.ulp(max(a, b))


def test_infinite_power_saturation():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n_users = int(rng.integers(1, 7))
        betas = rng.uniform(0.05, 3.0, n_users)
        m = int(rng.integers(1, 257))
        alpha = float(rng.uniform(0.3, 0.999))
        n = int(rng.integers(n_users))
        limit = asymptotic_rate_infinite_power(betas, n, m, alpha)
        assert abs(approx_rate(betas, n, m, 1e9, alpha) - limit) < 1e-3
        # the ceiling is approached from below
        assert approx_rate(betas, n, m, 10.0, alpha) < approx_rate(betas, n, m, 100.0, alpha) < limit


def test_infinite_power_hand_cases():
    got = asymptotic_rate_infinite_power(np.ones(2), 0, 100, ALPHA_1BIT)
    assert got == pytest.approx(5.2568045317617464, rel=1e-12)
    # one perfect-ADC user: unbounded, signalled with inf rather than an error
    assert asymptotic_rate_infinite_power(np.ones(1), 0, 8, 1.0) == math.inf
    # alpha = 1 has no quantization penalty terms
    betas = np.array([2.0, 1.0, 0.5])
    got = asymptotic_rate_infinite_power(betas, 0, 32, 1.0)
    assert got == pytest.approx(math.log2(1 + 2.0 * 33 / 1.5), rel=1e-14)


def test_power_scaled_limit_values():
    assert power_scaled_limit(1.0, 100.0, 1.0) == pytest.approx(6.658211482751795, rel=1e-14)
    assert power_scaled_limit(1.0, 100.0, ALPHA_1BIT) == pytest.approx(6.014801602351361, rel=1e-14)
    with pytest.raises(ValueError):
        power_scaled_limit(0.0, 1.0, 1.0)


def test_power_scaling_convergence():
    e_u = 100.0
    limit = power_scaled_limit(1.0, e_u, ALPHA_1BIT)
    m = 2**20
    got = approx_rate(np.ones(10), 0, m, e_u / m, ALPHA_1BIT)
    assert abs(got - limit) < 0.01
    # monotone approach over a geometric antenna grid
    gaps = [
        limit - approx_rate(np.ones(10), 0, 2**k, e_u / 2**k, ALPHA_1BIT)
        for k in range(5, 21)
    ]
    assert all(a > b > 0 for a, b in zip(gaps, gaps[1:]))


def test_power_scaling_gap_at_m4096():
    # derived: the per-user closed-form rate at M=4096 sits ~5.0% under the limit
    e_u = 100.0
    rate = approx_rate(np.ones(10), 0, 4096, e_u / 4096, ALPHA_1BIT)
    limit = power_scaled_limit(1.0, e_u, ALPHA_1BIT)
    assert rate == pytest.approx(5.713041439849277, rel=1e-12)
    assert (limit - rate) / limit == pytest.approx(0.0502, abs=5e-4)


def test_approx_rate_monotone_in_m_and_alpha():
    rng = np.random.default_rng(12)
    for _ in range(200):
        n_users = int(rng.integers(1, 7))
        betas = rng.uniform(0.05, 3.0, n_users)
        p_u = float(10 ** rng.uniform(-1, 2))
        alpha = float(rng.uniform(0.2, 0.99))
        n = int(rng.integers(n_users))
        m = int(rng.integers(1, 300))
        assert approx_rate(betas, n, m + 1, p_u, alpha) > approx_rate(betas, n, m, p_u, alpha)
        assert approx_rate(betas, n, m, p_u, min(alpha + 0.01, 1.0)) > approx_rate(
            betas, n, m, p_u, alpha
        )


def test_receiver_power_and_energy_efficiency():
    assert receiver_power(100, 1, 1e-4, 0.02) == pytest.approx(0.04, rel=1e-15)
    assert receiver_power(100, 12, 1e-4, 0.02) == pytest.approx(40.98, rel=1e-15)
    eta = energy_efficiency(30.0, 1e6, 100, 1, 1e-4, 0.02)
    assert eta == pytest.approx(7.5e8, rel=1e-15)
    # linear in bandwidth
    assert energy_efficiency(30.0, 2e6, 100, 1, 1e-4, 0.02) == 2 * eta
    with pytest.raises(ValueError):
        energy_efficiency(30.0, 1e6, 100, math.inf, 1e-4, 0.02)
    with pytest.raises(ValueError):
        energy_efficiency(-1.0, 1e6, 100, 1, 1e-4, 0.02)


def test_evaluate_rate_point_combines_mc_and_approx():
    betas = np.array([1.0, 0.25])
    point = evaluate_rate_point(betas, 32, 10.0, ALPHA_1BIT, trials=500, seed=4)
    assert len(point.per_user_mc) == 2
    assert len(point.per_user_approx) == 2
    assert point.sum_rate_approx == pytest.approx(sum(point.per_user_approx), rel=1e-12)
    direct = ergodic_rate_mc(betas, 32, 10.0, ALPHA_1BIT, trials=500, seed=4)
    assert point.sum_rate_mc == direct.sum_rate_mc
    assert all(r >= 0 for r in point.per_user_approx)

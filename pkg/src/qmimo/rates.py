"""Uplink rate analysis for maximal-ratio combining behind low-resolution ADCs.

Covers the exact per-realization SINR of the quantized MRC output, Monte
Carlo estimation of the ergodic rate over fast fading, the closed-form
rate approximation, its three asymptotic limits (infinite resolution,
infinite transmit power, power scaled down with the antenna count), and
the receiver energy-efficiency metric.

The quantizer enters through the linear gain ``alpha`` in (0, 1]; callers
obtain it from `qmimo.quantizer.alpha_of_bits`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import FADING_STREAM, substream
from .channel import complex_normal
from .quantizer import INFINITE

MIN_TRIALS = 100

# target elements per fading batch; keeps peak memory near 100 MB
_BATCH_BUDGET = 1 << 21


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    trials: int


@dataclass(frozen=True)
class RatePoint:
    """Per-user and sum rates at one operating point.

    Monte Carlo and closed-form fields are both optional so estimation-only
    and analysis-only callers can share the type.
    """

    per_user_mc: tuple[MonteCarloEstimate, ...] | None = None
    per_user_approx: tuple[float, ...] | None = None
    sum_rate_mc: MonteCarloEstimate | None = None
    sum_rate_approx: float | None = None
    energy_efficiency: float | None = None


def _check_point_args(n_users: int, n: int, p_u: float, alpha: float) -> None:
    if not 0 <= n < n_users:
        raise ValueError(f"user index {n} out of range for {n_users} users")
    if p_u <= 0:
        raise ValueError("p_u must be positive")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")


def interference_variance(G: np.ndarray, n: int, p_u: float, alpha: float) -> float:
    """Conditional variance of the noise-plus-interference at MRC output n.

    p_u*a^2 * sum_{i != n} |g_n^H g_i|^2  +  a^2 * ||g_n||^2
        +  a*(1-a) * g_n^H diag(p_u G G^H + I) g_n

    The diagonal term is accumulated row-wise in O(M*N); no M x M matrix is
    ever materialized.
    """
    G = np.asarray(G, dtype=complex)
    _check_point_args(G.shape[1], n, p_u, alpha)
    g_n = G[:, n]
    inner = G.conj().T @ g_n  # all g_i^H g_n
    norm2 = inner[n].real
    cross = float(np.sum(np.abs(inner) ** 2) - norm2**2)
    row_power = 1.0 + p_u * np.sum(np.abs(G) ** 2, axis=1)
    quant = float(np.sum(np.abs(g_n) ** 2 * row_power))
    return p_u * alpha**2 * cross + alpha**2 * norm2 + alpha * (1.0 - alpha) * quant


def instantaneous_rate(G: np.ndarray, n: int, p_u: float, alpha: float) -> float:
    """log2(1 + SINR) of user n for one channel realization."""
    G = np.asarray(G, dtype=complex)
    _check_point_args(G.shape[1], n, p_u, alpha)
    norm2 = float(np.sum(np.abs(G[:, n]) ** 2))
    if norm2 == 0.0:
        return 0.0
    signal = p_u * alpha**2 * norm2**2
    return math.log2(1.0 + signal / interference_variance(G, n, p_u, alpha))


def _batch_trials(m_antennas: int, n_users: int) -> int:
    return int(np.clip(_BATCH_BUDGET // (m_antennas * n_users), 1, 512))


def _instantaneous_rates_batch(G: np.ndarray, p_u: float, alpha: float) -> np.ndarray:
    """Rates for all users of a (T, M, N) stack of realizations; returns (T, N)."""
    gram = np.matmul(G.conj().transpose(0, 2, 1), G)  # (T, N, N)
    norms = np.einsum("tii->ti", gram).real
    cross = np.sum(np.abs(gram) ** 2, axis=2) - norms**2
    power = np.abs(G) ** 2
    row_power = 1.0 + p_u * np.sum(power, axis=2)  # (T, M)
    quant = np.einsum("tmn,tm->tn", power, row_power)
    interference = p_u * alpha**2 * cross + alpha**2 * norms + alpha * (1.0 - alpha) * quant
    return np.log2(1.0 + p_u * alpha**2 * norms**2 / interference)


def ergodic_rate_mc(
    betas: np.ndarray,
    m_antennas: int,
    p_u: float,
    alpha: float,
    trials: int,
    seed: int,
) -> RatePoint:
    """Plain Monte Carlo estimate of the per-user and sum ergodic rates.

    Large-scale attenuations stay frozen; expectation is over fast fading
    only.  Fading substreams are keyed by (seed, antenna count, batch), so
    estimates do not depend on execution order, and runs that differ only
    in ``alpha`` reuse the same channels, which makes quantizer settings
    directly comparable.
    """
    betas = np.asarray(betas, dtype=float)
    if betas.ndim != 1 or betas.size < 1 or np.any(betas <= 0):
        raise ValueError("betas must be a non-empty positive vector")
    if trials < MIN_TRIALS:
        raise ValueError(f"trials must be >= {MIN_TRIALS}")
    _check_point_args(betas.size, 0, p_u, alpha)

    n_users = betas.size
    sqrt_betas = np.sqrt(betas)[None, None, :]
    batch = _batch_trials(m_antennas, n_users)
    rates = np.empty((trials, n_users))
    done = 0
    for index in range(-(-trials // batch)):
        size = min(batch, trials - done)
        rng = substream(seed, FADING_STREAM, m_antennas, index)
        H = complex_normal(rng, (size, m_antennas, n_users))
        rates[done : done + size] = _instantaneous_rates_batch(H * sqrt_betas, p_u, alpha)
        done += size

    def estimate(values: np.ndarray) -> MonteCarloEstimate:
        return MonteCarloEstimate(
            mean=float(values.mean()),
            stderr=float(values.std(ddof=1) / math.sqrt(trials)),
            trials=trials,
        )

    return RatePoint(
        per_user_mc=tuple(estimate(rates[:, n]) for n in range(n_users)),
        sum_rate_mc=estimate(rates.sum(axis=1)),
    )


def approx_rate(betas: np.ndarray, n: int, m_antennas: int, p_u: float, alpha: float) -> float:
    """Closed-form approximation of user n's ergodic uplink rate."""
    per_user = approx_rate_per_user(betas, m_antennas, p_u, alpha)
    _check_point_args(per_user.size, n, p_u, alpha)
    return float(per_user[n])


def approx_rate_per_user(
    betas: np.ndarray, m_antennas: int, p_u: float, alpha: float
) -> np.ndarray:
    """Closed-form rate approximation evaluated for every user at once."""
    betas = np.asarray(betas, dtype=float)
    _check_point_args(betas.size, 0, p_u, alpha)
    if m_antennas < 1:
        raise ValueError("m_antennas must be >= 1")
    total = betas.sum()
    interference = (
        p_u * alpha * (total - betas)
        + p_u * (1.0 - alpha) * (total + betas)
        + 1.0
    )
    return np.log2(1.0 + p_u * alpha * betas * (m_antennas + 1) / interference)


def asymptotic_rate_infinite_bits(
    betas: np.ndarray, n: int, m_antennas: int, p_u: float
) -> float:
    """Rate limit as the ADC resolution grows without bound."""
    betas = np.asarray(betas, dtype=float)
    _check_point_args(betas.size, n, p_u, 1.0)
    interference = p_u * (betas.sum() - betas[n]) + 1.0
    return math.log2(1.0 + p_u * betas[n] * (m_antennas + 1) / interference)


def asymptotic_rate_infinite_power(
    betas: np.ndarray, n: int, m_antennas: int, alpha: float
) -> float:
    """Rate ceiling as transmit power grows without bound.

    For a lone user with a perfect converter the ceiling is unbounded; that
    case returns ``math.inf`` rather than raising, since it is a legitimate
    limit value.
    """
    betas = np.asarray(betas, dtype=float)
    _check_point_args(betas.size, n, 1.0, alpha)
    denom = (betas.sum() - betas[n]) + 2.0 * (1.0 - alpha) * betas[n]
    if denom == 0.0:
        return math.inf
    return math.log2(1.0 + alpha * betas[n] * (m_antennas + 1) / denom)


def power_scaled_limit(beta_n: float, e_u: float, alpha: float) -> float:
    """Per-user rate limit when transmit power is scaled as E_u / M, M -> inf."""
    if beta_n <= 0 or e_u <= 0:
        raise ValueError("beta_n and e_u must be positive")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    return math.log2(1.0 + alpha * beta_n * e_u)


def receiver_power(m_antennas: int, bits: int | float, c0_watt: float, c1_watt: float) -> float:
    """ADC-dominated receiver power model c0 * M * 2^bits + c1."""
    if bits == INFINITE:
        raise ValueError(
            "receiver power diverges for infinite-resolution ADCs; bits must be finite"
        )
    if bits < 1 or int(bits) != bits:
        raise ValueError(f"bits must be a positive integer, got {bits!r}")
    if m_antennas < 1 or c0_watt <= 0 or c1_watt < 0:
        raise ValueError("invalid power-model parameters")
    return c0_watt * m_antennas * 2.0 ** int(bits) + c1_watt


def energy_efficiency(
    sum_rate: float,
    bandwidth_hz: float,
    m_antennas: int,
    bits: int | float,
    c0_watt: float,
    c1_watt: float,
) -> float:
    """Bits per Joule: bandwidth * sum rate / receiver power."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth_hz must be positive")
    if sum_rate < 0:
        raise ValueError("sum_rate must be non-negative")
    return bandwidth_hz * sum_rate / receiver_power(m_antennas, bits, c0_watt, c1_watt)


def evaluate_rate_point(
    betas: np.ndarray,
    m_antennas: int,
    p_u: float,
    alpha: float,
    trials: int,
    seed: int,
) -> RatePoint:
    """Monte Carlo estimates plus the closed-form approximations, together."""
    mc = ergodic_rate_mc(betas, m_antennas, p_u, alpha, trials, seed)
    per_user = approx_rate_per_user(betas, m_antennas, p_u, alpha)
    return RatePoint(
        per_user_mc=mc.per_user_mc,
        per_user_approx=tuple(float(r) for r in per_user),
        sum_rate_mc=mc.sum_rate_mc,
        sum_rate_approx=float(per_user.sum()),
    )

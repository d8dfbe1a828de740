"""Statistical self-checks: channel moment identities and quantizer behavior.

Each check compares a Monte Carlo estimate against its closed form and
reports a z-score (estimate minus expectation, in standard errors) or an
explicit bound.  Used by the `validate` CLI/endpoint and the acceptance
suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import FADING_STREAM, substream
from .channel import complex_normal
from .quantizer import design_lloyd_max, measure_aqnm_statistics

LOW_POWER_TRIALS = 1_000

Z_LIMIT = 3.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    estimate: float
    expected: float
    zscore: float | None
    bound: float | None
    passed: bool


def _z_check(name: str, estimate: float, expected: float, stderr: float) -> CheckResult:
    estimate, expected = float(estimate), float(expected)
    z = (estimate - expected) / stderr if stderr > 0 else math.inf
    return CheckResult(name, estimate, expected, z, None, abs(z) < Z_LIMIT)


def _bound_check(name: str, estimate: float, expected: float, bound: float) -> CheckResult:
    estimate, expected = float(estimate), float(expected)
    return CheckResult(name, estimate, expected, None, bound, abs(estimate - expected) <= bound)


def moment_checks(
    m_antennas: int,
    betas: np.ndarray,
    p_u: float,
    trials: int,
    seed: int,
) -> list[CheckResult]:
    """Monte Carlo vs closed-form channel moments for one antenna count.

    Covers the mean and variance of ||g_n||^2, the mean of ||g_n||^4 and of
    |g_n^H g_i|^2 for i != n, and the quantization-noise quadratic form
    g_n^H diag(p_u G G^H + I) g_n.
    """
    betas = np.asarray(betas, dtype=float)
    n_users = betas.size
    if n_users < 2:
        raise ValueError("moment checks need at least two users")
    rng = substream(seed, FADING_STREAM, m_antennas)

    norm2 = np.empty(trials)
    norm4 = np.empty(trials)
    cross = np.empty(trials)
    quad = np.empty(trials)
    batch = max(1, (1 << 20) // (m_antennas * n_users))
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        G = complex_normal(rng, (size, m_antennas, n_users)) * np.sqrt(betas)[None, None, :]
        g0 = G[:, :, 0]
        sl = slice(done, done + size)
        norm2[sl] = np.sum(np.abs(g0) ** 2, axis=1)
        norm4[sl] = norm2[sl] ** 2
        cross[sl] = np.abs(np.einsum("tm,tm->t", g0.conj(), G[:, :, 1])) ** 2
        row_power = 1.0 + p_u * np.sum(np.abs(G) ** 2, axis=2)
        quad[sl] = np.einsum("tm,tm->t", np.abs(g0) ** 2, row_power)
        done += size

    b0, b1 = betas[0], betas[1]
    total = betas.sum()
    sq = math.sqrt(trials)
    tag = f"M={m_antennas}"

    results = [
        _z_check(
            f"mean ||g_n||^2 = beta_n*M [{tag}]",
            float(norm2.mean()), b0 * m_antennas, float(norm2.std(ddof=1)) / sq,
        ),
        _z_check(
            f"mean ||g_n||^4 = beta_n^2*(M^2+M) [{tag}]",
            float(norm4.mean()), b0**2 * (m_antennas**2 + m_antennas),
            float(norm4.std(ddof=1)) / sq,
        ),
        _z_check(
            f"mean |g_n^H g_i|^2 = beta_n*beta_i*M [{tag}]",
            float(cross.mean()), b0 * b1 * m_antennas, float(cross.std(ddof=1)) / sq,
        ),
        _z_check(
            f"mean g_n^H diag(p_u G G^H + I) g_n [{tag}]",
            float(quad.mean()),
            m_antennas * (b0 + p_u * b0 * total + p_u * b0**2),
            float(quad.std(ddof=1)) / sq,
        ),
    ]

    # variance of ||g_n||^2: large-sample stderr of a sample variance
    sample_var = float(norm2.var(ddof=1))
    centered = norm2 - norm2.mean()
    fourth = float(np.mean(centered**4))
    var_stderr = math.sqrt(max(fourth - sample_var**2, 0.0) / trials)
    results.insert(
        1,
        _z_check(
            f"var ||g_n||^2 = beta_n^2*M [{tag}]",
            sample_var, b0**2 * m_antennas, var_stderr,
        ),
    )
    return results


def aqnm_checks(num_samples: int, seed: int) -> list[CheckResult]:
    """Empirical distortion and input-correlation checks for b = 1..3."""
    results = []
    corr_bound = Z_LIMIT / math.sqrt(num_samples)
    for bits in (1, 2, 3):
        spec = design_lloyd_max(bits)
        stats = measure_aqnm_statistics(spec, num_samples, seed + bits)
        results.append(
            _bound_check(
                f"empirical rho matches design (b={bits})",
                stats.empirical_rho, spec.rho, 0.01 * spec.rho,
            )
        )
        results.append(
            _bound_check(
                f"|corr(n_q, y)| below 3/sqrt(samples) (b={bits})",
                stats.correlation_nq_y, 0.0, corr_bound,
            )
        )
    return results


def run_validation(
    trials: int = 10_000,
    seed: int = 7,
    aqnm_samples: int = 1_000_000,
) -> list[CheckResult]:
    """Full self-check suite: moment oracles at M in {8, 64} plus AQNM checks."""
    if trials < 100:
        raise ValueError("trials must be >= 100")
    if aqnm_samples < 10_000:
        raise ValueError("aqnm_samples must be >= 10^4")
    rng = substream(seed, 0)
    betas = rng.uniform(0.05, 2.0, 6)
    results = []
    for m_antennas in (8, 64):
        results.extend(moment_checks(m_antennas, betas, p_u=10.0, trials=trials, seed=seed))
    results.extend(aqnm_checks(aqnm_samples, seed))
    return results

"""MMSE (Lloyd-Max) scalar quantizers for Gaussian input.

Designs the per-component quantizer used by a low-resolution ADC front end,
exposes its normalized distortion ``rho`` and the matching linear gain
``alpha = 1 - rho``, and applies true quantization to complex sample streams
so the linear-gain-plus-noise model can be validated empirically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from ._rng import AQNM_STREAM, substream

#: Sentinel for an infinite-resolution converter (no quantization).
INFINITE = math.inf

#: Published distortion constants for the Gaussian MMSE quantizer, b = 1..5.
RHO_TABLE = {1: 0.3634, 2: 0.1175, 3: 0.03454, 4: 0.009497, 5: 0.002499}

#: Modes for `rho_of_bits`.
TABLE_THEN_FORMULA = "table"
LLOYD_MAX = "lloyd-max"

MAX_DESIGN_BITS = 16
DEFAULT_TOLERANCE = 1e-12
DEFAULT_MAX_ITERATIONS = 10_000

_SQRT_2PI = math.sqrt(2.0 * math.pi)


class ConvergenceError(RuntimeError):
    """Lloyd-Max iteration did not reach tolerance; carries the last iterate."""

    def __init__(self, message: str, last_spec: "QuantizerSpec"):
        super().__init__(message)
        self.last_spec = last_spec


@dataclass(frozen=True)
class QuantizerSpec:
    """Symmetric scalar quantizer for a unit-variance Gaussian input.

    ``bits`` is a positive integer, or `INFINITE` for a pass-through
    quantizer (empty thresholds/levels, rho exactly 0, alpha exactly 1).
    """

    bits: int | float
    thresholds: np.ndarray
    levels: np.ndarray
    rho: float
    alpha: float

    def __post_init__(self):
        thresholds = np.asarray(self.thresholds, dtype=float)
        levels = np.asarray(self.levels, dtype=float)
        thresholds.setflags(write=False)
        levels.setflags(write=False)
        object.__setattr__(self, "thresholds", thresholds)
        object.__setattr__(self, "levels", levels)

        if self.bits == INFINITE:
            if levels.size or thresholds.size:
                raise ValueError("infinite-resolution spec must have empty levels/thresholds")
            if self.rho != 0.0 or self.alpha != 1.0:
                raise ValueError("infinite-resolution spec requires rho=0, alpha=1")
            return

        bits = self.bits
        if not isinstance(bits, (int, np.integer)) or bits < 1:
            raise ValueError(f"bits must be a positive integer or INFINITE, got {bits!r}")
        k = 2**bits
        if levels.shape != (k,) or thresholds.shape != (k - 1,):
            raise ValueError(f"need {k} levels and {k - 1} thresholds for bits={bits}")
        if np.any(np.diff(levels) <= 0) or (k > 2 and np.any(np.diff(thresholds) <= 0)):
            raise ValueError("levels and thresholds must be strictly ascending")
        if np.any(levels[:-1] >= thresholds) or np.any(thresholds >= levels[1:]):
            raise ValueError("thresholds must interleave levels")
        if not np.allclose(levels, -levels[::-1], rtol=0, atol=1e-12):
            raise ValueError("levels must be odd-symmetric about zero")
        if not (0.0 <= self.rho < 1.0):
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if self.alpha != 1.0 - self.rho:
            raise ValueError("alpha must equal 1 - rho exactly")


def _phi(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * x * x) / _SQRT_2PI


def gaussian_centroids(thresholds: np.ndarray) -> np.ndarray:
    """Conditional means of a standard Gaussian over the cells cut by ``thresholds``.

    Cells are (-inf, t_0], (t_0, t_1], ..., (t_{K-2}, inf); returns K centroids.
    """
    t = np.asarray(thresholds, dtype=float)
    pdf = np.concatenate(([0.0], _phi(t), [0.0]))
    cdf = np.concatenate(([0.0], ndtr(t), [1.0]))
    mass = np.diff(cdf)
    return (pdf[:-1] - pdf[1:]) / mass


def quantizer_distortion(levels: np.ndarray, thresholds: np.ndarray) -> float:
    """Exact E[(X - Q(X))^2] for standard Gaussian X, any levels/thresholds.

    Uses the closed-form cell moments of the Gaussian density, so no
    numeric integration is involved.
    """
    levels = np.asarray(levels, dtype=float)
    t = np.asarray(thresholds, dtype=float)
    pdf = np.concatenate(([0.0], _phi(t), [0.0]))
    cdf = np.concatenate(([0.0], ndtr(t), [1.0]))
    tpdf = np.concatenate(([0.0], t * _phi(t), [0.0]))
    mass = np.diff(cdf)
    # per cell: int x^2 phi = mass + a*phi(a) - b*phi(b);  int x phi = phi(a) - phi(b)
    ex2 = mass + tpdf[:-1] - tpdf[1:]
    ex1 = pdf[:-1] - pdf[1:]
    return float(np.sum(ex2 - 2.0 * levels * ex1 + levels**2 * mass))


def _midpoints(levels: np.ndarray) -> np.ndarray:
    return 0.5 * (levels[:-1] + levels[1:])


def _validate_bits(bits: int | float, *, allow_infinite: bool) -> int | float:
    if bits == INFINITE:
        if not allow_infinite:
            raise ValueError("bits must be a finite positive integer here")
        return INFINITE
    if isinstance(bits, float) and bits.is_integer():
        bits = int(bits)
    if not isinstance(bits, (int, np.integer)) or isinstance(bits, bool) or bits < 1:
        raise ValueError(f"bits must be a positive integer (or INFINITE), got {bits!r}")
    return int(bits)


def infinite_resolution_spec() -> QuantizerSpec:
    """Pass-through spec: rho = 0, alpha = 1."""
    return QuantizerSpec(INFINITE, np.empty(0), np.empty(0), 0.0, 1.0)


def design_lloyd_max(
    bits: int,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> QuantizerSpec:
    """Design the MMSE scalar quantizer for a standard Gaussian source.

    Alternates the centroid condition (levels are conditional cell means)
    and nearest-neighbor condition (thresholds are midpoints of adjacent
    levels) until the relative distortion change drops below ``tolerance``.
    Centroids and distortion are evaluated in closed form from the Gaussian
    pdf/cdf.

    Raises `ConvergenceError` (with the last iterate attached) if the fixed
    point is not reached within ``max_iterations``; the iteration count to
    reach a given tolerance grows roughly like 4**bits, so large ``bits``
    need a larger budget than the default.
    """
    bits = _validate_bits(bits, allow_infinite=False)
    if bits > MAX_DESIGN_BITS:
        raise ValueError(f"bits must be <= {MAX_DESIGN_BITS}, got {bits}")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")

    k = 2**bits
    # uniform-probability start: levels at the quantiles of cell midpoints
    levels = ndtri((np.arange(k) + 0.5) / k)
    thresholds = _midpoints(levels)
    distortion = quantizer_distortion(levels, thresholds)

    # the per-iteration change is noisy right at the tolerance, so require
    # a few consecutive sub-tolerance observations before declaring a fixed
    # point
    streak = 0
    for _ in range(max_iterations):
        # re-impose exact odd symmetry each step; Lloyd preserves it only up
        # to rounding, and the drift would otherwise outlive convergence
        levels = gaussian_centroids(thresholds)
        levels = 0.5 * (levels - levels[::-1])
        thresholds = _midpoints(levels)
        new_distortion = quantizer_distortion(levels, thresholds)
        streak = streak + 1 if abs(distortion - new_distortion) < tolerance * distortion else 0
        distortion = new_distortion
        if streak >= 3:
            break
    else:
        spec = QuantizerSpec(bits, thresholds, levels, distortion, 1.0 - distortion)
        raise ConvergenceError(
            f"Lloyd-Max did not converge to relative tolerance {tolerance:g} "
            f"within {max_iterations} iterations for bits={bits} "
            f"(last rho={distortion:.6g}); raise max_iterations",
            spec,
        )
    return QuantizerSpec(bits, thresholds, levels, distortion, 1.0 - distortion)


def rho_of_bits(bits: int | float, mode: str = TABLE_THEN_FORMULA) -> float:
    """Normalized quantizer distortion for a given ADC bit depth.

    ``TABLE_THEN_FORMULA`` uses the published constants for b <= 5 and the
    high-resolution approximation (pi*sqrt(3)/2) * 2**(-2b) above that;
    ``LLOYD_MAX`` designs the quantizer and returns its exact distortion.
    INFINITE bits give 0 in either mode.
    """
    bits = _validate_bits(bits, allow_infinite=True)
    if bits == INFINITE:
        return 0.0
    if mode == TABLE_THEN_FORMULA:
        if bits <= 5:
            return RHO_TABLE[bits]
        return (math.pi * math.sqrt(3.0) / 2.0) * 2.0 ** (-2 * bits)
    if mode == LLOYD_MAX:
        return design_lloyd_max(bits).rho
    raise ValueError(f"mode must be {TABLE_THEN_FORMULA!r} or {LLOYD_MAX!r}, got {mode!r}")


def alpha_of_bits(bits: int | float, mode: str = TABLE_THEN_FORMULA) -> float:
    """Linear gain 1 - rho of the quantizer for a given bit depth."""
    return 1.0 - rho_of_bits(bits, mode)


def quantize_stream(
    samples: np.ndarray, spec: QuantizerSpec, input_variance: float
) -> np.ndarray:
    """Quantize a complex sample stream component-wise.

    Each of the real and imaginary parts carries half of ``input_variance``;
    it is scaled to unit variance (the automatic-gain-control step), mapped
    to the nearest reconstruction level, and scaled back.  A component lying
    exactly on a threshold goes to the upper cell.
    """
    if input_variance <= 0:
        raise ValueError("input_variance must be positive")
    samples = np.asarray(samples, dtype=complex)
    if not np.all(np.isfinite(samples.real)) or not np.all(np.isfinite(samples.imag)):
        raise ValueError("samples must be finite")
    if spec.bits == INFINITE:
        return samples.copy()
    scale = math.sqrt(input_variance / 2.0)

    def q(component: np.ndarray) -> np.ndarray:
        cells = np.digitize(component / scale, spec.thresholds)
        return spec.levels[cells] * scale

    return q(samples.real) + 1j * q(samples.imag)


@dataclass(frozen=True)
class AqnmStats:
    """Empirical distortion and residual input correlation of a quantizer."""

    empirical_rho: float
    correlation_nq_y: float


def measure_aqnm_statistics(
    spec: QuantizerSpec, num_samples: int, seed: int
) -> AqnmStats:
    """Empirically check the linear-gain-plus-uncorrelated-noise model.

    Draws standard complex Gaussian samples y, forms n_q = Q(y) - alpha*y,
    and returns the measured distortion E|y - Q(y)|^2 / E|y|^2 together with
    the magnitude of the normalized sample correlation between n_q and y.
    """
    if num_samples < 10_000:
        raise ValueError("num_samples must be at least 10^4 for stable statistics")
    rng = substream(seed, AQNM_STREAM)
    y = (rng.standard_normal(num_samples) + 1j * rng.standard_normal(num_samples)) / math.sqrt(2.0)
    quantized = quantize_stream(y, spec, input_variance=1.0)

    err_power = float(np.mean(np.abs(y - quantized) ** 2))
    y_power = float(np.mean(np.abs(y) ** 2))
    noise = quantized - spec.alpha * y
    denom = math.sqrt(float(np.sum(np.abs(noise) ** 2)) * float(np.sum(np.abs(y) ** 2)))
    if denom == 0.0:
        correlation = 0.0
    else:
        correlation = abs(complex(np.sum(noise * np.conj(y)))) / denom
    return AqnmStats(empirical_rho=err_power / y_power, correlation_nq_y=correlation)

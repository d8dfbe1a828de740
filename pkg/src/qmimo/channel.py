"""User drops and channel realizations for a single hexagonal cell.

Large-scale state (distance, log-normal shadowing, attenuation beta) is
frozen per user drop; fast fading is redrawn per realization as i.i.d.
circularly-symmetric complex Gaussian entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import DROP_STREAM, FADING_STREAM, substream
from .quantizer import QuantizerSpec, quantize_stream

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class CellModel:
    """Hexagonal cell geometry and the large-scale fading model constants."""

    cell_radius_m: float = 1000.0
    exclusion_radius_m: float = 100.0
    pathloss_exponent: float = 3.8
    shadow_std_db: float = 8.0

    def __post_init__(self):
        if not 0 < self.exclusion_radius_m < self.cell_radius_m:
            raise ValueError("need 0 < exclusion_radius_m < cell_radius_m")
        if self.pathloss_exponent <= 2:
            raise ValueError("pathloss_exponent must exceed 2")
        if self.shadow_std_db < 0:
            raise ValueError("shadow_std_db must be non-negative")


@dataclass(frozen=True)
class UserDrop:
    """Per-user large-scale state, fixed for the lifetime of the drop."""

    distance_m: float
    shadow_linear: float
    beta: float


@dataclass(frozen=True)
class ChannelRealization:
    """Fast-fading matrix H and the composed channel G (column n scaled by sqrt(beta_n))."""

    H: np.ndarray
    betas: np.ndarray
    G: np.ndarray


@dataclass(frozen=True)
class LinkSample:
    """One pass through the quantized uplink chain for a fixed channel.

    x: unit-variance user symbols; n: AWGN at the array; y: received vector;
    y_q: quantizer output; n_q: y_q - alpha*y, the model's additive noise;
    r: matched-combining output G^H y_q.
    """

    x: np.ndarray
    n: np.ndarray
    y: np.ndarray
    y_q: np.ndarray
    n_q: np.ndarray
    r: np.ndarray


def in_hexagon(x: np.ndarray, y: np.ndarray, radius: float) -> np.ndarray:
    """Membership test for a flat-top hexagon with circumradius ``radius``.

    Three half-plane pairs; boundary points count as inside.
    """
    x = np.abs(np.asarray(x, dtype=float))
    y = np.abs(np.asarray(y, dtype=float))
    return (y <= _SQRT3 * radius / 2.0) & (_SQRT3 * x + y <= _SQRT3 * radius)


def large_scale_attenuation(cell: CellModel, distance_m: float, shadow_linear: float) -> float:
    """beta = z / (r / r_h)^v for a user at distance r with shadowing z."""
    ratio = distance_m / cell.exclusion_radius_m
    return shadow_linear / ratio**cell.pathloss_exponent


def drop_users(cell: CellModel, num_users: int, seed: int) -> list[UserDrop]:
    """Drop users uniformly over the hexagonal cell minus the exclusion disk.

    Positions come from rejection sampling of the hexagon's bounding box;
    shadowing is log-normal, z = 10^(sigma * xi / 10) with xi standard normal.
    """
    if num_users < 1:
        raise ValueError("num_users must be >= 1")
    rng = substream(seed, DROP_STREAM)
    radius = cell.cell_radius_m
    distances = np.empty(num_users)
    found = 0
    while found < num_users:
        batch = max(2 * (num_users - found), 16)
        x = rng.uniform(-radius, radius, batch)
        y = rng.uniform(-_SQRT3 * radius / 2.0, _SQRT3 * radius / 2.0, batch)
        r = np.hypot(x, y)
        keep = r[in_hexagon(x, y, radius) & (r >= cell.exclusion_radius_m)]
        take = min(keep.size, num_users - found)
        distances[found : found + take] = keep[:take]
        found += take
    shadows = 10.0 ** (cell.shadow_std_db * rng.standard_normal(num_users) / 10.0)
    return [
        UserDrop(
            distance_m=float(r),
            shadow_linear=float(z),
            beta=large_scale_attenuation(cell, float(r), float(z)),
        )
        for r, z in zip(distances, shadows)
    ]


def betas_of(drops: list[UserDrop]) -> np.ndarray:
    return np.array([d.beta for d in drops])


def complex_normal(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """i.i.d. CN(0,1) entries: real and imaginary parts each N(0, 1/2)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def sample_fast_fading(m_antennas: int, n_users: int, seed: int) -> np.ndarray:
    """One M x N fast-fading matrix with unit-variance complex Gaussian entries."""
    if m_antennas < 1 or n_users < 1:
        raise ValueError("matrix dimensions must be >= 1")
    rng = substream(seed, FADING_STREAM)
    return complex_normal(rng, (m_antennas, n_users))


def compose_channel(H: np.ndarray, betas: np.ndarray) -> ChannelRealization:
    """Scale column n of the fast-fading matrix by sqrt(beta_n)."""
    H = np.asarray(H, dtype=complex)
    betas = np.asarray(betas, dtype=float)
    if H.ndim != 2 or betas.ndim != 1 or H.shape[1] != betas.shape[0]:
        raise ValueError(
            f"shape mismatch: H is {H.shape}, betas has length {betas.shape}"
        )
    if np.any(betas <= 0):
        raise ValueError("betas must be positive")
    G = H * np.sqrt(betas)[None, :]
    return ChannelRealization(H=H, betas=betas, G=G)


def drops_to_rows(drops: list[UserDrop]) -> list[dict]:
    """CSV-ready rows (user_index, r_n_m, z_n, beta_n) for reproducibility audits."""
    return [
        {"user_index": i, "r_n_m": d.distance_m, "z_n": d.shadow_linear, "beta_n": d.beta}
        for i, d in enumerate(drops)
    ]


def drops_csv(drops: list[UserDrop]) -> str:
    """Serialize a drop as CSV for reproducibility audits."""
    lines = ["user_index,r_n_m,z_n,beta_n"]
    for i, d in enumerate(drops):
        lines.append(f"{i},{d.distance_m:.10g},{d.shadow_linear:.10g},{d.beta:.10g}")
    return "\n".join(lines) + "\n"


def sample_link(G: np.ndarray, p_u: float, quantizer_spec: QuantizerSpec, seed: int) -> LinkSample:
    """Push one symbol vector through the true quantized receive chain.

    Each antenna's sample is quantized with gain control matched to its own
    theoretical variance p_u * sum_i |g_mi|^2 + 1.
    """
    G = np.asarray(G, dtype=complex)
    if p_u <= 0:
        raise ValueError("p_u must be positive")
    m_antennas, n_users = G.shape
    rng = substream(seed, FADING_STREAM, m_antennas, n_users)
    x = complex_normal(rng, (n_users,))
    noise = complex_normal(rng, (m_antennas,))
    y = math.sqrt(p_u) * G @ x + noise
    # normalize each antenna to its theoretical variance, quantize at unit
    # scale, then undo; equivalent to per-antenna variance matching
    gain = np.sqrt((p_u * np.sum(np.abs(G) ** 2, axis=1) + 1.0) / 2.0)
    y_q = quantize_stream(y / gain, quantizer_spec, input_variance=2.0) * gain
    n_q = y_q - quantizer_spec.alpha * y
    return LinkSample(x=x, n=noise, y=y, y_q=y_q, n_q=n_q, r=G.conj().T @ y_q)

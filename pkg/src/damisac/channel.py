"""Multipath communication and radar round-trip channel models.

Discrete-time baseband models for a MISO link with an M-element uniform
linear array: a frequency-selective multipath channel with per-path integer
symbol delays, and a single-target radar round-trip channel with delay,
Doppler and a radar-equation gain. Delays are kept on the symbol-rate grid
(one bin per 1/B), and samples before the start of a block are zero
(zero-prefix convention).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, InfeasibleError
from .units import C_LIGHT


def complex_normal(rng: np.random.Generator, shape=(), variance: float = 1.0):
    """Circularly symmetric complex Gaussian samples CN(0, variance)."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def steering_vector(theta: float, num_antennas: int, spacing_ratio: float = 0.5) -> np.ndarray:
    """Transmit steering vector of a uniform linear array.

    Element m carries phase exp(j*2*pi*(d/lambda)*m*sin(theta)), m = 0..M-1,
    so the squared norm is exactly M.

    Args:
        theta: Angle of departure in radians, measured from broadside.
        num_antennas: Number of array elements M.
        spacing_ratio: Element spacing over wavelength (default half-wavelength).

    Returns:
        Complex array of shape (M,).
    """
    if not np.isfinite(theta):
        raise ValueError("steering angle must be finite")
    if num_antennas < 1:
        raise ValueError("num_antennas must be >= 1")
    m = np.arange(num_antennas)
    return np.exp(2j * np.pi * spacing_ratio * m * np.sin(theta))


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical-layer scenario: array size, timing and power budget.

    Timing is symbol-rate based: the symbol period is 1/bandwidth, one
    transmission block spans the channel coherence time (N_c symbols), and
    the first guard_length symbols of each block absorb the maximum channel
    delay spread, leaving N = N_c - guard_length data symbols.
    """

    num_antennas: int
    bandwidth_hz: float
    carrier_frequency_hz: float
    coherence_time_s: float
    guard_length: int            # N_p, in symbols
    transmit_power_w: float
    noise_power_w: float

    def __post_init__(self):
        if self.num_antennas < 1:
            raise ConfigError("num_antennas must be >= 1")
        for name in ("bandwidth_hz", "carrier_frequency_hz", "coherence_time_s",
                     "transmit_power_w", "noise_power_w"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.guard_length < 0:
            raise ConfigError("guard_length must be >= 0")
        n_c = self.coherence_time_s * self.bandwidth_hz
        if abs(n_c - round(n_c)) > 1e-6 * max(1.0, n_c):
            raise ConfigError("coherence_time_s must be an integer number of symbol periods")
        if round(n_c) - self.guard_length < 1:
            raise ConfigError("guard_length leaves no data symbols in the block")

    @property
    def symbol_duration_s(self) -> float:
        return 1.0 / self.bandwidth_hz

    @property
    def block_length(self) -> int:
        """Total symbols per coherence block, N_c."""
        return int(round(self.coherence_time_s * self.bandwidth_hz))

    @property
    def data_length(self) -> int:
        """Per-block data symbols N = N_c - N_p."""
        return self.block_length - self.guard_length

    @property
    def wavelength_m(self) -> float:
        return C_LIGHT / self.carrier_frequency_hz

    @property
    def guard_time_s(self) -> float:
        return self.guard_length * self.symbol_duration_s

    @classmethod
    def from_timing(cls, bandwidth_hz: float, carrier_frequency_hz: float,
                    coherence_time_s: float, guard_time_s: float,
                    num_antennas: int, transmit_power_w: float,
                    noise_power_w: float) -> "ScenarioConfig":
        """Build a scenario with the guard given as a duration.

        The guard must be an integer number of symbol periods; anything else
        is rejected rather than silently rounded.
        """
        n_p = guard_time_s * bandwidth_hz
        if abs(n_p - round(n_p)) > 1e-6 * max(1.0, n_p):
            raise ConfigError("guard_time_s is not an integer number of symbol periods")
        return cls(num_antennas=num_antennas, bandwidth_hz=bandwidth_hz,
                   carrier_frequency_hz=carrier_frequency_hz,
                   coherence_time_s=coherence_time_s,
                   guard_length=int(round(n_p)),
                   transmit_power_w=transmit_power_w,
                   noise_power_w=noise_power_w)

    @classmethod
    def mmwave_default(cls, **overrides) -> "ScenarioConfig":
        """Default 28 GHz / 100 MHz scenario.

        64 antennas, 1 ms coherence blocks, 2 us guard (200 symbols),
        30 dBm transmit power, -169 dBm/Hz noise density integrated over
        the bandwidth.
        """
        base = dict(num_antennas=64, bandwidth_hz=100e6,
                    carrier_frequency_hz=28e9, coherence_time_s=1e-3,
                    guard_length=200, transmit_power_w=1.0,
                    noise_power_w=10 ** ((-169.0 - 30.0) / 10.0) * 100e6)
        base.update(overrides)
        return cls(**base)


@dataclass(frozen=True)
class ChannelGenConfig:
    """Random multipath generation parameters.

    Each path is a cluster of up to max_subpaths plane waves with angles of
    departure drawn uniformly from aod_sector (radians).
    """

    num_paths: int
    max_subpaths: int = 3
    aod_sector: tuple = (-np.pi / 3.0, np.pi / 3.0)

    def __post_init__(self):
        if self.num_paths < 1:
            raise ConfigError("num_paths must be >= 1")
        if self.max_subpaths < 1:
            raise ConfigError("max_subpaths must be >= 1")
        lo, hi = self.aod_sector
        if not (-np.pi / 2 <= lo < hi <= np.pi / 2):
            raise ConfigError("aod_sector must be an increasing pair within [-pi/2, pi/2]")


@dataclass
class MultipathChannel:
    """Frequency-selective MISO channel: L path vectors with integer delays.

    path_vectors has shape (L, M) with row l the spatial response h_l of the
    path delayed by path_delays[l] symbols. Delays are pairwise distinct and
    non-negative; paths generated with equal binned delay must be merged by
    summing their vectors before construction.
    """

    path_vectors: np.ndarray
    path_delays: np.ndarray
    metadata: Optional[dict] = field(default=None, repr=False)

    def __post_init__(self):
        self.path_vectors = np.asarray(self.path_vectors, dtype=complex)
        self.path_delays = np.asarray(self.path_delays, dtype=int)
        if self.path_vectors.ndim != 2:
            raise ValueError("path_vectors must be a 2-D (L, M) array")
        if self.path_delays.shape != (self.path_vectors.shape[0],):
            raise ValueError("path_delays length must match the number of path vectors")
        if self.path_vectors.shape[0] < 1:
            raise ValueError("at least one path is required")
        if np.any(self.path_delays < 0):
            raise ValueError("path delays must be non-negative")
        if len(np.unique(self.path_delays)) != len(self.path_delays):
            raise ValueError("path delays must be pairwise distinct (merge equal-delay paths)")

    @property
    def num_paths(self) -> int:
        return self.path_vectors.shape[0]

    @property
    def num_antennas(self) -> int:
        return self.path_vectors.shape[1]

    @property
    def max_delay(self) -> int:
        return int(self.path_delays.max())

    @classmethod
    def from_directions(cls, directions, delays, num_antennas: int,
                        coefficients=None, spacing_ratio: float = 0.5) -> "MultipathChannel":
        """Deterministic channel with one plane wave per path.

        Used for fixed-geometry studies; coefficients default to 1.
        """
        directions = np.atleast_1d(np.asarray(directions, dtype=float))
        if coefficients is None:
            coefficients = np.ones(directions.shape[0], dtype=complex)
        vecs = np.stack([c * steering_vector(th, num_antennas, spacing_ratio)
                         for c, th in zip(coefficients, directions)])
        return cls(vecs, np.asarray(delays, dtype=int),
                   metadata={"directions_rad": directions.tolist()})


def merge_binned_paths(path_vectors, path_delays):
    """Sum path vectors that share a delay bin; returns (vectors, delays)."""
    path_vectors = np.asarray(path_vectors, dtype=complex)
    path_delays = np.asarray(path_delays, dtype=int)
    uniq = np.unique(path_delays)
    merged = np.stack([path_vectors[path_delays == d].sum(axis=0) for d in uniq])
    return merged, uniq


def generate_multipath_channel(scenario: ScenarioConfig, gen: ChannelGenConfig,
                               rng: np.random.Generator) -> MultipathChannel:
    """Draw a random clustered multipath channel.

    Path l is h_l = beta_l * sum_i nu_li * a(theta_li) with mu_l sub-paths,
    mu_l uniform on {1..max_subpaths}, AoDs uniform on the configured sector,
    nu_li ~ CN(0, 1/mu_l) and beta_l ~ CN(0, 1/L), so the expected total
    channel energy sum_l E||h_l||^2 = M regardless of L. Delays are distinct
    integers uniform on [0, guard_length], always including 0 for the first
    arrival.

    Args:
        scenario: Array size and guard length.
        gen: Path/sub-path counts and AoD sector.
        rng: Random generator; the draw is fully determined by its state.

    Returns:
        MultipathChannel with generation metadata attached.
    """
    num_paths = gen.num_paths
    if num_paths > scenario.guard_length + 1:
        raise ValueError(
            f"cannot draw {num_paths} distinct delays in [0, {scenario.guard_length}]")
    if num_paths == 1:
        delays = np.array([0])
    else:
        rest = rng.choice(np.arange(1, scenario.guard_length + 1),
                          size=num_paths - 1, replace=False)
        delays = np.concatenate([[0], np.sort(rest)])

    m = scenario.num_antennas
    lo, hi = gen.aod_sector
    vectors = np.zeros((num_paths, m), dtype=complex)
    meta_paths = []
    for l in range(num_paths):
        mu = int(rng.integers(1, gen.max_subpaths + 1))
        angles = rng.uniform(lo, hi, size=mu)
        nu = complex_normal(rng, (mu,), variance=1.0 / mu)
        beta = complex_normal(rng, (), variance=1.0 / num_paths)
        cluster = np.zeros(m, dtype=complex)
        for i in range(mu):
            cluster += nu[i] * steering_vector(angles[i], m)
        vectors[l] = beta * cluster
        meta_paths.append({"num_subpaths": mu,
                           "aod_rad": angles.tolist(),
                           "gain": [float(beta.real), float(beta.imag)]})
    return MultipathChannel(vectors, delays, metadata={"paths": meta_paths})


@dataclass
class RadarTarget:
    """Point target for the round-trip channel.

    gain is the complex round-trip amplitude alpha (radar equation magnitude,
    uniform phase when drawn from geometry), direction the angle in radians,
    delay_symbols the round-trip delay on the symbol grid, doppler_hz the
    Doppler shift 2*v/lambda.
    """

    gain: complex
    direction: float
    delay_symbols: int
    doppler_hz: float
    delay_s: Optional[float] = None
    radial_velocity_m_s: Optional[float] = None
    range_m: Optional[float] = None
    rcs_m2: Optional[float] = None

    def __post_init__(self):
        if self.delay_symbols < 0:
            raise ValueError("delay_symbols must be >= 0")

    @classmethod
    def from_geometry(cls, scenario: ScenarioConfig, range_m: float, rcs_m2: float,
                      direction: float, radial_velocity_m_s: float,
                      rng: Optional[np.random.Generator] = None) -> "RadarTarget":
        """Target from range/RCS/velocity; phase drawn uniform if rng given."""
        if range_m <= 0 or rcs_m2 <= 0:
            raise ValueError("range_m and rcs_m2 must be positive")
        lam = scenario.wavelength_m
        tau = 2.0 * range_m / C_LIGHT
        magnitude = np.sqrt(radar_round_trip_gain(range_m, lam, rcs_m2))
        phase = rng.uniform(0.0, 2.0 * np.pi) if rng is not None else 0.0
        return cls(gain=magnitude * np.exp(1j * phase),
                   direction=direction,
                   delay_symbols=int(round(tau * scenario.bandwidth_hz)),
                   doppler_hz=2.0 * radial_velocity_m_s / lam,
                   delay_s=tau,
                   radial_velocity_m_s=radial_velocity_m_s,
                   range_m=range_m, rcs_m2=rcs_m2)


def radar_round_trip_gain(range_m: float, wavelength_m: float, rcs_m2: float) -> float:
    """Round-trip power gain |alpha|^2 = lambda^2 * rcs / ((4 pi)^3 R^4)."""
    if range_m <= 0:
        raise ValueError("range_m must be positive")
    return wavelength_m ** 2 * rcs_m2 / ((4.0 * np.pi) ** 3 * range_m ** 4)


def _shift_zero_prefix(x: np.ndarray, k: int) -> np.ndarray:
    """Delay a sequence by k samples, filling the front with zeros."""
    if k == 0:
        return x.copy()
    out = np.zeros_like(x)
    if k < x.shape[-1]:
        out[..., k:] = x[..., :x.shape[-1] - k]
    return out


def apply_comm_channel(channel: MultipathChannel, tx_block: np.ndarray,
                       noise_power: float = 0.0,
                       rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Propagate a transmit block through the multipath channel.

    Output sample n is sum_l h_l^H x[n - n_l] + z[n], with the zero-prefix
    convention for samples before the block start.

    Args:
        channel: Multipath channel bound to the same array size.
        tx_block: (M, N) transmit matrix, one column per symbol instant.
        noise_power: AWGN variance per sample; 0 disables noise.
        rng: Required when noise_power > 0.

    Returns:
        Complex received sequence of length N.
    """
    tx_block = np.asarray(tx_block)
    if tx_block.ndim != 2 or tx_block.shape[0] != channel.num_antennas:
        raise ValueError(
            f"tx_block must be ({channel.num_antennas}, N), got {tx_block.shape}")
    n = tx_block.shape[1]
    y = np.zeros(n, dtype=complex)
    for h, d in zip(channel.path_vectors, channel.path_delays):
        y += _shift_zero_prefix(np.conj(h) @ tx_block, int(d))
    if noise_power > 0:
        if rng is None:
            raise ValueError("rng is required when noise_power > 0")
        y += complex_normal(rng, (n,), variance=noise_power)
    return y


def apply_radar_channel(target: RadarTarget, tx_block: np.ndarray,
                        symbol_duration_s: float, noise_power: float = 0.0,
                        rng: Optional[np.random.Generator] = None,
                        guard_length: Optional[int] = None,
                        strict: bool = True) -> np.ndarray:
    """Round-trip echo of a transmit block from a single point target.

    Sample n is alpha * a^H(theta) x[n - n_s] * exp(j*2*pi*f_d*n*T_s) + z[n].
    The Doppler phase ramp is referenced to the first retained sample; the
    absolute phase offset is part of the target gain.

    Args:
        target: Point target (gain, direction, delay, Doppler).
        tx_block: (M, N) transmit matrix.
        symbol_duration_s: Sample period T_s of the block.
        noise_power: AWGN variance per sample.
        rng: Required when noise_power > 0.
        guard_length: When given, a target delay beyond it raises (strict)
            or warns (sweep mode) to flag inter-block leakage.
        strict: Selects raise vs. warn for the guard check.

    Returns:
        Complex echo sequence of length N.
    """
    tx_block = np.asarray(tx_block)
    if tx_block.ndim != 2:
        raise ValueError("tx_block must be 2-D (M, N)")
    if guard_length is not None and target.delay_symbols > guard_length:
        msg = (f"target delay {target.delay_symbols} exceeds guard length "
               f"{guard_length}: echo spills into the next block")
        if strict:
            raise InfeasibleError(msg)
        warnings.warn(msg)
    n = tx_block.shape[1]
    a = steering_vector(target.direction, tx_block.shape[0])
    projected = np.conj(a) @ tx_block
    delayed = _shift_zero_prefix(projected, target.delay_symbols)
    ramp = np.exp(2j * np.pi * target.doppler_hz * symbol_duration_s * np.arange(n))
    y = target.gain * delayed * ramp
    if noise_power > 0:
        if rng is None:
            raise ValueError("rng is required when noise_power > 0")
        y += complex_normal(rng, (n,), variance=noise_power)
    return y


def _complex_to_pairs(arr: np.ndarray):
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def _pairs_to_complex(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def save_channel(path, channel: MultipathChannel) -> None:
    """Write a channel realization as JSON ([re, im] pairs, integer delays)."""
    doc = {"num_antennas": channel.num_antennas,
           "path_delays": channel.path_delays.tolist(),
           "path_vectors": _complex_to_pairs(channel.path_vectors)}
    if channel.metadata is not None:
        doc["metadata"] = channel.metadata
    Path(path).write_text(json.dumps(doc, indent=1))


def load_channel(path) -> MultipathChannel:
    """Read a channel realization written by save_channel."""
    doc = json.loads(Path(path).read_text())
    vectors = _pairs_to_complex(doc["path_vectors"])
    if vectors.shape[1] != doc["num_antennas"]:
        raise ValueError("channel file is inconsistent: num_antennas mismatch")
    return MultipathChannel(vectors, np.asarray(doc["path_delays"], dtype=int),
                            metadata=doc.get("metadata"))

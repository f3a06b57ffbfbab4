"""Delay alignment modulation: per-path delay pre-compensation and beamforming.

Each symbol stream copy l is advanced-by-construction with kappa_l =
n_max - n_l symbols and sent through its own beamformer f_l, so all L
multipath arrivals line up at a single lag n_max at the receiver. With
per-path zero-forcing the channel collapses to a single-tap link.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .channel import MultipathChannel, _shift_zero_prefix, complex_normal


@dataclass
class SymbolBlock:
    """A length-N unit-average-power symbol sequence plus its modulation tag."""

    symbols: np.ndarray
    modulation: str = "qpsk"

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=complex)
        if self.symbols.ndim != 1 or self.symbols.size < 1:
            raise ValueError("symbols must be a non-empty 1-D array")

    @property
    def length(self) -> int:
        return self.symbols.size


def generate_symbols(rng: np.random.Generator, length: int,
                     modulation: str = "qpsk") -> SymbolBlock:
    """Draw i.i.d. unit-power symbols.

    modulation: "bpsk", "qpsk", "psk<order>" (order a power of two >= 2),
    or "gaussian" for CN(0, 1).
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    mod = modulation.lower()
    if mod == "gaussian":
        return SymbolBlock(complex_normal(rng, (length,), 1.0), mod)
    alias = {"bpsk": 2, "qpsk": 4}
    if mod in alias:
        order = alias[mod]
    elif mod.startswith("psk"):
        try:
            order = int(mod[3:])
        except ValueError:
            raise ValueError(f"unknown modulation {modulation!r}") from None
    else:
        raise ValueError(f"unknown modulation {modulation!r}")
    if order < 2 or (order & (order - 1)) != 0:
        raise ValueError("PSK order must be a power of two >= 2")
    phases = rng.integers(0, order, size=length)
    return SymbolBlock(np.exp(2j * np.pi * phases / order), mod)


def assign_delays(path_delays) -> np.ndarray:
    """Per-path pre-compensation delays kappa_l = max(n) - n_l.

    Distinct channel delays give pairwise distinct kappa, which is what makes
    the aligned streams mutually uncorrelated for sensing.
    """
    delays = np.asarray(path_delays, dtype=int)
    if delays.ndim != 1 or delays.size < 1:
        raise ValueError("path_delays must be a non-empty 1-D array")
    if np.any(delays < 0):
        raise ValueError("path delays must be non-negative")
    if len(np.unique(delays)) != len(delays):
        raise ValueError("path delays must be pairwise distinct")
    return delays.max() - delays


@dataclass
class DamBeamformer:
    """Per-path beamformers with their delay pre-compensation schedule.

    beam_matrix holds f_l as column l (shape (M, L)); delay_schedule holds
    kappa_l; n_max is the common alignment lag of the bound channel.
    """

    beam_matrix: np.ndarray
    delay_schedule: np.ndarray
    n_max: int

    def __post_init__(self):
        self.beam_matrix = np.asarray(self.beam_matrix, dtype=complex)
        self.delay_schedule = np.asarray(self.delay_schedule, dtype=int)
        if self.beam_matrix.ndim != 2:
            raise ValueError("beam_matrix must be 2-D (M, L)")
        if self.delay_schedule.shape != (self.beam_matrix.shape[1],):
            raise ValueError("delay_schedule length must match beam count")
        if np.any(self.delay_schedule < 0):
            raise ValueError("delay schedule entries must be non-negative")
        if len(np.unique(self.delay_schedule)) != len(self.delay_schedule):
            raise ValueError("delay schedule entries must be pairwise distinct")
        if self.n_max < self.delay_schedule.max():
            raise ValueError("n_max must be at least the largest schedule entry")

    @property
    def num_antennas(self) -> int:
        return self.beam_matrix.shape[0]

    @property
    def num_paths(self) -> int:
        return self.beam_matrix.shape[1]

    @classmethod
    def aligned(cls, beam_matrix, path_delays) -> "DamBeamformer":
        """Bind beams to a channel's delays via kappa_l = n_max - n_l."""
        delays = np.asarray(path_delays, dtype=int)
        return cls(np.asarray(beam_matrix, dtype=complex),
                   assign_delays(delays), int(delays.max()))


def delayed_symbol_matrix(symbols: np.ndarray, kappa, extra_delay: int = 0) -> np.ndarray:
    """Rows are the symbol stream delayed by kappa_l + extra_delay (zero-prefix)."""
    symbols = np.asarray(symbols)
    kappa = np.asarray(kappa, dtype=int)
    out = np.zeros((kappa.size, symbols.size), dtype=complex)
    for i, k in enumerate(kappa):
        out[i] = _shift_zero_prefix(symbols, int(k) + extra_delay)
    return out


def build_dam_block(block: SymbolBlock, bf: DamBeamformer) -> np.ndarray:
    """Transmit matrix x[n] = sum_l f_l s[n - kappa_l], shape (M, N)."""
    rows = delayed_symbol_matrix(block.symbols, bf.delay_schedule)
    return bf.beam_matrix @ rows


def transmit_power(bf: DamBeamformer) -> float:
    """Average transmit power sum_l ||f_l||^2 for unit-power symbols."""
    return float(np.sum(np.abs(bf.beam_matrix) ** 2))


def comm_snr(bf: DamBeamformer, channel: MultipathChannel, noise_power: float) -> float:
    """Post-alignment receive SNR |sum_l h_l^H f_l|^2 / sigma^2."""
    _check_bound(bf, channel)
    gain = np.sum(np.conj(channel.path_vectors) * bf.beam_matrix.T)
    return float(np.abs(gain) ** 2 / noise_power)


def decompose_received(bf: DamBeamformer, channel: MultipathChannel,
                       block: SymbolBlock):
    """Split the noiseless received sequence into aligned term and residual ISI.

    Returns (desired, isi): desired[n] = (sum_l h_l^H f_l) s[n - n_max]; the
    residual collects every cross pairing h_l^H f_l' at lag kappa_l' + n_l.
    Their sum reproduces apply_comm_channel at zero noise exactly.
    """
    _check_bound(bf, channel)
    s = block.symbols
    gain = np.sum(np.conj(channel.path_vectors) * bf.beam_matrix.T)
    desired = gain * _shift_zero_prefix(s, bf.n_max)
    isi = np.zeros_like(desired)
    cross = np.conj(channel.path_vectors) @ bf.beam_matrix  # (L, L): [l, l'] = h_l^H f_l'
    for l in range(channel.num_paths):
        for lp in range(channel.num_paths):
            if lp == l:
                continue
            lag = int(bf.delay_schedule[lp] + channel.path_delays[l])
            isi += cross[l, lp] * _shift_zero_prefix(s, lag)
    return desired, isi


def papr_empirical(tx_block: np.ndarray) -> float:
    """Peak-to-average ratio of instantaneous array-aggregate power ||x[n]||^2."""
    tx_block = np.atleast_2d(np.asarray(tx_block))
    inst = np.sum(np.abs(tx_block) ** 2, axis=0)
    mean = inst.mean()
    if mean == 0:
        raise ValueError("all-zero block has no defined peak-to-average ratio")
    return float(inst.max() / mean)


def _check_bound(bf: DamBeamformer, channel: MultipathChannel) -> None:
    if bf.num_antennas != channel.num_antennas or bf.num_paths != channel.num_paths:
        raise ValueError("beamformer shape does not match the channel")
    expected = assign_delays(channel.path_delays)
    if not np.array_equal(expected, bf.delay_schedule):
        raise ValueError("beamformer delay schedule is not aligned to this channel")


def save_block(path, tx_block: np.ndarray, symbol_duration_s: float,
               seed: Optional[int] = None) -> None:
    """Export a transmit block for cross-tool inspection.

    The block goes to `path` as little-endian float64 interleaved [re, im]
    pairs in row-major (antenna-major) order; a sidecar `path + ".json"`
    header records shape, sample period and seed.
    """
    tx_block = np.ascontiguousarray(np.asarray(tx_block, dtype=complex))
    if tx_block.ndim != 2:
        raise ValueError("tx_block must be 2-D (M, N)")
    Path(path).write_bytes(tx_block.astype("<c16").tobytes())
    header = {"num_antennas": int(tx_block.shape[0]),
              "block_length": int(tx_block.shape[1]),
              "symbol_duration_s": float(symbol_duration_s),
              "seed": seed}
    Path(str(path) + ".json").write_text(json.dumps(header, indent=1))


def load_block(path):
    """Read a block written by save_block; returns (block, header dict)."""
    header = json.loads(Path(str(path) + ".json").read_text())
    raw = np.frombuffer(Path(path).read_bytes(), dtype="<c16")
    block = raw.reshape(header["num_antennas"], header["block_length"]).copy()
    return block, header

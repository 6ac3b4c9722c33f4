"""Spectral, correlation and angular metrics of a synthesized waveform.

Power quantities are linear unless the name ends in ``_db``.  dB values are
floored at :data:`DB_FLOOR` so exact zeros stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RadarConfig
from .operator import build_steering_set, centered_dft, centered_idft, steering_tensor

__all__ = [
    "DB_FLOOR",
    "DEFAULT_GRID_SIZE",
    "DegenerateInputError",
    "DirectionalWaveforms",
    "MetricsReport",
    "to_db",
    "psd",
    "directional_psd",
    "band_ratio_db",
    "directional_waveforms",
    "circular_correlation",
    "correlations",
    "radiation_pattern",
    "default_angle_grid",
    "compute_report",
]

DB_FLOOR = -120.0
DEFAULT_GRID_SIZE = 1024

PATTERN_DEFINITION = "P(phi) = sum_m |a(m, phi)^T x_F[m]|^2, normalized to 0 dB peak (reconstruction)"
CORRELATION_KIND = "circular"


class DegenerateInputError(ValueError):
    """A waveform has zero energy, so normalized correlations are undefined."""


def to_db(power, floor: float = DB_FLOOR) -> np.ndarray:
    """``10 log10`` of a nonnegative power quantity, floored."""
    p = np.asarray(power, dtype=float)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(p)
    return np.maximum(out, floor)


def _spectra(x: np.ndarray, cfg: RadarConfig) -> np.ndarray:
    return centered_dft(np.asarray(x).reshape(cfg.num_samples, cfg.num_antennas), axis=0)


def psd(x: np.ndarray, cfg: RadarConfig) -> np.ndarray:
    """Antenna-averaged power spectrum ``(1/N) sum_n |X_n[m]|^2`` (linear).

    Equals the radiated power integrated over all angles, so it sums to
    ``||x||^2 / N``.
    """
    xf = _spectra(x, cfg)
    return np.mean(np.abs(xf) ** 2, axis=1)


def band_ratio_db(spectrum: np.ndarray, cfg: RadarConfig) -> float:
    """Mean in-band over mean out-of-band power, in dB."""
    lo, hi = cfg.band
    t = cfg.num_samples
    mask = np.zeros(t, dtype=bool)
    mask[lo + t // 2 : hi + t // 2] = True
    if mask.all():
        return float("inf")
    inband = float(np.mean(spectrum[mask]))
    outband = float(np.mean(spectrum[~mask]))
    if outband == 0.0:
        return float("inf")
    return 10.0 * np.log10(inband / outband)


@dataclass(frozen=True)
class DirectionalWaveforms:
    """Fields toward the configured directions.

    ``spectra[m + T//2, k]`` is ``Y_k[m]``; ``waveforms[t, k]`` is ``y_k[t]``.
    """

    spectra: np.ndarray
    waveforms: np.ndarray

    @property
    def num_directions(self) -> int:
        return self.spectra.shape[1]


def directional_waveforms(x: np.ndarray, cfg: RadarConfig) -> DirectionalWaveforms:
    steer = build_steering_set(cfg).matrices
    spec = np.einsum("mkn,mn->mk", steer, _spectra(x, cfg))
    return DirectionalWaveforms(spectra=spec, waveforms=centered_idft(spec, axis=0))


def directional_psd(w: DirectionalWaveforms) -> np.ndarray:
    """Direction-averaged spectrum ``(1/K) sum_k |Y_k[m]|^2`` (linear)."""
    return np.mean(np.abs(w.spectra) ** 2, axis=1)


def circular_correlation(w: DirectionalWaveforms) -> np.ndarray:
    """``r[k, l, tau] = sum_t y_k[t] conj(y_l[(t - tau) mod T])``."""
    y = w.waveforms
    f = np.fft.fft(y, axis=0)
    cross = f[:, :, None] * np.conj(f[:, None, :])
    return np.moveaxis(np.fft.ifft(cross, axis=0), 0, -1)


def correlations(w: DirectionalWaveforms) -> tuple[np.ndarray, np.ndarray]:
    """Normalized auto/cross-correlation magnitudes in dB.

    Returns ``autocorr`` of shape ``(K, T)`` (0 dB at lag 0) and
    ``crosscorr`` of shape ``(K, K, T)`` normalized by
    ``sqrt(r_kk[0] r_ll[0])``.
    """
    r = circular_correlation(w)
    energy = np.real(np.diagonal(r[:, :, 0]))
    if np.any(energy <= 0):
        bad = [int(k) for k in np.flatnonzero(energy <= 0)]
        raise DegenerateInputError(f"zero-energy waveform for direction index {bad}")
    norm = np.sqrt(np.outer(energy, energy))[:, :, None]
    mag = np.abs(r) / norm
    cross_db = 2.0 * to_db(mag, floor=DB_FLOOR / 2.0)
    k = r.shape[0]
    auto_db = cross_db[np.arange(k), np.arange(k), :]
    return auto_db, cross_db


def default_angle_grid(size: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    """``size`` uniform angles strictly inside (0, pi)."""
    return (np.arange(size) + 0.5) * np.pi / size


def radiation_pattern(x: np.ndarray, cfg: RadarConfig, angle_grid=None) -> np.ndarray:
    """Angular gain in dB, normalized to 0 dB at the grid maximum."""
    grid = default_angle_grid() if angle_grid is None else np.asarray(angle_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0) or np.any(grid >= np.pi):
        raise ValueError("angle grid must be nonempty and inside (0, pi)")
    xf = _spectra(x, cfg)
    power = np.zeros(grid.size)
    # chunk the grid to bound the (T, chunk, N) steering tensor
    chunk = max(1, 2**22 // (cfg.num_samples * cfg.num_antennas))
    for start in range(0, grid.size, chunk):
        steer = steering_tensor(cfg, grid[start : start + chunk])
        field = np.einsum("mgn,mn->mg", steer, xf)
        power[start : start + chunk] = np.sum(np.abs(field) ** 2, axis=0)
    peak = power.max()
    if peak == 0.0:
        return np.full(grid.size, DB_FLOOR)
    return to_db(power / peak)


@dataclass(frozen=True)
class MetricsReport:
    psd: np.ndarray
    directional_psd: np.ndarray
    autocorr: np.ndarray
    crosscorr: np.ndarray
    pattern: np.ndarray
    angle_grid: np.ndarray
    oob_suppression_db: float
    antenna_oob_db: float
    peak_crosscorr_db: float
    peak_autocorr_sidelobe_db: float

    def summary(self) -> dict[str, float]:
        return {
            "oob_suppression_db": self.oob_suppression_db,
            "antenna_oob_db": self.antenna_oob_db,
            "peak_crosscorr_db": self.peak_crosscorr_db,
            "peak_autocorr_sidelobe_db": self.peak_autocorr_sidelobe_db,
        }


def peak_crosscorr_db(crosscorr: np.ndarray) -> float:
    k = crosscorr.shape[0]
    if k < 2:
        return DB_FLOOR
    off = ~np.eye(k, dtype=bool)
    return float(crosscorr[off].max())


def peak_autocorr_sidelobe_db(autocorr: np.ndarray) -> float:
    if autocorr.shape[1] < 2:
        return DB_FLOOR
    return float(autocorr[:, 1:].max())


def compute_report(x: np.ndarray, cfg: RadarConfig, angle_grid=None) -> MetricsReport:
    """All metrics for one waveform.

    ``oob_suppression_db`` is measured on the direction-averaged spectrum,
    the quantity the synthesis objective shapes; ``antenna_oob_db`` is the
    same ratio on the antenna-averaged spectrum.
    """
    grid = default_angle_grid() if angle_grid is None else np.asarray(angle_grid, dtype=float)
    w = directional_waveforms(x, cfg)
    p_ant = psd(x, cfg)
    p_dir = directional_psd(w)
    auto, cross = correlations(w)
    return MetricsReport(
        psd=p_ant,
        directional_psd=p_dir,
        autocorr=auto,
        crosscorr=cross,
        pattern=radiation_pattern(x, cfg, grid),
        angle_grid=grid,
        oob_suppression_db=band_ratio_db(p_dir, cfg),
        antenna_oob_db=band_ratio_db(p_ant, cfg),
        peak_crosscorr_db=peak_crosscorr_db(cross),
        peak_autocorr_sidelobe_db=peak_autocorr_sidelobe_db(auto),
    )

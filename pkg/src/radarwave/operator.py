"""Broadband ULA steering and the structured beam operator.

The operator maps the time-major stacked waveform ``x`` (length ``N*T``,
``x[t*N + n]``) to the frequency-major field ``y`` (length ``K*T``,
``y[(m + T//2)*K + k]``)::

    y = beta * Diag(A[m]) (F_T kron I_N) x

where ``F_T`` is the unitary DFT whose rows are ordered so the zero
frequency sits at position ``T//2``.  Forward and adjoint cost one batched
FFT plus one ``K x N`` product per frequency.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np
import scipy.fft

from .config import RadarConfig

__all__ = [
    "DENSE_COLUMN_CAP",
    "DimensionError",
    "SteeringMatrixSet",
    "BeamOperator",
    "steering_vector",
    "build_steering_set",
    "build_operator",
    "centered_dft",
    "centered_idft",
    "centered_dft_matrix",
    "fft_workers",
]

DENSE_COLUMN_CAP = 4096


class DimensionError(ValueError):
    """Vector length does not match the operator shape."""


def fft_workers() -> int:
    """Worker count from ``SYNTH_THREADS`` (0 or unset means all cores)."""
    raw = os.environ.get("SYNTH_THREADS", "0").strip() or "0"
    n = int(raw)
    return -1 if n <= 0 else n


def centered_dft(a: np.ndarray, axis: int = 0) -> np.ndarray:
    """Unitary DFT along ``axis`` with zero frequency moved to index ``T//2``."""
    spec = scipy.fft.fft(a, axis=axis, norm="ortho", workers=fft_workers())
    return np.fft.fftshift(spec, axes=axis)


def centered_idft(a: np.ndarray, axis: int = 0) -> np.ndarray:
    """Inverse (= adjoint) of :func:`centered_dft`."""
    spec = np.fft.ifftshift(a, axes=axis)
    return scipy.fft.ifft(spec, axis=axis, norm="ortho", workers=fft_workers())


def centered_dft_matrix(t: int) -> np.ndarray:
    """Explicit ``F_T``: row ``p`` is ``exp(-2j pi m t / T) / sqrt(T)``, ``m = p - T//2``."""
    m = np.arange(t) - t // 2
    n = np.arange(t)
    return np.exp(-2j * np.pi * np.outer(m, n) / t) / np.sqrt(t)


def _phase_slope(m, phi, cfg: RadarConfig):
    return np.pi * np.cos(phi) * (m / (cfg.num_samples * cfg.sample_interval * cfg.center_freq) + 1.0)


def steering_vector(m: int, phi: float, cfg: RadarConfig) -> np.ndarray:
    """Array response ``a(m, phi)``; entry ``n`` is ``exp(-j pi cos(phi) n (m/(T Ts fc) + 1))``."""
    t = cfg.num_samples
    if not -(t // 2) <= m < t - t // 2:
        raise IndexError(f"frequency index {m} outside [{-(t // 2)}, {t - t // 2})")
    n = np.arange(cfg.num_antennas)
    return np.exp(-1j * _phase_slope(m, phi, cfg) * n)


@dataclass(frozen=True)
class SteeringMatrixSet:
    """``matrices[m + T//2]`` is ``A[m]`` (shape ``K x N``); rows are ``a(m, phi_k)^T``."""

    matrices: np.ndarray
    cfg: RadarConfig

    def __getitem__(self, m: int) -> np.ndarray:
        return self.matrices[m + self.cfg.num_samples // 2]


def steering_tensor(cfg: RadarConfig, angles) -> np.ndarray:
    """Responses for arbitrary angles, shape ``(T, len(angles), N)``."""
    m = cfg.freq_indices.astype(float)
    phi = np.asarray(angles, dtype=float)
    n = np.arange(cfg.num_antennas)
    slope = _phase_slope(m[:, None], phi[None, :], cfg)
    return np.exp(-1j * slope[:, :, None] * n[None, None, :])


def build_steering_set(cfg: RadarConfig) -> SteeringMatrixSet:
    mats = steering_tensor(cfg, cfg.directions)
    mats.setflags(write=False)
    return SteeringMatrixSet(mats, cfg)


@dataclass(frozen=True)
class BeamOperator:
    """``beta * B`` with matrix-free forward/adjoint and the ``|B|^2`` reductions.

    ``beta`` is the per-iteration scale; :meth:`scaled` returns a copy with a
    new scale that shares the cached steering matrices.
    """

    steering: SteeringMatrixSet
    beta: complex = 1.0

    @property
    def cfg(self) -> RadarConfig:
        return self.steering.cfg

    @property
    def shape(self) -> tuple[int, int]:
        c = self.cfg
        return c.num_directions * c.num_samples, c.num_antennas * c.num_samples

    def scaled(self, beta: complex) -> "BeamOperator":
        return replace(self, beta=complex(beta))

    def _check(self, v: np.ndarray, n: int, what: str) -> np.ndarray:
        v = np.asarray(v)
        if v.ndim != 1 or v.shape[0] != n:
            raise DimensionError(f"{what} must have length {n}, got shape {v.shape}")
        return v

    def _freq_from_time(self, xt: np.ndarray) -> np.ndarray:
        return centered_dft(xt, axis=0)

    def _time_from_freq(self, xf: np.ndarray) -> np.ndarray:
        return centered_idft(xf, axis=0)

    def forward(self, x: np.ndarray) -> np.ndarray:
        rows, cols = self.shape
        x = self._check(x, cols, "x")
        c = self.cfg
        xf = self._freq_from_time(x.reshape(c.num_samples, c.num_antennas))
        y = np.einsum("mkn,mn->mk", self.steering.matrices, xf)
        return self.beta * y.reshape(rows)

    def adjoint(self, z: np.ndarray) -> np.ndarray:
        rows, cols = self.shape
        z = self._check(z, rows, "z")
        c = self.cfg
        zf = np.einsum("mkn,mk->mn", self.steering.matrices.conj(), z.reshape(c.num_samples, c.num_directions))
        return np.conj(self.beta) * self._time_from_freq(zf).reshape(cols)

    def magsq_forward_sum(self, f_prime: np.ndarray) -> np.ndarray:
        """``(|beta B|^2) f_prime``: every entry of ``B`` has ``|B_ji|^2 = 1/T``."""
        rows, cols = self.shape
        f_prime = self._check(f_prime, cols, "f_prime")
        total = abs(self.beta) ** 2 / self.cfg.num_samples * np.sum(f_prime)
        return np.full(rows, total, dtype=float)

    def magsq_adjoint_sum(self, g_prime: np.ndarray) -> np.ndarray:
        """``(|beta B|^2)^T g_prime``, replicated to length ``N*T``."""
        rows, cols = self.shape
        g_prime = self._check(g_prime, rows, "g_prime")
        total = abs(self.beta) ** 2 / self.cfg.num_samples * np.sum(g_prime)
        return np.full(cols, total, dtype=float)

    def materialize_dense(self, cap: int = DENSE_COLUMN_CAP) -> np.ndarray:
        """Explicit unscaled ``Diag(A[m]) (F_T kron I_N)``; ``beta`` is not applied."""
        c = self.cfg
        rows, cols = self.shape
        if cols > cap:
            raise MemoryError(f"dense operator needs {cols} columns, cap is {cap}")
        kron = np.kron(centered_dft_matrix(c.num_samples), np.eye(c.num_antennas))
        blocks = np.zeros((rows, cols), dtype=complex)
        k, n = c.num_directions, c.num_antennas
        for p in range(c.num_samples):
            blocks[p * k : (p + 1) * k, p * n : (p + 1) * n] = self.steering.matrices[p]
        return blocks @ kron


def build_operator(cfg: RadarConfig, beta: complex = 1.0) -> BeamOperator:
    return BeamOperator(build_steering_set(cfg), complex(beta))

"""scikit-learn style front end.

``WaveformSynthesizer`` holds the run parameters as constructor arguments
(so ``get_params``/``set_params``/``clone`` work), ``fit`` runs the
synthesis, ``transform`` maps any waveform to its directional fields and
``predict`` evaluates the radiation pattern on an angle grid.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .config import DesiredPattern, RadarConfig, build_constellation, build_flat_pattern, make_config
from .gamp import SynthesisResult, cost, solve
from .metrics import compute_report, directional_waveforms, radiation_pattern
from .operator import build_operator

__all__ = ["WaveformSynthesizer", "check_waveform"]


def check_waveform(x, cfg: RadarConfig) -> np.ndarray:
    """Validate a waveform given as a ``(T, N)`` array or a stacked ``N*T`` vector."""
    arr = np.asarray(x)
    if not np.issubdtype(arr.dtype, np.number):
        raise TypeError(f"waveform must be numeric, got dtype {arr.dtype}")
    expected = cfg.num_samples * cfg.num_antennas
    if arr.size != expected or arr.ndim not in (1, 2):
        raise ValueError(f"waveform must hold T*N={expected} samples, got shape {arr.shape}")
    if arr.ndim == 2 and arr.shape != (cfg.num_samples, cfg.num_antennas):
        raise ValueError(f"waveform matrix must be (T, N)=({cfg.num_samples}, {cfg.num_antennas}), got {arr.shape}")
    arr = arr.astype(complex).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("waveform contains non-finite values")
    return arr


class WaveformSynthesizer(BaseEstimator):
    """Quantized-phase MIMO probing waveform synthesis.

    Parameters
    ----------
    num_antennas, num_samples : int
        Array size ``N`` and sequence length ``T`` (a power of two).
    directions : sequence of float, optional
        Target angles in radians inside (0, pi).  Evenly spaced
        ``num_directions`` angles when omitted.
    num_directions : int
        ``K`` when ``directions`` is not given.
    dac_bits : int
        Phase resolution ``b``; the alphabet has ``2**b`` points.
    damping : float
        Weight ``mu`` of the new input-step estimate, in [0, 1).
    regularization : float, optional
        ``alpha``; defaults to ``K * T``.
    passband : (int, int), optional
        Half-open frequency-index band; defaults to ``[-T/4, T/4)``.

    Attributes
    ----------
    config_ : RadarConfig
    result_ : SynthesisResult
    waveform_ : ndarray of shape (T, N)
        Constellation-valued transmit samples.
    indices_ : ndarray of shape (T, N)
        Constellation index of every sample.
    beta_, cost_ : complex, float
    cost_trace_ : ndarray
    n_iter_ : int
    converged_ : bool
    """

    def __init__(
        self,
        num_antennas=16,
        num_samples=256,
        directions=None,
        num_directions=4,
        center_freq=77e9,
        sample_interval=0.5e-9,
        dac_bits=2,
        damping=0.3,
        regularization=None,
        max_iters=200,
        rel_tol=1e-4,
        passband=None,
        intensity=1.0,
        seed=0,
    ):
        self.num_antennas = num_antennas
        self.num_samples = num_samples
        self.directions = directions
        self.num_directions = num_directions
        self.center_freq = center_freq
        self.sample_interval = sample_interval
        self.dac_bits = dac_bits
        self.damping = damping
        self.regularization = regularization
        self.max_iters = max_iters
        self.rel_tol = rel_tol
        self.passband = passband
        self.intensity = intensity
        self.seed = seed

    def _make_config(self) -> RadarConfig:
        return make_config(
            num_antennas=self.num_antennas,
            num_samples=self.num_samples,
            directions=self.directions,
            num_directions=self.num_directions,
            center_freq=self.center_freq,
            sample_interval=self.sample_interval,
            dac_bits=self.dac_bits,
            damping=self.damping,
            regularization=self.regularization,
            max_iters=self.max_iters,
            rel_tol=self.rel_tol,
            passband=self.passband,
            intensity=self.intensity,
            seed=self.seed,
        )

    def fit(self, X=None, y=None):
        """Synthesize a waveform.

        ``X`` is an optional desired pattern of shape ``(T, K)`` (or its
        stacked ``K*T`` vector); the flat in-band pattern is used otherwise.
        ``y`` is ignored.
        """
        cfg = self._make_config()
        if X is None:
            pattern = build_flat_pattern(cfg)
        else:
            pattern = DesiredPattern.from_array(X, cfg.num_samples, cfg.num_directions)
        op = build_operator(cfg)
        result = solve(cfg, op, pattern)
        self.config_ = cfg
        self.pattern_ = pattern
        self.operator_ = op
        self.result_: SynthesisResult = result
        self.waveform_ = result.waveform_matrix(cfg)
        self.indices_ = result.x_indices.reshape(cfg.num_samples, cfg.num_antennas)
        self.beta_ = result.beta_final
        self.cost_ = result.final_cost
        self.cost_trace_ = np.asarray(result.cost_trace)
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        return self

    def transform(self, X=None):
        """Per-direction time-domain waveforms ``(T, K)`` of ``X`` (default: the fitted waveform)."""
        check_is_fitted(self, "result_")
        x = self.result_.x_sol if X is None else check_waveform(X, self.config_)
        return directional_waveforms(x, self.config_).waveforms

    def predict(self, angles=None):
        """Radiation pattern (dB, 0 dB peak) of the fitted waveform on ``angles``."""
        check_is_fitted(self, "result_")
        return radiation_pattern(self.result_.x_sol, self.config_, angles)

    def score(self, X=None, y=None):
        """Negative objective of ``X`` (default: the fitted waveform); larger is better."""
        check_is_fitted(self, "result_")
        if X is None:
            return -self.cost_
        x = check_waveform(X, self.config_)
        return -cost(x, self.config_, self.operator_, self.pattern_)

    def report(self, angle_grid=None):
        check_is_fitted(self, "result_")
        return compute_report(self.result_.x_sol, self.config_, angle_grid)

    @property
    def constellation_(self):
        check_is_fitted(self, "result_")
        return build_constellation(self.config_.dac_bits)

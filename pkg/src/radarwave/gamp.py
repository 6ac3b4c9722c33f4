"""Damped min-sum GAMP for constellation-constrained beampattern matching.

Minimizes ``||beta B x - s||^2 + alpha |beta|^2`` over ``x`` in the DAC
alphabet, ``|s_j|^2 = d_j`` and complex ``beta``.  For fixed ``x`` the
optimal ``s`` and ``beta`` are closed form (:func:`optimal_s`,
:func:`optimal_beta`); the search over ``x`` alternates an output step on
the ``K*T`` field samples and an input step on the ``N*T`` waveform samples,
each a cheap elementwise map plus one operator application.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import Constellation, DesiredPattern, RadarConfig, build_constellation
from .operator import BeamOperator

__all__ = [
    "EPS",
    "THETA0",
    "STOP_WINDOW",
    "TIE_BREAK",
    "TIE_TOL",
    "ZERO_TOL",
    "snap_zeros",
    "DivergenceError",
    "GampState",
    "SynthesisResult",
    "prox_constellation",
    "safe_angle",
    "prox_indices",
    "input_derivative",
    "output_function",
    "output_derivative",
    "optimal_s",
    "optimal_beta",
    "cost",
    "cost_of_field",
    "initial_state",
    "gamp_step",
    "has_converged",
    "solve",
]

EPS = 1e-12
THETA0 = 1.0
STOP_WINDOW = 5
XI_FLOOR = 1e-150
TIE_BREAK = "lowest constellation index"
TIE_TOL = 1e-9
ZERO_TOL = 1e-10


class DivergenceError(RuntimeError):
    """A GAMP message became non-finite."""

    def __init__(self, iteration: int, what: str):
        super().__init__(f"GAMP diverged at iteration {iteration}: non-finite {what}")
        self.iteration = iteration
        self.what = what


# --- scalar functions ---------------------------------------------------------


def safe_angle(v) -> np.ndarray:
    """``arg v`` with ``arg 0 = 0`` (also for signed zeros)."""
    v = np.asarray(v)
    return np.where(v == 0, 0.0, np.angle(v))


def prox_indices(v, c: Constellation) -> np.ndarray:
    """Index of the nearest constellation point to each entry of ``v``.

    Nearest in Euclidean distance is nearest in phase.  A phase within
    ``TIE_TOL`` decision cells of a boundary counts as a tie and goes to the
    lower of the two indices; ``v = 0`` maps to index 0.
    """
    v = np.asarray(v)
    sector = np.mod(safe_angle(v), 2.0 * np.pi) / c.step
    boundary = np.rint(sector)
    tie = np.abs(sector - boundary) <= TIE_TOL
    lower = np.mod(boundary.astype(np.int64) - 1, c.size)
    tie_idx = np.where(np.mod(boundary, c.size) == 0, 0, lower)
    idx = np.where(tie, tie_idx, np.floor(sector).astype(np.int64))
    return np.mod(idx, c.size)


def prox_constellation(v, c: Constellation):
    """Projection onto the alphabet: ``argmin_x |x - v|^2``."""
    out = c.points[prox_indices(v, c)]
    return out if np.ndim(v) else complex(out)


def snap_zeros(v: np.ndarray, tol: float = ZERO_TOL) -> np.ndarray:
    """Zero the entries whose magnitude is at roundoff level relative to ``max |v|``.

    Their phase carries no information, and different summation orders
    would otherwise project them to different constellation points.
    """
    mag = np.abs(v)
    scale = mag.max(initial=0.0)
    return np.where(mag <= tol * scale, 0.0, v)


def input_derivative(v):
    """Curvature proxy ``1 / (2|v|)`` of the input step, clamped at ``|v| = EPS``."""
    return 0.5 / np.maximum(np.abs(v), EPS)


def output_function(u, d, theta):
    """``(sqrt(d) e^{j arg u} - u) / (1 + theta)`` with ``arg 0 = 0``."""
    u = np.asarray(u, dtype=complex)
    return (np.sqrt(d) * np.exp(1j * safe_angle(u)) - u) / (1.0 + np.asarray(theta))


def output_derivative(u, d, theta):
    """Wirtinger derivative of :func:`output_function` with respect to ``-u``."""
    theta = np.asarray(theta, dtype=float)
    return 1.0 / (1.0 + theta) - np.sqrt(d) / (2.0 * np.maximum(np.abs(u), EPS) * (1.0 + theta))


# --- closed-form s and beta ---------------------------------------------------


def optimal_s(y: np.ndarray, d) -> np.ndarray:
    """Nearest vector to ``y`` with ``|s_j|^2 = d_j``."""
    d = d.d if isinstance(d, DesiredPattern) else np.asarray(d, dtype=float)
    return np.sqrt(d) * np.exp(1j * safe_angle(y))


def optimal_beta(s: np.ndarray, y_unscaled: np.ndarray, alpha: float) -> complex:
    """Minimizer ``y^H s / (||y||^2 + alpha)`` of ``||beta y - s||^2 + alpha |beta|^2``.

    When ``s`` is phase-aligned with ``y`` (as :func:`optimal_s` makes it)
    ``y^H s = s^H y`` is real and nonnegative.
    """
    denom = float(np.vdot(y_unscaled, y_unscaled).real) + alpha
    if denom == 0.0:
        return 0j
    return complex(np.vdot(y_unscaled, s) / denom)


def cost_of_field(y: np.ndarray, d: np.ndarray, alpha: float) -> tuple[float, complex]:
    """Cost and optimal ``beta`` for an unscaled field ``y = B x``."""
    beta = optimal_beta(optimal_s(y, d), y, alpha)
    s = optimal_s(beta * y, d)
    r = beta * y - s
    return float(np.vdot(r, r).real + alpha * abs(beta) ** 2), beta


def cost(x: np.ndarray, cfg: RadarConfig, op: BeamOperator, d: DesiredPattern) -> float:
    """Objective at ``x`` with ``s`` and ``beta`` at their optimum."""
    y = op.scaled(1.0).forward(x)
    return cost_of_field(y, d.d, cfg.alpha)[0]


# --- iteration ----------------------------------------------------------------


@dataclass(frozen=True)
class GampState:
    x_hat: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    xi: np.ndarray
    beta: complex
    iter: int = 0
    cost_trace: tuple[float, ...] = ()
    beta_trace: tuple[complex, ...] = ()


def initial_state(op: BeamOperator, theta0: float = THETA0) -> GampState:
    rows, cols = op.shape
    return GampState(
        x_hat=np.zeros(cols, dtype=complex),
        z=np.zeros(rows, dtype=complex),
        theta=np.full(rows, float(theta0)),
        xi=np.zeros(cols),
        beta=1.0 + 0j,
    )


def _require_finite(arr, iteration: int, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise DivergenceError(iteration, what)


def gamp_step(
    state: GampState,
    op: BeamOperator,
    d: DesiredPattern,
    c: Constellation,
    mu: float,
    alpha: float | None = None,
) -> GampState:
    """One damped iteration; returns the next state.

    ``alpha`` defaults to the config's regularization weight.
    """
    if alpha is None:
        alpha = op.cfg.alpha
    it = state.iter + 1
    dv = d.d
    a = op.scaled(state.beta)

    # output step; u is the field estimate with the Onsager correction removed
    u = a.forward(state.x_hat) - state.theta * state.z
    z = output_function(u, dv, state.theta)
    g_prime = output_derivative(u, dv, state.theta)
    # negative curvature (|u| < sqrt(d)/2) would flip the sign of xi
    xi = np.maximum(a.magsq_adjoint_sum(np.maximum(g_prime, 0.0)), XI_FLOOR)
    _require_finite(z, it, "z")
    _require_finite(xi, it, "xi")

    # input step with damping against the previous estimate
    v = snap_zeros(a.adjoint(z) + xi * state.x_hat)
    raw = prox_constellation(v / xi, c)
    x_hat = (1.0 - mu) * state.x_hat + mu * raw
    theta = mu * a.magsq_forward_sum(input_derivative(v))
    _require_finite(x_hat, it, "x_hat")
    _require_finite(theta, it, "theta")

    y = op.scaled(1.0).forward(x_hat)
    beta = optimal_beta(optimal_s(y, dv), y, alpha)
    if not np.isfinite(beta):
        raise DivergenceError(it, "beta")

    projected = prox_constellation(x_hat, c)
    trace_cost, _ = cost_of_field(op.scaled(1.0).forward(projected), dv, alpha)
    if not math.isfinite(trace_cost):
        raise DivergenceError(it, "cost")
    return GampState(
        x_hat=x_hat,
        z=z,
        theta=theta,
        xi=xi,
        beta=beta,
        iter=it,
        cost_trace=state.cost_trace + (trace_cost,),
        beta_trace=state.beta_trace + (beta,),
    )


def has_converged(trace, rel_tol: float, window: int = STOP_WINDOW) -> bool:
    """True when the cost moved by at most ``rel_tol`` (relative) over ``window`` iterations."""
    if len(trace) <= window:
        return False
    ref = trace[-1 - window]
    return abs(trace[-1] - ref) <= rel_tol * ref


@dataclass(frozen=True)
class SynthesisResult:
    x_sol: np.ndarray
    x_indices: np.ndarray
    final_cost: float
    beta_final: complex
    iterations: int
    converged: bool
    cost_trace: tuple[float, ...]
    beta_trace: tuple[complex, ...] = ()
    constants: dict = field(default_factory=dict)

    def waveform_matrix(self, cfg: RadarConfig) -> np.ndarray:
        """``x_sol`` as a ``T x N`` array (row ``t`` is the sample vector at time ``t``)."""
        return self.x_sol.reshape(cfg.num_samples, cfg.num_antennas)


def solve(
    cfg: RadarConfig,
    op: BeamOperator,
    d: DesiredPattern,
    *,
    theta0: float = THETA0,
    callback: Callable[[GampState], None] | None = None,
) -> SynthesisResult:
    """Iterate :func:`gamp_step` until the cost stalls or ``max_iters`` is hit.

    Raises :class:`DivergenceError` on non-finite messages.  Running out of
    iterations is not an error; the result carries ``converged=False``.
    """
    c = build_constellation(cfg.dac_bits)
    state = initial_state(op, theta0)
    converged = False
    for _ in range(cfg.max_iters):
        state = gamp_step(state, op, d, c, cfg.damping, cfg.alpha)
        if callback is not None:
            callback(state)
        if has_converged(state.cost_trace, cfg.rel_tol):
            converged = True
            break
    idx = prox_indices(state.x_hat, c)
    x_sol = c.points[idx]
    final_cost, beta_final = cost_of_field(op.scaled(1.0).forward(x_sol), d.d, cfg.alpha)
    return SynthesisResult(
        x_sol=x_sol,
        x_indices=idx,
        final_cost=final_cost,
        beta_final=beta_final,
        iterations=state.iter,
        converged=converged,
        cost_trace=state.cost_trace,
        beta_trace=state.beta_trace,
        constants={
            "theta0": theta0,
            "eps": EPS,
            "xi_floor": XI_FLOOR,
            "rel_tol": cfg.rel_tol,
            "stop_window": STOP_WINDOW,
            "tie_break": TIE_BREAK,
            "tie_tol": TIE_TOL,
            "zero_tol": ZERO_TOL,
            "arg_zero": 0.0,
            "damping": cfg.damping,
            "alpha": cfg.alpha,
        },
    )

"""Slow reference implementations used to check the fast paths.

Nothing here is meant for production-size problems: exhaustive search is
capped at 2**20 candidates, and the dense GAMP transcription materializes
the full operator.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import Constellation, DesiredPattern, RadarConfig, build_constellation
from .gamp import XI_FLOOR, ZERO_TOL, GampState, safe_angle
from .operator import BeamOperator, fft_workers

__all__ = [
    "BRUTE_FORCE_CAP",
    "OracleSizeError",
    "OracleResult",
    "brute_force_solve",
    "grid_maximize_output",
    "dense_gamp_step",
    "nearest_point",
]

BRUTE_FORCE_CAP = 2**20
_BATCH = 4096
TIE_RTOL = 1e-12


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    x_opt: np.ndarray
    indices: np.ndarray
    cost_opt: float
    candidates_evaluated: int


def _batch_costs(dense: np.ndarray, cand: np.ndarray, d: np.ndarray, alpha: float) -> np.ndarray:
    """Cost of each column of ``cand`` with ``s`` and ``beta`` set per column."""
    y = dense @ cand
    s = np.sqrt(d)[:, None] * np.exp(1j * safe_angle(y))
    beta = np.sum(np.conj(y) * s, axis=0) / (np.sum(np.abs(y) ** 2, axis=0) + alpha)
    s = np.sqrt(d)[:, None] * np.exp(1j * safe_angle(beta[None, :] * y))
    r = beta[None, :] * y - s
    return np.sum(np.abs(r) ** 2, axis=0) + alpha * np.abs(beta) ** 2


def _digits(start: int, stop: int, base: int, width: int) -> np.ndarray:
    """Lexicographic index tuples for candidates ``start..stop-1`` (first digit most significant)."""
    codes = np.arange(start, stop, dtype=np.int64)
    out = np.empty((width, codes.size), dtype=np.int64)
    for pos in range(width - 1, -1, -1):
        out[pos] = codes % base
        codes //= base
    return out


def brute_force_solve(cfg: RadarConfig, op: BeamOperator, d: DesiredPattern) -> OracleResult:
    """Exhaustive minimum over every constellation-valued ``x``.

    Ties resolve to the earliest candidate in lexicographic index order.
    """
    c = build_constellation(cfg.dac_bits)
    width = cfg.num_antennas * cfg.num_samples
    total = c.size**width
    if total > BRUTE_FORCE_CAP:
        raise OracleSizeError(f"{total} candidates exceed the cap of {BRUTE_FORCE_CAP}")
    dense = op.materialize_dense()
    dv = d.d
    alpha = cfg.alpha

    def costs_in(start: int) -> np.ndarray:
        stop = min(start + _BATCH, total)
        return _batch_costs(dense, c.points[_digits(start, stop, c.size, width)], dv, alpha)

    starts = range(0, total, _BATCH)
    workers = fft_workers()
    if workers == 1 or len(starts) == 1:
        parts = [costs_in(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=None if workers < 0 else workers) as pool:
            parts = list(pool.map(costs_in, starts))
    costs = np.concatenate(parts)
    best_cost = float(costs.min())
    # candidates equal up to roundoff count as ties; the earliest one wins
    best_code = int(np.flatnonzero(costs <= best_cost + TIE_RTOL * max(abs(best_cost), 1.0))[0])
    best_cost = float(costs[best_code])
    idx = _digits(best_code, best_code + 1, c.size, width)[:, 0]
    return OracleResult(
        x_opt=c.points[idx],
        indices=idx,
        cost_opt=best_cost,
        candidates_evaluated=total,
    )


def _output_objective(w: np.ndarray, u: complex, d: float, theta: float) -> np.ndarray:
    # rho(w, d) - |w - u|^2 / theta, with rho(w, d) = -(|w| - sqrt d)^2
    return -((np.abs(w) - math.sqrt(d)) ** 2) - np.abs(w - u) ** 2 / theta


def grid_maximize_output(
    u: complex,
    d: float,
    theta: float,
    *,
    steps: int = 400,
    passes: int = 6,
    zoom_points: int = 41,
) -> tuple[complex, complex]:
    """Maximize the scalar output-step objective on a polar grid.

    A ``steps x steps`` grid over radius ``[0, 2(|u| + sqrt d)]`` and phase
    ``[0, 2 pi)`` is followed by ``passes`` zoom passes, each covering two
    previous cells either side of the incumbent at 10x finer spacing.
    Returns ``(w_star, (w_star - u) / theta)``.
    """
    if not theta > 0:
        raise ValueError("theta must be positive")
    r_max = 2.0 * (abs(u) + math.sqrt(d))
    if r_max == 0.0:
        return 0j, 0j
    radii = np.linspace(0.0, r_max, steps)
    phases = np.linspace(0.0, 2.0 * np.pi, steps, endpoint=False)
    dr = radii[1] - radii[0]
    dp = phases[1] - phases[0]
    rr, pp = np.meshgrid(radii, phases, indexing="ij")
    vals = _output_objective(rr * np.exp(1j * pp), u, d, theta)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    r0, p0 = radii[i], phases[j]
    for _ in range(passes):
        radii = np.clip(np.linspace(r0 - 2 * dr, r0 + 2 * dr, zoom_points), 0.0, None)
        phases = np.linspace(p0 - 2 * dp, p0 + 2 * dp, zoom_points)
        rr, pp = np.meshgrid(radii, phases, indexing="ij")
        vals = _output_objective(rr * np.exp(1j * pp), u, d, theta)
        i, j = np.unravel_index(np.argmax(vals), vals.shape)
        r0, p0 = radii[i], phases[j]
        dr /= 10.0
        dp /= 10.0
    w_star = complex(r0 * cmath.exp(1j * p0))
    return w_star, (w_star - u) / theta


def nearest_point(v: complex, c: Constellation) -> complex:
    """Projection by direct distance comparison; first index wins (near-)ties.

    ``v`` is scaled to the unit circle first (the nearest point does not
    depend on ``|v|``), so the tie tolerance is in units of phase.
    """
    if v == 0:
        return complex(c.points[0])
    v = v / abs(v)
    dist = [abs(p - v) for p in c.points]
    best = min(dist)
    tol = 1e-9 * c.step
    return complex(next(p for p, dd in zip(c.points, dist) if dd <= best + tol))


def dense_gamp_step(
    dense: np.ndarray,
    state: GampState,
    d: DesiredPattern,
    c: Constellation,
    mu: float,
    alpha: float,
    eps: float = 1e-12,
) -> GampState:
    """One iteration written out with explicit matrices and scalar loops."""
    dv = d.d
    rows, cols = dense.shape
    a = state.beta * dense
    a2 = np.abs(a) ** 2
    p = a @ state.x_hat

    z = np.empty(rows, dtype=complex)
    gp = np.empty(rows)
    for j in range(rows):
        uj = p[j] - state.theta[j] * state.z[j]
        th = state.theta[j]
        sd = math.sqrt(dv[j])
        ph = cmath.phase(uj) if uj != 0 else 0.0
        z[j] = (sd * cmath.exp(1j * ph) - uj) / (1.0 + th)
        gp[j] = max(1.0 / (1.0 + th) - sd / (2.0 * max(abs(uj), eps) * (1.0 + th)), 0.0)
    xi = np.maximum(a2.T @ gp, XI_FLOOR)

    r = a.conj().T @ z
    v = [r[i] + xi[i] * state.x_hat[i] for i in range(cols)]
    vmax = max(abs(vi) for vi in v)
    x_hat = np.empty(cols, dtype=complex)
    fp = np.empty(cols)
    for i, vi in enumerate(v):
        if abs(vi) <= ZERO_TOL * vmax:
            vi = 0j
        x_hat[i] = (1.0 - mu) * state.x_hat[i] + mu * nearest_point(vi / xi[i], c)
        fp[i] = 1.0 / (2.0 * max(abs(vi), eps))
    theta = mu * (a2 @ fp)

    y = dense @ x_hat
    s = np.array([math.sqrt(dv[j]) * cmath.exp(1j * (cmath.phase(y[j]) if y[j] != 0 else 0.0)) for j in range(rows)])
    beta = complex(np.vdot(y, s) / (np.vdot(y, y).real + alpha))

    proj = np.array([nearest_point(v, c) for v in x_hat])
    trace_cost = float(_batch_costs(dense, proj[:, None], dv, alpha)[0])
    return GampState(
        x_hat=x_hat,
        z=z,
        theta=theta,
        xi=xi,
        beta=beta,
        iter=state.iter + 1,
        cost_trace=state.cost_trace + (trace_cost,),
        beta_trace=state.beta_trace + (beta,),
    )

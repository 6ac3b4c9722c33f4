"""Fast property suite run by ``synth verify``.

Each check returns a :class:`CheckResult`; none raises on a failed property.
Checks that need the dense operator run on reduced shapes that keep the
config's ``K`` and direction set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import RadarConfig, build_constellation, build_flat_pattern, validate_config
from .gamp import initial_state, gamp_step, output_derivative, output_function, prox_constellation
from .operator import BeamOperator, build_operator, build_steering_set, centered_dft
from .oracle import dense_gamp_step, grid_maximize_output, nearest_point

__all__ = ["CheckResult", "CorruptedSignOperator", "run_checks", "wirtinger_fd", "ADJOINT_TOL", "DENSE_TOL"]

ADJOINT_TOL = 1e-10
DENSE_TOL = 1e-10
GRID_TOL = 1e-3
FD_TOL = 1e-5


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


class CorruptedSignOperator(BeamOperator):
    """Operator whose adjoint uses the wrong DFT sign; a negative control."""

    def _time_from_freq(self, xf: np.ndarray) -> np.ndarray:
        return centered_dft(xf, axis=0)


def _rand_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _rel(a, b) -> float:
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) / scale


def check_adjoint(op: BeamOperator, rng: np.random.Generator, trials: int = 3) -> CheckResult:
    rows, cols = op.shape
    worst = 0.0
    for _ in range(trials):
        x = _rand_complex(rng, cols)
        z = _rand_complex(rng, rows)
        lhs = np.vdot(z, op.forward(x))
        rhs = np.vdot(op.adjoint(z), x)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return CheckResult("adjoint", worst <= ADJOINT_TOL, f"max rel mismatch {worst:.3g} (tol {ADJOINT_TOL:g}) at {rows}x{cols}")


def _reduced(cfg: RadarConfig, n: int, t: int) -> RadarConfig:
    k = cfg.num_directions
    return validate_config(
        replace(cfg, num_antennas=max(n, k), num_samples=t, passband=None, regularization=None)
    )


def check_dense(cfg: RadarConfig, rng: np.random.Generator, op_cls=BeamOperator) -> CheckResult:
    worst = 0.0
    shapes = []
    for n, t in ((1, 2), (2, 4), (4, 8)):
        small = _reduced(cfg, n, t)
        op = op_cls(build_steering_set(small), 1.0)
        dense = op.materialize_dense()
        x = _rand_complex(rng, op.shape[1])
        z = _rand_complex(rng, op.shape[0])
        worst = max(worst, _rel(op.forward(x), dense @ x), _rel(op.adjoint(z), dense.conj().T @ z))
        shapes.append(f"{small.num_antennas}x{t}")
    return CheckResult("dense-vs-fast", worst <= DENSE_TOL, f"max rel error {worst:.3g} over N x T in {shapes}")


def check_gamp_step(cfg: RadarConfig, op_cls=BeamOperator) -> CheckResult:
    small = _reduced(cfg, 2, 4)
    op = op_cls(build_steering_set(small), 1.0)
    dense = op.materialize_dense()
    d = build_flat_pattern(small)
    c = build_constellation(small.dac_bits)
    fast = slow = initial_state(op)
    worst = 0.0
    for _ in range(3):
        fast = gamp_step(fast, op, d, c, small.damping, small.alpha)
        slow = dense_gamp_step(dense, slow, d, c, small.damping, small.alpha)
        worst = max(worst, _rel(fast.x_hat, slow.x_hat), _rel(fast.z, slow.z), _rel(fast.theta, slow.theta))
    return CheckResult("gamp-step dense transcription", worst <= 1e-9, f"max rel deviation {worst:.3g} over 3 steps")


def check_output_function(rng: np.random.Generator, draws: int = 50) -> CheckResult:
    worst = 0.0
    for _ in range(draws):
        u = complex(*(rng.uniform(-3, 3, 2)))
        if abs(u) < 0.1:
            u += 0.5
        dd = float(rng.uniform(0, 4))
        th = float(rng.uniform(0.1, 10))
        _, g_grid = grid_maximize_output(u, dd, th)
        worst = max(worst, abs(complex(output_function(u, dd, th)) - g_grid))
    return CheckResult("output function vs grid", worst <= GRID_TOL, f"max abs error {worst:.3g} over {draws} draws")


def wirtinger_fd(fn, u: complex, h: float = 1e-6) -> complex:
    """Central-difference Wirtinger derivative ``(d/dx - j d/dy) / 2``."""
    dx = (fn(u + h) - fn(u - h)) / (2 * h)
    dy = (fn(u + 1j * h) - fn(u - 1j * h)) / (2 * h)
    return 0.5 * (dx - 1j * dy)


def check_output_derivative(rng: np.random.Generator, draws: int = 50) -> CheckResult:
    worst = 0.0
    for _ in range(draws):
        u = complex(float(rng.uniform(0.1, 3)) * np.exp(1j * rng.uniform(0, 2 * math.pi)))
        dd = float(rng.uniform(0, 4))
        th = float(rng.uniform(0.1, 10))
        fd = -wirtinger_fd(lambda w: complex(output_function(w, dd, th)), u)
        worst = max(worst, abs(fd - float(output_derivative(u, dd, th))))
    return CheckResult("output derivative vs finite differences", worst <= FD_TOL, f"max abs error {worst:.3g}")


def check_constellation(cfg: RadarConfig, rng: np.random.Generator, draws: int = 200) -> CheckResult:
    c = build_constellation(cfg.dac_bits)
    ok = c.size == 2**cfg.dac_bits and np.allclose(np.abs(c.points), 1.0, atol=1e-15)
    v = _rand_complex(rng, draws)
    fast = prox_constellation(v, c)
    slow = np.array([nearest_point(x, c) for x in v])
    ok = ok and np.array_equal(fast, slow)
    return CheckResult("constellation", bool(ok), f"{c.size} points, prox agrees with distance search on {draws} draws")


def run_checks(cfg: RadarConfig, *, corrupt_dft_sign: bool = False, seed: int | None = None) -> list[CheckResult]:
    """Run the suite against ``cfg``'s shapes."""
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    op_cls = CorruptedSignOperator if corrupt_dft_sign else BeamOperator
    op = op_cls(build_operator(cfg).steering, 1.0)
    return [
        check_adjoint(op, rng),
        check_dense(cfg, rng, op_cls),
        check_gamp_step(cfg, op_cls),
        check_output_function(rng),
        check_output_derivative(rng),
        check_constellation(cfg, rng),
    ]

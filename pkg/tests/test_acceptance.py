"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line (printed in the terminal summary)
before asserting, so the full scorecard appears even when some fail.
"""

import itertools
import json
import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, rand_complex, raw_config
from radarwave.calibration import tiny_instance_calibration
from radarwave.checks import wirtinger_fd
from radarwave.cli import OUTPUT_FILES, main
from radarwave.config import DesiredPattern, build_constellation, build_flat_pattern, make_config
from radarwave.gamp import cost_of_field, optimal_beta, optimal_s, output_derivative, output_function
from radarwave.metrics import (
    DirectionalWaveforms,
    circular_correlation,
    compute_report,
    default_angle_grid,
    directional_waveforms,
    psd,
    radiation_pattern,
)
from radarwave.operator import build_operator
from radarwave.oracle import grid_maximize_output


def record(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def desk_config():
    return make_config(num_antennas=16, num_samples=256, num_directions=4, dac_bits=2, damping=0.3, passband=(-64, 64))


@pytest.fixture(scope="module")
def desk():
    from radarwave.gamp import solve

    cfg = desk_config()
    result = solve(cfg, build_operator(cfg), build_flat_pattern(cfg))
    return cfg, result, compute_report(result.x_sol, cfg)


def test_c1_operator_correctness():
    rng = np.random.default_rng(101)
    worst_adj = worst_dense = 0.0
    for n, t, k in itertools.product([1, 2, 4], [2, 4, 8], [1, 2]):
        beta = complex(*rng.standard_normal(2))
        op = build_operator(raw_config(n, t, k), beta)
        dense = beta * op.materialize_dense()
        a2 = np.abs(dense) ** 2
        for _ in range(100):
            x = rand_complex(rng, n * t)
            z = rand_complex(rng, k * t)
            gap = abs(np.vdot(z, op.forward(x)) - np.vdot(op.adjoint(z), x))
            worst_adj = max(worst_adj, gap / (np.linalg.norm(x) * np.linalg.norm(z)))
        x = rand_complex(rng, n * t)
        z = rand_complex(rng, k * t)
        f = rng.uniform(0, 1, n * t)
        g = rng.uniform(0, 1, k * t)
        for fast, slow in (
            (op.forward(x), dense @ x),
            (op.adjoint(z), dense.conj().T @ z),
            (op.magsq_forward_sum(f), a2 @ f),
            (op.magsq_adjoint_sum(g), a2.T @ g),
        ):
            worst_dense = max(worst_dense, np.linalg.norm(fast - slow) / np.linalg.norm(slow))
    passed = worst_adj <= 1e-10 and worst_dense <= 1e-10
    record(1, "operator correctness", passed, f"adjoint gap {worst_adj:.2e}, dense-vs-fast {worst_dense:.2e} (tol 1e-10, 18 shapes)")
    assert passed


def test_c2_scalar_function_oracles():
    rng = np.random.default_rng(202)
    worst_g = worst_gp = 0.0
    for _ in range(1000):
        u = complex(rng.uniform(0.1, 4.0) * np.exp(1j * rng.uniform(0, 2 * math.pi)))
        d = float(rng.uniform(0, 4))
        theta = float(rng.uniform(0.1, 10))
        _, g_grid = grid_maximize_output(u, d, theta)
        worst_g = max(worst_g, abs(complex(output_function(u, d, theta)) - g_grid))
        fd = -wirtinger_fd(lambda w: complex(output_function(w, d, theta)), u)
        worst_gp = max(worst_gp, abs(fd - float(output_derivative(u, d, theta))))
    passed = worst_g <= 1e-3 and worst_gp <= 1e-5
    record(2, "scalar-function oracles", passed, f"g vs grid {worst_g:.2e} (tol 1e-3), g' vs finite differences {worst_gp:.2e} (tol 1e-5), 1000 draws")
    assert passed


def test_c3_closed_form_optimality():
    rng = np.random.default_rng(303)
    n = 64
    y = rand_complex(rng, n)
    d = rng.uniform(0, 3, n)
    d[:8] = 0.0
    alpha = 16.0
    s = optimal_s(y, d)
    base_s = np.linalg.norm(y - s) ** 2
    beta = optimal_beta(s, y, alpha)
    obj = lambda b, ss: np.linalg.norm(b * y - ss) ** 2 + alpha * abs(b) ** 2
    base_b = obj(beta, s)
    s_losses = b_losses = 0
    for i in range(1000):
        # alternate global and local phase perturbations of a feasible s
        spread = math.pi if i % 2 == 0 else 1e-3
        s_tilde = np.sqrt(d) * np.exp(1j * (np.angle(s) + rng.uniform(-spread, spread, n)))
        s_losses += np.linalg.norm(y - s_tilde) ** 2 < base_s - 1e-12 * base_s
        scale = 1.0 if i % 2 == 0 else 1e-4
        b_tilde = beta + scale * complex(*rng.standard_normal(2))
        b_losses += obj(b_tilde, s) < base_b - 1e-12 * base_b
    # the pair is also jointly optimal for the field it was derived from
    c_joint, b_joint = cost_of_field(y, d, alpha)
    joint_ok = math.isclose(c_joint, obj(b_joint, optimal_s(b_joint * y, d)), rel_tol=1e-12)
    passed = s_losses == 0 and b_losses == 0 and joint_ok
    record(3, "closed-form optimality", passed, f"s beaten {s_losses}/1000, beta beaten {b_losses}/1000")
    assert passed


def test_c4_tiny_instance_quality(tmp_path):
    report = tiny_instance_calibration(instances=50, seed=0)
    cfg_path = tmp_path / "tiny.cfg"
    cfg_path.write_text("N = 2\nT = 2\nK = 1\nb = 2\n")
    main(["run", str(cfg_path), "--out", str(tmp_path / "out")])
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    recorded = manifest.get("tiny_instance_calibration", {})
    passed = report.fraction_within >= 0.8 and recorded.get("instances") == 50
    record(
        4,
        "tiny-instance quality",
        passed,
        f"{report.within_limit}/50 within 2x of the exhaustive optimum (need >= 40), worst ratio {max(report.ratios):.3f}, recorded in manifest",
    )
    assert passed


def test_c5_desk_spectral_shaping(desk):
    cfg, _, rep = desk
    passed = rep.oob_suppression_db >= 20.0
    record(
        5,
        "desk-scale spectral shaping",
        passed,
        f"OOB suppression {rep.oob_suppression_db:.2f} dB on the direction-averaged spectrum (need >= 20); antenna-averaged {rep.antenna_oob_db:.2f} dB",
    )
    assert passed


def test_c6_desk_convergence(desk):
    _, result, _ = desk
    first = None
    trace = result.cost_trace
    for i in range(5, len(trace)):
        if abs(trace[i] - trace[i - 5]) <= 1e-4 * trace[i - 5]:
            first = i + 1
            break
    passed = result.converged and result.iterations <= 60
    record(
        6,
        "desk-scale convergence",
        passed,
        f"converged={result.converged} after {result.iterations} iterations (need <= 60); "
        f"final cost {result.final_cost:.3f}, cost at iteration 60 {trace[min(59, len(trace) - 1)]:.3f}",
    )
    assert first == (result.iterations if result.converged else None)
    assert passed


def test_c7_desk_correlations(desk):
    _, _, rep = desk
    auto_peak = rep.peak_autocorr_sidelobe_db
    passed = rep.peak_crosscorr_db <= -15.0 and auto_peak <= -10.0 and np.allclose(rep.autocorr[:, 0], 0.0, atol=1e-12)
    record(
        7,
        "desk-scale correlations",
        passed,
        f"peak cross-correlation {rep.peak_crosscorr_db:.2f} dB (need <= -15), peak autocorrelation sidelobe {auto_peak:.2f} dB (need <= -10)",
    )
    assert passed


def test_c8_metric_identities():
    rng = np.random.default_rng(808)
    cfg = make_config(num_antennas=8, num_samples=64, num_directions=3)
    c = build_constellation(cfg.dac_bits)
    worst_parseval = worst_sym = worst_phase = 0.0
    grid = default_angle_grid(256)
    for _ in range(10):
        x = c.points[rng.integers(0, c.size, 8 * 64)]
        worst_parseval = max(worst_parseval, abs(np.sum(psd(x, cfg)) - 64) / 64)
        r = circular_correlation(directional_waveforms(x, cfg))
        flipped = np.conj(np.swapaxes(r, 0, 1))[:, :, (-np.arange(64)) % 64]
        worst_sym = max(worst_sym, np.max(np.abs(r - flipped)) / np.max(np.abs(r)))
        y = np.exp(1j * rng.uniform(0, 2 * np.pi)) * x
        a, b = compute_report(x, cfg, grid), compute_report(y, cfg, grid)
        lin = lambda db: 10 ** (db / 20)
        worst_phase = max(
            worst_phase,
            np.max(np.abs(a.psd - b.psd)) / np.max(a.psd),
            np.max(np.abs(lin(a.autocorr) - lin(b.autocorr))),
            np.max(np.abs(lin(a.crosscorr) - lin(b.crosscorr))),
            np.max(np.abs(radiation_pattern(x, cfg, grid) - radiation_pattern(y, cfg, grid))),
        )
    passed = worst_parseval <= 1e-10 and worst_sym <= 1e-12 and worst_phase <= 1e-10
    record(
        8,
        "metric identities",
        passed,
        f"Parseval {worst_parseval:.1e} (tol 1e-10), conjugate symmetry {worst_sym:.1e} (tol 1e-12), global phase {worst_phase:.1e} (tol 1e-10)",
    )
    assert passed


def test_c9_reproducibility(tmp_path):
    cfg_path = tmp_path / "desk.cfg"
    cfg_path.write_text("N = 16\nT = 256\nK = 4\nb = 2\nmu = 0.3\n")
    first, second, third = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    main(["run", str(cfg_path), "--out", str(first), "--no-calibration"])
    main(["run", str(first / "manifest.json"), "--out", str(second), "--no-calibration"])
    main(["run", str(first / "manifest.json"), "--out", str(third), "--no-calibration"])
    same = all(
        (first / name).read_bytes() == (second / name).read_bytes() == (third / name).read_bytes() for name in OUTPUT_FILES if name.endswith(".csv")
    )
    record(9, "reproducibility", same, "CSV outputs of two reruns from the manifest are byte-identical" if same else "CSV outputs differ")
    assert same

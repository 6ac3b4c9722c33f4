"""``synth`` command line: ``run`` a synthesis or ``verify`` the operator and scalar maps.

Exit codes: 0 success (converged / all checks pass), 2 run finished without
meeting the stopping rule, 1 error or failed check.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .calibration import tiny_instance_calibration
from .checks import run_checks
from .config import ConfigError, RadarConfig, build_flat_pattern, config_from_mapping, load_config
from .gamp import DivergenceError, solve
from .metrics import CORRELATION_KIND, PATTERN_DEFINITION, compute_report, to_db
from .operator import build_operator

__all__ = ["main", "run", "verify", "load_run_config", "OUTPUT_FILES"]

OUTPUT_FILES = (
    "waveform.csv",
    "convergence.csv",
    "psd.csv",
    "autocorr.csv",
    "crosscorr.csv",
    "pattern.csv",
    "manifest.json",
)


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _parse_overrides(items: Sequence[str] | None) -> dict[str, str]:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def config_snapshot(cfg: RadarConfig) -> dict[str, Any]:
    """Config as a mapping that :func:`config_from_mapping` reads back exactly."""
    snap = cfg.to_dict()
    snap["directions_rad"] = snap.pop("directions")
    return snap


def load_run_config(path: str | Path, overrides: dict[str, str] | None = None) -> RadarConfig:
    """Read a ``key = value`` config file or a previous run's ``manifest.json``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror or exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            raw = dict(json.loads(text)["config"])
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"{str(path)!r} is not a run manifest") from exc
        for key, value in (overrides or {}).items():
            raw[key] = value
            if key.lower() in ("k", "num_directions"):
                raw.pop("directions_rad", None)
        return config_from_mapping(raw)
    return load_config(path, overrides)


def run(config_path: str | Path, out_dir: str | Path, overrides: dict[str, str] | None = None, *, calibrate: bool = True) -> int:
    cfg = load_run_config(config_path, overrides)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    op = build_operator(cfg)
    d = build_flat_pattern(cfg)
    result = solve(cfg, op, d)
    report = compute_report(result.x_sol, cfg)
    duration = time.perf_counter() - start

    _write_csv(
        out / "waveform.csv",
        ("index", "real", "imag", "constellation_index"),
        ((i, _num(v.real), _num(v.imag), int(k)) for i, (v, k) in enumerate(zip(result.x_sol, result.x_indices))),
    )
    total_d = float(np.sum(d.d))
    _write_csv(
        out / "convergence.csv",
        ("iteration", "cost", "normalized_cost", "beta_real", "beta_imag"),
        (
            (i + 1, _num(c), _num(c / total_d), _num(b.real), _num(b.imag))
            for i, (c, b) in enumerate(zip(result.cost_trace, result.beta_trace))
        ),
    )
    freqs = cfg.freq_indices
    _write_csv(
        out / "psd.csv",
        ("m", "freq_hz", "antenna_psd_db", "directional_psd_db"),
        (
            (int(m), _num(m / (cfg.num_samples * cfg.sample_interval)), _num(a), _num(b))
            for m, a, b in zip(freqs, to_db(report.psd), to_db(report.directional_psd))
        ),
    )
    k = cfg.num_directions
    lags = range(cfg.num_samples)
    _write_csv(
        out / "autocorr.csv",
        ("lag", "pair", "value_db"),
        ((lag, f"{i}-{i}", _num(report.autocorr[i, lag])) for i in range(k) for lag in lags),
    )
    _write_csv(
        out / "crosscorr.csv",
        ("lag", "pair", "value_db"),
        ((lag, f"{i}-{j}", _num(report.crosscorr[i, j, lag])) for i in range(k) for j in range(i + 1, k) for lag in lags),
    )
    _write_csv(
        out / "pattern.csv",
        ("angle_rad", "gain_db"),
        ((_num(a), _num(g)) for a, g in zip(report.angle_grid, report.pattern)),
    )

    manifest = {
        "tool": "synth",
        "version": __version__,
        "seed": cfg.seed,
        "config": config_snapshot(cfg),
        "duration_s": duration,
        "converged": result.converged,
        "iterations": result.iterations,
        "final_cost": result.final_cost,
        "beta_final": [result.beta_final.real, result.beta_final.imag],
        "oob_suppression_db": report.oob_suppression_db,
        "antenna_oob_db": report.antenna_oob_db,
        "peak_crosscorr_db": report.peak_crosscorr_db,
        "peak_autocorr_sidelobe_db": report.peak_autocorr_sidelobe_db,
        "constants": result.constants,
        "correlation_kind": CORRELATION_KIND,
        "pattern_definition": PATTERN_DEFINITION,
        "oob_definition": "mean passband over mean stopband of the direction-averaged spectrum",
    }
    if calibrate:
        manifest["tiny_instance_calibration"] = tiny_instance_calibration(seed=cfg.seed).to_dict()
    with open(out / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")

    print(
        f"{'converged' if result.converged else 'not converged'} after {result.iterations} iterations, "
        f"cost {result.final_cost:.6g}, OOB {report.oob_suppression_db:.2f} dB, "
        f"peak cross-correlation {report.peak_crosscorr_db:.2f} dB -> {out}"
    )
    return 0 if result.converged else 2


def verify(config_path: str | Path, overrides: dict[str, str] | None = None, *, corrupt_dft_sign: bool = False) -> int:
    cfg = load_run_config(config_path, overrides)
    results = run_checks(cfg, corrupt_dft_sign=corrupt_dft_sign)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="synth", description="Quantized-phase MIMO radar waveform synthesis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="synthesize a waveform and write CSV results")
    p_run.add_argument("config", help="key = value config file or a manifest.json from an earlier run")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--override", action="append", metavar="KEY=VALUE", help="replace a config entry (repeatable)")
    p_run.add_argument("--no-calibration", action="store_true", help="skip the tiny-instance calibration")

    p_ver = sub.add_parser("verify", help="run the operator and scalar-map property checks")
    p_ver.add_argument("config")
    p_ver.add_argument("--override", action="append", metavar="KEY=VALUE")
    p_ver.add_argument("--corrupt-dft-sign", action="store_true", help="negative control: flip the adjoint DFT sign")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = _parse_overrides(args.override)
        if args.command == "run":
            return run(args.config, args.out, overrides, calibrate=not args.no_calibration)
        return verify(args.config, overrides, corrupt_dft_sign=args.corrupt_dft_sign)
    except ConfigError as exc:
        print(f"synth: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except DivergenceError as exc:
        print(f"synth: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"synth: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

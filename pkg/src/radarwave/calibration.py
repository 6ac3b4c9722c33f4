"""Tiny-instance calibration of GAMP against exhaustive search.

Instances have ``N = T = 2``, ``K = 1``, ``b = 2`` (256 candidates), a
random direction and a random nonnegative desired pattern, all drawn from
one seeded generator so the calibration is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .config import DesiredPattern, make_config
from .gamp import solve
from .operator import build_operator
from .oracle import brute_force_solve

__all__ = ["CalibrationReport", "tiny_instance_calibration", "RATIO_LIMIT"]

RATIO_LIMIT = 2.0


@dataclass(frozen=True)
class CalibrationReport:
    instances: int
    within_limit: int
    ratio_limit: float
    ratios: tuple[float, ...]
    seed: int

    @property
    def fraction_within(self) -> float:
        return self.within_limit / self.instances

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ratios"] = list(self.ratios)
        out["fraction_within"] = self.fraction_within
        return out


def tiny_instance_calibration(
    instances: int = 50, seed: int = 0, *, damping: float = 0.3, max_iters: int = 200
) -> CalibrationReport:
    """Ratio of GAMP's projected final cost to the exhaustive optimum per instance."""
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(instances):
        phi = float(rng.uniform(0.05, math.pi - 0.05))
        cfg = make_config(
            num_antennas=2,
            num_samples=2,
            directions=(phi,),
            dac_bits=2,
            damping=damping,
            max_iters=max_iters,
        )
        d = DesiredPattern.from_array(rng.uniform(0.0, 2.0, size=(2, 1)), 2, 1)
        op = build_operator(cfg)
        best = brute_force_solve(cfg, op, d).cost_opt
        got = solve(cfg, op, d).final_cost
        if best > 0:
            ratios.append(got / best)
        else:
            ratios.append(1.0 if got <= 1e-12 else math.inf)
    within = sum(r <= RATIO_LIMIT for r in ratios)
    return CalibrationReport(
        instances=instances,
        within_limit=int(within),
        ratio_limit=RATIO_LIMIT,
        ratios=tuple(float(r) for r in ratios),
        seed=seed,
    )

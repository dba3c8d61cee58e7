"""Seeded synthetic dataset generators.

All generators draw from numpy's default PCG64 bit generator via
``np.random.default_rng(seed)``, a documented algorithm with fixed
constants, so outputs are reproducible across platforms for a given seed.

Three families:

* ``gen_2d``: uniform samples over a staircase-shaped union of three
  axis-aligned rectangles in (f1, f2).
* ``gen_4d``: an equal three-way mixture of isotropic Gaussians in
  (f1..f4) whose centers are chosen so that exactly two components
  coincide in each of the subspaces (f1, f2) and (f3, f4).
* ``gen_energy_surrogate``: a synthetic stand-in for a design trade-off
  study with columns investment, yearly_costs, resilience. This is NOT
  real simulation data; it only mimics the qualitative structure (a cost
  trend driven by investment, resilience encoded as values <= 0).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import ConfigError

RNG_IDENTITY = "numpy.random.default_rng (PCG64)"

# (f1_lo, f1_hi, f2_lo, f2_hi) of the staircase rectangles
RECTANGLES_2D = ((0.0, 4.0, 0.0, 4.0), (4.0, 10.0, 0.0, 6.0), (6.0, 10.0, 6.0, 10.0))

CENTERS_4D = np.array(
    [
        [0.0, 0.0, 0.0, 0.0],
        [10.0, 10.0, 10.0, 10.0],
        [10.0, 10.0, 0.0, 0.0],
    ]
)

# energy surrogate constants: yearly = A - B*u + noise,
# resilience = -(C*u + D*(A - yearly)) + noise, clipped to <= 0
ENERGY_A = 100.0
ENERGY_B = 60.0
ENERGY_C = 2.0
ENERGY_D = 0.5
ENERGY_NOISE_STD = 3.0


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n_samples: int
    seed: int
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in ("uniform2d", "gaussian4d", "energy_surrogate"):
            raise ConfigError(f"unknown generator kind {self.kind!r}")
        if self.n_samples < 1:
            raise ConfigError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.kind == "gaussian4d" and self.sigma is not None and not self.sigma > 0:
            raise ConfigError(f"sigma must be > 0, got {self.sigma}")

    def to_json_dict(self) -> dict:
        doc = {"kind": self.kind, "n_samples": self.n_samples, "seed": self.seed, "rng": RNG_IDENTITY}
        if self.kind == "gaussian4d":
            doc["sigma"] = self.sigma if self.sigma is not None else 1.0
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def region_2d_mask(points) -> np.ndarray:
    """True where (f1, f2) lies inside the staircase union (half-open rectangles)."""
    p = np.asarray(points, dtype=float)
    f1, f2 = p[:, 0], p[:, 1]
    mask = np.zeros(p.shape[0], dtype=bool)
    for lo1, hi1, lo2, hi2 in RECTANGLES_2D:
        mask |= (f1 >= lo1) & (f1 < hi1) & (f2 >= lo2) & (f2 < hi2)
    return mask


def gen_2d(n: int, seed: int = 0) -> Dataset:
    """Uniform samples over the staircase region, area-proportional across rectangles."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    areas = np.array([(hi1 - lo1) * (hi2 - lo2) for lo1, hi1, lo2, hi2 in RECTANGLES_2D])
    which = rng.choice(len(RECTANGLES_2D), size=n, p=areas / areas.sum())
    u = rng.random((n, 2))
    rects = np.asarray(RECTANGLES_2D)[which]
    f1 = rects[:, 0] + u[:, 0] * (rects[:, 1] - rects[:, 0])
    f2 = rects[:, 2] + u[:, 1] * (rects[:, 3] - rects[:, 2])
    return Dataset(np.column_stack([f1, f2]), ("f1", "f2"))


def gen_4d(n: int, seed: int = 0, sigma: float = 1.0) -> Dataset:
    """Equal-thirds mixture of isotropic Gaussians around the three fixed centers.

    Any remainder of n modulo 3 is distributed round-robin starting at the
    first center. Rows are shuffled so the component order is not encoded
    in the row order.
    """
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    if not sigma > 0:
        raise ConfigError(f"sigma must be > 0, got {sigma}")
    rng = np.random.default_rng(seed)
    counts = np.full(3, n // 3)
    counts[: n % 3] += 1
    blocks = [
        center + sigma * rng.standard_normal((count, 4))
        for center, count in zip(CENTERS_4D, counts)
    ]
    values = np.vstack(blocks)
    values = values[rng.permutation(n)]
    return Dataset(values, ("f1", "f2", "f3", "f4"))


def gen_energy_surrogate(n: int, seed: int = 0) -> Dataset:
    """Synthetic design trade-off cloud: investment, yearly_costs, resilience.

    Investment is uniform on [0, 1); yearly costs fall linearly with
    investment plus noise; resilience is a noisy negative combination of
    investment and realized savings, clipped to <= 0 (more negative is
    better by convention).
    """
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    investment = rng.random(n)
    yearly = ENERGY_A - ENERGY_B * investment + ENERGY_NOISE_STD * rng.standard_normal(n)
    resilience = -(ENERGY_C * investment + ENERGY_D * (ENERGY_A - yearly)) + ENERGY_NOISE_STD * rng.standard_normal(n)
    resilience = np.minimum(resilience, 0.0)
    return Dataset(
        np.column_stack([investment, yearly, resilience]),
        ("investment", "yearly_costs", "resilience"),
    )


def generate(spec: GeneratorSpec) -> Dataset:
    if spec.kind == "uniform2d":
        return gen_2d(spec.n_samples, spec.seed)
    if spec.kind == "gaussian4d":
        return gen_4d(spec.n_samples, spec.seed, spec.sigma if spec.sigma is not None else 1.0)
    return gen_energy_surrogate(spec.n_samples, spec.seed)

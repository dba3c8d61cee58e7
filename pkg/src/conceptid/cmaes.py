"""Covariance matrix adaptation evolution strategy (maximization convention).

Self-contained implementation of the standard strategy (Hansen's CMA-ES):
weighted recombination of the top half of the population, cumulative step
size adaptation, and rank-one plus rank-mu covariance updates. Only the
population size, generation budget, initial step size, and seed are
exposed; all other constants are the canonical dimension-dependent
defaults.

Determinism: the candidates of generation g are a pure function of
(seed, g) - the sampling stream is re-derived per generation, so repeated
``ask`` calls on an unchanged state return the identical population and a
run is bit-reproducible regardless of how objective evaluations are
scheduled.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ObjectiveError

SIGMA_MIN = 1e-16
SIGMA_MAX = 1e8
EIGEN_FLOOR = 1e-14


@dataclass(frozen=True)
class CmaesConfig:
    population_size: int = 10
    generations: int = 1000
    initial_sigma: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigError(f"population size must be >= 2, got {self.population_size}")
        if self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")
        if not self.initial_sigma > 0:
            raise ConfigError(f"initial sigma must be > 0, got {self.initial_sigma}")
        # seeds feed numpy SeedSequence, which wants non-negative entropy
        object.__setattr__(self, "seed", int(self.seed) & (2**64 - 1))

    def to_json_dict(self) -> dict:
        return {
            "population_size": self.population_size,
            "generations": self.generations,
            "initial_sigma": self.initial_sigma,
            "seed": self.seed,
        }


class CmaesState:
    """Search distribution state plus elitist bookkeeping.

    ``ask`` samples the current generation's population; ``tell`` consumes
    the matching fitness values (higher is better) and advances the state.
    """

    def __init__(self, dim: int, config: CmaesConfig):
        if dim < 1:
            raise ConfigError(f"dimension must be >= 1, got {dim}")
        self.dim = dim
        self.config = config
        lam = config.population_size
        mu = lam // 2
        weights = np.log(lam / 2 + 0.5) - np.log(np.arange(1, mu + 1))
        weights /= weights.sum()
        self.lam = lam
        self.mu = mu
        self.weights = weights
        self.mu_eff = float(weights.sum() ** 2 / np.square(weights).sum())

        n, mu_eff = dim, self.mu_eff
        self.c_sigma = (mu_eff + 2) / (n + mu_eff + 5)
        self.d_sigma = 1 + 2 * max(0.0, math.sqrt((mu_eff - 1) / (n + 1)) - 1) + self.c_sigma
        self.c_c = (4 + mu_eff / n) / (n + 4 + 2 * mu_eff / n)
        self.c_1 = 2 / ((n + 1.3) ** 2 + mu_eff)
        self.c_mu = min(1 - self.c_1, 2 * (mu_eff - 2 + 1 / mu_eff) / ((n + 2) ** 2 + mu_eff))
        self.chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n**2))

        self.mean = np.zeros(dim)
        self.sigma = float(config.initial_sigma)
        self.cov = np.eye(dim)
        self.p_sigma = np.zeros(dim)
        self.p_c = np.zeros(dim)
        self.generation = 0
        self.best_genotype: np.ndarray | None = None
        self.best_fitness = -math.inf
        self._refresh_eigen()

    def _refresh_eigen(self):
        """Eigendecompose the covariance, flooring eigenvalues for PD repair."""
        self.cov = (self.cov + self.cov.T) / 2
        eigvals, eigvecs = np.linalg.eigh(self.cov)
        if eigvals[0] < EIGEN_FLOOR:
            eigvals = np.maximum(eigvals, EIGEN_FLOOR)
            self.cov = (eigvecs * eigvals) @ eigvecs.T
            self.cov = (self.cov + self.cov.T) / 2
        self._eigvecs = eigvecs
        self._eig_sqrt = np.sqrt(eigvals)
        self._inv_sqrt = (eigvecs / self._eig_sqrt) @ eigvecs.T

    def ask(self) -> np.ndarray:
        """Sample the population of the current generation, shape (lambda, dim)."""
        rng = np.random.default_rng([self.config.seed, self.generation])
        z = rng.standard_normal((self.lam, self.dim))
        return self.mean + self.sigma * (z * self._eig_sqrt) @ self._eigvecs.T

    def tell(self, genotypes, fitnesses) -> "CmaesState":
        """Update distribution parameters from one evaluated generation.

        Fitnesses are maximized; non-finite values rank worst. Ties keep
        input order (stable sort), so equal fitnesses recombine the first
        mu genotypes as given.
        """
        genotypes = np.asarray(genotypes, dtype=float)
        fit = np.asarray(fitnesses, dtype=float).reshape(-1)
        if genotypes.shape != (self.lam, self.dim) or fit.size != self.lam:
            raise ValueError(f"expected {self.lam} genotypes of dim {self.dim} with matching fitnesses")
        fit = np.where(np.isfinite(fit), fit, -math.inf)
        order = np.argsort(-fit, kind="stable")

        if fit[order[0]] > self.best_fitness:
            self.best_fitness = float(fit[order[0]])
            self.best_genotype = genotypes[order[0]].copy()

        selected = genotypes[order[: self.mu]]
        old_mean = self.mean
        self.mean = self.weights @ selected

        step = (self.mean - old_mean) / self.sigma
        self.p_sigma = (1 - self.c_sigma) * self.p_sigma + math.sqrt(
            self.c_sigma * (2 - self.c_sigma) * self.mu_eff
        ) * (self._inv_sqrt @ step)
        norm_ps_sq = float(self.p_sigma @ self.p_sigma)
        hsig = norm_ps_sq / self.dim / (
            1 - (1 - self.c_sigma) ** (2 * (self.generation + 1))
        ) < 2 + 4 / (self.dim + 1)
        self.p_c = (1 - self.c_c) * self.p_c + hsig * math.sqrt(
            self.c_c * (2 - self.c_c) * self.mu_eff
        ) * step

        deviations = (selected - old_mean) / self.sigma
        rank_mu = (deviations.T * self.weights) @ deviations
        delta_hsig = (1 - hsig) * self.c_c * (2 - self.c_c)
        self.cov = (
            (1 - self.c_1 - self.c_mu) * self.cov
            + self.c_1 * (np.outer(self.p_c, self.p_c) + delta_hsig * self.cov)
            + self.c_mu * rank_mu
        )

        self.sigma *= math.exp((self.c_sigma / self.d_sigma) * (math.sqrt(norm_ps_sq) / self.chi_n - 1))
        self.sigma = min(max(self.sigma, SIGMA_MIN), SIGMA_MAX)

        self.generation += 1
        self._refresh_eigen()
        return self


def init(dim: int, config: CmaesConfig) -> CmaesState:
    return CmaesState(dim, config)


@dataclass(frozen=True)
class CmaesRun:
    best_genotype: np.ndarray
    best_fitness: float
    history: np.ndarray = field(repr=False)


def run(objective, dim: int, config: CmaesConfig, log_path=None) -> CmaesRun:
    """Optimize for exactly ``generations * population_size`` evaluations.

    ``history[g]`` is the best fitness observed within generation g. An
    exception in the objective aborts the run with its generation index.
    If ``log_path`` is given, one JSON line per generation is appended:
    ``{"gen": ..., "best": ..., "sigma": ...}``.
    """
    state = CmaesState(dim, config)
    history = np.empty(config.generations)
    log_fh = open(log_path, "a", encoding="utf-8") if log_path else None
    try:
        for gen in range(config.generations):
            population = state.ask()
            try:
                fitnesses = [float(objective(genotype)) for genotype in population]
            except Exception as exc:
                raise ObjectiveError(gen, exc) from exc
            state.tell(population, fitnesses)
            finite = np.where(np.isfinite(fitnesses), fitnesses, -math.inf)
            history[gen] = finite.max()
            if log_fh is not None:
                log_fh.write(json.dumps({"gen": gen, "best": float(history[gen]), "sigma": state.sigma}) + "\n")
    finally:
        if log_fh is not None:
            log_fh.close()
    return CmaesRun(state.best_genotype, state.best_fitness, history)

"""Scenario and solver configuration objects."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidParameterError

N_TRUE = 10
N_OBSERVED_TRUE = 5
N_NOISE = 5


def default_alpha_grid():
    """Baseline-parameter grid 2.0, 2.2, ..., 40.0 (the integers 10..200 over 5)."""
    return tuple(float(v) for v in np.arange(10, 201) / 5.0)


@dataclass(frozen=True)
class SolverSettings:
    """Knobs shared by the penalized selectors.

    ``mix`` is the elastic-net weight on the L1 term; ``gaussian_lambda`` is
    the fixed penalty of the penalized Gaussian model; ``event_threshold``
    switches the correlated-feature pipeline between its two screens.
    """

    mix: float = 1.0
    gaussian_lambda: float = 0.05
    include_event_indicator_in_cox: bool = False
    event_threshold: int = 900
    n_folds: int = 10
    n_lambda: int = 100
    eps_ratio: float = 0.01
    p_threshold: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.mix <= 1.0:
            raise InvalidParameterError(f"mix must lie in (0, 1], got {self.mix}")
        if self.gaussian_lambda < 0:
            raise InvalidParameterError("gaussian_lambda must be nonnegative")
        if self.n_folds < 2:
            raise InvalidParameterError("n_folds must be at least 2")
        if self.n_lambda < 2:
            raise InvalidParameterError("n_lambda must be at least 2")
        if not 0.0 < self.eps_ratio < 1.0:
            raise InvalidParameterError("eps_ratio must lie in (0, 1)")
        if self.event_threshold < 0:
            raise InvalidParameterError("event_threshold must be nonnegative")


@dataclass(frozen=True)
class TrueModel:
    beta: tuple = tuple(float(b) for b in range(1, N_TRUE + 1))
    rho: float = 0.0

    def __post_init__(self):
        if len(self.beta) != N_TRUE:
            raise InvalidParameterError(f"beta must have {N_TRUE} entries")
        if not 0.0 <= self.rho < 1.0:
            raise InvalidParameterError(f"rho must lie in [0, 1), got {self.rho}")

    @property
    def dim(self):
        return N_TRUE


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    censor_rate: float
    rho: float = 0.0
    replicates: int = 1000
    master_seed: int = 20221008
    alpha_grid: tuple = field(default_factory=default_alpha_grid)
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParameterError(f"n must be a positive integer, got {self.n}")
        if not 0.0 <= self.censor_rate < 1.0:
            raise InvalidParameterError(
                f"censor_rate must lie in [0, 1), got {self.censor_rate}")
        if not 0.0 <= self.rho < 1.0:
            raise InvalidParameterError(f"rho must lie in [0, 1), got {self.rho}")
        if self.replicates < 1:
            raise InvalidParameterError("replicates must be at least 1")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidParameterError("master_seed must be a 64-bit unsigned integer")
        if len(self.alpha_grid) == 0 or min(self.alpha_grid) <= 0:
            raise InvalidParameterError("alpha_grid must be nonempty and positive")
        if self.n_events < 1:
            raise InvalidParameterError(
                f"scenario n={self.n}, censor_rate={self.censor_rate} has no events")

    @property
    def n_censored(self):
        return censored_count(self.n, self.censor_rate)

    @property
    def n_events(self):
        return self.n - self.n_censored

    @property
    def scenario_id(self):
        return f"n{self.n}_c{self.censor_rate:g}_r{self.rho:g}"

    def true_model(self, beta=None):
        if beta is None:
            return TrueModel(rho=self.rho)
        return TrueModel(beta=tuple(float(b) for b in beta), rho=self.rho)

    def with_(self, **changes):
        return replace(self, **changes)


def censored_count(n, censor_rate):
    # round half up; Python's round() is banker's rounding
    return int(np.floor(n * censor_rate + 0.5))

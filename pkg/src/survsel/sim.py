"""Seeded generation of partially observed Cox proportional-hazards datasets.

Survival times follow the cumulative hazard
``H(t | x) = scale_lambda * t**shape_alpha * exp(x @ beta)`` and are drawn by
inverse transform from unit-exponential variates.  Censoring picks an exact
number of subjects and replaces their time by a uniform draw on (0, T).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .config import N_NOISE, N_OBSERVED_TRUE, N_TRUE, ScenarioConfig, TrueModel, censored_count
from .errors import GenerationError, InvalidParameterError

_TINY = np.nextafter(0.0, 1.0)
_HUGE = np.finfo(float).max
_MAX_REDRAWS = 64

PURPOSES = {"data": 0, "folds": 1, "probe": 2}


def replicate_stream(master_seed, scenario_key, replicate, purpose="data"):
    """Independent counter-based generator for one (scenario, replicate, purpose).

    The stream depends only on its key, never on how many other streams were
    created before it, so replicates can run in any order on any worker.
    """
    if replicate < 0:
        raise InvalidParameterError("replicate index must be nonnegative")
    digest = hashlib.sha256(str(scenario_key).encode("utf-8")).digest()
    words = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
    entropy = [master_seed & 0xFFFFFFFF, (master_seed >> 32) & 0xFFFFFFFF,
               *words, int(replicate), PURPOSES[purpose]]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class BaselineParams:
    shape_alpha: float
    scale_lambda: float

    def __post_init__(self):
        if not (self.shape_alpha > 0 and self.scale_lambda > 0):
            raise InvalidParameterError("baseline parameters must be positive")


@dataclass(frozen=True, eq=False)
class SimDataset:
    """One replicate.

    ``true_ids`` are 0-based indices into the true coefficient vector; column
    ``k`` of ``x_obs`` (k < 5) holds true feature ``true_ids[k]`` and columns
    5..9 hold noise.
    """

    x_obs: np.ndarray
    time_obs: np.ndarray
    status: np.ndarray
    true_ids: tuple
    true_beta_obs: tuple
    baseline: BaselineParams

    @property
    def n(self):
        return self.x_obs.shape[0]

    @property
    def n_events(self):
        return int(self.status.sum())

    @property
    def true_columns(self):
        return tuple(range(N_OBSERVED_TRUE))

    @property
    def noise_columns(self):
        return tuple(range(N_OBSERVED_TRUE, N_OBSERVED_TRUE + N_NOISE))


def sample_mvn(n, dim, rho, rng):
    """Draw ``n`` rows from an equicorrelated standard Gaussian in ``dim`` dimensions."""
    if n < 1 or dim < 1:
        raise InvalidParameterError("n and dim must be positive")
    if not 0.0 <= rho < 1.0:
        raise InvalidParameterError(f"rho must lie in [0, 1), got {rho}")
    cov = np.full((dim, dim), float(rho))
    np.fill_diagonal(cov, 1.0)
    chol = np.linalg.cholesky(cov)
    z = rng.standard_normal((n, dim))
    return z @ chol.T


def draw_baseline_params(grid, rng):
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise InvalidParameterError("baseline grid is empty")
    if np.any(grid <= 0):
        raise InvalidParameterError("baseline grid values must be positive")
    shape_alpha, scale_lambda = grid[rng.integers(0, grid.size, size=2)]
    return BaselineParams(float(shape_alpha), float(scale_lambda))


def gen_survival_times(x_true, beta, params, rng):
    """Inverse-transform draw of event times under a Weibull-type baseline.

    A time that rounds to 0 (or overflows) in double precision gets a fresh
    exponential variate; after a bounded number of redraws it is saturated to
    the nearest positive finite double.
    """
    x_true = np.asarray(x_true, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if x_true.ndim != 2 or x_true.shape[1] != beta.shape[0]:
        raise InvalidParameterError("x_true and beta are dimensionally inconsistent")
    eta = x_true @ beta
    bad = np.flatnonzero(~np.isfinite(eta))
    if bad.size:
        raise GenerationError(f"non-finite linear predictor at row {bad[0]}")
    rate = params.scale_lambda * np.exp(eta)
    inv_shape = 1.0 / params.shape_alpha

    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        times = (rng.standard_exponential(eta.shape[0]) / rate) ** inv_shape
        for _ in range(_MAX_REDRAWS):
            redo = np.flatnonzero((times == 0.0) | ~np.isfinite(times))
            if redo.size == 0:
                break
            times[redo] = (rng.standard_exponential(redo.size) / rate[redo]) ** inv_shape
    times[times == 0.0] = _TINY
    times[~np.isfinite(times)] = _HUGE
    return times


def apply_censoring(times, censor_rate, rng):
    """Censor exactly ``round(n * censor_rate)`` subjects chosen at random."""
    if not 0.0 <= censor_rate < 1.0:
        raise InvalidParameterError(f"censor_rate must lie in [0, 1), got {censor_rate}")
    times = np.asarray(times, dtype=float)
    n = times.shape[0]
    k = censored_count(n, censor_rate)
    time_obs = times.copy()
    status = np.ones(n, dtype=bool)
    if k:
        idx = rng.choice(n, size=k, replace=False)
        # 1 - U lies in (0, 1]
        u = 1.0 - rng.random(k)
        time_obs[idx] = np.maximum(u * times[idx], _TINY)
        status[idx] = False
    return time_obs, status


def assemble_dataset(config: ScenarioConfig, model: TrueModel, rng):
    """Generate one replicate: survival from all 10 true features, 5 kept, 5 noise added."""
    baseline = draw_baseline_params(config.alpha_grid, rng)
    x_true = sample_mvn(config.n, N_TRUE, model.rho, rng)
    times = gen_survival_times(x_true, model.beta, baseline, rng)
    time_obs, status = apply_censoring(times, config.censor_rate, rng)
    true_ids = rng.choice(N_TRUE, size=N_OBSERVED_TRUE, replace=False)
    noise = sample_mvn(config.n, N_NOISE, model.rho, rng)
    x_obs = np.hstack([x_true[:, true_ids], noise])
    beta = np.asarray(model.beta, dtype=float)
    return SimDataset(
        x_obs=x_obs,
        time_obs=time_obs,
        status=status,
        true_ids=tuple(int(i) for i in true_ids),
        true_beta_obs=tuple(float(b) for b in beta[true_ids]),
        baseline=baseline,
    )


def replicate_dataset(config, replicate, model=None):
    """The dataset for replicate ``replicate`` of ``config`` (deterministic)."""
    if model is None:
        model = config.true_model()
    rng = replicate_stream(config.master_seed, config.scenario_id, replicate, "data")
    return assemble_dataset(config, model, rng)

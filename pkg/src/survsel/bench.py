"""Per-replicate scoring, scenario aggregation, the scenario runner and the
degenerate-baseline probe."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from .config import N_TRUE, ScenarioConfig, TrueModel
from .cox import SurvResponse, fit_cox_nr
from .errors import FitError, InvalidParameterError
from .selectors import ALL_METHODS, Method, run_all_selectors
from .sim import (BaselineParams, apply_censoring, assemble_dataset, draw_baseline_params,
                  gen_survival_times, replicate_stream, sample_mvn)

Z95 = float(stats.norm.ppf(0.975))

# the oracle is given the true features, so selection metrics do not apply to it
RANKING_ONLY = frozenset({Method.ORACLE_COX})


@dataclass(frozen=True)
class UnitScore:
    method: Method
    all_true_selected: bool
    all_noise_rejected: bool
    ranking_correct: bool
    fit_failed: bool


@dataclass(frozen=True)
class Proportion:
    estimate: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class MethodMetrics:
    method: Method
    sensitivity: Proportion | None
    specificity: Proportion | None
    selection_accuracy: float | None
    ranking_accuracy: Proportion
    n_replicates: int
    n_fit_failures: int

    def as_dict(self):
        out = asdict(self)
        out["method"] = str(self.method)
        return out


@dataclass
class ScenarioReport:
    config: ScenarioConfig
    n_events: int
    per_method: list
    wall_time: float

    def metrics(self, method):
        method = Method(method)
        for m in self.per_method:
            if m.method is method:
                return m
        raise KeyError(method)

    def as_dict(self, include_wall_time=True):
        cfg = self.config
        out = {
            "scenario_id": cfg.scenario_id,
            "n": cfg.n,
            "censor_rate": cfg.censor_rate,
            "rho": cfg.rho,
            "replicates": cfg.replicates,
            "master_seed": cfg.master_seed,
            "solver": asdict(cfg.solver),
            "n_events": self.n_events,
            "per_method": [m.as_dict() for m in self.per_method],
        }
        if include_wall_time:
            out["wall_time"] = self.wall_time
        return out


def wilson_interval(successes, total, z=Z95):
    if total <= 0:
        raise InvalidParameterError("Wilson interval needs a positive total")
    phat = successes / total
    denom = 1.0 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    # clamp so rounding never puts the estimate outside its own interval
    return max(0.0, min(center - half, phat)), min(1.0, max(center + half, phat))


def _proportion(successes, total):
    lo, hi = wilson_interval(successes, total)
    return Proportion(successes / total, lo, hi)


def score_dataset(ds, result):
    """All-or-nothing verdicts for one replicate.

    The ranking is correct when every observed true feature appears in it, in
    decreasing order of true coefficient, with no two of them sharing a score;
    noise features may be interleaved.
    """
    if result.fit_failed:
        return UnitScore(result.method, False, True, False, True)
    true_cols = set(ds.true_columns)
    noise_cols = set(ds.noise_columns)
    all_true = true_cols <= result.selected
    no_noise = not (result.selected & noise_cols)

    ranked_true = [j for j in result.ranking if j in true_cols]
    ranking_ok = len(ranked_true) == len(true_cols)
    if ranking_ok:
        beta = [ds.true_beta_obs[j] for j in ranked_true]
        ranking_ok = all(b1 > b2 for b1, b2 in zip(beta, beta[1:]))
    if ranking_ok:
        tied = [result.scores[j] for j in ranked_true]
        ranking_ok = len(set(tied)) == len(tied)
    return UnitScore(result.method, all_true, no_noise, ranking_ok, False)


def aggregate(scores):
    scores = list(scores)
    if not scores:
        raise InvalidParameterError("cannot aggregate an empty score list")
    method = scores[0].method
    if any(s.method is not method for s in scores):
        raise InvalidParameterError("scores mix several methods")
    total = len(scores)
    ranked = sum(s.ranking_correct for s in scores)
    failures = sum(s.fit_failed for s in scores)
    if method in RANKING_ONLY:
        sens = spec = None
        accuracy = None
    else:
        sens = _proportion(sum(s.all_true_selected for s in scores), total)
        spec = _proportion(sum(s.all_noise_rejected for s in scores), total)
        accuracy = (sens.estimate + spec.estimate) / 2.0
    return MethodMetrics(method, sens, spec, accuracy, _proportion(ranked, total), total, failures)


def run_replicate(config, model, replicate, methods=ALL_METHODS):
    """Generate, select and score one replicate; returns ``{method: UnitScore}``."""
    ds = assemble_dataset(config, model,
                          replicate_stream(config.master_seed, config.scenario_id, replicate, "data"))
    fold_rng = replicate_stream(config.master_seed, config.scenario_id, replicate, "folds")
    results = run_all_selectors(ds, fold_rng, config.solver, methods)
    return {m: score_dataset(ds, r) for m, r in results.items()}


def _run_chunk(args):
    config, model, indices, methods = args
    return [(r, run_replicate(config, model, r, methods)) for r in indices]


def _chunks(total, n_chunks):
    bounds = np.linspace(0, total, n_chunks + 1).astype(int)
    return [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def default_threads():
    return os.cpu_count() or 1


def map_replicates(func, args_list, threads):
    """Run ``func`` over ``args_list`` on ``threads`` worker processes (inline for 1)."""
    if threads <= 1 or len(args_list) <= 1:
        return [func(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, args_list))


def run_scenario(config: ScenarioConfig, model: TrueModel | None = None,
                 methods=ALL_METHODS, threads=1, progress=None):
    """Run every replicate of ``config`` and aggregate per method.

    Replicates are independent and keyed by index, so the report does not
    depend on ``threads`` or on scheduling.
    """
    if model is None:
        model = config.true_model()
    methods = tuple(Method(m) for m in methods)
    start = time.perf_counter()
    n_chunks = max(1, min(config.replicates, threads * 4))
    jobs = [(config, model, idx, methods) for idx in _chunks(config.replicates, n_chunks)]
    per_rep = {}
    for chunk in map_replicates(_run_chunk, jobs, threads):
        for r, scores in chunk:
            per_rep[r] = scores
        if progress is not None:
            progress(len(per_rep), config.replicates)
    per_method = [aggregate(per_rep[r][m] for r in range(config.replicates)) for m in methods]
    return ScenarioReport(config, config.n_events, per_method, time.perf_counter() - start)


# --------------------------------------------------------------------------- probe

@dataclass(frozen=True)
class ProbeRow:
    alpha: float
    failure_rate: float
    n_failures: int
    replicates: int
    outcomes: tuple
    """Per-replicate diagnostic: "ok" or the failure class name."""


def classify_cox_fit(x, resp):
    """Fit an unpenalized Cox model and name the outcome ("ok" or the failure class)."""
    try:
        fit = fit_cox_nr(x, resp)
    except FitError as exc:
        return type(exc).__name__
    return "ok" if fit.converged else "NotConverged"


def probe_dataset(config, shape_alpha, replicate, model=None):
    """Dataset for one probe replicate: fixed shape, all 10 true features, no masking."""
    if model is None:
        model = config.true_model()
    rng = replicate_stream(config.master_seed, f"probe|{config.scenario_id}|{shape_alpha!r}",
                           replicate, "probe")
    scale = draw_baseline_params(config.alpha_grid, rng).scale_lambda
    params = BaselineParams(float(shape_alpha), scale)
    x = sample_mvn(config.n, N_TRUE, model.rho, rng)
    times = gen_survival_times(x, model.beta, params, rng)
    time_obs, status = apply_censoring(times, config.censor_rate, rng)
    return x, time_obs, status


def _probe_one(args):
    config, model, alpha, replicate = args
    x, time_obs, status = probe_dataset(config, alpha, replicate, model)
    try:
        resp = SurvResponse(time_obs, status)
    except FitError as exc:
        return type(exc).__name__
    return classify_cox_fit(x, resp)


def degenerate_alpha_probe(alpha_values, config, model=None, threads=1):
    """Cox fit-failure rate when the baseline shape is pinned at each value.

    The scale parameter is still drawn from ``config.alpha_grid``.  Failures
    are divergence, non-identifiability, singular information and
    non-convergence.
    """
    alphas = [float(a) for a in alpha_values]
    if not alphas:
        raise InvalidParameterError("need at least one alpha value")
    if any(not 0.0 < a <= 4.0 for a in alphas):
        raise InvalidParameterError("probe alpha values must lie in (0, 4]")
    if model is None:
        model = config.true_model()
    rows = []
    for alpha in alphas:
        jobs = [(config, model, alpha, r) for r in range(config.replicates)]
        outcomes = tuple(map_replicates(_probe_one, jobs, threads))
        fails = sum(o != "ok" for o in outcomes)
        rows.append(ProbeRow(alpha, fails / len(outcomes), fails, len(outcomes), outcomes))
    return rows

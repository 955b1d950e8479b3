"""The eight competing estimators and the two composite pipelines.

Every selector maps a :class:`~survsel.sim.SimDataset` to a
:class:`SelectionResult`.  Feature indices are 0-based observed-column
indices (0..9).  Only :func:`rank_oracle_multivariate_cox` reads the identity
of the true features.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import N_OBSERVED_TRUE, SolverSettings
from .cox import SurvResponse, fit_cox_nr
from .elnet import COX, PenaltySpec, cv_select_lambda, fit_gaussian_elnet
from .errors import FitError, InvalidParameterError
from .glm import fit_logistic, fit_ols

N_FEATURES = 10


class Method(str, Enum):
    UNIVARIATE_COX = "univariate_cox"
    ORACLE_COX = "oracle_cox"
    COX_ELNET_1SE = "cox_elnet_1se"
    COX_ELNET_MIN = "cox_elnet_min"
    UNIVARIATE_LOGISTIC = "univariate_logistic"
    GAUSSIAN_TWO_COV = "gaussian_two_cov"
    MULTIVARIATE_GAUSSIAN = "multivariate_gaussian"
    GAUSSIAN_ELNET = "gaussian_elnet"
    PIPELINE_INDEPENDENT = "pipeline_independent"
    PIPELINE_CORRELATED = "pipeline_correlated"

    def __str__(self):
        return self.value


# the eight models in their conventional order, then the two pipelines
ALL_METHODS = tuple(Method)
CORE_MODELS = ALL_METHODS[:8]
P_VALUE_METHODS = (Method.UNIVARIATE_COX, Method.UNIVARIATE_LOGISTIC, Method.GAUSSIAN_TWO_COV)


@dataclass(frozen=True, eq=False)
class SelectionResult:
    """A selector's verdict.

    ``scores`` holds p-values (smaller is stronger) or absolute coefficients
    (larger is stronger) depending on the method; NaN marks a feature that was
    not scored.  ``n_failed_fits`` counts per-feature fits that failed without
    failing the whole method.
    """

    method: Method
    selected: frozenset
    ranking: tuple
    scores: np.ndarray
    fit_failed: bool = False
    n_failed_fits: int = 0
    note: str = ""

    def __post_init__(self):
        if not set(self.selected) <= set(range(N_FEATURES)):
            raise InvalidParameterError("selected features out of range")
        if len(set(self.ranking)) != len(self.ranking):
            raise InvalidParameterError("ranking entries must be distinct")
        if self.fit_failed and (self.selected or self.ranking):
            raise InvalidParameterError("a failed fit selects and ranks nothing")

    @classmethod
    def failed(cls, method, note="", n_failed_fits=0):
        return cls(method, frozenset(), (), np.full(N_FEATURES, np.nan), True,
                   n_failed_fits=n_failed_fits, note=note)


def _rank_ascending(scores, candidates, strength=None):
    """Stable ascending order of p-values; NaN (failed) scores go last.

    ``strength`` (|test statistic|, larger first) breaks ties, which matter
    once p-values underflow to zero.
    """
    if strength is None:
        strength = np.zeros(len(scores))

    def key(j):
        bad = np.isnan(scores[j])
        return (bad, np.inf if bad else scores[j], 0.0 if bad else -strength[j], j)

    return tuple(int(j) for j in sorted(candidates, key=key))


def _wald(fit, k):
    """p-value and |statistic| of coefficient ``k``."""
    return fit.p_value[k], abs(fit.coef[k] / fit.se[k])


def _rank_descending_nonzero(magnitudes, candidates):
    cand = [j for j in candidates if magnitudes[j] != 0.0]
    return tuple(int(j) for j in sorted(cand, key=lambda j: (-magnitudes[j], j)))


def _surv(ds):
    return SurvResponse(ds.time_obs, ds.status)


def _one_at_a_time(ds, method, fit_one, threshold):
    scores = np.full(N_FEATURES, np.nan)
    strength = np.zeros(N_FEATURES)
    failures = 0
    for j in range(N_FEATURES):
        try:
            scores[j], strength[j] = fit_one(j)
        except FitError:
            failures += 1
    if failures == N_FEATURES:
        return SelectionResult.failed(method, "every per-feature fit failed", failures)
    selected = frozenset(int(j) for j in np.flatnonzero(scores < threshold))
    return SelectionResult(method, selected,
                           _rank_ascending(scores, range(N_FEATURES), strength),
                           scores, n_failed_fits=failures)


def select_univariate_cox(ds, settings=SolverSettings()):
    """One single-covariate Cox model per feature; select p < threshold, rank by p."""
    try:
        resp = _surv(ds)
    except FitError as exc:
        return SelectionResult.failed(Method.UNIVARIATE_COX, str(exc))

    def fit_one(j):
        fit = fit_cox_nr(ds.x_obs[:, [j]], resp)
        if not fit.converged:
            raise FitError("Newton-Raphson did not converge")
        return _wald(fit, 0)

    return _one_at_a_time(ds, Method.UNIVARIATE_COX, fit_one, settings.p_threshold)


def rank_oracle_multivariate_cox(ds, settings=SolverSettings()):
    """Unpenalized Cox model on the observed true features only (ranking upper bound)."""
    cols = list(ds.true_columns)
    try:
        fit = fit_cox_nr(ds.x_obs[:, cols], _surv(ds))
        if not fit.converged:
            raise FitError("Newton-Raphson did not converge")
    except FitError as exc:
        return SelectionResult.failed(Method.ORACLE_COX, str(exc))
    scores = np.full(N_FEATURES, np.nan)
    scores[cols] = fit.p_value
    strength = np.zeros(N_FEATURES)
    strength[cols] = np.abs(fit.coef / fit.se)
    return SelectionResult(Method.ORACLE_COX, frozenset(cols),
                           _rank_ascending(scores, cols, strength), scores)


def _cox_design(ds, settings):
    if settings.include_event_indicator_in_cox:
        return np.column_stack([ds.x_obs, ds.status.astype(float)])
    return ds.x_obs


def cox_elnet_cv(ds, rng, settings=SolverSettings()):
    """Cross-validated penalized Cox path shared by every Cox elastic-net consumer."""
    return cv_select_lambda(_cox_design(ds, settings), _surv(ds), COX, settings.mix,
                            settings.n_folds, rng, n_lambda=settings.n_lambda,
                            eps_ratio=settings.eps_ratio)


def select_cox_elnet(ds, which, rng=None, settings=SolverSettings(), cv=None):
    """Penalized Cox at the cross-validated ``lambda_min`` or ``lambda_1se``.

    Pass ``cv`` to reuse a previous :func:`cox_elnet_cv` result; otherwise
    ``rng`` drives the fold assignment.
    """
    method = {"lambda_1se": Method.COX_ELNET_1SE, "lambda_min": Method.COX_ELNET_MIN}[which]
    if cv is None:
        if rng is None:
            raise InvalidParameterError("need rng or a precomputed cv result")
        try:
            cv = cox_elnet_cv(ds, rng, settings)
        except FitError as exc:
            return SelectionResult.failed(method, str(exc))
    coef = cv.coef_at(which)[:N_FEATURES]
    return _from_coefficients(method, coef)


def _from_coefficients(method, coef, rank_zeros=False):
    mags = np.abs(np.asarray(coef, dtype=float))
    selected = frozenset(int(j) for j in np.flatnonzero(mags != 0.0))
    if rank_zeros:
        ranking = tuple(int(j) for j in sorted(range(N_FEATURES), key=lambda j: (-mags[j], j)))
    else:
        ranking = _rank_descending_nonzero(mags, range(N_FEATURES))
    return SelectionResult(method, selected, ranking, mags)


def select_univariate_logistic(ds, settings=SolverSettings()):
    """Logistic regression of the event indicator on (feature, follow-up time), per feature."""
    y = ds.status

    def fit_one(j):
        fit = fit_logistic(np.column_stack([ds.x_obs[:, j], ds.time_obs]), y)
        return _wald(fit, 1)

    return _one_at_a_time(ds, Method.UNIVARIATE_LOGISTIC, fit_one, settings.p_threshold)


def select_gaussian_two_cov(ds, settings=SolverSettings()):
    """OLS of log time on (feature, event indicator), one feature at a time."""
    logt = np.log(ds.time_obs)
    status = ds.status.astype(float)

    def fit_one(j):
        return _wald(fit_ols(np.column_stack([ds.x_obs[:, j], status]), logt), 1)

    return _one_at_a_time(ds, Method.GAUSSIAN_TWO_COV, fit_one, settings.p_threshold)


def rank_multivariate_gaussian(ds, prior, settings=SolverSettings()):
    """Refit log time on the event indicator plus the features ``prior`` selected."""
    if prior.fit_failed:
        return SelectionResult.failed(Method.MULTIVARIATE_GAUSSIAN, "prior screen failed")
    chosen = sorted(prior.selected)
    scores = np.full(N_FEATURES, np.nan)
    if not chosen:
        return SelectionResult(Method.MULTIVARIATE_GAUSSIAN, frozenset(), (), scores,
                               note="prior selected nothing")
    design = np.column_stack([ds.status.astype(float), ds.x_obs[:, chosen]])
    try:
        fit = fit_ols(design, np.log(ds.time_obs))
    except FitError as exc:
        return SelectionResult.failed(Method.MULTIVARIATE_GAUSSIAN, str(exc))
    scores[chosen] = fit.p_value[2:]
    strength = np.zeros(N_FEATURES)
    strength[chosen] = np.abs(fit.coef[2:] / fit.se[2:])
    return SelectionResult(Method.MULTIVARIATE_GAUSSIAN, frozenset(chosen),
                           _rank_ascending(scores, chosen, strength), scores)


def gaussian_elnet_coef(ds, settings=SolverSettings(), lam=None):
    """Feature coefficients of the penalized Gaussian fit on (features, event indicator)."""
    lam = settings.gaussian_lambda if lam is None else lam
    design = np.column_stack([ds.x_obs, ds.status.astype(float)])
    coef = fit_gaussian_elnet(design, np.log(ds.time_obs), PenaltySpec(settings.mix, lam))
    return coef[1:1 + N_FEATURES]


def select_gaussian_elnet(ds, settings=SolverSettings(), lam=None):
    """Penalized Gaussian regression of log time at a fixed lambda; status is ignored for selection."""
    try:
        coef = gaussian_elnet_coef(ds, settings, lam)
    except FitError as exc:
        return SelectionResult.failed(Method.GAUSSIAN_ELNET, str(exc))
    # every feature is ranked; zero coefficients tie and sort by index
    return _from_coefficients(Method.GAUSSIAN_ELNET, coef, rank_zeros=True)


def _compose(method, selected, ranking_magnitudes):
    """Rank ``selected`` by ``ranking_magnitudes``; zero-magnitude features go last by index."""
    mags = np.asarray(ranking_magnitudes, dtype=float)
    nonzero = [j for j in selected if mags[j] != 0.0]
    zero = sorted(j for j in selected if mags[j] == 0.0)
    ranking = tuple(int(j) for j in sorted(nonzero, key=lambda j: (-mags[j], j))) + tuple(zero)
    scores = np.full(N_FEATURES, np.nan)
    for j in selected:
        scores[j] = mags[j]
    return SelectionResult(method, frozenset(selected), ranking, scores)


def pipeline_independent(ds, rng=None, settings=SolverSettings(), gaussian=None, cox_1se=None):
    """Select with the lambda_1se Cox elastic net, rank with penalized Gaussian magnitudes."""
    method = Method.PIPELINE_INDEPENDENT
    gaussian = select_gaussian_elnet(ds, settings) if gaussian is None else gaussian
    cox_1se = select_cox_elnet(ds, "lambda_1se", rng, settings) if cox_1se is None else cox_1se
    if gaussian.fit_failed or cox_1se.fit_failed:
        return SelectionResult.failed(method, "a pipeline stage failed")
    return _compose(method, cox_1se.selected, np.nan_to_num(gaussian.scores))


def pipeline_correlated(ds, rng=None, settings=SolverSettings(), cox_1se=None,
                        two_cov=None, gaussian=None, event_threshold=None):
    """Rank with lambda_1se Cox magnitudes; select with the two-covariate screen when
    events are fewer than ``event_threshold``, else with the penalized Gaussian model."""
    method = Method.PIPELINE_CORRELATED
    threshold = settings.event_threshold if event_threshold is None else event_threshold
    cox_1se = select_cox_elnet(ds, "lambda_1se", rng, settings) if cox_1se is None else cox_1se
    if ds.n_events < threshold:
        screen = select_gaussian_two_cov(ds, settings) if two_cov is None else two_cov
    else:
        screen = select_gaussian_elnet(ds, settings) if gaussian is None else gaussian
    if cox_1se.fit_failed or screen.fit_failed:
        return SelectionResult.failed(method, "a pipeline stage failed")
    return _compose(method, screen.selected, np.nan_to_num(cox_1se.scores))


def run_all_selectors(ds, rng, settings=SolverSettings(), methods=ALL_METHODS):
    """Every requested selector on one dataset, sharing the single CV run and screens."""
    methods = tuple(Method(m) for m in methods)
    want = set(methods)
    out = {}
    cache = {}

    def need(*ms):
        return any(m in want for m in ms)

    if need(Method.COX_ELNET_1SE, Method.COX_ELNET_MIN, Method.PIPELINE_INDEPENDENT,
            Method.PIPELINE_CORRELATED):
        try:
            cv = cox_elnet_cv(ds, rng, settings)
            cache[Method.COX_ELNET_1SE] = select_cox_elnet(ds, "lambda_1se", settings=settings, cv=cv)
            cache[Method.COX_ELNET_MIN] = select_cox_elnet(ds, "lambda_min", settings=settings, cv=cv)
        except FitError as exc:
            cache[Method.COX_ELNET_1SE] = SelectionResult.failed(Method.COX_ELNET_1SE, str(exc))
            cache[Method.COX_ELNET_MIN] = SelectionResult.failed(Method.COX_ELNET_MIN, str(exc))
    if need(Method.GAUSSIAN_TWO_COV, Method.MULTIVARIATE_GAUSSIAN) or (
            Method.PIPELINE_CORRELATED in want and ds.n_events < settings.event_threshold):
        cache[Method.GAUSSIAN_TWO_COV] = select_gaussian_two_cov(ds, settings)
    if need(Method.GAUSSIAN_ELNET, Method.PIPELINE_INDEPENDENT, Method.PIPELINE_CORRELATED):
        cache[Method.GAUSSIAN_ELNET] = select_gaussian_elnet(ds, settings)

    for m in methods:
        if m in cache:
            out[m] = cache[m]
        elif m is Method.UNIVARIATE_COX:
            out[m] = select_univariate_cox(ds, settings)
        elif m is Method.ORACLE_COX:
            out[m] = rank_oracle_multivariate_cox(ds, settings)
        elif m is Method.UNIVARIATE_LOGISTIC:
            out[m] = select_univariate_logistic(ds, settings)
        elif m is Method.MULTIVARIATE_GAUSSIAN:
            out[m] = rank_multivariate_gaussian(ds, cache[Method.GAUSSIAN_TWO_COV], settings)
        elif m is Method.PIPELINE_INDEPENDENT:
            out[m] = pipeline_independent(ds, settings=settings,
                                          gaussian=cache[Method.GAUSSIAN_ELNET],
                                          cox_1se=cache[Method.COX_ELNET_1SE])
        elif m is Method.PIPELINE_CORRELATED:
            out[m] = pipeline_correlated(ds, settings=settings,
                                         cox_1se=cache[Method.COX_ELNET_1SE],
                                         two_cov=cache.get(Method.GAUSSIAN_TWO_COV),
                                         gaussian=cache[Method.GAUSSIAN_ELNET])
    return out

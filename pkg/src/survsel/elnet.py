"""Elastic-net Gaussian and Cox regression by coordinate descent, with K-fold CV.

Both solvers work on internally standardized columns (mean 0, population
variance 1) and report coefficients on the original scale, so the penalty is
applied to standardized coefficients.  With at most a dozen covariates the
coordinate descent runs in covariance mode on a p x p Gram matrix.

Objectives (``b`` standardized, ``pen(b) = sum_j mask_j (mix |b_j| + (1-mix)/2 b_j^2)``)::

    gaussian:  (1/2n) ||y - b0 - Xs b||^2 + lam * pen(b)
    cox:       -loglik(b) / n               + lam * pen(b)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .cox import DIVERGENCE_THRESHOLD, SurvResponse, _SortedProblem, _breslow_sweep
from .errors import (ConvergenceError, DegeneratePathError, DivergenceError, FitError,
                     FoldFailureError, InsufficientDataError, InvalidParameterError,
                     NonIdentifiableError)

GAUSSIAN = "gaussian"
COX = "cox"
FAMILIES = (GAUSSIAN, COX)


@dataclass(frozen=True)
class PenaltySpec:
    mix: float = 1.0
    lam: float = 0.0
    penalize_mask: tuple | None = None

    def __post_init__(self):
        if not 0.0 < self.mix <= 1.0:
            raise InvalidParameterError(f"mix must lie in (0, 1], got {self.mix}")
        if not self.lam >= 0.0:
            raise InvalidParameterError(f"lambda must be nonnegative, got {self.lam}")

    def mask(self, p):
        if self.penalize_mask is None:
            return np.ones(p, dtype=bool)
        mask = np.asarray(self.penalize_mask, dtype=bool)
        if mask.shape != (p,):
            raise InvalidParameterError(f"penalize_mask must have {p} entries")
        return mask


@dataclass(frozen=True, eq=False)
class CvResult:
    lambda_grid: np.ndarray
    cv_mean: np.ndarray
    cv_se: np.ndarray
    lambda_min: float
    lambda_1se: float
    fold_assignment: np.ndarray
    index_min: int
    index_1se: int
    path_coefs: np.ndarray
    """Full-data fit at every grid value, original scale (intercept first for gaussian)."""

    def coef_at(self, which):
        idx = {"lambda_min": self.index_min, "lambda_1se": self.index_1se}[which]
        return self.path_coefs[idx]


@njit(cache=True)
def _cd_quadratic(gram, lin, b, l1, l2, tol, max_passes):
    """Cyclic coordinate descent for 0.5 b'Gb - lin'b + sum l1|b| + 0.5 sum l2 b^2.

    Updates ``b`` in place; returns the number of passes, or -1 if the pass
    budget ran out.  Convergence: max_j (G_jj + l2_j) * (change in b_j)^2 < tol.
    """
    p = b.shape[0]
    for it in range(max_passes):
        worst = 0.0
        for j in range(p):
            denom = gram[j, j] + l2[j]
            if denom <= 0.0:
                b[j] = 0.0
                continue
            u = lin[j]
            for k in range(p):
                if k != j:
                    u -= gram[j, k] * b[k]
            if u > l1[j]:
                new = (u - l1[j]) / denom
            elif u < -l1[j]:
                new = (u + l1[j]) / denom
            else:
                new = 0.0
            delta = new - b[j]
            if delta != 0.0:
                b[j] = new
                change = denom * delta * delta
                if change > worst:
                    worst = change
        if worst < tol:
            return it + 1
    return -1


@njit(cache=True)
def _loglik_many(eta_s, status_s, group_last):
    """Breslow log partial likelihood for every column of a pre-sorted eta matrix."""
    n, m_cols = eta_s.shape
    out = np.zeros(m_cols)
    for c in range(m_cols):
        s0 = 0.0
        mx = eta_s[0, c]
        ll = 0.0
        d = 0
        for k in range(n):
            e = eta_s[k, c]
            if e > mx + 300.0:
                s0 *= np.exp(mx - e)
                mx = e
            s0 += np.exp(e - mx)
            if status_s[k]:
                d += 1
                ll += e
            if group_last[k] and d > 0:
                ll -= d * (mx + np.log(s0))
                d = 0
        out[c] = ll
    return out


def _standardize(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    center = x.mean(axis=0)
    scale = x.std(axis=0)
    usable = scale > 1e-12 * np.maximum(1.0, np.abs(center))
    safe = np.where(usable, scale, 1.0)
    xs = (x - center) / safe
    xs[:, ~usable] = 0.0
    return xs, center, safe, usable


def _penalty_weights(lam, mix, mask):
    l1 = lam * mix * mask.astype(float)
    l2 = lam * (1.0 - mix) * mask.astype(float)
    return l1, l2


# --------------------------------------------------------------------------- gaussian

class _GaussianProblem:
    def __init__(self, design, response):
        xs, center, scale, usable = _standardize(design)
        y = np.asarray(response, dtype=float)
        if y.shape[0] != xs.shape[0]:
            raise InvalidParameterError("design and response lengths differ")
        if xs.shape[0] < 2:
            raise InsufficientDataError("need at least 2 observations")
        n = xs.shape[0]
        self.n, self.p = xs.shape
        self.center, self.scale, self.usable = center, scale, usable
        self.y_mean = y.mean()
        yc = y - self.y_mean
        self.y_var = max(float(yc @ yc) / n, 1e-300)
        self.gram = xs.T @ xs / n
        self.lin = xs.T @ yc / n
        self.xs, self.yc = xs, yc

    def solve(self, lam, mix, mask, b0=None, tol=1e-20, max_passes=100_000):
        b = np.zeros(self.p) if b0 is None else np.array(b0, dtype=float)
        l1, l2 = _penalty_weights(lam, mix, mask)
        passes = _cd_quadratic(self.gram, self.lin, b, l1, l2, tol * self.y_var, max_passes)
        if passes < 0:
            raise ConvergenceError(
                f"coordinate descent did not converge in {max_passes} passes",
                self.to_original(b))
        return b

    def score(self, b):
        """n-scaled score X_s'(y - yhat) in standardized coordinates."""
        return self.n * (self.lin - self.gram @ b)

    def to_original(self, b):
        beta = np.where(self.usable, b / self.scale, 0.0)
        return np.concatenate([[self.y_mean - beta @ self.center], beta])


def fit_gaussian_elnet(design, response, spec, tol=1e-20, max_passes=100_000):
    """Penalized least squares; returns ``[intercept, beta_1..beta_p]`` on the original scale.

    ``tol`` bounds the largest weighted coefficient change of a pass, relative
    to the response variance.
    """
    prob = _GaussianProblem(design, response)
    b = prob.solve(spec.lam, spec.mix, spec.mask(prob.p), tol=tol, max_passes=max_passes)
    return prob.to_original(b)


def gaussian_kkt_residuals(design, response, spec, coef):
    """Subgradient-condition violations (n-scaled) of a Gaussian fit, standardized coordinates.

    For b_j != 0 the residual is |score_j - n lam ((1-mix) b_j + mix sign b_j)|;
    for b_j == 0 it is max(0, |score_j| - n lam mix).  Unpenalized coordinates
    must have zero score.
    """
    prob = _GaussianProblem(design, response)
    b = np.where(prob.usable, np.asarray(coef, dtype=float)[1:] * prob.scale, 0.0)
    return _kkt(prob.score(b), b, prob.n, spec.lam, spec.mix, spec.mask(prob.p) & prob.usable,
                prob.usable)


def _kkt(score, b, n, lam, mix, pen_mask, usable):
    res = np.zeros_like(b)
    for j in range(b.shape[0]):
        if not usable[j]:
            continue
        if not pen_mask[j]:
            res[j] = abs(score[j])
        elif b[j] != 0.0:
            res[j] = abs(score[j] - n * lam * ((1.0 - mix) * b[j] + mix * np.sign(b[j])))
        else:
            res[j] = max(0.0, abs(score[j]) - n * lam * mix)
    return res


# --------------------------------------------------------------------------- cox

_OK, _INNER_FAIL, _OUTER_FAIL, _DIVERGED, _NONFINITE = 0, 1, 2, 3, 4


@njit(cache=True)
def _cox_derivs(b, x_s, status_s, group_last):
    """Log partial likelihood, score and information (see ``_breslow_sweep``)."""
    n, p = x_s.shape
    eta = np.empty(n)
    for k in range(n):
        acc = 0.0
        for j in range(p):
            acc += x_s[k, j] * b[j]
        eta[k] = acc
    for k in range(n):
        if not np.isfinite(eta[k]):
            return np.nan, np.zeros(p), np.zeros((p, p)), False
    ll, grad, a, means, d = _breslow_sweep(eta, x_s, status_s, group_last, True)
    info = np.dot(np.ascontiguousarray(x_s.T), x_s * a.reshape(-1, 1))
    info -= np.dot(np.ascontiguousarray(means.T), means * d.reshape(-1, 1))
    info = 0.5 * (info + info.T)
    return ll, grad, info, True


@njit(cache=True)
def _pen_value(b, lam, mix, pen):
    l1 = 0.0
    l2 = 0.0
    for j in range(b.shape[0]):
        if pen[j] > 0.0:
            l1 += abs(b[j])
            l2 += b[j] * b[j]
    if lam == 0.0:
        return 0.0
    return lam * (mix * l1 + 0.5 * (1.0 - mix) * l2)


@njit(cache=True)
def _cox_path(x_s, status_s, group_last, lambdas, mix, pen, usable, b_init, div_limit,
              tol, inner_tol, max_outer, max_passes):
    """Warm-started proximal-Newton fits of -loglik/n + lam*pen along ``lambdas``.

    Each outer step minimizes the exact second-order model of -loglik/n plus
    the penalty by coordinate descent, then step-halves on the penalized
    objective.  Returns (coefs, status, index of the failing lambda); on
    failure that row holds the last iterate.
    """
    n, p = x_s.shape
    n_lam = lambdas.shape[0]
    out = np.zeros((n_lam, p))
    b = b_init.copy()
    ll, g, info, ok = _cox_derivs(b, x_s, status_s, group_last)
    if not ok:
        return out, _NONFINITE, 0
    all_pen = True
    for j in range(p):
        if pen[j] == 0.0:
            all_pen = False
    l1 = np.zeros(p)
    l2 = np.zeros(p)
    gram = np.empty((p, p))
    lin = np.empty(p)
    for li in range(n_lam):
        lam = lambdas[li]
        for j in range(p):
            l1[j] = lam * mix * pen[j] if usable[j] else 0.0
            l2[j] = lam * (1.0 - mix) * pen[j]
        guard = lam == 0.0 or not all_pen
        obj = -ll / n + _pen_value(b, lam, mix, pen)
        done = False
        for _ in range(max_outer):
            for i in range(p):
                acc = g[i]
                for j in range(p):
                    gram[i, j] = info[i, j] / n
                    acc += info[i, j] * b[j]
                lin[i] = acc / n
            target = b.copy()
            if _cd_quadratic(gram, lin, target, l1, l2, inner_tol, max_passes) < 0:
                out[li] = b
                return out, _INNER_FAIL, li
            weighted = 0.0
            for j in range(p):
                if not usable[j]:
                    target[j] = 0.0
                dj = target[j] - b[j]
                wj = (gram[j, j] + l2[j]) * dj * dj
                if wj > weighted:
                    weighted = wj
            step = target - b
            if weighted < tol:
                # converged: take the last small step without a fresh sweep,
                # carrying the derivatives forward to second order
                h_step = info @ step
                ll += g @ step - 0.5 * (step @ h_step)
                g = g - h_step
                b = target
                done = True
                break
            t = 1.0
            accepted = False
            for _h in range(60):
                cand = b + t * step
                ll_c, g_c, info_c, ok = _cox_derivs(cand, x_s, status_s, group_last)
                if ok:
                    obj_c = -ll_c / n + _pen_value(cand, lam, mix, pen)
                    # tolerate roundoff: near the optimum the gain is below resolution
                    if obj_c <= obj + 1e-12 * abs(obj):
                        accepted = True
                        break
                t *= 0.5
            if not accepted:
                done = True  # no descent left at working precision
                break
            b = cand
            ll, g, info, obj = ll_c, g_c, info_c, obj_c
            if guard:
                for j in range(p):
                    if abs(b[j]) > div_limit[j]:
                        out[li] = b
                        return out, _DIVERGED, li
        if not done:
            out[li] = b
            return out, _OUTER_FAIL, li
        out[li] = b
    return out, _OK, -1


class _CoxProblem:
    def __init__(self, design, resp):
        xs, center, scale, usable = _standardize(design)
        if xs.shape[0] != len(resp):
            raise InvalidParameterError("design and response lengths differ")
        self.n, self.p = xs.shape
        self.center, self.scale, self.usable = center, scale, usable
        self.sorted = _SortedProblem(xs, resp)
        self.resp = resp

    def derivs(self, b):
        return self.sorted.evaluate(b, want_hess=True)

    def path(self, lambdas, mix, mask, b0=None, tol=1e-7, max_outer=200,
             inner_tol=1e-16, max_passes=100_000):
        """Standardized coefficients along ``lambdas`` (warm-started, rows per lambda)."""
        lambdas = np.ascontiguousarray(lambdas, dtype=float)
        b_init = np.zeros(self.p) if b0 is None else np.array(b0, dtype=float)
        srt = self.sorted
        coefs, status, where = _cox_path(
            srt.x_s, srt.status_s, srt.group_last, lambdas, float(mix),
            mask.astype(float), self.usable, b_init, DIVERGENCE_THRESHOLD * self.scale,
            float(tol), float(inner_tol), int(max_outer), int(max_passes))
        if status == _OK:
            return coefs
        lam = lambdas[where]
        last = self.to_original(coefs[where])
        if status == _DIVERGED:
            raise DivergenceError(f"coefficient exceeded divergence threshold at lambda={lam:g}")
        if status == _NONFINITE:
            raise FitError("non-finite linear predictor in penalized Cox fit")
        if status == _INNER_FAIL:
            raise ConvergenceError(f"inner coordinate descent did not converge at lambda={lam:g}",
                                   last)
        raise ConvergenceError(f"no convergence in {max_outer} outer iterations at "
                               f"lambda={lam:g}", last)

    def solve(self, lam, mix, mask, b0=None, **kw):
        return self.path(np.array([lam]), mix, mask, b0=b0, **kw)[0]

    def to_original(self, b):
        return np.where(self.usable, b / self.scale, 0.0)


def fit_cox_elnet(design, resp, spec, tol=1e-7, start=None):
    """Penalized Cox regression; returns the ``p`` coefficients on the original scale.

    Parameters
    ----------
    start : array, optional
        Warm start on the original scale.
    """
    prob = _CoxProblem(design, resp)
    b0 = None if start is None else np.asarray(start, dtype=float) * prob.scale
    b = prob.solve(spec.lam, spec.mix, spec.mask(prob.p), b0=b0, tol=tol)
    return prob.to_original(b)


def cox_kkt_residuals(design, resp, spec, coef):
    """Subgradient-condition violations of a penalized Cox fit on the 1/n score scale."""
    prob = _CoxProblem(design, resp)
    b = np.asarray(coef, dtype=float) * prob.scale
    _, g, _ = prob.derivs(b)
    mask = spec.mask(prob.p)
    return _kkt(g, b, prob.n, spec.lam, spec.mix, mask & prob.usable, prob.usable) / prob.n


# --------------------------------------------------------------------------- path / CV

def _null_score(prob, family, mask):
    """n-scaled score at the fit with every penalized coefficient fixed at zero."""
    free = ~mask & prob.usable
    if family == GAUSSIAN:
        b = np.zeros(prob.p)
        if free.any():
            sub = np.ix_(free, free)
            b[free] = np.linalg.lstsq(prob.gram[sub], prob.lin[free], rcond=None)[0]
        return prob.score(b)
    b = np.zeros(prob.p)
    if free.any():
        # a huge penalty pins every penalized coordinate at exactly zero
        b = prob.solve(1e300, 1.0, mask)
    _, g, _ = prob.derivs(b)
    return g


def _make_problem(design, target, family):
    if family == GAUSSIAN:
        return _GaussianProblem(design, target)
    if family == COX:
        if not isinstance(target, SurvResponse):
            raise InvalidParameterError("cox family needs a SurvResponse target")
        return _CoxProblem(design, target)
    raise InvalidParameterError(f"unknown family {family!r}")


def _lambda_max(prob, family, mix, mask):
    score = _null_score(prob, family, mask)
    eligible = mask & prob.usable
    if not eligible.any():
        raise DegeneratePathError("no penalized column with nonzero variance")
    lam_max = np.max(np.abs(score[eligible])) / (prob.n * mix)
    if not lam_max > 0.0:
        raise DegeneratePathError("null-model score is zero for every penalized column")
    return lam_max


def lambda_path(design, target, family=GAUSSIAN, mix=1.0, n_lambda=100, eps_ratio=0.01,
                penalize_mask=None):
    """Log-spaced descending grid from the smallest all-zero penalty down to ``eps_ratio`` of it."""
    if not 0.0 < mix <= 1.0:
        raise InvalidParameterError(f"mix must lie in (0, 1], got {mix}")
    if n_lambda < 2:
        raise InvalidParameterError("n_lambda must be at least 2")
    prob = _make_problem(design, target, family)
    mask = PenaltySpec(mix, 0.0, penalize_mask).mask(prob.p)
    lam_max = _lambda_max(prob, family, mix, mask)
    return lam_max * np.power(eps_ratio, np.linspace(0.0, 1.0, n_lambda))


def _fit_path(prob, family, lambdas, mix, mask):
    """Warm-started fits along ``lambdas``; rows are original-scale coefficient vectors."""
    out = []
    if family == GAUSSIAN:
        b = np.zeros(prob.p)
        for lam in lambdas:
            b = prob.solve(lam, mix, mask, b0=b)
            out.append(prob.to_original(b))
    else:
        for b in prob.path(lambdas, mix, mask):
            out.append(prob.to_original(b))
    return np.array(out)


def fit_path(design, target, family, lambdas, mix=1.0, penalize_mask=None):
    prob = _make_problem(design, target, family)
    mask = PenaltySpec(mix, 0.0, penalize_mask).mask(prob.p)
    return _fit_path(prob, family, np.asarray(lambdas, dtype=float), mix, mask)


def assign_folds(n, k, rng):
    """Uniform unstratified partition; the first ``n % k`` folds get one extra subject."""
    folds = np.empty(n, dtype=np.int64)
    folds[rng.permutation(n)] = np.arange(n) % k
    return folds


def cv_select_lambda(design, target, family, mix, k, rng, n_lambda=100, eps_ratio=0.01,
                     penalize_mask=None, max_retries=10):
    """K-fold cross-validation over a shared lambda path.

    Gaussian folds are scored by mean squared error.  Cox folds are scored by
    the grouped partial-likelihood deviance
    ``-2 [loglik_all(b_-f) - loglik_train(b_-f)]`` divided by the fold's
    event count; fold summaries are combined with fold-size (Gaussian) or
    event-count (Cox) weights.
    """
    x = np.asarray(design, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if k < 2:
        raise InvalidParameterError("need at least 2 folds")
    if n < 2 * k:
        raise InsufficientDataError(f"n={n} is too small for {k}-fold cross-validation")

    prob = _make_problem(x, target, family)
    mask = PenaltySpec(mix, 0.0, penalize_mask).mask(prob.p)
    lam_max = _lambda_max(prob, family, mix, mask)
    lambdas = lam_max * np.power(eps_ratio, np.linspace(0.0, 1.0, n_lambda))
    path = _fit_path(prob, family, lambdas, mix, mask)

    if family == COX:
        status = target.status
        for _ in range(max_retries + 1):
            folds = assign_folds(n, k, rng)
            # every held-out fold needs an event (so every training fold does too)
            if np.all(np.bincount(folds[status], minlength=k) > 0):
                break
        else:
            raise FoldFailureError(
                f"some fold has no events after {max_retries} resamples")
    else:
        folds = assign_folds(n, k, rng)

    raw = np.full((k, n_lambda), np.nan)
    weights = np.zeros(k)
    if family == GAUSSIAN:
        y = np.asarray(target, dtype=float)
        for f in range(k):
            test = folds == f
            coefs = _fit_path(_GaussianProblem(x[~test], y[~test]), GAUSSIAN, lambdas, mix, mask)
            pred = coefs[:, :1].T + x[test] @ coefs[:, 1:].T
            raw[f] = np.mean((y[test][:, None] - pred) ** 2, axis=0)
            weights[f] = test.sum()
    else:
        full = _SortedProblem(x, target)
        for f in range(k):
            test = folds == f
            d_f = int(target.status[test].sum())
            train_resp = target.subset(~test)
            coefs = _fit_path(_CoxProblem(x[~test], train_resp), COX, lambdas, mix, mask)
            train = _SortedProblem(x[~test], train_resp)
            ll_all = _loglik_many(full.x_s @ coefs.T, full.status_s, full.group_last)
            ll_train = _loglik_many(train.x_s @ coefs.T, train.status_s, train.group_last)
            raw[f] = -2.0 * (ll_all - ll_train) / d_f
            weights[f] = d_f

    w = weights
    cv_mean = w @ raw / w.sum()
    cv_se = np.sqrt((w @ (raw - cv_mean) ** 2) / w.sum() / (k - 1))
    i_min = int(np.argmin(cv_mean))
    i_1se = int(np.flatnonzero(cv_mean <= cv_mean[i_min] + cv_se[i_min])[0])
    return CvResult(lambda_grid=lambdas, cv_mean=cv_mean, cv_se=cv_se,
                    lambda_min=float(lambdas[i_min]), lambda_1se=float(lambdas[i_1se]),
                    fold_assignment=folds, index_min=i_min, index_1se=i_1se, path_coefs=path)

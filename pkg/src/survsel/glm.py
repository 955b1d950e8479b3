"""Unpenalized Gaussian and logistic regression with Wald-type inference."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .errors import (ConvergenceError, InsufficientDataError, InvalidParameterError,
                     NonIdentifiableError, SeparationError)

SEPARATION_THRESHOLD = 30.0


@dataclass(frozen=True, eq=False)
class FitSummary:
    """Coefficients, standard errors and two-sided p-values.

    For the regression fits the intercept comes first; Cox fits have none.
    """

    coef: np.ndarray
    se: np.ndarray
    p_value: np.ndarray
    converged: bool
    n_used: int
    loglik: float = float("nan")
    n_iter: int = 0


def _augment(design):
    design = np.asarray(design, dtype=float)
    if design.ndim == 1:
        design = design[:, None]
    return np.column_stack([np.ones(design.shape[0]), design])


def _check_rank(xa, tol=1e-10):
    r = np.linalg.qr(xa, mode="r")
    diag = np.abs(np.diag(r))
    scale = max(diag.max(), 1.0)
    weak = np.flatnonzero(diag <= tol * scale * np.sqrt(xa.shape[0]))
    if weak.size:
        j = int(weak[0])
        name = "intercept" if j == 0 else f"column {j - 1}"
        raise NonIdentifiableError(f"design is rank deficient at {name}")


def fit_ols(design, response):
    """Least squares with t-distribution p-values (intercept added)."""
    xa = _augment(design)
    y = np.asarray(response, dtype=float)
    n, k = xa.shape
    if y.shape[0] != n:
        raise InvalidParameterError("design and response lengths differ")
    if n <= k:
        raise InsufficientDataError(f"need more than {k} observations, got {n}")
    _check_rank(xa)
    q, r = np.linalg.qr(xa)
    coef = np.linalg.solve(r, q.T @ y)
    resid = y - xa @ coef
    dof = n - k
    sigma2 = resid @ resid / dof
    r_inv = np.linalg.solve(r, np.eye(k))
    se = np.sqrt(sigma2 * np.sum(r_inv**2, axis=1))
    with np.errstate(divide="ignore", invalid="ignore"):
        tstat = coef / se
    tstat = np.where(se > 0, tstat, np.where(coef == 0, 0.0, np.inf))
    p = 2.0 * stats.t.sf(np.abs(tstat), dof)
    return FitSummary(coef=coef, se=se, p_value=p, converged=True, n_used=n)


def _logistic_loglik(eta, y):
    # y*eta - log(1 + exp(eta)), stable
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def fit_logistic(design, response, max_iter=100, tol=1e-9, trace=None):
    """Logistic regression by IRLS with step-halving.

    Columns are standardized internally; a standardized coefficient larger
    than ``SEPARATION_THRESHOLD`` in magnitude is reported as separation.
    If ``trace`` is a list, the log-likelihood of every accepted iterate is
    appended to it.
    """
    xa = _augment(design)
    y = np.asarray(response, dtype=float)
    n, k = xa.shape
    if y.shape[0] != n:
        raise InvalidParameterError("design and response lengths differ")
    n_pos = y.sum()
    if n_pos == 0 or n_pos == n:
        raise NonIdentifiableError("response contains a single class")
    if n <= k - 1:
        raise InsufficientDataError(f"need more than {k - 1} observations, got {n}")

    center = xa[:, 1:].mean(axis=0)
    scale = xa[:, 1:].std(axis=0)
    if np.any(scale == 0):
        j = int(np.flatnonzero(scale == 0)[0])
        raise NonIdentifiableError(f"column {j} is constant")
    z = np.column_stack([np.ones(n), (xa[:, 1:] - center) / scale])
    _check_rank(z)

    p0 = n_pos / n
    b = np.zeros(k)
    b[0] = np.log(p0 / (1.0 - p0))
    eta = z @ b
    ll = _logistic_loglik(eta, y)
    if trace is not None:
        trace.append(ll)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        mu = special.expit(eta)
        w = mu * (1.0 - mu)
        grad = z.T @ (y - mu)
        info = z.T @ (z * w[:, None])
        try:
            step = np.linalg.solve(info, grad)
        except np.linalg.LinAlgError:
            raise SeparationError("information matrix became singular") from None
        t = 1.0
        for _ in range(40):
            b_new = b + t * step
            eta_new = z @ b_new
            ll_new = _logistic_loglik(eta_new, y)
            if ll_new >= ll - 1e-12 * abs(ll):
                break
            t *= 0.5
        else:
            break
        if np.max(np.abs(b_new[1:])) > SEPARATION_THRESHOLD:
            raise SeparationError("coefficient diverging: quasi-complete separation")
        rel = abs(ll_new - ll) / (abs(ll) + 1e-12)
        b, eta, ll = b_new, eta_new, ll_new
        if trace is not None:
            trace.append(ll)
        if rel < tol and np.max(np.abs(t * step)) < 1e-6:
            converged = True
            break
    if not converged:
        raise ConvergenceError(f"IRLS did not converge in {max_iter} iterations", b)

    # one extra Newton step polishes the first-order condition
    mu = special.expit(eta)
    w = mu * (1.0 - mu)
    info = z.T @ (z * w[:, None])
    b_pol = b + np.linalg.solve(info, z.T @ (y - mu))
    if _logistic_loglik(z @ b_pol, y) >= ll:
        b = b_pol
        eta = z @ b
        ll = _logistic_loglik(eta, y)
        mu = special.expit(eta)
        w = mu * (1.0 - mu)
        info = z.T @ (z * w[:, None])
    cov_std = np.linalg.inv(info)

    # back to the original scale: beta = T b with T the standardization map
    tmat = np.eye(k)
    tmat[1:, 1:] = np.diag(1.0 / scale)
    tmat[0, 1:] = -center / scale
    coef = tmat @ b
    cov = tmat @ cov_std @ tmat.T
    se = np.sqrt(np.diag(cov))
    p = 2.0 * stats.norm.sf(np.abs(coef / se))
    return FitSummary(coef=coef, se=se, p_value=p, converged=True, n_used=n,
                      loglik=ll, n_iter=it)

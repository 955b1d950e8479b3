"""Cox proportional-hazards partial likelihood (Breslow ties) and Newton-Raphson fit."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numba import njit
from scipy import stats

from .errors import (DivergenceError, InsufficientDataError, InvalidParameterError,
                     NonIdentifiableError, SingularityError, SurvselError)
from .glm import FitSummary

DIVERGENCE_THRESHOLD = 50.0


@dataclass(frozen=True, eq=False)
class SurvResponse:
    time: np.ndarray
    status: np.ndarray

    def __post_init__(self):
        time = np.asarray(self.time, dtype=float)
        status = np.asarray(self.status, dtype=bool)
        if time.ndim != 1 or time.shape != status.shape:
            raise InvalidParameterError("time and status must be 1-d arrays of equal length")
        if not np.all(np.isfinite(time)) or np.any(time <= 0):
            raise InvalidParameterError("survival times must be positive and finite")
        if not status.any():
            raise InsufficientDataError("no events: the partial likelihood is void")
        object.__setattr__(self, "time", time)
        object.__setattr__(self, "status", status)

    def __len__(self):
        return self.time.shape[0]

    @property
    def n_events(self):
        return int(self.status.sum())

    @cached_property
    def order(self):
        """Subject indices sorted by decreasing time."""
        return np.argsort(-self.time, kind="stable")

    @cached_property
    def group_last(self):
        """In ``order``, True at the last member of each run of tied times."""
        t = self.time[self.order]
        last = np.ones(t.shape[0], dtype=np.bool_)
        last[:-1] = t[:-1] != t[1:]
        return last

    def subset(self, mask):
        return SurvResponse(self.time[mask], self.status[mask])


_RESCALE_GAP = 300.0


@njit(cache=True)
def _breslow_sweep(eta_s, x_s, status_s, group_last, want_hess):
    """Log partial likelihood and score in one descending-time pass.

    Inputs are pre-sorted by decreasing time.  Risk-set sums are kept relative
    to a reference linear predictor ``m`` that follows the running maximum; it
    is moved only when the maximum outruns it by ``_RESCALE_GAP`` nats, which
    keeps every scaled weight below exp(300) while the row that set the
    reference keeps the scaled sum at least 1.

    With ``want_hess`` it also returns the risk-set means ``means[g]`` and tie
    counts ``d[g]`` of the event groups, and the subject weights
    ``a[k] = sum_g d_g exp(eta_k) / S0_g`` over the event groups whose risk
    set contains row k, so that the information is ``X'diag(a)X - M'diag(d)M``.
    """
    n, p = x_s.shape
    s0 = 0.0
    s1 = np.zeros(p)
    m = eta_s[0] if n > 0 else 0.0
    ll = 0.0
    grad = np.zeros(p)
    means = np.empty((n, p))
    dcount = np.empty(n)
    ref = np.empty(n)
    inv_s0 = np.zeros(n)
    n_groups = 0
    d = 0
    for k in range(n):
        e = eta_s[k]
        if e > m + _RESCALE_GAP:
            r = np.exp(m - e)
            s0 *= r
            for j in range(p):
                s1[j] *= r
            m = e
        ref[k] = m
        w = np.exp(e - m)
        s0 += w
        for j in range(p):
            s1[j] += w * x_s[k, j]
        if status_s[k]:
            d += 1
            ll += e
            for j in range(p):
                grad[j] += x_s[k, j]
        if group_last[k] and d > 0:
            ll -= d * (m + np.log(s0))
            inv = 1.0 / s0
            for j in range(p):
                mj = s1[j] * inv
                grad[j] -= d * mj
                means[n_groups, j] = mj
            dcount[n_groups] = d
            inv_s0[k] = d * inv
            n_groups += 1
            d = 0
    a = np.zeros(n)
    if want_hess:
        # acc = sum over groups closing at or after row k of d_g / s0_g, relative to ref[k]
        acc = 0.0
        for k in range(n - 1, -1, -1):
            if k < n - 1 and ref[k] != ref[k + 1]:
                acc *= np.exp(ref[k] - ref[k + 1])
            acc += inv_s0[k]
            a[k] = acc * np.exp(eta_s[k] - ref[k])
    return ll, grad, a, means[:n_groups], dcount[:n_groups]


class _SortedProblem:
    """Design and response pre-sorted once for repeated likelihood evaluations."""

    def __init__(self, design, resp):
        x = np.asarray(design, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.shape[0] != len(resp):
            raise InvalidParameterError("design and response lengths differ")
        self.resp = resp
        self.p = x.shape[1]
        order = resp.order
        self.x_s = np.ascontiguousarray(x[order])
        self.status_s = resp.status[order]
        self.group_last = resp.group_last

    def evaluate(self, beta, want_hess=True):
        eta_s = self.x_s @ np.asarray(beta, dtype=float)
        if not np.all(np.isfinite(eta_s)):
            raise SurvselError("non-finite linear predictor in partial likelihood")
        ll, grad, a, means, d = _breslow_sweep(
            eta_s, self.x_s, self.status_s, self.group_last, want_hess)
        if not want_hess:
            return ll, grad, None
        info = (self.x_s * a[:, None]).T @ self.x_s - (means * d[:, None]).T @ means
        return ll, grad, 0.5 * (info + info.T)


def cox_partial_loglik(beta, design, resp):
    """Breslow log partial likelihood at ``beta``."""
    ll, _, _ = _SortedProblem(design, resp).evaluate(beta, want_hess=False)
    return ll


def cox_score_info(beta, design, resp):
    """Log partial likelihood, its gradient and the observed information."""
    return _SortedProblem(design, resp).evaluate(beta, want_hess=True)


def fit_cox_nr(design, resp, tol=1e-9, max_iter=100, trace=None):
    """Maximize the partial likelihood by Newton-Raphson with step-halving.

    Parameters
    ----------
    design : (n, p) array
    resp : SurvResponse
    tol : float
        Convergence threshold on the infinity norm of the score.
    max_iter : int
    trace : list, optional
        If given, the log partial likelihood of every accepted iterate is
        appended to it.

    Returns
    -------
    FitSummary
        ``converged`` is False when the tolerance was not met; the estimate is
        still returned so callers can decide.
    """
    prob = _SortedProblem(design, resp)
    p = prob.p
    if resp.n_events <= p:
        raise InsufficientDataError(
            f"{resp.n_events} events cannot identify {p} coefficients")
    beta = np.zeros(p)
    ll, grad, info = prob.evaluate(beta)
    flat = np.flatnonzero(np.diag(info) <= 1e-12 * resp.n_events)
    if flat.size:
        raise NonIdentifiableError(
            f"column {int(flat[0])} is constant within every risk set: flat likelihood")
    if trace is not None:
        trace.append(ll)

    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        if np.max(np.abs(grad)) < tol:
            converged = True
            break
        step = _newton_step(info, grad)
        t = 1.0
        for _ in range(60):
            cand = beta + t * step
            ll_c, grad_c, info_c = prob.evaluate(cand)
            # tolerate roundoff: near the optimum the gain is below resolution
            if ll_c >= ll - 1e-12 * abs(ll):
                break
            t *= 0.5
        else:
            break  # no ascent possible at working precision
        if np.max(np.abs(cand)) > DIVERGENCE_THRESHOLD:
            raise DivergenceError(
                "coefficient exceeded divergence threshold: monotone likelihood")
        stalled = ll_c - ll <= 1e-15 * abs(ll) and np.max(np.abs(t * step)) < 1e-13
        beta, ll, grad, info = cand, ll_c, grad_c, info_c
        if trace is not None:
            trace.append(ll)
        if stalled:
            break
    else:
        it = max_iter
    if not converged:
        converged = bool(np.max(np.abs(grad)) < tol)

    try:
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError:
        raise SingularityError("information matrix is singular at the estimate") from None
    var = np.diag(cov)
    if np.any(~np.isfinite(var)) or np.any(var <= 0):
        raise SingularityError("information matrix is not positive definite at the estimate")
    se = np.sqrt(var)
    p_value = 2.0 * stats.norm.sf(np.abs(beta / se))
    return FitSummary(coef=beta, se=se, p_value=p_value, converged=converged,
                      n_used=len(resp), loglik=ll, n_iter=it)


def _newton_step(info, grad):
    try:
        cond = np.linalg.cond(info)
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularityError("information matrix is singular")
    return np.linalg.solve(info, grad)

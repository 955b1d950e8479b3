import numpy as np
import pytest
from hypothesis import given, strategies as st

from survsel.cox import SurvResponse, cox_partial_loglik, cox_score_info, fit_cox_nr
from survsel.errors import (DivergenceError, InsufficientDataError, InvalidParameterError,
                            NonIdentifiableError, SurvselError)

from oracle_data import COX8, COX14

T8 = np.array([5., 8., 3., 12., 7., 2., 9., 4.])
S8 = np.array([1, 1, 0, 1, 1, 1, 0, 1], dtype=bool)
X8 = np.array([0.5, -1.2, 0.3, -0.8, 1.1, 2.0, -0.4, 0.9])[:, None]


def naive_loglik(beta, x, time, status):
    """Quadratic-cost Breslow log partial likelihood."""
    eta = x @ beta
    total = 0.0
    for i in range(len(time)):
        if status[i]:
            at_risk = time >= time[i]
            total += eta[i] - np.log(np.sum(np.exp(eta[at_risk])))
    return total


def random_problem(rng, n=30, p=2, ties=False):
    x = rng.standard_normal((n, p))
    t = rng.exponential(size=n) * np.exp(-x @ np.linspace(0.5, -0.5, p))
    if ties:
        t = np.ceil(t * 3)
    s = rng.random(n) < 0.7
    s[0] = True
    return x, SurvResponse(t, s)


# ---------------------------------------------------------------- response

def test_response_validation():
    with pytest.raises(InvalidParameterError):
        SurvResponse(np.array([1.0, -1.0]), np.array([True, True]))
    with pytest.raises(InvalidParameterError):
        SurvResponse(np.array([1.0, np.inf]), np.array([True, True]))
    with pytest.raises(InsufficientDataError):
        SurvResponse(np.array([1.0, 2.0]), np.array([False, False]))


# ---------------------------------------------------------------- partial likelihood

def test_null_model_closed_form():
    resp = SurvResponse(T8, S8)
    expected = -sum(np.log(np.sum(T8 >= T8[i])) for i in np.flatnonzero(S8))
    assert cox_partial_loglik(np.zeros(1), X8, resp) == pytest.approx(expected, abs=1e-12)


def test_handcrafted_against_naive_loop():
    t = np.array([2.0, 3.0, 3.0, 1.0, 4.0])
    s = np.array([True, True, False, True, True])
    x = np.array([[0.1, 1.0], [-0.5, 0.2], [1.2, -0.3], [0.0, 0.0], [0.7, 0.9]])
    beta = np.array([0.4, -1.3])
    got = cox_partial_loglik(beta, x, SurvResponse(t, s))
    assert got == pytest.approx(naive_loglik(beta, x, t, s), abs=1e-12)


@given(seed=st.integers(0, 2**32 - 1), ties=st.booleans())
def test_sweep_matches_naive_loop(seed, ties):
    rng = np.random.default_rng(seed)
    x, resp = random_problem(rng, n=25, p=3, ties=ties)
    beta = rng.standard_normal(3)
    got = cox_partial_loglik(beta, x, resp)
    assert got == pytest.approx(naive_loglik(beta, x, resp.time, resp.status), rel=1e-11, abs=1e-11)


@given(seed=st.integers(0, 2**32 - 1), shift=st.floats(-50, 50))
def test_location_invariance(seed, shift):
    rng = np.random.default_rng(seed)
    x, resp = random_problem(rng, p=2)
    beta = np.array([0.7, -0.4])
    moved = x.copy()
    moved[:, 1] += shift
    assert cox_partial_loglik(beta, moved, resp) == pytest.approx(
        cox_partial_loglik(beta, x, resp), abs=1e-10)


def test_large_predictors_are_stable():
    rng = np.random.default_rng(3)
    x, resp = random_problem(rng, n=40, p=1)
    beta = np.array([400.0])
    got = cox_partial_loglik(beta, x, resp)
    assert np.isfinite(got)
    shifted = cox_partial_loglik(beta, x + 3.0, resp)
    assert got == pytest.approx(shifted, rel=1e-9)


def test_non_finite_predictor_is_an_error():
    x = X8.copy()
    x[2, 0] = np.nan
    with pytest.raises(SurvselError):
        cox_partial_loglik(np.ones(1), x, SurvResponse(T8, S8))


def test_score_and_information_match_finite_differences(rng):
    x, resp = random_problem(rng, n=40, p=3, ties=True)
    beta = np.array([0.3, -0.2, 0.5])
    _, grad, info = cox_score_info(beta, x, resp)
    h = 1e-5
    num_grad = np.zeros(3)
    num_info = np.zeros((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        num_grad[j] = (cox_partial_loglik(beta + e, x, resp)
                       - cox_partial_loglik(beta - e, x, resp)) / (2 * h)
        _, gp, _ = cox_score_info(beta + e, x, resp)
        _, gm, _ = cox_score_info(beta - e, x, resp)
        num_info[:, j] = -(gp - gm) / (2 * h)
    np.testing.assert_allclose(grad, num_grad, rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(info, num_info, rtol=1e-6, atol=1e-8)


# ---------------------------------------------------------------- Newton-Raphson

def test_single_covariate_matches_grid_search():
    resp = SurvResponse(T8, S8)
    grid = np.linspace(-20, 20, 40001)
    values = [cox_partial_loglik(np.array([b]), X8, resp) for b in grid]
    best = grid[int(np.argmax(values))]
    fit = fit_cox_nr(X8, resp)
    assert abs(fit.coef[0] - best) < 1e-3


def test_single_covariate_reference_values():
    fit = fit_cox_nr(X8, SurvResponse(T8, S8))
    np.testing.assert_allclose(fit.coef, COX8["coef"], rtol=1e-8)
    np.testing.assert_allclose(fit.se, COX8["se"], rtol=1e-7)
    assert fit.loglik == pytest.approx(COX8["ll"], rel=1e-10)


def test_tied_times_reference_values():
    x = np.array(COX14["x"])
    resp = SurvResponse(np.array(COX14["time"]), np.array(COX14["status"], dtype=bool))
    assert cox_partial_loglik(np.zeros(2), x, resp) == pytest.approx(COX14["ll0"], rel=1e-12)
    fit = fit_cox_nr(x, resp)
    np.testing.assert_allclose(fit.coef, COX14["coef"], rtol=1e-8)
    np.testing.assert_allclose(fit.se, COX14["se"], rtol=1e-7)
    assert fit.loglik == pytest.approx(COX14["ll"], rel=1e-10)


def test_constant_covariate_is_non_identifiable():
    with pytest.raises(NonIdentifiableError):
        fit_cox_nr(np.full((8, 1), 3.0), SurvResponse(T8, S8))


def test_too_few_events():
    t = np.array([1.0, 2.0, 3.0])
    with pytest.raises(InsufficientDataError):
        fit_cox_nr(np.eye(3)[:, :2], SurvResponse(t, np.array([True, False, False])))


def test_monotone_likelihood_diverges():
    # the covariate orders the event times perfectly; on this scale the score
    # is still far from zero when the coefficient crosses the threshold
    x = 0.1 * np.arange(10.0)[:, None]
    t = 10.0 - np.arange(10.0)
    with pytest.raises(DivergenceError):
        fit_cox_nr(x, SurvResponse(t, np.ones(10, dtype=bool)))


def test_standard_errors_match_numerical_hessian(rng):
    x, resp = random_problem(rng, n=80, p=2)
    fit = fit_cox_nr(x, resp)
    h = 1e-4
    hess = np.zeros((2, 2))
    f = lambda b: cox_partial_loglik(b, x, resp)
    for i in range(2):
        for j in range(2):
            ei, ej = np.eye(2)[i] * h, np.eye(2)[j] * h
            hess[i, j] = (f(fit.coef + ei + ej) - f(fit.coef + ei - ej)
                          - f(fit.coef - ei + ej) + f(fit.coef - ei - ej)) / (4 * h * h)
    se_num = np.sqrt(np.diag(np.linalg.inv(-hess)))
    np.testing.assert_allclose(fit.se, se_num, rtol=1e-4)


@given(seed=st.integers(0, 2**32 - 1))
def test_newton_properties(seed):
    rng = np.random.default_rng(seed)
    x, resp = random_problem(rng, n=60, p=2, ties=bool(seed % 2))
    trace = []
    fit = fit_cox_nr(x, resp, trace=trace)
    assert np.all(np.diff(trace) >= -1e-12 * np.abs(trace[1:]))
    assert fit.converged
    _, grad, _ = cox_score_info(fit.coef, x, resp)
    assert np.max(np.abs(grad)) < 1e-9
    assert np.all((fit.p_value >= 0) & (fit.p_value <= 1)) and np.all(fit.se > 0)


# scales stay moderate: the divergence rule applies to the raw coefficient
@given(seed=st.integers(0, 2**32 - 1), c=st.sampled_from([-3.0, 0.2, 0.5, 7.0]))
def test_column_rescaling(seed, c):
    rng = np.random.default_rng(seed)
    x, resp = random_problem(rng, n=60, p=2)
    a = fit_cox_nr(x, resp)
    scaled = x.copy()
    scaled[:, 0] *= c
    b = fit_cox_nr(scaled, resp)
    assert b.coef[0] == pytest.approx(a.coef[0] / c, rel=1e-8, abs=1e-12)
    # a negative scale flips the sign of z, not its size
    z_a, z_b = np.abs(a.coef / a.se), np.abs(b.coef / b.se)
    assert z_b[0] == pytest.approx(z_a[0], rel=1e-8, abs=1e-10)
    assert z_b[1] == pytest.approx(z_a[1], rel=1e-8, abs=1e-10)

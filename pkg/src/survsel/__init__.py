"""Benchmark of feature-selection strategies on simulated Cox-model survival data."""

from .bench import (MethodMetrics, ScenarioReport, aggregate, degenerate_alpha_probe,
                    run_scenario, score_dataset, wilson_interval)
from .config import ScenarioConfig, SolverSettings, TrueModel
from .cox import SurvResponse, cox_partial_loglik, cox_score_info, fit_cox_nr
from .elnet import (CvResult, PenaltySpec, cv_select_lambda, fit_cox_elnet,
                    fit_gaussian_elnet, fit_path, lambda_path)
from .errors import (ConvergenceError, DegeneratePathError, DivergenceError, FitError,
                     FoldFailureError, GenerationError, InsufficientDataError,
                     InvalidParameterError, NonIdentifiableError, SeparationError,
                     SingularityError, SurvselError)
from .glm import FitSummary, fit_logistic, fit_ols
from .selectors import ALL_METHODS, Method, SelectionResult, run_all_selectors
from .sim import (BaselineParams, SimDataset, apply_censoring, assemble_dataset,
                  draw_baseline_params, gen_survival_times, replicate_dataset, sample_mvn)

__version__ = "0.1.0"

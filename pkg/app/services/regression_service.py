"""
Regression Service Module
==========================
Maximum-likelihood fitting of the two per-stop demand models.

POISSON COUNT MODEL:
-------------------
log(lambda) = beta . x, fitted by Fisher scoring (IRLS) with step halving,
so the log-likelihood never decreases between iterations. Before fitting,
an LP over the grouped covariate patterns checks whether the MLE exists;
if some direction drives every zero-count pattern to -inf while leaving the
positive patterns unchanged, the likelihood is unbounded.

MULTINOMIAL DESTINATION MODEL:
-----------------------------
Softmax over s destinations with the reference category's activation
pinned to 0. Fitted by full-batch gradient ascent with Barzilai-Borwein
step lengths and Armijo backtracking on the L2-penalized log-likelihood.

DEVELOPER NOTES:
---------------
- The Poisson stopping rule compares the gradient infinity-norm with
  `poisson_tol * max(1, sum(y))`; an absolute 1e-8 is below floating point
  resolution once counts sum to thousands.
- Coefficients are stored as Python floats; JSON output uses the shortest
  round-trip representation, so save/load is bit exact.
"""

import json
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg
from scipy.optimize import linprog
from scipy.special import gammaln, logsumexp, softmax

from ..config import RegressionConfig, config
from ..models.calendar import CovariateVector
from ..models.regression import DestinationModel, FitReport, PoissonModel, StopModels
from ..utils.decorators import timed
from ..utils.errors import (
    EmptyCategoryError,
    SchemaError,
    SeparationError,
    SingularDesignError,
)
from ..utils.logger import logger

Covariates = Union[CovariateVector, Sequence[float], np.ndarray]

MAX_HALVINGS = 40
ARMIJO = 1e-4


def _row(x: Covariates) -> np.ndarray:
    if isinstance(x, CovariateVector):
        return x.as_array()
    return np.asarray(x, dtype=float)


def _design(observations: Iterable[Tuple[Covariates, float]]) -> Tuple[np.ndarray, np.ndarray]:
    rows, targets = [], []
    for x, y in observations:
        rows.append(_row(x))
        targets.append(y)
    if not rows:
        raise SchemaError("at least one observation is required")
    return np.vstack(rows), np.asarray(targets)


class RegressionService:
    """Fits and evaluates Poisson and multinomial-logit GLMs"""

    def __init__(self, settings: Optional[RegressionConfig] = None):
        self.settings = settings or config.regression

    # ==================== POISSON ====================

    def fit_poisson(
        self,
        observations: Iterable[Tuple[Covariates, int]],
        stop_id: int = 0,
        allow_ridge_fallback: Optional[bool] = None,
    ) -> Tuple[PoissonModel, FitReport]:
        X, y = _design(observations)
        return self.fit_poisson_arrays(X, y, stop_id, allow_ridge_fallback)

    @timed
    def fit_poisson_arrays(
        self,
        X: np.ndarray,
        y: np.ndarray,
        stop_id: int = 0,
        allow_ridge_fallback: Optional[bool] = None,
    ) -> Tuple[PoissonModel, FitReport]:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).ravel()
        if X.shape[0] != y.shape[0] or y.size == 0:
            raise SchemaError("design and counts must be nonempty and of equal length")
        if np.any(y < 0) or np.any(y != np.floor(y)):
            raise SchemaError("counts must be nonnegative integers")

        penalty = 0.0
        if self.has_separation(X, y):
            fallback = self.settings.allow_ridge_fallback if allow_ridge_fallback is None else allow_ridge_fallback
            if not fallback:
                raise SeparationError(
                    f"Poisson MLE does not exist for stop {stop_id}",
                    details="a covariate direction drives all zero-count patterns to -inf",
                )
            penalty = self.settings.separation_ridge
            logger.warning(f"Stop {stop_id}: separated counts, refitting with ridge {penalty:g}")

        beta, report = self._irls(X, y, penalty)
        report.penalized = penalty > 0
        return PoissonModel(stop_id=stop_id, beta=beta.tolist()), report

    def has_separation(self, X: np.ndarray, y: np.ndarray) -> bool:
        """
        True when some d with X_pos d = 0 and X_zero d <= 0 has X_zero d != 0.
        Solved on unique covariate patterns with d boxed to [-1, 1].
        """
        patterns, inverse = np.unique(X, axis=0, return_inverse=True)
        totals = np.bincount(inverse.ravel(), weights=y, minlength=len(patterns))
        zero = patterns[totals == 0]
        positive = patterns[totals > 0]
        if len(zero) == 0:
            return False

        q = X.shape[1]
        result = linprog(
            c=zero.sum(axis=0),
            A_ub=zero,
            b_ub=np.zeros(len(zero)),
            A_eq=positive if len(positive) else None,
            b_eq=np.zeros(len(positive)) if len(positive) else None,
            bounds=[(-1.0, 1.0)] * q,
            method="highs",
        )
        return result.status == 0 and result.fun < -1e-7

    def _irls(self, X: np.ndarray, y: np.ndarray, penalty: float) -> Tuple[np.ndarray, FitReport]:
        q = X.shape[1]
        beta = np.zeros(q)
        if np.all(X[:, 0] == 1.0) and y.mean() > 0:
            beta[0] = np.log(y.mean())

        tol = self.settings.poisson_tol
        objective = self._penalized_ll(X, y, beta, penalty)
        history = [objective]
        ridge = 0.0
        iterations = 0

        while True:
            mu = np.exp(X @ beta)
            grad = X.T @ (y - mu) - penalty * beta
            grad_norm = float(np.max(np.abs(grad)))
            if grad_norm <= tol or iterations >= self.settings.poisson_max_iter:
                break

            info = (X.T * mu) @ X + penalty * np.eye(q)
            step, ridge = self._solve_normal_equations(info, grad, ridge)

            t = 1.0
            accepted = False
            for _ in range(MAX_HALVINGS):
                candidate = beta + t * step
                value = self._penalized_ll(X, y, candidate, penalty)
                if np.isfinite(value) and value >= objective - 1e-12 * max(1.0, abs(objective)):
                    accepted = True
                    break
                t *= 0.5
            iterations += 1
            if not accepted:
                logger.debug(f"IRLS step halving stalled at iteration {iterations}, |grad|={grad_norm:.3e}")
                break

            assert value >= objective - 1e-12 * max(1.0, abs(objective)), "log-likelihood decreased"
            beta, objective = candidate, value
            history.append(objective)

        report = FitReport(
            log_likelihood=self._log_likelihood(X, y, beta),
            iterations=iterations,
            converged=grad_norm <= tol,
            gradient_norm=grad_norm,
            history=history,
        )
        return beta, report

    def _solve_normal_equations(self, info: np.ndarray, grad: np.ndarray, ridge: float) -> Tuple[np.ndarray, float]:
        """Cholesky solve; on failure add the rescue ridge once and retry"""
        attempts = [ridge] if ridge > 0 else [0.0, self.settings.ridge_rescue]
        for extra in attempts:
            try:
                factor = linalg.cho_factor(info + extra * np.eye(len(grad)))
                step = linalg.cho_solve(factor, grad)
            except linalg.LinAlgError:
                logger.debug(f"normal equations not positive definite with ridge {extra:g}")
                continue
            if np.all(np.isfinite(step)):
                return step, extra
        raise SingularDesignError("weighted normal equations are singular beyond ridge rescue")

    def _penalized_ll(self, X: np.ndarray, y: np.ndarray, beta: np.ndarray, penalty: float) -> float:
        return self._log_likelihood(X, y, beta) - 0.5 * penalty * float(beta @ beta)

    @staticmethod
    def _log_likelihood(X: np.ndarray, y: np.ndarray, beta: np.ndarray) -> float:
        eta = X @ beta
        with np.errstate(over="ignore"):
            return float(np.sum(y * eta - np.exp(eta) - gammaln(y + 1.0)))

    def predict_intensity(self, model: PoissonModel, x: Covariates) -> float:
        beta = model.coefficients()
        row = _row(x)
        if row.shape[-1] != beta.shape[0]:
            raise SchemaError(f"covariate length {row.shape[-1]} does not match model length {beta.shape[0]}")
        return float(np.exp(row @ beta))

    def poisson_log_likelihood(self, model: PoissonModel, observations: Iterable[Tuple[Covariates, int]]) -> float:
        X, y = _design(observations)
        return self._log_likelihood(X, y.astype(float), model.coefficients())

    # ==================== MULTINOMIAL ====================

    def fit_multinomial(
        self,
        observations: Iterable[Tuple[Covariates, int]],
        categories: Optional[List[int]] = None,
        stop_id: int = 0,
        penalty: Optional[float] = None,
    ) -> Tuple[DestinationModel, FitReport]:
        X, labels = _design(observations)
        return self.fit_multinomial_arrays(X, labels.astype(int), categories, stop_id, penalty)

    @timed
    def fit_multinomial_arrays(
        self,
        X: np.ndarray,
        labels: np.ndarray,
        categories: Optional[List[int]] = None,
        stop_id: int = 0,
        penalty: Optional[float] = None,
    ) -> Tuple[DestinationModel, FitReport]:
        """labels index into `categories`; index 0 is the reference destination"""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        labels = np.asarray(labels, dtype=int).ravel()
        penalty = self.settings.multinomial_penalty if penalty is None else penalty
        s = len(categories) if categories is not None else int(labels.max()) + 1
        categories = list(categories) if categories is not None else list(range(s))
        if labels.min() < 0 or labels.max() >= s:
            raise SchemaError("category index out of range")

        counts = np.bincount(labels, minlength=s)
        if penalty == 0 and np.any(counts == 0):
            empty = [categories[k] for k in np.flatnonzero(counts == 0)]
            raise EmptyCategoryError(f"stop {stop_id}: no observations for categories {empty}")

        q = X.shape[1]
        if s == 1:
            report = FitReport(log_likelihood=0.0, iterations=0, converged=True, gradient_norm=0.0)
            return DestinationModel(stop_id=stop_id, categories=categories, theta=[]), report

        onehot = np.zeros((len(labels), s))
        onehot[np.arange(len(labels)), labels] = 1.0

        theta = np.zeros((s - 1, q))
        value, grad = self.multinomial_objective(theta, X, onehot, penalty)
        history = [value]
        # 1 / Lipschitz bound of the gradient
        step = 1.0 / (0.5 * float(np.sum(X * X)) + penalty + 1e-12)
        tol = self.settings.multinomial_tol
        iterations = 0
        grad_norm = float(np.max(np.abs(grad)))

        while grad_norm > tol and iterations < self.settings.multinomial_max_iter:
            t = step
            squared = float(np.sum(grad * grad))
            for _ in range(MAX_HALVINGS):
                candidate = theta + t * grad
                cand_value, cand_grad = self.multinomial_objective(candidate, X, onehot, penalty)
                if cand_value >= value + ARMIJO * t * squared:
                    break
                t *= 0.5
            else:
                logger.debug(f"stop {stop_id}: line search stalled at iteration {iterations}")
                break

            s_vec = (candidate - theta).ravel()
            y_vec = (cand_grad - grad).ravel()
            curvature = -float(s_vec @ y_vec)
            step = float(s_vec @ s_vec) / curvature if curvature > 1e-300 else t * 2.0
            step = min(max(step, 1e-12), 1e6)

            theta, value, grad = candidate, cand_value, cand_grad
            grad_norm = float(np.max(np.abs(grad)))
            history.append(value)
            iterations += 1

        report = FitReport(
            log_likelihood=value + 0.5 * penalty * float(np.sum(theta * theta)),
            iterations=iterations,
            converged=grad_norm <= tol,
            gradient_norm=grad_norm,
            penalized=penalty > 0,
            history=history,
        )
        if not report.converged:
            logger.debug(f"stop {stop_id}: multinomial fit stopped with |grad|={grad_norm:.3e}")
        return DestinationModel(stop_id=stop_id, categories=categories, theta=theta.tolist()), report

    @staticmethod
    def multinomial_objective(
        theta: np.ndarray, X: np.ndarray, onehot: np.ndarray, penalty: float
    ) -> Tuple[float, np.ndarray]:
        """Penalized log-likelihood and its gradient with respect to theta"""
        z = np.hstack([np.zeros((X.shape[0], 1)), X @ theta.T])
        log_norm = logsumexp(z, axis=1)
        value = float(np.sum(onehot * z) - np.sum(log_norm)) - 0.5 * penalty * float(np.sum(theta * theta))
        probs = np.exp(z - log_norm[:, None])
        grad = (onehot[:, 1:] - probs[:, 1:]).T @ X - penalty * theta
        return value, grad

    def predict_destination_probs(self, model: DestinationModel, x: Covariates) -> np.ndarray:
        row = _row(x)
        theta = model.coefficients(row.shape[-1])
        if theta.shape[0] and theta.shape[1] != row.shape[-1]:
            raise SchemaError("covariate length does not match destination model")
        z = np.concatenate([[0.0], theta @ row])
        return softmax(z)

    # ==================== SERIALIZATION ====================

    def save_models(self, models: Iterable[StopModels], directory: Union[str, Path]) -> List[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for item in models:
            path = directory / f"stop_{item.stop_id}.json"
            with open(path, "w", encoding="utf-8") as f:
                json.dump(item.model_dump(mode="json"), f, indent=2)
            paths.append(path)
        logger.info(f"Saved {len(paths)} stop models to {directory}")
        return paths

    def load_models(self, directory: Union[str, Path]) -> dict:
        directory = Path(directory)
        models = {}
        for path in sorted(directory.glob("stop_*.json")):
            with open(path, "r", encoding="utf-8") as f:
                try:
                    item = StopModels.model_validate(json.load(f))
                except ValueError as e:
                    raise SchemaError(f"invalid model file {path.name}", details=str(e))
            models[item.stop_id] = item
        return models


# Global regression service instance
regression_service = RegressionService()

"""Ridge readout and forecast metrics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from qrc.errors import ContractError

GAMMA_NO_REGRESSORS = 1e-10
GAMMA_WITH_REGRESSORS = 0.1


@dataclass(frozen=True, eq=False)
class RidgeModel:
    """Linear readout; ``weights[-1]`` is the intercept (zero when disabled)."""

    weights: np.ndarray
    gamma: float
    fit_intercept: bool = True
    singular: bool = False

    @property
    def n_features(self) -> int:
        return len(self.weights) - 1

    @property
    def coef(self) -> np.ndarray:
        return self.weights[:-1]

    @property
    def intercept(self) -> float:
        return float(self.weights[-1])

    def to_csv(self, path, feature_names=None) -> None:
        names = list(feature_names) if feature_names is not None else [f"x{i}" for i in range(self.n_features)]
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("feature,weight\n")
            for name, w in zip(names + ["intercept"], self.weights):
                fh.write(f"{name},{w:.17g}\n")


@dataclass(frozen=True, eq=False)
class ForecastReport:
    mae: float
    mda: float
    predictions: np.ndarray
    mae_scaled: float


def design_matrix(X, fit_intercept: bool = True) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    ones = np.ones((len(X), 1)) if fit_intercept else np.zeros((len(X), 1))
    return np.hstack([X, ones])


def penalty(n_cols: int, gamma: float, fit_intercept: bool = True) -> np.ndarray:
    d = np.full(n_cols, float(gamma))
    # intercept is never penalized; with no intercept its column is all zero and
    # a unit penalty pins its weight at 0
    d[-1] = 0.0 if fit_intercept else 1.0
    return np.diag(d)


def fit_ridge(X, y, gamma: float, fit_intercept: bool = True) -> RidgeModel:
    """Solve ``(Xt^T Xt + gamma I') W = Xt^T y`` with ``Xt = [X, 1]``."""
    Xt = design_matrix(X, fit_intercept)
    y = np.asarray(y, dtype=float)
    if Xt.shape[0] != len(y):
        raise ContractError(f"feature matrix has {Xt.shape[0]} rows but {len(y)} targets were given")
    if len(y) < 2:
        raise ContractError("ridge fit needs at least 2 samples")
    if gamma < 0:
        raise ContractError(f"gamma must be >= 0, got {gamma}")
    A = Xt.T @ Xt + penalty(Xt.shape[1], gamma, fit_intercept)
    b = Xt.T @ y
    singular = False
    try:
        factor = scipy.linalg.cho_factor(A)
        w = scipy.linalg.cho_solve(factor, b)
        # one step of iterative refinement for ill-conditioned tiny-gamma systems
        w = w + scipy.linalg.cho_solve(factor, b - A @ w)
        if not np.all(np.isfinite(w)):
            raise np.linalg.LinAlgError("non-finite solution")
    except np.linalg.LinAlgError:
        if gamma > 0:
            raise
        singular = True
        warnings.warn("normal equations are singular; using the pseudoinverse solution", RuntimeWarning)
        w = np.linalg.pinv(A) @ b
    return RidgeModel(w, float(gamma), fit_intercept, singular)


def normal_equation_residual(model: RidgeModel, X, y) -> float:
    """``|A W - b| / (1 + |b|)`` for the system the model was fit on."""
    Xt = design_matrix(X, model.fit_intercept)
    A = Xt.T @ Xt + penalty(Xt.shape[1], model.gamma, model.fit_intercept)
    b = Xt.T @ np.asarray(y, dtype=float)
    return float(np.linalg.norm(A @ model.weights - b) / (1.0 + np.linalg.norm(b)))


def predict(model: RidgeModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] != model.n_features:
        raise ContractError(f"model expects {model.n_features} features, got {X.shape[1]}")
    return X @ model.coef + model.intercept


def _check_lengths(*arrays):
    n = len(arrays[0])
    if n < 1 or any(len(a) != n for a in arrays):
        raise ContractError(f"metric inputs must have equal nonzero lengths, got {[len(a) for a in arrays]}")


def mae(y_true, y_pred) -> float:
    y_true, y_pred = np.asarray(y_true, float), np.asarray(y_pred, float)
    _check_lengths(y_true, y_pred)
    return float(np.mean(np.abs(y_true - y_pred)))


def _direction(x, tie_eps):
    return np.where(np.abs(x) <= tie_eps, 0, np.sign(x))


def mda(y_true, y_pred, y_prev, tie_eps: float = 0.0) -> float:
    """Fraction of steps whose predicted move direction (up / flat / down) is right.

    ``y_prev`` is the last observed value before each target.
    """
    y_true, y_pred, y_prev = (np.asarray(a, float) for a in (y_true, y_pred, y_prev))
    _check_lengths(y_true, y_pred, y_prev)
    return float(np.mean(_direction(y_pred - y_prev, tie_eps) == _direction(y_true - y_prev, tie_eps)))


def evaluate(model: RidgeModel, X_test, y_test, y_prev, scaler=None, tie_eps: float = 0.0) -> ForecastReport:
    """Predict and score. With a scaler, predictions and MAE are in original units."""
    pred = predict(model, X_test)
    y_test = np.asarray(y_test, float)
    y_prev = np.asarray(y_prev, float)
    mae_scaled = mae(y_test, pred)
    if scaler is not None:
        pred, y_test, y_prev = scaler.invert(pred), scaler.invert(y_test), scaler.invert(y_prev)
    return ForecastReport(mae(y_test, pred), mda(y_test, pred, y_prev, tie_eps), pred, mae_scaled)

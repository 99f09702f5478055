"""Multinomial maximum-entropy (softmax) classifier over the seven labels."""
from __future__ import annotations

import json
import math
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .corpus import LABELS, Label

N_CLASSES = len(LABELS)
MODEL_FORMAT = "rctextract-maxent"
MODEL_VERSION = 1


class NonFiniteLoss(ArithmeticError):
    pass


class DimensionMismatch(ValueError):
    pass


def label_indices(y) -> np.ndarray:
    """Map labels (enum members, strings or ints) onto indices of ``LABELS``."""
    out = np.empty(len(y), dtype=np.int64)
    for i, v in enumerate(y):
        if isinstance(v, (int, np.integer)):
            if not 0 <= v < N_CLASSES:
                raise ValueError(f"label index {v} out of range")
            out[i] = v
        else:
            out[i] = LABELS.index(Label(v))
    return out


def softmax(scores: np.ndarray) -> np.ndarray:
    z = scores - scores.max(axis=1, keepdims=True)
    np.exp(z, out=z)
    z /= z.sum(axis=1, keepdims=True)
    return z


def _log_softmax(scores: np.ndarray) -> np.ndarray:
    m = scores.max(axis=1, keepdims=True)
    return scores - m - np.log(np.exp(scores - m).sum(axis=1, keepdims=True))


def loss_and_gradient(W: np.ndarray, b: np.ndarray, X, y: np.ndarray, l2: float = 0.0,
                      sample_weight: Optional[np.ndarray] = None
                      ) -> Tuple[float, np.ndarray, np.ndarray]:
    """L2-regularized multinomial negative log-likelihood and its gradient.

    Parameters
    ----------
    W : (n_classes, n_features) weights
    b : (n_classes,) biases
    X : (n_samples, n_features) dense or sparse design matrix
    y : (n_samples,) class indices
    l2 : penalty ``l2/2 * (|W|^2 + |b|^2)``
    sample_weight : optional per-example weights

    Returns
    -------
    loss, dW, db
    """
    n = X.shape[0]
    if n == 0:
        raise DimensionMismatch("empty batch")
    if X.shape[1] != W.shape[1]:
        raise DimensionMismatch(f"X has {X.shape[1]} features, W has {W.shape[1]}")
    scores = np.asarray(X @ W.T) + b
    logp = _log_softmax(scores)
    sw = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    per_example = -logp[np.arange(n), y] * sw
    # exactly rounded sum: duplicating the batch exactly doubles the loss
    loss = math.fsum(per_example.tolist())
    loss += 0.5 * l2 * (math.fsum((W * W).ravel().tolist()) + math.fsum((b * b).tolist()))
    resid = np.exp(logp)
    resid[np.arange(n), y] -= 1.0
    resid *= sw[:, None]
    dW = np.asarray((X.T @ resid).T) + l2 * W
    db = resid.sum(axis=0) + l2 * b
    if not math.isfinite(loss):
        raise NonFiniteLoss("loss is not finite")
    return loss, dW, db


def _check_X(X):
    if sp.issparse(X):
        return check_array(X, accept_sparse="csr", dtype=np.float64)
    return check_array(X, dtype=np.float64)


def _gradient_descent(fun, theta0, max_iter, tol):
    theta = theta0.copy()
    f, g = fun(theta)
    history = [f]
    step = 1.0
    for _ in range(max_iter):
        gnorm2 = float(g @ g)
        if math.sqrt(gnorm2) <= tol:
            break
        # backtracking (Armijo) line search
        while True:
            cand = theta - step * g
            fc, gc = fun(cand)
            if fc <= f - 1e-4 * step * gnorm2:
                break
            step *= 0.5
            if step < 1e-20:
                return theta, history
        theta, f, g = cand, fc, gc
        history.append(f)
        step *= 2.0
    return theta, history


class MaxEntClassifier(BaseEstimator, ClassifierMixin):
    """Softmax logistic regression with a fixed label order ``P, A1, A2, OC, R1, R2, O``.

    Parameters
    ----------
    l2 : float
        Strength of the L2 penalty on weights and biases.
    max_iter : int
        Optimizer iteration cap. ``0`` leaves the zero model (uniform output).
    tol : float
        Gradient-norm stopping tolerance.
    solver : {"lbfgs", "gd"}
        ``"gd"`` is plain gradient descent with backtracking line search.
    class_weight : dict or None
        Optional per-label example weights.
    seed : int
        Kept for interface stability; both solvers are deterministic.
    """

    def __init__(self, l2=1.0, max_iter=500, tol=1e-6, solver="lbfgs", class_weight=None, seed=0):
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol
        self.solver = solver
        self.class_weight = class_weight
        self.seed = seed

    def fit(self, X, y, sample_weight=None):
        if X is None or X.shape[0] == 0:
            raise DimensionMismatch("no training examples")
        X = _check_X(X)
        yi = label_indices(y)
        if len(yi) != X.shape[0]:
            raise DimensionMismatch(f"{X.shape[0]} rows but {len(yi)} labels")
        if self.l2 < 0 or self.tol <= 0:
            raise ValueError("l2 must be >= 0 and tol > 0")
        sw = np.ones(len(yi)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        if self.class_weight:
            cw = np.ones(N_CLASSES)
            for k, v in self.class_weight.items():
                cw[LABELS.index(Label(k))] = v
            sw = sw * cw[yi]
        d = X.shape[1]
        shape = (N_CLASSES, d + 1)

        def fun(theta):
            t = theta.reshape(shape)
            loss, dW, db = loss_and_gradient(t[:, :d], t[:, d], X, yi, self.l2, sw)
            return loss, np.hstack([dW, db[:, None]]).ravel()

        theta0 = np.zeros(N_CLASSES * (d + 1))
        self.loss_history_ = [fun(theta0)[0]]
        if self.max_iter > 0:
            if self.solver == "gd":
                theta, hist = _gradient_descent(fun, theta0, self.max_iter, self.tol)
                self.loss_history_ = hist
            elif self.solver == "lbfgs":
                res = minimize(fun, theta0, jac=True, method="L-BFGS-B",
                               options={"maxiter": self.max_iter, "gtol": self.tol, "ftol": 0.0})
                theta = res.x
                self.loss_history_.append(float(res.fun))
            else:
                raise ValueError(f"unknown solver {self.solver!r}")
        else:
            theta = theta0
        t = theta.reshape(shape)
        self.coef_ = np.ascontiguousarray(t[:, :d])
        self.intercept_ = np.ascontiguousarray(t[:, d])
        if not (np.all(np.isfinite(self.coef_)) and np.all(np.isfinite(self.intercept_))):
            raise NonFiniteLoss("training diverged")
        self.classes_ = np.array([l.value for l in LABELS])
        self.n_features_in_ = d
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = _check_X(X)
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return np.asarray(X @ self.coef_.T) + self.intercept_

    def predict_proba(self, X):
        return softmax(self.decision_function(X))

    def predict_log_proba(self, X):
        return _log_softmax(self.decision_function(X))

    def predict(self, X):
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]

    def objective(self, X, y) -> float:
        """Regularized training objective at the current parameters."""
        check_is_fitted(self, "coef_")
        return loss_and_gradient(self.coef_, self.intercept_, _check_X(X), label_indices(y), self.l2)[0]

    # -- persistence -------------------------------------------------------

    def to_dict(self, feature_names: Optional[Sequence[str]] = None) -> dict:
        check_is_fitted(self, "coef_")
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "labels": [l.value for l in LABELS],
            "params": self.get_params(),
            "features": list(feature_names) if feature_names is not None else None,
            "weights": self.coef_.tolist(),
            "bias": self.intercept_.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MaxEntClassifier":
        if d.get("format") != MODEL_FORMAT:
            raise ValueError("not a maxent model document")
        if d.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {d.get('version')!r}")
        if d["labels"] != [l.value for l in LABELS]:
            raise ValueError("label order mismatch")
        m = cls(**d["params"])
        m.coef_ = np.asarray(d["weights"], dtype=np.float64).reshape(N_CLASSES, -1)
        m.intercept_ = np.asarray(d["bias"], dtype=np.float64)
        m.classes_ = np.array([l.value for l in LABELS])
        m.n_features_in_ = m.coef_.shape[1]
        if d.get("features") is not None and len(d["features"]) != m.n_features_in_:
            raise DimensionMismatch("feature list and weight rows disagree")
        return m

    def dumps(self, feature_names=None) -> str:
        return json.dumps(self.to_dict(feature_names), sort_keys=True)

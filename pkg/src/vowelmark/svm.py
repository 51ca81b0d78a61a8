"""Binary kernel SVM trained by sequential minimal optimization.

Kernels: linear, polynomial (degree 3, coef0 0), RBF; gamma is 1/d for
the latter two. Labels are +1/-1 and sign(0) predicts +1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._smo import BACKEND, smo_solve
from .errors import DimensionMismatch, SingleClassTraining

COSTS = (0.0001, 0.0005, 0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0)
KERNELS = ("linear", "poly", "rbf")
_KERNEL_ORDER = {"linear": 0, "poly": 1, "rbf": 2}

KKT_TOL = 1e-3
SUPPORT_EPS = 1e-12


@dataclass(frozen=True)
class SvmConfig:
    cost: float
    kernel: str

    def __post_init__(self):
        if self.cost <= 0:
            raise ValueError("cost must be positive")
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")

    def sort_key(self):
        return (self.cost, _KERNEL_ORDER[self.kernel])


def default_grid() -> tuple[SvmConfig, ...]:
    """All 27 cost/kernel cells, ordered by the tie-break preference."""
    grid = [SvmConfig(c, k) for c in COSTS for k in KERNELS]
    grid.sort(key=SvmConfig.sort_key)
    return tuple(grid)


def kernel_matrix(kernel: str, gamma: float, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    G = A @ B.T
    if kernel == "linear":
        return G
    if kernel == "poly":
        return (gamma * G) ** 3
    if kernel == "rbf":
        sq = (
            (A * A).sum(axis=1)[:, None]
            + (B * B).sum(axis=1)[None, :]
            - 2.0 * G
        )
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ValueError(f"unknown kernel {kernel!r}")


@dataclass
class SvmModel:
    config: SvmConfig
    gamma: float
    support_vectors: np.ndarray
    dual_coef: np.ndarray       # alpha_i * y_i per support vector
    alphas: np.ndarray
    support_labels: np.ndarray
    bias: float
    n_features: int

    def decision(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"expected {self.n_features} features, got {X.shape[1]}"
            )
        km = kernel_matrix(self.config.kernel, self.gamma, X, self.support_vectors)
        return km @ self.dual_coef + self.bias

    def predict(self, X) -> np.ndarray:
        return np.where(self.decision(X) >= 0.0, 1, -1)

    def to_dict(self) -> dict:
        return {
            "cost": self.config.cost,
            "kernel": self.config.kernel,
            "gamma": self.gamma,
            "bias": self.bias,
            "n_features": self.n_features,
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "alphas": self.alphas.tolist(),
            "support_labels": self.support_labels.astype(int).tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SvmModel":
        return cls(
            config=SvmConfig(d["cost"], d["kernel"]),
            gamma=float(d["gamma"]),
            support_vectors=np.asarray(d["support_vectors"], dtype=float),
            dual_coef=np.asarray(d["dual_coef"], dtype=float),
            alphas=np.asarray(d["alphas"], dtype=float),
            support_labels=np.asarray(d["support_labels"], dtype=float),
            bias=float(d["bias"]),
            n_features=int(d["n_features"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SvmModel":
        return cls.from_dict(json.loads(text))


def train(X, y, config: SvmConfig) -> SvmModel:
    """Train on labels in {-1, +1}; raises SingleClassTraining otherwise."""
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise DimensionMismatch("X rows must match y length")
    if not np.all(np.isfinite(X)):
        raise ValueError("training features must be finite")
    classes = np.unique(y)
    if classes.size < 2:
        raise SingleClassTraining(f"labels contain only {classes.tolist()}")
    if not set(classes.tolist()) <= {-1, 1}:
        raise ValueError("labels must be -1 or +1")

    gamma = 1.0 / X.shape[1]
    yf = y.astype(float)
    K = np.ascontiguousarray(kernel_matrix(config.kernel, gamma, X, X))
    alpha, bias, _ = smo_solve(K, yf, config.cost, tol=KKT_TOL)
    mask = alpha > SUPPORT_EPS
    return SvmModel(
        config=config,
        gamma=gamma,
        support_vectors=X[mask].copy(),
        dual_coef=(alpha * yf)[mask],
        alphas=alpha[mask].copy(),
        support_labels=yf[mask],
        bias=float(bias),
        n_features=X.shape[1],
    )


__all__ = [
    "BACKEND", "COSTS", "KERNELS", "SvmConfig", "SvmModel",
    "default_grid", "kernel_matrix", "train",
]

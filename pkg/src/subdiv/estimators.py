"""Estimator-style wrappers so the oracles slot into sklearn tooling.

Nothing here is learned; ``fit`` only validates parameters and builds the
tables the predictions read from.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import characterize as ch
from .engine import ConfigurationError, GameSpec, SubtractDisallowed, VirtualValue, build_table


def check_indices(X, name: str = "X") -> np.ndarray:
    """Flatten ``X`` (list, 1-d array or single column) to positive int64 indices."""
    arr = np.asarray(X)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"{name} must have a single column, got shape {arr.shape}")
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-d, got {arr.ndim} dimensions")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.issubdtype(arr.dtype, np.number) or not np.all(np.mod(arr, 1) == 0):
            raise ValueError(f"{name} must contain integers")
    arr = arr.astype(np.int64)
    if arr.min() < 1:
        raise ValueError(f"{name} must contain indices >= 1")
    return arr


def _spec(est) -> GameSpec:
    if est.boundary == "virtual":
        boundary = VirtualValue(est.virtual_value)
    elif est.boundary == "disallowed":
        boundary = SubtractDisallowed()
    else:
        raise ConfigurationError(f"boundary must be 'virtual' or 'disallowed', got {est.boundary!r}")
    return GameSpec(est.a, est.b, boundary, tuple((est.overrides or {}).items()))


class SGSequence(BaseEstimator):
    """Predict values ``SG_{a,b}(n)`` for the indices in ``X``."""

    def __init__(self, a=1, b=2, boundary="virtual", virtual_value=1, overrides=None):
        self.a = a
        self.b = b
        self.boundary = boundary
        self.virtual_value = virtual_value
        self.overrides = overrides

    def fit(self, X, y=None):
        idx = check_indices(X)
        self.spec_ = _spec(self)
        n_max = int(max(idx.max(), *(self.spec_.override_map or [1])))
        self.table_ = build_table(self.spec_, n_max)
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "table_")
        idx = check_indices(X)
        if idx.max() > self.table_.n_max:
            self.table_ = build_table(self.spec_, int(idx.max()))
        return self.table_.values[idx].astype(np.int64)

    def score(self, X, y) -> float:
        return float(np.mean(self.predict(X) == np.asarray(y)))


class ZeroClassifier(ClassifierMixin, BaseEstimator):
    """Classify indices as losing (1) or winning (0) with a closed-form oracle.

    ``Unknown`` verdicts come out as -1 and are left out of ``score``.
    """

    def __init__(self, oracle="theorem1", a=1, b=2, overrides=None, N=None, prefix_len=None):
        self.oracle = oracle
        self.a = a
        self.b = b
        self.overrides = overrides
        self.N = N
        self.prefix_len = prefix_len

    def fit(self, X, y=None):
        idx = check_indices(X)
        if self.oracle not in ch.ORACLES:
            raise ConfigurationError(f"unknown oracle {self.oracle!r}")
        self.spec_ = GameSpec(self.a, self.b, overrides=tuple((self.overrides or {}).items()))
        self.classes_ = np.array([0, 1])
        self._prepare(int(idx.max()))
        return self

    def _prepare(self, n_max: int) -> None:
        d = self.b // 2
        need = n_max
        if self.oracle == "perturbed":
            N = self.N or (max(self.spec_.override_map, default=0) + 1)
            need = max(need, ch.perturbed_thresholds(d, N)["table"] + 4 * d * d)
        elif self.oracle == "theorem2":
            need = max(need, self.a * (2 * d) ** (self.a + 2) + self.a)
        self.table_ = build_table(self.spec_, need)
        kw = {}
        if self.oracle == "perturbed" and self.N:
            kw["N"] = self.N
        if self.oracle == "theorem2" and self.prefix_len:
            kw["prefix_len"] = self.prefix_len
        self._fn = ch._oracle_fn(self.oracle, self.spec_, self.table_, **kw)

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "table_")
        idx = check_indices(X)
        if idx.max() > self.table_.n_max:
            self._prepare(int(idx.max()))
        code = {ch.ZERO: 1, ch.NONZERO: 0, ch.UNKNOWN: -1}
        return np.array([code[self._fn(int(n)).verdict] for n in idx], dtype=np.int64)

    def score(self, X, y=None) -> float:
        """Agreement with ``y`` (or with the engine when ``y`` is omitted) on decided indices."""
        pred = self.predict(X)
        if y is None:
            y = (self.table_.values[check_indices(X)] == 0).astype(np.int64)
        y = np.asarray(y)
        known = pred >= 0
        return float(np.mean(pred[known] == y[known])) if known.any() else float("nan")


class DigitTransformer(TransformerMixin, BaseEstimator):
    """Base-``base`` digits of each index, least significant first, zero padded."""

    def __init__(self, base=2, n_digits=None):
        self.base = base
        self.n_digits = n_digits

    def fit(self, X, y=None):
        idx = check_indices(X)
        if int(self.base) < 2:
            raise ValueError("base must be >= 2")
        width = 1
        top = int(idx.max())
        while self.base**width <= top:
            width += 1
        self.n_digits_ = self.n_digits or width
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "n_digits_")
        idx = check_indices(X)
        if idx.max() >= self.base**self.n_digits_:
            raise ValueError("index too large for the fitted digit width")
        out = np.empty((idx.size, self.n_digits_), dtype=np.int64)
        rest = idx.copy()
        for j in range(self.n_digits_):
            rest, out[:, j] = np.divmod(rest, self.base)
        return out

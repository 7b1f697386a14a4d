"""Estimator-style wrappers: fit on an instance, then sample pairs or predict logarithms.

Parameters live in ``__init__`` so ``get_params``/``set_params`` and
``sklearn.base.clone`` work; everything learned from the instance ends in ``_``.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import ParameterError
from .group import ProblemInstance
from .postprocess import RecoveryParams, RecoveryReport, recover_d
from .simulator import DEFAULT_WINDOW, Sample, SimulatorConfig, sample_pair, trial_rng


def check_instance(instance) -> ProblemInstance:
    """Accept a ProblemInstance, its dict form or its JSON text."""
    if isinstance(instance, ProblemInstance):
        return instance
    if isinstance(instance, dict):
        return ProblemInstance.from_dict(instance)
    if isinstance(instance, str):
        return ProblemInstance.from_json(instance)
    raise ParameterError(f"expected a ProblemInstance, dict or JSON string, got {type(instance).__name__}")


def check_pairs(pairs, m: int, ell: int) -> List[tuple]:
    """Validate ``(j, k)`` pairs and return them as a list of Python int tuples.

    Accepts an ``(n, 2)`` array-like, a sequence of 2-tuples, or Sample objects.
    """
    out = []
    if isinstance(pairs, np.ndarray):
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ParameterError(f"pairs must have shape (n, 2), got {pairs.shape}")
        pairs = pairs.tolist()
    for item in pairs:
        if isinstance(item, Sample):
            if item.k is None:
                raise ParameterError("sample has no k (tail event)")
            item = (item.j, item.k)
        try:
            j, k = item
            j, k = int(j), int(k)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"malformed pair {item!r}") from exc
        if not 0 <= j < (1 << (m + ell)):
            raise ParameterError(f"j={j} outside [0, 2^(m+l))")
        if not 0 <= k < (1 << ell):
            raise ParameterError(f"k={k} outside [0, 2^l)")
        out.append((j, k))
    return out


class QuantumOutputSampler(BaseEstimator):
    """Classical stand-in for the quantum step of a fitted instance."""

    def __init__(self, window: int = DEFAULT_WINDOW, tail_policy: str = "fail", seed: int = 0):
        self.window = window
        self.tail_policy = tail_policy
        self.seed = seed

    def fit(self, instance, y=None):
        self.instance_ = check_instance(instance)
        if self.instance_.d is None:
            raise ParameterError("sampling needs an instance with known d")
        self.config_ = SimulatorConfig(window=self.window, tail_policy=self.tail_policy, seed=self.seed)
        return self

    def sample(self, n: int, start: int = 0) -> List[Sample]:
        """Samples for trials ``start .. start + n - 1`` (tail events included)."""
        check_is_fitted(self, "config_")
        return [sample_pair(self.instance_, self.config_, trial_rng(self.seed, t))
                for t in range(start, start + n)]

    def sample_pairs(self, n: int, start: int = 0) -> np.ndarray:
        """``(n', 2)`` object array of ``(j, k)``, tail events dropped."""
        rows = [(s.j, s.k) for s in self.sample(n, start) if s.k is not None]
        return np.array(rows, dtype=object).reshape(-1, 2)


class ShortDlogSolver(BaseEstimator, TransformerMixin):
    """Recover ``d`` from single pairs with the lattice and meet-in-the-middle search."""

    def __init__(self, tau: int = 7, c: int = 1, verify_range: bool = True):
        self.tau = tau
        self.c = c
        self.verify_range = verify_range

    def fit(self, instance, y=None):
        inst = check_instance(instance)
        self.params_ = RecoveryParams(tau=self.tau, c=self.c, verify_range=self.verify_range)
        if self.tau > inst.ell:
            raise ParameterError(f"tau={self.tau} exceeds l={inst.ell}")
        self.instance_ = inst
        return self

    def transform(self, pairs) -> List[RecoveryReport]:
        check_is_fitted(self, "params_")
        inst = self.instance_
        ctx, g, x = inst.elements()
        return [recover_d(g, x, j, k, inst.m, inst.ell, self.params_, d_true=inst.d)
                for j, k in check_pairs(pairs, inst.m, inst.ell)]

    def predict(self, pairs) -> List[Optional[int]]:
        """Recovered logarithm per pair, ``None`` where the search found nothing."""
        return [r.d if r.found else None for r in self.transform(pairs)]

    def score(self, pairs, y=None) -> float:
        """Fraction of pairs whose prediction equals ``y`` (default: the instance's own ``d``)."""
        preds = self.predict(pairs)
        if not preds:
            return float("nan")
        if y is None:
            if self.instance_.d is None:
                raise ParameterError("score needs y or an instance with known d")
            y = [self.instance_.d] * len(preds)
        if len(y) != len(preds):
            raise ParameterError("y and pairs differ in length")
        return sum(p is not None and p == int(t) for p, t in zip(preds, y)) / len(preds)

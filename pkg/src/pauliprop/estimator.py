"""scikit-learn style wrappers: angles in, expectation values out."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .overlaps import overlap
from .propagation import Circuit, as_pauli_sum, propagate, propagate_tracked
from .surrogate import compile_surrogate, evaluate_surrogate
from .validation import check_theta_matrix, check_truncation


class PauliPropagator(TransformerMixin, BaseEstimator):
    """Propagate ``observable`` through ``circuit`` for each row of angles.

    ``transform`` returns the propagated sums (object array), ``predict``
    their overlaps with ``state``.
    """

    def __init__(self, circuit: Circuit = None, observable=None, state="zero", min_abs_coeff=1e-10,
                 max_weight=None, max_freq=None, max_sins=None, max_pathweight=None):
        self.circuit = circuit
        self.observable = observable
        self.state = state
        self.min_abs_coeff = min_abs_coeff
        self.max_weight = max_weight
        self.max_freq = max_freq
        self.max_sins = max_sins
        self.max_pathweight = max_pathweight

    def fit(self, X=None, y=None):
        if not isinstance(self.circuit, Circuit):
            raise TypeError("circuit must be a Circuit")
        self.observable_ = as_pauli_sum(self.observable, self.circuit.nqubits)
        self.truncation_ = check_truncation(self.min_abs_coeff, self.max_weight, self.max_freq,
                                            self.max_sins, self.max_pathweight)
        self.n_features_in_ = self.circuit.nparams
        return self

    def _run(self, row):
        fn = propagate_tracked if self.truncation_.needs_tracking else propagate
        return fn(self.circuit, self.observable_, row, self.truncation_)

    def transform(self, X):
        check_is_fitted(self, "truncation_")
        X = check_theta_matrix(X, self.n_features_in_)
        out = np.empty(len(X), dtype=object)
        for i, row in enumerate(X):
            out[i] = self._run(row)[0]
        return out

    def predict(self, X):
        return np.array([overlap(s, self.state) for s in self.transform(X)])


class SurrogateRegressor(BaseEstimator):
    """Compile once in ``fit``; ``predict`` evaluates the graph for a batch of angle rows."""

    def __init__(self, circuit: Circuit = None, observable=None, state="zero", max_weight=None,
                 max_freq=None, max_sins=None, max_pathweight=None):
        self.circuit = circuit
        self.observable = observable
        self.state = state
        self.max_weight = max_weight
        self.max_freq = max_freq
        self.max_sins = max_sins
        self.max_pathweight = max_pathweight

    def fit(self, X=None, y=None):
        if not isinstance(self.circuit, Circuit):
            raise TypeError("circuit must be a Circuit")
        cfg = check_truncation(0.0, self.max_weight, self.max_freq, self.max_sins, self.max_pathweight)
        self.graph_ = compile_surrogate(self.circuit, self.observable, cfg, self.state)
        self.n_features_in_ = self.circuit.nparams
        return self

    def predict(self, X):
        check_is_fitted(self, "graph_")
        X = check_theta_matrix(X, self.n_features_in_)
        return np.asarray(evaluate_surrogate(self.graph_, X))

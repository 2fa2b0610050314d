"""Input validation helpers shared by the estimator wrappers."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .pauli_sum import TruncationConfig


def check_theta_matrix(X, nparams: int) -> np.ndarray:
    """Coerce ``X`` to a finite float array of shape ``(n_samples, nparams)``.

    A 1-D input is read as a single parameter vector.
    """
    if X is None:
        X = np.zeros((1, nparams))
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if nparams == 0:
        X = np.zeros((X.shape[0], 0))
        return X
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != nparams:
        raise ValueError(f"expected {nparams} angles per row, got {X.shape[1]}")
    return X


def check_truncation(min_abs_coeff=1e-10, max_weight=None, max_freq=None, max_sins=None,
                     max_pathweight=None) -> TruncationConfig:
    return TruncationConfig(min_abs_coeff=float(min_abs_coeff), max_weight=max_weight, max_freq=max_freq,
                            max_sins=max_sins, max_pathweight=max_pathweight)

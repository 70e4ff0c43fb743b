"""scikit-learn front end: per-triple curvature features of a finite metric space."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .config import DEFAULT_CONFIG
from .exceptions import InvalidInputError
from .metric_data import FiniteMetricSpace, enumerate_triples
from .model_surface import AmbientDescriptor
from .triple_curvature import curvature_report

FEATURES = ("g", "lambda", "k")


class TripleCurvature(TransformerMixin, BaseEstimator):
    """Curvature k_X(T) of the metric triples of a point set.

    Parameters
    ----------
    metric : str, default="precomputed"
        ``"precomputed"`` treats ``X`` as a square distance matrix.  Any
        ambient tag accepted by :meth:`AmbientDescriptor.parse` (for example
        ``"sphere:1"`` or ``"euclidean:2"``) treats the rows of ``X`` as
        points on that model surface.
    mode : {"discrete", "continuum"}, default="discrete"
        Minimise the distance sum over the points of ``X`` or over the whole
        model surface (point input only).
    triples : {"all", "sample"}, default="all"
        Which triples to evaluate.
    n_triples : int, optional
        Number of triples when ``triples="sample"``.
    random_state : int, default=0
        Seed of the triple sampler.
    tol_invert : float, default=1e-9
        Relative tolerance of the curvature inversion.
    n_jobs : int, default=1
        Workers for the per-triple inversion.

    Attributes
    ----------
    triples_ : list of MetricTriple
    reports_ : list of CurvatureReport
        Results on the training data, in triple order.
    n_features_in_ : int
    """

    def __init__(self, metric="precomputed", mode="discrete", triples="all", n_triples=None,
                 random_state=0, tol_invert=1e-9, n_jobs=1):
        self.metric = metric
        self.mode = mode
        self.triples = triples
        self.n_triples = n_triples
        self.random_state = random_state
        self.tol_invert = tol_invert
        self.n_jobs = n_jobs

    def _space(self, X):
        X = check_array(X, dtype=np.float64, ensure_min_samples=3)
        if self.metric == "precomputed":
            if X.shape[0] != X.shape[1]:
                raise InvalidInputError(f"precomputed distances must be square, got shape {X.shape}")
            if self.mode == "continuum":
                raise InvalidInputError("continuum mode needs point coordinates, not distances")
            return FiniteMetricSpace(X)
        return FiniteMetricSpace.from_points(X, AmbientDescriptor.parse(self.metric))

    def _compute(self, X):
        space = self._space(X)
        config = DEFAULT_CONFIG.updated(tol_invert=self.tol_invert)
        triples = enumerate_triples(space, self.triples, self.n_triples, int(self.random_state))
        return triples, curvature_report(space, triples, self.mode, config, n_jobs=self.n_jobs)

    def fit(self, X, y=None):
        """Compute the reports of every selected triple of ``X``."""
        X = check_array(X, dtype=np.float64, ensure_min_samples=3)
        self.triples_, self.reports_ = self._compute(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        """Return an ``(n_triples, 3)`` array of ``(g, Lambda, k_X)`` rows."""
        check_is_fitted(self, "reports_")
        X = check_array(X, dtype=np.float64, ensure_min_samples=3)
        if X.shape[1] != self.n_features_in_:
            raise InvalidInputError(f"X has {X.shape[1]} columns, fitted with {self.n_features_in_}")
        _, reports = self._compute(X)
        return _as_array(reports)

    def fit_transform(self, X, y=None):
        return _as_array(self.fit(X).reports_)

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURES, dtype=object)

    @property
    def statuses_(self):
        check_is_fitted(self, "reports_")
        return np.array([r.status for r in self.reports_], dtype=object)


def _as_array(reports):
    return np.array([(r.g, r.lam, r.k_value) for r in reports], dtype=float).reshape(-1, 3)

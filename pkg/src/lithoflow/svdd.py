"""
Support vector data description: the smallest kernel-space sphere holding
one class, and the saturation classification built on it.

Dual problem solved here (a minimisation)::

    min_a  a'Ka - sum_i a_i K_ii   s.t.  sum_i a_i = 1,  0 <= a_i <= C

Distance of ``x`` to the centre, squared::

    R2(x) = K(x, x) - 2 sum_i a_i K(x_i, x) + a'Ka
"""
import json
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, OutlierMixin
from sklearn.utils.validation import check_is_fitted

from .chunks import apply_in_chunks, cube_rows
from .exceptions import ConfigurationError, InfeasibleError, NumericError, ValidationError
from .stats import ConfusionCounts, NormParams, g_metric, zscore_params
from .validation import as_1d, as_2d

FORMAT_VERSION = 1
CLASS_LOW, CLASS_HIGH = 0, 1
BOUNDARY_TOL = 1e-12
RADIUS_RULES = ("boundary", "support", "bounded")


@dataclass(frozen=True)
class KernelSpec:
    """``gaussian``: exp(-|x - y|^2 / (2 width^2));
    ``polynomial``: (x.y + offset)^degree."""

    kind: str = "gaussian"
    width: float = 2.0
    degree: int = 2
    offset: float = 1.0

    def __post_init__(self):
        if self.kind == "gaussian":
            if not self.width > 0:
                raise ConfigurationError(f"gaussian width must be positive, got {self.width}")
        elif self.kind == "polynomial":
            if int(self.degree) != self.degree or not 2 <= self.degree <= 10:
                raise ConfigurationError(f"polynomial degree must be an integer in [2, 10], got {self.degree}")
        else:
            raise ConfigurationError(f"unknown kernel {self.kind!r}")

    def to_dict(self):
        return {"kind": self.kind, "width": self.width, "degree": self.degree, "offset": self.offset}


def kernel_matrix(spec, A, B):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[1]:
        raise ValidationError(f"kernel inputs must share a feature dimension, got {A.shape} and {B.shape}")
    if spec.kind == "gaussian":
        K = np.exp(-cdist(A, B, "sqeuclidean") / (2.0 * spec.width ** 2))
    else:
        K = (A @ B.T + spec.offset) ** int(spec.degree)
    if not np.all(np.isfinite(K)):
        raise NumericError("kernel produced non-finite values")
    return K


def kernel_eval(spec, x, y):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError(f"kernel arguments must be equal-length vectors, got {x.shape} and {y.shape}")
    return float(kernel_matrix(spec, x[None, :], y[None, :])[0, 0])


def kernel_diag(spec, X):
    if spec.kind == "gaussian":
        return np.ones(X.shape[0])
    return (np.einsum("ij,ij->i", X, X) + spec.offset) ** int(spec.degree)


def dual_objective(K, alpha):
    return float(alpha @ K @ alpha - alpha @ np.diag(K))


def solve_dual(K, C, tol=1e-10, max_iter=100_000):
    """Pairwise (SMO-style) minimisation of the dual.

    Each step moves mass from the multiplier with the largest gradient that
    can still decrease to the one with the smallest gradient that can still
    increase, by the exact minimiser along that direction clipped to the
    box. Stops when the maximal KKT violation drops below ``tol``.

    Returns ``(alpha, iterations)``.
    """
    n = K.shape[0]
    if C * n < 1 - 1e-12:
        raise InfeasibleError(f"C={C} is infeasible for {n} training vectors: need C >= 1/n = {1.0 / n!r}")
    C = min(C, 1.0)
    diag = np.diag(K).copy()
    alpha = np.full(n, 1.0 / n)
    g = 2.0 * K @ alpha - diag
    slack = 1e-15
    for it in range(max_iter):
        up = alpha < C - slack
        down = alpha > slack
        if not up.any() or not down.any():
            return alpha, it
        gi = np.where(up, g, np.inf)
        gj = np.where(down, g, -np.inf)
        i, j = int(np.argmin(gi)), int(np.argmax(gj))
        if gj[j] - gi[i] < tol:
            return alpha, it
        eta = diag[i] + diag[j] - 2.0 * K[i, j]
        t_max = min(C - alpha[i], alpha[j])
        t = t_max if eta <= 0 else min(t_max, (gj[j] - gi[i]) / (2.0 * eta))
        alpha[i] += t
        alpha[j] -= t
        if alpha[j] < slack:
            alpha[j] = 0.0
        if alpha[i] > C - slack:
            alpha[i] = C
        g += 2.0 * t * (K[:, i] - K[:, j])
    raise NumericError(f"SVDD solver did not reach KKT tolerance {tol} in {max_iter} updates")


@dataclass
class SvddModel:
    vectors: np.ndarray
    alpha: np.ndarray
    C: float
    kernel: KernelSpec
    r2: float
    aka: float
    radius_rule: str = "boundary"
    x_norm: NormParams = None
    feature_names: list = field(default_factory=list)
    iterations: int = 0

    def distance2(self, X):
        """Squared kernel-space distance to the centre for every row of ``X``."""
        X = as_2d(X)
        if X.shape[1] != self.vectors.shape[1]:
            raise ValidationError(f"expected {self.vectors.shape[1]} features, got {X.shape[1]}")
        Kx = kernel_matrix(self.kernel, X, self.vectors)
        return kernel_diag(self.kernel, X) - 2.0 * Kx @ self.alpha + self.aka

    def is_outlier(self, X):
        return self.distance2(X) >= self.r2 - BOUNDARY_TOL

    @property
    def radius(self):
        return float(np.sqrt(max(self.r2, 0.0)))

    def to_dict(self):
        return {
            "format": "lithoflow-svdd",
            "version": FORMAT_VERSION,
            "vectors": self.vectors.tolist(),
            "alpha": self.alpha.tolist(),
            "C": self.C,
            "kernel": self.kernel.to_dict(),
            "r2": self.r2,
            "aka": self.aka,
            "radius_rule": self.radius_rule,
            "x_norm": self.x_norm.to_dict() if self.x_norm is not None else None,
            "feature_names": list(self.feature_names),
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("format") != "lithoflow-svdd" or d.get("version") != FORMAT_VERSION:
            raise ValidationError("not a version-1 lithoflow SVDD document")
        return cls(np.asarray(d["vectors"], dtype=float), np.asarray(d["alpha"], dtype=float),
                   d["C"], KernelSpec(**d["kernel"]), d["r2"], d["aka"], d["radius_rule"],
                   NormParams.from_dict(d["x_norm"]) if d.get("x_norm") else None,
                   d.get("feature_names", []), d.get("iterations", 0))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def svdd_radius(alpha, K, C, rule="boundary", sv_tol=1e-8):
    """Squared radius from trained multipliers.

    ``"boundary"``: largest training distance over unbounded support vectors
    (``sv_tol < a < C - sv_tol``); without any, the midpoint of the interval
    allowed by the optimality conditions. ``"support"``: largest distance
    over all ``a > sv_tol``. ``"bounded"``: largest distance over bounded
    vectors (``a >= C - sv_tol``), falling back to ``"boundary"``.
    """
    if rule not in RADIUS_RULES:
        raise ConfigurationError(f"unknown radius rule {rule!r}; choose from {RADIUS_RULES}")
    aka = float(alpha @ K @ alpha)
    d2 = np.diag(K) - 2.0 * K @ alpha + aka
    C_eff = min(C, 1.0)
    free = (alpha > sv_tol) & (alpha < C_eff - sv_tol)
    bounded = alpha >= C_eff - sv_tol
    if rule == "support":
        return float(d2[alpha > sv_tol].max()), aka
    if rule == "bounded" and bounded.any():
        return float(d2[bounded].max()), aka
    if free.any():
        return float(d2[free].max()), aka
    # inside points bound the radius from above, bounded ones from below
    zero = alpha <= sv_tol
    lo = d2[bounded].max() if bounded.any() else None
    hi = d2[zero].min() if zero.any() else None
    if lo is None:
        return float(hi), aka
    if hi is None:
        return float(lo), aka
    return float(0.5 * (lo + hi)), aka


def svdd_train(X, C=0.008, kernel=None, radius_rule="boundary", tol=1e-10, max_iter=100_000,
               x_norm=None, feature_names=None):
    """Fit the description of the rows of ``X``.

    ``X`` is used as given; ``x_norm`` is only stored so downstream callers
    can apply the same scaling to new data.
    """
    X = as_2d(X, min_rows=1)
    kernel = kernel or KernelSpec()
    K = kernel_matrix(kernel, X, X)
    alpha, iters = solve_dual(K, C, tol, max_iter)
    r2, aka = svdd_radius(alpha, K, C, radius_rule)
    return SvddModel(X.copy(), alpha, float(C), kernel, r2, aka, radius_rule, x_norm,
                     list(feature_names or []), iters)


def svdd_classify(model, X):
    """``CLASS_LOW`` (inside, the described class) or ``CLASS_HIGH`` (outlier,
    including the boundary) for every row."""
    return np.where(model.is_outlier(X), CLASS_HIGH, CLASS_LOW)


class SVDD(OutlierMixin, BaseEstimator):
    """Estimator wrapper. ``predict`` returns +1 inside and -1 for outliers;
    ``decision_function`` is ``R^2 - R^2(x)``, negative or zero for outliers."""

    def __init__(self, C=0.008, kernel="gaussian", width=2.0, degree=2, offset=1.0,
                 radius_rule="boundary", tol=1e-10):
        self.C = C
        self.kernel = kernel
        self.width = width
        self.degree = degree
        self.offset = offset
        self.radius_rule = radius_rule
        self.tol = tol

    def fit(self, X, y=None):
        spec = KernelSpec(self.kernel, self.width, self.degree, self.offset)
        self.model_ = svdd_train(X, self.C, spec, self.radius_rule, self.tol)
        self.n_features_in_ = self.model_.vectors.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        return self.model_.r2 - BOUNDARY_TOL - self.model_.distance2(X)

    def predict(self, X):
        return np.where(self.decision_function(X) > 0, 1, -1)


@dataclass
class SaturationLabels:
    labels: np.ndarray
    threshold: float

    @property
    def is_low(self):
        return self.labels == CLASS_LOW

    @property
    def minority_fraction(self):
        return float(np.mean(self.is_low)) if self.labels.size else float("nan")


def threshold_labels(saturation, thr=0.7):
    """``CLASS_HIGH`` where saturation >= ``thr``, else ``CLASS_LOW``."""
    s = as_1d(saturation, "saturation")
    if s.min() < 0 or s.max() > 1:
        raise ValidationError("saturation values must lie in [0, 1]")
    return SaturationLabels(np.where(s >= thr, CLASS_HIGH, CLASS_LOW), float(thr))


@dataclass
class OneClassResult:
    test_well: str
    g: float
    counts: ConfusionCounts
    g_blind: float
    counts_blind: ConfusionCounts
    seconds: float
    work: int
    model: SvddModel


def _safe_g(c):
    if c.tp + c.fn == 0 or c.tn + c.fp == 0:
        return float("nan")
    return g_metric(c)


def one_class_workflow(datasets, test_well, C=0.008, kernel=None, thr=0.7, radius_rule="boundary",
                       feature_idx=None, standardize=True):
    """Train on the pooled minority rows of every well but ``test_well`` and
    evaluate on the majority rows of those wells plus all rows of the test
    well. The minority class (low saturation) is the positive class.

    ``datasets`` are AlignedDatasets whose target is saturation. Predictors
    are z-scored with statistics of all rows of the training wells.
    ``g_blind`` and ``counts_blind`` restrict the evaluation to the test well.
    """
    kernel = kernel or KernelSpec()
    ids = [d.well_id for d in datasets]
    if test_well not in ids:
        raise ConfigurationError(f"test well {test_well!r} is not among {ids}")
    train = [d for d in datasets if d.well_id != test_well]
    test = datasets[ids.index(test_well)]
    cols = slice(None) if feature_idx is None else list(feature_idx)
    names = [str(n) for n in np.asarray(test.predictor_names)[cols]]
    Xtr = np.vstack([d.predictors[:, cols] for d in train])
    low_tr = np.concatenate([threshold_labels(d.target, thr).is_low for d in train])
    if not low_tr.any():
        raise ConfigurationError("training wells contain no minority (low-saturation) rows")
    n_min = int(low_tr.sum())
    if C * n_min < 1:
        raise InfeasibleError(f"C={C} is infeasible for {n_min} minority rows; use C >= {1.0 / n_min!r}")
    norm = zscore_params(Xtr) if standardize else None

    def prep(X):
        return norm.apply(X) if norm is not None else X

    t0 = time.perf_counter()
    model = svdd_train(prep(Xtr[low_tr]), C, kernel, radius_rule, x_norm=norm, feature_names=names)
    Xte = test.predictors[:, cols]
    low_te = threshold_labels(test.target, thr).is_low
    pred_blind = svdd_classify(model, prep(Xte)) == CLASS_LOW
    pred_major = svdd_classify(model, prep(Xtr[~low_tr])) == CLASS_LOW
    seconds = time.perf_counter() - t0
    counts_blind = ConfusionCounts.from_labels(low_te, pred_blind)
    counts = counts_blind + ConfusionCounts.from_labels(np.zeros(pred_major.size, bool), pred_major)
    work = model.iterations * n_min
    return OneClassResult(test_well, _safe_g(counts), counts, _safe_g(counts_blind), counts_blind,
                          seconds, work, model)


def classify_volume(model, cubes, threads=1):
    """Label every voxel; 0.0 = low saturation (inside), 1.0 = high.

    Cubes are matched to the model's features by name when the model
    records feature names, otherwise taken in the given order.
    """
    ref, X = cube_rows(cubes, model.feature_names)

    def fn(rows):
        Z = model.x_norm.apply(rows) if model.x_norm is not None else rows
        return svdd_classify(model, Z).astype(float)

    out = apply_in_chunks(fn, X, threads)
    return ref.with_values(out.reshape(ref.dims), "svdd_label")

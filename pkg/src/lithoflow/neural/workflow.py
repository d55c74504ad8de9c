"""Dataset splitting, pooled normalisation, training and volume prediction."""
import json
from dataclasses import dataclass, field

import numpy as np

from ..chunks import apply_in_chunks, cube_rows
from ..exceptions import ConfigurationError, ValidationError
from ..stats import NormParams, minmax_params, regression_metrics, zscore_params
from .mlp import MlpModel, mlp_init
from .scg import TrainConfig, TrainHistory, scg_train

FORMAT_VERSION = 1
CAPACITY_RATIO = 15


@dataclass
class FittedAnn:
    """A trained network with the normalisation it expects.

    ``predict`` takes predictors in physical units and returns the target
    in physical units.
    """

    model: MlpModel
    x_norm: NormParams
    y_norm: NormParams
    predictor_names: list
    target_name: str
    config: dict = field(default_factory=dict)
    history: TrainHistory = None

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[1] != len(self.predictor_names):
            raise ValidationError(
                f"expected {len(self.predictor_names)} predictors, got {X.shape[1]}")
        out = self.model.predict(self.x_norm.apply(X))[:, 0]
        return self.y_norm.inverse(out)

    def to_dict(self):
        return {
            "format": "lithoflow-ann",
            "version": FORMAT_VERSION,
            "model": self.model.to_dict(),
            "x_norm": self.x_norm.to_dict(),
            "y_norm": self.y_norm.to_dict(),
            "predictor_names": self.predictor_names,
            "target_name": self.target_name,
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("format") != "lithoflow-ann" or d.get("version") != FORMAT_VERSION:
            raise ValidationError("not a version-1 lithoflow ANN document")
        return cls(MlpModel.from_dict(d["model"]), NormParams.from_dict(d["x_norm"]),
                   NormParams.from_dict(d["y_norm"]), d["predictor_names"], d["target_name"],
                   d.get("config", {}))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def pooled_normalization(datasets, lo=0.1, hi=0.9):
    """Z-score parameters for predictors and min-max parameters for the
    target, computed over all rows of all ``datasets`` together."""
    X = np.vstack([d.predictors for d in datasets])
    y = np.concatenate([d.target for d in datasets])
    return zscore_params(X), minmax_params(y, lo, hi)


def split_rows(n, rng, split=0.7):
    """Shuffle ``range(n)`` and cut it into train, test and validation parts.

    ``floor(split * n)`` rows train; the remainder is halved, the first
    half (rounded down) going to test.
    """
    if not 0 < split < 1:
        raise ConfigurationError(f"split must lie in (0, 1), got {split}")
    perm = rng.permutation(n)
    n_tr = int(np.floor(split * n))
    n_te = (n - n_tr) // 2
    return perm[:n_tr], perm[n_tr:n_tr + n_te], perm[n_tr + n_te:]


def check_capacity(n_params, n_train, ratio=CAPACITY_RATIO, label="network"):
    limit = n_train // ratio
    if n_params > limit:
        raise ConfigurationError(
            f"{label}: {n_params} trainable parameters exceed the limit of {limit} "
            f"({n_train} training rows / {ratio}); reduce the hidden width or add data")


@dataclass
class SplitData:
    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    X_val: np.ndarray
    y_val: np.ndarray
    val_wells: np.ndarray = None


def make_splits(datasets, split=0.7, seed=0, mode="pooled", blind_well=None):
    """Assemble train/test/validation rows from per-well datasets.

    ``mode="pooled"`` splits every well ``split`` / rest and pools the parts.
    ``mode="leave_well_out"`` does the same over all wells except
    ``blind_well`` and then uses the whole blind well for validation.
    Training rows are shuffled.
    """
    rng = np.random.default_rng(seed)
    by_id = {d.well_id: d for d in datasets}
    if mode == "leave_well_out":
        if blind_well not in by_id:
            raise ConfigurationError(f"blind well {blind_well!r} is not among {sorted(by_id)}")
        train_wells = [d for d in datasets if d.well_id != blind_well]
        if not train_wells:
            raise ConfigurationError("leave-well-out mode needs at least one training well")
    elif mode == "pooled":
        train_wells = list(datasets)
    else:
        raise ConfigurationError(f"unknown split mode {mode!r}")
    parts = {"train": [], "test": [], "val": []}
    for d in train_wells:
        tr, te, va = split_rows(len(d), rng, split)
        parts["train"].append((d.predictors[tr], d.target[tr]))
        parts["test"].append((d.predictors[te], d.target[te]))
        parts["val"].append((d.predictors[va], d.target[va]))
    val_wells = [np.full(p[1].size, d.well_id, dtype=object) for d, p in zip(train_wells, parts["val"])]
    if mode == "leave_well_out":
        blind = by_id[blind_well]
        parts["val"] = [(blind.predictors, blind.target)]
        val_wells = [np.full(len(blind), blind_well, dtype=object)]

    def stack(key):
        return (np.vstack([p[0] for p in parts[key]]), np.concatenate([p[1] for p in parts[key]]))

    X_tr, y_tr = stack("train")
    order = rng.permutation(y_tr.size)
    X_te, y_te = stack("test")
    X_va, y_va = stack("val")
    return SplitData(X_tr[order], y_tr[order], X_te, y_te, X_va, y_va, np.concatenate(val_wells))


@dataclass
class WorkflowResult:
    fitted: FittedAnn
    validation: object
    test: object
    n_train: int
    history: TrainHistory
    per_well: dict = field(default_factory=dict)


def train_network(X, y, x_norm, y_norm, hidden=10, cfg=None, label="network"):
    """Normalise, check capacity and train one single-hidden-layer network."""
    cfg = cfg or TrainConfig()
    hidden = [hidden] if np.isscalar(hidden) else list(hidden)
    widths = [X.shape[1], *hidden, 1]
    model = mlp_init(widths, seed=cfg.seed)
    check_capacity(model.n_params, X.shape[0], label=label)
    model, hist = scg_train(model, x_norm.apply(X), y_norm.apply(y)[:, None], cfg)
    return model, hist


def ann_fit_workflow(datasets, split=0.7, cfg=None, hidden=10, mode="pooled", blind_well=None,
                     norm_datasets=None):
    """Split, normalise with pooled statistics, train and score one network.

    Parameters
    ----------
    datasets : sequence of AlignedDataset
        One per well, sharing a predictor set.
    norm_datasets : sequence of AlignedDataset, optional
        Rows whose pooled statistics define the normalisation; defaults to
        ``datasets``.

    Returns
    -------
    WorkflowResult
        Validation and test metrics are in target units against the target
        the network was trained on.
    """
    datasets = list(datasets)
    cfg = cfg or TrainConfig()
    if not datasets:
        raise ValidationError("no datasets given")
    if len(datasets) < 2 and len(datasets[0]) < 100:
        raise ValidationError("need at least 2 wells or at least 100 samples")
    names = datasets[0].predictor_names
    if any(d.predictor_names != names for d in datasets):
        raise ValidationError("datasets have different predictor sets")
    x_norm, y_norm = pooled_normalization(norm_datasets or datasets)
    sp = make_splits(datasets, split, cfg.seed, mode, blind_well)
    model, hist = train_network(sp.X_train, sp.y_train, x_norm, y_norm, hidden, cfg)
    fitted = FittedAnn(model, x_norm, y_norm, list(names), datasets[0].target_name,
                       {"train": cfg.to_dict(), "hidden": hidden, "split": split, "mode": mode,
                        "blind_well": blind_well}, hist)
    val = regression_metrics(fitted.predict(sp.X_val), sp.y_val)
    test = regression_metrics(fitted.predict(sp.X_test), sp.y_test) if sp.y_test.size > 1 else None
    per_well = {}
    for w in dict.fromkeys(sp.val_wells):
        rows = sp.val_wells == w
        if rows.sum() > 1 and np.ptp(sp.y_val[rows]) > 0:
            per_well[w] = regression_metrics(fitted.predict(sp.X_val[rows]), sp.y_val[rows])
    return WorkflowResult(fitted, val, test, int(sp.y_train.size), hist, per_well)


def predict_volume(fitted, cubes, threads=1, name=None):
    """Evaluate a fitted network at every voxel of congruent predictor cubes."""
    ref, X = cube_rows(cubes, fitted.predictor_names)
    out = apply_in_chunks(fitted.predict, X, threads)
    return ref.with_values(out.reshape(ref.dims), name or fitted.target_name)

"""Multilayer perceptron, scaled conjugate gradient training and the
prediction workflow."""
from .estimator import SCGRegressor
from .mlp import ACTIVATIONS, MlpModel, forward, logsig, loss_and_gradient, mlp_init, tansig
from .scg import TrainConfig, TrainHistory, gdm_minimize, quadratic_problem, scg_minimize, scg_train
from .workflow import (FittedAnn, WorkflowResult, ann_fit_workflow, check_capacity,
                       make_splits, pooled_normalization, predict_volume, split_rows, train_network)

__all__ = [
    "ACTIVATIONS", "FittedAnn", "MlpModel", "SCGRegressor", "TrainConfig", "TrainHistory",
    "WorkflowResult", "ann_fit_workflow", "check_capacity", "forward",
    "gdm_minimize", "logsig", "loss_and_gradient", "make_splits", "mlp_init",
    "pooled_normalization", "predict_volume", "quadratic_problem", "scg_minimize", "scg_train",
    "split_rows", "tansig", "train_network",
]

"""Adaptive method selection: sub-tagging, balancing, feature elimination,
MLP training, and the boosted training loop."""

from seqreduce.selector.balance import smote_balance
from seqreduce.selector.boost import (
    DEFAULT_GRID,
    SelectorModel,
    boost_train,
    load_selector,
    save_selector,
    select_method,
)
from seqreduce.selector.metrics import ClassificationReport, evaluate_metrics
from seqreduce.selector.mlp import MlpConfig, MlpModel, grid_search, mlp_predict, mlp_train
from seqreduce.selector.rfe import rfe_select
from seqreduce.selector.tagging import (
    LABEL_ORDER,
    TIE_ORDER,
    TaggedInstance,
    meta_features,
    method_accuracies,
    pick_label,
    scalar_feature_names,
    sub_tag,
)

__all__ = [
    "DEFAULT_GRID", "SelectorModel", "boost_train", "load_selector", "save_selector",
    "select_method", "ClassificationReport", "evaluate_metrics", "MlpConfig", "MlpModel",
    "grid_search", "mlp_predict", "mlp_train", "rfe_select", "LABEL_ORDER", "TIE_ORDER",
    "TaggedInstance", "meta_features", "method_accuracies", "pick_label",
    "scalar_feature_names", "sub_tag", "smote_balance",
]

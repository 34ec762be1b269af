"""From-scratch supervised learners for the warning system: cost-sensitive
random forest, pruned C4.5, kNN and Gaussian naive Bayes, plus rule
extraction and model serialization."""

from ..trajdata import ClassLabel, LabeledInstance
from .bayes import NaiveBayesModel, predict_nb, predict_nb_batch, train_naive_bayes
from .core import CostMatrix, apply_cost_reweighting
from .forest import ForestModel, predict_forest, predict_forest_batch, train_random_forest
from .knn import KnnModel, predict_knn, predict_knn_batch, train_knn
from .rules import Rule, extract_rules, render_rule
from .serialize import dumps_model, load_model, loads_model, save_model
from .tree import TreeModel, predict_tree, predict_tree_batch, train_c45

__all__ = [
    "ClassLabel",
    "CostMatrix",
    "ForestModel",
    "KnnModel",
    "LabeledInstance",
    "NaiveBayesModel",
    "Rule",
    "TreeModel",
    "apply_cost_reweighting",
    "dumps_model",
    "extract_rules",
    "load_model",
    "loads_model",
    "predict_forest",
    "predict_forest_batch",
    "predict_knn",
    "predict_knn_batch",
    "predict_nb",
    "predict_nb_batch",
    "predict_tree",
    "predict_tree_batch",
    "render_rule",
    "save_model",
    "train_c45",
    "train_knn",
    "train_naive_bayes",
    "train_random_forest",
]

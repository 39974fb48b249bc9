"""Classifier-gated text simplification in front of a machine translation engine."""

__version__ = "0.1.0"

from .classifiers import NBModel, Prediction, SVMHyper, SVMModel, load_model, save_model, train_nb, train_svm
from .corpus import AnnotatedPair, Token, load_annotated, tokenize
from .evaluation import ConfusionMatrix, EvalReport, confusion, metrics, report
from .features import FEATURE_NAMES, FeatureResources, build_resources, extract_batch, extract_features
from .gate import GateDecision, MockEngine, CommandEngine, Pipeline, decide

__all__ = [
    "AnnotatedPair", "CommandEngine", "ConfusionMatrix", "EvalReport", "FEATURE_NAMES",
    "FeatureResources", "GateDecision", "MockEngine", "NBModel", "Pipeline", "Prediction",
    "SVMHyper", "SVMModel", "Token", "build_resources", "confusion", "decide", "extract_batch",
    "extract_features", "load_annotated", "load_model", "metrics", "report", "save_model",
    "tokenize", "train_nb", "train_svm",
]

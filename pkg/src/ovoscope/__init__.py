"""Chicken egg fertility classification from candling images."""

from .enhancement import ClaheConfig, clahe, equalize_hist, hybrid_clahe_he
from .evaluation import ConfusionMatrix, ScenarioReport, accuracy, confusion, run_scenarios
from .features import FeatureVector, extract_features
from .raster import GrayImage, RgbImage, decode_netpbm, encode_pgm, to_grayscale
from .segmentation import segment_crop
from .svm import LabeledSample, SvmModel, TrainConfig, predict, train_smo

__version__ = "0.1.0"

__all__ = [
    "ClaheConfig", "clahe", "equalize_hist", "hybrid_clahe_he",
    "ConfusionMatrix", "ScenarioReport", "accuracy", "confusion", "run_scenarios",
    "FeatureVector", "extract_features",
    "GrayImage", "RgbImage", "decode_netpbm", "encode_pgm", "to_grayscale",
    "segment_crop",
    "LabeledSample", "SvmModel", "TrainConfig", "predict", "train_smo",
]

"""BTHOWeN: weightless neural networks built from counting Bloom filters."""
from .encoding import ThermometerEncoder
from .filters import BinaryBloomFilter, CountingBloomFilter, ExactCountingFilter
from .hashing import H3HashFamily
from .model import BthowenModel, ModelConfig
from .pipeline import TrainingRun, train_model

__all__ = [
    "BinaryBloomFilter",
    "BthowenModel",
    "CountingBloomFilter",
    "ExactCountingFilter",
    "H3HashFamily",
    "ModelConfig",
    "ThermometerEncoder",
    "TrainingRun",
    "train_model",
]

"""End-to-end training: fit encoder, one-shot train, pick bleaching threshold, binarize."""
from dataclasses import dataclass

from .datasets import LabeledDataset, split
from .encoding import ThermometerEncoder
from .model import BthowenModel, ModelConfig

VALIDATION_FRACTION = 0.1


@dataclass
class TrainingRun:
    counting: BthowenModel
    model: BthowenModel
    bleach: int
    val_accuracy: float


def config_for(dataset: LabeledDataset, bits_per_input: int, inputs_per_filter: int, entries_per_filter: int,
               hashes_per_filter: int, seed: int = 0) -> ModelConfig:
    return ModelConfig(dataset.feature_count, dataset.class_count, bits_per_input, inputs_per_filter,
                       entries_per_filter, hashes_per_filter, seed)


def train_model(config: ModelConfig, train: LabeledDataset,
                validation_fraction: float = VALIDATION_FRACTION) -> TrainingRun:
    """Train on a seeded 90% share of ``train``; the other 10% picks ``b``."""
    if train.feature_count != config.feature_count:
        raise ValueError(f"dataset has {train.feature_count} features, config expects {config.feature_count}")
    if train.class_count > config.class_count:
        raise ValueError(f"dataset has {train.class_count} classes, config allows {config.class_count}")
    if len(train) < 3:
        raise ValueError("need at least 3 training samples (fit + validation)")
    fit_part, val_part = split(train, 1 - validation_fraction, seed=config.seed)
    encoder = ThermometerEncoder.fit(fit_part.features, config.bits_per_input)
    names = train.label_names if train.label_names and len(train.label_names) == config.class_count else None
    counting = BthowenModel.create(config, encoder, names)
    counting.train(fit_part.features, fit_part.labels)
    b, acc = counting.select_bleach(val_part.features, val_part.labels)
    return TrainingRun(counting, counting.binarize(b), b, acc)

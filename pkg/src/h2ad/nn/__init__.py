"""Supervised source-number estimators built from scratch on numpy."""

from .dataset import (LabeledDataset, SweepSpec, dataset_generate,
                      load_dataset, full_array_log_eigenvalues, save_dataset)
from .layers import cross_entropy, softmax
from .models import (ConvSourceCounter, DenseSourceCounter, build_cnn_net,
                     build_dense_net, cnn_flops, cnn_forward, dense_flops,
                     dense_forward)
from .network import (Network, TrainConfig, load_network, save_network,
                      train_network)
from .persist import (SpectrumClassifier, export_counter, fit_and_export,
                      load_classifier)

__all__ = [
    "LabeledDataset", "SweepSpec", "dataset_generate", "load_dataset",
    "full_array_log_eigenvalues", "save_dataset", "cross_entropy", "softmax",
    "ConvSourceCounter", "DenseSourceCounter", "build_cnn_net",
    "build_dense_net", "cnn_flops", "cnn_forward", "dense_flops",
    "dense_forward", "Network", "TrainConfig", "load_network", "save_network",
    "train_network", "SpectrumClassifier", "export_counter", "fit_and_export",
    "load_classifier",
]

"""Multi-axle half-car suspension dynamics toolkit.

Simulates an n-axle half vehicle over random rough roads, aggregates the
response into performance metrics and a composite index, builds parameter ->
metric datasets, trains a multitask surrogate predictor (with a fully
connected baseline for comparison) and ranks parameter sensitivity.
"""

__version__ = "0.1.0"

from .dataset import (DatasetRow, GenerationReport, SamplingSpec,
                      generate_dataset, read_dataset_csv, sample_parameters,
                      write_dataset_csv)
from .road import (RoadProfile, RoadSpec, flat_profile, generate_profile,
                   height_at, load_profile_csv, save_profile_csv)
from .sdpi import MetricVector, sdpi, sdpi_custom
from .sensitivity import (SensitivityMatrix, compute_sensitivity,
                          sensitivity_report, simulator_evaluator,
                          surrogate_evaluator)
from .sim import SimConfig, SimResponse, response_metrics, simulate
from .surrogate import (EvalReport, MtlNetwork, Prediction, RbmLayer,
                        TrainConfig, TrainResult, evaluate, fine_tune,
                        load_checkpoint, predict, predict_batch, pretrain_dbn,
                        save_checkpoint, train_baseline_dnn, train_surrogate)
from .vehicle import (SystemMatrices, VehicleParams, assemble_matrices,
                      default_vehicle, evenly_spaced_offsets, force_vector,
                      static_axle_loads)

__all__ = [
    "__version__",
    "DatasetRow", "GenerationReport", "SamplingSpec", "generate_dataset",
    "read_dataset_csv", "sample_parameters", "write_dataset_csv",
    "RoadProfile", "RoadSpec", "flat_profile", "generate_profile", "height_at",
    "load_profile_csv", "save_profile_csv",
    "MetricVector", "sdpi", "sdpi_custom",
    "SensitivityMatrix", "compute_sensitivity", "sensitivity_report",
    "simulator_evaluator", "surrogate_evaluator",
    "SimConfig", "SimResponse", "response_metrics", "simulate",
    "EvalReport", "MtlNetwork", "Prediction", "RbmLayer", "TrainConfig",
    "TrainResult", "evaluate", "fine_tune", "load_checkpoint", "predict",
    "predict_batch", "pretrain_dbn", "save_checkpoint", "train_baseline_dnn",
    "train_surrogate",
    "SystemMatrices", "VehicleParams", "assemble_matrices", "default_vehicle",
    "evenly_spaced_offsets", "force_vector", "static_axle_loads",
]

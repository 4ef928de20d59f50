from .experiment import (
    CONTROLLERS,
    ExperimentConfig,
    InSituController,
    RunOutcome,
    collect_dataset,
    compare,
    compare_from_file,
    evaluate_results,
    load_config,
    member_seeds,
    prepare_ensemble,
    run_control_experiment,
    train_ensemble,
    train_pipeline,
)
from .io import Results, read_config, read_dataset_csv, read_results_csv, write_dataset_csv, write_results_csv
from .metrics import MetricsReport, compute_metrics, savings

__all__ = [
    "CONTROLLERS", "ExperimentConfig", "InSituController", "RunOutcome", "collect_dataset",
    "compare", "compare_from_file", "evaluate_results", "load_config", "member_seeds",
    "prepare_ensemble", "run_control_experiment", "train_ensemble", "train_pipeline",
    "Results", "read_config", "read_dataset_csv", "read_results_csv", "write_dataset_csv",
    "write_results_csv", "MetricsReport", "compute_metrics", "savings",
]

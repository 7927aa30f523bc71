from vivada.experiments.handles import SplitHandle, load_split_handles
from vivada.experiments.spec import ExperimentSpec
from vivada.experiments.provenance import fingerprints, provenance
from vivada.experiments.runners import (
    RUNNERS,
    ExperimentResult,
    TopicFold,
    agreement_table,
    model_names,
    predict_all,
    run_agreement,
    run_baseline_comparison,
    run_domain,
    run_experiment,
    run_temporal,
    run_topic_cv,
    topic_folds,
    train_model,
    train_models,
    write_result,
)

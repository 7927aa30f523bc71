from vivada.evaluation.metrics import (
    METRIC_NAMES,
    PRF,
    Correlation,
    auc,
    confusion,
    f1_at,
    metric,
    prf,
    prf_of,
    roc_points,
    spearman,
)
from vivada.evaluation.bootstrap import Comparison, Interval, bootstrap_ci, compare, resample_indices
from vivada.evaluation.agreement import AgreementReport, agreement_report
from vivada.evaluation.report import (
    EvalReport,
    ModelReport,
    delta_table,
    evaluate,
    model_report,
    pooled_summary,
    significance_matrix,
    write_roc_csv,
)

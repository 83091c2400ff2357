"""diffnet: infer the latent directed network behind observed contagion cascades.

Toolkit pieces: Kronecker ground-truth generation, SI cascade simulation,
greedy submodular edge inference with lazy gain evaluation, resubmission-log
ingestion, evaluation/export with rendered figures, and a parallel sweep
runner.
"""
from .cascades import (
    Cascade,
    CascadeParseError,
    CascadeSet,
    GenerationResult,
    TransmissionModel,
    generate_cascade_set,
    read_cascades,
    simulate_cascade,
    write_cascades,
)
from .evaluate import (
    EvalReport,
    IterationCurve,
    degree_table,
    export_graph,
    iteration_curve,
    precision_recall,
)
from .graphs import (
    DirectedGraph,
    KroneckerSeed,
    kronecker_generate,
    read_graph,
    write_graph,
)
from .inference import (
    EdgeCandidate,
    InferenceConfig,
    InferredNetwork,
    Selection,
    build_candidates,
    edge_log_weight,
    infer,
    marginal_gain,
    naive_infer,
    read_inferred,
    total_log_score,
    write_inferred,
)
from .ingest import (
    SubmissionRecord,
    ThresholdStats,
    build_event_lists,
    clean,
    read_submission_log,
    stats,
    threshold,
    threshold_sweep,
    to_cascade_set,
)
from .sweep import ExperimentTask, SweepResult, build_matrix, dispatch

__version__ = "0.1.0"

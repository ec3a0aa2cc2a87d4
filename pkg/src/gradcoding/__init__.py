"""Numerically stable binary gradient coding.

A 0/1 task-assignment code over congruence classes of workers that recovers
the exact full gradient from any n - s worker responses by pure addition,
plus the online decoder, load-balance metrics, a heterogeneous-worker load
planner, and a straggler-injected gradient descent simulator.
"""

from .params import CodeParams, ParameterError, derive_params
from .encoder import (
    BipartiteView,
    EncodingMatrix,
    build_c1,
    build_c2,
    build_encoding,
    to_bipartite,
)
from .decoder import (
    DecodingVector,
    InfeasibleScenarioError,
    MissingWorkerError,
    ScanStats,
    StragglerScenario,
    class_vector,
    recover_gradient,
    scan_order,
    select_decoder,
    select_decoder_fast,
)
from .metrics import (
    LoadReport,
    VerificationReport,
    balance_property,
    check_lemma,
    distance_ds,
    load_report,
    load_vector,
    min_class_structured_ds,
    uniform_target,
    verify_scheme,
)
from .hetero import (
    HeteroPlan,
    WorkerTypeSpec,
    plan_m_types,
    plan_two_types,
    round_plan,
    worker_type,
)
from .sim import (
    Dataset,
    DelayRace,
    FixedStragglers,
    IterationRecord,
    RunLog,
    SimConfig,
    StragglerModel,
    UniformStragglers,
    direct_gradient,
    load_csv,
    parse_straggler_model,
    partial_gradient,
    partial_gradients,
    partition_dataset,
    run_descent,
    run_iteration,
    squared_loss,
    synthetic_dataset,
    worker_compute,
)

__version__ = "0.1.0"

"""Overlap-minimizing start-time scheduling for shared-channel broadcasts.

The package has four layers: `core` (the time model and overlap cost),
`schedulers` (greedy, exhaustive, and random start-time assignment),
`simulator` (a deterministic CSMA/CA channel), and the experiment
harness (`scenario`, `experiment`, `cli`).
"""

from .core import (
    InadmissibleRequestError,
    Interval,
    Schedule,
    TimePoint,
    TimeSpan,
    TransmissionRequest,
    compute_duration,
    feasible,
    intervals,
    overlap,
    total_cost,
    window,
)
from .experiment import (
    ComparisonSummary,
    MissingSchedulerError,
    SchedulerSummary,
    SweepRow,
    SweepTable,
    emit,
    format_summary,
    read_table,
    render,
    report_comparison,
    rescale_requests,
    run_experiment,
    run_scheduler,
)
from .scenario import (
    ScenarioError,
    ScenarioSpec,
    WindowSweep,
    load_scenario,
    parse_scenario,
)
from .schedulers import (
    CandidateGrid,
    InstanceTooLargeError,
    ScheduleResult,
    SchedulerConfig,
    candidate_grid,
    compare_cost,
    exhaustive_schedule,
    random_schedule,
    tsgs_schedule,
)
from .simulator import (
    ChannelConfig,
    ConnectionStats,
    SenderState,
    SimReport,
    collision_summary,
    pdr,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateGrid",
    "ChannelConfig",
    "ComparisonSummary",
    "ConnectionStats",
    "InadmissibleRequestError",
    "InstanceTooLargeError",
    "Interval",
    "MissingSchedulerError",
    "ScenarioError",
    "ScenarioSpec",
    "Schedule",
    "ScheduleResult",
    "SchedulerConfig",
    "SchedulerSummary",
    "SenderState",
    "SimReport",
    "SweepRow",
    "SweepTable",
    "TimePoint",
    "TimeSpan",
    "TransmissionRequest",
    "WindowSweep",
    "candidate_grid",
    "collision_summary",
    "compare_cost",
    "compute_duration",
    "emit",
    "exhaustive_schedule",
    "feasible",
    "format_summary",
    "intervals",
    "load_scenario",
    "overlap",
    "parse_scenario",
    "pdr",
    "random_schedule",
    "read_table",
    "render",
    "report_comparison",
    "rescale_requests",
    "run_experiment",
    "run_scheduler",
    "simulate",
    "total_cost",
    "tsgs_schedule",
    "window",
]

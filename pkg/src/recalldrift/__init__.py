"""Overexposure risk modeling for resurfaced content.

Scores reuse events, gates provenance prompts by cost, replays event logs
counterfactually and reports reductions with calibration and prior bands.
"""

from .calibration import CalibrationReport, calibration_report
from .errors import ConfigError, ParameterError, ProvenanceParseError
from .events import EventLog, Override, ReuseEvent, read_log, write_log
from .lattice import (
    AudienceOntology,
    AudienceScope,
    DriftKind,
    DriftOutcome,
    MappedScope,
    Ordering,
    classify_drift,
    compare_scopes,
    map_scope,
)
from .provenance import (
    Activity,
    BadgeLabel,
    ProvenanceRecord,
    attach_record,
    detect_scope_widening,
    read_record,
    render_badge,
)
from .recall import (
    AgeBucket,
    DecayParams,
    EffectMode,
    FeatureVector,
    InterventionEffect,
    RecallModelParams,
    apply_intervention,
    evaluate_recall,
    recall_decay,
)
from .replay import (
    CounterSet,
    Dominance,
    Policy,
    PolicyKind,
    PolicyReport,
    SensitivityBand,
    collect_counters,
    dominance_check,
    replay_policy,
    sensitivity_sweep,
)
from .risk import (
    CostModel,
    ScoredEvent,
    cumulative_overexposures,
    delta_r,
    greedy_budget_select,
    per_event_risk,
    rule_trigger,
    should_intervene,
)
from .simgen import SimConfig, generate_log, sample_outcomes

__version__ = "0.1.0"

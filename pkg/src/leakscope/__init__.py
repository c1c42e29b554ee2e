"""Leak localization toolkit for n-parallel-pipe water networks."""

from .headloss import (
    Linear,
    PipeSet,
    PowerLaw,
    QuadraticPlusLinear,
    SignedQuadratic,
    UnboundedDerivativeError,
)
from .hydraulics import (
    DataPoint,
    FixedDemand,
    HydraulicState,
    LeakSpec,
    NoRootError,
    PowerLawLeak,
    SqrtLeak,
    head_profile,
    measure,
    solve_leaky_state,
    sweep,
)
from .isolation import (
    IsolationVerdict,
    LeakFitResult,
    TooFewPointsError,
    apparent_leak_flow,
    apparent_leak_head,
    fit_leak_function,
    isolate_by_consistency,
    isolate_by_leak_fit,
)
from .localization import (
    LeakCandidate,
    NoLeakError,
    PartialDataPoint,
    all_candidates,
    candidate_position,
    complete_data_point,
    estimate_outflow,
    residual,
    residual_bar,
)
from .scenario import Scenario, ScenarioError, parse_scenario
from .sensitivity import (
    ConfusionFlowCurve,
    SectionResistances,
    confusion_flow_curve,
    detect_inherent_ambiguity,
    residual_differential,
    section_resistances,
    zero_dh_sensitivity,
)

__version__ = "0.1.0"


def bundled_scenario(name: str):
    """Path to a bundled example scenario, e.g. ``bundled_scenario("example1")``."""
    from importlib.resources import files

    return files("leakscope") / "scenarios" / f"{name}.json"

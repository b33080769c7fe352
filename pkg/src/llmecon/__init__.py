"""llmecon: total expected cost of LLM-assisted question answering.

Combines per-request generation cost models for Base / fine-tuned /
retrieval-augmented pipelines, the extended cost-of-pass with human
validation and fallback, a Monte Carlo verification oracle, and pairwise
statistical comparison of system accuracies.
"""

__version__ = "0.1.0"

from .econ import (  # noqa: E402,F401
    CopResult,
    EconomicsParams,
    break_even_accuracy,
    cost_of_pass,
    extended_cost_of_pass,
    sweep,
)
from .errors import ConfigError, DomainError, TransportError  # noqa: F401
from .pricing import (  # noqa: F401
    CostBreakdown,
    DatasetProfile,
    PipelineKind,
    PipelineSpec,
    PriceCatalog,
    WorkloadProfile,
    amortization_curve,
    marginal_cost,
    per_request_cost,
    utilization_cost_bounds,
)
from .simulate import SimulationReport, simulate  # noqa: F401
from .stats import (  # noqa: F401
    OutcomeTable,
    PairwiseMatrix,
    PairwiseResult,
    holm_adjust,
    pairwise_matrix,
    partially_overlapping_prop_test,
)

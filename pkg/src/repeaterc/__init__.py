"""Resource reduction by quantum repeaters over noisy qubit channels."""

from .channels import (
    BellInput,
    ChannelKind,
    DensityMatrix,
    WatchedOutcome,
    bell_mixture_lambda,
    kraus_ops,
    param_from_gamma,
    propagate_bell,
    watched_conditional,
)
from .entmeasures import (
    BoundsReport,
    binary_entropy,
    bounds,
    coherent_info_pair,
    concurrence,
    distill_pure,
    distill_two_bell_mixture,
    entanglement_of_formation,
    von_neumann_entropy,
)
from .repeater import (
    BoundMode,
    EtaPoint,
    EtaScan,
    Scenario,
    crossover_gamma,
    eta,
    optimal_sections,
    scan,
    scan_yield,
    threshold_sections,
    yield_per_source,
)

__version__ = "0.1.0"

"""Planted-solution QUBO generation and classical sampler benchmarking."""
__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    ConfigurationError,
    ContractError,
    DimensionError,
    PosiplantError,
    SizeCapError,
    SparseGraphError,
)
from .model import (  # noqa: E402
    Literal,
    Posiform,
    Qubo,
    brute_force,
    eval_posiform,
    eval_qubo,
    posiform_to_qubo,
    qubo_to_posiform,
)
from .planting import PlantedInstance, PlantingConfig, combine, plant  # noqa: E402
from .topology import EdgeSet  # noqa: E402
from .twosat import Clause, TwoSatFormula  # noqa: E402

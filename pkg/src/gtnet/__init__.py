"""Graph-tensor completion: spectral graph transforms, imputation and
TNN-ADMM solvers, and an unrolled convolutional completion network."""

from .errors import (
    DataError,
    FormatError,
    GTNetError,
    NumericalError,
    ParseError,
    TrainingError,
    ValidationError,
)
from .graph import Graph, GraphTransform, spectral_transform
from .solvers import ObservationMask, SolveReport, imputation_solve, tnn_admm_solve

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "FormatError",
    "GTNetError",
    "Graph",
    "GraphTransform",
    "NumericalError",
    "ObservationMask",
    "ParseError",
    "SolveReport",
    "TrainingError",
    "ValidationError",
    "imputation_solve",
    "spectral_transform",
    "tnn_admm_solve",
]

"""Seismic attribute to lithology calibration.

Target regularization, SCG-trained multilayer perceptrons (single and
zone-wise), SVDD one-class classification and volume post-filtering.
"""
__version__ = "0.1.0"

from .exceptions import (ConfigurationError, DegenerateInputError, FormatError, InfeasibleError,
                         LithoflowError, NumericError, ParseError, RangeError, ValidationError)

__all__ = [
    "ConfigurationError", "DegenerateInputError", "FormatError", "InfeasibleError",
    "LithoflowError", "NumericError", "ParseError", "RangeError", "ValidationError",
    "__version__",
]

"""Approximate-arithmetic OFDM radar range estimation and design-space exploration."""
from .errors import (ApproxRadarError, ConfigError, DegenerateInputError, InvalidSizeError,
                     ParameterError, UnsupportedModelError)
from .fxp import (ACC_PAIR, AdderModel, ComplexFx16, Fx16, MultModel, OperatorPair, add, cmul, mul,
                  parse_pair, quantize)
from .radar import RadarConfig, TargetModel, run_pipeline
from .transform import build_rom, ifft

__version__ = "0.1.0"

__all__ = [
    "ApproxRadarError", "ConfigError", "DegenerateInputError", "InvalidSizeError", "ParameterError",
    "UnsupportedModelError", "ACC_PAIR", "AdderModel", "ComplexFx16", "Fx16", "MultModel",
    "OperatorPair", "add", "cmul", "mul", "parse_pair", "quantize", "RadarConfig", "TargetModel",
    "run_pipeline", "build_rom", "ifft",
]

"""Attack lab for two pairing-free certificateless two-party key agreement protocols."""

from .curve_math import IDENTITY, STANDARD, TOY, CurveParams, Point
from .harness import ScenarioConfig, Verdict, run_scenario

__version__ = "0.1.0"

__all__ = [
    "CurveParams",
    "IDENTITY",
    "Point",
    "STANDARD",
    "ScenarioConfig",
    "TOY",
    "Verdict",
    "run_scenario",
]

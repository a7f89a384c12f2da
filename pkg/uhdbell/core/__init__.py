from .bell import CHResult, DisplacementSettings, SetupParams
from .config import RunConfig
from .detection import CountDistribution, ModeMatch
from .optimize import SimplexConfig
from .states import State, StateKind


__all__ = [
    "CHResult",
    "CountDistribution",
    "DisplacementSettings",
    "ModeMatch",
    "RunConfig",
    "SetupParams",
    "SimplexConfig",
    "State",
    "StateKind",
]

from logging import getLogger

from .core.bell import CHResult, DisplacementSettings, SetupParams, \
    ch_combination, q_joint, q_marginal
from .core.config import RunConfig
from .core.optimize import SimplexConfig, maximize_ch
from .core.states import StateKind
from .core.sweep import find_eta_threshold, sweep_ch

__version__ = "1.0.0"  # also update pyproject.toml and the git tag

logger = getLogger(__name__)


__all__ = [
    "CHResult",
    "DisplacementSettings",
    "RunConfig",
    "SetupParams",
    "SimplexConfig",
    "StateKind",
    "ch_combination",
    "find_eta_threshold",
    "maximize_ch",
    "q_joint",
    "q_marginal",
    "sweep_ch",
]

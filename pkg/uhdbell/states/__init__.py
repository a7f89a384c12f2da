import glob
import inspect
import importlib
import os

from uhdbell.core.states import State, register_state

from .single_photon import (
    SinglePhotonSplit,
    marginal_quasidistribution_single_photon,
    quasidistribution_single_photon,
    w_joint_single_photon,
    w_marginal_single_photon,
)
from .tmsv import (
    TwoModeSqueezedVacuum,
    marginal_quasidistribution_tmsv,
    q_function_tmsv,
    q_marginal_function_tmsv,
    quasidistribution_tmsv,
    tmsv_q_covariance,
    w_joint_tmsv,
    w_marginal_tmsv,
)


__all__ = [
    "SinglePhotonSplit",
    "TwoModeSqueezedVacuum",
    "marginal_quasidistribution_single_photon",
    "marginal_quasidistribution_tmsv",
    "q_function_tmsv",
    "q_marginal_function_tmsv",
    "quasidistribution_single_photon",
    "quasidistribution_tmsv",
    "register",
    "tmsv_q_covariance",
    "w_joint_single_photon",
    "w_joint_tmsv",
    "w_marginal_single_photon",
    "w_marginal_tmsv",
]


def register():
    """
    Imports every module in this directory and registers the
    ``State`` subclasses found in them.
    """
    names = []
    modules = glob.glob(os.path.join(os.path.dirname(__file__), "*.py"))
    for f in sorted(modules):
        if os.path.isfile(f) and not f.endswith('__init__.py'):
            names.append(os.path.basename(f)[:-3])  # strip '.py'

    for m in names:
        module = importlib.import_module("." + m, __name__)
        for name in dir(module):
            c = getattr(module, name)
            if not inspect.isclass(c) or c is State:
                continue

            if issubclass(c, State) and hasattr(c, "Meta"):
                register_state(c)

from .dual import DualScalar, lift_spatial
from .engine import Executor, NonFiniteLoss, available_backends, default_backend, param_gradient
from .program import Program, Tape, Var

__all__ = [
    "DualScalar", "lift_spatial", "Executor", "NonFiniteLoss",
    "available_backends", "default_backend", "param_gradient",
    "Program", "Tape", "Var",
]

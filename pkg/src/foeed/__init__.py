"""Fourth-order edge-enhancing diffusion (FOEED) and related PDE inpainting."""
from .diffusivity import Diffusivity, DiffusivityKind
from .estimator import DiffusionInpainter, DiffusionSmoother
from .metrics import aae, mse
from .solver import Init, Model, RunReport, SolverConfig, rhs, run, smooth_run, stable_step_bound
from .tensors import Eigenframe, Mu3Rule

__all__ = [
    "DiffusionInpainter",
    "DiffusionSmoother",
    "Diffusivity",
    "DiffusivityKind",
    "Eigenframe",
    "Init",
    "Model",
    "Mu3Rule",
    "RunReport",
    "SolverConfig",
    "aae",
    "mse",
    "rhs",
    "run",
    "smooth_run",
    "stable_step_bound",
]
__version__ = "0.1.0"

"""Serial-manipulator differential kinematics on elementary transform sequences."""

from etskin._kernels import BACKEND
from etskin.ets import ETS, ElementaryTransform
from etskin.model import fkine, load_model, parse_ets

__version__ = "0.1.0"

__all__ = ["BACKEND", "ETS", "ElementaryTransform", "fkine", "load_model", "parse_ets"]

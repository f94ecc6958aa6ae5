"""Exact and high-precision tools for the symplectic geometry of Markov-type surfaces

    x^2 + y^2 + z^2 + E xyz - A x - B y - C z - D = 0.
"""

from .core.numeric import ctx, precision
from .errors import MarkovSympError
from .surface import SurfaceParams, SurfacePoint

__version__ = "0.1.0"

__all__ = ["MarkovSympError", "SurfaceParams", "SurfacePoint", "ctx", "precision", "__version__"]

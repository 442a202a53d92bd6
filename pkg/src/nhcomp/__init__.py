"""Compressible neo-Hookean material models and their stability diagnostics.

The package evaluates energy, stress, consistent tangents and objective
stress rates for three finite-strain neo-Hookean model kinds (incompressible,
coupled-compressible "mixed", and decoupled-compressible "vol-iso") over a
catalog of volumetric functions, checks the Hill and corotational stability
inequalities through their explicit quadratic forms, and solves the three
classical homogeneous deformation problems (uniaxial loading, equibiaxial
loading in plane stress, uniaxial loading in plane strain).

Command-line entry point: ``nhcomp`` (see ``nhcomp.cli``).
"""

from .materials import MaterialParams, ModelSpec, params_from_mu_nu
from .volfun import VolFun, catalog

__all__ = [
    "MaterialParams",
    "ModelSpec",
    "VolFun",
    "catalog",
    "params_from_mu_nu",
]

__version__ = "0.1.0"

"""Invariant-region-preserving finite volume solver for coupled two-species
reaction-diffusion systems on distorted polygonal meshes.

Thin convenience layer over the compiled `_core` module: configs and reports
cross the boundary as JSON, exposed here as dicts.
"""

import json

from ._core import (  # noqa: F401
    FvirpConfigError,
    FvirpSolverError,
    FvirpValidationError,
    mesh_summary,
    write_mesh_vtk,
)
from . import _core


def run_convergence(config):
    """Run a refinement sweep. `config` is a dict or JSON string."""
    return json.loads(_core.run_convergence(_as_text(config)))


def run_irp(config):
    """Run an invariant-region experiment. `config` is a dict or JSON string."""
    return json.loads(_core.run_irp(_as_text(config)))


def validate_model(config):
    """Validate a model's quasimonotone class, corner conditions and Lipschitz bound."""
    return json.loads(_core.validate_model(_as_text(config)))


def _as_text(config):
    if isinstance(config, str):
        return config
    return json.dumps(config)

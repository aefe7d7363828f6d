"""soliton-forge: exact finite-gap machinery for the KdV and NLS hierarchies.

Symbolic layer: an exact differential-polynomial ring (:mod:`~soliton_forge.diffpoly`)
generating the KdV recursion tower (:mod:`~soliton_forge.kdv_hierarchy`) and the
two-variable NLS recursion (:mod:`~soliton_forge.nls`).

Numeric layer: reference elliptic solutions (:mod:`~soliton_forge.elliptic`),
spectral-curve construction (:mod:`~soliton_forge.spectral`), auxiliary-spectrum
flows with field reconstruction (:mod:`~soliton_forge.dubrovin`), and Abel sums
along trajectories (:mod:`~soliton_forge.abel`).

The rational symmetric identity behind the Abel sums is verified exactly in
:mod:`~soliton_forge.symmetry`.
"""

from . import errors
from .diffpoly import DiffPoly, LambdaPoly, LinDiffOp

__all__ = ["DiffPoly", "LambdaPoly", "LinDiffOp", "errors"]

__version__ = "0.1.0"

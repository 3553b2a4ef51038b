"""Desk-scale lattice PRFs, Regev encryption and learner-to-distinguisher reductions."""

__version__ = "0.1.0"

from hardlearn.kernels import BACKEND  # noqa: E402

__all__ = ["BACKEND", "__version__"]

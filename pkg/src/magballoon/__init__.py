"""Magnetic-torque orientation toolkit for large inflatable orbiting antennas.

Simulates reorienting a metallized balloon antenna by running currents
through up to three orthogonal great-circle coils interacting with the
Earth's magnetic field, and sizes the associated electrical, mass,
pressure, and coating budgets.
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]

"""Nonlinear instability of Taylor-Couette flow by eigenfunction spectral reduction.

The package reduces the axisymmetric Navier-Stokes equations in an annulus to
evolution equations for complex amplitude densities on a truncated axial
wavenumber grid, using the linear stability eigenfunctions as the basis and
their adjoints for projection.  Diagnostics cover kinetic-energy spectra,
amplitude/frequency tables, standing-wave pair detection and triad resonance
classification.  A one-dimensional Kuramoto-Sivashinsky testbed is included
for time-step sensitivity experiments.
"""

from .meanflow import AnnulusGeometry, CouetteProfile, annulus_geometry, couette_profile, profile_eval
from .radial import RadialGrid, radial_grid

__all__ = [
    "AnnulusGeometry",
    "CouetteProfile",
    "annulus_geometry",
    "couette_profile",
    "profile_eval",
    "RadialGrid",
    "radial_grid",
]

__version__ = "0.1.0"

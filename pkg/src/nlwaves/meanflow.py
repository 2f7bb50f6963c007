"""Annulus geometry and the circular Couette base flow.

Lengths are nondimensionalized by the gap width, velocities by nu/gap and
time by gap^2/nu, so the Reynolds number (inner cylinder rotating, outer at
rest) enters only through the inner-wall speed V(r_i) = Re.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class AnnulusGeometry:
    """Nondimensional annulus: radius ratio h, walls at r_i = h/(1-h), r_o = 1/(1-h)."""

    h: float
    r_i: float
    r_o: float


@dataclass(frozen=True)
class CouetteProfile:
    """Circular Couette profile V(r) = coeff_A*r + coeff_B/r with V(r_i)=Re, V(r_o)=0."""

    geom: AnnulusGeometry
    Re: float
    coeff_A: float
    coeff_B: float


def annulus_geometry(h):
    """Build the annulus for radius ratio ``h`` in (0, 1); gap width is 1."""
    h = float(h)
    if not 0.0 < h < 1.0:
        raise DomainError(f"radius ratio must lie in (0, 1), got {h}")
    return AnnulusGeometry(h=h, r_i=h / (1.0 - h), r_o=1.0 / (1.0 - h))


def couette_profile(geom, Re):
    """Solve V(r_i)=Re, V(r_o)=0 for the two Couette coefficients."""
    Re = float(Re)
    if Re < 0.0:
        raise DomainError(f"Reynolds number must be non-negative, got {Re}")
    r_i, r_o = geom.r_i, geom.r_o
    if not r_o > r_i:
        raise DomainError("degenerate annulus: r_o must exceed r_i")
    # V = A r + B / r with V(r_i)=Re, V(r_o)=0 implies B = -A r_o^2
    coeff_A = Re * r_i / (r_i**2 - r_o**2)
    coeff_B = -coeff_A * r_o**2
    return CouetteProfile(geom=geom, Re=Re, coeff_A=coeff_A, coeff_B=coeff_B)


def profile_eval(profile, r):
    """Evaluate the azimuthal base-flow velocity V(r) inside the annulus."""
    r = np.asarray(r, dtype=float)
    geom = profile.geom
    eps = 1e-12 * (geom.r_o - geom.r_i)
    if np.any(r < geom.r_i - eps) or np.any(r > geom.r_o + eps):
        raise DomainError("radius outside the annulus")
    return profile.coeff_A * r + profile.coeff_B / r


def profile_shear(profile, r):
    """dV/dr = coeff_A - coeff_B / r^2."""
    r = np.asarray(r, dtype=float)
    return profile.coeff_A - profile.coeff_B / r**2

"""Extended length functionals of measured laminations on hyperbolic surfaces.

The package computes, for tuples of weighted closed and spiralling leaves on a
hyperbolic surface with geodesic boundary, the extended length functional, its
earthquake derivatives and its minimizer over the Teichmüller slice with fixed
boundary lengths.
"""

__version__ = "0.1.0"
SCHEMA_VERSION = "1.0.0"

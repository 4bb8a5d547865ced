"""Galerkin boundary element solver for time-harmonic scattering from
perfectly conducting bodies.

The heavy lifting lives in the compiled extension ``calbem._core``; this
package re-exports its public surface.
"""

from ._core import (
    Grid,
    Multitrace,
    Report,
    almond,
    cube,
    import_msh,
    menger,
    pairing_condition,
    plane_wave_field,
    regular_sphere,
    scattered_field,
    solve,
)

__all__ = [
    "Grid",
    "Multitrace",
    "Report",
    "almond",
    "cube",
    "import_msh",
    "menger",
    "pairing_condition",
    "plane_wave_field",
    "regular_sphere",
    "scattered_field",
    "solve",
]

__version__ = "0.1.0"

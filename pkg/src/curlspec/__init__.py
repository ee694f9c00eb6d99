"""Curl eigenvalue bounds on solid tori of revolution and flat tubes."""

from .antisym_tube import (
    F,
    ModeIndex,
    annulus_determinant,
    disk_dispersion,
    find_theorem2_parameters,
    g,
    j_star,
    j_star_m,
    reduced_annulus_determinant,
)
from .bessel import bessel_j, bessel_jp, bessel_y, bessel_yp, bessel_zero
from .exact_rational import certify_negativity, verify_appendix_d
from .grad_shafranov import (
    grad_shafranov_lambda1,
    laplacian_dirichlet_lambda1,
    symmetric_amperian_lambda1,
    symmetric_fluxfree_lambda1,
)
from .sections import Disk, GridMask, Rectangle
from .symmetry_decider import (
    AnnularCylinderFamily,
    StandardTorus,
    Verdict,
    decide,
    theorem1_bounds,
    theorem2_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "AnnularCylinderFamily",
    "Disk",
    "F",
    "GridMask",
    "ModeIndex",
    "Rectangle",
    "StandardTorus",
    "Verdict",
    "annulus_determinant",
    "bessel_j",
    "bessel_jp",
    "bessel_y",
    "bessel_yp",
    "bessel_zero",
    "certify_negativity",
    "decide",
    "disk_dispersion",
    "find_theorem2_parameters",
    "g",
    "grad_shafranov_lambda1",
    "j_star",
    "j_star_m",
    "laplacian_dirichlet_lambda1",
    "reduced_annulus_determinant",
    "symmetric_amperian_lambda1",
    "symmetric_fluxfree_lambda1",
    "theorem1_bounds",
    "theorem2_bounds",
    "verify_appendix_d",
]
